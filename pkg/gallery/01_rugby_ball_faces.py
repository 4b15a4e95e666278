"""Face structure of a rugby ball and what changes when it is tuned.

A regular polygon on the circle of points at distance 1 from two poles
(0, 0, +-h) cuts out a ball polytope with two principal vertices and one
digonal facet per polygon point.  For odd n there is a height at which the
long diagonals of the polygon reach length 1; the polygon points then sit on
the boundary themselves and show up as dangling vertices.

Run from the repository root:  python3 gallery/01_rugby_ball_faces.py
"""

from pathlib import Path

import numpy as np

from ballpoly import build_face_complex, export_dot, export_mesh
from ballpoly.generators import reuleaux_height, rugby_ball

out = Path("gallery_output")
out.mkdir(exist_ok=True)

for n in (3, 5, 7):
    loose = build_face_complex(rugby_ball(n, 0.5))
    tuned = build_face_complex(rugby_ball(n))
    print(f"n={n}  h=0.5: (v, e, f) = {loose.counts}"
          f"   h={reuleaux_height(n):.6f}: (v, e, f) = {tuned.counts},"
          f" {len(tuned.dangling_vertices)} dangling")

# the poles are the only principal vertices of the tuned ball
FC = build_face_complex(rugby_ball(5))
print("principal vertices:", (np.round([x.position for x in FC.principal_vertices], 6) + 0.0).tolist())
print("dangling valences:", [FC.valence(x.id) for x in FC.dangling_vertices])

stats = export_mesh(FC, out / "rugby5.off", arc_step=3.0)
export_dot(FC, out / "rugby5_skeleton.dot", "skeleton")
print(f"mesh: {stats['vertices']} vertices, {stats['triangles']} triangles, area {stats['area']:.5f}")
