"""The face complex of an extremal configuration is self-dual.

Each point x of V is a vertex of B(V) and also the centre of a facet F_x.
Sending x to F_x and every edge to its dual edge reverses inclusions and is
an involution.  On the flag complex it moves every cell off itself.

The apexed prisms show that this is special: they have many involutory
self-dualities but at most one without fixed cells.
"""

from ballpoly import (
    abstract_from_face_complex,
    apexed_prism_complex,
    ball_truncate,
    barycentric_subdivision,
    build_face_complex,
    canonical_duality,
    enumerate_self_dualities,
    is_fixed_point_free,
    is_poset_isomorphic,
    suspended_polygon,
)

for n in range(3, 8):
    found = enumerate_self_dualities(apexed_prism_complex(n))
    free = sum(r.report.fixed_point_free for r in found)
    print(f"apexed {n}-prism: {len(found)} involutory self-dualities, {free} without fixed cells")

W = ball_truncate(suspended_polygon(3), 5, 0.05)
FC = build_face_complex(W)
d = canonical_duality(FC)
rep = is_fixed_point_free(d, barycentric_subdivision(FC))
print(f"\ntruncated pentagon: n={W.n}, (v, e, f) = {FC.counts}")
print("same face poset as the apexed 5-prism:", is_poset_isomorphic(abstract_from_face_complex(FC), apexed_prism_complex(5)))
print(f"canonical duality: fixed-point free {rep.fixed_point_free}, vertex disjoint {rep.vertex_disjoint}")
for vid, F in sorted(d.vertex_to_facet.items())[:4]:
    print(f"  vertex {vid} (point {FC.vertices[vid].label}) -> facet F_{F}")
