"""Configurations with the largest possible number of diameters.

In 3-space a set of n points has at most 2n - 2 pairs at maximal distance.
The generators below all reach the bound, and the extremality check confirms
it twice: by counting diameter pairs, and by testing that the set is tight
and equals the vertex set of its ball polytope.
"""

from ballpoly import (
    add_dangling_vertices,
    ball_truncate,
    build_face_complex,
    check_extremal,
    critical_core,
    suspended_polygon,
    tetrahedron_with_arc_points,
)

family = {
    "tetrahedron": tetrahedron_with_arc_points({}),
    "tetrahedron + 4 arc points": tetrahedron_with_arc_points({"01": 2, "02": 1, "03": 1}),
    "suspended heptagon": suspended_polygon(4),
    "truncated suspended pentagon": ball_truncate(suspended_polygon(3), 5, 0.05),
}
P = suspended_polygon(3)
family["pentagon + 2 dangling"] = add_dangling_vertices(P, [(0, 0.5), (3, 0.4)])

print(f"{'configuration':32s} {'n':>3s} {'e':>3s} {'2n-2':>4s}  extremal  critical  core")
for name, V in family.items():
    v = check_extremal(V)
    core = critical_core(V)
    print(f"{name:32s} {v.n:3d} {v.e_count:3d} {v.bound:4d}  {str(v.is_extremal):8s}  "
          f"{str(v.is_critical):8s}  {core.n}")

# removing a point destroys the equality
V = P.without(0)
v = check_extremal(V)
print(f"\npentagon minus a point: e = {v.e_count}, bound = {v.bound}, extremal = {v.is_extremal},"
      f" vertex set equal = {v.details['vertex_set_equal']}")
print("face counts of the truncated pentagon:", build_face_complex(family["truncated suspended pentagon"]).counts)
