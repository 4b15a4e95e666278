"""Face structure of ball polytopes, diameter graphs and self-dualities."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .geometry import Tolerance, DEFAULT_TOLERANCE, AngularInterval, AngularIntervalSet, Circle3, circumball
from .hull import Configuration, essential_points, tighten, separating_ball, spindle_contains, in_ball_set
from .faces import FaceComplex, build_face_complex, facet_components, is_two_connected, edge_is_short, vertex_valence_check
from .vazsonyi import diameter_graph, check_extremal, critical_core, is_strongly_critical
from .duality import (
    AbstractComplex,
    abstract_from_face_complex,
    apexed_prism_complex,
    canonical_duality,
    barycentric_subdivision,
    is_fixed_point_free,
    enumerate_self_dualities,
    is_poset_isomorphic,
    DualArcPair,
    dual_arc_distance_classify,
)
from .generators import (
    regular_tetrahedron,
    tetrahedron_with_arc_points,
    suspended_polygon,
    rugby_ball,
    two_pole_family,
    ball_truncate,
    add_dangling_vertices,
)
from .io import read_configuration, write_configuration, parse_configuration, export_mesh, export_dot
