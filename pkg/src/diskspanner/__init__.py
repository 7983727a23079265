"""Sparse attack-resilient subgraphs of disk intersection graphs."""

from .arrangement import (
    Arrangement,
    LensOracle,
    WitnessedEdge,
    build_arrangement,
    min_depth_in_lens,
    shallow_edges,
    shallow_edges_bipartite,
)
from .attack import (
    AttackSet,
    SafeZoneReport,
    VerificationReport,
    components_after_attack,
    generate_attack,
    is_safe_point,
    safe_zone,
    verify_spanner,
)
from .connector import (
    Coloring,
    ConnectorGraph,
    ConnectorParams,
    build_connector,
    check_connector,
    consecutive_color_edges,
    distinct_colors,
    monte_carlo_connector,
    random_coloring,
)
from .generators import GENERATORS, generate
from .geometry import (
    Disk,
    DiskInstance,
    GeneralPositionError,
    Point,
    circle_intersection_points,
    contains,
    depth_at,
    disks_intersect,
    validate_general_position,
)
from .sparsifier import (
    PRESETS,
    BuildReport,
    SpannerConfig,
    SpannerGraph,
    build_spanner,
    compute_alpha,
    full_intersection_graph,
    round_edges,
    spot_check_connectors,
)
