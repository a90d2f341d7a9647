"""Follower-graph structure, user roles, windowed cascades and exposure curves."""
from ._kernels import BACKEND
from .cascade import (
    Cascade,
    CascadeMetrics,
    cascade_metrics,
    cascade_subgraph_properties,
    extract_cascades,
    filter_large,
    one_time_engager_fraction,
    wiener_index,
)
from .components import (
    BowtieDecomposition,
    ComponentLabeling,
    PathMetrics,
    bowtie,
    induced_subgraph,
    path_metrics,
    strong_components,
    weak_components,
)
from .contagion import ExposureCurve, exposure_curve, persistence, stickiness
from .events import Event, EventLog, load_events
from .graph_core import (
    DegreeSummary,
    FollowerGraph,
    PowerLawFit,
    clustering_coefficient,
    degree_summary,
    fit_power_law,
    load_edges,
    reciprocity,
)
from .user_metrics import (
    HitsScores,
    RoleAssignment,
    activeness,
    assign_roles,
    categorize_activity,
    head_tail_breaks,
    hits,
    reach_by_hop,
)

__version__ = "0.1.0"
