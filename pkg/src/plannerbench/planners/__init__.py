"""Six planners behind one solve interface, plus shared planner plumbing."""

from .base import (
    EDGE_BYTES,
    NODE_BYTES,
    Car1Control,
    ClearanceCost,
    CostModel,
    LengthCost,
    PlanStatus,
    Planner,
    PlannerResult,
    PlannerSpec,
    TerminationCondition,
    WorkCost,
    cost_model_for,
    create_planner,
    planner_type_names,
    register_planner_type,
)
from .car import CRRT, propagate_car
from .nn import NNIndex, nearest_neighbor
from .prm import PRM, PRMStar
from .rrt import RRT, RRTConnect
from .rrtstar import RRTStar
from ..records import ProgressSample

__all__ = [
    "EDGE_BYTES",
    "NODE_BYTES",
    "Car1Control",
    "ClearanceCost",
    "CostModel",
    "CRRT",
    "LengthCost",
    "NNIndex",
    "PlanStatus",
    "Planner",
    "PlannerResult",
    "PlannerSpec",
    "PRM",
    "PRMStar",
    "ProgressSample",
    "RRT",
    "RRTConnect",
    "RRTStar",
    "TerminationCondition",
    "WorkCost",
    "cost_model_for",
    "create_planner",
    "nearest_neighbor",
    "planner_type_names",
    "propagate_car",
    "register_planner_type",
]
