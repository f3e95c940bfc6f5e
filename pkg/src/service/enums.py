from enum import Enum


class CascadeStage(str, Enum):
    DAMAGED = "damaged"
    INFEASIBLE = "infeasible"
    DESCENDED = "descended"
    REBUILT = "rebuilt"
    HEALTHY = "healthy"


class CascadeOutcome(str, Enum):
    HEALTHY = "healthy"
    REBUILT = "rebuilt"
    INFEASIBLE_REBUILD = "infeasible_rebuild"
