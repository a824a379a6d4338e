from ._common import ReadoutError, binary_targets, indicator_matrix
from .linear import (
    EndpointReadout,
    GlobalReadout,
    PointwiseReadout,
    classify_endpoint,
    classify_global,
    classify_pointwise,
    fit_endpoint,
    fit_global,
    fit_pointwise,
)
from .lowrank import LowRankModel, fit_lowrank, score_lowrank
from .sparse import (
    DantzigProblem,
    DantzigResult,
    DegenerateNodeWarning,
    SparseReadout,
    classify_sparse,
    dantzig_objective,
    dantzig_solve,
    fit_sparse,
)
