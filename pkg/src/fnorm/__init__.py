"""F-norms of nonnegative random vectors: evaluation, inversion, estimation and geometry."""

__version__ = "0.1.0"

from . import distributions, errors, norms, quadrature  # noqa: E402
from .distributions import (  # noqa: E402
    Bernoulli,
    Copula,
    Degenerate,
    Empirical,
    Exponential,
    Frechet,
    IndependentProduct,
    LogNormal,
    MultiNormalExp,
    Pareto,
    SampleMatrix,
    Uniform01,
    load_spec,
    spec_from_dict,
    validate_H,
)
from .norms import EvalResult, FNorm, make_handle, supnorm  # noqa: E402
from .quadrature import QuadratureConfig  # noqa: E402
from . import algebra, empirical, geometry, inversion, metrics  # noqa: E402
