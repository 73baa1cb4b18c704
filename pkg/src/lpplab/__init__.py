"""Last-passage percolation in random environments: simulation and limit shapes."""
from .env import (
    Bernoulli,
    BernoulliRateLaw,
    BoundedTable,
    Environment,
    Exponential,
    ExponentialRateLaw,
    FiniteMixture,
    LawError,
    PointMass,
    TruncatedBox,
    TruncatedUpper,
    TwoPoint,
    moments,
    quantile,
    realize,
    tilde_truncate,
    truncate_M,
    uniform,
)
from .measures import PowerDensity, ScalarLaw
from .passage import Convention, Geometry, last_passage, last_passage_many, scaled_estimate
from .sampler import UniformField, WeightField, block_coarsen, coupled_pair, weight_at
from .shapes import exp_psi, psi_strict_x, psi_strict_y

__version__ = "0.1.0"
