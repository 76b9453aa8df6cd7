"""Empirical-Bayes inference for monotone non-increasing densities."""

from .gibbs import ChainConfig, GibbsState, PosteriorDraws, gibbs_sweep, init_state, run_chain
from .grenander import (
    ConcaveMajorant,
    EcdfPoints,
    empirical_cdf,
    grenander_fit,
    least_concave_majorant,
)
from .model import (
    MixtureOfUniforms,
    Sample,
    StepDensityView,
    cdf_eval,
    density_eval,
    from_step,
    log_likelihood,
    sample_from,
    to_step,
)
from .prior import (
    EmpiricalPrior,
    Hyperparams,
    build_prior,
    hyperparams,
    log_prior_density,
    sample_prior,
)

__version__ = "0.1.0"
