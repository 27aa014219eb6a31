"""Exact valuations on finite posets: the valuations monad, Choquet integration,
push-forwards from the unit interval, and a small probabilistic language."""

from .errors import *  # noqa: F401,F403
from .integration import Integrand, integrate, integrate_riemann_oracle
from .interval import (
    Cdf,
    StepMap,
    change_of_variable_check,
    check_pointwise_leq,
    check_pushforward,
    interval_fubini_check,
    lebesgue,
    pushforward,
    refinement_chain_check,
)
from .monad import (
    BiIntegrand,
    FubiniResult,
    KleisliMap,
    disintegration_check,
    fubini_check,
    kleisli_compose,
    kleisli_ext,
    kleisli_map,
    product_valuation,
    strength,
    unit,
    vmap,
)
from .poset import (
    FinitePoset,
    MonotoneMap,
    UpperSet,
    antichain,
    build_poset,
    chain,
    check_monotone,
    enumerate_upper_sets,
    is_upper_set,
    preimage,
    product,
)
from .valuation import (
    SimpleValuation,
    check_modularity,
    dirac,
    make_simple,
    mass,
    stochastic_leq_exhaustive,
    stochastic_leq_flow,
    zero,
)

__version__ = "0.1.0"
