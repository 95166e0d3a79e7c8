"""Analytic probabilities and their Monte Carlo counterparts."""

from .closest_sets import (
    corollary11_diff_set_given_d,
    corollary21_diff_set_kth_neighbor,
    lemma1_same_lth,
    lemma2_diff_lth,
    same_set_deconditioned,
    theorem1_same_set,
    theorem2_same_set_kth_neighbor,
)
from .localizability import (
    HearabilityPmf,
    HearabilityProvider,
    ReuseLocalizability,
    p_loc_collab_noshadow,
    p_loc_collab_shadow,
    p_loc_noncollab,
    p_loc_reuse,
)
from .montecarlo import (
    ClosestSetSweep,
    HearabilitySweep,
    JointRates,
    MonteCarloConfigError,
    MonteCarloHearability,
    Rate,
    mc_hearability_pmf,
    simulate_closest_sets,
    simulate_hearability,
    simulate_kth_neighbor_sets,
)
from .quadrature import NumericalError, ProbabilityEstimate, QuadratureSpec, integrate_box
