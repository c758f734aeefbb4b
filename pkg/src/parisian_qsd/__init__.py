"""Parisian-ruin resolvents and quasi-stationary distributions of spectrally
one-sided Levy processes, with an exact Monte Carlo validation oracle."""

from .models import (
    LevyModel,
    ExpansionPoint,
    ParisianQsdError,
    DomainError,
    BranchPointError,
    AssumptionError,
    SPECTRALLY_NEGATIVE,
    SPECTRALLY_POSITIVE,
    brownian,
    mm1_queue,
    cramer_lundberg,
    model_from_config,
    load_config,
    laplace_exponent,
    phi_inverse,
    expansion_point,
    wiener_hopf_kappa,
)
from .scale import (
    ScaleContext,
    scale_w,
    scale_w_prime_zero,
    scale_z_beta,
    tilted_w,
    g1,
    g2,
)
from .resolvent import (
    ResolventQuery,
    ResolventValue,
    classic_survival_resolvent,
    parisian_resolvent,
    parisian_resolvent_sp,
    parisian_resolvent_sp_zero,
    parisian_resolvent_sn,
    parisian_resolvent_below,
    sup_at_exponential_cdf,
    resolvent_grid,
)
from .qsd import (
    DegenerateClockError,
    NormalizationError,
    IllConditionedFitError,
    QsdTransform,
    ExpansionFit,
    h_sp,
    h_sn,
    edge_expansion,
    qsd_transform,
    classical_qsd_transform,
    classical_qsd_density_sn,
    expansion_fit,
    qsd_density,
    survival_asymptote,
)
from .laplace import InversionError, euler_inversion
from .simulate import (
    SimConfig,
    McEstimate,
    ConfigError,
    mc_resolvent,
    mc_survival,
    mc_survival_curve,
    mc_conditional_moments,
    mc_sup_at_exponential,
    simulate_parisian_path,
    simulate_paths,
)

__version__ = "0.1.0"
