"""Brownian penalization martingales, their limiting laws, and verification.

The package simulates Brownian paths with their running functionals
(maximum, minimum, local time, level-crossing counts), evaluates the five
penalization martingale families built from them, constructs the limiting
laws those martingales define by three independent routes, and verifies the
limit theorems and asymptotic constants against exact oracles.
"""

from .errors import AbsorbedStateError, AdmissibilityError, ConfigError, PenbmError
from .martingales import (
    MartingaleSeries,
    drift_J,
    evaluate_series,
    m_downcross,
    m_kennedy,
    m_nu,
    m_nu_star,
    m_phi,
    m_signed_local,
    m0_downcross,
)
from .paths import (
    BrownPath,
    LevyPath,
    RunningFunctionals,
    TimeGrid,
    estimate_local_time,
    gen_bessel3,
    gen_bm,
    gen_levy_local_time,
    hitting_time,
    track_functionals,
)
from .qlaws import (
    QSample,
    TabooParams,
    Terminals,
    sample_q_downcross_direct,
    sample_q_kennedy_direct,
    sample_q_phi_direct,
    sample_q_sde,
    sample_q_signed_direct,
    sample_q_taboo,
    sample_weighted,
    terminal_law_oracle,
)
from .rng import RngStream
from .stats import McEstimate, TestReport, chi2_test, ks_test, mc_mean
from .verify import (
    EventSpec,
    lemma_ldo1_check,
    lemma_lloc1_check,
    lemma_lmil1_check,
    lemma_losm1_check,
    lemma_losm2_check,
    limit_side,
    penalization_curve,
    penalization_ratio,
)
from .weights import (
    AtomMeasure,
    DensityPhi,
    GSequence,
    KennedyPsi,
    PiecewiseExpPoly,
    SignWeights,
    build_kennedy,
    eval_A_nu,
    family_from_config,
    validate_family,
)

__version__ = "0.1.0"
