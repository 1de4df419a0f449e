"""Numerical checks of Halász's bound for multiplicative functions.

The package sieves multiplicative functions, samples truncated Euler
products on the 1-line, assembles the windowed functional L(x), splits
S(x) into prime blocks and measures every inequality of the argument
against frozen implied constants.
"""

from .constants import Constants, load_constants, report_violations
from .dirichlet import grid_sum, interval_weights
from .errors import (
    CapacityError,
    ConfigError,
    CoverageError,
    DomainError,
    HalaszError,
    ResolutionError,
    UnitDiscError,
)
from .euler import (
    EulerGrid,
    LxResult,
    build_euler_grid,
    compute_L,
    euler_factor,
    lx,
    trivial_majorant,
    truncated_euler_product,
)
from .meanvalue import (
    CoefficientFamily,
    MeanValueReport,
    classical_mv_contrast,
    lemma1_lhs,
    lemma1_report,
    lemma1_rhs,
    prime_family,
    prime_poly_eval,
    single_term,
    steinhaus_family,
    twisted_family,
)
from .multiplicative import (
    MultiplicativeSpec,
    SummatoryTable,
    canonical_battery,
    character,
    evaluate,
    identity_check,
    liouville,
    log_weighted_sum,
    moebius,
    ntoialpha,
    one,
    rademacher,
    steinhaus,
    summatory,
    summatory_table,
    table,
    zero_on_primes,
)
from .primes import PrimeTables, build_tables, factorize, von_mangoldt
from .verifier import (
    BlockReport,
    HalaszReport,
    compute_I1,
    compute_I2,
    compute_Sk,
    decomposition_check,
    halasz_bound,
    partition_primes,
    perron_majorant,
    smooth_variant_check,
    trivial_bound_check,
)

__version__ = "0.1.0"
