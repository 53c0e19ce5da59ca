"""Halton subsequences indexed by floor(n*beta): exact points, exact star
discrepancy and the bound chain relating them to continued fractions."""

from .bounds import (
    BoundReport,
    GrowthSample,
    crt_combine,
    elementary_residue,
    f_exponents,
    growth_sweep,
    lemma1_rhs,
    prop1_rhs,
    s_l_sum,
)
from .discrepancy import (
    DiscrepancyResult,
    IntervalBox,
    WorkBudgetExceeded,
    count_in_box,
    extreme_from_star,
    local_delta,
    star_discrepancy_1d,
    star_discrepancy_exact,
)
from .halton import (
    BaseTuple,
    PointSet,
    digits,
    halton_points,
    radical_inverse,
    subsequence_points,
    verify_merge_identity,
)
from .real_arith import (
    PrecisionExhausted,
    certified_floor,
    certified_frac,
    cf_expand,
    convergents,
    ostrowski_expand,
    parse_real,
    reciprocal_cf_shift,
)

__version__ = "0.1.0"
