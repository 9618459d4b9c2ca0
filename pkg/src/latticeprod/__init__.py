"""Sums of random exponentials on a lattice and their semi-stable limits."""
from .cumulant import CumulantProfile, TiltedDistribution, bernoulli, profile, tilt
from .errors import (
    CapExceeded,
    ConfigInvalid,
    DegenerateDistribution,
    LatticeProdError,
    NotLattice,
    OffLattice,
    OutOfRange,
    QuadratureNotConverged,
    TauOnLattice,
)
from .largedev import LdEstimate, ld_lower, ld_point, ld_upper
from .lattice_dist import LatticeDistribution, RowLaw, detect_span, exact_pmf, sample_sn
from .limitlaw import SemiStableLaw, levy_tail_value, shift_constant
from .montecarlo import McRun, sample_zn
from .rowarray import RowMoments, condition_table, exact_normalized_cf, row_moments
from .scheme import Scheme, SubsequenceQuery, build_scheme, find_subsequence, lemma_aux_residual

__all__ = [
    "CapExceeded", "ConfigInvalid", "CumulantProfile", "DegenerateDistribution", "LatticeDistribution",
    "LatticeProdError", "LdEstimate", "McRun", "NotLattice", "OffLattice", "OutOfRange",
    "QuadratureNotConverged", "RowLaw", "RowMoments", "Scheme", "SemiStableLaw", "SubsequenceQuery",
    "TauOnLattice", "TiltedDistribution", "bernoulli", "build_scheme", "condition_table", "detect_span",
    "exact_normalized_cf", "exact_pmf", "find_subsequence", "ld_lower", "ld_point", "ld_upper",
    "lemma_aux_residual", "levy_tail_value", "profile", "row_moments", "sample_sn", "sample_zn",
    "shift_constant", "tilt",
]
