"""Lower and upper bounds for best H2 rational approximation on the unit disk.

The main entry points are :func:`h2lb.bounds.assemble_report` for a full
set of bounds at one degree, :func:`h2lb.linearized.linearized_bound` and
:func:`h2lb.upper.solve_RAB`.  All numbers are floating point estimates,
not certified enclosures.
"""
from .bounds import BoundReport, ReportOptions, assemble_report, blaschke_bounds, bound_Mn, bound_Qn
from .errors import ConvergenceError, DomainError, H2LBError, NotCoprimeError
from .fourier import (
    AntiAnalyticFunction,
    CircleSamples,
    FourierSeries,
    check_transform,
    reduce_RA_to_RAB,
    riesz_project,
    sup_norm_sample,
    truncate_to_bits,
)
from .functions import Target, builtin, load_function
from .hankel import (
    aak_approximant,
    gramian_rational,
    hankel_matrix,
    malmquist_walsh,
    nehari_norm,
    singular_spectrum,
)
from .linearized import build_problem, linearized_bound, psi, socp_min
from .polynomial import ComplexPolynomial, RootSet, TrigPolynomial, bezout, euclid_divide, fejer_riesz, reciprocal, roots
from .rational import RationalFunction
from .upper import BlaschkeProduct, RABSolution, criterion, recover_numerator, solve_RAB

__version__ = "0.1.0"
