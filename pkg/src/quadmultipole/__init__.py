"""
quadmultipole: multipole decompositions of polynomials on quadratic surfaces.

Polynomials in ``x, y, z`` restricted to ``{Q = 1}`` are written as sums of
products of linear forms, one product per degree. Supporting modules cover
dense polynomial arithmetic, Q-harmonic splitting, root finding on the conic
``{Q = 0}``, parcelling combinatorics, Maxwell-type representations,
ramification diagnostics and surface quadrature.
"""

from .errors import (
    CoincidentPoints,
    Degenerate,
    DivisibleInput,
    ExplosionGuard,
    Mismatch,
    NoConvergence,
    NotConjugateClosed,
    NotDivisible,
    NotHarmonic,
    OffSurface,
    ParityError,
    PolynomialSyntaxError,
    ProbeDegenerate,
    QMError,
    RankDeficiency,
    RankIndeterminate,
    SolveFailure,
    ZeroForm,
)
from .poly import (
    HPoly,
    Poly,
    dim_up_to,
    divide_by_form,
    format_poly,
    homogenize_on_surface,
    n_monomials,
    parity_split,
    parse_poly,
)
from .quadform import (
    SPHERE,
    QuadForm,
    conic_param,
    laplacian_q,
    product_rule_constant,
    quadform_new,
    reduce_to_squares,
    sample_surface,
)
from .harmonic import (
    HarmonicDecomposition,
    dirichlet_solve,
    harmonic_decompose,
    harmonic_split,
)
from .conic import (
    BinaryForm,
    ConicDivisor,
    ProjPoint,
    line_through,
    proj_roots,
    restrict_to_conic,
    tangent_line,
)
from .parcelling import (
    GenParcelling,
    canonical_parcelling,
    count_parcellings,
    enumerate_parcellings,
    kappa,
)
from .sylvester import (
    Decomposition,
    Multipole,
    decompose,
    enumerate_decompositions,
    evaluate_decomposition,
    leading_multipole,
)
from .maxwell import maxwell_apply, maxwell_from_harmonic, maxwell_sum
from .moduli import (
    PencilCenter,
    PencilDivisor,
    dim_defect,
    gamma_fiber,
    gamma_project,
    is_ramified,
    tangent_nullity,
)
from .quadrature import (
    SphereQuadrature,
    fourier_components,
    harmonic_basis,
    inner_product,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
