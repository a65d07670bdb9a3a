"""Numerical ranges, spectral-set constants and Blaschke-product maxima.

Public surface:

* :mod:`crouzeix.linalg`: dense complex kernels (eigen, Schur, matrix
  functions, Moebius transforms);
* :mod:`crouzeix.numrange`: boundary sampling of W(A), numerical radius,
  Hausdorff distances, the cardioid family;
* :mod:`crouzeix.conformal`: collocation solve of the disk map and its
  evaluation on points and matrices;
* :mod:`crouzeix.psi`: psi(A) and psi_D(B) by multistart Blaschke
  maximization;
* :mod:`crouzeix.bounds`: closed-form lower/upper bounds for the domain
  constants;
* :mod:`crouzeix.extremal`: strip and sector extremal searches;
* :mod:`crouzeix.disk_families`: the 3x3 disk-extremal families;
* :mod:`crouzeix.cli`: command-line drivers.
"""

from .bounds import (
    BoundReport,
    cone_witness,
    conformal_lower,
    ellipse_parabola_upper,
    polygon_lower,
    rough_lower,
    sector_lower,
    sector_upper,
    tv_upper,
)
from .conformal import (
    DiskConformalMap,
    boundary_modulus_error,
    c_coefficients,
    map_derivative,
    map_matrix,
    map_point,
    map_taylor,
    solve_density,
)
from .disk_families import (
    AndoForm,
    FamilySpec,
    ando_compose,
    family_ando_form,
    flat_disk_condition,
    make_family,
    witness_psi2,
    zero_multiplicity_check,
)
from .errors import (
    CapacityDegeneracyError,
    ContractViolation,
    ConvergenceError,
    CrouzeixError,
    DerivativeRequiredError,
    DomainError,
    InstabilityError,
    NonSmoothBoundaryError,
    PoleError,
    SpectralDomainError,
)
from .extremal import (
    SearchResult,
    SectorCandidate,
    StripCandidate,
    embed_strip_candidate,
    optimize_sector,
    optimize_strip,
    paper_symmetric_candidate,
    sector_objective,
    strip_objective,
)
from .linalg import (
    EigenSystem,
    eigenvalues,
    function_of_matrix,
    hermitian_eigen,
    is_hermitian,
    mobius_of_matrix,
    operator_norm,
    schur,
)
from .numrange import (
    BoundarySample,
    boundary,
    cardioid_boundary,
    cardioid_matrix,
    circle_boundary,
    contains,
    hausdorff,
    numerical_radius,
    range_meta,
    support_point,
    transform_sample,
)
from .psi import (
    BlaschkeProduct,
    NormalMatrixSignal,
    PsiResult,
    blaschke_matrix_norm,
    is_normal,
    normalize_matrix,
    psi,
    psi_disk,
    psi_discontinuity_fixtures,
    psi_from_sample,
)

__version__ = "0.1.0"
