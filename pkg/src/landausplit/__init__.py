"""Spectral toolkit for the Landau Hamiltonian under periodic and random
magnetic perturbations: fiber band structure, the closed-form splitting
criterion, finite-volume disorder spectra, and real-space Hall conductance."""

from .errors import ConvergenceError, GapViolationError, NotAdmissibleError
from .profiles import PeriodicProfile
from .specfun import (
    gauss_hermite,
    hermite_function,
    hermite_poly,
    laguerre,
    laguerre_prime,
    oscillator_integral_closed,
    oscillator_integral_quadrature,
    splitting_poly_roots,
    splitting_polynomial,
)
from .fiber_bands import (
    BandTable,
    FiberConfig,
    SpectrumBands,
    assemble_fiber_matrix,
    band_function,
    band_table,
    feynman_hellmann_slope,
    spectrum_bands,
    symmetric_eigenvalues,
)
from .splitting import (
    AdmissibilityReport,
    SplittingEstimate,
    admissibility_report,
    estimate_splitting,
    excluded_fields,
    f_function,
    find_k_pm,
    is_admissible,
)
from .random_field import (
    BumpFunction,
    CouplingField,
    DiscreteHamiltonian2D,
    SpectralLocationReport,
    check_spectral_location,
    coupling_bound_probability,
    default_bump,
    derive_seed,
    discretize,
    discretize_periodic,
    potential_at,
    sample_couplings,
    spectrum_2d,
)
from .chern import (
    FermiProjection,
    HalfPlaneSwitches,
    HallResult,
    PlateauScan,
    fermi_projection,
    gauge_shift,
    hall_conductance,
    half_plane_switches,
    ipr,
    plateau_scan,
    theta,
)

__version__ = "0.1.0"
