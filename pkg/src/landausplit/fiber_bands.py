"""Fiber operators of the periodically perturbed Landau Hamiltonian.

The perturbation (0, a(x1)) is translation invariant in x2, so a partial
Fourier transform reduces the 2D operator to a family of 1D fibers

    h_lam(k) = -d^2/dt^2 + (B t + lam a(t + k/B))^2,

one per quasimomentum k.  Each fiber is assembled in the eigenbasis of the
unperturbed oscillator h_0 (where h_0 is exactly diagonal and Gaussian decay
controls truncation) and diagonalized densely.  Band functions E_j(k; lam)
are B-periodic in k; the spectrum of the 2D operator is the union of their
ranges over one period.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError
from .profiles import PeriodicProfile
from .specfun import gauss_hermite, oscillator_ladder

__all__ = [
    "FiberConfig",
    "BandTable",
    "SpectrumBands",
    "assemble_fiber_matrix",
    "symmetric_eigenvalues",
    "band_table",
    "band_function",
    "spectrum_bands",
    "feynman_hellmann_slope",
]

_MIN_BASIS_MARGIN = 30  # basis size exceeds the largest requested band by this much


@dataclass(frozen=True)
class FiberConfig:
    """Parameters of a single fiber operator h_lam(k)."""

    B: float
    lam: float
    k: float
    profile: PeriodicProfile
    basis_size: int

    def __post_init__(self):
        if self.B <= 0:
            raise ValueError(f"field strength must be positive, got B={self.B}")
        if self.lam < 0:
            raise ValueError(f"coupling must be nonnegative, got lam={self.lam}")
        if self.basis_size < 2:
            raise ValueError(f"basis size must be >= 2, got {self.basis_size}")


def _default_nodes(basis_size: int, B: float, profile: PeriodicProfile) -> int:
    # Polynomial content needs ~basis_size nodes; the oscillatory factors
    # e^{i 2 pi l t} add an effective degree that grows with 2 pi l / sqrt(B).
    c_max = 2.0 * np.pi * max(profile.l_max, 1) / np.sqrt(B)
    return 2 * basis_size + 40 + int(np.ceil(6.0 * c_max))


def _potential_matrix(B, lam, k, profile, basis_size, n_nodes):
    """Matrix of v_lam(t; k) = 2 B t lam a(t + k/B) + lam^2 a(t + k/B)^2 in the oscillator basis."""
    rule = gauss_hermite(n_nodes)
    u = rule.nodes
    a_vals = profile.evaluate(u / np.sqrt(B) + k / B)
    g = 2.0 * lam * np.sqrt(B) * u * a_vals + lam * lam * a_vals * a_vals
    chi = oscillator_ladder(basis_size, u, weightless=True)
    return (chi * (rule.weights * g)) @ chi.T


def assemble_fiber_matrix(cfg: FiberConfig, n_nodes: int | None = None) -> np.ndarray:
    """Dense symmetric matrix of h_lam(k) in the oscillator eigenbasis.

    Entry (m, n) is (2m - 1) B delta_mn plus the Gauss-Hermite quadrature of
    <phi_m, v_lam phi_n>; the upper triangle is mirrored so the result is
    symmetric exactly.
    """
    n = cfg.basis_size
    if n_nodes is None:
        n_nodes = _default_nodes(n, cfg.B, cfg.profile)
    m = _potential_matrix(cfg.B, cfg.lam, cfg.k, cfg.profile, n, n_nodes)
    upper = np.triu(m)
    m = upper + np.triu(m, 1).T
    m[np.diag_indices(n)] += (2.0 * np.arange(1, n + 1) - 1.0) * cfg.B
    return m


def symmetric_eigenvalues(matrix: np.ndarray, sym_tol: float = 1e-12) -> np.ndarray:
    """All eigenvalues of a real symmetric matrix, ascending.

    Rejects matrices whose asymmetry exceeds ``sym_tol`` relative to the
    largest entry.  Backed by LAPACK's symmetric solver.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {matrix.shape}")
    scale = max(1.0, float(np.max(np.abs(matrix))))
    asym = float(np.max(np.abs(matrix - matrix.T)))
    if asym > sym_tol * scale:
        raise ValueError(f"matrix is not symmetric: max asymmetry {asym:.3e}")
    return np.linalg.eigvalsh(matrix)


@dataclass
class BandTable:
    """Band functions E_j(k; lam) sampled on a k-grid covering [0, B)."""

    k_grid: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)  # shape (len(k_grid), J)
    B: float = 0.0
    lam: float = 0.0
    J: int = 0
    basis_size: int = 0

    def band(self, j: int) -> np.ndarray:
        if not 1 <= j <= self.J:
            raise ValueError(f"band index {j} outside 1..{self.J}")
        return self.values[:, j - 1]

    def band_interval(self, j: int, refine: bool = True) -> tuple[float, float]:
        """[min_k E_j, max_k E_j]; extrema refined by local quadratic fit."""
        e = self.band(j)
        if not refine or len(e) < 3:
            return float(e.min()), float(e.max())
        lo = _refined_extremum(e, int(np.argmin(e)), np.minimum)
        hi = _refined_extremum(e, int(np.argmax(e)), np.maximum)
        return lo, hi

    def rows(self):
        """Yield (k, j, E) in k-major order, matching the CSV column schema."""
        for i, k in enumerate(self.k_grid):
            for j in range(1, self.J + 1):
                yield float(k), j, float(self.values[i, j - 1])


def _refined_extremum(e: np.ndarray, idx: int, pick) -> float:
    # Parabola through the three samples around a grid extremum (periodic wrap).
    n = len(e)
    y0, y1, y2 = e[(idx - 1) % n], e[idx], e[(idx + 1) % n]
    denom = y0 - 2.0 * y1 + y2
    if denom == 0.0:
        return float(y1)
    delta = 0.5 * (y0 - y2) / denom
    if abs(delta) > 1.0:
        return float(y1)
    vertex = y1 - 0.25 * (y0 - y2) * delta
    return float(pick(y1, vertex))


def default_k_grid(B: float, k_samples: int = 256) -> np.ndarray:
    """Uniform quasimomentum grid on [0, B)."""
    if k_samples < 2:
        raise ValueError("need at least two k samples")
    return np.linspace(0.0, B, k_samples, endpoint=False)


def band_table(
    J: int,
    lam: float,
    B: float,
    profile: PeriodicProfile,
    k_grid: np.ndarray | None = None,
    k_samples: int = 256,
    basis_size: int | None = None,
    tol: float = 1e-8,
    max_doublings: int = 4,
) -> BandTable:
    """Converged band functions E_1..E_J over the k-grid.

    The oscillator basis starts at max(basis_size, J + 30) and doubles until
    the largest change over the grid and bands drops below tol * B; four
    unsuccessful doublings raise ConvergenceError.
    """
    if J < 1:
        raise ValueError(f"band count must be >= 1, got J={J}")
    if k_grid is None:
        k_grid = default_k_grid(B, k_samples)
    k_grid = np.asarray(k_grid, dtype=float)
    n = max(basis_size or 0, J + _MIN_BASIS_MARGIN)

    def sweep(nn: int) -> np.ndarray:
        n_nodes = _default_nodes(nn, B, profile)
        rule = gauss_hermite(n_nodes)
        u = rule.nodes
        chi = oscillator_ladder(nn, u, weightless=True)
        diag = (2.0 * np.arange(1, nn + 1) - 1.0) * B
        out = np.empty((len(k_grid), J))
        sb = np.sqrt(B)
        for i, k in enumerate(k_grid):
            a_vals = profile.evaluate(u / sb + k / B)
            g = 2.0 * lam * sb * u * a_vals + lam * lam * a_vals * a_vals
            m = (chi * (rule.weights * g)) @ chi.T
            m = np.triu(m) + np.triu(m, 1).T
            m[np.diag_indices(nn)] += diag
            out[i] = np.linalg.eigvalsh(m)[:J]
        return out

    values = sweep(n)
    for _ in range(max_doublings):
        n *= 2
        refined = sweep(n)
        change = float(np.max(np.abs(refined - values)))
        values = refined
        if change < tol * B:
            return BandTable(k_grid=k_grid, values=values, B=B, lam=lam, J=J, basis_size=n)
    raise ConvergenceError(
        f"band functions not stable to {tol:.1e}*B after {max_doublings} basis doublings (N={n})"
    )


def band_function(
    j: int,
    lam: float,
    k_grid: np.ndarray,
    B: float,
    profile: PeriodicProfile,
    **kwargs,
) -> np.ndarray:
    """E_j(k; lam) over the supplied k-grid (j-th smallest fiber eigenvalue)."""
    table = band_table(j, lam, B, profile, k_grid=k_grid, **kwargs)
    return table.band(j)


@dataclass
class SpectrumBands:
    """Per-band spectral intervals and the gaps between consecutive bands."""

    intervals: list[tuple[float, float]]
    gaps: list[tuple[float, float]]
    disjoint: bool
    crossings_flagged: bool
    table: BandTable = field(repr=False)


def spectrum_bands(
    J: int,
    lam: float,
    B: float,
    profile: PeriodicProfile,
    k_samples: int = 256,
    **kwargs,
) -> SpectrumBands:
    """Spectral bands [min_k E_j, max_k E_j] for j <= J and the gap structure.

    ``disjoint`` records whether every consecutive pair of bands is separated
    by an open gap (the disjoint band condition).  Band-ordering violations
    on the grid are flagged, not fatal: they signal leaving the perturbative
    regime.
    """
    if k_samples < 128:
        raise ValueError(f"need >= 128 k samples per period, got {k_samples}")
    table = band_table(J, lam, B, profile, k_samples=k_samples, **kwargs)
    intervals = [table.band_interval(j) for j in range(1, J + 1)]
    crossings = bool(np.any(np.diff(table.values, axis=1) < 0))
    gaps = []
    disjoint = True
    for j in range(J - 1):
        lo = intervals[j][1]
        hi = intervals[j + 1][0]
        gaps.append((lo, hi))
        if hi <= lo:
            disjoint = False
    return SpectrumBands(
        intervals=intervals,
        gaps=gaps,
        disjoint=disjoint,
        crossings_flagged=crossings,
        table=table,
    )


def feynman_hellmann_slope(
    j: int,
    k: float,
    B: float,
    profile: PeriodicProfile,
    n_nodes: int | None = None,
) -> float:
    """First-order response of E_j(k; lam) at lam = 0.

    Equals 2 B * integral of a(t + k/B) t phi_j(t)^2 dt, evaluated by
    Gauss-Hermite quadrature after u = sqrt(B) t.  Agrees with the Fourier
    series form (2 B F_j) and with finite differences of the band function.
    """
    if j < 1:
        raise ValueError(f"band index must be >= 1, got j={j}")
    if B <= 0:
        raise ValueError(f"field strength must be positive, got B={B}")
    if n_nodes is None:
        n_nodes = _default_nodes(j + 8, B, profile)
    rule = gauss_hermite(n_nodes)
    u = rule.nodes
    chi = oscillator_ladder(j, u, weightless=True)[j - 1]
    a_vals = profile.evaluate(u / np.sqrt(B) + k / B)
    return float(2.0 * np.sqrt(B) * rule.integrate(a_vals * u * chi * chi))
