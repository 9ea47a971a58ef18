"""Special functions for oscillator-basis band computations.

Hermite polynomials and normalized oscillator eigenfunctions, Laguerre
polynomials with derivative, the odd splitting polynomial ``P_j`` of degree
``2j - 1``, and the oscillator sine integral

    I_j(s; B) = integral of sin(s t) t phi_j(t; B)^2 dt

in two independent forms: a closed form built from ``P_j`` and a
Gauss-Hermite quadrature that serves as its oracle.

Convention note: ``hermite_poly`` follows the standard physicists'
normalization (H_1(t) = 2t).  An operator-ordered definition can differ by a
factor (-1)^q; every use here involves H^2 only, so the sign never enters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "QuadratureRule",
    "gauss_hermite",
    "hermite_poly",
    "hermite_function",
    "oscillator_ladder",
    "laguerre",
    "laguerre_prime",
    "splitting_polynomial",
    "splitting_poly_roots",
    "oscillator_integral_closed",
    "oscillator_integral_quadrature",
]

SQRT_PI = np.sqrt(np.pi)


# ---------------------------------------------------------------------------
# Gauss-Hermite quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights integrating f against exp(-t^2) on the real line.

    Exact for polynomials of degree <= 2n - 1 at n nodes; nodes are strictly
    increasing and symmetric about 0, weights all positive.
    """

    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    kind: str = "gauss-hermite"

    def __len__(self) -> int:
        return len(self.nodes)

    def integrate(self, values: np.ndarray) -> float:
        """Weighted sum for integrand values sampled at ``nodes`` (weight factored out)."""
        return float(self.weights @ values)


@lru_cache(maxsize=64)
def _hermgauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.hermite.hermgauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_hermite(n: int) -> QuadratureRule:
    """Return the n-point Gauss-Hermite rule for weight exp(-t^2)."""
    if n < 1:
        raise ValueError(f"need at least one node, got n={n}")
    x, w = _hermgauss(int(n))
    return QuadratureRule(nodes=x, weights=w)


# ---------------------------------------------------------------------------
# Hermite polynomials and oscillator eigenfunctions
# ---------------------------------------------------------------------------

def hermite_poly(q: int, t):
    """Physicists' Hermite polynomial H_q(t) via the three-term recurrence.

    H_0 = 1, H_1 = 2t, H_{q+1} = 2 t H_q - 2 q H_{q-1}.  Vectorized in ``t``.
    """
    if q < 0:
        raise ValueError(f"polynomial degree must be nonnegative, got q={q}")
    t = np.asarray(t, dtype=float)
    h_prev = np.ones_like(t)
    if q == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = 2.0 * t
    for m in range(1, q):
        h, h_prev = 2.0 * t * h - 2.0 * m * h_prev, h
    return h if h.ndim else float(h)


def _normalized_hermite_ladder(nmax: int, u: np.ndarray, weightless: bool) -> np.ndarray:
    """Rows q = 0..nmax-1 of the orthonormal oscillator functions at points u.

    With ``weightless`` the Gaussian exp(-u^2/2) is left out, which is the
    form needed under a Gauss-Hermite rule (its weight supplies exp(-u^2)).
    The recurrence acts on the normalized functions directly, so no
    factorials appear and q up to several hundred stays in range.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    out = np.empty((nmax, u.size))
    psi0 = np.pi ** -0.25 if weightless else np.pi ** -0.25 * np.exp(-0.5 * u * u)
    out[0] = psi0
    if nmax > 1:
        out[1] = np.sqrt(2.0) * u * out[0]
    for q in range(1, nmax - 1):
        out[q + 1] = np.sqrt(2.0 / (q + 1)) * u * out[q] - np.sqrt(q / (q + 1)) * out[q - 1]
    return out


def oscillator_ladder(nmax: int, u, weightless: bool = False) -> np.ndarray:
    """Orthonormal oscillator functions psi_0..psi_{nmax-1} (unit field) at ``u``."""
    if nmax < 1:
        raise ValueError("nmax must be >= 1")
    return _normalized_hermite_ladder(nmax, u, weightless)


def hermite_function(j: int, t, B: float):
    """Oscillator eigenfunction phi_j(t; B), band index j >= 1.

    phi_j(t; B) = B^(1/4) psi_{j-1}(sqrt(B) t) with psi_q the orthonormal
    Hermite functions; satisfies h_0 phi_j = (2j - 1) B phi_j and
    integral phi_j^2 dt = 1.  Evaluated by the normalized recurrence, stable
    for j up to at least 200.
    """
    if j < 1:
        raise ValueError(f"band index must be >= 1, got j={j}")
    if B <= 0:
        raise ValueError(f"field strength must be positive, got B={B}")
    t = np.asarray(t, dtype=float)
    u = np.sqrt(B) * t
    vals = B ** 0.25 * _normalized_hermite_ladder(j, np.atleast_1d(u), weightless=False)[j - 1]
    return vals.reshape(t.shape) if t.ndim else float(vals[0])


# ---------------------------------------------------------------------------
# Laguerre polynomials
# ---------------------------------------------------------------------------

def laguerre(q: int, xi):
    """Laguerre polynomial L_q(xi) via (q+1) L_{q+1} = (2q+1-xi) L_q - q L_{q-1}."""
    if q < 0:
        raise ValueError(f"polynomial degree must be nonnegative, got q={q}")
    xi = np.asarray(xi, dtype=float)
    l_prev = np.ones_like(xi)
    if q == 0:
        return l_prev if l_prev.ndim else float(l_prev)
    l = 1.0 - xi
    for m in range(1, q):
        l, l_prev = ((2 * m + 1 - xi) * l - m * l_prev) / (m + 1), l
    return l if l.ndim else float(l)


def _laguerre_deriv_coeffs(q: int) -> np.ndarray:
    # L_q(xi) = sum_k c_k xi^k with c_k = (-1)^k C(q,k)/k!; returns the
    # coefficients of dL_q/dxi in ascending order.
    c = np.empty(q + 1)
    c[0] = 1.0
    for k in range(1, q + 1):
        c[k] = -c[k - 1] * (q - k + 1) / (k * k)
    return c[1:] * np.arange(1, q + 1)


def laguerre_prime(q: int, xi):
    """Derivative dL_q/dxi, from xi L'_q = q (L_q - L_{q-1}).

    Near xi = 0 the identity degenerates to 0/0 and the explicit polynomial
    coefficients are used instead.
    """
    if q < 0:
        raise ValueError(f"polynomial degree must be nonnegative, got q={q}")
    xi = np.asarray(xi, dtype=float)
    if q == 0:
        out = np.zeros_like(xi)
        return out if out.ndim else float(out)
    out = np.empty_like(xi)
    near0 = np.abs(xi) < 0.25
    if near0.any():
        out[near0] = np.polynomial.polynomial.polyval(xi[near0], _laguerre_deriv_coeffs(q))
    far = ~near0
    if far.any():
        xf = xi[far]
        out[far] = q * (laguerre(q, xf) - laguerre(q - 1, xf)) / xf
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Splitting polynomial and oscillator integral
# ---------------------------------------------------------------------------

def splitting_polynomial(j: int, s):
    """P_j(s) = (s/2) (L_{j-1}(s^2/2) - 2 L'_{j-1}(s^2/2)).

    Odd polynomial of degree 2j - 1; its positive roots are the rescaled
    field values at which the j-th band loses its first-order splitting.
    P_j(-s) = -P_j(s) holds exactly (the argument enters through s^2).
    """
    if j < 1:
        raise ValueError(f"band index must be >= 1, got j={j}")
    s = np.asarray(s, dtype=float)
    xi = 0.5 * s * s
    out = 0.5 * s * (laguerre(j - 1, xi) - 2.0 * laguerre_prime(j - 1, xi))
    return out if out.ndim else float(out)


def splitting_poly_roots(j: int, s_max: float = 20.0, grid: int = 4000, tol: float = 1e-12) -> np.ndarray:
    """Positive roots of P_j on (0, s_max], by sign-change bracketing + bisection.

    P_j has at most j - 1 distinct positive roots, all of them simple, so a
    fine grid scan followed by bisection recovers every root.
    """
    if j == 1:
        return np.empty(0)
    ss = np.linspace(s_max / grid, s_max, grid)
    vals = splitting_polynomial(j, ss)
    roots = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        lo, hi = ss[i], ss[i + 1]
        flo = splitting_polynomial(j, lo)
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            fmid = splitting_polynomial(j, mid)
            if flo * fmid <= 0:
                hi = mid
            else:
                lo, flo = mid, fmid
            if hi - lo < tol:
                break
        roots.append(0.5 * (lo + hi))
    return np.asarray(roots)


def oscillator_integral_closed(j: int, s: float, B: float) -> float:
    """I_j(s; B) in closed form: B^(-1/2) P_j(s B^(-1/2)) exp(-s^2 / 4B)."""
    if j < 1:
        raise ValueError(f"band index must be >= 1, got j={j}")
    if B <= 0:
        raise ValueError(f"field strength must be positive, got B={B}")
    rb = 1.0 / np.sqrt(B)
    return float(rb * splitting_polynomial(j, s * rb) * np.exp(-s * s / (4.0 * B)))


def oscillator_integral_quadrature(
    j: int,
    s: float,
    B: float,
    tol: float = 1e-10,
    max_doublings: int = 8,
) -> float:
    """I_j(s; B) from its defining integral, by Gauss-Hermite quadrature.

    Substituting u = sqrt(B) t reduces the integrand to
    B^(-1/2) sin(c u) u psi_{j-1}(u)^2 exp(-u^2) with c = s / sqrt(B), which
    the rule handles directly.  The node count starts at 4 (j + 8) plus an
    oscillation margin and doubles until two successive evaluations agree to
    ``tol``; this is the independent oracle for the closed form.
    """
    if j < 1:
        raise ValueError(f"band index must be >= 1, got j={j}")
    if B <= 0:
        raise ValueError(f"field strength must be positive, got B={B}")
    c = s / np.sqrt(B)
    n = max(4 * (j + 8), 2 * j + int(4 * abs(c)) + 16)

    def evaluate(nn: int) -> float:
        rule = gauss_hermite(nn)
        u = rule.nodes
        chi = _normalized_hermite_ladder(j, u, weightless=True)[j - 1]
        return rule.integrate(np.sin(c * u) * u * chi * chi) / np.sqrt(B)

    val = evaluate(n)
    for _ in range(max_doublings):
        n *= 2
        new = evaluate(n)
        if abs(new - val) < tol:
            return new
        val = new
    raise RuntimeError(
        f"oscillator integral did not stabilize below {tol} after {max_doublings} doublings (n={n})"
    )
