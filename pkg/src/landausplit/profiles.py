"""1-periodic perturbation profiles as finite Fourier series.

A profile is a(t) = alpha_0 + sum_{l>=1} 2 Re(alpha_l e^{i 2 pi l t}), which
keeps real-valuedness built in (the l < 0 coefficients are the conjugates).
Construction rescales the coefficients so that sup |a| = 1, estimated on a
fine grid; the coupling constant then carries the overall amplitude.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["PeriodicProfile"]

_SUP_GRID_PER_HARMONIC = 2048


@dataclass(frozen=True)
class PeriodicProfile:
    """Sup-normalized 1-periodic profile with finitely many harmonics.

    ``harmonics`` maps positive integer indices l to complex amplitudes
    alpha_l; ``alpha0`` is the real constant term.  Use the classmethods to
    construct (they normalize); the raw constructor trusts its inputs.
    """

    alpha0: float
    harmonics: tuple[tuple[int, complex], ...]

    # -- construction -------------------------------------------------------

    @classmethod
    def from_coefficients(cls, harmonics, alpha0: float = 0.0) -> "PeriodicProfile":
        """Build from (l, alpha_l) pairs and rescale so sup_t |a(t)| = 1."""
        clean = []
        seen = set()
        for l, amp in harmonics:
            l = int(l)
            amp = complex(amp)
            if l < 1:
                raise ValueError(f"harmonic indices must be >= 1, got l={l}")
            if l in seen:
                raise ValueError(f"duplicate harmonic index l={l}")
            seen.add(l)
            if amp != 0:
                clean.append((l, amp))
        clean.sort()
        raw = cls(alpha0=float(alpha0), harmonics=tuple(clean))
        sup = raw._sup_estimate()
        if sup == 0.0:
            raise ValueError("profile is identically zero")
        return cls(
            alpha0=float(alpha0) / sup,
            harmonics=tuple((l, amp / sup) for l, amp in clean),
        )

    @classmethod
    def cosine(cls) -> "PeriodicProfile":
        """a(t) = cos(2 pi t), the single-harmonic reference profile."""
        return cls.from_coefficients([(1, 0.5)])

    @classmethod
    def constant(cls) -> "PeriodicProfile":
        """a(t) = 1; useful as a null profile (no splitting, exact invariance)."""
        return cls.from_coefficients([], alpha0=1.0)

    @classmethod
    def from_samples(cls, values, max_harmonics: int = 64, drop_tol: float = 1e-12) -> "PeriodicProfile":
        """Project uniformly sampled a(t_i), t_i = i/n, onto <= max_harmonics.

        Coefficients come from trapezoid quadrature of the Fourier integrals,
        which on a uniform periodic grid is the plain average of
        a(t_i) e^{-i 2 pi l t_i}.
        """
        values = np.asarray(values, dtype=float)
        n = values.size
        if n < 4:
            raise ValueError("need at least 4 samples")
        lmax = min(max_harmonics, (n - 1) // 2)
        t = np.arange(n) / n
        alpha0 = float(values.mean())
        harmonics = []
        for l in range(1, lmax + 1):
            amp = complex(np.mean(values * np.exp(-2j * np.pi * l * t)))
            if abs(amp) > drop_tol:
                harmonics.append((l, amp))
        return cls.from_coefficients(harmonics, alpha0=alpha0)

    # -- queries -------------------------------------------------------------

    def __call__(self, t):
        return self.evaluate(t)

    def evaluate(self, t):
        """a(t), vectorized."""
        t = np.asarray(t, dtype=float)
        out = np.full_like(t, self.alpha0)
        for l, amp in self.harmonics:
            out = out + 2.0 * (amp * np.exp(2j * np.pi * l * t)).real
        return out if out.ndim else float(out)

    @property
    def has_oscillation(self) -> bool:
        """True when some l >= 1 harmonic is nonzero (the derivative does not vanish)."""
        return len(self.harmonics) > 0

    @property
    def l_max(self) -> int:
        return self.harmonics[-1][0] if self.harmonics else 0

    def nonzero_harmonics(self, zero_tol: float = 0.0) -> list[tuple[int, complex]]:
        return [(l, amp) for l, amp in self.harmonics if abs(amp) > zero_tol]

    def _sup_estimate(self) -> float:
        ts = np.linspace(0.0, 1.0, _SUP_GRID_PER_HARMONIC * max(1, self.l_max), endpoint=False)
        return float(np.max(np.abs(self.evaluate(ts))))

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "alpha0": self.alpha0,
            "harmonics": [[l, amp.real, amp.imag] for l, amp in self.harmonics],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PeriodicProfile":
        return cls.from_coefficients(
            [(l, complex(re, im)) for l, re, im in d.get("harmonics", [])],
            alpha0=d.get("alpha0", 0.0),
        )
