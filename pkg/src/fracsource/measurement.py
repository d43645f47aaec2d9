"""Scalar measurement functionals represented by eigenfunction coefficients.

A functional F is stored through the values F[omega_k] over the truncated
mode set, sign-normalised so the stored coefficients are nonnegative (the
recorded flips let callers apply the same convention to modal data).  The
decay exponent gamma and the constant
c_f = (sum |F[omega_k] / lambda_k^gamma|^2)^(1/2) quantify how rough a
functional the eigenvalue growth can absorb.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InadmissibleError
from .spectral import project

__all__ = [
    "Measurement",
    "total_energy_functional",
    "point_functional",
    "boundary_flux_functional",
    "admissibility",
    "tail_ratio",
    "apply",
]

# decay exponents derived for the Dirichlet Laplacian catalog; other
# eigensystems reuse them as defaults and callers may override
_GAMMA_DEFAULTS = {"total_energy": 0.0, "point": 0.5, "boundary_flux": 1.0}


@dataclass(frozen=True)
class Measurement:
    """Sign-normalised coefficients of a bounded linear functional."""

    label: str
    coefficients: np.ndarray = field(repr=False)
    flips: np.ndarray = field(repr=False)
    gamma: float
    c_f: float
    tail: float

    def __post_init__(self):
        coeffs = np.array(self.coefficients, dtype=float)
        flips = np.array(self.flips, dtype=float)
        if coeffs.shape != flips.shape:
            raise ValueError("coefficients and flips must have matching shapes")
        if np.any(coeffs < 0.0):
            raise ValueError("stored coefficients must be sign-normalised (>= 0)")
        if not np.any(coeffs > 0.0):
            raise ValueError("functional must not vanish on every mode")
        if self.gamma < 0.0:
            raise ValueError("gamma must be >= 0")
        coeffs.setflags(write=False)
        flips.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "flips", flips)

    @property
    def size(self):
        return int(self.coefficients.size)

    def raw_coefficients(self):
        """Coefficients in the original (un-flipped) eigenfunction signs."""
        return self.flips * self.coefficients


def _admissibility_terms(coefficients, eigenvalues, gamma):
    return (coefficients / eigenvalues**gamma) ** 2


def admissibility(m, sys, gamma):
    """Constant c_f over the truncation, guarded by a divergence heuristic.

    Finitely many terms cannot prove divergence, so the guard is a
    Cauchy-tail test: the (zero-stripped) last quarter of the summands
    failing to decay while contributing more than 10% of the sum raises
    :class:`InadmissibleError` ("tail test failed").
    """
    if gamma < 0.0:
        raise ValueError("gamma must be >= 0")
    if m.size != sys.size:
        raise ValueError("measurement truncation does not match the eigensystem")
    terms = _admissibility_terms(m.coefficients, sys.eigenvalues, gamma)
    nonzero = terms[terms > 0.0]
    if nonzero.size >= 8:
        tail = nonzero[3 * nonzero.size // 4 :]
        decaying = np.any(np.diff(tail) < -1e-300)
        if tail.sum() > 0.1 * nonzero.sum() and not decaying:
            raise InadmissibleError(
                f"functional '{m.label}' failed the admissibility tail test at "
                f"gamma={gamma:g} (last quarter carries "
                f"{tail.sum() / nonzero.sum():.1%} and is non-decreasing)"
            )
    return float(np.sqrt(terms.sum()))


def tail_ratio(m, sys, gamma=None):
    """Truncation-health indicator |F[omega_N]/lambda_N^gamma|^2 / c_f^2."""
    gamma = m.gamma if gamma is None else gamma
    terms = _admissibility_terms(m.coefficients, sys.eigenvalues, gamma)
    total = terms.sum()
    return float(terms[-1] / total) if total > 0.0 else 0.0


def _build(label, sys, raw, gamma):
    flips = np.where(raw < 0.0, -1.0, 1.0)
    coeffs = np.abs(np.asarray(raw, dtype=float))
    probe = Measurement(label, coeffs, flips, gamma, c_f=1.0, tail=0.0)
    c_f = admissibility(probe, sys, gamma)
    return Measurement(label, coeffs, flips, gamma, c_f, tail_ratio(probe, sys, gamma))


def total_energy_functional(sys, gamma=None):
    """Integral of the state over the domain: F[omega_k] = int omega_k dx."""
    raw = project(lambda x: np.ones_like(x), sys).coefficients
    if gamma is None:
        gamma = _GAMMA_DEFAULTS["total_energy"]
    return _build("total_energy", sys, raw, gamma)


def point_functional(sys, x_star, gamma=None):
    """Evaluation at an interior point: F[omega_k] = omega_k(x_star)."""
    lo, hi = sys.domain
    if not lo < x_star < hi:
        raise ValueError(f"x_star={x_star} must lie strictly inside {sys.domain}")
    raw = np.array([float(sys.eigenfunction(k, np.asarray(x_star)))
                    for k in range(1, sys.size + 1)])
    if gamma is None:
        gamma = _GAMMA_DEFAULTS["point"]
    return _build(f"point x={x_star:g}", sys, raw, gamma)


def boundary_flux_functional(sys, gamma=None):
    """Outflux at the right end of (0, 1): F[omega_k] = omega_k'(1).

    Only the Dirichlet Laplacian family carries an implemented boundary
    derivative; omega_k'(1) = sqrt(2) k pi cos(k pi).
    """
    if sys.label != "dirichlet_laplacian":
        raise ValueError(
            f"boundary flux functional is implemented for the Dirichlet "
            f"Laplacian only, not '{sys.label}'"
        )
    k = np.arange(1, sys.size + 1, dtype=float)
    raw = np.sqrt(2.0) * k * np.pi * np.cos(k * np.pi)
    if gamma is None:
        gamma = _GAMMA_DEFAULTS["boundary_flux"]
    return _build("boundary_flux", sys, raw, gamma)


def apply(m, v):
    """F applied to a modal vector: sum_k v_k F[omega_k] (flip bookkeeping included)."""
    coeffs = np.asarray(v.coefficients if hasattr(v, "coefficients") else v, dtype=float)
    if coeffs.size != m.size:
        raise ValueError(f"modal vector of length {coeffs.size} against measurement of size {m.size}")
    return float(m.raw_coefficients() @ coeffs)
