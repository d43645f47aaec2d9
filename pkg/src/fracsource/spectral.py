"""Concrete eigensystems, modal algebra, and spectral Sobolev norms.

Three operator families with closed-form eigenpairs are provided: the
Dirichlet Laplacian on (0, 1), a second-derivative operator with
involution on (0, pi), and the 1-D quantum harmonic oscillator.  All of
them are truncated to a caller-chosen number of modes; every derived
constant in the package is computed over that truncation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import QuadratureError

__all__ = [
    "EigenSystem",
    "ModalVector",
    "dirichlet_laplacian",
    "involution_operator",
    "harmonic_oscillator_1d",
    "project",
    "synthesize",
    "sobolev_norm",
]


@dataclass(frozen=True)
class EigenSystem:
    """Truncated discrete spectrum with evaluable eigenfunctions.

    ``eigenfunction(k, x)`` evaluates mode k (1-based position in the
    stored ordering) at the points x.
    """

    label: str
    eigenvalues: np.ndarray = field(repr=False)
    domain: tuple[float, float]
    eigenfunction: Callable[[int, np.ndarray], np.ndarray] = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.eigenvalues, dtype=float)
        if vals.ndim != 1 or vals.size < 1:
            raise ValueError("eigenvalues must be a nonempty 1-D sequence")
        if np.any(vals <= 0.0):
            raise ValueError("all eigenvalues must be > 0")
        vals.setflags(write=False)
        object.__setattr__(self, "eigenvalues", vals)

    @property
    def size(self):
        return int(self.eigenvalues.size)

    @property
    def min_eigenvalue(self):
        return float(self.eigenvalues.min())


@dataclass(frozen=True)
class ModalVector:
    """Coefficients of an element of the state space in the eigenbasis."""

    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.coefficients, dtype=float)
        if vals.ndim != 1:
            raise ValueError("coefficients must be 1-D")
        vals.setflags(write=False)
        object.__setattr__(self, "coefficients", vals)

    def __len__(self):
        return int(self.coefficients.size)


def dirichlet_laplacian(n_modes):
    """-u'' on (0, 1) with Dirichlet ends: lambda_k = (k pi)^2, sqrt(2) sin(k pi x)."""
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    k = np.arange(1, n_modes + 1, dtype=float)

    def eigenfunction(idx, x):
        return np.sqrt(2.0) * np.sin(idx * np.pi * np.asarray(x, dtype=float))

    return EigenSystem("dirichlet_laplacian", (k * np.pi) ** 2, (0.0, 1.0), eigenfunction)


def involution_operator(n_modes, eps):
    """Second-derivative operator with a reflected-argument term on (0, pi).

    Eigenfunctions are sqrt(2/pi) sin(m x); the reflection splits the
    spectrum by parity: lambda_m = (1-eps) m^2 for odd m and
    (1+eps) m^2 for even m.  At eps = 0 this degenerates to the Dirichlet
    Laplacian on (0, pi).
    """
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    if not abs(eps) < 1.0:
        raise ValueError(f"|eps| must be < 1, got {eps}")
    m = np.arange(1, n_modes + 1)
    lam = np.where(m % 2 == 1, (1.0 - eps) * m.astype(float) ** 2,
                   (1.0 + eps) * m.astype(float) ** 2)

    def eigenfunction(idx, x):
        return np.sqrt(2.0 / np.pi) * np.sin(idx * np.asarray(x, dtype=float))

    return EigenSystem("involution", lam, (0.0, np.pi), eigenfunction)


def harmonic_oscillator_1d(n_modes):
    """-u'' + x^2 u on the line: lambda_k = 2k+1, Hermite functions.

    Mode at 1-based position j is the physical level k = j-1.  The
    normalised Hermite functions are evaluated by the stable three-term
    recurrence; the working domain is truncated to [-L, L] with
    L = sqrt(2 n_modes) + 6, beyond which the functions are below
    double-precision resolution.
    """
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    if n_modes > 200:
        raise OverflowError("harmonic oscillator truncation limited to 200 modes")
    k = np.arange(n_modes, dtype=float)
    half_width = np.sqrt(2.0 * n_modes) + 6.0

    def eigenfunction(idx, x):
        x = np.asarray(x, dtype=float)
        level = idx - 1
        h_prev = np.pi ** (-0.25) * np.exp(-0.5 * x**2)
        if level == 0:
            return h_prev
        h = np.sqrt(2.0) * x * h_prev
        for j in range(1, level):
            h, h_prev = (
                np.sqrt(2.0 / (j + 1.0)) * x * h - np.sqrt(j / (j + 1.0)) * h_prev,
                h,
            )
        return h

    return EigenSystem(
        "harmonic_oscillator", 2.0 * k + 1.0, (-half_width, half_width), eigenfunction
    )


@lru_cache(maxsize=8)
def _gauss_legendre(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def quadrature_nodes(sys, panels, points_per_panel=16):
    """Composite Gauss-Legendre nodes and weights on the system domain."""
    gx, gw = _gauss_legendre(points_per_panel)
    lo, hi = sys.domain
    edges = np.linspace(lo, hi, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
    weights = (half[:, None] * gw[None, :]).ravel()
    return nodes, weights


def _eigenfunction_matrix(sys, x):
    return np.stack([sys.eigenfunction(k, x) for k in range(1, sys.size + 1)])


def project(f, sys, tol=1e-9, max_panels=4096):
    """Inner products of f with every eigenfunction, certified to ``tol``.

    ``f`` is a callable on the domain, or a ``(x, y)`` sample pair that is
    interpolated linearly.  Composite Gauss-Legendre panels are doubled
    until two successive refinements of every coefficient agree.
    """
    if isinstance(f, tuple):
        xs, ys = (np.asarray(a, dtype=float) for a in f)
        fn = lambda x: np.interp(x, xs, ys)  # noqa: E731
    else:
        fn = f
    panels = max(8, sys.size // 2)
    nodes, weights = quadrature_nodes(sys, panels)
    prev = _eigenfunction_matrix(sys, nodes) @ (weights * fn(nodes))
    while panels <= max_panels:
        panels *= 2
        nodes, weights = quadrature_nodes(sys, panels)
        cur = _eigenfunction_matrix(sys, nodes) @ (weights * fn(nodes))
        if np.all(np.abs(cur - prev) <= tol * np.maximum(1.0, np.abs(cur))):
            return ModalVector(cur)
        prev = cur
    raise QuadratureError(
        f"projection quadrature on '{sys.label}' did not certify tol={tol:g}"
    )


def synthesize(v, sys, points):
    """Evaluate sum_k v_k * eigenfunction_k at the given points."""
    if len(v) != sys.size:
        raise ValueError(f"modal vector of length {len(v)} against system of size {sys.size}")
    points = np.asarray(points, dtype=float)
    return v.coefficients @ _eigenfunction_matrix(sys, points)


def sobolev_norm(v, sys, rho):
    """Spectrally weighted norm (sum |(1+lambda_k)^rho v_k|^2)^(1/2)."""
    if len(v) != sys.size:
        raise ValueError(f"modal vector of length {len(v)} against system of size {sys.size}")
    weighted = (1.0 + sys.eigenvalues) ** rho * v.coefficients
    return float(np.linalg.norm(weighted))
