"""Forward solver: implicit L1 time stepping of the decoupled mode equations.

Each mode obeys a damped fractional relaxation equation driven by the
source factor; the memory term is discretised with the L1 weights and the
damping is taken at the new time level, which keeps the step
unconditionally solvable for arbitrarily stiff modes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import rgamma

from .errors import AssumptionError
from .fracalc import GridFunction, TimeGrid, caputo_l1, _l1_weights
from .measurement import Measurement, apply
from .spectral import EigenSystem, ModalVector, sobolev_norm

__all__ = [
    "Scenario",
    "ModeTrajectory",
    "ForwardSolution",
    "solve_mode",
    "solve_forward",
    "regularity_bound",
]

# strict upper diffusivity bound is the sampled max inflated by this much
_STRICT_GAP = 1e-12


@dataclass
class Scenario:
    """Complete datum of one forward/inverse run.

    Holds the fractional order, the time grid, the truncated eigensystem,
    the measurement functional, the sampled diffusivity factor a(t), the
    modal coefficients of the source shape g and the initial state h, and
    (for inverse runs) the sampled observation track e_data.
    """

    alpha: float
    grid: TimeGrid
    sys: EigenSystem
    meas: Measurement
    a: GridFunction
    g_modal: ModalVector
    h_modal: ModalVector
    e_data: Optional[GridFunction] = None

    q_a: float = field(init=False)
    cap_q_a: float = field(init=False)
    f_g: float = field(init=False)

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.meas.size != self.sys.size:
            raise ValueError("measurement truncation does not match the eigensystem")
        for name, v in (("g", self.g_modal), ("h", self.h_modal)):
            if len(v) != self.sys.size:
                raise ValueError(f"{name}_modal does not match the eigensystem size")
        if self.a.grid != self.grid:
            raise ValueError("diffusivity samples must live on the scenario grid")
        self.q_a = float(self.a.values.min())
        if self.q_a <= 0.0:
            raise AssumptionError(
                f"diffusivity factor must stay positive; sampled minimum is {self.q_a:g}"
            )
        self.cap_q_a = float(self.a.values.max()) + _STRICT_GAP
        self.f_g = apply(self.meas, self.g_modal)
        if abs(self.f_g) <= 1e-12:
            raise AssumptionError(
                "measurement of the source shape vanishes (|F[g]| <= 1e-12); "
                "the source factor is not identifiable"
            )
        if self.e_data is not None:
            if self.e_data.grid != self.grid:
                raise ValueError("observation samples must live on the scenario grid")
            # t = 0 is exempt: with h = 0 the track necessarily starts at 0
            if np.any(self.e_data.values[1:] == 0.0):
                raise AssumptionError(
                    "observation track vanishes at a positive-time node"
                )

    @property
    def gamma(self):
        return self.meas.gamma


@dataclass(frozen=True)
class ModeTrajectory:
    """One mode's trajectory split into initial-state and source parts."""

    values: GridFunction
    homogeneous: GridFunction
    source: GridFunction


@dataclass(frozen=True)
class ForwardSolution:
    """Field trajectory: per-mode values plus the measurement track.

    ``mode_values[n, k]`` is mode k at node n.  ``track`` is the scalar
    measurement of the field and ``track_caputo`` its L1 Caputo derivative
    (node 0 by the L1 convention).
    """

    grid: TimeGrid
    mode_values: np.ndarray = field(repr=False)
    track: GridFunction
    track_caputo: GridFunction
    homogeneous_values: Optional[np.ndarray] = field(default=None, repr=False)
    source_values: Optional[np.ndarray] = field(default=None, repr=False)


def _l1_march(alpha, grid, lam, a_vals, rhs, u0):
    """Implicit L1 march for D^alpha u_k + lam_k a(t) u_k = rhs_k(t).

    lam: (N,); a_vals: (n+1,); rhs: (n+1, N); u0: (N,).  Returns (n+1, N).
    """
    n = grid.n_steps
    c0 = grid.dt ** (-alpha) * rgamma(2.0 - alpha)
    b = _l1_weights(alpha, n)
    u = np.empty((n + 1, lam.size))
    u[0] = u0
    d = np.empty((n, lam.size))
    for m in range(1, n + 1):
        hist = b[1:m][::-1] @ d[: m - 1] if m >= 2 else 0.0
        u[m] = (rhs[m] + c0 * (u[m - 1] - hist)) / (c0 + lam * a_vals[m])
        d[m - 1] = u[m] - u[m - 1]
    return u


def solve_mode(alpha, lam, a, r, g_xi, h_xi):
    """Solve one mode equation and return it with its superposition split.

    The combined trajectory and the (initial-state only, source only)
    parts are produced by separate marches; their superposition is checked
    to roundoff before returning.
    """
    if lam <= 0.0:
        raise ValueError("lam must be > 0")
    if a.grid != r.grid:
        raise ValueError("a and r must share a grid")
    grid = a.grid
    lam_vec = np.array([lam])
    rhs = r.values[:, None] * g_xi
    combined = _l1_march(alpha, grid, lam_vec, a.values, rhs, np.array([h_xi]))[:, 0]
    homog = _l1_march(alpha, grid, lam_vec, a.values, np.zeros_like(rhs), np.array([h_xi]))[:, 0]
    source = _l1_march(alpha, grid, lam_vec, a.values, rhs, np.array([0.0]))[:, 0]
    scale = max(np.max(np.abs(combined)), 1e-300)
    assert np.max(np.abs(combined - (homog + source))) <= 1e-12 * scale, (
        "superposition of homogeneous and source parts broke; "
        "the march is not behaving linearly"
    )
    return ModeTrajectory(
        values=GridFunction(grid, combined),
        homogeneous=GridFunction(grid, homog),
        source=GridFunction(grid, source),
    )


def solve_forward(sc, r, split=False):
    """March every mode of the scenario under the source factor r.

    Returns the per-mode trajectories together with the measurement track
    F[u(t)] and its L1 Caputo derivative.  With ``split=True`` the
    initial-state and source parts are returned as well (two extra
    marches).
    """
    if r.grid != sc.grid:
        raise ValueError("source samples must live on the scenario grid")
    lam = sc.sys.eigenvalues
    rhs = r.values[:, None] * sc.g_modal.coefficients[None, :]
    u = _l1_march(sc.alpha, sc.grid, lam, sc.a.values, rhs, sc.h_modal.coefficients)
    track = GridFunction(sc.grid, u @ sc.meas.raw_coefficients())
    parts = {}
    if split:
        zeros = np.zeros_like(rhs)
        parts["homogeneous_values"] = _l1_march(
            sc.alpha, sc.grid, lam, sc.a.values, zeros, sc.h_modal.coefficients
        )
        parts["source_values"] = _l1_march(
            sc.alpha, sc.grid, lam, sc.a.values, rhs, np.zeros(lam.size)
        )
    return ForwardSolution(
        grid=sc.grid,
        mode_values=u,
        track=track,
        track_caputo=caputo_l1(track, sc.alpha),
        **parts,
    )


def regularity_bound(sc, c2):
    """A-priori bound on the strongest spectral norm of the trajectory.

    ((1/min_k lambda_k) + 1)^(2+gamma) * (|h|_{2+gamma} + c2 |g|_{1+gamma} / q_a),
    valid whenever the source factor stays within the ball of radius c2.
    """
    if c2 < 0.0:
        raise ValueError("c2 must be >= 0")
    g = sc.gamma
    prefactor = (1.0 / sc.sys.min_eigenvalue + 1.0) ** (2.0 + g)
    h_norm = sobolev_norm(sc.h_modal, sc.sys, 2.0 + g)
    g_norm = sobolev_norm(sc.g_modal, sc.sys, 1.0 + g)
    return prefactor * (h_norm + c2 * g_norm / sc.q_a)
