"""Staggered periodic grid and the full-domain reference solver.

Grid points ``x_i = i d`` for ``i = 0 .. n_cells - 1`` with ``d = L / n_cells``.
Even-index points carry the depth ``h``; odd-index points carry both layer
velocities.  Internally the fields are stored as arrays indexed by ``k``:
``h[k]`` lives at ``x = 2 k d`` and ``u1[k], u2[k]`` at ``x = (2 k + 1) d``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, StateError
from .model import ModelParams, PointState, rhs_u1, rhs_u2
from .tridiag import solve_cyclic


@dataclass(frozen=True)
class FullGrid:
    length: float
    n_cells: int

    def __post_init__(self):
        if not self.length > 0:
            raise ConfigError(f"domain length must be positive, got {self.length}")
        if self.n_cells < 6 or self.n_cells % 2:
            raise ConfigError(f"n_cells must be even and >= 6, got {self.n_cells}")

    @property
    def d(self) -> float:
        return self.length / self.n_cells

    @property
    def n_half(self) -> int:
        return self.n_cells // 2

    @property
    def x_h(self) -> np.ndarray:
        return 2 * self.d * np.arange(self.n_half)

    @property
    def x_u(self) -> np.ndarray:
        return self.d * (2 * np.arange(self.n_half) + 1)


@dataclass
class FlowField:
    grid: FullGrid
    h: np.ndarray
    u1: np.ndarray
    u2: np.ndarray

    def __post_init__(self):
        n = self.grid.n_half
        for name in ("h", "u1", "u2"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (n,):
                raise StateError(f"{name} must have {n} entries, got shape {arr.shape}")
            setattr(self, name, arr)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.h, self.u1, self.u2])

    @classmethod
    def from_vector(cls, grid: FullGrid, y) -> "FlowField":
        n = grid.n_half
        y = np.asarray(y, dtype=float)
        return cls(grid, y[:n], y[n:2 * n], y[2 * n:])


def velocity_point_states(f: FlowField) -> PointState:
    """Stencil values at every velocity point (vectorised)."""
    d = f.grid.d
    h, u1, u2 = f.h, f.u1, f.u2
    h_right = np.roll(h, -1)
    u1p, u1m = np.roll(u1, -1), np.roll(u1, 1)
    u2p, u2m = np.roll(u2, -1), np.roll(u2, 1)
    return PointState(
        h=0.5 * (h + h_right),
        dh=(h_right - h) / (2 * d),
        d2h=(np.roll(h, -2) - h_right - h + np.roll(h, 1)) / (8 * d * d),
        u1=u1, u2=u2,
        du1=(u1p - u1m) / (4 * d), du2=(u2p - u2m) / (4 * d),
        d2u1=(u1p - 2 * u1 + u1m) / (4 * d * d),
        d2u2=(u2p - 2 * u2 + u2m) / (4 * d * d),
    )


def depth_point_states(f: FlowField) -> PointState:
    """Stencil values at every depth point (vectorised)."""
    d = f.grid.d
    h, u1, u2 = f.h, f.u1, f.u2
    hp, hm = np.roll(h, -1), np.roll(h, 1)
    u1l, u2l = np.roll(u1, 1), np.roll(u2, 1)
    return PointState(
        h=h,
        dh=(hp - hm) / (4 * d),
        d2h=(hp - 2 * h + hm) / (4 * d * d),
        u1=0.5 * (u1l + u1), u2=0.5 * (u2l + u2),
        du1=(u1 - u1l) / (2 * d), du2=(u2 - u2l) / (2 * d),
        d2u1=(np.roll(u1, -1) - u1 - u1l + np.roll(u1, 2)) / (8 * d * d),
        d2u2=(np.roll(u2, -1) - u2 - u2l + np.roll(u2, 2)) / (8 * d * d),
    )


def stencil_derivatives(f: FlowField, index: int) -> PointState:
    """Centred-difference :class:`PointState` at grid point ``index``."""
    index %= f.grid.n_cells
    k = index // 2
    states = depth_point_states(f) if index % 2 == 0 else velocity_point_states(f)
    return PointState(**{name: np.asarray(getattr(states, name))[k]
                         for name in PointState.__dataclass_fields__})


def regulariser_diagonals(h_left, h_right, d, c_reg):
    """Rows of ``4 d^2 (1 - C d/dx(h^2 d/dx))`` at velocity points.

    ``h_left``/``h_right`` are the depths at the neighbouring depth points.
    """
    hl2, hr2 = h_left**2, h_right**2
    return -c_reg * hl2, 4 * d * d + c_reg * (hl2 + hr2), -c_reg * hr2


def full_rhs(f: FlowField, m: ModelParams) -> FlowField:
    """Time derivative of the full periodic two-layer model."""
    if np.any(f.h <= 0):
        raise StateError("film depth must stay positive")
    d = f.grid.d
    p = velocity_point_states(f)
    flux = p.h * (f.u1 + f.u2)
    dh_dt = -0.5 * (flux - np.roll(flux, 1)) / (2 * d)
    rhs = np.stack([rhs_u1(p, m), rhs_u2(p, m)], axis=-1)
    if m.c_reg > 0:
        lower, diag, upper = regulariser_diagonals(f.h, np.roll(f.h, -1), d, m.c_reg)
        rates = solve_cyclic(lower, diag, upper, 4 * d * d * rhs)
    else:
        rates = rhs
    return FlowField(f.grid, dh_dt, rates[:, 0], rates[:, 1])


def full_rhs_vector(grid: FullGrid, m: ModelParams):
    """Flat-vector wrapper of :func:`full_rhs` for the integrator."""
    def f(t, y):
        return full_rhs(FlowField.from_vector(grid, y), m).to_vector()
    return f


def mass(f: FlowField) -> float:
    """Total fluid volume: periodic trapezoidal sum of h over depth points."""
    return float(np.sum(f.h) * 2 * f.grid.d)


def sample_depth(f: FlowField, x) -> np.ndarray:
    """Depth at arbitrary positions by periodic linear interpolation."""
    xh = f.grid.x_h
    period = f.grid.length
    return np.interp(np.mod(x, period), np.append(xh, period), np.append(f.h, f.h[0]))
