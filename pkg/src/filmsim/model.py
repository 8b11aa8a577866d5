"""Pointwise right-hand sides of the regularised two-layer film model.

All functions accept scalars or numpy arrays in the :class:`PointState`
fields and broadcast.  The velocity right-hand sides are the ones that sit
opposite the regularising operator ``1 - C d/dx(h^2 d/dx)``; the operator
itself is applied by the grid solvers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import constants as K
from .errors import DomainError


@dataclass(frozen=True)
class ModelParams:
    """Physical and numerical constants of one simulation.

    Parameters
    ----------
    re : float
        Reynolds number, > 0.
    tan_theta : float
        Slope of the plate.
    c_reg : float
        Coefficient ``C`` of the regularising operator, >= 0.
    gamma : float
        Homotopy parameter used only by :func:`reconstruct_fields`; the
        evolution equations are always the gamma = 1 model.
    """

    re: float = 1.0
    tan_theta: float = 0.0
    c_reg: float = 0.0
    gamma: float = 1.0

    def __post_init__(self):
        if not self.re > 0:
            raise DomainError(f"Reynolds number must be positive, got {self.re}")
        if not self.c_reg >= 0:
            raise DomainError(f"regularisation coefficient must be >= 0, got {self.c_reg}")
        if not 0.0 <= self.gamma <= 1.0:
            raise DomainError(f"gamma must lie in [0, 1], got {self.gamma}")


@dataclass
class PointState:
    """Depth, layer velocities and their lateral derivatives at one or more points."""

    h: float | np.ndarray = 1.0
    u1: float | np.ndarray = 0.0
    u2: float | np.ndarray = 0.0
    dh: float | np.ndarray = 0.0
    d2h: float | np.ndarray = 0.0
    du1: float | np.ndarray = 0.0
    du2: float | np.ndarray = 0.0
    d2u1: float | np.ndarray = 0.0
    d2u2: float | np.ndarray = 0.0


def _check_depth(h):
    if np.any(np.asarray(h) <= 0):
        raise DomainError("film depth must be positive")


def rhs_h(p: PointState):
    """Rate of change of depth, ``-0.5 d/dx(h u1 + h u2)``."""
    return -0.5 * ((p.dh * p.u1 + p.h * p.du1) + (p.dh * p.u2 + p.h * p.du2))


def _momentum(p, m, gravity, drag, advection, slope_shear, dispersion, dispersion_c):
    h, u1, u2 = p.h, p.u1, p.u2
    grad = {"u1": p.du1, "u2": p.du2}
    val = {"u1": u1, "u2": u2}
    out = gravity * (m.tan_theta - p.dh)
    out = out + (drag[0] * u1 + drag[1] * u2) / (m.re * h * h)
    for (a, b), coef in advection.items():
        out = out + coef * val[a] * grad[b]
    out = out + (u1 - u2) / h * (slope_shear[0] * u1 + slope_shear[1] * u2) * p.dh
    c = m.c_reg
    out = out + ((dispersion[0] + c * dispersion_c[0]) * p.d2u1
                 + (dispersion[1] + c * dispersion_c[1]) * p.d2u2) / m.re
    return out


def rhs_u1(p: PointState, m: ModelParams):
    """Right-hand side of the regularised lower-layer momentum equation."""
    _check_depth(p.h)
    return _momentum(p, m, K.U1_GRAVITY, K.U1_DRAG, K.U1_ADVECTION, K.U1_SLOPE_SHEAR,
                     K.U1_DISPERSION, K.U1_DISPERSION_C)


def rhs_u2(p: PointState, m: ModelParams):
    """Right-hand side of the regularised upper-layer momentum equation."""
    _check_depth(p.h)
    return _momentum(p, m, K.U2_GRAVITY, K.U2_DRAG, K.U2_ADVECTION, K.U2_SLOPE_SHEAR,
                     K.U2_DISPERSION, K.U2_DISPERSION_C)


@dataclass(frozen=True)
class VerticalFields:
    """Pressures and lateral velocities at scaled height ``Z = z/h``.

    ``p1``/``u1`` are the lower-layer expressions (valid for Z <= 1/2) and
    ``p2``/``u2`` the upper-layer ones (valid for Z >= 1/2); both are evaluated
    at every requested Z.
    """

    p1: np.ndarray
    p2: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    z: np.ndarray = field(repr=False)


def reconstruct_fields(p: PointState, m: ModelParams, z) -> VerticalFields:
    """Evaluate the vertical structure of pressure and velocity in both layers.

    The polynomials are accurate to first order in ``m.gamma``.  No blending
    is attempted at the interface Z = 1/2.
    """
    z = np.asarray(z, dtype=float)
    if np.any((z < 0) | (z > 1)):
        raise DomainError("scaled height Z must lie in [0, 1]")
    _check_depth(p.h)
    g, re, tan = m.gamma, m.re, m.tan_theta
    h, hx, hxx = p.h, p.dh, p.d2h
    a, b = p.u1, p.u2
    ax, bx = p.du1, p.du2
    z2, z3, z4, z5 = z**2, z**3, z**4, z**5

    p1 = ((1 - z) * h
          + h**2 * hxx * ((-0.422 + 0.104 * z - 0.5 * z2) + g * (-0.0148 - 0.0107 * z))
          + h * tan * hx * ((0.0469 - 0.104 * z) + g * (0.0375 + 0.0107 * z))
          + 2 / re * ((ax - bx - 2 * ax * z) + hx / h * (a + b - 2 * a * z))
          + g / re * ((4.875 * ax - 1.125 * bx - 1.5 * ax * z + 0.5 * bx * z)
                      + hx / h * (-7.625 * a + 2.375 * b + 1.5 * a * z - 0.5 * b * z)))

    p2 = ((1 - z) * h
          + h**2 * hxx * ((-0.417 + 0.115 * z - 0.5 * z2) + g * (-0.0178 - 0.0049 * z))
          + h * tan * hx * ((0.0521 - 0.115 * z) + g * (0.0404 + 0.0049 * z))
          + 4 / re * ((-ax - bx + 2 * ax * z) + hx / h * (2 * a - b - 2 * a * z + b * z))
          + g / re * ((11 * ax - 3 * bx - 13.75 * ax * z + 4.25 * bx * z)
                      + hx / h * (-13.75 * a + 4.25 * b + 13.75 * a * z - 4.25 * b * z)))

    shape1 = ((-0.104 + 0.0107 * g) * z + 0.5 * z2 - (0.5 + 0.123 * g) * z3 + 0.225 * g * z5)
    u1 = ((4.0 + 1.5 * g) * a * z - 0.5 * g * b * z + (4.0 * b - 12.0 * a) * g * z3
          + re * h**2 * (hx - tan) * shape1)

    shape2 = ((-0.089 + 0.10 * g) + (0.45 - 0.68 * g) * z + (-0.63 + 1.8 * g) * z2
              + (0.25 - 2.5 * g) * z3 + 1.8 * g * z4 - 0.49 * g * z5)
    u2 = ((6.0 - 11.9 * g) * a + (-2.0 + 4.13 * g) * b + (4.0 - 17.8 * g) * b * z
          + (-8.0 + 48.3 * g) * a * z + (27.0 * b - 69.0 * a) * g * z2
          + (34.0 * a - 14.0 * b) * g * z3
          + re * h**2 * (hx - tan) * shape2)

    return VerticalFields(p1=p1, p2=p2, u1=u1, u2=u2, z=z)
