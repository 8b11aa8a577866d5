"""One-layer slow manifold of the two-layer model.

Lifting maps a depth-averaged velocity ``u`` (and depth ``h``) to the two
layer velocities and their rates; restriction is simply ``(u1 + u2) / 2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import constants as K
from .errors import DomainError
from .model import ModelParams


@dataclass
class MacroPoint:
    """Depth, one-layer mean velocity and their lateral derivatives."""

    h: float | np.ndarray = 1.0
    u: float | np.ndarray = 0.0
    dh: float | np.ndarray = 0.0
    d2h: float | np.ndarray = 0.0
    du: float | np.ndarray = 0.0
    d2u: float | np.ndarray = 0.0


def _check_depth(h):
    if np.any(np.asarray(h) <= 0):
        raise DomainError("film depth must be positive")


def lift_velocities(q: MacroPoint, m: ModelParams):
    """Layer velocities ``(u1, u2)`` on the slow manifold.

    Every correction to ``0.587 u`` / ``1.413 u`` enters the two layers with
    opposite sign, so the layer mean restricts back to ``u``.
    """
    _check_depth(q.h)
    h, u = q.h, q.u
    corr = (K.LIFT_SLOPE * m.re * h**2 * (m.tan_theta - q.dh)
            - K.LIFT_D2U * h**2 * q.d2u
            - K.LIFT_HX_UX * h * q.dh * q.du
            + K.LIFT_U_HXX * h * u * q.d2h
            + m.re * (K.LIFT_RE_U_UX * h**2 * u * q.du
                      - K.LIFT_RE_U2_HX * h * u**2 * q.dh
                      - K.LIFT_RE_HX_HXX * h**3 * q.dh * q.d2h))
    return K.LIFT_RATIO[0] * u + corr, K.LIFT_RATIO[1] * u - corr


def lift_rates(q: MacroPoint, m: ModelParams):
    """Time derivatives ``(du1/dt, du2/dt)`` of the lifted layer velocities."""
    _check_depth(q.h)
    h, u, hx, hxx, ux, uxx = q.h, q.u, q.dh, q.d2h, q.du, q.d2u
    re, tan = m.re, m.tan_theta
    out = []
    for layer in (0, 1):
        rate = (K.RATE_GRAVITY[layer] * (tan - hx)
                + K.RATE_DRAG[layer] * u / (re * h**2)
                + K.RATE_ADVECTION[layer] * u * ux
                + (K.RATE_VISC_UXX[layer] * uxx
                   + K.RATE_VISC_HX_UX[layer] * hx * ux / h
                   + K.RATE_VISC_U_HXX[layer] * u * hxx / h) / re
                + re * (K.RATE_RE_H3_UXX[layer] * h**3 * uxx
                        + K.RATE_RE_H2_HX_HXX[layer] * h**2 * hx * hxx
                        + K.RATE_RE_H_U_HX2[layer] * h * u * hx**2)
                + re * tan * (K.RATE_RE_TAN_H_U_HX[layer] * h * u * hx
                              + K.RATE_RE_TAN_H2_UX[layer] * h**2 * ux))
        out.append(rate)
    return tuple(out)


def edge_lift(u_edge, h_edge, m: ModelParams, h2_factor=False):
    """Derivative-free lifting used for patch-edge coupling.

    Returns ``(u1, u2, du1/dt, du2/dt)``.  With ``h2_factor`` the slope term
    of the velocities is multiplied by ``h_edge**2`` as in the full lifting;
    by default it is not.
    """
    _check_depth(h_edge)
    slope = K.LIFT_SLOPE * m.re * m.tan_theta
    if h2_factor:
        slope = slope * h_edge**2
    u1 = K.LIFT_RATIO[0] * u_edge + slope
    u2 = K.LIFT_RATIO[1] * u_edge - slope
    drag = u_edge / (m.re * h_edge**2)
    r1 = K.RATE_DRAG[0] * drag + K.RATE_GRAVITY[0] * m.tan_theta
    r2 = K.RATE_DRAG[1] * drag + K.RATE_GRAVITY[1] * m.tan_theta
    return u1, u2, r1, r2


def one_layer_rhs(q: MacroPoint, m: ModelParams):
    """Rates ``(dh/dt, du/dt)`` of the one-layer slow-manifold model."""
    _check_depth(q.h)
    h, u = q.h, q.u
    dh_dt = -(q.dh * u + h * q.du)
    du_dt = (K.ONE_LAYER_GRAVITY * (m.tan_theta - q.dh)
             + K.ONE_LAYER_DRAG * u / (m.re * h**2)
             + K.ONE_LAYER_ADVECTION * u * q.du
             + K.ONE_LAYER_U2_HX * u**2 / h * q.dh)
    return dh_dt, du_dt
