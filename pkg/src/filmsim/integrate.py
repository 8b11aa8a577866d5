"""Adaptive TR-BDF2 integration for stiff systems.

The method is the one-step, L-stable, second-order trapezoidal / BDF2
composite written as a three-stage singly diagonally implicit Runge-Kutta
scheme (stiffly accurate, first stage explicit).  Both implicit stages share
the iteration matrix ``I - h d J`` with ``d = 1 - 1/sqrt(2)``, so one LU
factorisation serves a whole step.  The embedded third-order solution gives
the local error estimate, which is filtered through the same factorisation
to stay honest on stiff components.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .errors import DomainError, IntegrationError, StateError

_GAMMA = 2.0 - np.sqrt(2.0)
_D = _GAMMA / 2.0
_W = np.sqrt(2.0) / 4.0
# error weights: embedded minus main solution weights
_E0 = (1.0 - np.sqrt(2.0)) / 3.0
_E1 = 1.0 / 3.0
_E2 = -2.0 * _D / 3.0
# step-size controller safety factor
_SAFETY = 0.8


@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = 1e-6
    atol: float = 1e-9
    first_step: float | None = None
    max_step: float = np.inf
    max_newton: int = 8
    newton_tol: float = 0.03
    jac_step: float = 1e-7

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0):
            raise ValueError("rtol and atol must be positive")


@dataclass
class IntegrationResult:
    t: np.ndarray
    y: np.ndarray          # shape (len(t), n)
    n_steps: int
    n_rejected: int
    n_rhs: int
    n_jac: int
    n_lu: int


def fd_jacobian(fun, t, y, f0, step=1e-7):
    """Forward-difference Jacobian of ``fun(t, y)``."""
    n = y.size
    jac = np.empty((n, n))
    for col in range(n):
        h = step * max(1.0, abs(y[col]))
        yp = y.copy()
        yp[col] += h
        jac[:, col] = (fun(t, yp) - f0) / h
    return jac


class _Counter:
    def __init__(self, fun):
        self.fun = fun
        self.calls = 0

    def __call__(self, t, y):
        self.calls += 1
        return np.asarray(self.fun(t, y), dtype=float)


def _hermite(t0, y0, f0, t1, y1, f1, t):
    h = t1 - t0
    s = (t - t0) / h
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s * s * (3 - 2 * s)
    h11 = s * s * (s - 1)
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1


def integrate(rhs, y0, t_span, config: IntegratorConfig = IntegratorConfig(),
              t_eval=None, observer=None, jac=None) -> IntegrationResult:
    """Integrate ``y' = rhs(t, y)`` over ``t_span``.

    Parameters
    ----------
    rhs : callable
        ``rhs(t, y) -> dy/dt`` on flat float arrays.
    y0 : array_like
        Initial state.
    t_span : (float, float)
        Start and end time, ``t_span[1] > t_span[0]``.
    t_eval : array_like, optional
        Output times inside ``t_span`` (default: both endpoints).  Values are
        produced by cubic Hermite interpolation over the step that contains
        them.
    observer : callable, optional
        Called as ``observer(t, y)`` at every output time.
    jac : callable, optional
        ``jac(t, y) -> (n, n)`` array; forward differences are used otherwise.

    Raises
    ------
    IntegrationError
        When the step size underflows or Newton iterations cannot converge.
    """
    t0, tf = map(float, t_span)
    if not tf > t0:
        raise ValueError("t_span must be increasing")
    cfg = config
    fun = _Counter(rhs)
    y = np.array(y0, dtype=float)
    n = y.size
    if t_eval is None:
        t_eval = np.array([t0, tf])
    t_eval = np.asarray(t_eval, dtype=float)
    if np.any(np.diff(t_eval) < 0) or t_eval[0] < t0 or t_eval[-1] > tf:
        raise ValueError("t_eval must be sorted and inside t_span")

    out_y = np.empty((len(t_eval), n))
    n_out = 0
    f = fun(t0, y)
    if not np.all(np.isfinite(f)):
        raise IntegrationError("right-hand side is not finite at the initial state", t0)

    def emit(tt, yy):
        nonlocal n_out
        out_y[n_out] = yy
        if observer is not None:
            observer(tt, yy.copy())
        n_out += 1

    while n_out < len(t_eval) and t_eval[n_out] <= t0:
        emit(t_eval[n_out], y)

    def wrms(v, scale):
        return np.sqrt(np.mean((v / scale) ** 2)) if n else 0.0

    span = tf - t0
    if cfg.first_step is not None:
        h = cfg.first_step
    else:
        scale = cfg.atol + cfg.rtol * np.abs(y)
        d0, d1 = wrms(y, scale), wrms(f, scale)
        h = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-6
        h = min(h, 0.01 * span)
    h = min(h, cfg.max_step, span)
    h_min = 1e-14 * span

    t = t0
    J = None
    J_current = False
    lu = None
    lu_h = None
    stats = dict(steps=0, rejected=0, jac=0, lu=0)

    def new_jacobian():
        nonlocal J, J_current, lu
        try:
            J = jac(t, y) if jac is not None else fd_jacobian(fun, t, y, f, cfg.jac_step)
        except (StateError, DomainError) as exc:
            raise IntegrationError(f"Jacobian evaluation failed at t={t:.6g}: {exc}", t) from exc
        J_current = True
        lu = None
        stats["jac"] += 1

    def factor(hh):
        nonlocal lu, lu_h
        lu = lu_factor(np.eye(n) - hh * _D * J, check_finite=False)
        lu_h = hh
        stats["lu"] += 1

    def _final(t_stage, z):
        try:
            fz = fun(t_stage, z)
        except (StateError, DomainError):
            return None
        return (z, fz) if np.all(np.isfinite(fz)) else None

    def newton(t_stage, base, z, hh, scale):
        """Solve z = base + hh*d*f(t_stage, z); returns (z, f(z)) or None."""
        rate = None
        prev = None
        for _ in range(cfg.max_newton):
            try:
                fz = fun(t_stage, z)
            except (StateError, DomainError):
                # a trial iterate left the physical domain: treat as divergence
                return None
            if not np.all(np.isfinite(fz)):
                return None
            resid = base + hh * _D * fz - z
            dz = lu_solve(lu, resid, check_finite=False)
            z = z + dz
            nrm = wrms(dz, scale)
            if prev is not None:
                rate = nrm / prev
                if rate >= 1.0:
                    return None
                if rate / (1 - rate) * nrm < cfg.newton_tol:
                    return _final(t_stage, z)
            elif nrm < 1e-3 * cfg.newton_tol:
                return _final(t_stage, z)
            prev = nrm
        return None

    new_jacobian()
    while t < tf:
        if t + h >= tf or tf - (t + h) < h_min:
            h = tf - t
        if h < h_min:
            raise IntegrationError(f"step size underflow at t={t:.6g} (stiffness or blow-up)", t)
        if lu is None or lu_h != h:
            factor(h)
        scale = cfg.atol + cfg.rtol * np.abs(y)

        # stage 1: trapezoidal rule to t + gamma h
        tg = t + _GAMMA * h
        res = newton(tg, y + h * _D * f, y + _GAMMA * h * f, h, scale)
        if res is not None:
            yg, fg = res
            # stage 2: BDF2 to t + h
            z0 = y + h * (_W * f + _W * fg) + h * _D * fg
            res = newton(t + h, y + h * _W * (f + fg), z0, h, scale)
        if res is None:
            if not J_current:
                new_jacobian()
            else:
                h *= 0.25
                stats["rejected"] += 1
            continue
        y_new, f_new = res

        est = h * (_E0 * f + _E1 * fg + _E2 * f_new)
        est = lu_solve(lu, est, check_finite=False)
        scale = cfg.atol + cfg.rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = wrms(est, scale)
        if not np.isfinite(err):
            err = np.inf
        if err > 1.0:
            stats["rejected"] += 1
            h *= max(0.2, _SAFETY * err ** (-1.0 / 3.0)) if np.isfinite(err) else 0.2
            continue

        t_new = t + h
        while n_out < len(t_eval) and t_eval[n_out] <= t_new:
            te = t_eval[n_out]
            ye = y_new if te == t_new else _hermite(t, y, f, t_new, y_new, f_new, te)
            emit(te, ye)
        t, y, f = t_new, y_new, f_new
        stats["steps"] += 1
        J_current = False
        factor_change = 5.0 if err == 0 else min(5.0, max(0.2, _SAFETY * err ** (-1.0 / 3.0)))
        # keep the factorisation when the change would be marginal
        if 1.0 <= factor_change < 1.2:
            factor_change = 1.0
        h = min(h * factor_change, cfg.max_step)

    return IntegrationResult(t=t_eval.copy(), y=out_y[:n_out], n_steps=stats["steps"],
                             n_rejected=stats["rejected"], n_rhs=fun.calls,
                             n_jac=stats["jac"], n_lu=stats["lu"])
