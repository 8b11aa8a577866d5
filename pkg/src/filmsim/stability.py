"""Linear stability of the two-layer model about its uniform shear equilibrium.

Perturbations ``(h, u1, u2) = base + (h', u1', u2') exp(lambda t + i k x)``
give a 3x3 problem ``lambda v = M v``.  Two readings of the regulariser are
available:

* ``left_operator=False`` (default): the velocity rows of ``M`` carry the
  regularised right-hand side only.  This is the matrix whose characteristic
  cubic is the reference regularised cubic
  (:func:`reference_cubic_coefficients`).
* ``left_operator=True``: the velocity rows are also divided by the symbol
  ``1 + C k^2`` of the regularising operator acting on the time derivative.
  This is the dispersion relation of the system the grid solvers integrate.

At ``C = 0`` both coincide.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import constants as K
from .errors import FilmsimError
from .model import ModelParams, PointState, rhs_h, rhs_u1, rhs_u2

# Real parts below this are treated as non-positive (roundoff on the mass mode).
GROWTH_TOL = 1e-10


@dataclass(frozen=True)
class GrowthRates:
    """The three growth rates at wavenumber ``k``, descending by real part."""

    k: float
    lambdas: np.ndarray

    @property
    def max_real(self) -> float:
        return float(self.lambdas[0].real)


def equilibrium_velocities(re, tan_theta):
    """Uniform-flow layer velocities on a film of unit depth."""
    return K.EQUILIBRIUM_U1 * re * tan_theta, K.EQUILIBRIUM_U2 * re * tan_theta


def _sort_desc(lams):
    lams = np.asarray(lams)
    order = np.lexsort((-lams.imag, -lams.real), axis=-1)
    return np.take_along_axis(lams, order, axis=-1)


def stability_matrix(re, tan_theta, k, c_reg=0.0, left_operator=False):
    """Coefficient matrix of the linearised model; ``k`` may be an array.

    Returns an array of shape ``(3, 3)`` or ``(len(k), 3, 3)``.
    """
    k = np.asarray(k, dtype=float)
    tr = tan_theta * re
    ik = 1j * k
    k2 = k * k
    m = np.zeros(k.shape + (3, 3), dtype=complex)
    m[..., 0, 0] = K.MATRIX_H_ADVECTION * tr * ik
    m[..., 0, 1] = K.MATRIX_MASS_FLUX * ik
    m[..., 0, 2] = K.MATRIX_MASS_FLUX * ik
    for row in (0, 1):
        m[..., row + 1, 0] = -(K.GRAVITY[row] + K.MATRIX_GRAVITY_SHEAR[row] * tr) * ik
        for col in (0, 1):
            m[..., row + 1, col + 1] = (
                ((1 + c_reg * k2) * K.DRAG_MATRIX[row, col]
                 - K.DISPERSION_MATRIX[row, col] * k2) / re
                + K.MATRIX_ADVECTION[row][col] * tr * ik
            )
    if left_operator:
        m[..., 1:, :] /= (1 + c_reg * k2)[..., None, None]
    return m


def model_linearisation(re, tan_theta, k, c_reg=0.0, left_operator=False, step=1e-6):
    """Linearisation assembled from the pointwise model right-hand sides.

    Independent of the tabulated matrix: partial derivatives of ``rhs_h``,
    ``rhs_u1`` and ``rhs_u2`` with respect to every field and derivative are
    taken by central differences at the equilibrium, then combined with the
    Fourier symbols ``1, ik, -k^2``.
    """
    params = ModelParams(re=re, tan_theta=tan_theta, c_reg=c_reg)
    u1s, u2s = equilibrium_velocities(re, tan_theta)
    base = dict(h=1.0, u1=u1s, u2=u2s)
    fields = {"h": ("h", "dh", "d2h"), "u1": ("u1", "du1", "d2u1"), "u2": ("u2", "du2", "d2u2")}
    funcs = (rhs_h, lambda p: rhs_u1(p, params), lambda p: rhs_u2(p, params))
    k = np.asarray(k, dtype=float)
    symbols = (np.ones_like(k), 1j * k, -k * k)
    m = np.zeros(k.shape + (3, 3), dtype=complex)
    for col, name in enumerate(("h", "u1", "u2")):
        for order, attr in enumerate(fields[name]):
            for row, f in enumerate(funcs):
                plus = PointState(**base)
                minus = PointState(**base)
                setattr(plus, attr, getattr(plus, attr) + step)
                setattr(minus, attr, getattr(minus, attr) - step)
                partial = (f(plus) - f(minus)) / (2 * step)
                m[..., row, col] += partial * symbols[order]
    if left_operator:
        m[..., 1:, :] /= (1 + c_reg * k * k)[..., None, None]
    return m


def characteristic_coefficients(matrix):
    """Monic cubic coefficients ``[1, a2, a1, a0]`` of ``det(lambda I - M)``."""
    m = np.asarray(matrix)
    tr = np.trace(m, axis1=-2, axis2=-1)
    minors = (m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
              + m[..., 0, 0] * m[..., 2, 2] - m[..., 0, 2] * m[..., 2, 0]
              + m[..., 1, 1] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 1])
    # cofactor expansion: LU-based det misbehaves on subnormal entries
    det = (m[..., 0, 0] * (m[..., 1, 1] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 1])
           - m[..., 0, 1] * (m[..., 1, 0] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 0])
           + m[..., 0, 2] * (m[..., 1, 0] * m[..., 2, 1] - m[..., 1, 1] * m[..., 2, 0]))
    return np.stack([np.ones_like(tr), -tr, minors, -det], axis=-1)


def reference_cubic_coefficients(re, tan_theta, k, c_reg=0.0):
    """Coefficients ``[1, a2, a1, a0]`` of the rounded reference cubic.

    The coefficients are independently rounded, so roots agree with the
    matrix eigenvalues only to about three digits.  The ``C k^3`` term of the
    constant coefficient is taken as ``C k^4``; only that power is consistent
    with the determinant of the regularised matrix.
    """
    k = np.asarray(k, dtype=float)
    t, re_, c, i = tan_theta, re, c_reg, 1j
    a2 = 1.114 * t * re_ * i * k + (1.39 * k**2 + 24.66) / re_ + 24.66 * c * k**2 / re_
    a1 = -(0.476 * t**2 * re_**2 * k**2
           + t * k * (-2.265 * i * k**2 - 14.03 * i - 0.0144 * re_ * k)
           + 15.09 * k**4 / re_**2 - 0.914 * k**2 - 84.13 * k**2 / re_**2 - 54.73 / re_**2
           - 14.03 * c * t * i * k**3
           - (54.73 * c**2 * k**4 + 84.13 * c * k**4 + 109.46 * c * k**2) / re_**2)
    a0 = -(0.0725 * t**3 * re_**3 * i * k**3
           + t**2 * re_ * k**2 * (-0.0191 * re_ * i * k + 0.615 * k**2 + 1.908)
           + t / re_ * k * (5.19 * i * k**4 - 0.682 * re_**2 * i * k**2 - 28.94 * i * k**2
                            - 18.83 * i - 0.841 * re_ * k**3 - 0.198 * re_ * k)
           + k**2 * (0.209 * k**2 - 18.26) / re_
           + (-18.83 * c**2 * t * i * k**4 - 28.94 * c * t * i * k**4
              - 37.65 * c * t * i * k**2 - 18.26 * c * k**4) / re_
           + 1.908 * c * t**2 * re_ * k**3 - 0.198 * c * t * k**3)
    return np.stack([np.ones_like(a2), a2, a1 + 0j, a0 + 0j], axis=-1)


def companion_roots(coeffs):
    """Roots of monic cubics ``[1, a2, a1, a0]`` via companion-matrix eigenvalues."""
    coeffs = np.asarray(coeffs, dtype=complex)
    comp = np.zeros(coeffs.shape[:-1] + (3, 3), dtype=complex)
    comp[..., 0, :] = -coeffs[..., 1:]
    comp[..., 1, 0] = 1.0
    comp[..., 2, 1] = 1.0
    return np.linalg.eigvals(comp)


def characteristic_roots(re, tan_theta, k, c_reg=0.0, left_operator=False):
    """Growth rates at a single wavenumber from the characteristic cubic."""
    coeffs = characteristic_coefficients(stability_matrix(re, tan_theta, k, c_reg, left_operator))
    return GrowthRates(k=float(k), lambdas=_sort_desc(companion_roots(coeffs)))


def growth_rate_sweep(re, tan_theta, c_reg, k_grid, left_operator=False):
    """Growth rates over an ascending grid of wavenumbers."""
    k_grid = np.asarray(k_grid, dtype=float)
    if np.any(np.diff(k_grid) < 0):
        raise ValueError("k_grid must be sorted ascending")
    coeffs = characteristic_coefficients(
        stability_matrix(re, tan_theta, k_grid, c_reg, left_operator))
    roots = _sort_desc(companion_roots(coeffs))
    return [GrowthRates(k=float(k), lambdas=lam) for k, lam in zip(k_grid, roots)]


def max_growth(re, tan_theta, c_reg, k_grid, left_operator=False):
    """Largest real part over all modes and wavenumbers in ``k_grid``."""
    coeffs = characteristic_coefficients(
        stability_matrix(re, tan_theta, np.asarray(k_grid, dtype=float), c_reg, left_operator))
    return float(companion_roots(coeffs).real.max())


def instability_onset(re, tan_theta, c_reg=0.0, k_max=10.0, dk=0.01, left_operator=False):
    """Smallest wavenumber on the sweep grid where the top growth rate turns positive.

    The crossing is refined by root-finding between the bracketing grid points.
    Returns ``None`` when the sweep stays stable.
    """
    ks = np.arange(0.0, k_max + dk / 2, dk)
    rates = growth_rate_sweep(re, tan_theta, c_reg, ks, left_operator)
    top = np.array([g.max_real for g in rates])
    unstable = np.nonzero(top > GROWTH_TOL)[0]
    if unstable.size == 0:
        return None
    i = unstable[0]
    if i == 0:
        return 0.0

    def f(kk):
        return characteristic_roots(re, tan_theta, kk, c_reg, left_operator).max_real

    return brentq(f, ks[i - 1], ks[i], xtol=1e-10)


def critical_regularisation(re, tan_theta, k_max=50.0, dk=0.01, tol=1e-3, left_operator=False):
    """Smallest ``C`` for which no wavenumber in ``[0, k_max]`` grows.

    Bisection on the indicator ``max_k max Re(lambda) > 0``.
    """
    ks = np.arange(0.0, k_max + dk / 2, dk)

    def unstable(c):
        return max_growth(re, tan_theta, c, ks, left_operator) > GROWTH_TOL

    lo, hi = 0.0, 1.0
    if not unstable(lo):
        raise FilmsimError("model is already stable without regularisation; no threshold")
    while unstable(hi):
        hi *= 2
        if hi > 1e4:
            raise FilmsimError("no stabilising regularisation coefficient found below 1e4")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if unstable(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def shear_mode_wavenumbers(count):
    """First ``count`` non-negative solutions ``kh`` of ``kh/2 = tan(kh/2)``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    roots = [0.0]
    eps = 1e-12
    for n in range(1, count):
        a, b = n * np.pi + eps, n * np.pi + np.pi / 2 - eps
        x = brentq(lambda s: s - np.tan(s), a, b, xtol=1e-14)
        roots.append(2 * x)
    return roots
