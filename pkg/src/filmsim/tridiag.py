"""Tridiagonal and cyclic tridiagonal solvers.

Systems are given by their three diagonals ``lower[i] x[i-1] + diag[i] x[i] +
upper[i] x[i+1] = rhs[i]``.  ``lower[0]`` and ``upper[-1]`` are ignored by
:func:`solve_tridiagonal`; :func:`solve_cyclic` uses them as the wraparound
corner entries.  All arrays may carry leading batch dimensions; the system
runs along the last axis.  ``rhs`` may have one extra trailing axis of
right-hand-side columns.
"""

import numpy as np


def solve_tridiagonal(lower, diag, upper, rhs):
    """Thomas algorithm without pivoting (needs a diagonally dominant matrix)."""
    lower = np.asarray(lower)
    diag = np.asarray(diag)
    upper = np.asarray(upper)
    rhs = np.asarray(rhs)
    columns = rhs.ndim == diag.ndim + 1
    if columns:
        lower, diag, upper = lower[..., None], diag[..., None], upper[..., None]
        axis = -2
    else:
        axis = -1
    n = diag.shape[-1] if not columns else diag.shape[-2]
    rhs = np.moveaxis(rhs, axis, 0).astype(np.result_type(rhs, diag, float), copy=True)
    a = np.moveaxis(lower, axis, 0)
    b = np.moveaxis(diag, axis, 0)
    c = np.moveaxis(upper, axis, 0)

    cp = np.empty(np.broadcast(c, rhs).shape, dtype=rhs.dtype)
    denom = b[0]
    cp[0] = c[0] / denom
    rhs[0] = rhs[0] / denom
    for i in range(1, n):
        denom = b[i] - a[i] * cp[i - 1]
        cp[i] = c[i] / denom
        rhs[i] = (rhs[i] - a[i] * rhs[i - 1]) / denom
    for i in range(n - 2, -1, -1):
        rhs[i] = rhs[i] - cp[i] * rhs[i + 1]
    return np.moveaxis(rhs, 0, axis)


def solve_cyclic(lower, diag, upper, rhs):
    """Periodic tridiagonal solve by the Sherman-Morrison correction.

    ``lower[0]`` couples row 0 to ``x[-1]`` and ``upper[-1]`` couples the last
    row to ``x[0]``.
    """
    lower = np.asarray(lower, dtype=float)
    diag = np.asarray(diag, dtype=float)
    upper = np.asarray(upper, dtype=float)
    rhs = np.asarray(rhs)
    n = diag.shape[-1]
    if n < 3:
        raise ValueError("cyclic solve needs at least 3 unknowns")
    alpha = upper[..., -1]          # row n-1, column 0
    beta = lower[..., 0]            # row 0, column n-1
    gamma = -diag[..., 0]
    b = diag.copy()
    b[..., 0] = diag[..., 0] - gamma
    b[..., -1] = diag[..., -1] - alpha * beta / gamma

    columns = rhs.ndim == diag.ndim + 1
    x = solve_tridiagonal(lower, b, upper, rhs)
    u = np.zeros_like(diag)
    u[..., 0] = gamma
    u[..., -1] = alpha
    z = solve_tridiagonal(lower, b, upper, u)
    # v = (1, 0, ..., 0, beta/gamma)
    if columns:
        vx = x[..., 0, :] + (beta / gamma)[..., None] * x[..., -1, :]
        vz = (z[..., 0] + beta / gamma * z[..., -1])[..., None]
        return x - (vx / (1 + vz))[..., None, :] * z[..., :, None]
    vx = x[..., 0] + beta / gamma * x[..., -1]
    vz = z[..., 0] + beta / gamma * z[..., -1]
    return x - (vx / (1 + vz))[..., None] * z
