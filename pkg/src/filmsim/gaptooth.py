"""Gap-tooth scheme: patches of the two-layer simulator coupled across gaps.

Patch ``j`` (``j = 0 .. m-1``) is centred at ``X_j = j D`` and spans micro
indices ``i = -n' .. n'`` with spacing ``d = 2 r D / (n + 1)``.  On odd
patches the velocities sit at odd ``i`` (so the edges are velocity points)
and the depth at even ``i``; even patches are the reverse.  The macroscale
values are the centre depth ``H_j`` of odd patches and the centre mean
velocity ``U_j`` of even patches.

Odd-patch edge velocities and rates come from interpolating ``U`` and lifting
onto the slow manifold; even-patch edge depths come from interpolating
``H``.  Even patches close their velocity stencils with mirror values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ConfigError, FilmsimError, StateError
from .constants import RATE_GRAVITY
from .manifold import edge_lift
from .model import ModelParams, PointState, rhs_u1, rhs_u2
from .tridiag import solve_tridiagonal

FIELDS = ("h", "u1", "u2")


@dataclass(frozen=True)
class PatchLayout:
    m: int
    D: float
    r: float
    n: int

    @property
    def n_prime(self) -> int:
        return (self.n + 1) // 2

    @property
    def d(self) -> float:
        return 2 * self.r * self.D / (self.n + 1)

    @property
    def length(self) -> float:
        return self.m * self.D

    def centre(self, j) -> float:
        return j * self.D

    def x(self, j, i):
        return j * self.D + np.asarray(i) * self.d

    def h_indices(self, j) -> np.ndarray:
        """Micro indices of the evolving depth points of patch ``j``."""
        npr = self.n_prime
        if j % 2:
            return np.arange(-(npr - 1), npr, 2)
        return np.arange(-(npr - 2), npr - 1, 2)

    def u_indices(self, j) -> np.ndarray:
        """Micro indices of the evolving velocity points of patch ``j``."""
        npr = self.n_prime
        if j % 2:
            return np.arange(-(npr - 2), npr - 1, 2)
        return np.arange(-(npr - 1), npr, 2)

    def patch_dofs(self, j) -> int:
        return len(self.h_indices(j)) + 2 * len(self.u_indices(j))

    @cached_property
    def dof_map(self) -> "DofMap":
        return DofMap(self)

    @property
    def n_dofs(self) -> int:
        return self.dof_map.size


def build_layout(m, D, r, n) -> PatchLayout:
    """Validate the patch geometry and return the layout."""
    if m < 4 or m % 2:
        raise ConfigError(f"patch count m must be even and >= 4, got {m}")
    if n < 5 or n % 4 != 1:
        raise ConfigError(
            f"n must satisfy n = 1 (mod 4) and n >= 5 so that patch edges are "
            f"velocity points on odd patches and depth points on even ones; got {n}")
    if not 0 < r < 0.5:
        raise ConfigError(f"patch half-width ratio r must lie in (0, 0.5), got {r}")
    if not D > 0:
        raise ConfigError(f"macroscale spacing D must be positive, got {D}")
    return PatchLayout(int(m), float(D), float(r), int(n))


class DofMap:
    """Bijection between flat offsets and ``(patch, micro index, field)``.

    Patches are stored in order; within a patch the order is all depth
    points, then all lower-layer velocities, then all upper-layer ones.
    """

    def __init__(self, layout: PatchLayout):
        self.layout = layout
        entries = []
        for j in range(layout.m):
            for fld in FIELDS:
                idx = layout.h_indices(j) if fld == "h" else layout.u_indices(j)
                entries.extend((j, int(i), fld) for i in idx)
        self.entries = entries
        self._offsets = {e: k for k, e in enumerate(entries)}
        self.size = len(entries)

    def offset(self, j, i, fld) -> int:
        return self._offsets[(j, i, fld)]

    def entry(self, offset):
        return self.entries[offset]

    def block(self, parity, fld) -> np.ndarray:
        """Offsets of one field on all patches of one parity, shape (m/2, npts)."""
        lay = self.layout
        rows = []
        for j in range(parity, lay.m, 2):
            idx = lay.h_indices(j) if fld == "h" else lay.u_indices(j)
            rows.append([self._offsets[(j, int(i), fld)] for i in idx])
        return np.array(rows, dtype=int)


@dataclass
class CoupledState:
    layout: PatchLayout
    y: np.ndarray

    def values(self, j, fld) -> np.ndarray:
        dm = self.layout.dof_map
        idx = self.layout.h_indices(j) if fld == "h" else self.layout.u_indices(j)
        return self.y[[dm.offset(j, int(i), fld) for i in idx]]


def lagrange_weights(nodes, x) -> np.ndarray:
    """Weights ``w`` with ``sum(w * f(nodes)) = p(x)`` for the interpolating polynomial."""
    nodes = np.asarray(nodes, dtype=float)
    w = np.ones(len(nodes))
    for a in range(len(nodes)):
        for b in range(len(nodes)):
            if a != b:
                w[a] *= (x - nodes[b]) / (nodes[a] - nodes[b])
    return w


def literal_weights(r) -> np.ndarray:
    """Coefficients of the fixed-offset four-point coupling formula.

    Applied to samples ordered ``(U_{j-2}, U_{j-1}, U_{j+1}, U_{j+2})`` at
    evaluation offset ``r`` (negative for the left edge).  On samples placed at
    ``-3, -1, 1, 3`` (units of the inter-patch spacing) this is exactly the
    cubic interpolant at ``r``.
    """
    q = (r**2 - 1) / 16
    c = (r**3 - r) / 48
    return np.array([
        q - c,                       # U_{j-2}
        0.5 - r / 2 - q + 3 * c,     # U_{j-1}
        0.5 + r / 2 - q - 3 * c,     # U_{j+1}
        q + c,                       # U_{j+2}
    ])


def interpolate_macro(samples, positions, x_eval, mode="lagrange", degree=3):
    """Interpolate macroscale samples to ``x_eval``.

    ``lagrange`` uses the ``degree + 1`` samples nearest the centre at their
    true positions.  ``literal`` applies the fixed-offset coefficient
    formula to exactly four samples with offset ``r`` measured in half the gap
    between the middle two samples.
    """
    samples = np.asarray(samples, dtype=float)
    positions = np.asarray(positions, dtype=float)
    if np.any(np.diff(positions) <= 0):
        raise ValueError("sample positions must be strictly increasing")
    mid = len(positions) // 2
    if len(positions) % 2 or not positions[mid - 1] <= x_eval <= positions[mid]:
        raise ValueError("x_eval must lie between the two middle samples (no extrapolation)")
    if mode == "lagrange":
        if degree % 2 == 0 or degree + 1 > len(samples):
            raise ValueError(f"degree must be odd and at most {len(samples) - 1}")
        half = (degree + 1) // 2
        sl = slice(mid - half, mid + half)
        return float(lagrange_weights(positions[sl], x_eval) @ samples[sl])
    if mode == "literal":
        if len(samples) != 4:
            raise ValueError("literal mode takes exactly four samples")
        centre = 0.5 * (positions[1] + positions[2])
        half_gap = 0.5 * (positions[2] - positions[1])
        return float(literal_weights((x_eval - centre) / half_gap) @ samples)
    raise ValueError(f"unknown interpolation mode {mode!r}")


@dataclass(frozen=True)
class CouplingConfig:
    """How patch edges are coupled to the macroscale.

    ``degree`` is the (odd) interpolation degree using the ``degree + 1``
    nearest same-field patches; ``interpolation`` selects true-position
    Lagrange weights or the fixed-offset four-point formula (degree 3 only).
    """

    degree: int = 3
    interpolation: str = "lagrange"
    edge_lift_h2: bool = False
    edge_rates: str = "gradient"

    def __post_init__(self):
        if self.interpolation not in ("lagrange", "literal"):
            raise ConfigError(f"unknown interpolation mode {self.interpolation!r}")
        if self.degree not in (1, 3, 5):
            raise ConfigError(f"interpolation degree must be 1, 3 or 5, got {self.degree}")
        if self.edge_rates not in ("literal", "gradient"):
            raise ConfigError(f"edge_rates must be 'literal' or 'gradient', got {self.edge_rates!r}")
        if self.interpolation == "literal" and self.degree != 3:
            raise ConfigError("literal interpolation is a four-point (cubic) formula")


class GapToothSystem:
    """Right-hand side of the coupled multi-patch ODE system."""

    def __init__(self, layout: PatchLayout, params: ModelParams,
                 coupling: CouplingConfig = CouplingConfig()):
        self.layout = layout
        self.params = params
        self.coupling = coupling
        dm = layout.dof_map
        self.size = dm.size
        self.idx = {(par, fld): dm.block(par, fld) for par in (0, 1) for fld in FIELDS}
        self.centre = (layout.n_prime - 1) // 2
        self._build_coupling()

    def _build_coupling(self):
        lay, cfg = self.layout, self.coupling
        half = lay.m // 2
        offsets = np.arange(-cfg.degree, cfg.degree + 1, 2)
        if cfg.interpolation == "lagrange":
            self.w_minus = lagrange_weights(offsets, -lay.r)
            self.w_plus = lagrange_weights(offsets, lay.r)
        else:
            self.w_minus = literal_weights(-lay.r)
            self.w_plus = literal_weights(lay.r)
        # Odd patch j = 2a+1 reads U from even patches j + s -> index (j+s)/2.
        odd_j = np.arange(1, lay.m, 2)
        even_j = np.arange(0, lay.m, 2)
        self.gather_u = ((odd_j[:, None] + offsets[None, :]) % lay.m) // 2
        self.gather_h = ((even_j[:, None] + offsets[None, :]) % lay.m) // 2
        assert self.gather_u.max() < half and self.gather_h.max() < half

    # -- macroscale ---------------------------------------------------------
    def restrict(self, y):
        """Macroscale values ``(H at odd patches, U at even patches)``."""
        y = np.asarray(y)
        c = self.centre
        H = y[self.idx[1, "h"][:, c]]
        U = 0.5 * (y[self.idx[0, "u1"][:, c]] + y[self.idx[0, "u2"][:, c]])
        return H, U

    def edge_values(self, macro, gather):
        samples = np.asarray(macro)[gather]
        return samples @ self.w_minus, samples @ self.w_plus

    # -- right-hand side ----------------------------------------------------
    def rhs(self, y):
        y = np.asarray(y, dtype=float)
        if y.shape != (self.size,):
            raise ConfigError(f"state has {y.shape} entries, layout needs {self.size}")
        m, d, cfg = self.params, self.layout.d, self.coupling
        H, U = self.restrict(y)
        out = np.empty_like(y)

        # odd patches: velocity edges lifted from interpolated U
        hO = y[self.idx[1, "h"]]
        if np.any(hO <= 0):
            raise StateError("film depth must stay positive on odd patches")
        u_lo, u_hi = self.edge_values(U, self.gather_u)
        h_lo = 1.5 * hO[:, 0] - 0.5 * hO[:, 1]
        h_hi = 1.5 * hO[:, -1] - 0.5 * hO[:, -2]
        if np.any(h_lo <= 0) or np.any(h_hi <= 0):
            raise StateError("extrapolated edge depth became non-positive")
        lo = list(edge_lift(u_lo, h_lo, m, cfg.edge_lift_h2))
        hi = list(edge_lift(u_hi, h_hi, m, cfg.edge_lift_h2))
        if cfg.edge_rates == "gradient":
            hx_lo = (hO[:, 1] - hO[:, 0]) / (2 * d)
            hx_hi = (hO[:, -1] - hO[:, -2]) / (2 * d)
            for layer in (0, 1):
                lo[2 + layer] = lo[2 + layer] - RATE_GRAVITY[layer] * hx_lo
                hi[2 + layer] = hi[2 + layer] - RATE_GRAVITY[layer] * hx_hi
        u1 = np.column_stack([lo[0], y[self.idx[1, "u1"]], hi[0]])
        u2 = np.column_stack([lo[1], y[self.idx[1, "u2"]], hi[1]])
        hbar = np.column_stack([h_lo, 0.5 * (hO[:, :-1] + hO[:, 1:]), h_hi])
        flux = hbar * (u1 + u2)
        out[self.idx[1, "h"]] = -0.5 * (flux[:, 1:] - flux[:, :-1]) / (2 * d)
        p = PointState(
            h=hbar[:, 1:-1], dh=(hO[:, 1:] - hO[:, :-1]) / (2 * d),
            u1=u1[:, 1:-1], u2=u2[:, 1:-1],
            du1=(u1[:, 2:] - u1[:, :-2]) / (4 * d), du2=(u2[:, 2:] - u2[:, :-2]) / (4 * d),
            d2u1=(u1[:, 2:] - 2 * u1[:, 1:-1] + u1[:, :-2]) / (4 * d * d),
            d2u2=(u2[:, 2:] - 2 * u2[:, 1:-1] + u2[:, :-2]) / (4 * d * d),
        )
        rhs = 4 * d * d * np.stack([rhs_u1(p, m), rhs_u2(p, m)], axis=-1)
        if m.c_reg > 0:
            hl2, hr2 = hO[:, :-1] ** 2, hO[:, 1:] ** 2
            lower, diag, upper = -m.c_reg * hl2, 4 * d * d + m.c_reg * (hl2 + hr2), -m.c_reg * hr2
            rhs[:, 0, 0] -= lower[:, 0] * lo[2]
            rhs[:, 0, 1] -= lower[:, 0] * lo[3]
            rhs[:, -1, 0] -= upper[:, -1] * hi[2]
            rhs[:, -1, 1] -= upper[:, -1] * hi[3]
            rates = solve_tridiagonal(lower, diag, upper, rhs)
        else:
            rates = rhs / (4 * d * d)
        out[self.idx[1, "u1"]] = rates[..., 0]
        out[self.idx[1, "u2"]] = rates[..., 1]

        # even patches: depth edges interpolated from H, mirror velocity closure
        hE = y[self.idx[0, "h"]]
        e_lo, e_hi = self.edge_values(H, self.gather_h)
        hF = np.column_stack([e_lo, hE, e_hi])
        if np.any(hF <= 0):
            raise StateError("film depth must stay positive on even patches")
        v1 = y[self.idx[0, "u1"]]
        v2 = y[self.idx[0, "u2"]]
        x1 = np.column_stack([v1[:, 0], v1, v1[:, -1]])
        x2 = np.column_stack([v2[:, 0], v2, v2[:, -1]])
        hbar = 0.5 * (hF[:, :-1] + hF[:, 1:])
        flux = hbar * (v1 + v2)
        out[self.idx[0, "h"]] = -0.5 * (flux[:, 1:] - flux[:, :-1]) / (2 * d)
        p = PointState(
            h=hbar, dh=(hF[:, 1:] - hF[:, :-1]) / (2 * d),
            u1=v1, u2=v2,
            du1=(x1[:, 2:] - x1[:, :-2]) / (4 * d), du2=(x2[:, 2:] - x2[:, :-2]) / (4 * d),
            d2u1=(x1[:, 2:] - 2 * v1 + x1[:, :-2]) / (4 * d * d),
            d2u2=(x2[:, 2:] - 2 * v2 + x2[:, :-2]) / (4 * d * d),
        )
        rhs = 4 * d * d * np.stack([rhs_u1(p, m), rhs_u2(p, m)], axis=-1)
        if m.c_reg > 0:
            hl2, hr2 = hF[:, :-1] ** 2, hF[:, 1:] ** 2
            lower, diag, upper = -m.c_reg * hl2, 4 * d * d + m.c_reg * (hl2 + hr2), -m.c_reg * hr2
            diag[:, 0] += lower[:, 0]
            diag[:, -1] += upper[:, -1]
            rates = solve_tridiagonal(lower, diag, upper, rhs)
        else:
            rates = rhs / (4 * d * d)
        out[self.idx[0, "u1"]] = rates[..., 0]
        out[self.idx[0, "u2"]] = rates[..., 1]
        return out

    def __call__(self, t, y):
        return self.rhs(y)

    # -- state construction ---------------------------------------------------
    def lift_state(self, h_profile, u_profile):
        """Patch state sampled from macroscale profiles ``h(x)`` and ``u(x)``.

        Velocities are split onto the layers with the derivative-free lifting,
        so restriction recovers ``u`` exactly at even-patch centres.
        """
        lay, dm = self.layout, self.layout.dof_map
        y = np.empty(dm.size)
        for k, (j, i, fld) in enumerate(dm.entries):
            x = lay.x(j, i)
            if fld == "h":
                y[k] = h_profile(x)
            else:
                u1, u2, _, _ = edge_lift(u_profile(x), 1.0, self.params)
                y[k] = u1 if fld == "u1" else u2
        return y

    def sample_state(self, h_profile, u1_profile, u2_profile):
        """Patch state sampled pointwise from layer profiles."""
        lay, dm = self.layout, self.layout.dof_map
        prof = {"h": h_profile, "u1": u1_profile, "u2": u2_profile}
        return np.array([prof[fld](lay.x(j, i)) for (j, i, fld) in dm.entries], dtype=float)

    def centre_depths(self, y):
        """Depth at every patch centre: direct on odd patches, neighbour mean on even."""
        y = np.asarray(y)
        out = np.empty(self.layout.m)
        c = self.centre
        out[1::2] = y[self.idx[1, "h"][:, c]]
        hE = y[self.idx[0, "h"]]
        half = hE.shape[1] // 2
        out[0::2] = 0.5 * (hE[:, half - 1] + hE[:, half])
        return out


def gaptooth_rhs(y, layout, params, coupling=CouplingConfig()):
    """Convenience wrapper: one right-hand-side evaluation."""
    return GapToothSystem(layout, params, coupling).rhs(y)


def restrict(y, layout):
    """Macroscale values ``(H_j for odd j, U_j for even j)`` of a patch state."""
    return GapToothSystem(layout, ModelParams()).restrict(y)


# -- spectra -----------------------------------------------------------------

@dataclass(frozen=True)
class SpectrumThresholds:
    macro_re: float = 0.2
    fast_re: float = -1.0
    wave_im: float = 2.0
    real_tol: float = 1e-6


@dataclass
class Spectrum:
    eigenvalues: np.ndarray
    classes: list = field(default_factory=list)
    thresholds: SpectrumThresholds = SpectrumThresholds()

    def of_class(self, name) -> np.ndarray:
        return self.eigenvalues[[c == name for c in self.classes]]


def classify(lam, th: SpectrumThresholds = SpectrumThresholds()) -> str:
    if abs(lam.real) < th.macro_re:
        return "macroscale"
    if lam.real < th.fast_re and abs(lam.imag) <= th.real_tol * max(1.0, abs(lam)):
        return "shear"
    if lam.real < th.fast_re and abs(lam.imag) > th.wave_im:
        return "microscale-wave"
    return "other"


def numerical_jacobian(fun, y, step=1e-6, names=None):
    """Central-difference Jacobian with per-DOF step ``step * max(1, |y_j|)``.

    ``names`` optionally labels each DOF for error messages.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    jac = np.empty((n, n))
    for col in range(n):
        h = step * max(1.0, abs(y[col]))
        yp = y.copy()
        ym = y.copy()
        yp[col] += h
        ym[col] -= h
        jac[:, col] = (fun(yp) - fun(ym)) / (2 * h)
        if not np.all(np.isfinite(jac[:, col])):
            label = f"{col} {names[col]}" if names is not None else f"{col}"
            raise FilmsimError(f"non-finite Jacobian column for DOF {label}")
    return jac


def jacobian_spectrum(system: GapToothSystem, y_star, step=1e-6,
                      thresholds: SpectrumThresholds = SpectrumThresholds()) -> Spectrum:
    """Eigenvalues of the finite-difference Jacobian of the patch system."""
    names = [f"(patch={j}, i={i}, field={fld})" for (j, i, fld) in system.layout.dof_map.entries]
    jac = numerical_jacobian(system.rhs, y_star, step, names)
    lams = np.linalg.eigvals(jac)
    order = np.lexsort((-lams.imag, -lams.real))
    lams = lams[order]
    return Spectrum(lams, [classify(lam, thresholds) for lam in lams], thresholds)
