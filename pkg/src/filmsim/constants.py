"""Model coefficients.

Every number here is stored as tabulated, to three or four significant
digits.  They are evaluated at the physical homotopy value gamma = 1 except
for the gamma-series and the vertical-structure polynomials, where gamma stays
an explicit input.

Naming: ``U1_*`` coefficients belong to the lower-layer momentum equation,
``U2_*`` to the upper-layer one.  Drag coefficients multiply ``u/(Re h^2)``,
dispersion coefficients multiply ``u_xx/Re``.
"""

from decimal import ROUND_HALF_UP, Decimal

import numpy as np

# -- two-layer momentum equations ------------------------------------------
U1_GRAVITY = 0.826
U1_DRAG = (-19.3, 6.98)            # (u1, u2)
U1_ADVECTION = {                   # coefficient of a * db/dx, keyed (a, b)
    ("u1", "u1"): -1.48,
    ("u2", "u2"): -0.225,
    ("u2", "u1"): 0.142,
    ("u1", "u2"): 0.0728,
}
U1_SLOPE_SHEAR = (-0.25, 0.34)     # ((u1-u2)/h)(a u1 + b u2) h_x
U1_DISPERSION = (-3.84, 2.52)      # unregularised (u1_xx, u2_xx)

U2_GRAVITY = 1.002
U2_DRAG = (6.98, -5.36)
U2_ADVECTION = {
    ("u1", "u1"): -1.25,
    ("u2", "u2"): -1.57,
    ("u2", "u1"): 0.768,
    ("u1", "u2"): 0.930,
}
U2_SLOPE_SHEAR = (-0.78, 0.38)
U2_DISPERSION = (-1.98, 5.23)

# Applying 1 - C d/dx(h^2 d/dx) to the drag terms adds C * (-drag) to the
# dispersion coefficients: (-3.84 + 19.3C), (2.52 - 6.98C), (-1.98 - 6.98C),
# (5.23 + 5.36C).
U1_DISPERSION_C = (-U1_DRAG[0], -U1_DRAG[1])
U2_DISPERSION_C = (-U2_DRAG[0], -U2_DRAG[1])

DRAG_MATRIX = np.array([U1_DRAG, U2_DRAG])
DISPERSION_MATRIX = np.array([U1_DISPERSION, U2_DISPERSION])
GRAVITY = np.array([U1_GRAVITY, U2_GRAVITY])

# -- equilibrium shear on a uniform film (h = 1) ---------------------------
EQUILIBRIUM_U1 = 0.209             # times Re tan(theta)
EQUILIBRIUM_U2 = 0.459

# -- tabulated 3x3 linearisation about the equilibrium -----------------------
# Entries are a + b*k^2 (over Re) + c*tan(theta)*Re*ik etc.; see stability.py.
MATRIX_H_ADVECTION = -0.334        # (0,0): -0.334 tan Re ik
MATRIX_MASS_FLUX = -0.5            # (0,1), (0,2): -0.5 ik
MATRIX_GRAVITY_SHEAR = (0.0259, 0.0029)          # rows 1, 2 of column 0
MATRIX_ADVECTION = ((-0.244, -0.088), (0.935, -0.526))

# -- slow-manifold lifting (one-layer -> two-layer) ------------------------
LIFT_RATIO = (0.587, 1.413)
LIFT_SLOPE = 0.0129                # Re h^2 (tan - h_x)
LIFT_D2U = 0.0468                  # h^2 u_xx
LIFT_HX_UX = 0.205                 # h h_x u_x
LIFT_U_HXX = 0.0700                # h u h_xx
LIFT_RE_U_UX = 0.00465             # Re h^2 u u_x
LIFT_RE_U2_HX = 0.0115             # Re h u^2 h_x
LIFT_RE_HX_HXX = 0.0105            # Re h^3 h_x h_xx

# rates of the lifted layer velocities, one entry per layer
RATE_GRAVITY = (0.489, 1.168)
RATE_DRAG = (-1.482, -3.526)       # u/(Re h^2)
RATE_ADVECTION = (-0.904, -2.107)  # u u_x
RATE_VISC_UXX = (2.552, 5.701)     # u_xx / Re
RATE_VISC_HX_UX = (3.077, 6.962)   # h_x u_x / (Re h)
RATE_VISC_U_HXX = (-0.650, -0.312) # u h_xx / (Re h)
RATE_RE_H3_UXX = (0.0167, -0.00819)
RATE_RE_H2_HX_HXX = (0.0438, -0.0482)
RATE_RE_H_U_HX2 = (0.0359, -0.0875)
RATE_RE_TAN_H_U_HX = (-0.0298, 0.0847)
RATE_RE_TAN_H2_UX = (-0.0184, 0.0355)

# -- one-layer slow-manifold model -----------------------------------------
ONE_LAYER_GRAVITY = 0.829
ONE_LAYER_DRAG = -2.504
ONE_LAYER_ADVECTION = -1.505
ONE_LAYER_U2_HX = -0.151

# -- gamma series of the low-order model -----------------------------------
# Coefficients of gamma^0 .. gamma^6.  The gravity series multiply
# (tan - h_x); the drag series multiply u/(Re h^2).
GAMMA_SERIES = {
    "u1_gravity": (0.75, 0.0438, 0.0365, -0.00439, 0.0000522, -0.000305, -0.0000393),
    "u2_gravity": (1.125, -0.195, 0.0740, -0.00126, -0.0003062, -0.000185, -0.0000231),
    "u1_drag_u1": (0.0, -18.0, -1.35, -0.0723, 0.0869, 0.0112, 0.00637),
    "u2_drag_u1": (0.0, 15.0, -8.29, 0.22, 0.0278, 0.0135, 0.00351),
    "u1_drag_u2": (0.0, 6.0, 1.05, -0.038, -0.022, -0.008, -0.00218),
    # gamma^2 term is 3.712; the transposed 3.17 does not reproduce
    # GAMMA_PARTIAL_SUMS.
    "u2_drag_u2": (0.0, -9.0, 3.712, -0.0456, -0.0173, -0.00559, -0.00146),
}

# Partial sums at gamma = 1, rows gamma^0 .. gamma^6.  Columns: h_x in the u1
# equation, h_x in the u2 equation, then drag coefficients (u1 in u1-eq,
# u1 in u2-eq, u2 in u1-eq, u2 in u2-eq).
GAMMA_SUM_COLUMNS = (
    "u1_gravity", "u2_gravity", "u1_drag_u1", "u2_drag_u1", "u1_drag_u2", "u2_drag_u2",
)
GAMMA_PARTIAL_SUMS = (
    (-0.75, -1.125, 0.0, 0.0, 0.0, 0.0),
    (-0.7938, -0.930, -18.0, 15.0, 6.0, -9.0),
    (-0.8302, -1.004, -19.35, 6.712, 7.050, -5.288),
    (-0.8258, -1.002, -19.42, 6.933, 7.012, -5.333),
    (-0.8259, -1.002, -19.34, 6.960, 6.990, -5.350),
    (-0.8256, -1.002, -19.32, 6.974, 6.982, -5.356),
    (-0.8255, -1.002, -19.32, 6.977, 6.980, -5.357),
)

# Model coefficients the converged (gamma^6) row must round to.  Gravity
# columns carry the sign of the h_x term.
GAMMA_SUM_TARGETS = (
    -U1_GRAVITY, -U2_GRAVITY, U1_DRAG[0], U2_DRAG[0], U1_DRAG[1], U2_DRAG[1],
)


def round_like(value, template):
    """Round ``value`` half-up to the number of decimals shown in ``template``.

    ``template`` is the tabulated coefficient as a float; its ``repr`` decides the
    precision, so ``round_like(-0.8255, 0.826)`` gives ``-0.826``.
    """
    text = repr(float(template))
    decimals = len(text.split(".")[1]) if "." in text else 0
    quantum = Decimal(1).scaleb(-decimals)
    return float(Decimal(repr(float(value))).quantize(quantum, rounding=ROUND_HALF_UP))
