"""Frozen reference values from independent computations.

Each constant was produced once, outside the package, by the method noted
next to it, and is not recomputed by the tests.
"""

import math

# gamma = 0.3 sin(2 pi s), L = 1: scipy.integrate.quad (epsrel 1e-15) of
# cos/sin of the closed-form turning angle 0.3 (1 - cos 2 pi t) / (2 pi)
K1_SINE03 = 0.9982911521862666
K2_SINE03 = -0.047701145488830976

# gamma = 0.2 sin(2 pi s) + 0.15 cos(6 pi s): 1e5-point scan of |gamma^(d)|
# followed by bounded scalar maximization around the best sample
SUP_TWO_HARMONIC = (0.32649248837612477, 3.9231535147482117, 60.14974462281989)

# -d^2/ds^2 - gamma^2/4, gamma = 0.5 sin(2 pi s), L = 1, theta = 0: periodic
# second-order FD on 4096 and 8192 points, sparse shift-invert, Richardson
HILL_SINE05_THETA0 = (-0.031253092178358699, 39.431541831409881, 39.462791831063477, 157.88241990192446)

# -d^2/dx^2 + 2 alpha cos(2 x), antiperiodic on (0, pi), alpha = 0.5:
# antiperiodic FD (4096 / 8192 points, Richardson) and scipy.special
# mathieu_a(1, q), mathieu_b(1, q) agree to 3e-11
MATHIEU_NU_ALPHA05 = (0.47065435490478386, 1.4667668425231053)

# V_+ and V_- for gamma = 0.5 sin(2 pi s), a = 0.1, hand evaluation of the
# closed-form expressions with gamma_+ = 0.5, gamma'_+ = pi, gamma''_+ = 2 pi^2
V_PLUS_MINUS_SINE05_A01 = {
    0.0: (1.0496452295724095, -1.3026081421930231),
    0.25: (0.9929558871687814, -1.37186021975535),
}

# Poschl-Teller: -c^2 sech^2(s) / 4 = -l(l+1) sech^2(s), c = 0.8
PT_LAMBDA = (-1.0 + math.sqrt(1.64)) / 2.0
PT_MU1 = -0.01968757625671514
