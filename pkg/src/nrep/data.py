"""Embedded case-study datasets.

Constants used by the demos and tests; kept here so nothing depends on
network access or external files.
"""

from __future__ import annotations

from fractions import Fraction

# Ground-state natural occupation numbers of the beryllium atom from a
# 10-spin-orbital treatment (N = 4).  The first orbital is completely
# filled and the last two are empty, so the physics lives in a (3, 7)
# reduced system.
BERYLLIUM_N = 4
BERYLLIUM_R = 10
BERYLLIUM_OCCUPATIONS = (
    1.000000,
    0.999995,
    0.999287,
    0.999284,
    0.000711,
    0.000707,
    0.000009,
    0.000007,
    0.000000,
    0.000000,
)

# Experimental iron d-shell data point: t2g occupation n_t and the
# saturation magnetic moment in Bohr magnetons.
IRON_POINT = (1.458, 2.22)

# Spin natural occupation numbers recovered for the iron d-shell.
IRON_SPIN_OCCUPATIONS = (0.69, 0.23, 0.08, 0.0)

# Magnetic-moment weights: mu = 3*mu1 + mu2 - mu3 - 3*mu4 for the d7
# S = 3/2 sector, mu = mu1 - mu2 for the d3 low-spin case.  Electron
# gyromagnetic factor fixed at g = 2 throughout.
D7_SPIN_WEIGHTS = (3, 1, -1, -3)
D3_SPIN_WEIGHTS = (1, -1)
GYROMAGNETIC_G = 2

# Pullbacks of the d7 boundary vertices to full occupation data:
# five orbital occupations followed by four spin occupations.
PULLBACK_A_ORBITAL = (Fraction(7, 5),) * 5
PULLBACK_A_SPIN = (Fraction(3, 5), Fraction(1, 5), Fraction(1, 5), Fraction(0))
PULLBACK_B_ORBITAL = (Fraction(3, 2), Fraction(3, 2), Fraction(3, 2), Fraction(5, 4), Fraction(5, 4))
PULLBACK_B_SPIN = (Fraction(3, 4), Fraction(1, 4), Fraction(0), Fraction(0))
