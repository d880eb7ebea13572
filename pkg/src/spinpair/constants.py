"""Physical constants used across the package, collected in one place.

Values are SI. h and k are the exact 2019 SI definitions; the proton
gyromagnetic ratio and the H2 rotational constant are conventional
literature values, precise far beyond anything this package resolves.
"""

# Planck constant, J s (exact by SI definition)
PLANCK_H = 6.62607015e-34

# Boltzmann constant, J/K (exact by SI definition)
BOLTZMANN_K = 1.380649e-23

# 1H gyromagnetic ratio / 2pi, Hz/T (CODATA, rounded)
GAMMA_1H_HZ_PER_T = 42.5775e6

# H2 rotational constant expressed as a temperature, K (B_rot/k)
H2_ROT_THETA_K = 87.6
