import sympy

SEED = 20240917

# rows of the census table up to 8 pi
TABLE1_ROWS = 17
TABLE1_ROWS_4PI = 3

O112_THETA = sympy.Integer(-2)
O14_THETA = sympy.Integer(-4)

# tolerances of the numeric checks
LIFT_TOL = 1e-8
MONODROMY_TOL = 1e-6
