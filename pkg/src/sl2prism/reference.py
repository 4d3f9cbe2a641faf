"""Published reference values for the trigonal and 4-gonal tilings.

``TABLE_X3`` is the x3 table exactly as printed.  Two rows carry
transposed digits: the printed coordinates of the rotated vertex and the
fibre midpoint for (3, 7) only reproduce with 0.30074262, and the closed
form gives 0.52893551 for (3, 10).  ``TABLE_X3_CORRECTED`` holds the
values the construction actually produces.
"""
import math

TABLE_X3 = {
    (3, 7): 0.30007426,
    (3, 8): 0.40561640,
    (3, 9): 0.47611091,
    (3, 10): 0.50289355,
    (3, 50): 0.89636657,
    (3, 1000): 0.99457331,
}

TABLE_X3_CORRECTED = {
    **TABLE_X3,
    (3, 7): 0.30074262,
    (3, 10): 0.52893551,
}

X3_P4_Q6 = (math.sqrt(6) - math.sqrt(2)) / 2

# (3, 7): image of A_3 under r_1 (it lands on f_2) and the fibre midpoint
# between it and A_2.  Rotating both by one vertex step gives r_2(A_1) and
# the midpoint on f_3.
ROTATED_VERTEX_3_7 = (1.0, 0.15072575, 0.23778592, -0.18962794)
MIDPOINT_3_7 = (1.0, 0.07493964, 0.24918198, -0.16988939)
