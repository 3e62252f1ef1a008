"""
Orienting a left-handed basis in R^3
====================================

Walks through every reflect and rotate stage for a basis whose second
eigenvector points the wrong way.
"""

import numpy as np

from eigenorient import orient_eigenvectors
from eigenorient.walkthrough import left_handed_r3, walkthrough_r3

np.set_printoptions(precision=3, suppress=True)

V = left_handed_r3()
print("det(V) =", round(np.linalg.det(V), 6))

# each stage of R^T V S = I, printed as markdown
tr = walkthrough_r3(V)
print(tr.to_markdown())

# the library call agrees with the staged products
oe = orient_eigenvectors(V, [3.0, 2.0, 1.0])
print("signs:", oe.signs)
print("Vor == R1 R2 R3:", np.allclose(oe.Vor, tr["R₁ R₂ R₃"]))

# a basis built from qr, with its second column negated
A = np.eye(3)
A[:, 0] = 1 / np.sqrt(3)
Q, _ = np.linalg.qr(A)
Vin = Q @ np.diag([1.0, -1.0, 1.0])
oe = orient_eigenvectors(Vin, np.diag([2.0, 1.0, 0.0]))
print("signs:", oe.signs)
print("theta (deg):")
print(np.degrees(oe.theta))
