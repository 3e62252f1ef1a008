"""
Rebuilding an oriented basis one subspace at a time
===================================================

The angle matrix is all that is needed to rebuild ``Vor``.  Multiplying the
subspace rotations in order fixes one more column at each step.
"""

import numpy as np

from eigenorient import generate_oriented_eigenvectors
from eigenorient.walkthrough import walkthrough_r4

np.set_printoptions(precision=3, suppress=True)

tr = walkthrough_r4()
print("theta (deg):")
print(np.degrees(tr.theta))

for st in tr.stages:
    print(st.label)
    print(st.matrix)

# R_4 is the identity, so the last two partial products agree
print(np.allclose(tr["R₁ R₂ R₃"], tr["R₁ R₂ R₃ R₄"]))
print(np.allclose(generate_oriented_eigenvectors(tr.theta), tr["Vor"]))
