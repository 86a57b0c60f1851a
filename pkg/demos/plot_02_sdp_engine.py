"""
The interior-point SDP engine
=============================

State a small semidefinite program in block form, solve it natively over
complex Hermitian matrices, and confirm the value through the real
symmetric embedding.
"""

import numpy as np

from incompat.sdp import (Block, Family, Identity, PartialTrace, SdpProblem, Settings, Space, feasibility_probe,
                          solve_sdp, solve_via_realification)

# minimum eigenvalue of a Hermitian matrix as min Tr[C X] with Tr X = 1, X >= 0
c = np.array([[2.0, 1 - 1j, 0], [1 + 1j, 1.0, 0.5j], [0, -0.5j, 3.0]])
prob = SdpProblem([Block("X", 3)], [Family("trace", Space("sym", 1), {"X": PartialTrace((3,), ())}, np.ones((1, 1)))],
                  {"X": c}, sense="min")
sol = solve_sdp(prob)
print(sol.status, "value", sol.primal_value, "dual", sol.dual_value, "iterations", sol.iterations)
print("numpy min eigenvalue", np.linalg.eigvalsh(c)[0])

# the same program through the real embedding, at tight tolerances
tight = Settings(gap_tol=1e-11, res_tol=1e-11)
print("native vs realified:", solve_sdp(prob, tight).primal_value - solve_via_realification(prob, tight).primal_value)

# feasibility probe: how far inside the cone X + S = I reaches (X = S = I/2)
fam = Family("lmi", Space("herm", 2), {"X": Identity(2), "S": Identity(2)}, np.eye(2))
res = feasibility_probe(SdpProblem([Block("X", 2), Block("S", 2)], [fam]))
print("probe:", res.status, "margin", round(res.margin, 8))
