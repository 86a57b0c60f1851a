"""
Incompatibility measures
========================

Robustness and weight of incompatibility for channel and POVM pairs, the
diamond distance, and the bisection search that checks the robustness
value straight from its definition.
"""

import numpy as np

from incompat import linalg as la
from incompat.measures import (diamond_distance, l1_povm_error, robustness_of_measurement, roi_bisection_oracle,
                               roi_channel_channel, roi_channel_povm, roi_povm_povm, woi_channel_channel)
from incompat.objects import Povm, depolarizing_channel, example_unbiased_qubit_povm, identity_channel

sx = Povm(2, ((np.eye(2) + la.PAULI_X) / 2, (np.eye(2) - la.PAULI_X) / 2))
sz = Povm(2, ((np.eye(2) + la.PAULI_Z) / 2, (np.eye(2) - la.PAULI_Z) / 2))

# sharp sigma_x and sigma_z: primal and dual programs agree
r = roi_povm_povm(sx, sz)
print("R(sx, sz) =", r.value, "gap", abs(r.primal_value - r.dual_value), "(sqrt2 - 1)^2 =", (np.sqrt(2) - 1) ** 2)

# the identity channel against itself (no-cloning) and its weight
print("R(id, id) =", roi_channel_channel(identity_channel(2), identity_channel(2)).value)
print("W(id, id) =", woi_channel_channel(identity_channel(2), identity_channel(2)).value)

# identity channel against Z(eta), next to its closed form
for eta in (0.25, 0.5, 1.0):
    z = example_unbiased_qubit_povm(eta)
    v = roi_channel_povm(identity_channel(2), z).value
    print(f"eta={eta}: R(id, Z) = {v:.9f}  closed form {(np.sqrt(1 + eta) - 1) ** 2:.9f}  rom {robustness_of_measurement(z)}")

# the bisection oracle uses only feasibility probes
print("bisection R(sx, sz) =", roi_bisection_oracle(sx, sz).value)

# diamond distance and the effect-wise l1 error
print("||id - depol|| =", diamond_distance(identity_channel(2), depolarizing_channel(2)).value)
print("eps(Z(1), Z(0.5)) =", l1_povm_error(example_unbiased_qubit_povm(1.0), example_unbiased_qubit_povm(0.5)))
