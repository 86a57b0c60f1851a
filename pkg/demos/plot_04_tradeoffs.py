"""
Tradeoff inequalities and disturbance
=====================================

Evaluate both sides of the error and disturbance tradeoffs on concrete
instances, and compute the disturbance of a Lueders channel together with
its optimal recovery map.
"""

import numpy as np

from incompat import linalg as la
from incompat.objects import (Povm, example_unbiased_qubit_povm, lueders_channel, sample_k_channel,
                              sample_random_channel, sample_random_joint_channel, sample_random_povm,
                              smeared_joint_povm)
from incompat.tradeoffs import (minimize_disturbance, recovered_distance, verify_corollary, verify_hm_dominance,
                                verify_prop3, verify_theorem1, verify_theorem2, verify_theorem4)


def show(rep):
    print(f"{rep.inequality_id:12s} lhs {rep.lhs:.6f}  rhs {rep.rhs:.6f}  slack {rep.slack:+.6f}  pass {rep.passed}")


# channel pair against an arbitrary joint channel
show(verify_theorem1(sample_random_channel(2, 2, 1), sample_random_channel(2, 2, 2),
                     sample_random_joint_channel(2, 2, 2, 3)))

# sharp x and z against the smeared joint POVM
sx = Povm(2, ((np.eye(2) + la.PAULI_X) / 2, (np.eye(2) - la.PAULI_X) / 2))
sz = Povm(2, ((np.eye(2) + la.PAULI_Z) / 2, (np.eye(2) - la.PAULI_Z) / 2))
show(verify_theorem2(sx, sz, smeared_joint_povm()))

z = example_unbiased_qubit_povm(0.5)
show(verify_prop3(z))
show(verify_hm_dominance(z))

# disturbance of the Lueders channel, attained by the returned recovery
res = minimize_disturbance(lueders_channel(z))
print("delta =", res.recovered_distance, "compact form", res.lower_check)
print("recovery check:", recovered_distance(lueders_channel(z), res.best_recovery))
show(verify_corollary(z, lueders_channel(z)))

# a K-channel built from a random K-instrument
k = sample_random_povm(2, 3, seed=4)
show(verify_theorem4(sample_random_povm(2, 3, seed=5), k, sample_k_channel(k, seed=6)))
