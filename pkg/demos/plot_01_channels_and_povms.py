"""
Channels, POVMs and Choi matrices
=================================

Build devices, move between Kraus and Choi form, and check that the
measurement channel of a POVM reproduces the Born rule.
"""

import numpy as np

from incompat import linalg as la
from incompat.objects import (apply_via_choi, choi_from_kraus, example_unbiased_qubit_povm, identity_channel,
                              kraus_from_choi, lueders_channel, measurement_channel_choi, sample_random_channel)

# Choi matrices are stored output-first, so Tr_out C = I for a channel
ident = identity_channel(2)
print("Tr_out C(id) =\n", la.partial_trace(ident.choi, (2, 2), "left").real)

# a random qubit-to-qutrit channel survives the Kraus round trip
ch = sample_random_channel(2, 3, seed=1)
back = choi_from_kraus(kraus_from_choi(ch), 2, 3)
print("Kraus round trip error:", np.abs(back.choi - ch.choi).max())

# the unbiased qubit POVM Z(eta) and its measurement channel
z = example_unbiased_qubit_povm(0.6)
rho = np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]])
out = apply_via_choi(measurement_channel_choi(z), rho)
print("outcome distribution:", np.diag(out).real)
print("Born rule:           ", np.array([np.trace(m @ rho).real for m in z.effects]))

# the Lueders channel keeps the diagonal and shrinks coherences
print("Lueders output:\n", np.round(apply_via_choi(lueders_channel(z), rho), 4))
