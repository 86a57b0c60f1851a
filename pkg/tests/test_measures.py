import numpy as np
import pytest

from incompat import linalg as la
from incompat.errors import ShapeError
from incompat.measures import (diamond_distance, l1_povm_error, robustness_of_measurement, roi_bisection_oracle,
                               roi_channel_channel, roi_channel_povm, roi_povm_povm, woi_channel_channel)
from incompat.objects import (Povm, constant_channel, depolarizing_channel, example_sixfold_povm,
                              example_unbiased_qubit_povm, identity_channel, measurement_channel_choi,
                              sample_random_channel, sample_random_povm, trivial_povm, unitary_channel)


def sharp(pauli):
    return Povm(2, ((np.eye(2) + pauli) / 2, (np.eye(2) - pauli) / 2))


def diamond_bounds(a, b):
    """Independent bracket: max-entangled input from below, ||Tr_out |Delta| || from above."""
    delta = a.choi - b.choi
    lower = la.trace_norm(delta) / a.dim_in
    w, v = np.linalg.eigh(la.hermitian_part(delta))
    absd = (v * np.abs(w)) @ v.conj().T
    upper = la.operator_norm(la.partial_trace(absd, (a.dim_out, a.dim_in), "left"))
    return lower, upper


def test_diamond_spot_values():
    assert diamond_distance(identity_channel(2), identity_channel(2)).value == 0.0
    r = diamond_distance(identity_channel(2), depolarizing_channel(2))
    lower, _ = diamond_bounds(identity_channel(2), depolarizing_channel(2))
    assert abs(lower - 1.5) < 1e-12
    assert abs(r.value - 1.5) < 1e-6
    assert abs(r.primal_value - r.dual_value) < 1e-6
    u = la.PAULI_X
    assert abs(diamond_distance(identity_channel(2), unitary_channel(u)).value - 2) < 1e-6
    with pytest.raises(ShapeError):
        diamond_distance(identity_channel(2), identity_channel(3))


def test_diamond_within_independent_bracket():
    for seed in range(10):
        a = sample_random_channel(2, 3, seed)
        b = sample_random_channel(2, 3, seed + 100)
        lower, upper = diamond_bounds(a, b)
        v = diamond_distance(a, b).value
        assert lower - 1e-7 <= v <= upper + 1e-7


def test_diamond_metric_properties():
    for seed in range(10):
        a, b, c = (sample_random_channel(2, 2, 3 * seed + k) for k in range(3))
        ab = diamond_distance(a, b).value
        assert ab == diamond_distance(b, a).value
        assert diamond_distance(a, a).value < 1e-7
        assert ab <= diamond_distance(a, c).value + diamond_distance(c, b).value + 1e-8
        assert 0 <= ab <= 2


def test_measurement_channel_distance_bounded_by_l1_error():
    for seed in range(10):
        e = sample_random_povm(2, 3, seed)
        g = sample_random_povm(2, 3, seed + 50)
        d = diamond_distance(measurement_channel_choi(e), measurement_channel_choi(g)).value
        assert d <= l1_povm_error(e, g) + 1e-8


def test_roi_unbiased_family():
    for eta in (0.0, 0.3, 0.6, 1.0):
        r = roi_channel_povm(identity_channel(2), example_unbiased_qubit_povm(eta))
        assert abs(r.value - (np.sqrt(1 + eta) - 1) ** 2) < 1e-6
        assert abs(r.primal_value - r.checks["measurement_channel_value"]) < 1e-6


def test_roi_faithfulness():
    e = sample_random_povm(2, 3, 5)
    gamma = measurement_channel_choi(e)
    assert roi_channel_channel(gamma, gamma).value <= 1e-7
    assert roi_povm_povm(e, trivial_povm(2)).value <= 1e-7
    assert roi_channel_povm(sample_random_channel(2, 2, 1), trivial_povm(2, 3)).value <= 1e-7
    lam = sample_random_channel(2, 3, 2)
    assert roi_channel_channel(lam, constant_channel(2, np.eye(2) / 2)).value <= 1e-7


def test_roi_incompatible_pairs():
    r = roi_channel_channel(identity_channel(2), identity_channel(2))
    assert abs(r.value - 1 / 3) < 1e-6
    r = roi_povm_povm(sharp(la.PAULI_X), sharp(la.PAULI_Z))
    assert abs(r.value - (np.sqrt(2) - 1) ** 2) < 1e-6


def test_roi_symmetric_in_arguments():
    for seed in range(3):
        a = sample_random_channel(2, 2, seed)
        b = sample_random_channel(2, 3, seed + 10)
        assert abs(roi_channel_channel(a, b).value - roi_channel_channel(b, a).value) < 1e-7
        e, f = sample_random_povm(2, 2, seed), sample_random_povm(2, 3, seed + 10)
        assert abs(roi_povm_povm(e, f).value - roi_povm_povm(f, e).value) < 1e-7


def test_roi_flavors_reduce_to_channel_channel():
    a = sample_random_channel(2, 2, 7)
    e, f = sample_random_povm(2, 3, 8), sharp(la.PAULI_Y)
    cc = roi_channel_channel(a, measurement_channel_choi(e)).value
    assert abs(roi_channel_povm(a, e, cross_check=False).value - cc) < 1e-6
    cc = roi_channel_channel(measurement_channel_choi(e), measurement_channel_choi(f)).value
    assert abs(roi_povm_povm(e, f, cross_check=False).value - cc) < 1e-6


def test_roi_unitary_invariance():
    u = unitary_channel(np.array([[1, 1], [1, -1]]) / np.sqrt(2))
    z = example_unbiased_qubit_povm(0.8)
    v = roi_channel_povm(identity_channel(2), z).value
    assert abs(roi_channel_channel(u, measurement_channel_choi(z)).value - v) < 1e-6


def test_bisection_oracle_agrees():
    pairs = [(identity_channel(2), example_unbiased_qubit_povm(0.5)),
             (sharp(la.PAULI_X), sharp(la.PAULI_Z)),
             (identity_channel(2), identity_channel(2)),
             (sample_random_channel(2, 2, 3), sharp(la.PAULI_Z))]
    for a, b in pairs:
        if isinstance(a, Povm):
            ipm = roi_povm_povm(a, b, cross_check=False).value
        elif isinstance(b, Povm):
            ipm = roi_channel_povm(a, b, cross_check=False).value
        else:
            ipm = roi_channel_channel(a, b).value
        assert abs(roi_bisection_oracle(a, b).value - ipm) < 1e-5
    assert roi_bisection_oracle(sample_random_povm(2, 2, 1), trivial_povm(2)).value == 0.0


def test_woi():
    w = woi_channel_channel(identity_channel(2), identity_channel(2))
    assert abs(w.value - 1) < 1e-6
    a = sample_random_channel(2, 2, 4)
    assert woi_channel_channel(a, constant_channel(2, np.eye(2) / 2)).value < 1e-7
    for seed in range(3):
        a, b = sample_random_channel(2, 2, seed), sample_random_channel(2, 2, seed + 20)
        w = woi_channel_channel(a, b)
        assert -1e-9 <= w.value <= 1
        assert abs(w.primal_value - w.dual_value) < 1e-6


def test_robustness_of_measurement():
    for eta in np.linspace(0, 1, 11):
        assert abs(robustness_of_measurement(example_unbiased_qubit_povm(eta)) - eta) < 1e-12
    for p in (0.0, 0.5, 1.0):
        assert abs(robustness_of_measurement(example_sixfold_povm(p)) - (1 - p)) < 1e-12
    assert robustness_of_measurement(trivial_povm(3, 4)) == 0.0


def test_l1_error():
    z1, z0 = example_unbiased_qubit_povm(1.0), example_unbiased_qubit_povm(0.0)
    assert abs(l1_povm_error(z1, z0) - 1.0) < 1e-14
    assert l1_povm_error(z1, z1) == 0.0
    e = Povm(2, (np.eye(2) / 2, np.eye(2) / 2), labels=("a", "b"))
    g = Povm(2, (np.eye(2) / 2, np.eye(2) / 2), labels=("a", "c"))
    assert abs(l1_povm_error(e, g) - 1.0) < 1e-14
    with pytest.raises(ShapeError):
        l1_povm_error(z1, trivial_povm(3))
