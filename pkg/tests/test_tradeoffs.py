import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from incompat import linalg as la
from incompat.errors import DomainError, PreconditionError, ShapeError
from incompat.measures import roi_channel_povm
from incompat.objects import (Povm, depolarizing_channel, example_sixfold_povm, example_unbiased_qubit_povm,
                              identity_channel, lueders_channel, product_joint_channel, sample_k_channel,
                              sample_random_channel, sample_random_joint_channel, sample_random_povm,
                              smeared_joint_povm, trivial_povm, unitary_channel)
from incompat.tradeoffs import (INEQUALITIES, disturbance_program, disturbance_program_compact, hm_bound,
                                k_channel_margin, minimize_disturbance, prop3_bound, recovered_distance,
                                verify_corollary, verify_hm_dominance, verify_lipschitz, verify_prop3,
                                verify_theorem1, verify_theorem2, verify_theorem4)


def sharp(pauli):
    return Povm(2, ((np.eye(2) + pauli) / 2, (np.eye(2) - pauli) / 2))


def test_report_fields():
    r = verify_hm_dominance(example_unbiased_qubit_povm(0.5))
    assert r.inequality_id in INEQUALITIES
    assert abs(r.slack - (r.rhs - r.lhs)) < 1e-15
    assert set(r.as_dict()) == {"inequality", "lhs", "rhs", "slack", "pass", "instance"}


def test_theorem1_random_instances():
    for seed in range(5):
        a = sample_random_channel(2, 2, seed)
        b = sample_random_channel(2, 2, seed + 10)
        j = sample_random_joint_channel(2, 2, 2, seed + 20)
        r = verify_theorem1(a, b, j)
        assert r.passed and r.lhs >= 0


def test_theorem1_tight_for_product_joint():
    a = sample_random_channel(2, 2, 1)
    sigma = np.diag([0.7, 0.3])
    r = verify_theorem1(a, depolarizing_channel(2), product_joint_channel(a, sigma))
    assert abs(r.instance["error1"]) < 1e-7
    assert r.lhs < 1e-6
    with pytest.raises(ShapeError):
        verify_theorem1(a, a, sample_random_joint_channel(3, 2, 2, 0))


def test_lipschitz():
    a, b = identity_channel(2), identity_channel(2)
    r = verify_lipschitz(a, b, a, b)
    assert r.lhs == 0.0 and r.passed
    for seed in range(3):
        c = sample_random_channel(2, 2, seed)
        d = sample_random_channel(2, 2, seed + 5)
        assert verify_lipschitz(a, b, c, d).passed


def test_theorem2_smeared_joint():
    r = verify_theorem2(sharp(la.PAULI_X), sharp(la.PAULI_Z), smeared_joint_povm())
    assert abs(r.lhs - 2 * (np.sqrt(2) - 1) ** 2) < 1e-6
    assert abs(r.rhs - (2 - np.sqrt(2))) < 1e-12
    assert r.passed


def test_theorem2_named_labels_and_grid_mismatch():
    e, f = sharp(la.PAULI_X), sharp(la.PAULI_Z)
    g = smeared_joint_povm()
    named = Povm(2, g.effects[::-1], labels=("1,1", "1,0", "0,1", "0,0"))
    assert abs(verify_theorem2(e, f, named).rhs - verify_theorem2(e, f, g).rhs) < 1e-12
    with pytest.raises(ShapeError):
        verify_theorem2(e, f, sample_random_povm(2, 3, 0))


def test_analytic_bounds():
    for eta in (0.0, 0.25, 1.0):
        z = example_unbiased_qubit_povm(eta)
        assert abs(prop3_bound(z) - (np.sqrt(1 + eta) - 1) ** 2) < 1e-12
        assert abs(hm_bound(z) - eta ** 2 / 16) < 1e-12
    for p in (0.0, 0.4, 1.0):
        s = example_sixfold_povm(p)
        assert abs(2 * prop3_bound(s) - 2 * (np.sqrt(2 - p) - 1) ** 2) < 1e-12
        assert abs(hm_bound(s) - (1 - p) ** 2 / 144) < 1e-12
    with pytest.raises(DomainError):
        prop3_bound(trivial_povm(1))
    with pytest.raises(DomainError):
        verify_hm_dominance(sample_random_povm(7, 2, 0))


def test_analytic_bounds_monotone():
    etas = np.linspace(0, 1, 21)
    p3 = [prop3_bound(example_unbiased_qubit_povm(x)) for x in etas]
    hm = [hm_bound(example_unbiased_qubit_povm(x)) for x in etas]
    assert np.all(np.diff(p3) > 0) and np.all(np.diff(hm) > 0)
    ps = np.linspace(0, 1, 11)
    assert np.all(np.diff([prop3_bound(example_sixfold_povm(p)) for p in ps]) < 0)


def test_prop3_examples():
    for eta in (0.2, 1.0):
        r = verify_prop3(example_unbiased_qubit_povm(eta))
        assert abs(r.slack) < 1e-6
    r = verify_prop3(sample_random_povm(3, 3, 2))
    assert r.passed


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(1, 6), st.integers(0, 2**31))
def test_hm_dominance_property(d, n, seed):
    assert verify_hm_dominance(sample_random_povm(d, n, seed)).slack >= -1e-9


def test_disturbance_examples():
    assert minimize_disturbance(identity_channel(2)).recovered_distance < 1e-6
    u = unitary_channel(np.array([[1, 1j], [1j, 1]]) / np.sqrt(2))
    assert minimize_disturbance(u).recovered_distance < 1e-6
    assert abs(minimize_disturbance(depolarizing_channel(2)).recovered_distance - 1.5) < 1e-6
    for eta in (0.5, 1.0):
        z = example_unbiased_qubit_povm(eta)
        res = minimize_disturbance(lueders_channel(z))
        assert abs(res.recovered_distance - res.lower_check) < 1e-6
        assert res.recovered_distance >= 2 * (np.sqrt(1 + eta) - 1) ** 2 - 1e-6
    assert abs(minimize_disturbance(lueders_channel(example_unbiased_qubit_povm(1.0))).recovered_distance - 1) < 1e-6


def test_disturbance_attained_by_recovery():
    lam = sample_random_channel(2, 3, 4)
    res = minimize_disturbance(lam)
    assert res.best_recovery.dim_in == 3 and res.best_recovery.dim_out == 2
    attained = recovered_distance(lam, res.best_recovery)
    assert abs(attained - res.recovered_distance) < 1e-6
    for seed in range(3):
        other = sample_random_channel(3, 2, seed)
        assert recovered_distance(lam, other) >= res.recovered_distance - 1e-6
    with pytest.raises(ShapeError):
        recovered_distance(lam, sample_random_channel(2, 2, 0))


def test_disturbance_programs_have_expected_sizes():
    lam = sample_random_channel(2, 2, 0)
    assert [b.name for b in disturbance_program(lam).blocks] == ["R", "M", "T0", "T1", "t0", "t1"]
    assert [b.name for b in disturbance_program_compact(lam).blocks] == ["R", "Z", "S", "T", "t"]


def test_k_channel_margin():
    k = sample_random_povm(2, 3, 1)
    assert k_channel_margin(sample_k_channel(k, seed=2), k) > -1e-7
    assert k_channel_margin(identity_channel(2), sharp(la.PAULI_Z)) < -1e-3


def test_theorem4_and_corollary():
    e = example_unbiased_qubit_povm(0.5)
    k = sample_random_povm(2, 2, 3)
    r = verify_theorem4(e, k, sample_k_channel(k, seed=1))
    assert r.passed
    assert r.instance["k_margin"] > -1e-7
    c = verify_corollary(e, lueders_channel(e))
    assert c.passed and abs(c.lhs - 2 * (np.sqrt(1.5) - 1) ** 2) < 1e-12
    with pytest.raises(PreconditionError):
        verify_theorem4(e, sharp(la.PAULI_Z), identity_channel(2))
    with pytest.raises(PreconditionError):
        verify_corollary(e, identity_channel(2))


def test_corollary_floor_below_robustness_bound():
    z = example_unbiased_qubit_povm(0.75)
    r = roi_channel_povm(identity_channel(2), z).value
    assert prop3_bound(z) <= r + 1e-6
