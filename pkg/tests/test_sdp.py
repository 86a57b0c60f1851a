import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from incompat.errors import NotHermitian, ShapeError
from incompat.measures import compatibility_system, diamond_max_form, roi_cp_primal, woi_dual
from incompat.objects import (diagonal_joint_povm, example_unbiased_qubit_povm, identity_channel, pauli_povm,
                              sample_random_channel, sample_random_povm, trivial_povm)
from incompat.sdp import (Block, Compose, Dense, Embed, Family, Identity, LinkWith, Outer, PartialTrace, SdpProblem,
                          Settings, Space, SubBlock, check_solution, feasibility_probe, realify, realify_matrix,
                          solve_sdp, solve_via_realification)
from incompat.sdp.solver import _kernel


def rand_herm(rng, n, real=False):
    a = rng.standard_normal((n, n))
    if not real:
        a = a + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2


def min_eig_problem(c, scale=1.0):
    """min Tr[C X] s.t. Tr X = 1: value is the smallest eigenvalue of C."""
    n = c.shape[0]
    real = np.isrealobj(c)
    fam = Family("trace", Space("sym", 1), {"X": PartialTrace((n,), (), scale)}, scale * np.ones((1, 1)))
    return SdpProblem([Block("X", n, complex=not real)], [fam], {"X": c})


@pytest.mark.parametrize("kind", ["herm", "sym"])
def test_schur_kernel_matches_explicit_basis(kind):
    rng = np.random.default_rng(0)
    n = 4
    g = rng.standard_normal((n, n)) + (1j * rng.standard_normal((n, n)) if kind == "herm" else 0)
    w = g @ g.conj().T + np.eye(n)
    space = Space(kind, n)
    basis = space.basis()
    expect = np.real(np.einsum("aij,jk,bkl,li->ab", basis, w, basis, w))
    assert np.abs(_kernel(w, space) - expect).max() < 1e-12


def test_space_coordinates_are_orthonormal():
    for kind in ("herm", "sym"):
        sp = Space(kind, 3)
        b = sp.basis()
        gram = np.real(np.einsum("aij,bij->ab", b.conj(), b))
        assert np.abs(gram - np.eye(sp.dim)).max() < 1e-14
        rng = np.random.default_rng(1)
        h = rand_herm(rng, 3, real=(kind == "sym"))
        assert np.abs(sp.value(sp.coords(h)) - h).max() < 1e-14


def _maps():
    rng = np.random.default_rng(2)
    f = rand_herm(rng, 6)
    return [
        (Identity(4, 2.0), 4, 4),
        (PartialTrace((2, 3), (1,)), 6, 3),
        (PartialTrace((2, 3, 2), (0, 2), 0.5), 12, 4),
        (Embed((2, 3), (0,)), 2, 6),
        (SubBlock(3, "00"), 6, 3),
        (SubBlock(3, "11"), 6, 3),
        (SubBlock(3, "herm"), 6, 3),
        (SubBlock(3, "antiherm"), 6, 3),
        (Compose(PartialTrace((2, 2), (1,)), SubBlock(4, "00"), -1.0), 8, 2),
        (LinkWith(f, 2, 3, 2), 6, 4),
        (Outer(rand_herm(rng, 3)), 1, 3),
    ]


@pytest.mark.parametrize("idx", range(11))
def test_map_adjoint_identity(idx):
    mp, nin, nout = _maps()[idx]
    rng = np.random.default_rng(idx)
    x = rand_herm(rng, nin)
    y = rand_herm(rng, nout)
    lhs = np.real(np.vdot(y, mp.apply(x)))
    rhs = np.real(np.vdot(mp.adjoint(y), x))
    assert abs(lhs - rhs) < 1e-11


def test_dense_map_adjoint():
    rng = np.random.default_rng(3)
    a = np.array([rand_herm(rng, 3) for _ in range(4)])
    mp = Dense(a)
    x = rand_herm(rng, 3)
    y = rng.standard_normal(4)
    assert abs(y @ mp.apply(x) - np.real(np.vdot(mp.adjoint(y), x))) < 1e-12


def test_max_trace_under_unit_diagonal_bounds():
    # maximize Tr X with X_ii <= 1 written as X_ii + s_i = 1
    coeffs = np.array([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    fam = Family("diag", Space("vec", 2), {"X": Dense(coeffs), "s": Dense(coeffs)}, np.ones(2))
    p = SdpProblem([Block("X", 2), Block("s", 2, complex=False)], [fam], {"X": np.eye(2)}, sense="max")
    sol = solve_sdp(p)
    assert sol.status == "Optimal"
    assert abs(sol.primal_value - 2) < 1e-7
    assert abs(sol.dual_value - 2) < 1e-7


def test_max_trace_below_identity():
    fam = Family("lmi", Space("herm", 2), {"X": Identity(2), "S": Identity(2)}, np.eye(2))
    sol = solve_sdp(SdpProblem([Block("X", 2), Block("S", 2)], [fam], {"X": np.eye(2)}, sense="max"))
    assert sol.optimal and abs(sol.value - 2) < 1e-7


def test_diamond_program_identical_channels():
    d = identity_channel(2)
    sol = solve_sdp(diamond_max_form(d.choi - d.choi, 2, 2))
    assert sol.optimal and abs(sol.value) < 1e-8


def test_min_eigenvalue_program_and_independent_check():
    rng = np.random.default_rng(4)
    c = rand_herm(rng, 4)
    p = min_eig_problem(c)
    sol = solve_sdp(p)
    assert sol.optimal
    lam = np.linalg.eigvalsh(c)[0]
    assert abs(sol.primal_value - lam) < 1e-7
    chk = check_solution(p, sol)
    assert chk["equality"] < 1e-9
    assert chk["primal_min_eig"] > -1e-9
    assert chk["dual_min_eig"] > -1e-9
    assert abs(chk["primal_objective"] - sol.primal_value) < 1e-10
    assert abs(chk["dual_objective"] - sol.dual_value) < 1e-10
    assert abs(sol.primal_value - sol.dual_value) <= 1e-8 * (1 + abs(sol.primal_value))


def test_optimal_status_contract():
    rng = np.random.default_rng(5)
    s = Settings()
    for seed in range(5):
        p = min_eig_problem(rand_herm(np.random.default_rng(seed), 3))
        sol = solve_sdp(p, s)
        assert sol.optimal
        assert sol.gap <= s.gap_tol * (1 + abs(sol.primal_value))
        assert sol.primal_residual <= s.res_tol and sol.dual_residual <= s.res_tol
        # weak duality at the returned iterate, up to residual-sized roundoff
        assert sol.primal_value - sol.dual_value >= -1e-8
    assert rng is not None


def test_scaling_invariance_of_argmin():
    c = np.diag([3.0, 1.0, 2.0]) + 0.1 * np.ones((3, 3))
    a = solve_sdp(min_eig_problem(c))
    b = solve_sdp(min_eig_problem(c, scale=7.3))
    assert np.abs(a.block_values["X"] - b.block_values["X"]).max() < 1e-7


def test_realify_matches_native_on_real_instance():
    rng = np.random.default_rng(6)
    c = rand_herm(rng, 3, real=True)
    p = min_eig_problem(c)
    # the default gap tolerance alone only pins each value to ~1e-8
    tight = Settings(gap_tol=1e-11, res_tol=1e-11)
    native = solve_sdp(p, tight)
    via = solve_via_realification(p, tight)
    assert native.optimal and via.optimal
    assert abs(native.primal_value - via.primal_value) < 1e-9
    assert np.abs(native.block_values["X"] - via.block_values["X"]).max() < 1e-6


def test_realify_matches_complex_program():
    rng = np.random.default_rng(7)
    c = rand_herm(rng, 3)
    p = min_eig_problem(c)
    via = solve_via_realification(p)
    assert abs(via.primal_value - np.linalg.eigvalsh(c)[0]) < 1e-7
    r = realify(p)
    assert r.value_scale == 2.0 and all(not b.complex for b in r.blocks)


def test_realify_matrix_examples():
    s = np.diag([1.0, 2.0])
    assert np.abs(realify_matrix(s) - np.kron(np.eye(2), s)).max() == 0
    sy = np.array([[0, -1j], [1j, 0]])
    assert np.abs(np.sort(np.linalg.eigvalsh(realify_matrix(sy))) - [-1, -1, 1, 1]).max() < 1e-14
    h = rand_herm(np.random.default_rng(8), 3)
    assert abs(np.trace(realify_matrix(h)) - 2 * np.trace(h).real) < 1e-12
    with pytest.raises(NotHermitian):
        realify_matrix(np.array([[0, 1], [0, 0]]))


def test_infeasible_and_unbounded_detection():
    neg = SdpProblem([Block("X", 1, complex=False)],
                     [Family("f", Space("sym", 1), {"X": Identity(1)}, -np.ones((1, 1)))])
    assert solve_sdp(neg).status == "PrimalInfeasible"
    off = Dense(np.array([[[0.0, 1.0], [1.0, 0.0]]]))
    unb = SdpProblem([Block("X", 2)], [Family("f", Space("vec", 1), {"X": off}, np.zeros(1))], {"X": -np.eye(2)})
    assert solve_sdp(unb).status == "DualInfeasible"


def test_inconsistent_equalities_are_infeasible():
    fams = [Family("a", Space("sym", 1), {"X": PartialTrace((2,), ())}, np.ones((1, 1))),
            Family("b", Space("sym", 1), {"X": PartialTrace((2,), (), 2.0)}, np.ones((1, 1)))]
    sol = solve_sdp(SdpProblem([Block("X", 2)], fams))
    assert sol.status == "PrimalInfeasible"


def test_dependent_equalities_are_dropped():
    fams = [Family("a", Space("sym", 1), {"X": PartialTrace((2,), ())}, np.ones((1, 1))),
            Family("b", Space("sym", 1), {"X": PartialTrace((2,), (), 2.0)}, 2 * np.ones((1, 1)))]
    sol = solve_sdp(SdpProblem([Block("X", 2)], fams, {"X": np.diag([1.0, 2.0])}))
    assert sol.optimal and sol.dropped_constraints == 1
    assert abs(sol.value - 1) < 1e-7


def test_badly_scaled_input():
    coeffs = np.array([np.diag([1.0, 0.0]), 1e13 * np.diag([0.0, 1.0])])
    p = SdpProblem([Block("X", 2, complex=False)], [Family("f", Space("vec", 2), {"X": Dense(coeffs)}, np.ones(2))])
    assert solve_sdp(p).status == "NumericalFailure"


def test_iteration_limit_returns_iterate():
    p = min_eig_problem(rand_herm(np.random.default_rng(9), 3))
    sol = solve_sdp(p, Settings(max_iters=2))
    assert sol.status == "IterationLimit"
    assert sol.block_values["X"].shape == (3, 3)


def test_validation_errors():
    with pytest.raises(ShapeError):
        fam = Family("f", Space("herm", 2), {"X": Identity(2)}, np.eye(2))
        solve_sdp(SdpProblem([Block("X", 1, complex=False), Block("X", 1)], [fam]))
    with pytest.raises(NotHermitian):
        solve_sdp(min_eig_problem(np.array([[0.0, 1.0], [0.0, 0.0]])))
    with pytest.raises(ShapeError):
        fam = Family("f", Space("herm", 2), {"X": Identity(2)}, np.eye(2))
        fam2 = Family("g", Space("herm", 2), {"X": Identity(2)}, np.eye(2))
        solve_sdp(SdpProblem([Block("X", 2, complex=False)], [fam, fam2]))


def test_deterministic():
    p = min_eig_problem(rand_herm(np.random.default_rng(10), 4))
    a, b = solve_sdp(p), solve_sdp(p)
    assert a.block_values["X"].tobytes() == b.block_values["X"].tobytes()
    assert a.primal_value == b.primal_value


def test_probe_examples():
    e = example_unbiased_qubit_povm(0.7)
    g = diagonal_joint_povm(e)
    assert g.n_outcomes == 4
    assert feasibility_probe(compatibility_system(e, e, 0.0)).feasible
    res = feasibility_probe(compatibility_system(pauli_povm("x"), pauli_povm("z"), 0.0))
    assert not res.feasible and res.status == "Infeasible"
    for eta in (0.0, 0.5, 1.0):
        assert feasibility_probe(compatibility_system(example_unbiased_qubit_povm(eta), trivial_povm(2), 0.0)).feasible


def test_probe_margin_of_strictly_feasible_system():
    # X + S = I has the interior point X = S = I/2, so the best margin is 1/2
    fam = Family("lmi", Space("herm", 2), {"X": Identity(2), "S": Identity(2)}, np.eye(2))
    res = feasibility_probe(SdpProblem([Block("X", 2), Block("S", 2)], [fam]), block_values=True)
    assert res.feasible and abs(res.margin - 0.5) < 1e-7
    assert np.abs(res.solution.block_values["X"] - np.eye(2) / 2).max() < 1e-6


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**31), st.integers(2, 5))
def test_min_eigenvalue_property(seed, n):
    c = rand_herm(np.random.default_rng(seed), n)
    sol = solve_sdp(min_eig_problem(c))
    assert sol.optimal
    assert abs(sol.value - np.linalg.eigvalsh(c)[0]) < 1e-7


def test_regression_degenerate_instances_reach_optimal():
    # each of these once stalled or broke Cholesky close to the optimum
    sol = solve_sdp(roi_cp_primal(identity_channel(6), sample_random_povm(6, 3, 9)))
    assert sol.optimal and abs(sol.primal_value - sol.dual_value) < 1e-6
    sol = solve_sdp(woi_dual(sample_random_channel(2, 2, 35), sample_random_channel(2, 2, 10035)))
    assert sol.optimal and abs(sol.primal_value - sol.dual_value) < 1e-6
    z = example_unbiased_qubit_povm(0.5)
    for r in (0.05051016807556152, 0.050510287284851074):
        res = feasibility_probe(compatibility_system(identity_channel(2), z, r))
        assert res.solution.optimal
