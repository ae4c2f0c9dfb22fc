import numpy as np
import pytest

from curvehull.sdp import (INACCURATE, INFEASIBLE, OPTIMAL, UNBOUNDED,
                           SDPError, SDPProblem, check_psd, solve)


def sym(m):
    m = np.asarray(m, dtype=float)
    return (m + m.T) / 2


def max_t_correlation():
    # maximize t s.t. [[1, t], [t, 1]] >= 0  ->  t* = 1
    F0 = np.eye(2)
    Fs = np.array([[[0.0, 1.0], [1.0, 0.0]]])
    return SDPProblem(1, [(F0, Fs)], objective=np.array([1.0]))


def min_lambda_cover():
    # minimize lam s.t. lam*I - diag(1,3) >= 0 -> maximize -lam, lam* = 3
    F0 = -np.diag([1.0, 3.0])
    Fs = np.array([np.eye(2)])
    return SDPProblem(1, [(F0, Fs)], objective=np.array([-1.0]))


def test_max_t_analytic():
    sol = solve(max_t_correlation())
    assert sol.status == OPTIMAL
    assert abs(sol.objective - 1.0) <= 1e-6
    assert sol.psd_residual >= -1e-7


def test_min_lambda_analytic():
    sol = solve(min_lambda_cover())
    assert sol.status == OPTIMAL
    assert abs(-sol.objective - 3.0) <= 1e-6
    assert abs(sol.x[0] - 3.0) <= 1e-6


def test_infeasible_flagged():
    # [[ -1 + 0*u ]] can never be PSD; u enters a separate harmless block
    F0a = np.array([[-1.0]])
    Fsa = np.array([[[0.0]]])
    F0b = np.array([[1.0]])
    Fsb = np.array([[[1.0]]])
    sol = solve(SDPProblem(1, [(F0a, Fsa), (F0b, Fsb)], objective=np.array([0.0])))
    assert sol.status == INFEASIBLE


def test_strictly_infeasible_with_coupling():
    # u >= 1 (block [u-1]) and u <= -1 (block [-1-u])
    blocks = [(np.array([[-1.0]]), np.array([[[1.0]]])),
              (np.array([[-1.0]]), np.array([[[-1.0]]]))]
    sol = solve(SDPProblem(1, blocks, objective=np.array([1.0])))
    assert sol.status == INFEASIBLE


def test_unbounded_flagged():
    # maximize u with only u >= 0 as constraint
    blocks = [(np.array([[0.0]]), np.array([[[1.0]]]))]
    sol = solve(SDPProblem(1, blocks, objective=np.array([1.0])))
    assert sol.status == UNBOUNDED
    assert sol.certificate is not None and sol.certificate[0] > 0


def test_weak_duality_on_randoms():
    rng = np.random.default_rng(7)
    for trial in range(25):
        m = int(rng.integers(1, 5))
        d = int(rng.integers(1, 5))
        Fs = np.array([sym(rng.normal(size=(d, d))) for _ in range(m)])
        # make strictly feasible: F0 = I - sum u0_j Fj for a random u0
        u0 = rng.normal(scale=0.5, size=m)
        F0 = np.eye(d) * (1.0 + rng.random()) - np.tensordot(u0, Fs, axes=(0, 0))
        # box blocks |u_j| <= 10 keep the optimum attained
        I = np.zeros((m, m, m))
        for j in range(m):
            I[j, j, j] = 1.0
        blocks = [(F0, Fs), (np.eye(m) * 10.0, I), (np.eye(m) * 10.0, -I)]
        g = rng.normal(size=m)
        sol = solve(SDPProblem(m, blocks, objective=g))
        assert sol.status == OPTIMAL, sol.message
        # weak duality: primal objective <= dual bound (+ tolerance)
        assert sol.objective <= sol.dual_bound + 1e-7
        assert sol.gap <= 1e-6 * (1 + abs(sol.objective))


def test_scaling_invariance():
    for prob, scale in [(max_t_correlation(), 10.0), (min_lambda_cover(), 10.0)]:
        base = solve(prob)
        scaled = solve(SDPProblem(prob.m, prob.blocks, objective=prob.objective * scale))
        assert base.status == scaled.status == OPTIMAL
        assert abs(scaled.objective - scale * base.objective) <= 1e-6 * max(1, abs(scale * base.objective))


def test_roundtrip_primal_point_check_psd():
    for prob in (max_t_correlation(), min_lambda_cover()):
        sol = solve(prob)
        assert sol.status == OPTIMAL
        for F0, Fs in prob.blocks:
            ok, mineig = check_psd(F0 + np.tensordot(sol.x, Fs, axes=(0, 0)), 1e-7)
            assert ok, mineig


def test_equality_constraints():
    # maximize x + y s.t. x + y <= 1 (2 PSD 1x1 blocks), x = 2y
    blocks = [(np.array([[1.0]]), np.array([[[-1.0]], [[-1.0]]])),
              (np.array([[5.0]]), np.array([[[1.0]], [[0.0]]])),
              (np.array([[5.0]]), np.array([[[0.0]], [[1.0]]]))]
    prob = SDPProblem(2, blocks, objective=np.array([1.0, 1.0]),
                      eq_A=np.array([[1.0, -2.0]]), eq_b=np.array([0.0]))
    sol = solve(prob)
    assert sol.status == OPTIMAL
    assert abs(sol.objective - 1.0) <= 1e-6
    assert abs(sol.x[0] - 2 * sol.x[1]) <= 1e-8


def test_inconsistent_equalities():
    blocks = [(np.array([[1.0]]), np.array([[[1.0]]]))]
    prob = SDPProblem(1, blocks, objective=None,
                      eq_A=np.array([[1.0], [1.0]]), eq_b=np.array([0.0, 1.0]))
    assert solve(prob).status == INFEASIBLE


def test_feasibility_problem_no_objective():
    sol = solve(SDPProblem(1, [(np.eye(2), np.array([sym([[0, 1], [1, 0]])]))]))
    assert sol.status == OPTIMAL
    assert sol.psd_residual >= -1e-7


def test_check_psd_cases():
    ok, mineig = check_psd(np.diag([1.0, 0.0, 0.0, 0.0]), 1e-9)
    assert ok and abs(mineig) <= 1e-12
    ok, mineig = check_psd(np.array([[0.0, 1.0], [1.0, 0.0]]), 1e-9)
    assert not ok and abs(mineig + 1.0) <= 1e-12
    with pytest.raises(SDPError):
        check_psd(np.array([[0.0, 1.0], [0.0, 0.0]]), 1e-9)


def test_dimension_cap():
    with pytest.raises(SDPError):
        SDPProblem(1, [(np.eye(201), np.zeros((1, 201, 201)))])


def test_golden_matrix_psd_instance():
    # the 4x4 localizing matrix at (xi, eta, a, b, c) = (2, 0, 0, 4, 1)
    mat = np.array([
        [0.0, 0, 0, 0],
        [0, 1.0, 2.0, 0],
        [0, 2.0, 4.0, 0],
        [0, 0, 0, 2.0],
    ])
    # entries: 1-c=0, c=1, xi=2, a=0, b=4, eta=0, 3xi-b-2c = 6-4-2 = 0
    mat[2, 2] = 4.0
    mat[3, 3] = 6.0 - 4.0 - 2.0
    ok, mineig = check_psd(mat, 1e-9)
    assert ok, mineig
