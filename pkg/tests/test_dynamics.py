"""Wave backends, stability, and energy conservation."""

import numpy as np
import pytest

import wavecluster as wc
from wavecluster import NumericalError, ValidationError


def _edge_graph():
    return wc.graph_from_edges(2, [(0, 1)])


def test_random_u0_reproducible():
    a = wc.random_u0(16, 7)
    b = wc.random_u0(16, 7)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, wc.random_u0(16, 8))
    assert np.all(a >= 0.0) and np.all(a < 1.0)


def test_first_step_uses_resting_start():
    # u(-1) = u(0) collapses the first update to u(1) = u0 - c^2 L u0
    g = _edge_graph()
    c = 0.8
    ops = wc.build_operators(g, c=c)
    u0 = np.array([1.0, 0.25])
    traj = wc.simulate_discrete(ops, u0, 3)
    assert np.array_equal(traj.samples[:, 0], u0)
    assert np.allclose(traj.samples[:, 1], u0 - c * c * (ops.l_sym @ u0))


def test_single_edge_recurrence_by_hand():
    # lambda = {0, 2}, c = 1, resting start: the mean stays put and the
    # difference mode follows (cos - sin)(pi t / 2), the zeta = pi/2
    # solution of d(t) = 2 d(t-1) - d(t-2) - 2 d(t-1) with d(-1) = d(0)
    g = _edge_graph()
    ops = wc.build_operators(g, c=1.0)
    u0 = np.array([1.0, 0.0])
    traj = wc.simulate_discrete(ops, u0, 9)
    mean = 0.5 * (traj.samples[0] + traj.samples[1])
    diff = 0.5 * (traj.samples[0] - traj.samples[1])
    assert np.allclose(mean, 0.5, atol=1e-12)
    t = np.arange(9)
    want = 0.5 * (np.cos(np.pi * t / 2.0) - np.sin(np.pi * t / 2.0))
    assert np.allclose(diff, want, atol=1e-12)


def test_closed_form_matches_discrete():
    rng = np.random.default_rng(0)
    for trial in range(10):
        n = 2 * int(rng.integers(3, 8))
        g, _ = wc.gen_planted_partition(n, 2, 0.8, 0.2, seed=trial)
        c = float(rng.uniform(0.3, 1.4))
        ops = wc.build_operators(g, c=c)
        u0 = wc.random_u0(n, trial)
        loop = wc.simulate_discrete(ops, u0, 8 * n)
        oracle = wc.closed_form_wave(ops, u0, 8 * n)
        assert np.abs(loop.samples - oracle.samples).max() <= 1e-9


def test_trajectory_metadata():
    g = _edge_graph()
    ops = wc.build_operators(g)
    traj = wc.simulate(ops, np.array([1.0, 0.0]), 5, backend="discrete", seed=3)
    assert traj.n_nodes == 2
    assert traj.t_max == 5
    assert traj.backend == "discrete"
    assert traj.seed == 3
    assert np.array_equal(traj.initial, [1.0, 0.0])


def test_simulate_dispatch_and_validation():
    g = _edge_graph()
    ops = wc.build_operators(g)
    u0 = np.array([1.0, 0.0])
    for backend in ("discrete", "schrodinger", "closed_form"):
        traj = wc.simulate(ops, u0, 4, backend=backend)
        assert traj.backend == backend
    with pytest.raises(ValidationError):
        wc.simulate(ops, u0, 4, backend="nope")
    with pytest.raises(ValidationError):
        wc.simulate(ops, u0, 1)
    with pytest.raises(ValidationError):
        wc.simulate(ops, np.array([1.0, 0.0, 0.0]), 4)
    with pytest.raises(ValidationError):
        wc.simulate(ops, np.array([np.nan, 0.0]), 4)


def test_nonfinite_mvm_fails_fast():
    g = _edge_graph()
    ops = wc.build_operators(g)

    def broken(a, x):
        return np.full_like(x, np.inf)

    with pytest.raises(NumericalError):
        wc.simulate_discrete(ops, np.array([1.0, 0.0]), 200, mvm=broken)


def test_backends_agree():
    rng = np.random.default_rng(5)
    for trial in range(5):
        n = 2 * int(rng.integers(3, 7))
        g, _ = wc.gen_planted_partition(n, 2, 0.9, 0.2, seed=trial)
        ops = wc.build_operators(g)
        u0 = wc.random_u0(n, trial)
        d = wc.simulate_discrete(ops, u0, 4 * n)
        cf = wc.closed_form_wave(ops, u0, 4 * n)
        assert np.abs(d.samples - cf.samples).max() <= 1e-9
        # schrodinger solves a different equation with the same spectrum;
        # it shares the t=0 column and the constant mode only
        s = wc.simulate_schrodinger(ops, u0, 4 * n)
        assert np.allclose(s.samples[:, 0], u0)


def test_schrodinger_ode_matches_eig():
    g, _ = wc.gen_planted_partition(10, 2, 0.9, 0.2, seed=0)
    ops = wc.build_operators(g)
    u0 = wc.random_u0(10, 3)
    eig = wc.simulate_schrodinger(ops, u0, 40, method="eig")
    ode = wc.simulate_schrodinger(ops, u0, 40, method="ode")
    assert np.abs(eig.samples - ode.samples).max() <= 1e-9
    with pytest.raises(ValidationError):
        wc.simulate_schrodinger(ops, u0, 40, method="rk1")


def test_schrodinger_state_blocks():
    g, _ = wc.gen_planted_partition(8, 2, 0.9, 0.2, seed=1)
    ops = wc.build_operators(g)
    u0 = wc.random_u0(8, 2)
    state0 = wc.schrodinger_state(ops, u0, 0.0)
    assert np.allclose(state0.u1, u0)
    assert np.all(state0.u2 == 0.0)
    st = wc.schrodinger_state(ops, u0, 3.7)
    # u1 real, u2 purely imaginary
    assert np.all(np.isreal(st.u1))
    assert np.abs(st.u2.real).max() <= 1e-12
    assert st.u2.shape == (g.n_edges,)


def test_schrodinger_energy_conserved():
    rng = np.random.default_rng(9)
    for trial in range(5):
        n = 2 * int(rng.integers(3, 8))
        g, _ = wc.gen_planted_partition(n, 2, 0.8, 0.2, seed=20 + trial)
        ops = wc.build_operators(g, c=float(rng.uniform(0.5, 1.4)))
        u0 = wc.random_u0(n, trial)
        e0 = float(u0 @ u0)
        # integer and fractional times across the full window
        for t in np.linspace(0.0, 4.0 * n, 17):
            st = wc.schrodinger_state(ops, u0, float(t))
            assert abs(st.energy - e0) <= 1e-8


def test_stability_inside_the_open_interval():
    rng = np.random.default_rng(11)
    for trial in range(8):
        n = 2 * int(rng.integers(2, 9))
        g, _ = wc.gen_planted_partition(n, 2, 0.8, 0.3, seed=trial)
        ops = wc.build_operators(g)
        for c in (0.5, 1.0, 1.4):
            rep = wc.stability_check(ops, c=c)
            assert rep.stable
            assert rep.max_abs_rho <= 1.0 + 1e-9
            assert rep.rho.shape == (2 * n,)


def test_instability_past_the_bound():
    # c = 1.5 with lambda = 2 puts c^2 lambda = 4.5 past the edge of the
    # stability region, so a root leaves the unit circle
    g = _edge_graph()
    ops = wc.build_operators(g, c=1.0)
    rep = wc.stability_check(ops, c=1.5)
    assert not rep.stable
    assert rep.max_abs_rho > 1.0
    with pytest.raises(ValidationError):
        wc.stability_check(ops, c=-1.0)


def test_companion_roots_match_dispersion():
    # every rho solves rho^2 + (c^2 lambda - 2) rho + 1 = 0 for some
    # eigenvalue lambda of l_sym
    g, _ = wc.gen_planted_partition(8, 2, 0.9, 0.2, seed=4)
    c = 1.1
    ops = wc.build_operators(g, c=c)
    vals, _ = wc.classical_spectrum(ops, 8)
    rep = wc.stability_check(ops)
    assert rep.rho.shape == (16,)
    # root locations are ill conditioned at the lambda = 0 branch point,
    # so check the polynomial residual instead of root positions
    for r in rep.rho:
        resid = np.abs(r * r + (c * c * vals - 2.0) * r + 1.0)
        assert resid.min() <= 1e-10


def test_no_growth_over_long_runs():
    # beat peaks of the quasi-periodic solution can appear late, so the
    # windowed comparison needs a graph whose early window reaches the
    # near-global maximum; this seed was screened for that
    g, _ = wc.gen_planted_partition(18, 2, 0.7, 0.2, seed=5)
    ops = wc.build_operators(g, c=1.4)
    u0 = wc.random_u0(18, 5)
    traj = wc.simulate_discrete(ops, u0, 10_000)
    first = np.abs(traj.samples[:, :1000]).max()
    last = np.abs(traj.samples[:, -1000:]).max()
    assert last <= first * (1.0 + 1e-6)
