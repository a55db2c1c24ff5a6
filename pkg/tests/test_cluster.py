"""Cluster pipeline: configs, sign bits, oracle agreement, k suggestion."""

import numpy as np
import pytest

import wavecluster as wc
from wavecluster import ClusterConfig, NumericalError, ValidationError

KARATE_LAMBDA2 = 0.13227232922951715


def test_config_validation():
    for kwargs in (
        {"k": 0},
        {"backend": "heat"},
        {"mvm": "quantum"},
        {"mvm": "analog", "backend": "schrodinger"},
        {"k": 3, "t_max": 7},
        {"svd_tol": 0.0},
        {"analog_epsilon": -1.0},
        {"c": 1.5},
    ):
        with pytest.raises(ValidationError):
            ClusterConfig(**kwargs)
    cfg = ClusterConfig()
    assert (cfg.k, cfg.c, cfg.backend, cfg.mvm) == (1, 1.0, "discrete", "direct")


def test_single_edge_split():
    g = wc.graph_from_edges(2, [(0, 1)])
    wave = wc.wave_dmd_cluster(g, ClusterConfig(k=1, seed=0))
    cls = wc.classical_cluster(g, k=1)
    # the two nodes must separate; which side is label 0 is alignment-dependent
    assert wave.cluster_number[0] != wave.cluster_number[1]
    assert cls.cluster_number[0] != cls.cluster_number[1]
    assert wc.agreement(wave, cls) == 1.0
    est, oracle = wc.recovered_spectrum(g, ClusterConfig(k=1, seed=0))
    assert np.abs(oracle - [0.0, 2.0]).max() <= 1e-12
    assert np.abs(est - [0.0, 2.0]).max() <= 1e-6


def test_karate_matches_classical_exactly():
    g = wc.load_karate()
    cfg = ClusterConfig(k=1, seed=7)
    wave = wc.wave_dmd_cluster(g, cfg)
    cls = wc.classical_cluster(g, k=1)
    assert np.array_equal(wave.cluster_number, cls.cluster_number)
    assert np.array_equal(wave.sign_bits, cls.sign_bits)
    assert wc.agreement(wave, cls) == 1.0
    assert abs(wave.lambdas[1] - KARATE_LAMBDA2) <= 1e-6

    # mode coefficients reproduce the oracle eigenvector up to scale
    ops = wc.build_operators(g, 1.0)
    _vals, vecs = wc.classical_spectrum(ops, 2)
    r = np.corrcoef(wave.coefficients[:, 0], vecs[:, 1])[0, 1]
    assert abs(r) > 0.999


def test_karate_factions_agreement():
    g = wc.load_karate()
    wave = wc.wave_dmd_cluster(g, ClusterConfig(k=1, seed=7))
    factions = wc.karate_factions()
    assert wc.agreement(wave, factions) == pytest.approx(32.0 / 34.0)
    cls = wc.classical_cluster(g, k=1)
    # the spectral split differs from the factions on the same two nodes
    flips = [
        i
        for i in range(34)
        if (cls.cluster_number == cls.cluster_number[0])[i]
        != (factions == factions[0])[i]
    ]
    assert flips == [2, 8]


def test_path_middle_node_is_sign_ambiguous():
    g = wc.graph_from_edges(3, [(0, 1), (1, 2)])
    wave = wc.wave_dmd_cluster(g, ClusterConfig(k=1, seed=1))
    cls = wc.classical_cluster(g, k=1)
    for out in (wave, cls):
        assert out.near_zero[1, 0]
        assert not out.near_zero[0, 0] and not out.near_zero[2, 0]
        # ends split; the ambiguous middle encodes as the positive side
        assert out.cluster_number[0] != out.cluster_number[2]
        assert out.cluster_number[1] == 1
    # the banded pivot orients the tied end magnitudes the same way on
    # both routes, so even the degenerate middle node lines up
    assert np.array_equal(wave.cluster_number, cls.cluster_number)


def test_agreement_examples():
    a = np.array([0, 0, 1, 1])
    assert wc.agreement(a, a) == 1.0
    assert wc.agreement(a, 1 - a) == 1.0
    b = np.zeros(475, dtype=int)
    b[:200] = 1
    flipped = b.copy()
    flipped[10:18] = 1 - flipped[10:18]
    assert wc.agreement(b, flipped) == pytest.approx(467.0 / 475.0)
    with pytest.raises(ValidationError):
        wc.agreement(np.zeros(3, dtype=int), np.zeros(4, dtype=int))


def test_agreement_many_labels():
    # more than 8 distinct labels switches to the assignment solver
    rng = np.random.default_rng(0)
    labels = rng.integers(0, 12, 300)
    perm = rng.permutation(12)
    assert wc.agreement(labels, perm[labels]) == 1.0
    noisy = perm[labels].copy()
    noisy[:30] = (noisy[:30] + 1) % 12
    assert wc.agreement(labels, noisy) >= 0.9


def test_spectral_gap_examples():
    assert wc.spectral_gap_k([0.0, 0.01, 0.02, 0.9, 1.1], 4) == 3
    # ties resolve to the smallest cluster count
    assert wc.spectral_gap_k([0.0, 1.0, 2.0], 2) == 1
    with pytest.raises(ValidationError):
        wc.spectral_gap_k([0.0, 1.0], 1)
    with pytest.raises(ValidationError):
        wc.spectral_gap_k([0.0, 1.0, 2.0], 0)


def test_spectral_gap_on_planted_graph():
    g, _ = wc.gen_planted_partition(12, 4, 0.9, 0.1, seed=2)
    ops = wc.build_operators(g, 1.0)
    vals, _ = wc.classical_spectrum(ops, 12)
    assert wc.spectral_gap_k(vals, 6) == 4


def test_scale_invariant_bits():
    g, _ = wc.gen_planted_partition(8, 2, 0.9, 0.15, seed=3)
    cfg = ClusterConfig(k=1, seed=3, t_max=136)
    u0 = wc.random_u0(8, 3)
    a = wc.wave_dmd_cluster(g, cfg, u0=u0)
    b = wc.wave_dmd_cluster(g, cfg, u0=2.5 * u0)
    assert np.array_equal(a.cluster_number, b.cluster_number)


def test_backend_independence():
    g, labels = wc.gen_planted_partition(8, 2, 0.9, 0.15, seed=3)
    outs = {}
    for backend in ("discrete", "schrodinger", "closed_form"):
        cfg = ClusterConfig(k=1, seed=3, t_max=136, backend=backend)
        outs[backend] = wc.wave_dmd_cluster(g, cfg)
        assert wc.agreement(outs[backend], labels) == 1.0
        assert abs(outs[backend].lambdas[1] - outs["discrete"].lambdas[1]) <= 1e-8
    # the banded pivot keeps the label orientation route-independent
    assert np.array_equal(
        outs["discrete"].cluster_number, outs["schrodinger"].cluster_number
    )
    assert np.array_equal(
        outs["discrete"].cluster_number, outs["closed_form"].cluster_number
    )


def test_analog_mvm_identical_numbers():
    # regression: settle noise once leaked single-node ghost modes into the
    # slot table and displaced the true second eigenvalue
    g, _ = wc.gen_planted_partition(8, 2, 0.9, 0.15, seed=0)
    direct = wc.wave_dmd_cluster(g, ClusterConfig(k=1, seed=0, t_max=192))
    analog = wc.wave_dmd_cluster(
        g,
        ClusterConfig(k=1, seed=0, t_max=192, mvm="analog", analog_epsilon=1e-10),
    )
    assert np.array_equal(direct.cluster_number, analog.cluster_number)
    assert abs(direct.lambdas[1] - analog.lambdas[1]) <= 1e-6


def test_k_limits():
    g = wc.graph_from_edges(2, [(0, 1)])
    with pytest.raises(ValidationError):
        wc.wave_dmd_cluster(g, ClusterConfig(k=2, seed=0))
    with pytest.raises(ValidationError):
        wc.classical_cluster(g, k=2)
    # a triangle has two distinct eigenvalues, too few for k = 2
    tri = wc.graph_from_edges(3, [(0, 1), (1, 2), (0, 2)])
    with pytest.raises(NumericalError):
        wc.wave_dmd_cluster(tri, ClusterConfig(k=2, seed=0))


def test_result_document():
    g = wc.graph_from_edges(2, [(0, 1)])
    cfg = ClusterConfig(k=1, seed=5)
    wave = wc.wave_dmd_cluster(g, cfg)
    vs = wc.agreement(wave, wc.classical_cluster(g, k=1))
    doc = wc.result_document(g, cfg, wave, vs)
    assert doc["n"] == 2 and doc["k"] == 1 and doc["seed"] == 5
    assert doc["backend"] == "discrete"
    assert doc["agreement_vs_classical"] == 1.0
    assert doc["assignments"] in ([0, 1], [1, 0])
    assert len(doc["lambda"]) == 2
    assert doc["lambda"][1] == pytest.approx(2.0, abs=1e-6)
