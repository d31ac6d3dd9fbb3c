import math

import numpy as np
import pytest

from oracles import classical_llr_atoms, classical_tail
from qhtbounds import (
    SupportError,
    density_matrix,
    from_bloch,
    info_variance,
    maximally_mixed,
    measure_from_atoms,
    measure_mgf,
    optimal_type2,
    product_measure,
    product_state,
    pure_state,
    random_density,
    rel_entropy,
    relative_modular_measure,
    sup_norm_c,
    tail,
)
from qhtbounds.modular import point_mass

FIG1_A = (-0.177483, 0.365807, 0.291007)
FIG1_B = (-0.452239, -0.141906, -0.159193)


def diag_state(probs):
    return density_matrix(np.diag(np.asarray(probs, dtype=complex)))


def test_measure_identical_maximally_mixed():
    m = relative_modular_measure(maximally_mixed(2), maximally_mixed(2))
    assert len(m.locations) == 1
    assert np.isclose(m.locations[0], 0.0, atol=1e-12)
    assert np.isclose(m.weights[0], 1.0, atol=1e-12)


def test_measure_classical_pair():
    p, q = [0.7, 0.3], [0.4, 0.6]
    m = relative_modular_measure(diag_state(p), diag_state(q))
    locs, wts = classical_llr_atoms(p, q)
    assert np.allclose(m.locations, locs, atol=1e-12)
    assert np.allclose(m.weights, wts, atol=1e-12)


def test_measure_reference_qubit_pair_moments():
    rho = from_bloch(FIG1_A)
    sig = from_bloch(FIG1_B)
    m = relative_modular_measure(rho, sig)
    assert len(m.locations) == 4
    assert abs(m.mean + rel_entropy(rho, sig)) <= 1e-9
    assert abs(m.variance - info_variance(rho, sig)) <= 1e-9


@pytest.mark.parametrize("dim", [2, 3, 5, 8])
def test_measure_moment_identities(dim):
    for seed in range(5):
        rho = random_density(dim, 1000 + seed)
        sig = random_density(dim, 2000 + seed)
        m = relative_modular_measure(rho, sig)
        assert abs(m.total_weight - 1.0) <= 1e-10
        assert abs(m.mean + rel_entropy(rho, sig)) <= 1e-9
        assert abs(m.variance - info_variance(rho, sig)) <= 1e-9
        assert abs(measure_mgf(m, 1.0) - 1.0) <= 1e-10


def test_measure_requires_faithful():
    with pytest.raises(SupportError):
        relative_modular_measure(pure_state([1, 0]), maximally_mixed(2))
    m = relative_modular_measure(pure_state([1, 0]), maximally_mixed(2), regularization=1e-10)
    assert abs(m.total_weight - 1.0) <= 1e-10


def test_sup_norm_c_examples():
    assert sup_norm_c(maximally_mixed(3), maximally_mixed(3)) <= 1e-12
    p, q = [0.7, 0.3], [0.4, 0.6]
    d = rel_entropy(diag_state(p), diag_state(q))
    expected = max(abs(math.log(qi / pi) + d) for pi in p for qi in q)
    assert abs(sup_norm_c(diag_state(p), diag_state(q)) - expected) <= 1e-12


def test_sup_norm_c_dominates_sqrt_variance():
    for seed in range(100):
        rho = random_density(2, 3000 + seed)
        sig = random_density(2, 4000 + seed)
        assert sup_norm_c(rho, sig) >= math.sqrt(info_variance(rho, sig)) - 1e-12


def test_tail_extremes():
    m = relative_modular_measure(random_density(2, 1), random_density(2, 2))
    assert abs(tail(m, -math.inf) - 1.0) <= 1e-10
    assert tail(m, m.locations[-1] + 1.0) == 0.0


def test_tail_classical():
    p, q = [0.2, 0.5, 0.3], [0.4, 0.4, 0.2]
    m = relative_modular_measure(diag_state(p), diag_state(q))
    for thr in (-1.0, -0.1, 0.0, 0.3):
        assert abs(tail(m, thr) - classical_tail(p, q, thr)) <= 1e-12


def test_mgf_basics():
    rho = random_density(3, 5)
    sig = random_density(3, 6)
    m = relative_modular_measure(rho, sig)
    assert abs(measure_mgf(m, 0.0) - 1.0) <= 1e-10
    d = rel_entropy(rho, sig)
    step = 1e-6
    deriv = (measure_mgf(m, step) - measure_mgf(m, -step)) / (2 * step)
    assert abs(deriv + d) <= 1e-4


def test_mgf_overflow_saturates():
    m = measure_from_atoms([1000.0], [1.0])
    assert measure_mgf(m, 10.0) == math.inf


def test_product_measure_point_mass_neutral():
    m = relative_modular_measure(random_density(2, 7), random_density(2, 8))
    conv = product_measure(m, point_mass(0.0))
    assert np.allclose(conv.locations, m.locations, atol=1e-12)
    assert np.allclose(conv.weights, m.weights, atol=1e-12)


def test_product_measure_matches_tensor_pair():
    rho1, sig1 = random_density(2, 9), random_density(2, 10)
    rho2, sig2 = random_density(3, 11), random_density(3, 12)
    direct = relative_modular_measure(product_state([rho1, rho2]), product_state([sig1, sig2]))
    conv = product_measure(
        relative_modular_measure(rho1, sig1), relative_modular_measure(rho2, sig2)
    )
    # compare as distributions on a grid of thresholds
    grid = np.linspace(direct.locations[0] - 0.1, direct.locations[-1] + 0.1, 200)
    for thr in grid:
        assert abs(tail(direct, thr) - tail(conv, thr)) <= 1e-10
    assert abs(direct.mean - conv.mean) <= 1e-10


def test_product_measure_mean_adds():
    a = relative_modular_measure(random_density(2, 13), random_density(2, 14))
    b = relative_modular_measure(random_density(2, 15), random_density(2, 16))
    conv = product_measure(a, b)
    assert abs(conv.mean - (a.mean + b.mean)) <= 1e-10


def test_reverse_markov_inequality():
    # P(e^X > x) >= E[(e^X - x)/e^X] for the positive variable e^X
    for seed in range(10):
        m = relative_modular_measure(random_density(3, 20 + seed), random_density(3, 40 + seed))
        exp_neg = float(m.weights @ np.exp(-m.locations))
        for x in np.linspace(0.05, 5.0, 30):
            lhs = float(m.weights[np.exp(m.locations) > x].sum())
            rhs = 1.0 - x * exp_neg
            assert lhs >= rhs - 1e-12


def test_threshold_test_contract():
    # the spectral threshold test guarantees alpha <= tail(mu, -log L) and
    # beta <= 1/L; achievability is certified against the exact oracle
    for seed in range(8):
        rho = random_density(2, 60 + seed)
        sig = random_density(2, 80 + seed)
        m = relative_modular_measure(rho, sig)
        d = rel_entropy(rho, sig)
        for log_l in np.linspace(d - 2.0, d + 1.0, 7):
            eps = tail(m, -log_l)
            if not 0.0 < eps < 1.0:
                continue
            assert optimal_type2(rho, sig, eps) <= math.exp(-log_l) * (1.0 + 1e-12)


def test_clustering_merges_and_keeps_tiny_weights():
    m = measure_from_atoms([0.0, 5e-10, 1.0], [0.25, 0.25, 0.5])
    assert len(m.locations) == 2
    assert np.isclose(m.weights[0], 0.5)
    tiny = measure_from_atoms([0.0, 1.0], [1.0 - 1e-16, 1e-16])
    assert len(tiny.locations) == 2  # weights below 1e-15 are kept
