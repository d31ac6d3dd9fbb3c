import math

import numpy as np
import pytest

from oracles import bennett_bound
from qhtbounds import (
    AdmissibilityError,
    DomainError,
    GibbsChain,
    azuma_stein_bound,
    bennett_alpha_bound,
    bennett_gap_limit,
    certify_family,
    density_matrix,
    factorized_hoeffding_bound,
    factorized_stein_bound,
    gibbs_family,
    info_variance,
    maximally_mixed,
    moderate_lower,
    moderate_nonhomog,
    moderate_upper_form,
    nonhomog_hoeffding_bound,
    nonhomog_stein_bound,
    optimal_type2,
    optimal_type2_hoeffding,
    product_family,
    random_density,
    rel_entropy,
    relative_modular_measure,
    sup_norm_c,
    tail,
)

ZZ = np.kron(np.diag([1.0, -1.0]), np.diag([1.0, -1.0])).astype(complex)


def certified_gibbs_vs_product(beta=0.05, sigma_diag=(0.65, 0.35), n=6):
    fam_a = gibbs_family(GibbsChain(2, ZZ, beta))
    sigma1 = density_matrix(np.diag(np.asarray(sigma_diag, dtype=complex)))
    fam_b = product_family(sigma1)
    certify_family(fam_a, n, "upper")
    certify_family(fam_b, n, "upper")
    r_const = max(fam_a.r_upper, fam_b.r_upper)
    rho1 = maximally_mixed(2)
    d1 = rel_entropy(rho1, sigma1)
    v1 = info_variance(rho1, sigma1)
    c = sup_norm_c(rho1, sigma1)
    return fam_a, fam_b, r_const, d1, v1, c


def test_factorized_stein_reduces_to_azuma_at_r_one():
    rho, sig = random_density(2, 1), random_density(2, 2)
    d1 = rel_entropy(rho, sig)
    c = sup_norm_c(rho, sig)
    n = 4
    eps = 0.2  # inside the square-root branch for these constants
    assert eps >= math.exp(-n * c**2 / 2.0)
    lhs = factorized_stein_bound(d1, c, 1.0, n, eps)
    rhs = azuma_stein_bound([(rho, sig)] * n, eps).value
    assert abs(lhs - rhs) <= 1e-12


def test_factorized_branch_continuity():
    d1, c, r_const, n = 0.3, 0.8, 1.05, 5
    eps_star = r_const**n * math.exp(-n * c**2 / 2.0)
    below = factorized_stein_bound(d1, c, r_const, n, eps_star * (1 - 1e-13))
    above = factorized_stein_bound(d1, c, r_const, n, eps_star * (1 + 1e-13))
    at = factorized_stein_bound(d1, c, r_const, n, eps_star)
    assert abs(below - at) <= 1e-10
    assert abs(above - at) <= 1e-10
    r_star = c**2 / 2.0 - math.log(r_const)
    h_below = factorized_hoeffding_bound(d1, c, r_const, n, r_star * (1 - 1e-13))
    h_above = factorized_hoeffding_bound(d1, c, r_const, n, r_star * (1 + 1e-13))
    assert abs(h_below - h_above) <= 1e-10


def test_factorized_rejects_bad_r():
    with pytest.raises(DomainError):
        factorized_stein_bound(0.1, 0.5, 0.8, 3, 0.2)


def test_factorized_hoeffding_small_rate():
    d1, c = 0.4, 0.7
    val = factorized_hoeffding_bound(d1, c, 1.0, 5, 1e-14)
    assert abs(val + 5 * d1) <= 1e-5


def test_factorized_dominates_oracle_gibbs_pairs():
    # both family pairings: two Gibbs chains, and a Gibbs chain vs a product
    fam_a = gibbs_family(GibbsChain(2, ZZ, 0.2))
    fam_b = gibbs_family(GibbsChain(2, ZZ, 0.1))
    certify_family(fam_a, 3, "upper")
    certify_family(fam_b, 3, "upper")
    r_ab = max(fam_a.r_upper, fam_b.r_upper)
    rho1 = maximally_mixed(2)
    for n in (2, 3):
        for eps in (0.1, 0.3):
            exact = math.log(optimal_type2(fam_a.state(n), fam_b.state(n), eps))
            bound = factorized_stein_bound(0.0, 0.0, r_ab, n, eps)
            assert exact <= bound
    fam_a2, fam_b2, r_const, d1, v1, c = certified_gibbs_vs_product(beta=0.2, n=3)
    for n in (2, 3):
        for eps in (0.1, 0.3):
            exact = math.log(optimal_type2(fam_a2.state(n), fam_b2.state(n), eps))
            assert exact <= factorized_stein_bound(d1, c, r_const, n, eps)
        for rate in (0.05, 0.2):
            exact = math.log(
                optimal_type2_hoeffding(fam_a2.state(n), fam_b2.state(n), rate, n)
            )
            assert exact <= factorized_hoeffding_bound(d1, c, r_const, n, rate)


def test_nonhomog_reduces_to_homogeneous():
    d1, c, r_const, n, eps, rate = 0.25, 0.6, 1.03, 4, 0.15, 0.1
    steps = [(d1, c)] * n
    assert abs(
        nonhomog_stein_bound(steps, r_const, n, eps) - factorized_stein_bound(d1, c, r_const, n, eps)
    ) <= 1e-12
    assert abs(
        nonhomog_hoeffding_bound(steps, r_const, n, rate)
        - factorized_hoeffding_bound(d1, c, r_const, n, rate)
    ) <= 1e-12


def test_nonhomog_r_one_identical_steps_is_azuma():
    rho, sig = random_density(2, 3), random_density(2, 4)
    n, eps = 3, 0.2
    steps = [(rel_entropy(rho, sig), sup_norm_c(rho, sig))] * n
    if eps >= math.exp(-sum(c * c for _, c in steps) / 2.0):
        lhs = nonhomog_stein_bound(steps, 1.0, n, eps)
        rhs = azuma_stein_bound([(rho, sig)] * n, eps).value
        assert abs(lhs - rhs) <= 1e-12


def test_nonhomog_branch_continuity():
    steps = [(0.2, 0.5), (0.3, 0.7), (0.25, 0.6)]
    r_const, n = 1.04, 3
    c_sq = sum(c * c for _, c in steps)
    eps_star = r_const**n * math.exp(-c_sq / 2.0)
    below = nonhomog_stein_bound(steps, r_const, n, eps_star * (1 - 1e-13))
    above = nonhomog_stein_bound(steps, r_const, n, eps_star * (1 + 1e-13))
    assert abs(below - above) <= 1e-10
    rate_star = c_sq / (2.0 * n) - math.log(r_const)
    assert abs(
        nonhomog_hoeffding_bound(steps, r_const, n, rate_star * (1 - 1e-13))
        - nonhomog_hoeffding_bound(steps, r_const, n, rate_star * (1 + 1e-13))
    ) <= 1e-10


def test_r_monotonicity():
    d1, c, n = 0.3, 0.6, 4
    for eps in (0.05, 0.4):
        vals = [factorized_stein_bound(d1, c, r, n, eps) for r in (1.0, 1.05, 1.2, 1.5)]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    for rate in (0.05, 0.4):
        vals = [factorized_hoeffding_bound(d1, c, r, n, rate) for r in (1.0, 1.05, 1.2, 1.5)]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_bennett_alpha_bound_basics():
    assert bennett_alpha_bound(3, 0.1, 0.5, 1.2, 0.0) == 1.2**3
    with pytest.raises(DomainError):
        bennett_alpha_bound(3, 0.1, 0.5, 1.2, -0.1)
    with pytest.raises(DomainError):
        bennett_alpha_bound(3, 0.1, 0.5, 1.2, 10 * bennett_gap_limit(3, 0.1, 0.5))


def test_bennett_alpha_bound_matches_classical_formula():
    n, v1, c = 5, 0.09, 0.4
    for gap in np.linspace(0.01, bennett_gap_limit(n, v1, c), 7):
        mine = bennett_alpha_bound(n, v1, c, 1.0, gap)
        ref = bennett_bound(n, v1, c, gap)
        assert abs(mine - ref) <= 1e-12 * max(1.0, ref)


def test_bennett_chain_dominates_exact_tail():
    # the finite-n core: the exact spectral-measure tail never exceeds the bound
    fam_a, fam_b, r_const, d1, v1, c = certified_gibbs_vs_product()
    for n in range(1, 4):
        meas = relative_modular_measure(fam_a.state(n), fam_b.state(n))
        for gap in np.linspace(0.0, bennett_gap_limit(n, v1, c), 10):
            exact_tail = tail(meas, gap - n * d1)
            assert exact_tail <= bennett_alpha_bound(n, v1, c, r_const, gap) + 1e-14


def test_moderate_lower_limits_and_admissibility():
    fam_a, fam_b, r_const, d1, v1, c = certified_gibbs_vs_product()
    n = 4
    # the deviation term vanishes as R -> 1 and a_n -> 0
    tiny = moderate_lower(d1, v1, c, 1.0, 1e-9, n)
    assert abs(tiny - n * d1) <= 1e-6
    with pytest.raises(AdmissibilityError):
        moderate_lower(d1, v1, math.log(4.0), 1.0, 0.1, n)
    with pytest.raises(AdmissibilityError):
        moderate_lower(d1, v1, c, math.exp(1.0), 0.1, n)  # log R outside window


def test_moderate_lower_certified_against_exact_dh():
    # family chosen so the scaled moderate sequence keeps the Bennett gap
    # inside its window at every n <= 6; there the chain certifies the bound
    fam_a = gibbs_family(GibbsChain(2, ZZ, 0.01))
    sigma1 = density_matrix(np.diag([0.75, 0.25]).astype(complex))
    fam_b = product_family(sigma1)
    certify_family(fam_a, 6, "upper")
    certify_family(fam_b, 6, "upper")
    r_const = max(fam_a.r_upper, fam_b.r_upper)
    rho1 = maximally_mixed(2)
    d1 = rel_entropy(rho1, sigma1)
    v1 = info_variance(rho1, sigma1)
    c = sup_norm_c(rho1, sigma1)
    checked = 0
    for n in range(1, 7):
        a_n = 0.3 * n ** (-1.0 / 3.0)
        eps_n = math.exp(-n * a_n**2)
        value = moderate_lower(d1, v1, c, r_const, a_n, n)
        gap = n * d1 - value
        if gap > bennett_gap_limit(n, v1, c):
            continue  # outside the certified window, nothing to assert
        beta = optimal_type2(fam_a.state(n), fam_b.state(n), eps_n)
        assert value <= -math.log(beta) + 1e-10
        checked += 1
    assert checked >= 4


def test_moderate_upper_form():
    assert moderate_upper_form(0.5, 0.2, 0.0, 3) == 1.5
    assert moderate_upper_form(0.5, 0.0, 0.3, 3) == 1.5
    vals = [moderate_upper_form(0.5, 0.2, a, 3) for a in (0.0, 0.1, 0.2, 0.4)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))
    with pytest.raises(DomainError):
        moderate_upper_form(0.5, 0.2, -0.1, 3)


def test_moderate_nonhomog_specializes_and_tightens():
    d1, v1, c, n = 0.3, 0.2, 0.5, 4
    a_n = 0.2
    steps = [(d1, v1)] * n
    lower, upper = moderate_nonhomog(steps, c, 1.02, a_n, n)
    assert abs(lower - moderate_lower(d1, v1, c, 1.02, a_n, n)) <= 1e-12
    assert abs(upper - moderate_upper_form(d1, v1, a_n, n)) <= 1e-12
    tight, _ = moderate_nonhomog(steps, c, 1.0, a_n, n)
    loose, _ = moderate_nonhomog(steps, c, 1.02, a_n, n)
    assert tight >= loose
    assert lower <= upper + 1e-12


def test_moderate_nonhomog_fcs_consistency():
    # near-product kernel family versus a product reference, exact d_h check
    from qhtbounds import commutative_fcs, fcs_family

    t = np.array([[0.6, 0.4], [0.4, 0.6]])
    p = np.array([0.5, 0.5])
    base = [[None, None], [None, None]]
    for x in range(2):
        for y in range(2):
            tilt = 0.06 * (1 if (x + y) % 2 == 0 else -1)
            base[x][y] = density_matrix(np.diag([0.5 + tilt, 0.5 - tilt]).astype(complex))
    fam_a = fcs_family(commutative_fcs(t, base, p))
    sigma1 = density_matrix(np.diag([0.72, 0.28]).astype(complex))
    fam_b = product_family(sigma1)
    n_max = 4
    certify_family(fam_a, n_max, "upper")
    certify_family(fam_b, n_max, "upper")
    r_const = max(fam_a.r_upper, fam_b.r_upper)
    steps = []
    c_sup = 0.0
    for k in range(1, n_max + 1):
        marg = fam_a.marginal(k)
        steps.append((rel_entropy(marg, sigma1), info_variance(marg, sigma1)))
        c_sup = max(c_sup, sup_norm_c(marg, sigma1))
    checked = 0
    for n in range(1, n_max + 1):
        a_n = 0.25 * n ** (-1.0 / 3.0)
        eps_n = math.exp(-n * a_n**2)
        try:
            lower, upper = moderate_nonhomog(steps[:n], c_sup, r_const, a_n, n)
        except AdmissibilityError:
            continue
        v_tot = sum(v for _, v in steps[:n])
        gap = sum(d for d, _ in steps[:n]) - lower
        if gap > (math.exp(c_sup) - 1.0) * v_tot / c_sup:
            continue
        exact = -math.log(optimal_type2(fam_a.state(n), fam_b.state(n), eps_n))
        assert lower <= exact + 1e-10
        assert lower <= upper + 1e-12
        checked += 1
    assert checked >= 2
