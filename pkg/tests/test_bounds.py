"""Tests for the efficiently computable goodness bounds."""

import itertools
import math

import numpy as np
import pytest

from l1cert import (
    ArgumentError,
    CorrectorMatrix,
    Family,
    GenSpec,
    ObservationNorm,
    ResourceLimitError,
    SensingMatrix,
    UnsupportedConfigError,
    beta_sufficient_for_alpha,
    compute_alpha1,
    compute_alphas,
    convert_gamma,
    gammahat_exact,
    generate,
    improved_s_from_corrector,
    mutual_incoherence,
    norm_s1,
    performance_limit,
    s_bound_alphas,
    s_bound_mu,
    s_star_exact,
)


# ---------------------------------------------------------------------------
# mutual-incoherence bound


def test_s_bound_mu_direct_value():
    # mu = 1/5 certifies s = 2 (largest s with s*mu/(1-(s-1)mu) < 1)
    M = np.eye(6)
    # craft unit columns with pairwise inner products <= 1/5, one pair at 1/5
    M[:, 1] = np.array([1.0, 2.0, 0, 0, 0, 0])
    M[:, 1] /= np.linalg.norm(M[:, 1])
    A = SensingMatrix(M)
    mu = mutual_incoherence(A)
    cert = s_bound_mu(A)
    assert cert.s_certified == math.ceil((1 + mu) / (2 * mu)) - 1


def test_s_bound_mu_exact_one_fifth():
    # two unit columns at angle arccos(1/5): mu = 1/5 -> s = 2
    c = 0.2
    M = np.array([[1.0, c], [0.0, math.sqrt(1 - c * c)]])
    cert = s_bound_mu(SensingMatrix(M))
    assert mutual_incoherence(SensingMatrix(M)) == pytest.approx(0.2)
    assert cert.s_certified == 2


def test_s_bound_mu_vacuous_when_mu_large():
    A = SensingMatrix(np.array([[1.0, 1.0]]))
    assert s_bound_mu(A).s_certified == 0


def test_s_bound_mu_orthonormal_cap():
    A = SensingMatrix(np.eye(5))
    assert s_bound_mu(A).s_certified == 5


# ---------------------------------------------------------------------------
# alpha_1


def test_alpha1_identity():
    A = SensingMatrix(np.eye(5))
    val, Y = compute_alpha1(A)
    assert val == pytest.approx(0.0, abs=1e-8)
    assert np.allclose(Y.Y, np.eye(5), atol=1e-6)


def test_alpha1_two_ones():
    A = SensingMatrix(np.array([[1.0, 1.0]]))
    val, Y = compute_alpha1(A)
    assert val == pytest.approx(0.5, abs=1e-8)
    assert np.allclose(Y.Y, 0.5, atol=1e-6)


def test_alpha1_matches_oracle():
    A = generate(GenSpec(family=Family.GAUSSIAN, k=3, n=6, seed=11))
    val, _ = compute_alpha1(A)
    assert val == pytest.approx(gammahat_exact(A, 1), abs=1e-6)


def test_alpha1_finite_beta_l2_unsupported():
    A = SensingMatrix(np.eye(3))
    with pytest.raises(UnsupportedConfigError):
        compute_alpha1(A, beta=2.0, norm=ObservationNorm.L2)


def test_alpha1_finite_beta_polyhedral():
    A = generate(GenSpec(family=Family.GAUSSIAN, k=3, n=6, seed=2))
    inf_val, _ = compute_alpha1(A)
    for norm in (ObservationNorm.L1, ObservationNorm.LINF):
        v_small, Y = compute_alpha1(A, beta=0.5, norm=norm)
        v_big, _ = compute_alpha1(A, beta=100.0, norm=norm)
        # tighter dual ball can only increase the bound
        assert v_small >= v_big - 1e-8
        assert v_big >= inf_val - 1e-6
        duals = [norm.dual_of(Y.Y[:, i]) for i in range(A.n)]
        assert max(duals) <= 0.5 + 1e-8


def test_corrector_rejects_dual_ball_violation():
    with pytest.raises(ArgumentError):
        CorrectorMatrix(Y=np.ones((2, 3)), beta=0.5, norm=ObservationNorm.LINF)


# ---------------------------------------------------------------------------
# improved s from a stored corrector


def test_improved_s_identity():
    A = SensingMatrix(np.eye(4))
    Y = CorrectorMatrix(Y=np.eye(4), beta=math.inf)
    assert improved_s_from_corrector(A, Y) == 4


def test_improved_s_at_least_half_over_alpha1():
    A = generate(GenSpec(family=Family.GAUSSIAN, k=8, n=24, seed=3))
    val, Y = compute_alpha1(A)
    s_imp = improved_s_from_corrector(A, Y)
    s_plain = max(s for s in range(0, A.n + 1) if s * val < 0.5)
    assert s_imp >= s_plain


def test_improved_s_matches_direct_rescan():
    A = generate(GenSpec(family=Family.GAUSSIAN, k=4, n=16, seed=5))
    _, Y = compute_alpha1(A)
    s_imp = improved_s_from_corrector(A, Y)
    R = Y.residual(A)
    ok = [s for s in range(1, 17)
          if max(norm_s1(R[:, j], s) for j in range(16)) < 0.5]
    assert s_imp == (max(ok) if ok else 0)


def test_improved_s_shape_mismatch():
    A = SensingMatrix(np.eye(3))
    with pytest.raises(ArgumentError):
        improved_s_from_corrector(A, CorrectorMatrix(Y=np.eye(4),
                                                     beta=math.inf))


# ---------------------------------------------------------------------------
# alpha_s


def test_alphas_s1_equals_alpha1():
    A = generate(GenSpec(family=Family.GAUSSIAN, k=3, n=8, seed=7))
    a1, _ = compute_alpha1(A)
    as1, _ = compute_alphas(A, 1)
    assert as1 == pytest.approx(a1, abs=1e-8)


def test_alphas_identity_zero():
    A = SensingMatrix(np.eye(4))
    for s in (1, 2, 4):
        val, _ = compute_alphas(A, s)
        assert val == pytest.approx(0.0, abs=1e-8)


def test_alphas_oracle_sandwich():
    A = generate(GenSpec(family=Family.GAUSSIAN, k=3, n=8, seed=9))
    a1, _ = compute_alpha1(A)
    a2, Y = compute_alphas(A, 2)
    assert a2 >= gammahat_exact(A, 2) - 1e-6
    assert a2 <= 2 * a1 + 1e-8
    # witness really achieves the value
    R = Y.residual(A)
    worst = max(norm_s1(R[:, j], 2) for j in range(8))
    assert worst == pytest.approx(a2, abs=1e-6)


def test_alphas_size_guard():
    A = generate(GenSpec(family=Family.GAUSSIAN, k=8, n=64, seed=0))
    with pytest.raises(ResourceLimitError):
        compute_alphas(A, 2, lp_limit=10_000)


def test_alphas_monotone_in_s():
    A = generate(GenSpec(family=Family.GAUSSIAN, k=4, n=10, seed=13))
    vals = [compute_alphas(A, s)[0] for s in (1, 2, 3)]
    assert all(a <= b + 1e-8 for a, b in zip(vals, vals[1:]))


def test_alphas_monotone_in_beta():
    A = generate(GenSpec(family=Family.GAUSSIAN, k=3, n=7, seed=15))
    grid = [0.5, 1.0, 2.0, 8.0]
    for norm in (ObservationNorm.L1, ObservationNorm.LINF):
        vals = [compute_alphas(A, 2, beta=b, norm=norm)[0] for b in grid]
        assert all(a >= b - 1e-8 for a, b in zip(vals, vals[1:]))


# ---------------------------------------------------------------------------
# incremental certification


def test_s_bound_alphas_identity():
    A = SensingMatrix(np.eye(5))
    cert = s_bound_alphas(A)
    assert cert.s_certified == 5


def test_s_bound_alphas_two_ones():
    A = SensingMatrix(np.array([[1.0, 1.0]]))
    assert s_bound_alphas(A).s_certified == 0


def test_bound_chain_ordering():
    for seed in range(4):
        A = generate(GenSpec(family=Family.GAUSSIAN, k=4, n=12, seed=seed))
        s_mu = s_bound_mu(A).s_certified
        _, Y = compute_alpha1(A)
        s_a1 = improved_s_from_corrector(A, Y)
        cert = s_bound_alphas(A)
        assert s_mu <= s_a1 <= cert.s_certified
        assert cert.s_certified <= s_star_exact(A)


def test_s_bound_alphas_witness_invariant():
    A = generate(GenSpec(family=Family.GAUSSIAN, k=4, n=12, seed=21))
    cert = s_bound_alphas(A)
    if cert.s_certified >= 1:
        R = cert.witness.residual(A)
        worst = max(norm_s1(R[:, j], cert.s_certified) for j in range(A.n))
        assert worst < 0.5


# ---------------------------------------------------------------------------
# conversions, performance limit, beta calibration


def test_convert_gamma_formula():
    pair = convert_gamma(gammahat=1.0 / 3.0, beta=1.0)
    assert pair.gamma == pytest.approx(0.5, abs=1e-12)
    assert pair.beta_gamma == pytest.approx(1.5, abs=1e-12)


def test_convert_gamma_zero():
    pair = convert_gamma(gamma=0.0, beta=2.0)
    assert pair.gammahat == 0.0
    assert pair.beta_gammahat == 2.0


def test_convert_gamma_round_trip():
    rng = np.random.default_rng(8)
    for _ in range(20):
        g = rng.uniform(0.0, 0.99)
        beta = rng.uniform(0.1, 5.0)
        pair = convert_gamma(gamma=g, beta=beta)
        back = convert_gamma(gammahat=pair.gammahat, beta=pair.beta_gammahat)
        assert back.gamma == pytest.approx(g, abs=1e-12)
        assert back.beta_gamma == pytest.approx(beta, abs=1e-12)


def test_convert_gamma_out_of_range():
    with pytest.raises(ArgumentError):
        convert_gamma(gamma=1.0)
    with pytest.raises(ArgumentError):
        convert_gamma(gammahat=0.5)


def test_performance_limit_saturates():
    lim = performance_limit(4, 128, 100)
    assert lim.applicable
    assert lim.value == 0.5


def test_performance_limit_inapplicable():
    lim = performance_limit(4, 100, 3)
    assert not lim.applicable
    assert lim.value == 0.0


def test_performance_limit_formula():
    lim = performance_limit(4, 128, 3)
    assert lim.value == pytest.approx(9.0 / (4 * (3 + math.sqrt(8))),
                                      abs=1e-12)


def test_beta_sufficient_identity():
    A = SensingMatrix(np.eye(4))
    assert beta_sufficient_for_alpha(A, ObservationNorm.L2) == pytest.approx(
        1.5 * 2.0, abs=1e-9)
    assert beta_sufficient_for_alpha(A, ObservationNorm.L1) == pytest.approx(
        1.5, abs=1e-9)


def test_beta_sufficient_l2_safe_choice():
    # the pivoted submatrix gives a valid (possibly loose) bound: it can
    # only exceed the best achievable over all k x k submatrices
    A = generate(GenSpec(family=Family.GAUSSIAN, k=4, n=8, seed=17))
    val = beta_sufficient_for_alpha(A, ObservationNorm.L2)
    best = math.inf
    for cols in itertools.combinations(range(8), 4):
        sub = A.entries[:, cols]
        smin = np.linalg.svd(sub, compute_uv=False)[-1]
        if smin > 1e-12:
            best = min(best, 1.5 * 2.0 / smin)
    assert val >= best - 1e-9


def test_beta_sufficient_rank_deficient():
    A = SensingMatrix(np.vstack([np.ones((2, 3))]))
    with pytest.raises(ArgumentError):
        beta_sufficient_for_alpha(A, ObservationNorm.L2)


def test_certificate_serialization(tmp_path):
    A = generate(GenSpec(family=Family.GAUSSIAN, k=3, n=6, seed=23))
    cert = s_bound_alphas(A)
    path = tmp_path / "cert.json"
    cert.save(path)
    import json
    doc = json.loads(path.read_text())
    assert doc["kind"] == cert.kind
    assert doc["s_certified"] == cert.s_certified
    assert "schema_version" in doc
