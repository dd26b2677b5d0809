import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import brute_ssyt_count, peel_decomposition, reduce_sl
from qpoisson.qarith import DomainError, QParam
from qpoisson.weights import (
    DominantWeight,
    FusionResult,
    check_sum_rules,
    classical_dim,
    conjugate,
    equality_criterion,
    fundamental,
    lr_coeffs,
    mult_in_self_tensor,
    parse_weight,
    qdim,
    reduce,
    spin,
    trivial,
    weight_multiplicity,
    weights_in_ball,
    zero_weight_dim,
)

HALF = QParam.exact(1, 2)


def W(*rows, n=3):
    return DominantWeight(n, rows)


@pytest.mark.parametrize(
    "partition, expected",
    [((1, 1, 1), ()), ((2, 1, 1), (1,)), ((3, 2), (3, 2)), ((3, 2, 0), (3, 2))],
)
def test_reduce(partition, expected):
    assert reduce(partition, 3) == W(*expected)


def test_reduce_rejects_non_monotone():
    with pytest.raises(DomainError):
        reduce((1, 2), 3)


def test_encoding_roundtrip():
    for w in weights_in_ball(4, 4):
        assert parse_weight(w.encode(), 4) == w
    assert trivial(3).encode() == "0"


def test_conjugate_examples():
    assert conjugate(fundamental(3)) == W(1, 1)
    for j in range(8):
        assert conjugate(spin(j)) == spin(j)
    for n in (2, 3, 5):
        assert conjugate(trivial(n)) == trivial(n)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_conjugate_involution_and_oracle(n):
    for lam in weights_in_ball(n, 4):
        bar = conjugate(lam)
        assert conjugate(bar) == lam
        assert qdim(bar, HALF) == qdim(lam, HALF)
        # trivial occurs exactly once in lam (x) bar(lam)
        assert lr_coeffs(lam, bar)[trivial(n)] == 1


def test_su2_clebsch_gordan():
    for j in range(1, 12):
        assert dict(lr_coeffs(spin(j), spin(1))) == {spin(j - 1): 1, spin(j + 1): 1}
    assert dict(lr_coeffs(spin(0), spin(1))) == {spin(1): 1}


def test_unit():
    for lam in weights_in_ball(3, 4):
        assert dict(lr_coeffs(lam, trivial(3))) == {lam: 1}


def test_su3_fund_squared():
    oracle = {reduce_sl(k, 3): v for k, v in peel_decomposition((1,), (1,), 3).items()}
    assert oracle == {(2,): 1, (1, 1): 1}
    fr = lr_coeffs(fundamental(3), fundamental(3))
    assert dict(fr) == {W(2): 1, W(1, 1): 1}


def test_rank_mismatch():
    with pytest.raises(DomainError):
        lr_coeffs(spin(1), fundamental(3))


def _oracle_sl(lam, mu, n):
    out = {}
    for k, v in peel_decomposition(lam.rows, mu.rows, n).items():
        key = DominantWeight(n, reduce_sl(k, n))
        out[key] = out.get(key, 0) + v
    return out


@pytest.mark.parametrize("n", [2, 3, 4])
def test_lr_matches_weight_convolution_oracle(n):
    ball = weights_in_ball(n, 6)
    for lam, mu in itertools.product(ball, ball):
        if lam.size + mu.size > 6:
            continue
        assert dict(lr_coeffs(lam, mu)) == _oracle_sl(lam, mu, n), (lam, mu)


@pytest.mark.parametrize("n", [3, 4])
def test_sum_rules_and_symmetry(n):
    ball = weights_in_ball(n, 4)
    for lam, mu in itertools.product(ball, ball):
        assert check_sum_rules(lam, mu, HALF)
        assert dict(lr_coeffs(lam, mu)) == dict(lr_coeffs(mu, lam))


def test_frobenius_duality():
    ball = weights_in_ball(3, 3)
    for lam, mu in itertools.product(ball, ball):
        for nu, m in lr_coeffs(lam, mu).items():
            # multiplicity of trivial in lam (x) mu (x) bar(nu)
            triple = sum(
                c * lr_coeffs(rho, conjugate(nu))[trivial(3)] for rho, c in lr_coeffs(lam, mu).items()
            )
            assert triple == m


def test_fusion_result_mapping():
    fr = FusionResult({W(2): 1})
    assert fr[W(1)] == 0 and fr[W(2)] == 1 and len(fr) == 1


def test_weight_multiplicity_examples():
    lam = W(3, 1)
    assert weight_multiplicity(lam, lam.padded()) == 1
    assert weight_multiplicity(spin(2), (1, 1)) == 1
    assert weight_multiplicity(W(2, 1), (1, 1, 1)) == 2
    assert brute_ssyt_count((2, 1), (1, 1, 1)) == 2


@pytest.mark.parametrize("n", [2, 3, 4])
def test_weight_multiplicity_against_brute_force(n):
    for lam in weights_in_ball(n, 5):
        for content in itertools.product(range(lam.size + 1), repeat=n):
            if sum(content) != lam.size:
                continue
            assert weight_multiplicity(lam, content) == brute_ssyt_count(lam.rows, content)


@given(st.permutations([3, 1, 0]), st.sampled_from([W(2, 1), W(3), W(4, 2), W(3, 3)]))
def test_weight_multiplicity_weyl_invariant(target, lam):
    assert weight_multiplicity(lam, target) == weight_multiplicity(lam, sorted(target))


def test_weight_space_dims_sum_to_dim():
    for lam in weights_in_ball(3, 5):
        total = sum(
            weight_multiplicity(lam, c)
            for c in itertools.product(range(lam.size + 1), repeat=3)
            if sum(c) == lam.size
        )
        assert total == classical_dim(lam)


def test_zero_weight_dim_examples():
    for j in range(1, 12, 2):
        assert zero_weight_dim(spin(j)) == 0
    for j in range(0, 12, 2):
        assert zero_weight_dim(spin(j)) == 1
    assert zero_weight_dim(W(2, 1)) == 2
    assert zero_weight_dim(W(4, 2)) == brute_ssyt_count((4, 2), (2, 2, 2)) == 3


def test_mult_in_self_tensor_examples():
    for j in range(2, 10):
        assert mult_in_self_tensor(spin(j), spin(2)) == 1 == zero_weight_dim(spin(2))
    for lam in weights_in_ball(3, 4):
        assert mult_in_self_tensor(lam, trivial(3)) == 1
    assert mult_in_self_tensor(W(1), W(2, 1)) == 1
    assert mult_in_self_tensor(W(2, 1), W(2, 1)) == 2


@pytest.mark.parametrize("n", [2, 3, 4])
def test_multiplicity_estimate(n):
    ball = weights_in_ball(n, 4)
    for U, V in itertools.product(ball, ball):
        N = mult_in_self_tensor(U, V)
        m0 = zero_weight_dim(V)
        assert N <= m0
        if equality_criterion(U, V):
            assert N == m0


def test_equality_criterion_examples():
    for U in weights_in_ball(3, 4):
        assert equality_criterion(U, trivial(3))
    assert equality_criterion(spin(6), spin(2))
    assert not equality_criterion(spin(1), spin(2))
    # explicit S3 orbit of (2,1,0) added to (4,2,0): all six sums non-increasing
    assert equality_criterion(W(4, 2), W(2, 1))
    assert mult_in_self_tensor(W(4, 2), W(2, 1)) == 2
    assert not equality_criterion(W(1), W(2, 1))


def test_ball_contents():
    assert len(weights_in_ball(3, 4)) == 9
    assert [w.size for w in weights_in_ball(2, 5)] == list(range(6))
