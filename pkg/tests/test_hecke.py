import itertools

import numpy as np
import pytest
import sympy as sp
from gmpy2 import mpq

from qpoisson.hecke import (
    ChainOperator,
    check_hecke,
    cond_expect_last,
    dichotomy,
    e_scalar_closed_form,
    embed_gk,
    flip,
    g1_matrix,
    identity,
    invariant_density,
)
from qpoisson.qarith import DomainError, QParam

HALF = QParam.exact(1, 2)
QS = [QParam.exact(1, 3), HALF, QParam.exact(2, 3)]


def test_pi_matrix_n2():
    # basis e0e0, e0e1, e1e0, e1e1
    M = g1_matrix(2, HALF, "pi").matrix
    c = mpq(1, 2) - 2
    expected = [
        [mpq(1, 2), 0, 0, 0],
        [0, c, 1, 0],
        [0, 1, 0, 0],
        [0, 0, 0, mpq(1, 2)],
    ]
    assert M.tolist() == expected


def test_variant_structure():
    n = 3
    P = g1_matrix(n, HALF, "pi").matrix
    Pp = g1_matrix(n, HALF, "pi_plus").matrix
    Pm = g1_matrix(n, HALF, "pi_minus").matrix
    for a, b in itertools.product(range(n), repeat=2):
        i, j = a * n + b, b * n + a
        if a != b:
            assert Pp[i, j] == 1 and Pm[i, j] == -1 and P[i, j] == 1
        # pi_plus puts the (q - 1/q) term where pi does not
        if a > b:
            assert Pp[i, i] == P[j, j] and P[i, i] == 0
    assert np.all(Pp - Pm == 2 * (flip(n, HALF).matrix - np.diag(np.diag(flip(n, HALF).matrix))))


def test_bad_inputs():
    with pytest.raises(DomainError):
        g1_matrix(2, HALF, "sigma")
    with pytest.raises(DomainError):
        g1_matrix(1, HALF)
    with pytest.raises(DomainError):
        embed_gk(g1_matrix(2, HALF), 3, 3)
    with pytest.raises(DomainError):
        ChainOperator(2, 2, np.zeros((3, 3)))
    with pytest.raises(DomainError):
        check_hecke(4, 6, HALF)


@pytest.mark.parametrize("variant", ["pi", "pi_plus"])
def test_classical_limit_is_flip(variant):
    # at q -> 1 the generator tends to the flip operator
    F = flip(3, QParam(0.5)).matrix
    G = g1_matrix(3, QParam(1 - 1e-6), variant).matrix
    assert np.max(np.abs(G - F)) < 1e-5


def test_embedding_locality():
    g = g1_matrix(2, HALF)
    g2 = embed_gk(g, 2, 3).matrix
    I2 = identity(2, 1, HALF)
    assert np.all(g2 == np.kron(I2, g.matrix))
    g1 = embed_gk(g, 1, 4).matrix
    g3 = embed_gk(g, 3, 4).matrix
    assert np.all(g1.dot(g3) == g3.dot(g1))


@pytest.mark.parametrize("variant", ["pi", "pi_plus", "pi_minus"])
@pytest.mark.parametrize("n,m", [(2, 3), (2, 4), (3, 3)])
@pytest.mark.parametrize("q", QS, ids=str)
def test_hecke_relations_exact(variant, n, m, q):
    r = check_hecke(n, m, q, variant)
    assert r.passed(0)
    assert set(r.residuals) >= {"quadratic", "braid"}
    if m >= 4:
        assert "commute" in r.residuals


def test_hecke_relations_float():
    r = check_hecke(3, 3, QParam(0.37), "pi_plus")
    assert r.passed(1e-12) and not r.passed(-1)


def test_broken_generator_fails_quadratic():
    g = g1_matrix(2, HALF)
    g.matrix[0, 0] = mpq(1)
    gens = embed_gk(g, 1, 2).matrix
    c = mpq(1, 2) - 2
    assert np.any(gens.dot(gens) != c * gens + identity(2, 2, HALF))


def test_invariant_density():
    d = invariant_density(2, HALF)
    assert d.weights == (mpq(1, 5), mpq(4, 5))
    for n in (2, 3, 4, 5):
        w = invariant_density(n, QParam.exact(2, 5)).weights
        assert sum(w) == 1 and list(w) == sorted(w)


def test_expectation_of_identity():
    for n in (2, 3):
        dens = invariant_density(n, HALF)
        E = cond_expect_last(ChainOperator(n, 2, identity(n, 2, HALF)), dens)
        assert np.all(E.matrix == identity(n, 1, HALF))


def test_expectation_of_flip_uniform_density():
    # the q = 1 density is uniform and E(flip) = I / n
    for n in (2, 3, 4):
        dens = invariant_density(n, QParam(1 - 1e-9))
        E = cond_expect_last(flip(n, QParam(0.5)), dens).matrix
        assert np.allclose(E, np.eye(n) / n, atol=1e-8)


def test_dichotomy_n2():
    out = dichotomy(2, HALF)
    assert out["pi_plus"]["scalar"] and out["pi_minus"]["scalar"]
    assert out["pi_plus"]["diagonal"] == [mpq(1, 10)] * 2
    assert not out["pi"]["scalar"]
    assert out["pi"]["diagonal"] == [mpq(-11, 10), mpq(2, 5)]


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("q", QS, ids=str)
def test_scalar_matches_closed_form(n, q):
    out = dichotomy(n, q)
    val = e_scalar_closed_form(n, q)
    for v in ("pi_plus", "pi_minus"):
        assert out[v]["scalar"] and out[v]["diagonal"][0] == val
    assert not out["pi"]["scalar"]


def _symbolic_e(n, sign=1):
    # independent build of pi_pm(g_1) with a symbolic q, contracted by hand
    q = sp.symbols("q", positive=True)
    c = (1 - q ** 2) / (1 - q ** (2 * n))
    w = [c * q ** (2 * (n - i)) for i in range(1, n + 1)]
    X = sp.zeros(n * n, n * n)
    for i, j in itertools.product(range(n), repeat=2):
        if i == j:
            X[i * n + i, i * n + i] = q
        else:
            if i > j:
                X[i * n + j, i * n + j] = q - 1 / q
            X[i * n + j, j * n + i] = sign
    E = sp.zeros(n, n)
    for a, b, k in itertools.product(range(n), repeat=3):
        E[a, b] += w[k] * X[a * n + k, b * n + k]
    return q, E.applyfunc(sp.simplify)


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("sign", [1, -1])
def test_closed_form_symbolic(n, sign):
    q, E = _symbolic_e(n, sign)
    target = (1 - q ** 2) / (1 - q ** (2 * n)) * q ** (2 * n - 1)
    for a in range(n):
        assert sp.simplify(E[a, a] - target) == 0
    assert all(E[a, b] == 0 for a in range(n) for b in range(n) if a != b)
    val = e_scalar_closed_form(n, HALF)
    assert sp.Rational(val.numerator, val.denominator) == target.subs(q, sp.Rational(1, 2))
