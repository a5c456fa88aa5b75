import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dqc1pf.lcu import SignedZTerm, amplitudes, decompose, diagonal, eigen_table, term_eigenvalue
from dqc1pf.mrf import MrfModel, energies, random_model
from dqc1pf.oracle import spectrum


def as_tuples(lcu):
    return [(t.sign, set(t.support), t.weight) for t in lcu.terms if not t.padding]


def test_single_node_decomposition(single_node):
    lcu = decompose(single_node)
    assert as_tuples(lcu) == [(-1, set(), 0.5), (1, {0}, 0.5)]
    assert lcu.m == 1 and lcu.m_prime == 2


def test_single_edge_decomposition():
    lcu = decompose(MrfModel(2, {(0, 1): 1.0}))
    assert as_tuples(lcu) == [(-1, set(), 0.25), (1, {0}, 0.25), (1, {1}, 0.25), (-1, {0, 1}, 0.25)]
    assert lcu.m == 2


def test_negative_weights_flip_signs():
    lcu = decompose(MrfModel(2, {(0, 0): -0.5, (0, 1): -0.5}))
    assert as_tuples(lcu) == [
        (1, set(), 0.25), (-1, {0}, 0.25),
        (1, set(), 0.125), (-1, {0}, 0.125), (-1, {1}, 0.125), (1, {0, 1}, 0.125),
    ]


def test_five_node_term_count(five_node):
    lcu = decompose(five_node)
    assert lcu.raw_terms == 38
    assert len(lcu.terms) == 64 and lcu.m == 6
    assert all(t.padding for t in lcu.terms[38:])
    assert lcu.weight_sum == pytest.approx(1.0, abs=1e-12)


def test_rejects_unnormalized():
    with pytest.raises(ValueError):
        decompose(MrfModel(1, {(0, 0): 2.0}))


def test_term_validation():
    with pytest.raises(ValueError):
        SignedZTerm(1, frozenset(), 0.0)
    with pytest.raises(ValueError):
        SignedZTerm(2, frozenset(), 0.1)
    with pytest.raises(ValueError):
        SignedZTerm(1, frozenset({0}), 0.0, padding=True)


def test_term_eigenvalue_examples():
    ident = SignedZTerm(1, frozenset(), 0.3)
    assert all(term_eigenvalue(ident, x) == 1 for x in range(16))
    z0 = SignedZTerm(1, frozenset({0}), 0.3)
    assert term_eigenvalue(z0, 1) == -1 and term_eigenvalue(z0, 2) == 1
    zz = SignedZTerm(-1, frozenset({0, 1}), 0.3)
    assert term_eigenvalue(zz, 3) == -1


def test_eigen_table_matches_scalar(five_node):
    lcu = decompose(five_node)
    table = eigen_table(lcu)
    for l, t in enumerate(lcu.terms):
        assert list(table[l]) == [term_eigenvalue(t, x) for x in range(32)]


def test_terms_are_involutions(five_node):
    table = eigen_table(decompose(five_node))
    assert np.all(table * table == 1)


def test_diagonal_examples(single_node):
    assert np.array_equal(diagonal(decompose(single_node)), [0.0, -1.0])
    ident_only = decompose(MrfModel(3, {(0, 0): 1.0}))
    # drop the Z term: remaining support-free term gives a constant
    diag = np.zeros(8)
    for t in ident_only.terms:
        if not t.support:
            diag += t.sign * t.weight
    assert np.all(diag == diag[0])


@pytest.mark.parametrize("n", range(1, 11))
def test_diagonal_matches_spectrum(n):
    model = random_model(n, 4242 + n, 0.6)
    lcu = decompose(model)
    assert np.allclose(diagonal(lcu), spectrum(model).eigenvalues, atol=1e-12, rtol=0)
    assert np.allclose(diagonal(lcu), -energies(model), atol=1e-12, rtol=0)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 8), seed=st.integers(0, 2**32), density=st.floats(0.05, 1.0))
def test_weights_and_amplitudes(n, seed, density):
    lcu = decompose(random_model(n, seed, density))
    assert abs(lcu.weight_sum - 1.0) <= 1e-12
    assert all(t.weight >= 0 for t in lcu.terms)
    amps = amplitudes(lcu)
    assert amps.shape == (1 << lcu.m,)
    assert abs(np.linalg.norm(amps) - 1.0) <= 1e-12
    assert np.all(amps[[t.padding for t in lcu.terms]] == 0.0)


def test_single_node_amplitudes(single_node):
    assert np.allclose(amplitudes(decompose(single_node)), [np.sqrt(0.5), np.sqrt(0.5)])


def test_term_order_is_deterministic():
    model = random_model(4, 11, 1.0)
    a, b = decompose(model), decompose(model)
    assert a == b
    supports = [sorted(t.support) for t in a.terms if not t.padding]
    assert supports[:8] == [[], [0], [], [1], [], [2], [], [3]]
    assert supports[8:12] == [[], [0], [1], [0, 1]]
