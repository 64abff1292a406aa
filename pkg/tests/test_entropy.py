from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from preflattice.core import LabeledMatrix, make_order, profile_from_dict
from preflattice.entropy import (
    markov_aggregate,
    markov_order,
    mean_preference_matrix,
    shannon_entropy,
    spectral_radius,
    stationary_distribution,
    topological_entropy,
)
from preflattice.errors import NotADistribution

import worked_example as wx


def one_voter(policies, groups):
    return profile_from_dict(
        {"policies": list(policies),
         "voters": [{"id": "v", "ranking": groups}]}
    )


def test_spectral_radius_triangular():
    m = LabeledMatrix(("a", "b"), ((2, 1), (0, 3)))
    assert spectral_radius(m) == pytest.approx(3.0, abs=1e-9)


def test_topological_entropy_strict_order_is_zero():
    p = one_voter("xyz", [["x"], ["y"], ["z"]])
    assert topological_entropy(p).value == 0.0


def test_topological_entropy_single_tie():
    p = one_voter("xyz", [["x"], ["y", "z"]])
    ev = topological_entropy(p)
    assert ev.base == 3
    assert ev.value == pytest.approx(wx.PARADOX_TOPO_ENTROPY, abs=1e-9)


def test_topological_entropy_total_indifference_exact():
    p = one_voter("xyz", [["x", "y", "z"]])
    assert topological_entropy(p).value == 1.0


def test_topological_entropy_paradox(paradox):
    ev = topological_entropy(paradox)
    assert ev.value == pytest.approx(wx.PARADOX_TOPO_ENTROPY, abs=1e-9)
    assert spectral_radius(mean_preference_matrix(paradox)) == pytest.approx(
        2.0, abs=1e-9
    )


def test_stationary_borda_exact(borda4):
    sr = stationary_distribution(markov_aggregate(borda4))
    assert sr.exact and sr.method == "rational-projector"
    assert sr.labels == ("w", "x", "y", "z")
    assert sr.distribution == wx.BORDA4_STATIONARY


def test_stationary_restricted_exact(borda3):
    sr = stationary_distribution(markov_aggregate(borda3))
    assert sr.distribution == wx.BORDA3_STATIONARY


def test_stationary_paradox_uniform(paradox):
    sr = stationary_distribution(markov_aggregate(paradox))
    assert sr.distribution == (Fraction(1, 3),) * 3


def test_stationary_periodic_chain():
    m = LabeledMatrix(("a", "b"), ((Fraction(0), Fraction(1)),
                                   (Fraction(1), Fraction(0))))
    sr = stationary_distribution(m)
    assert sr.exact
    assert sr.distribution == (Fraction(1, 2), Fraction(1, 2))


def test_stationary_reducible_absorbing():
    m = LabeledMatrix(
        ("a", "b", "c"),
        (
            (Fraction(1), Fraction(0), Fraction(0)),
            (Fraction(0), Fraction(1), Fraction(0)),
            (Fraction(1, 2), Fraction(1, 2), Fraction(0)),
        ),
    )
    sr = stationary_distribution(m)
    assert sr.distribution == (Fraction(1, 2), Fraction(1, 2), Fraction(0))


def test_stationary_large_matrix_uses_floats():
    n = 13
    labels = tuple(f"s{i}" for i in range(n))
    rows = tuple(
        tuple(1 if j == (i + 1) % n else 0 for j in range(n)) for i in range(n)
    )
    sr = stationary_distribution(LabeledMatrix(labels, rows))
    assert not sr.exact and sr.method == "least-squares"
    for x in sr.distribution:
        assert x == pytest.approx(1 / n, abs=1e-8)


def test_stationary_rejects_bad_rows():
    with pytest.raises(NotADistribution):
        stationary_distribution(LabeledMatrix(("a", "b"), ((1, 1), (0, 1))))
    with pytest.raises(NotADistribution):
        stationary_distribution(
            LabeledMatrix(("a", "b"), ((Fraction(3, 2), Fraction(-1, 2)), (0, 1)))
        )


def test_shannon_entropy_fixtures():
    assert shannon_entropy(wx.BORDA4_STATIONARY, base=4).value == pytest.approx(
        wx.BORDA4_SHANNON, abs=1e-12
    )
    assert shannon_entropy(wx.BORDA3_STATIONARY, base=3).value == pytest.approx(
        wx.BORDA3_SHANNON, abs=1e-12
    )
    assert shannon_entropy((1, 0, 0), base=3).value == 0.0
    with pytest.raises(NotADistribution):
        shannon_entropy((0.7, 0.7), base=2)


def test_markov_order_groups_ties(borda4, paradox):
    assert str(markov_order(stationary_distribution(markov_aggregate(borda4)))) == "w>x>y>z"
    assert str(markov_order(stationary_distribution(markov_aggregate(paradox)))) == "x=y=z"


@st.composite
def stochastic_matrix(draw):
    n = draw(st.integers(min_value=2, max_value=5))
    rows = []
    for _ in range(n):
        weights = draw(
            st.lists(st.integers(min_value=0, max_value=9), min_size=n, max_size=n)
            .filter(lambda w: sum(w) > 0)
        )
        total = sum(weights)
        rows.append(tuple(Fraction(w, total) for w in weights))
    labels = tuple(f"s{i}" for i in range(n))
    return LabeledMatrix(labels, tuple(rows))


@settings(max_examples=60, deadline=None)
@given(stochastic_matrix())
def test_stationary_is_invariant_distribution(m):
    sr = stationary_distribution(m)
    y = sr.distribution
    assert sr.exact
    assert sum(y) == 1
    assert all(x >= 0 for x in y)
    n = len(y)
    for j in range(n):
        assert sum(y[i] * m.rows[i][j] for i in range(n)) == y[j]
