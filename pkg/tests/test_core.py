from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from preflattice.core import (
    Order,
    Profile,
    count_weak_orders,
    enumerate_weak_orders,
    make_order,
    preference_matrix,
    profile_from_dict,
    transition_matrix,
)
from preflattice.errors import (
    CapExceeded,
    DuplicateLabel,
    EmptyGroup,
    InputError,
    MissingLabel,
    UnknownLabel,
)

ORDERED_BELL = {1: 1, 2: 3, 3: 13, 4: 75, 5: 541, 6: 4683}


def test_count_weak_orders_known_values():
    for n, expected in ORDERED_BELL.items():
        assert count_weak_orders(n) == expected


def test_count_weak_orders_rejects_nonpositive():
    with pytest.raises(InputError):
        count_weak_orders(0)


def test_enumeration_matches_count_and_is_distinct():
    labels = ["a", "b", "c", "d"]
    orders = list(enumerate_weak_orders(labels))
    assert len(orders) == 75
    assert len({str(o) for o in orders}) == 75
    for o in orders:
        assert sorted(o.policies) == labels


def test_enumeration_cap():
    with pytest.raises(CapExceeded):
        list(enumerate_weak_orders("abcdefgh"))


def test_enumeration_cap_override(monkeypatch):
    monkeypatch.setenv("PREFLATTICE_MAX_VERTICES", "3")
    with pytest.raises(CapExceeded):
        list(enumerate_weak_orders("abcd"))
    monkeypatch.setenv("PREFLATTICE_MAX_VERTICES", "junk")
    with pytest.raises(InputError):
        list(enumerate_weak_orders("ab"))


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=1, max_value=5))
def test_enumeration_count_property(n):
    labels = [chr(ord("a") + i) for i in range(n)]
    orders = list(enumerate_weak_orders(labels))
    assert len(orders) == count_weak_orders(n)
    assert len(set(orders)) == len(orders)


def test_make_order_canonicalizes_and_prints():
    o = make_order(["w", "x", "y", "z"], [["x", "w"], ["z"], ["y"]])
    assert o.groups == (("w", "x"), ("z",), ("y",))
    assert str(o) == "w=x>z>y"
    assert o.ranks() == {"w": 0, "x": 0, "z": 1, "y": 2}
    assert not o.is_strong()
    assert make_order("ab", [["a"], ["b"]]).is_strong()


def test_make_order_validation():
    with pytest.raises(EmptyGroup):
        make_order([], [])
    with pytest.raises(EmptyGroup):
        make_order("ab", [["a"], [], ["b"]])
    with pytest.raises(DuplicateLabel):
        make_order(["a", "a"], [["a"]])
    with pytest.raises(DuplicateLabel):
        make_order("ab", [["a", "b"], ["a"]])
    with pytest.raises(UnknownLabel):
        make_order("ab", [["a", "c"], ["b"]])
    with pytest.raises(MissingLabel):
        make_order("abc", [["a"], ["b"]])


def test_profile_validation():
    good = make_order("ab", [["a"], ["b"]])
    with pytest.raises(InputError):
        Profile(("a", "b"), ())
    with pytest.raises(DuplicateLabel):
        Profile(("a", "b"), (("v", good), ("v", good)))
    short = make_order("a", [["a"]])
    with pytest.raises(MissingLabel):
        Profile(("a", "b"), (("v", short),))


def test_profile_from_dict_completes_partial_ballots():
    p = profile_from_dict(
        {
            "policies": ["a", "b", "c"],
            "voters": [
                {"id": "v1", "ranking": [["b"]]},
                {"id": "v2", "ranking": [["a"], ["b"], ["c"]]},
            ],
        }
    )
    assert p.completed == ("v1",)
    order = dict(p.voters)["v1"]
    assert order.groups == (("b",), ("a", "c"))


def test_preference_matrix_tie_structure():
    o = make_order("xyz", [["x"], ["y", "z"]])
    m = preference_matrix(o)
    assert m.labels == ("x", "y", "z")
    assert m.rows == ((1, 1, 1), (0, 1, 1), (0, 1, 1))


def test_transition_matrix_rows_are_exact_distributions():
    o = make_order("wxyz", [["w"], ["x"], ["y", "z"]])
    m = transition_matrix(o)
    for row in m.rows:
        assert sum(row) == 1
        assert all(isinstance(x, Fraction) for x in row)
    # top group loops on itself, each lower group climbs one rung
    assert m.entry("w", "w") == 1
    assert m.entry("x", "w") == 1
    assert m.entry("y", "x") == 1
    assert m.entry("z", "x") == 1


def test_transition_matrix_jump_mode_and_validation():
    o = make_order("abc", [["a", "b"], ["c"]])
    m = transition_matrix(o, mode="jump-to-top")
    assert m.entry("c", "a") == Fraction(1, 2)
    assert m.entry("c", "b") == Fraction(1, 2)
    with pytest.raises(InputError):
        transition_matrix(o, mode="sideways")


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=1, max_value=4), st.randoms(use_true_random=False))
def test_transition_rows_stochastic_property(n, rng):
    labels = [chr(ord("a") + i) for i in range(n)]
    rng.shuffle(labels)
    # random tie-group split
    groups = []
    for lab in labels:
        if groups and rng.random() < 0.4:
            groups[-1].append(lab)
        else:
            groups.append([lab])
    o = make_order(sorted(labels), groups)
    for mode in ("climb-one-rung", "jump-to-top"):
        m = transition_matrix(o, mode=mode)
        assert all(sum(row) == 1 for row in m.rows)
