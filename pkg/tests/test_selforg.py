import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from preflattice.core import enumerate_weak_orders, make_order
from preflattice.errors import (
    EmptyGroup,
    InputError,
    SelfFollowup,
    UnknownGroup,
    UnknownLabel,
    UnknownParent,
    UnmappedThread,
)
from preflattice.selforg import (
    APATHY,
    ENTRY,
    GroupAssignment,
    PostingEvent,
    decode_order,
    derive_precedents,
    elect_managers,
    encode_order,
    extract_prefs,
    group_order,
    group_topology,
    groups_to_field,
    partition_subscribers,
    read_postings_csv,
    referral_check,
    validate_protocol,
)

E = PostingEvent


def base_events():
    """alice opens m1, bob answers and is acknowledged; carol's m2 stays
    unanswered; bob opens m3, dave answers but nobody valid acks."""
    return [
        E(t=1, subscriber="alice", thread="m1", kind="initiate"),
        E(t=2, subscriber="bob", thread="m1", kind="followup", parent=1),
        E(t=3, subscriber="alice", thread="m1", kind="ack", parent=2),
        E(t=4, subscriber="carol", thread="m2", kind="initiate"),
        E(t=5, subscriber="bob", thread="m3", kind="initiate"),
        E(t=6, subscriber="dave", thread="m3", kind="followup", parent=5),
        E(t=7, subscriber="carol", thread="m3", kind="ack", parent=6),
    ]


THREAD_MAP = {"m1": "a", "m2": "b", "m3": "c"}


def test_posting_event_validation():
    with pytest.raises(InputError):
        E(t=1, subscriber="s", thread="m", kind="shout")
    with pytest.raises(InputError):
        E(t=1, subscriber="s", thread="m", kind="initiate", parent=0)
    with pytest.raises(InputError):
        E(t=2, subscriber="s", thread="m", kind="followup")


def test_ledger_counts_and_flags():
    ledger = validate_protocol(base_events())
    counted = {(e.t, e.subscriber) for e in ledger.counted}
    assert counted == {(1, "alice"), (2, "bob"), (5, "bob")}
    flags = {e.t: flag for e, flag in ledger.flags.items()}
    assert flags == {
        4: "unanswered-initiation",
        6: "unacknowledged-followup",
        7: "ack-by-non-recipient",
    }
    assert ledger.activity("bob") == 2
    assert ledger.activity("dave") == 0
    assert ledger.earliest_counted("alice") == 1
    assert ledger.earliest_counted("dave") is None
    assert ledger.counted_threads("bob") == {"m1", "m3"}


def test_self_followup_is_an_error():
    events = [
        E(t=1, subscriber="eve", thread="m9", kind="initiate"),
        E(t=2, subscriber="eve", thread="m9", kind="followup", parent=1),
    ]
    with pytest.raises(SelfFollowup):
        validate_protocol(events)


def test_duplicate_initiation_flagged():
    events = base_events() + [
        E(t=8, subscriber="dave", thread="m1", kind="initiate"),
    ]
    ledger = validate_protocol(events)
    flags = {e.t: flag for e, flag in ledger.flags.items()}
    assert flags[8] == "duplicate-initiation"


def test_ack_of_non_followup_flagged():
    events = [
        E(t=1, subscriber="alice", thread="m1", kind="initiate"),
        E(t=2, subscriber="bob", thread="m1", kind="followup", parent=1),
        E(t=3, subscriber="alice", thread="m1", kind="ack", parent=1),
    ]
    ledger = validate_protocol(events)
    flags = {e.t: flag for e, flag in ledger.flags.items()}
    assert flags[3] == "ack-of-non-followup"


def test_followup_of_ack_is_an_error():
    events = [
        E(t=1, subscriber="alice", thread="m1", kind="initiate"),
        E(t=2, subscriber="bob", thread="m1", kind="followup", parent=1),
        E(t=3, subscriber="alice", thread="m1", kind="ack", parent=2),
        E(t=4, subscriber="carol", thread="m1", kind="followup", parent=3),
    ]
    with pytest.raises(InputError):
        validate_protocol(events)


def test_unknown_parent_is_an_error():
    events = [
        E(t=1, subscriber="alice", thread="m1", kind="initiate"),
        E(t=2, subscriber="bob", thread="m1", kind="followup", parent=9),
    ]
    with pytest.raises(UnknownParent):
        validate_protocol(events)


def test_read_postings_csv():
    text = (
        "t,subscriber,thread,kind,parent\n"
        "1,alice,m1,initiate,\n"
        "2,bob,m1,followup,1\n"
    )
    events = read_postings_csv(io.StringIO(text))
    assert events[0] == E(t=1, subscriber="alice", thread="m1", kind="initiate")
    assert events[1].parent == 1
    with pytest.raises(InputError):
        read_postings_csv(io.StringIO("1,alice,m1\n"))
    with pytest.raises(InputError):
        read_postings_csv(io.StringIO("x,alice,m1,initiate,\n"))


def test_extract_prefs_two_ply():
    ledger = validate_protocol(base_events())
    prefs = extract_prefs(ledger, THREAD_MAP)
    assert str(prefs["bob"]) == f"a=c>b={APATHY}"
    assert str(prefs["alice"]) == f"a>b=c={APATHY}"
    # carol's only posting went uncounted, so she is fully apathetic
    assert len(prefs["carol"].groups) == 1


def test_extract_prefs_unmapped_thread():
    ledger = validate_protocol(base_events())
    with pytest.raises(UnmappedThread):
        extract_prefs(ledger, {"m1": "a"})


def test_partition_and_entry_group():
    ledger = validate_protocol(base_events())
    prefs = extract_prefs(ledger, THREAD_MAP)
    assignment = partition_subscribers(prefs)
    assert assignment.groups == {"a": ("alice",), "a+c": ("bob",)}
    assert assignment.primary["carol"] == ENTRY
    assert assignment.entry == ("alice", "bob", "carol", "dave")
    assert assignment.populated == 2


def test_elect_managers_ranking():
    ledger = validate_protocol(base_events())
    prefs = extract_prefs(ledger, THREAD_MAP)
    assignment = partition_subscribers(prefs)
    managers = elect_managers(assignment, ledger, fraction=0.5)
    assert managers == {"a": ("alice",), "a+c": ("bob",)}
    with pytest.raises(InputError):
        elect_managers(assignment, ledger, fraction=0.0)
    hollow = GroupAssignment(
        interests=("a",), groups={"a": ()}, entry=(), primary={}
    )
    with pytest.raises(EmptyGroup):
        elect_managers(hollow, ledger, fraction=0.5)


def test_group_topology_lattice_and_tree():
    lattice = group_topology(3, mode="subset-lattice")
    assert len(lattice.vertices) == 7
    # every containment, not just covers: 2*(6 + 3 + 3) directions
    assert len(lattice.edges) == 24
    tree = group_topology(3, mode="binary-tree")
    degree = {v: 0 for v in tree.vertices}
    for u, _ in tree.edges:
        degree[u] += 1
    assert degree["a"] == 2
    assert degree["a+b"] == 3
    assert degree["a+b+c"] == 3
    with pytest.raises(InputError):
        group_topology(3, mode="pyramid")
    with pytest.raises(InputError):
        group_topology(1)


def test_group_order_from_cross_activity():
    activity = {
        "alice": {"a": 5, "b": 1, "c": 0},
        "bob": {"a": 3, "b": 1, "c": 1},
        "carol": {"a": 2, "b": 2, "c": 0},
    }
    order = group_order(activity)
    assert str(order).startswith("a>")
    with pytest.raises(InputError):
        group_order({})


def test_referral_check_rules():
    topology = group_topology(2, mode="subset-lattice")
    ledger = validate_protocol(base_events())
    prefs = extract_prefs(ledger, {"m1": "a", "m2": "b", "m3": "b"})
    assignment = partition_subscribers(prefs)
    # alice's primary is "a"; "a+b" contains it, so posting there is fine
    ok, reason = referral_check("alice", "a+b", topology, assignment)
    assert ok and reason == "member of an adjacent group"
    ok, reason = referral_check("alice", "a", topology, assignment)
    assert ok and reason == "member of target group"
    ok, reason = referral_check("carol", ENTRY, topology, assignment)
    assert ok and reason == "entry-group posting"
    ok, reason = referral_check("carol", "b", topology, assignment)
    assert not ok
    with pytest.raises(UnknownLabel):
        referral_check("mallory", "a", topology, assignment)
    with pytest.raises(UnknownGroup):
        referral_check("alice", "z", topology, assignment)


def test_precedents_merge_then_split():
    # identical member sets merge into one role
    rules, ordering, merges = derive_precedents(
        [("u1", "C"), ("u1", "D")]
    )
    assert rules == [] and ordering == ()
    assert merges == (("C", "D"),)
    # granting C to one more accessor splits them and orders C above D
    rules, ordering, merges = derive_precedents(
        [("u1", "C"), ("u1", "D"), ("u2", "C")]
    )
    assert merges == ()
    assert len(rules) == 1
    rule = rules[0]
    assert (rule.antecedent, rule.consequent) == ("D", "C")
    # the witness is the consequent-role grant to the antecedent's member
    assert rule.provenance == (("u1", "C"),)
    assert ordering == (("C", "D"),)


def test_precedents_accept_dict_records():
    rules, ordering, merges = derive_precedents(
        [{"accessor": "u1", "role": "C"}, {"accessor": "u2", "role": "C"},
         {"accessor": "u1", "role": "D"}]
    )
    assert ordering == (("C", "D"),)
    with pytest.raises(InputError):
        derive_precedents([{"accessor": "u1"}])


def test_encode_decode_round_trip_small():
    order = make_order("abc", [["b"], ["a", "c"]])
    codes = encode_order(order)
    assert codes == (-1, 0, 1)  # pairs (a,b), (a,c), (b,c)
    assert decode_order("abc", codes) == order
    strict = decode_order("abc", (1, 1, 1))  # a>b, a>c, b>c
    assert str(strict) == "a>b>c"
    with pytest.raises(InputError):
        decode_order("abc", (1, 1))
    with pytest.raises(InputError):
        decode_order("abc", (2, 0, 0))
    with pytest.raises(InputError):
        decode_order("abc", (1, -1, 1))  # a>b, c>a, b>c is a cycle


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=1, max_value=120))
def test_encode_decode_round_trip_property(idx):
    orders = list(enumerate_weak_orders("abcd"))
    order = orders[idx % len(orders)]
    assert decode_order("abcd", encode_order(order)) == order


def test_groups_to_field_shape():
    field = groups_to_field(3, mode="subset-lattice")
    assert field.topology.kind == "group-subset-lattice"
    assert len(field.agents) == 7
    assert field.config.traits_per_feature == 2
    # membership vectors are binary and unique
    seen = set()
    for vec in field.agents:
        assert set(vec) <= {0, 1}
        seen.add(tuple(vec))
    assert len(seen) == 7
