"""Canonical preference representations.

A weak order is a ranked partition of the policy set: tie-groups listed
best first. Strong orders are the tie-free special case. Profiles collect
one order per voter over a shared policy set. Bigraphs hold directed
preference edges D and undirected indifference edges C over the same
labels. Counting and enumeration of weak orders (ordered Bell numbers)
live here too, since everything downstream leans on them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    CapExceeded,
    DuplicateLabel,
    EmptyGroup,
    InputError,
    MissingLabel,
    UnknownLabel,
    vertex_cap,
)

ENUMERATION_CAP = 7


@dataclass(frozen=True)
class Order:
    """A weak preference order: tie-groups of labels, best first."""

    groups: tuple[tuple[str, ...], ...]

    @property
    def policies(self) -> tuple[str, ...]:
        return tuple(p for g in self.groups for p in g)

    def is_strong(self) -> bool:
        return all(len(g) == 1 for g in self.groups)

    def ranks(self) -> dict[str, int]:
        """Label -> tie-group index (0 is best)."""
        return {p: i for i, g in enumerate(self.groups) for p in g}

    def __str__(self) -> str:
        return ">".join("=".join(g) for g in self.groups)


def make_order(policies, groups) -> Order:
    """Validate tie-groups against a policy set and build an Order.

    Groups must be non-empty, disjoint, and cover the policy set exactly.
    Labels inside a group are stored sorted so equal orders compare equal.
    """
    labels = list(policies)
    if not labels:
        raise EmptyGroup("policy set is empty")
    known = set()
    for p in labels:
        if p in known:
            raise DuplicateLabel(f"duplicate policy label {p!r}")
        known.add(p)

    seen = set()
    canonical = []
    for g in groups:
        g = list(g)
        if not g:
            raise EmptyGroup("empty tie-group")
        for p in g:
            if p not in known:
                raise UnknownLabel(f"label {p!r} is not in the policy set")
            if p in seen:
                raise DuplicateLabel(f"label {p!r} appears in more than one group")
            seen.add(p)
        canonical.append(tuple(sorted(g)))
    if seen != known:
        missing = sorted(known - seen)
        raise MissingLabel(f"order does not cover: {', '.join(missing)}")
    return Order(tuple(canonical))


@dataclass(frozen=True)
class Profile:
    """One weak order per voter, all over the same policy set."""

    policies: tuple[str, ...]
    voters: tuple[tuple[str, Order], ...]
    completed: tuple[str, ...] = ()  # voter ids whose ballots were padded

    def __post_init__(self):
        if not self.voters:
            raise InputError("profile needs at least one voter")
        ids = set()
        pol = set(self.policies)
        for vid, order in self.voters:
            if vid in ids:
                raise DuplicateLabel(f"duplicate voter id {vid!r}")
            ids.add(vid)
            if set(order.policies) != pol:
                raise MissingLabel(f"voter {vid!r} does not cover the policy set")

    @property
    def n_voters(self) -> int:
        return len(self.voters)

    def orders(self):
        return [order for _, order in self.voters]


def profile_from_dict(data) -> Profile:
    """Parse the profile JSON schema.

    ``{"policies": [...], "voters": [{"id": ..., "ranking": [[...], ...]}]}``
    where ranking lists tie-groups best first. Partial rankings are
    completed by appending one bottom tie-group of the unranked policies;
    such voters are flagged in ``completed``.
    """
    try:
        policies = list(data["policies"])
        voters_raw = list(data["voters"])
    except (KeyError, TypeError) as exc:
        raise InputError(f"profile JSON needs 'policies' and 'voters': {exc}") from None
    pol_set = set(policies)
    if len(pol_set) != len(policies):
        raise DuplicateLabel("duplicate policy label in profile")
    voters = []
    completed = []
    for entry in voters_raw:
        try:
            vid = entry["id"]
            ranking = [list(g) for g in entry["ranking"]]
        except (KeyError, TypeError) as exc:
            raise InputError(f"voter entry needs 'id' and 'ranking': {exc}") from None
        ranked = [p for g in ranking for p in g]
        leftover = sorted(pol_set - set(ranked))
        if leftover:
            ranking.append(leftover)
            completed.append(vid)
        voters.append((vid, make_order(policies, ranking)))
    return Profile(tuple(policies), tuple(voters), tuple(completed))


@dataclass(frozen=True)
class Bigraph:
    """Directed preference edges D plus undirected indifference edges C."""

    vertices: tuple[str, ...]
    d_edges: frozenset  # of (u, v) pairs
    c_edges: frozenset  # of frozenset({u, v}) pairs

    def __post_init__(self):
        known = set(self.vertices)
        if len(known) != len(self.vertices):
            raise DuplicateLabel("duplicate bigraph vertex")
        unordered_d = set()
        for u, v in self.d_edges:
            if u == v:
                raise InputError(f"self-loop {u!r} in D")
            if u not in known or v not in known:
                raise UnknownLabel(f"edge ({u!r},{v!r}) uses unknown vertex")
            unordered_d.add(frozenset((u, v)))
        for pair in self.c_edges:
            if len(pair) != 2:
                raise InputError("C edges join two distinct vertices")
            if not pair <= known:
                raise UnknownLabel(f"C edge {set(pair)!r} uses unknown vertex")
            if pair in unordered_d:
                raise InputError(f"pair {set(pair)!r} is in both C and D")


def bigraph(vertices, d_edges=(), c_edges=()) -> Bigraph:
    return Bigraph(
        tuple(vertices),
        frozenset((u, v) for u, v in d_edges),
        frozenset(frozenset(p) for p in c_edges),
    )


@dataclass(frozen=True)
class LabeledMatrix:
    """A square matrix with row/column labels; entries stay exact when possible."""

    labels: tuple[str, ...]
    rows: tuple[tuple, ...]

    def __post_init__(self):
        n = len(self.labels)
        if len(self.rows) != n or any(len(r) != n for r in self.rows):
            raise InputError("matrix shape does not match its labels")

    def as_floats(self):
        return [[float(x) for x in row] for row in self.rows]

    def entry(self, u, v):
        i = self.labels.index(u)
        j = self.labels.index(v)
        return self.rows[i][j]


def preference_matrix(order: Order) -> LabeledMatrix:
    """0/1 adjacency of a weak order.

    M[i][j] = 1 iff i = j, i is strictly preferred to j, or i is tied
    with j. Indifference therefore contributes edges both ways, and the
    strict part is transitively closed by construction.
    """
    labels = order.policies
    rank = order.ranks()
    rows = tuple(
        tuple(1 if rank[a] <= rank[b] else 0 for b in labels) for a in labels
    )
    return LabeledMatrix(labels, rows)


def transition_matrix(order: Order, mode: str = "climb-one-rung") -> LabeledMatrix:
    """Row-stochastic matrix of the hill-climbing walk a voter's order induces.

    climb-one-rung (default): from a policy in group g, move uniformly over
    the members of group g-1; the top group moves uniformly over itself.
    jump-to-top: every policy moves uniformly over the top group.
    """
    if mode not in ("climb-one-rung", "jump-to-top"):
        raise InputError(f"unknown transition mode {mode!r}")
    labels = order.policies
    idx = {p: i for i, p in enumerate(labels)}
    n = len(labels)
    rows = [[Fraction(0)] * n for _ in labels]
    for gi, group in enumerate(order.groups):
        if mode == "jump-to-top" or gi == 0:
            target = order.groups[0]
        else:
            target = order.groups[gi - 1]
        share = Fraction(1, len(target))
        for p in group:
            for q in target:
                rows[idx[p]][idx[q]] = share
    return LabeledMatrix(labels, tuple(tuple(r) for r in rows))


def count_weak_orders(n: int) -> int:
    """Number of weak orders on n policies (ordered Bell numbers)."""
    if n < 1:
        raise InputError("need at least one policy")
    a = [1]
    for m in range(1, n + 1):
        a.append(sum(math.comb(m, k) * a[m - k] for k in range(1, m + 1)))
    return a[n]


def enumerate_weak_orders(policies):
    """Yield every weak order over the policies exactly once.

    Deterministic order: each label is inserted, in input order, either
    into an existing tie-group or as a new group at every possible rank.
    Capped (default 7 policies) because the count grows like n!/(2 ln2^(n+1)).
    """
    labels = list(policies)
    if len(set(labels)) != len(labels):
        raise DuplicateLabel("duplicate policy label")
    if not labels:
        raise EmptyGroup("policy set is empty")
    cap = vertex_cap(ENUMERATION_CAP)
    if len(labels) > cap:
        raise CapExceeded(
            f"enumeration over {len(labels)} policies exceeds the cap of {cap}"
        )

    def build(i, groups):
        if i == len(labels):
            yield Order(tuple(tuple(sorted(g)) for g in groups))
            return
        lab = labels[i]
        for gi in range(len(groups)):
            yield from build(i + 1, groups[:gi] + [groups[gi] + [lab]] + groups[gi + 1:])
        for gi in range(len(groups) + 1):
            yield from build(i + 1, groups[:gi] + [[lab]] + groups[gi:])

    yield from build(1, [[labels[0]]])
