"""Maximum-likelihood preference orders from paired-comparison data.

Pairwise tallies, multinomial estimates, the bigraph the estimates induce,
order-constrained (restricted) estimates, per-pair uncertainty, and the
ranking of candidate orders by total uncertainty.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction

from .core import Bigraph, Order, enumerate_weak_orders
from .errors import (
    CapExceeded,
    InputError,
    MismatchedPairs,
    MissingLabel,
    SelfComparison,
    vertex_cap,
)
from .graphalg import maximal_circuit_free_subbigraphs

CANDIDATE_CAP = 6

OUTCOMES = (">", "<", "=")


@dataclass(frozen=True)
class ComparisonTally:
    """Counts per unordered pair: wins of the smaller label, wins of the
    larger, ties. Pairs with no trials are absent."""

    counts: dict  # (a, b) sorted -> (s_ab, s_ba, t_ab)

    def pairs(self):
        return sorted(self.counts)

    def n(self, pair):
        return sum(self.counts[pair])

    def labels(self):
        out = set()
        for a, b in self.counts:
            out.add(a)
            out.add(b)
        return tuple(sorted(out))


@dataclass(frozen=True)
class EstimatePoint:
    """Per pair (a, b) sorted: (pi_ab, pi_ba, gamma) as exact rationals
    summing to 1."""

    estimates: dict  # (a, b) -> (Fraction, Fraction, Fraction)


def estimate_point(mapping) -> EstimatePoint:
    """Validate and build an EstimatePoint from pair -> three shares."""
    out = {}
    for pair, vals in mapping.items():
        a, b = pair
        if a == b:
            raise SelfComparison(f"pair ({a!r},{a!r}) compares a label with itself")
        key = (a, b) if a < b else (b, a)
        triple = tuple(Fraction(v) for v in vals)
        if len(triple) != 3:
            raise InputError(f"pair {key} needs exactly three shares")
        if any(v < 0 for v in triple):
            raise InputError(f"pair {key} has a negative share")
        if sum(triple) != 1:
            raise InputError(f"pair {key} shares do not sum to 1")
        if key != pair:
            triple = (triple[1], triple[0], triple[2])
        out[key] = triple
    return EstimatePoint(out)


@dataclass
class UncertaintyReport:
    """Uncertainty of one candidate order against a tally.

    ``total`` is the unweighted sum of per-pair uncertainties (the
    table-compatible figure); ``weighted`` multiplies each pair by its
    trial count, and ``log_likelihood`` is its negation.
    """

    estimates: EstimatePoint
    u_per_pair: dict  # (a, b) -> float
    total: float
    weighted: float
    log_likelihood: float


def tally(comparisons) -> ComparisonTally:
    """Accumulate (i, j, outcome) records; outcome '>' means i beat j,
    '<' means j beat i, '=' a tie."""
    counts = {}
    for i, j, outcome in comparisons:
        if i == j:
            raise SelfComparison(f"comparison of {i!r} with itself")
        if outcome not in OUTCOMES:
            raise InputError(f"outcome {outcome!r} is not one of >, <, =")
        key = (i, j) if i < j else (j, i)
        s_ab, s_ba, t_ab = counts.get(key, (0, 0, 0))
        first_won = (outcome == ">") == (key == (i, j))
        if outcome == "=":
            t_ab += 1
        elif first_won:
            s_ab += 1
        else:
            s_ba += 1
        counts[key] = (s_ab, s_ba, t_ab)
    return ComparisonTally(counts)


def read_comparisons_csv(fileobj):
    """Rows ``i,j,outcome``; a header row with those names is skipped."""
    rows = []
    for lineno, row in enumerate(csv.reader(fileobj), start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 3:
            raise InputError(f"line {lineno}: expected 3 columns, got {len(row)}")
        i, j, outcome = (cell.strip() for cell in row)
        if lineno == 1 and (i, j, outcome) == ("i", "j", "outcome"):
            continue
        rows.append((i, j, outcome))
    return rows


def raw_estimates(t: ComparisonTally) -> EstimatePoint:
    """Sample shares s/n, s'/n, t/n per pair, exact."""
    out = {}
    for pair, (s_ab, s_ba, t_ab) in t.counts.items():
        n = s_ab + s_ba + t_ab
        if n == 0:
            continue
        out[pair] = (Fraction(s_ab, n), Fraction(s_ba, n), Fraction(t_ab, n))
    return EstimatePoint(out)


def induced_bigraph(e: EstimatePoint) -> Bigraph:
    """Directed edge a -> b when pi_ab strictly beats both alternatives;
    undirected edge when gamma does; no edge without a strict maximum."""
    verts = set()
    for a, b in e.estimates:
        verts.add(a)
        verts.add(b)
    d_edges = set()
    c_edges = set()
    for (a, b), (pab, pba, g) in e.estimates.items():
        if pab > max(pba, g):
            d_edges.add((a, b))
        elif pba > max(pab, g):
            d_edges.add((b, a))
        elif g > max(pab, pba):
            c_edges.add(frozenset((a, b)))
    return Bigraph(tuple(sorted(verts)), frozenset(d_edges), frozenset(c_edges))


def restrict_estimates(e: EstimatePoint, target: Order) -> EstimatePoint:
    """Force each pair's estimates to be consistent with the target order.

    The category the target requires dominant (pi_ab for a above b, gamma
    for a tie) is pooled with its largest violator, both taking the mean,
    until it is weakly maximal. Pools are exact; among equally large
    violators the strict-preference category is pooled before the tie
    category.
    """
    rank = target.ranks()
    new = {}
    for (a, b), triple in e.estimates.items():
        if a not in rank or b not in rank:
            raise MissingLabel(f"target order does not cover pair ({a!r},{b!r})")
        if rank[a] < rank[b]:
            required = 0
        elif rank[a] > rank[b]:
            required = 1
        else:
            required = 2
        vals = list(triple)
        while vals[required] < max(v for k, v in enumerate(vals) if k != required):
            violators = [
                k for k in range(3) if k != required and vals[k] > vals[required]
            ]
            k = min(violators, key=lambda k: (-vals[k], k))
            pooled = (vals[required] + vals[k]) / 2
            vals[required] = pooled
            vals[k] = pooled
        new[(a, b)] = tuple(vals)
    return EstimatePoint(new)


def uncertainty(restricted: EstimatePoint, t: ComparisonTally) -> UncertaintyReport:
    """Per-pair U = -(sum of share * log10 share), zero shares contributing
    nothing, plus the unweighted and trial-weighted totals."""
    if set(restricted.estimates) != set(t.counts):
        raise MismatchedPairs(
            "estimates and tally cover different comparison pairs"
        )
    u_per_pair = {}
    total = 0.0
    weighted = 0.0
    for pair in sorted(restricted.estimates):
        shares = restricted.estimates[pair]
        u = -sum(float(x) * math.log10(float(x)) for x in shares if x > 0)
        u = max(u, 0.0)
        u_per_pair[pair] = u
        total += u
        weighted += t.n(pair) * u
    return UncertaintyReport(
        estimates=restricted,
        u_per_pair=u_per_pair,
        total=total,
        weighted=weighted,
        log_likelihood=-weighted,
    )


def max_likelihood_order(t: ComparisonTally, candidates=None, mode: str = "subbigraph"):
    """Rank candidate orders by uncertainty, most likely (smallest
    trial-weighted total) first; equal totals sit adjacent.

    Without explicit candidates the label count is capped (default 6) and
    candidates come from the maximal circuit-free sub-bigraphs of the raw
    estimates' induced bigraph, or from full weak-order enumeration with
    mode="weak-orders". A candidate may also be a (order, EstimatePoint)
    pair to evaluate externally supplied restricted estimates verbatim.
    """
    labels = t.labels()
    raw = None
    if candidates is None:
        cap = vertex_cap(CANDIDATE_CAP)
        if len(labels) > cap:
            raise CapExceeded(
                f"candidate generation over {len(labels)} labels exceeds the cap of {cap}"
            )
        raw = raw_estimates(t)
        if mode == "subbigraph":
            big = induced_bigraph(raw)
            candidates = [order for _, order in maximal_circuit_free_subbigraphs(big)]
        elif mode == "weak-orders":
            candidates = list(enumerate_weak_orders(labels))
        else:
            raise InputError(f"unknown candidate mode {mode!r}")
    ranked = []
    for cand in candidates:
        if isinstance(cand, tuple):
            order, est = cand
        else:
            order = cand
            if raw is None:
                raw = raw_estimates(t)
            est = restrict_estimates(raw, order)
        ranked.append((order, uncertainty(est, t)))
    ranked.sort(key=lambda item: (item[1].weighted, str(item[0])))
    return ranked
