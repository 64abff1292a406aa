"""Cultural evolution on a topology of agents.

Agents carry trait vectors; each selection picks an agent, one of its
neighbors, and a chance draw, and on a pass the agent copies one differing
trait from the neighbor (Egoistic) or does so only with a seconding
neighbor (PeerPossible). Activity, variety entropy, and compatibility
entropy are sampled per period until stasis or a period limit.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from itertools import combinations

from .errors import InputError, LengthMismatch, SeriesTooShort

TOPOLOGY_KINDS = ("square", "mobian-circle", "subset-tree")
BEHAVIORS = ("Egoistic", "PeerPossible")
INIT_MODES = ("uniform", "dice-mix")


@dataclass(frozen=True)
class Topology:
    kind: str
    neighbors: tuple  # per agent, sorted tuple of neighbor indices
    coords: tuple  # per agent, a (row, column) style pair for snapshots

    @property
    def size(self) -> int:
        return len(self.neighbors)


def square_topology(rows: int, cols: int) -> Topology:
    """Von Neumann 4-neighborhood with hard edges: corners have 2
    neighbors, edge agents 3, interior agents 4."""
    if rows < 1 or cols < 1:
        raise InputError("square topology needs positive dimensions")
    def idx(r, c):
        return r * cols + c
    neighbors = []
    coords = []
    for r in range(rows):
        for c in range(cols):
            nbrs = []
            if r > 0:
                nbrs.append(idx(r - 1, c))
            if r < rows - 1:
                nbrs.append(idx(r + 1, c))
            if c > 0:
                nbrs.append(idx(r, c - 1))
            if c < cols - 1:
                nbrs.append(idx(r, c + 1))
            neighbors.append(tuple(sorted(nbrs)))
            coords.append((r, c))
    return Topology("square", tuple(neighbors), tuple(coords))


def mobian_circle_topology(n_agents: int, turn: int) -> Topology:
    """Spiral of agents with the two ends joined.

    Agent i neighbors i-1 and i+1 along the strand (wrapping, which joins
    the ends) and i-turn / i+turn across turns (no wrap), so the outermost
    turns have degree 3 and interior agents degree 4.
    """
    if n_agents < 3 or turn < 1 or turn >= n_agents:
        raise InputError("mobian circle needs 3+ agents and 1 <= turn < agents")
    neighbors = []
    coords = []
    for i in range(n_agents):
        nbrs = {(i - 1) % n_agents, (i + 1) % n_agents}
        if i - turn >= 0:
            nbrs.add(i - turn)
        if i + turn < n_agents:
            nbrs.add(i + turn)
        nbrs.discard(i)
        neighbors.append(tuple(sorted(nbrs)))
        coords.append((i // turn, i % turn))
    return Topology("mobian-circle", tuple(neighbors), tuple(coords))


def subset_tree_topology(n_features: int) -> Topology:
    """One agent per nonempty subset of the feature set (2^n - 1 agents),
    adjacent when one subset covers the other (differs by one element)."""
    if n_features < 1:
        raise InputError("subset tree needs at least one feature")
    subsets = sorted(
        (frozenset(s) for k in range(1, n_features + 1)
         for s in combinations(range(n_features), k)),
        key=lambda s: (len(s), tuple(sorted(s))),
    )
    index = {s: i for i, s in enumerate(subsets)}
    neighbors = [[] for _ in subsets]
    for s, i in index.items():
        for extra in range(n_features):
            if extra not in s:
                t = s | {extra}
                j = index[t]
                neighbors[i].append(j)
                neighbors[j].append(i)
    level_seen = {}
    coords = []
    for s in subsets:
        lvl = len(s)
        pos = level_seen.get(lvl, 0)
        level_seen[lvl] = pos + 1
        coords.append((lvl, pos))
    return Topology(
        "subset-tree",
        tuple(tuple(sorted(n)) for n in neighbors),
        tuple(coords),
    )


def build_topology(spec) -> Topology:
    """Resolve a topology from a spec dict (or pass a Topology through)."""
    if isinstance(spec, Topology):
        return spec
    try:
        kind = spec["kind"]
    except (TypeError, KeyError):
        raise InputError("topology spec needs a 'kind'") from None
    if kind == "square":
        return square_topology(int(spec["rows"]), int(spec["cols"]))
    if kind == "mobian-circle":
        return mobian_circle_topology(int(spec["agents"]), int(spec["turn"]))
    if kind == "subset-tree":
        return subset_tree_topology(int(spec["features"]))
    raise InputError(f"unknown topology kind {kind!r}")


@dataclass(frozen=True)
class CultureConfig:
    """Parameters of one simulation run.

    ``k`` defaults to 1/n_features, making the pass rule the classic
    similarity fraction. ``init`` is "uniform" (every trait drawn uniformly)
    or "dice-mix": a share ``init_fraction`` of agents get two-dice-sum
    traits (range 0..10, centered on 5) on the first half of their
    features, the rest on the second half, which needs q >= 11.
    """

    n_features: int
    traits_per_feature: int
    topology: object  # spec dict or Topology
    behavior: str = "Egoistic"
    k: float | None = None
    epsilon: float = 0.0
    seed: int = 0
    stasis_window: int = 25
    max_periods: int = 1000
    selections_per_period: int | None = None
    init: str = "uniform"
    init_fraction: float = 0.0

    def __post_init__(self):
        if self.n_features < 1:
            raise InputError("need at least one feature")
        if self.traits_per_feature < 1:
            raise InputError("need at least one trait per feature")
        if self.behavior not in BEHAVIORS:
            raise InputError(f"behavior must be one of {BEHAVIORS}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise InputError("epsilon must lie in [0, 1]")
        if self.k is not None and self.k <= 0:
            raise InputError("k must be positive")
        if self.init not in INIT_MODES:
            raise InputError(f"init must be one of {INIT_MODES}")
        if self.init == "dice-mix" and self.traits_per_feature < 11:
            raise InputError("dice-mix initialization needs at least 11 traits")
        if not 0.0 <= self.init_fraction <= 1.0:
            raise InputError("init_fraction must lie in [0, 1]")
        if self.stasis_window < 1 or self.max_periods < 1:
            raise InputError("stasis window and period limit must be positive")

    @property
    def k_effective(self) -> float:
        return self.k if self.k is not None else 1.0 / self.n_features


def config_from_dict(data) -> CultureConfig:
    known = {
        "n_features", "traits_per_feature", "topology", "behavior", "k",
        "epsilon", "seed", "stasis_window", "max_periods",
        "selections_per_period", "init", "init_fraction",
    }
    if not isinstance(data, dict):
        raise InputError("config must be a JSON object")
    extra = set(data) - known
    if extra:
        raise InputError(f"unknown config keys: {', '.join(sorted(extra))}")
    missing = {"n_features", "traits_per_feature", "topology"} - set(data)
    if missing:
        raise InputError(f"config missing keys: {', '.join(sorted(missing))}")
    return CultureConfig(**data)


@dataclass
class Field:
    """A mutable population: one trait vector per agent on a topology."""

    config: CultureConfig
    topology: Topology
    agents: list  # list of list[int]

    @property
    def size(self) -> int:
        return len(self.agents)

    @property
    def n(self) -> int:
        return self.config.n_features

    @property
    def q(self) -> int:
        return self.config.traits_per_feature


@dataclass(frozen=True)
class AccretionEvent:
    agent: int
    donor: int
    feature: int
    old: int
    new: int
    witness: tuple | None = None  # (seconder index, "a" | "b")


@dataclass(frozen=True)
class MetricsSample:
    t: int
    eta: float
    s_v: float
    s_c: float
    varieties: int


@dataclass(frozen=True)
class VarietyRow:
    order: int
    identity: str
    count: int
    compatible_with: tuple  # orders of compatible varieties


@dataclass(frozen=True)
class VarietyTable:
    rows: tuple


@dataclass
class RunResult:
    series: list
    table: VarietyTable
    stasis: bool
    periods: int
    status: str  # "static" | "limit"
    variety_trace: tuple  # variety counts over the final window
    field: Field
    interactions_total: int
    selections_total: int


def similarity(x, y) -> int:
    if len(x) != len(y):
        raise LengthMismatch("agents have different feature counts")
    return sum(1 for a, b in zip(x, y) if a == b)


def distance(x, y) -> int:
    return len(x) - similarity(x, y)


def interaction_allowed(x, y, cfg: CultureConfig, draw: float) -> bool:
    """Pass test: at least one shared and one differing feature, and the
    scaled distance (k*d + epsilon) falls below the chance draw."""
    s = similarity(x, y)
    if not 1 <= s <= cfg.n_features - 1:
        return False
    d = cfg.n_features - s
    return cfg.k_effective * d + cfg.epsilon < draw


def _select(fieldstate: Field, rng: random.Random):
    """One selection: agent, neighbor, draw, and the feature to copy when
    the pass test succeeds (None otherwise). The draw is always consumed."""
    x_idx = rng.randrange(fieldstate.size)
    nbrs = fieldstate.topology.neighbors[x_idx]
    z_idx = nbrs[rng.randrange(len(nbrs))]
    draw = rng.random()
    x = fieldstate.agents[x_idx]
    z = fieldstate.agents[z_idx]
    if not interaction_allowed(x, z, fieldstate.config, draw):
        return x_idx, z_idx, None
    differing = [i for i in range(len(x)) if x[i] != z[i]]
    f = differing[rng.randrange(len(differing))]
    return x_idx, z_idx, f


def step_egoistic(fieldstate: Field, rng: random.Random):
    """One selection attempt; on a pass the agent copies the chosen trait."""
    x_idx, z_idx, f = _select(fieldstate, rng)
    if f is None:
        return None
    x = fieldstate.agents[x_idx]
    z = fieldstate.agents[z_idx]
    old = x[f]
    x[f] = z[f]
    return AccretionEvent(agent=x_idx, donor=z_idx, feature=f, old=old, new=z[f])


def step_peer_possible(fieldstate: Field, rng: random.Random):
    """As step_egoistic, but the copy needs a seconder among the agent's
    other neighbors, evaluated before the copy:

    (a) the seconder already holds the candidate trait on the chosen
        feature and differs from the donor on some feature the agent and
        donor share, or
    (b) the seconder shares at least one trait with the donor while
        lacking the candidate trait.

    All neighbors are the selecting agent's own; the first (lowest-index)
    seconder is recorded. Without one, no copy happens and the attempt
    does not count as an interaction.
    """
    x_idx, z_idx, f = _select(fieldstate, rng)
    if f is None:
        return None
    agents = fieldstate.agents
    x = agents[x_idx]
    z = agents[z_idx]
    n = len(x)
    witness = None
    for y_idx in fieldstate.topology.neighbors[x_idx]:
        if y_idx == z_idx:
            continue
        y = agents[y_idx]
        if y[f] == z[f] and any(
            x[i] == z[i] and y[i] != z[i] for i in range(n)
        ):
            witness = (y_idx, "a")
            break
        if y[f] != z[f] and any(y[i] == z[i] for i in range(n)):
            witness = (y_idx, "b")
            break
    if witness is None:
        return None
    old = x[f]
    x[f] = z[f]
    return AccretionEvent(
        agent=x_idx, donor=z_idx, feature=f, old=old, new=z[f], witness=witness
    )


def identity_metric(agent, q: int):
    """Base-q encoding h of the trait vector and its log scale hhat
    (ln h / ln q, zero when h <= 1 or q <= 1)."""
    h = sum(trait * q**i for i, trait in enumerate(agent))
    if h <= 1 or q <= 1:
        return h, 0.0
    return h, math.log(h) / math.log(q)


def _variety_counts(fieldstate: Field) -> dict:
    counts = {}
    for agent in fieldstate.agents:
        key = tuple(agent)
        counts[key] = counts.get(key, 0) + 1
    return counts


def variety_entropy(fieldstate: Field) -> float:
    """Entropy of the variety distribution, normalized by ln N."""
    n_agents = fieldstate.size
    if n_agents <= 1:
        return 0.0
    counts = _variety_counts(fieldstate)
    if len(counts) <= 1:
        return 0.0
    total = -sum(
        (c / n_agents) * math.log(c / n_agents) for c in counts.values()
    )
    return total / math.log(n_agents)


def _compatible_variety_pairs(counts):
    """Pairs of distinct varieties sharing at least one trait, found by
    bucketing on (feature, trait); distinct varieties always differ
    somewhere, so sharing is the whole compatibility test."""
    varieties = list(counts)
    if not varieties:
        return []
    n = len(varieties[0])
    buckets = {}
    for vi, v in enumerate(varieties):
        for i in range(n):
            buckets.setdefault((i, v[i]), []).append(vi)
    pairs = set()
    for members in buckets.values():
        for a, b in combinations(members, 2):
            pairs.add((a, b))
    return [(varieties[a], varieties[b]) for a, b in sorted(pairs)]


def compatibility_entropy(fieldstate: Field) -> float:
    """Entropy over joint appearance probabilities of mutually compatible
    variety pairs, renormalized to a distribution and scaled by
    ln C(N, 2)."""
    n_agents = fieldstate.size
    if n_agents < 3:
        return 0.0  # ln C(N,2) vanishes or pairs cannot exist
    counts = _variety_counts(fieldstate)
    events = []
    for u, v in _compatible_variety_pairs(counts):
        nu, nv = counts[u], counts[v]
        p = (nu / n_agents) * (nv / (n_agents - nu)) + (nv / n_agents) * (
            nu / (n_agents - nv)
        )
        if p > 0.0:
            events.append(p)
    if not events:
        return 0.0
    total = sum(events)
    entropy = -sum((p / total) * math.log(p / total) for p in events)
    return entropy / math.log(n_agents * (n_agents - 1) / 2)


def variety_table(fieldstate: Field) -> VarietyTable:
    """Varieties by descending population (ties by identity string), each
    with the ranks of the varieties it could interact with."""
    counts = _variety_counts(fieldstate)
    ordered = sorted(
        counts.items(), key=lambda kv: (-kv[1], ",".join(map(str, kv[0])))
    )
    rank_of = {v: i + 1 for i, (v, _) in enumerate(ordered)}
    compat = {v: set() for v in counts}
    for u, v in _compatible_variety_pairs(counts):
        compat[u].add(rank_of[v])
        compat[v].add(rank_of[u])
    rows = tuple(
        VarietyRow(
            order=i + 1,
            identity=",".join(map(str, v)),
            count=c,
            compatible_with=tuple(sorted(compat[v])),
        )
        for i, (v, c) in enumerate(ordered)
    )
    return VarietyTable(rows)


def snapshot(fieldstate: Field):
    """Per agent: coordinates, identity encoding, log identity, and the
    rank of its variety in the current variety table."""
    table = variety_table(fieldstate)
    rank_of = {row.identity: row.order for row in table.rows}
    out = []
    for i, agent in enumerate(fieldstate.agents):
        x, y = fieldstate.topology.coords[i]
        h, hhat = identity_metric(agent, fieldstate.q)
        out.append((x, y, h, hhat, rank_of[",".join(map(str, agent))]))
    return out


def _initial_agents(cfg: CultureConfig, topo: Topology, rng: random.Random):
    n, q = cfg.n_features, cfg.traits_per_feature
    agents = []
    if cfg.init == "uniform":
        for _ in range(topo.size):
            agents.append([rng.randrange(q) for _ in range(n)])
        return agents
    biased_span = (n + 1) // 2
    for _ in range(topo.size):
        lower = rng.random() < cfg.init_fraction
        vec = []
        for f in range(n):
            in_biased_half = f < biased_span if lower else f >= biased_span
            if in_biased_half:
                vec.append(rng.randrange(1, 7) + rng.randrange(1, 7) - 2)
            else:
                vec.append(rng.randrange(q))
        agents.append(vec)
    return agents


def make_field(cfg: CultureConfig, rng: random.Random, initial=None) -> Field:
    topo = build_topology(cfg.topology)
    if initial is None:
        agents = _initial_agents(cfg, topo, rng)
    else:
        agents = [list(vec) for vec in initial]
        if len(agents) != topo.size:
            raise LengthMismatch(
                f"initial field has {len(agents)} agents, topology needs {topo.size}"
            )
        for vec in agents:
            if len(vec) != cfg.n_features:
                raise LengthMismatch("initial agent has wrong feature count")
            if any(not 0 <= t < cfg.traits_per_feature for t in vec):
                raise InputError("initial trait out of range")
    return Field(config=cfg, topology=topo, agents=agents)


def run(cfg: CultureConfig, initial=None, observer=None) -> RunResult:
    """Run one seeded simulation to stasis or the period limit.

    A period is selections_per_period attempts (default: one per agent).
    Stasis means a full window of periods with zero interactions and an
    unchanged variety count; otherwise the run stops at max_periods with
    status "limit" and the final window's variety counts attached.
    """
    rng = random.Random(cfg.seed)
    fieldstate = make_field(cfg, rng, initial)
    step = step_egoistic if cfg.behavior == "Egoistic" else step_peer_possible
    selections = cfg.selections_per_period or fieldstate.size
    window = cfg.stasis_window

    series = []
    trace = []
    prev_varieties = len(_variety_counts(fieldstate))
    streak = 0
    interactions_total = 0

    for t in range(1, cfg.max_periods + 1):
        interactions = 0
        for _ in range(selections):
            if step(fieldstate, rng) is not None:
                interactions += 1
        interactions_total += interactions
        varieties = len(_variety_counts(fieldstate))
        series.append(
            MetricsSample(
                t=t,
                eta=interactions / selections,
                s_v=variety_entropy(fieldstate),
                s_c=compatibility_entropy(fieldstate),
                varieties=varieties,
            )
        )
        trace.append(varieties)
        if len(trace) > window:
            trace.pop(0)
        if interactions == 0 and varieties == prev_varieties:
            streak += 1
        else:
            streak = 0
        prev_varieties = varieties
        if observer is not None:
            observer(t, fieldstate)
        if streak >= window:
            return RunResult(
                series=series,
                table=variety_table(fieldstate),
                stasis=True,
                periods=t,
                status="static",
                variety_trace=tuple(trace),
                field=fieldstate,
                interactions_total=interactions_total,
                selections_total=t * selections,
            )
    return RunResult(
        series=series,
        table=variety_table(fieldstate),
        stasis=False,
        periods=cfg.max_periods,
        status="limit",
        variety_trace=tuple(trace),
        field=fieldstate,
        interactions_total=interactions_total,
        selections_total=cfg.max_periods * selections,
    )


def run_replicates(cfg: CultureConfig, replicates: int, initial=None):
    """Serial replicate runs seeded cfg.seed, cfg.seed+1, ..."""
    if replicates < 1:
        raise InputError("need at least one replicate")
    return [
        run(replace(cfg, seed=cfg.seed + r), initial=initial)
        for r in range(replicates)
    ]


EPOCHS = ("anarchy", "collectivism", "oligarchy", "authoritarianism")


def _smooth(values, window=3):
    half = window // 2
    out = []
    for i in range(len(values)):
        lo = max(0, i - half)
        hi = min(len(values), i + half + 1)
        out.append(sum(values[lo:hi]) / (hi - lo))
    return out


def classify_epochs(series, slope_tol: float = 1e-9, activity_tol: float = 0.0):
    """Advisory epoch labels over a metrics series.

    Zero activity reads as authoritarianism; rising compatibility entropy
    as collectivism; falling variety entropy under activity as oligarchy;
    anything else as anarchy. Entropies are smoothed over three periods
    and consecutive equal labels merge into (label, (first_t, last_t)).
    """
    if len(series) < 4:
        raise SeriesTooShort("epoch classification needs at least 4 periods")
    s_v = _smooth([m.s_v for m in series])
    s_c = _smooth([m.s_c for m in series])
    labels = []
    for i, m in enumerate(series):
        j = max(1, i)
        dv = s_v[j] - s_v[j - 1]
        dc = s_c[j] - s_c[j - 1]
        if m.eta <= activity_tol:
            labels.append("authoritarianism")
        elif dc > slope_tol:
            labels.append("collectivism")
        elif dv < -slope_tol:
            labels.append("oligarchy")
        else:
            labels.append("anarchy")
    merged = []
    for label, m in zip(labels, series):
        if merged and merged[-1][0] == label:
            merged[-1] = (label, (merged[-1][1][0], m.t))
        else:
            merged.append((label, (m.t, m.t)))
    return merged
