"""Entropy measures for aggregated choice.

Spectral-radius (topological) entropy of mean preference matrices, the
stationary distribution of the mean hill-climbing walk, Shannon entropy of
that distribution, and the ranking it induces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import LabeledMatrix, Order, Profile, preference_matrix, transition_matrix
from .errors import NonConvergence, NotADistribution

POWER_TOL = 1e-12
POWER_MAX_ITER = 100_000
EXACT_DIM_LIMIT = 12
STATIONARY_TOL = 1e-9


@dataclass(frozen=True)
class EntropyValue:
    """A dimensionless entropy together with the log base that produced it.

    ``radius`` carries the spectral radius when the value came from a
    matrix, so callers can see the pre-logarithm quantity.
    """

    value: float
    base: float
    radius: float | None = None


@dataclass(frozen=True)
class StationaryResult:
    """Stationary distribution of a row-stochastic matrix.

    ``exact`` marks the rational-arithmetic path (entries are Fractions,
    residual is exactly zero); otherwise entries are floats and ``residual``
    is the largest violation of y = yF after the solve.
    """

    labels: tuple[str, ...]
    distribution: tuple
    iterations: int
    residual: float
    exact: bool
    method: str


def _rows_of(m):
    return m.rows if hasattr(m, "rows") else tuple(tuple(r) for r in m)


def _power_iterate(rows, tol=POWER_TOL, max_iter=POWER_MAX_ITER):
    """Power iteration for the spectral radius of a nonnegative matrix.

    Iterates on A + I (the shift removes periodicity without moving the
    Perron root by more than exactly 1) and restarts once from a second
    positive vector if the first run stalls. Returns (estimate, residual,
    converged).
    """
    n = len(rows)
    if n == 0:
        return 0.0, 0.0, True
    a = np.array([[float(x) for x in row] for row in rows]) + np.eye(n)
    starts = [
        np.ones(n),
        np.array([1.0 + (i % 5) / 7.0 for i in range(n)]),
    ]
    best = (0.0, math.inf)
    for x in starts:
        x = x / x.sum()
        prev = None
        lam = 0.0
        for _ in range(max_iter):
            y = a @ x
            lam = float(y.sum())
            x = y / lam
            if prev is not None and abs(lam - prev) <= tol * max(1.0, abs(lam)):
                return lam - 1.0, abs(lam - prev), True
            prev = lam
        resid = abs(lam - prev) if prev is not None else math.inf
        if resid < best[1]:
            best = (lam - 1.0, resid)
    return best[0], best[1], False


def spectral_radius(m) -> float:
    """Largest eigenvalue magnitude of a nonnegative square matrix.

    Power iteration (tolerance 1e-12, at most 1e5 steps, one restart) with
    an exact eigenvalue computation as fallback for matrices where the
    iteration only converges harmonically (defective Perron roots).
    """
    rows = _rows_of(m)
    est, resid, converged = _power_iterate(rows)
    if converged:
        return est
    try:
        eig = np.linalg.eigvals(np.array([[float(x) for x in r] for r in rows]))
    except np.linalg.LinAlgError:
        raise NonConvergence(
            "spectral radius estimate did not stabilize",
            estimate=est,
            residual=resid,
        ) from None
    return float(max(abs(eig)))


def matrix_entropy(m: LabeledMatrix, base=None) -> EntropyValue:
    """log_base of the spectral radius; base defaults to the dimension.

    Radii at or below 1 report entropy 0 (a single fixed point carries no
    mixing), as does a one-element base.
    """
    lam = spectral_radius(m)
    b = len(m.labels) if base is None else base
    if b <= 1 or lam <= 1.0:
        return EntropyValue(0.0, b, radius=lam)
    return EntropyValue(math.log(lam) / math.log(b), b, radius=lam)


def _aligned_rows(m: LabeledMatrix, labels):
    pos = {lab: i for i, lab in enumerate(m.labels)}
    return [[m.rows[pos[a]][pos[b]] for b in labels] for a in labels]


def mean_preference_matrix(profile: Profile) -> LabeledMatrix:
    """F = (1/n) sum of the voters' preference matrices, exact."""
    labels = profile.policies
    k = len(labels)
    acc = [[Fraction(0)] * k for _ in range(k)]
    for order in profile.orders():
        rows = _aligned_rows(preference_matrix(order), labels)
        for i in range(k):
            for j in range(k):
                acc[i][j] += rows[i][j]
    share = Fraction(1, profile.n_voters)
    return LabeledMatrix(labels, tuple(tuple(x * share for x in row) for row in acc))


def topological_entropy(profile: Profile) -> EntropyValue:
    """Entropy of the profile's mean preference matrix.

    S = log_base(spectral radius), base = number of policies. A profile
    over a single policy reports 0 by convention.
    """
    f = mean_preference_matrix(profile)
    return matrix_entropy(f, base=len(profile.policies))


def markov_aggregate(profile: Profile, mode: str = "climb-one-rung") -> LabeledMatrix:
    """Arithmetic mean of the voters' transition matrices, exact and
    row-stochastic."""
    labels = profile.policies
    k = len(labels)
    acc = [[Fraction(0)] * k for _ in range(k)]
    for order in profile.orders():
        rows = _aligned_rows(transition_matrix(order, mode), labels)
        for i in range(k):
            for j in range(k):
                acc[i][j] += rows[i][j]
    share = Fraction(1, profile.n_voters)
    return LabeledMatrix(labels, tuple(tuple(x * share for x in row) for row in acc))


def _frac_solve(m, rhs):
    """Any exact solution x of m x = rhs over the rationals.

    The system may be underdetermined; free variables are set to zero.
    Raises NonConvergence if the system is inconsistent.
    """
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    aug = [list(m[i]) + [rhs[i]] for i in range(n_rows)]
    pivots = []
    r = 0
    for c in range(n_cols):
        pivot_row = next((i for i in range(r, n_rows) if aug[i][c] != 0), None)
        if pivot_row is None:
            continue
        aug[r], aug[pivot_row] = aug[pivot_row], aug[r]
        pv = aug[r][c]
        aug[r] = [x / pv for x in aug[r]]
        for i in range(n_rows):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append((r, c))
        r += 1
        if r == n_rows:
            break
    for i in range(r, n_rows):
        if aug[i][n_cols] != 0:
            raise NonConvergence("stationary solve hit an inconsistent system")
    x = [Fraction(0)] * n_cols
    for i, c in pivots:
        x[c] = aug[i][n_cols]
    return x


def _cesaro_exact(f):
    """Exact Cesàro limit y of the uniform start under row-stochastic f.

    With A = F - I, the limit satisfies y = x0 - uA where u solves
    uA² = x0 A; the eigenvalue 1 of a stochastic matrix is semisimple, so
    the system is consistent and the construction is exact.
    """
    n = len(f)
    one = Fraction(1)
    a = [[f[i][j] - (one if i == j else 0) for j in range(n)] for i in range(n)]
    a2 = [[sum(a[i][k] * a[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    x0 = [Fraction(1, n)] * n
    b = [sum(x0[i] * a[i][j] for i in range(n)) for j in range(n)]
    a2t = [[a2[i][j] for i in range(n)] for j in range(n)]
    u = _frac_solve(a2t, b)
    ua = [sum(u[i] * a[i][j] for i in range(n)) for j in range(n)]
    y = [x0[j] - ua[j] for j in range(n)]
    if sum(y) != 1 or any(v < 0 for v in y):
        raise NonConvergence("exact stationary solve left the simplex")
    yf = [sum(y[i] * f[i][j] for i in range(n)) for j in range(n)]
    if yf != y:
        raise NonConvergence("exact stationary solve is not a fixed point")
    return y


def _cesaro_float(rows):
    n = len(rows)
    f = np.array([[float(x) for x in row] for row in rows])
    a = f - np.eye(n)
    x0 = np.full(n, 1.0 / n)
    b = x0 @ a
    u, *_ = np.linalg.lstsq((a @ a).T, b, rcond=None)
    y = x0 - u @ a
    y = np.maximum(y, 0.0)
    y = y / y.sum()
    residual = float(np.max(np.abs(y @ f - y)))
    return [float(v) for v in y], residual


def stationary_distribution(m: LabeledMatrix) -> StationaryResult:
    """Stationary distribution of a row-stochastic matrix, defined as the
    Cesàro limit (1/T) sum of x0 Fᵗ from the uniform start.

    That limit exists for every stochastic matrix (periodic and reducible
    ones included) and is computed in closed form: exactly over the
    rationals up to dimension 12, by least squares on the same projector
    equations above that.
    """
    rows = _rows_of(m)
    n = len(rows)
    frac_rows = [[x if isinstance(x, Fraction) else Fraction(x) for x in row] for row in rows]
    for row in frac_rows:
        if any(x < 0 for x in row):
            raise NotADistribution("transition matrix has a negative entry")
    exactly_stochastic = all(sum(row) == 1 for row in frac_rows)
    if not exactly_stochastic:
        sums = [sum(float(x) for x in row) for row in rows]
        if any(abs(s - 1.0) > STATIONARY_TOL for s in sums):
            raise NotADistribution("matrix rows do not sum to 1")

    if exactly_stochastic and n <= EXACT_DIM_LIMIT:
        y = _cesaro_exact(frac_rows)
        return StationaryResult(
            labels=m.labels,
            distribution=tuple(y),
            iterations=0,
            residual=0.0,
            exact=True,
            method="rational-projector",
        )

    y, residual = _cesaro_float(rows)
    if residual > STATIONARY_TOL:
        raise NonConvergence(
            "stationary distribution residual too large",
            estimate=tuple(y),
            residual=residual,
        )
    return StationaryResult(
        labels=m.labels,
        distribution=tuple(y),
        iterations=0,
        residual=residual,
        exact=False,
        method="least-squares",
    )


def shannon_entropy(p, base) -> EntropyValue:
    """-sum p_i log_base p_i, with the usual 0 log 0 = 0 convention."""
    probs = [float(x) for x in p]
    if any(x < -1e-12 for x in probs):
        raise NotADistribution("probability vector has a negative entry")
    if abs(sum(probs) - 1.0) > STATIONARY_TOL:
        raise NotADistribution("probability vector does not sum to 1")
    if base <= 1:
        return EntropyValue(0.0, base)
    h = -sum(x * math.log(x) for x in probs if x > 0.0) / math.log(base)
    return EntropyValue(max(h, 0.0), base)


def markov_order(sr: StationaryResult, tie_tol: float = 1e-9) -> Order:
    """Policies grouped by descending stationary probability.

    Exact results group on exact equality; float results group
    probabilities within tie_tol of the previous entry.
    """
    pairs = sorted(
        zip(sr.labels, sr.distribution), key=lambda t: (-float(t[1]), t[0])
    )
    groups = []
    last = None
    for label, prob in pairs:
        if groups and (
            prob == last if sr.exact else abs(float(prob) - float(last)) <= tie_tol
        ):
            groups[-1].append(label)
        else:
            groups.append([label])
        last = prob
    return Order(tuple(tuple(sorted(g)) for g in groups))
