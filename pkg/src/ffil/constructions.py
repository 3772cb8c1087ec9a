"""Randomized constructions with built-in verification and replayable reports.

Each construction records its parameters, seed, achieved counts, target
thresholds, retry counts, and the outcome of an exact complete-bipartite
check, so any report can be regenerated bit-for-bit from its seed. Targets
use halved expectations (p^(D-1)/2 zeros, mn/(2p) edges, |U|^2/(2p) unit
pairs); retry caps are sized so that exhausting one signals a bug or misuse,
not bad luck.
"""

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConstructionFailure, DomainError, ResourceLimitError
from .gf import FieldCtx, find_prime, is_prime
from .mpoly import (
    ENUM_CAP,
    MultiPoly,
    bivariate_section,
    domain_points,
    evaluate_batch,
    sample_uniform,
)
from .bigraph import BipartiteGraph, contains_kss, smallest_free_s
from .geometry import BilinearForm, embed_to_standard_norm, unit_distance_graph

RETRY_POLY = 20
RETRY_SUBSAMPLE = 20
RETRY_SHIFT = 50


@dataclass
class ConstructionReport:
    """Replayable record of one construction run."""

    kind: str
    params: dict
    seed: int
    achieved: dict = field(default_factory=dict)
    bound: dict = field(default_factory=dict)
    verification: dict = field(default_factory=dict)
    retries: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)
    wall_s: float = 0.0

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "params": self.params,
            "seed": self.seed,
            "achieved": self.achieved,
            "bound": self.bound,
            "verification": self.verification,
            "retries": self.retries,
            "flags": self.flags,
        }


def integer_nth_root(n: int, e: int) -> int:
    """Largest r with r^e <= n (exact integer arithmetic)."""
    if n < 0 or e < 1:
        raise DomainError("nth root needs n >= 0, e >= 1")
    r = max(0, round(n ** (1.0 / e)))
    while r**e > n:
        r -= 1
    while (r + 1) ** e <= n:
        r += 1
    return r


# -- zero-count statistics ----------------------------------------------------


@dataclass
class ZeroCountResult:
    p: int
    nvars: int
    degree: int
    trials: int
    counts: list
    threshold: float

    @property
    def fraction(self) -> float:
        hits = sum(1 for c in self.counts if 2 * c >= self.p ** (self.nvars - 1))
        return hits / self.trials

    @property
    def mean(self) -> float:
        return sum(self.counts) / self.trials


def zero_count_experiment(p, nvars, degree, trials, rng, jobs: int = 1) -> ZeroCountResult:
    """Fraction of uniform degree-<=degree polynomials on F_p^nvars with at
    least p^(nvars-1)/2 rational zeros.

    Preconditions p >= 5 prime, nvars >= 3, degree >= 3 match the regime where
    values at distinct points are pairwise independent, making the success
    probability at least 3/4 per trial. Trial t draws from rng.derive(t), so
    results are identical for any `jobs` count.
    """
    if not is_prime(p) or p < 5:
        raise DomainError("p must be a prime >= 5")
    if nvars < 3 or degree < 3:
        raise DomainError("experiment requires nvars >= 3 and degree >= 3")
    if trials < 1:
        raise DomainError("need at least one trial")
    if p**nvars > ENUM_CAP:
        raise ResourceLimitError("zero counting domain exceeds cap")
    ctx = FieldCtx.prime(p)
    pts = domain_points(p, nvars)

    def one(t: int) -> int:
        f = sample_uniform(ctx, nvars, degree, rng.derive(t))
        return int(np.count_nonzero(evaluate_batch(f, pts) == 0))

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            counts = list(pool.map(one, range(trials)))
    else:
        counts = [one(t) for t in range(trials)]
    return ZeroCountResult(p, nvars, degree, trials, counts, p ** (nvars - 1) / 2)


# -- random algebraic graphs ---------------------------------------------------


@dataclass
class AlgebraicGraphInstance:
    graph: BipartiteGraph
    poly: MultiPoly
    rows: list  # chosen points in F_p^D1
    cols: list  # chosen points in F_p^D2
    report: ConstructionReport


def _product_zero_mask(f: MultiPoly, grid1, grid2, p) -> np.ndarray:
    n1, n2 = grid1.shape[0], grid2.shape[0]
    pts = np.hstack(
        [np.repeat(grid1, n2, axis=0), np.tile(grid2, (n1, 1))]
    )
    return (evaluate_batch(f, pts) == 0).reshape(n1, n2)


def random_algebraic_graph(p, d1, d2, m, n, s, rng) -> AlgebraicGraphInstance:
    """K_{s,s}-free bipartite graph from the zero set of a random polynomial.

    Samples f uniform of degree <= (d1+d2)^2 on F_p^d1 x F_p^d2 and keeps it
    once the full graph G0 has at least p^(d1+d2-1)/2 edges and the exact
    K_{s,s} check certifies freeness (each event has probability >= 3/4 in
    the independent regime, so a 20-retry cap is generous). Then subsamples
    m rows and n columns until the subgraph keeps at least mn/(2p) edges.
    """
    start = time.perf_counter()
    if not is_prime(p):
        raise DomainError("p must be prime")
    if m < 1 or n < 1 or m > p**d1 or n > p**d2:
        raise DomainError("need 1 <= m <= p^d1 and 1 <= n <= p^d2")
    if s < 1:
        raise DomainError("s must be >= 1")
    ctx = FieldCtx.prime(p)
    delta = (d1 + d2) ** 2
    report = ConstructionReport(
        kind="random-algebraic-graph",
        params={"p": p, "d1": d1, "d2": d2, "m": m, "n": n, "s": s, "delta": delta},
        seed=rng.seed,
    )
    if s * s > min(delta, math.isqrt(p)):
        msg = (
            f"s^2 = {s * s} exceeds min(delta, sqrt(p)) = "
            f"{min(delta, math.isqrt(p))}: point values are not guaranteed "
            "independent at this scale; freeness is still verified exactly"
        )
        warnings.warn(msg, stacklevel=2)
        report.flags.append(msg)
    grid1 = domain_points(p, d1)
    grid2 = domain_points(p, d2)
    full_target = p ** (d1 + d2 - 1)
    report.bound["edges_full_min"] = full_target / 2
    report.bound["edges_min"] = m * n / (2 * p)

    mask = f = None
    best_edges = -1
    for attempt in range(1, RETRY_POLY + 1):
        cand = sample_uniform(ctx, d1 + d2, delta, rng)
        cand_mask = _product_zero_mask(cand, grid1, grid2, p)
        e0 = int(cand_mask.sum())
        best_edges = max(best_edges, e0)
        if 2 * e0 < full_target:
            continue
        g0 = BipartiteGraph.from_bool_matrix(cand_mask)
        if contains_kss(g0, s) is not None:
            continue
        f, mask = cand, cand_mask
        report.retries["poly"] = attempt
        report.achieved["edges_full"] = e0
        break
    if f is None:
        report.achieved["edges_full_best"] = best_edges
        report.wall_s = time.perf_counter() - start
        raise ConstructionFailure(
            f"no admissible polynomial in {RETRY_POLY} tries", best=report
        )

    n1, n2 = grid1.shape[0], grid2.shape[0]
    sub = rows_idx = cols_idx = None
    for attempt in range(1, RETRY_SUBSAMPLE + 1):
        ridx = list(range(n1)) if m == n1 else rng.sample_indices(n1, m)
        cidx = list(range(n2)) if n == n2 else rng.sample_indices(n2, n)
        cand_sub = mask[np.ix_(ridx, cidx)]
        if 2 * p * int(cand_sub.sum()) >= m * n:
            sub, rows_idx, cols_idx = cand_sub, ridx, cidx
            report.retries["subsample"] = attempt
            break
    if sub is None:
        report.wall_s = time.perf_counter() - start
        raise ConstructionFailure(
            f"no admissible subsample in {RETRY_SUBSAMPLE} tries", best=report
        )

    graph = BipartiteGraph.from_bool_matrix(sub)
    report.achieved["edges"] = graph.edge_count()
    witness = contains_kss(graph, s)
    report.verification = {
        "s": s,
        "outcome": "verified-free" if witness is None else "witness-found",
        "witness": witness,
    }
    report.wall_s = time.perf_counter() - start
    rows = [tuple(int(v) for v in grid1[i]) for i in rows_idx]
    cols = [tuple(int(v) for v in grid2[j]) for j in cols_idx]
    return AlgebraicGraphInstance(graph, f, rows, cols, report)


# -- point-variety instances ---------------------------------------------------


@dataclass
class PointVarietyInstance:
    points: list
    systems: list  # one defining-polynomial list per variety
    graph: BipartiteGraph
    poly: MultiPoly
    report: ConstructionReport


def point_variety_instance(m, alpha, dim, rng) -> PointVarietyInstance:
    """m points and n = floor(m^alpha) hypersurfaces in F_p^dim with many
    incidences and an exactly verified K_{s,s}-free incidence graph.

    p is the smallest prime above m^(1/dim); the second vertex class lives in
    F_p^dim2 with dim2 = ceil(alpha * dim). Each column point q yields the
    hypersurface cut out by fixing the trailing variables of the graph's
    polynomial at q. The full zero set is used as the variety (no
    factorization into irreducible components is attempted); the freeness of
    the emitted incidence graph is verified directly instead of inferred.
    """
    start = time.perf_counter()
    n = int(m**alpha)
    if m < 2 or n < 1:
        raise DomainError("need m >= 2 and floor(m^alpha) >= 1")
    p = find_prime(max(2, integer_nth_root(m, dim)))
    dim2 = math.ceil(alpha * dim)
    s = (dim + dim2) ** 2
    if n > p**dim2:
        raise DomainError(f"n = {n} exceeds p^dim2 = {p**dim2}")
    inst = random_algebraic_graph(p, dim, dim2, m, n, s, rng)
    delta = (dim + dim2) ** 2

    parr = np.asarray(inst.rows, dtype=np.int64)
    full = domain_points(p, dim)
    systems = []
    incidences = 0
    proxy_ok = True
    for q in inst.cols:
        fq = bivariate_section(inst.poly, q)
        systems.append([fq])
        incidences += int(np.count_nonzero(evaluate_batch(fq, parr) == 0))
        full_zeros = int(np.count_nonzero(evaluate_batch(fq, full) == 0))
        if full_zeros > delta * p ** (dim - 1):
            proxy_ok = False

    report = ConstructionReport(
        kind="point-variety",
        params={
            "m": m,
            "n": n,
            "alpha": alpha,
            "dim": dim,
            "dim2": dim2,
            "p": p,
            "s": s,
            "delta": delta,
        },
        seed=rng.seed,
        achieved={
            "incidences": incidences,
            "edges": inst.report.achieved["edges"],
            "degree_proxy_ok": proxy_ok,
        },
        bound={"incidences_min": m * n / (2 * p)},
        verification=inst.report.verification,
        retries=inst.report.retries,
        flags=inst.report.flags
        + [
            "varieties are full zero sets of the sections; no irreducible "
            "factorization, freeness verified exactly on the emitted graph"
        ],
    )
    report.wall_s = time.perf_counter() - start
    return PointVarietyInstance(inst.rows, systems, inst.graph, inst.poly, report)


# -- evasive point sets ----------------------------------------------------------


def evasive_point_set(p, d, k, strategy, rng, cap: int = ENUM_CAP):
    """Point set of size exactly p^(d-k) in F_p^d.

    'map-image' returns the graph {(y, g_1(y), .., g_k(y))} of monomial maps
    with strictly increasing odd total degrees; 'random' returns a uniform
    subset. No evasiveness guarantee is asserted either way; downstream
    experiments verify the properties they need directly.
    """
    if not 0 <= k < d:
        raise DomainError("need 0 <= k < d")
    size = p ** (d - k)
    if size > cap or p**d > cap:
        raise ResourceLimitError("evasive set size exceeds cap")
    if strategy == "map-image":
        base = domain_points(p, d - k)
        cols = [base]
        for i in range(1, k + 1):
            # monomial y_1^(2i+1) * prod_{j>=2} y_j^2: odd total degree
            # 2i + 1 + 2(d-k-1), strictly increasing in i
            col = np.copy(base[:, 0])
            col = _pow_mod(col, 2 * i + 1, p)
            for j in range(1, d - k):
                col = col * _pow_mod(base[:, j], 2, p) % p
            cols.append(col.reshape(-1, 1))
        arr = np.hstack(cols)
        return [tuple(int(v) for v in row) for row in arr]
    if strategy == "random":
        idx = rng.sample_indices(p**d, size)
        grid = domain_points(p, d)
        return [tuple(int(v) for v in grid[i]) for i in idx]
    raise DomainError(f"unknown strategy {strategy!r}")


def _pow_mod(col: np.ndarray, e: int, p: int) -> np.ndarray:
    out = np.ones_like(col)
    b = col % p
    while e:
        if e & 1:
            out = out * b % p
        b = b * b % p
        e >>= 1
    return out


def line_intersection_audit(points, p, d):
    """Exhaustive max |L & U| over all affine lines L of F_p^d.

    Returns (max_count, (basepoint, direction)) for a line attaining it.
    Reported for diagnostics only; nothing downstream assumes a bound.
    """
    got = set(tuple(pt) for pt in points)
    grid = [tuple(int(v) for v in row) for row in domain_points(p, d)]
    best = (0, None)
    for direction in grid:
        first = next((c for c in direction if c), None)
        if first != 1:
            continue  # canonical representative per direction class
        seen = set()
        for x in grid:
            if x in seen:
                continue
            line = []
            cur = x
            for _ in range(p):
                line.append(cur)
                seen.add(cur)
                cur = tuple((a + b) % p for a, b in zip(cur, direction))
            count = sum(1 for pt in line if pt in got)
            if count > best[0]:
                best = (count, (min(line), direction))
    return best


# -- unit-distance instances ------------------------------------------------------


@dataclass
class UnitDistanceInstance:
    points: list
    form: BilinearForm
    graph: object  # UnitDistanceGraph
    report: ConstructionReport


def unit_distance_instance(
    n, d, rng, p=None, s=4, strategy="map-image"
) -> UnitDistanceInstance:
    """Point set in dimension d spanning many unit distances, with an exact
    K_{s,s} check on its unit-distance graph.

    With k = floor(d/2) and e = ceil(d/2) + 1, picks the smallest prime
    p = 3 (mod 4) with p^e > n (requires n >= 7^e; pass p explicitly to drive
    the modulus directly, e.g. p = 7 which no admissible n reaches), builds a
    base set U of size p^e, and samples nonzero shifts x until U and U + x
    span at least |U|^2/(2p) ordered unit pairs under the dimension form. The
    final set is U union (U + x); when d = 1 (mod 4) it is re-embedded over
    F_{p^2} so the relation becomes the standard one. Subsamples to n points
    when n is given and smaller.
    """
    start = time.perf_counter()
    if d < 2:
        raise DomainError("construction needs d >= 2")
    k = d // 2
    e = (d + 1) // 2 + 1  # = ceil(d/2) + 1
    if p is None:
        if n is None:
            raise DomainError("provide n or p")
        if n < 7**e:
            raise DomainError(
                f"n^(1/{e}) >= 7 required for the prime-gap guarantee (n >= {7**e})"
            )
        p = find_prime(max(2, integer_nth_root(n, e)), (3, 4))
    else:
        if not is_prime(p) or p % 4 != 3:
            raise DomainError("p must be a prime congruent to 3 mod 4")
    ctx = FieldCtx.prime(p)
    form = BilinearForm.for_dim(ctx, d)
    u_set = evasive_point_set(p, d, k - 1, strategy, rng)
    u_arr = np.asarray(u_set, dtype=np.int64)
    u_size = len(u_set)

    report = ConstructionReport(
        kind="unit-distance",
        params={"n": n, "d": d, "p": p, "k": k, "s": s, "strategy": strategy},
        seed=rng.seed,
        bound={"cross_pairs_min": u_size**2 / (2 * p)},
        flags=[
            "thresholds are halved expectations, not asymptotic constants",
            f"evasive generator strategy: {strategy}",
            f"freeness checked at configured s = {s}",
        ],
    )

    shift = cross = None
    for attempt in range(1, RETRY_SHIFT + 1):
        x = tuple(rng.randbelow(p) for _ in range(d))
        while not any(x):
            x = tuple(rng.randbelow(p) for _ in range(d))
        diff = (u_arr[:, None, :] - u_arr[None, :, :] - np.asarray(x)) % p
        norms = (diff * diff % p) @ form.sig_array() % p
        count = int(np.count_nonzero(norms == 1))
        if 2 * p * count >= u_size**2:
            shift, cross = x, count
            report.retries["shift"] = attempt
            break
    if shift is None:
        report.wall_s = time.perf_counter() - start
        raise ConstructionFailure(
            f"no admissible shift in {RETRY_SHIFT} tries", best=report
        )

    merged = sorted(
        set(u_set) | set(tuple((a + b) % p for a, b in zip(pt, shift)) for pt in u_set)
    )
    if d % 4 == 1:
        ext = FieldCtx.quadratic(p)
        pts_final = embed_to_standard_norm(merged, ext)
        form_final = BilinearForm.standard(ext, d)
        report.flags.append("re-embedded over the quadratic extension (d = 1 mod 4)")
    else:
        pts_final = merged
        form_final = form
    if n is not None:
        if n > len(pts_final):
            raise DomainError(f"requested n = {n} exceeds constructed {len(pts_final)} points")
        if n < len(pts_final):
            idx = rng.sample_indices(len(pts_final), n)
            pts_final = [pts_final[i] for i in idx]

    graph = unit_distance_graph(pts_final, form_final)
    double = graph.bipartite_double()
    witness = contains_kss(double, s)
    report.achieved = {
        "U_size": u_size,
        "P_size": len(pts_final),
        "cross_pairs": cross,
        "unit_distances": graph.edge_count(),
        "shift": list(shift),
    }
    report.verification = {
        "s": s,
        "outcome": "verified-free" if witness is None else "witness-found",
        "witness": witness,
    }
    if witness is not None:
        # the guaranteed freeness level is not numeric; report the smallest
        # s at which the exhaustive check certifies freeness instead
        report.verification["smallest_free_s"] = smallest_free_s(double, 4 * s)
    report.wall_s = time.perf_counter() - start
    return UnitDistanceInstance(pts_final, form_final, graph, report)
