"""Zero-patterns, containment patterns, and shatter functions.

For a polynomial sequence f_1..f_k and a point x, the zero-pattern at x is
{i : f_i(x) = 0}; for a sequence of varieties (given as defining polynomial
systems) the containment pattern is {i : x in V_i}. Families are enumerated
over the rational points of F_p^D only.

Two binomial upper bounds are reported for k polynomials of degree <= delta
in D variables: C(k*delta + D, D), which holds on every instance we can test,
and the tighter C(k*delta, D), which already fails at k=2, delta=1, D=1
(three realized patterns versus a bound of two). Assertions therefore use the
former; both are carried in reports.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ResourceLimitError
from . import linalg
from .mpoly import ENUM_CAP, domain_points, evaluate_batch


@dataclass
class PatternFamily:
    """Realized index subsets of [k], each with its first (lex) witness point."""

    k: int
    witnesses: dict  # frozenset[int] -> point tuple

    @property
    def count(self) -> int:
        return len(self.witnesses)

    def subsets(self):
        return sorted(self.witnesses, key=lambda s: (len(s), sorted(s)))

    def __contains__(self, subset) -> bool:
        return frozenset(subset) in self.witnesses


class SetSystem:
    """Family of subsets of a ground set, stored as bitmasks."""

    __slots__ = ("ground_size", "members")

    def __init__(self, ground_size: int, members):
        self.ground_size = ground_size
        masks = []
        for mem in members:
            if isinstance(mem, int):
                mask = mem
            else:
                mask = 0
                for v in mem:
                    mask |= 1 << v
            if mask >> ground_size:
                raise DomainError("member is not a subset of the ground set")
            masks.append(mask)
        self.members = masks

    def __len__(self):
        return len(self.members)


def bound_with_ambient(k: int, delta: int, nvars: int) -> int:
    """C(k*delta + D, D): pattern-count bound that holds on all fixtures."""
    return math.comb(k * delta + nvars, nvars)


def bound_tight_form(k: int, delta: int, nvars: int) -> int:
    """C(k*delta, D): the tighter form, reported alongside for comparison."""
    return math.comb(max(k * delta, 0), nvars) if k * delta >= nvars else 0


def _shared_domain(polys):
    if not polys:
        raise DomainError("need at least one polynomial")
    ctx = polys[0].ctx
    nvars = polys[0].nvars
    for f in polys:
        if f.ctx != ctx or f.nvars != nvars:
            raise DomainError("polynomials must share context and arity")
    return ctx, nvars


def _zero_matrix(polys, cap):
    """Boolean matrix: row per rational point (lex order), column per polynomial."""
    ctx, nvars = _shared_domain(polys)
    npoints = ctx.p**nvars
    if npoints > cap:
        raise ResourceLimitError(f"enumeration of {npoints} points exceeds cap")
    pts = domain_points(ctx.p, nvars)
    cols = [evaluate_batch(f, pts) == 0 for f in polys]
    return pts, np.stack(cols, axis=1)


def _collect(pts, member_matrix) -> PatternFamily:
    fam = {}
    for idx in range(member_matrix.shape[0]):
        key = frozenset(int(i) for i in np.nonzero(member_matrix[idx])[0])
        if key not in fam:
            fam[key] = tuple(int(x) for x in pts[idx])
    return PatternFamily(member_matrix.shape[1], fam)


def zero_patterns(polys, cap: int = ENUM_CAP) -> PatternFamily:
    """Family of zero-patterns of f_1..f_k over all rational points."""
    pts, zmat = _zero_matrix(polys, cap)
    return _collect(pts, zmat)


def containment_patterns(systems, cap: int = ENUM_CAP) -> PatternFamily:
    """Family of containment patterns of the varieties V_1..V_k.

    Each variety is a list of defining polynomials; x lies in V_i exactly when
    all of them vanish at x. A system with no polynomials cuts out the whole
    space.
    """
    flat = [f for sys in systems for f in sys]
    pts, zmat = _zero_matrix(flat, cap)
    cols = []
    pos = 0
    for sys in systems:
        t = len(sys)
        if t == 0:
            cols.append(np.ones(zmat.shape[0], dtype=bool))
        else:
            cols.append(zmat[:, pos : pos + t].all(axis=1))
        pos += t
    return _collect(pts, np.stack(cols, axis=1))


def shatter_function(system: SetSystem, k: int, cap: int = ENUM_CAP) -> int:
    """pi_F(k): max over k-subsets A of the ground set of |{A & B : B in F}|."""
    n = system.ground_size
    if not 0 <= k <= n:
        raise DomainError("k must be between 0 and the ground set size")
    if math.comb(n, k) > cap:
        raise ResourceLimitError(f"C({n}, {k}) subsets exceed cap {cap}")
    from itertools import combinations

    ceiling = min(2**k, len(system.members))
    best = 0
    for subset in combinations(range(n), k):
        amask = 0
        for v in subset:
            amask |= 1 << v
        traces = {amask & b for b in system.members}
        if len(traces) > best:
            best = len(traces)
            if best >= ceiling:
                break
    return best


def witness_rank_check(polys, points) -> bool:
    """Full-rank check of the product-polynomial evaluation matrix.

    For witness points x_1..x_N with pairwise distinct zero-patterns of
    f_1..f_k, form g_j = product of the f_i NOT vanishing at x_j and the
    matrix M[j][l] = g_j(x_l) over F_p. Sorting by support size makes M
    triangular with nonzero diagonal, so the expected answer is always True;
    duplicate patterns raise DomainError.
    """
    ctx, nvars = _shared_domain(polys)
    p = ctx.p
    vals = [[f.evaluate(x) for f in polys] for x in points]
    supports = [frozenset(i for i, v in enumerate(row) if v != 0) for row in vals]
    if len(set(supports)) != len(supports):
        raise DomainError("witness points realize duplicate zero-patterns")
    n = len(points)
    mat = []
    for j in range(n):
        row = []
        for l in range(n):
            g = 1
            for i in supports[j]:
                g = g * vals[l][i] % p
            row.append(g)
        mat.append(row)
    return linalg.rank(mat, p) == n


def family_report(fam: PatternFamily, polys, kind: str = "zero-patterns") -> dict:
    """JSON-ready report for a pattern family.

    `polys` is the flat list of polynomials behind the family (for containment
    patterns: all defining polynomials); the binomial bounds are computed from
    that list, since containment patterns factor through the zero-patterns of
    the defining system.
    """
    ctx, nvars = _shared_domain(polys)
    delta = max((f.total_degree for f in polys), default=0)
    return {
        "kind": kind,
        "k": fam.k,
        "D": nvars,
        "p": ctx.p,
        "delta": delta,
        "pattern_count": fam.count,
        "bound_rbg": bound_with_ambient(len(polys), delta, nvars),
        "bound_paper": bound_tight_form(len(polys), delta, nvars),
        "patterns": [
            {"subset": sorted(s), "witness": list(fam.witnesses[s])}
            for s in fam.subsets()
        ],
    }
