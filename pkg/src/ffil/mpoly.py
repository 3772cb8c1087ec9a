"""Sparse multivariate polynomials over prime fields.

A MultiPoly maps exponent vectors to nonzero coefficients. The scalar
`evaluate` is the reference semantics (term-by-term powering); grid sweeps
(`zero_set`, `evaluate_batch`) vectorize the same arithmetic with numpy and
the test suite cross-checks the two paths against each other.

Supported arithmetic is deliberately small: add, multiply, substitute. No
GCDs, no factorization.
"""

import math
import re

import numpy as np

from .errors import DomainError, ResourceLimitError
from .gf import FieldCtx

ENUM_CAP = 10**8


class MultiPoly:
    """Multivariate polynomial over F_p in sparse exponent-map form."""

    __slots__ = ("ctx", "nvars", "terms")

    def __init__(self, ctx: FieldCtx, nvars: int, terms):
        if ctx.kind != "prime":
            raise DomainError("polynomials are defined over prime fields only")
        if nvars < 0:
            raise DomainError("nvars must be nonnegative")
        p = ctx.p
        clean = {}
        for exps, c in dict(terms).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars:
                raise DomainError(f"exponent vector {exps} has length != {nvars}")
            if any(e < 0 for e in exps):
                raise DomainError("exponents must be nonnegative")
            c %= p
            if c:
                clean[exps] = c
        self.ctx = ctx
        self.nvars = nvars
        self.terms = clean

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, ctx, nvars):
        return cls(ctx, nvars, {})

    @classmethod
    def constant(cls, ctx, nvars, c):
        return cls(ctx, nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, ctx, nvars, i):
        if not 0 <= i < nvars:
            raise DomainError("variable index out of range")
        exps = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(ctx, nvars, {exps: 1})

    # -- basic queries ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def total_degree(self) -> int:
        """Max exponent sum over stored terms; 0 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=0)

    def __eq__(self, other):
        return (
            isinstance(other, MultiPoly)
            and self.ctx == other.ctx
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.ctx, self.nvars, frozenset(self.terms.items())))

    def __repr__(self):
        return f"MultiPoly(p={self.ctx.p}, {format_poly(self)!r})"

    # -- arithmetic (builders for fixtures and sections) -------------------

    def _check_compat(self, other):
        if self.ctx != other.ctx or self.nvars != other.nvars:
            raise DomainError("polynomial context/arity mismatch")

    def __add__(self, other):
        self._check_compat(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(self.ctx, self.nvars, out)

    def __neg__(self):
        return MultiPoly(self.ctx, self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check_compat(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(self.ctx, self.nvars, out)

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, point) -> int:
        """Value at `point` (ints), term by term, as a residue in [0, p)."""
        if len(point) != self.nvars:
            raise DomainError(
                f"point has dimension {len(point)}, polynomial has {self.nvars}"
            )
        p = self.ctx.p
        acc = 0
        for exps, c in self.terms.items():
            t = c
            for x, e in zip(point, exps):
                if e:
                    t = t * pow(x, e, p) % p
            acc = (acc + t) % p
        return acc


def monomials_upto(nvars: int, degcap: int):
    """All exponent vectors of length nvars with sum <= degcap, lex order."""
    if nvars == 0:
        return [()]
    out = []

    def rec(prefix, remaining, left):
        if left == 1:
            for e in range(remaining + 1):
                out.append(prefix + (e,))
            return
        for e in range(remaining + 1):
            rec(prefix + (e,), remaining - e, left - 1)

    rec((), degcap, nvars)
    return out


def monomial_count(nvars: int, degcap: int) -> int:
    return math.comb(nvars + degcap, nvars)


def sample_uniform(ctx: FieldCtx, nvars: int, degcap: int, rng) -> MultiPoly:
    """Uniformly random polynomial of total degree <= degcap.

    Each of the C(nvars + degcap, nvars) monomial coefficients is drawn
    i.i.d. uniform in F_p; zero coefficients are dropped from storage.
    """
    if nvars < 1:
        raise DomainError("sample_uniform needs nvars >= 1")
    if degcap < 0:
        raise DomainError("degree cap must be nonnegative")
    p = ctx.p
    terms = {}
    for exps in monomials_upto(nvars, degcap):
        c = rng.randbelow(p)
        if c:
            terms[exps] = c
    return MultiPoly(ctx, nvars, terms)


_GRID_CACHE = {}


def domain_points(p: int, nvars: int) -> np.ndarray:
    """All points of F_p^nvars as an int64 array, lexicographic row order."""
    key = (p, nvars)
    grid = _GRID_CACHE.get(key)
    if grid is None:
        if nvars == 0:
            grid = np.zeros((1, 0), dtype=np.int64)
        else:
            axes = np.meshgrid(*([np.arange(p, dtype=np.int64)] * nvars), indexing="ij")
            grid = np.stack(axes, axis=-1).reshape(-1, nvars)
        if grid.shape[0] <= 10**6:
            _GRID_CACHE[key] = grid
    return grid


def _pow_col(base: np.ndarray, e: int, p: int) -> np.ndarray:
    out = np.ones_like(base)
    b = base % p
    while e:
        if e & 1:
            out = out * b % p
        b = b * b % p
        e >>= 1
    return out


def evaluate_batch(f: MultiPoly, pts: np.ndarray) -> np.ndarray:
    """Values of f at each row of pts, as residues. Matches `evaluate` pointwise."""
    if pts.ndim != 2 or pts.shape[1] != f.nvars:
        raise DomainError("point array has wrong dimension")
    p = f.ctx.p
    n = pts.shape[0]
    acc = np.zeros(n, dtype=np.int64)
    powcache = {}
    for exps, c in f.terms.items():
        t = np.full(n, c, dtype=np.int64)
        for v, e in enumerate(exps):
            if not e:
                continue
            col = powcache.get((v, e))
            if col is None:
                col = _pow_col(pts[:, v], e, p)
                powcache[(v, e)] = col
            t = t * col % p
        acc = (acc + t) % p
    return acc


def _check_enum_cap(p, nvars, cap):
    n = p**nvars
    if n > cap:
        raise ResourceLimitError(f"enumeration of {p}^{nvars} points exceeds cap {cap}")
    return n


def zero_set(f: MultiPoly, cap: int = ENUM_CAP):
    """All rational zeros of f in F_p^nvars, in lexicographic order."""
    _check_enum_cap(f.ctx.p, f.nvars, cap)
    pts = domain_points(f.ctx.p, f.nvars)
    mask = evaluate_batch(f, pts) == 0
    return [tuple(int(x) for x in row) for row in pts[mask]]


def count_zeros(f: MultiPoly, cap: int = ENUM_CAP) -> int:
    _check_enum_cap(f.ctx.p, f.nvars, cap)
    pts = domain_points(f.ctx.p, f.nvars)
    return int(np.count_nonzero(evaluate_batch(f, pts) == 0))


def bivariate_section(f: MultiPoly, q) -> MultiPoly:
    """Fix the trailing block of variables at q; returns a polynomial in the rest.

    For f on D1 + D2 variables and q in F_p^D2, the result g on D1 variables
    satisfies g(x) = f(x, q) for all x, with degree <= degree of f.
    """
    d2 = len(q)
    if d2 > f.nvars:
        raise DomainError("substitution point has more coordinates than f has variables")
    d1 = f.nvars - d2
    p = f.ctx.p
    out = {}
    for exps, c in f.terms.items():
        head, tail = exps[:d1], exps[d1:]
        for x, e in zip(q, tail):
            if e:
                c = c * pow(x, e, p) % p
        if c:
            out[head] = (out.get(head, 0) + c) % p
    return MultiPoly(f.ctx, d1, out)


# -- textual fixture format ----------------------------------------------
#
#   p=7; vars=2; 3*x0^2*x1 + 1
#
# Coefficients are integers reduced mod p; the printer emits terms in
# descending lexicographic exponent order and round-trips with the parser.

_MONO_RE = re.compile(r"^x(\d+)(?:\^(\d+))?$")


def format_poly(f: MultiPoly) -> str:
    if f.is_zero():
        body = "0"
    else:
        parts = []
        for exps in sorted(f.terms, reverse=True):
            c = f.terms[exps]
            factors = []
            if c != 1 or not any(exps):
                factors.append(str(c))
            for i, e in enumerate(exps):
                if e == 1:
                    factors.append(f"x{i}")
                elif e > 1:
                    factors.append(f"x{i}^{e}")
            parts.append("*".join(factors))
        body = " + ".join(parts)
    return f"p={f.ctx.p}; vars={f.nvars}; {body}"


def parse_poly(text: str, ctx: FieldCtx | None = None) -> MultiPoly:
    pieces = [s.strip() for s in text.split(";")]
    if len(pieces) != 3:
        raise DomainError("expected 'p=..; vars=..; <terms>'")
    p = int(pieces[0].split("=")[1])
    nvars = int(pieces[1].split("=")[1])
    if ctx is None:
        ctx = FieldCtx.prime(p)
    elif ctx.p != p:
        raise DomainError("fixture modulus disagrees with supplied context")
    terms = {}
    body = pieces[2].strip()
    if body != "0":
        for term in body.split("+"):
            term = term.strip()
            coeff = 1
            exps = [0] * nvars
            for factor in term.split("*"):
                factor = factor.strip()
                m = _MONO_RE.match(factor)
                if m:
                    i, e = int(m.group(1)), int(m.group(2) or 1)
                    if i >= nvars:
                        raise DomainError(f"variable x{i} out of range")
                    exps[i] += e
                else:
                    coeff *= int(factor)
            key = tuple(exps)
            terms[key] = terms.get(key, 0) + coeff
    return MultiPoly(ctx, nvars, terms)
