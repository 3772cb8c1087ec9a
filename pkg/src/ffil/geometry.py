"""Bilinear forms, unit spheres, affine flats, and unit-distance graphs.

All geometry is exact field arithmetic; membership tests never use
probabilistic shortcuts. Grid sweeps (sphere tables, pairwise norms) are
vectorized with numpy over prime fields; extension-field points go through
the scalar context operations.

Sphere point tables for origin-centered spheres are memoized in memory and,
when the environment variable FFIL_CACHE_DIR is set, on disk.
"""

import json
import os
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import DomainError, ResourceLimitError
from .gf import FieldCtx
from . import linalg
from .bigraph import BipartiteGraph
from .mpoly import ENUM_CAP, domain_points


class BilinearForm:
    """Diagonal bilinear form with entries +-1 on F^d (odd characteristic)."""

    __slots__ = ("ctx", "dim", "signature")

    def __init__(self, ctx: FieldCtx, signature):
        if ctx.p == 2:
            raise DomainError("forms require characteristic != 2")
        sig = tuple(int(s) for s in signature)
        if not sig or any(s not in (1, -1) for s in sig):
            raise DomainError("signature entries must be +1 or -1")
        self.ctx = ctx
        self.dim = len(sig)
        self.signature = sig

    @classmethod
    def standard(cls, ctx: FieldCtx, d: int) -> "BilinearForm":
        return cls(ctx, (1,) * d)

    @classmethod
    def for_dim(cls, ctx: FieldCtx, d: int) -> "BilinearForm":
        """Sign convention used by the unit-distance experiments: standard,
        except the last coordinate is negated when d = 1 (mod 4)."""
        sig = [1] * d
        if d % 4 == 1:
            sig[-1] = -1
        return cls(ctx, sig)

    def __eq__(self, other):
        return (
            isinstance(other, BilinearForm)
            and self.ctx == other.ctx
            and self.signature == other.signature
        )

    def __hash__(self):
        return hash((self.ctx, self.signature))

    def __repr__(self):
        sig = "".join("+" if s == 1 else "-" for s in self.signature)
        return f"BilinearForm(p={self.ctx.p}, {sig})"

    def sig_str(self) -> str:
        return "".join("p" if s == 1 else "m" for s in self.signature)

    def inner(self, u, v):
        """Sum of sigma_i * u_i * v_i; raw field value."""
        if len(u) != self.dim or len(v) != self.dim:
            raise DomainError("vector dimension mismatch")
        ctx = self.ctx
        if ctx.kind == "prime":
            p = ctx.p
            acc = 0
            for s, a, b in zip(self.signature, u, v):
                acc += a * b if s == 1 else -a * b
            return acc % p
        acc = ctx.zero_raw()
        for s, a, b in zip(self.signature, u, v):
            t = ctx.mul(a, b)
            acc = ctx.add(acc, t) if s == 1 else ctx.sub(acc, t)
        return acc

    def norm_sq(self, v):
        return self.inner(v, v)

    def diff(self, u, v):
        ctx = self.ctx
        if ctx.kind == "prime":
            p = ctx.p
            return tuple((a - b) % p for a, b in zip(u, v))
        return tuple(ctx.sub(a, b) for a, b in zip(u, v))

    def sig_array(self) -> np.ndarray:
        p = self.ctx.p
        return np.array([1 if s == 1 else p - 1 for s in self.signature], dtype=np.int64)

    def norms_of_rows(self, arr: np.ndarray) -> np.ndarray:
        """Vectorized norm_sq over the rows of an int array (prime ctx only)."""
        if self.ctx.kind != "prime":
            raise DomainError("vectorized norms require a prime context")
        p = self.ctx.p
        sq = arr % p
        return (sq * sq % p) @ self.sig_array() % p


def inner(form: BilinearForm, u, v):
    return form.inner(u, v)


def norm_sq(form: BilinearForm, v):
    return form.norm_sq(v)


@dataclass(frozen=True)
class Sphere:
    """Unit sphere {x : norm_sq(x - center) = 1} under a fixed form."""

    form: BilinearForm
    center: tuple

    def __post_init__(self):
        if len(self.center) != self.form.dim:
            raise DomainError("center dimension mismatch")

    def contains(self, x) -> bool:
        one = 1 if self.form.ctx.kind == "prime" else (1, 0)
        return self.form.norm_sq(self.form.diff(x, self.center)) == one


class AffineFlat:
    """Affine flat given by a basepoint and an independent direction basis.

    The empty flat is a distinguished value (is_empty = True, dim = -1), not
    an error: inconsistent sphere-intersection systems produce it.
    """

    __slots__ = ("ctx", "ambient", "base", "basis", "is_empty")

    def __init__(self, ctx: FieldCtx, ambient: int, base, basis, is_empty=False):
        self.ctx = ctx
        self.ambient = ambient
        self.is_empty = is_empty
        if is_empty:
            self.base = None
            self.basis = []
            return
        base = tuple(v % ctx.p for v in base)
        basis = [tuple(v % ctx.p for v in b) for b in basis]
        if len(base) != ambient or any(len(b) != ambient for b in basis):
            raise DomainError("flat vectors must match the ambient dimension")
        if basis and linalg.rank([list(b) for b in basis], ctx.p) != len(basis):
            raise DomainError("basis vectors must be linearly independent")
        self.base = base
        self.basis = basis

    @classmethod
    def empty(cls, ctx: FieldCtx, ambient: int) -> "AffineFlat":
        return cls(ctx, ambient, None, [], is_empty=True)

    @classmethod
    def full(cls, ctx: FieldCtx, ambient: int) -> "AffineFlat":
        basis = [tuple(1 if j == i else 0 for j in range(ambient)) for i in range(ambient)]
        return cls(ctx, ambient, (0,) * ambient, basis)

    @property
    def dim(self) -> int:
        return -1 if self.is_empty else len(self.basis)

    def points(self):
        """All p^dim points of the flat (none for the empty flat)."""
        if self.is_empty:
            return
        p = self.ctx.p
        if not self.basis:
            yield self.base
            return
        coeffs = domain_points(p, len(self.basis))
        arr = (np.asarray(self.base, dtype=np.int64) + coeffs @ np.asarray(self.basis, dtype=np.int64)) % p
        for row in arr:
            yield tuple(int(v) for v in row)

    def contains(self, x) -> bool:
        if self.is_empty:
            return False
        p = self.ctx.p
        diff = [(a - b) % p for a, b in zip(x, self.base)]
        rows = [list(b) for b in self.basis]
        return linalg.rank(rows + [diff], p) == len(self.basis)

    def __repr__(self):
        if self.is_empty:
            return "AffineFlat(empty)"
        return f"AffineFlat(dim={self.dim}, base={self.base})"


# -- sphere point tables -------------------------------------------------


_ORIGIN_CACHE = {}


def _origin_sphere_points(form: BilinearForm, cap: int):
    p, d = form.ctx.p, form.dim
    key = (p, form.signature)
    pts = _ORIGIN_CACHE.get(key)
    if pts is not None:
        return pts
    cache_dir = os.environ.get("FFIL_CACHE_DIR")
    path = None
    if cache_dir:
        path = os.path.join(cache_dir, f"sphere_p{p}_d{d}_{form.sig_str()}.json")
        if os.path.exists(path):
            with open(path) as fh:
                pts = [tuple(pt) for pt in json.load(fh)]
            _ORIGIN_CACHE[key] = pts
            return pts
    if p**d > cap:
        raise ResourceLimitError(f"sphere enumeration over {p}^{d} points exceeds cap")
    grid = domain_points(p, d)
    mask = form.norms_of_rows(grid) == 1
    pts = [tuple(int(v) for v in row) for row in grid[mask]]
    _ORIGIN_CACHE[key] = pts
    if path:
        os.makedirs(cache_dir, exist_ok=True)
        tmp = path + ".tmp"
        with open(tmp, "w") as fh:
            json.dump([list(pt) for pt in pts], fh)
        os.replace(tmp, path)
    return pts


def sphere_points(sphere: Sphere, cap: int = ENUM_CAP):
    """All rational points of the sphere, lexicographic order.

    Computed by translating the memoized origin-centered table.
    """
    form = sphere.form
    if form.ctx.kind != "prime":
        raise DomainError("sphere enumeration is supported over prime fields only")
    p = form.ctx.p
    origin = _origin_sphere_points(form, cap)
    w = sphere.center
    return sorted(tuple((x + c) % p for x, c in zip(pt, w)) for pt in origin)


# -- sphere intersections and isotropy -------------------------------------


def intersect_spheres_to_flat(spheres) -> AffineFlat:
    """Affine flat U with S_1 & ... & S_k = S_1 & U.

    Subtracting the defining equation of S_j from that of S_1 leaves the
    linear equation 2<x, w_j - w_1> + <w_1, w_1> - <w_j, w_j> = 0; U is the
    solution flat of those k - 1 equations (Gaussian elimination). Duplicate
    spheres contribute identical rows and are harmless. An inconsistent
    system yields the empty flat. U is orthogonal to the affine span of the
    centers.
    """
    spheres = list(spheres)
    if not spheres:
        raise DomainError("need at least one sphere")
    form = spheres[0].form
    if any(s.form != form for s in spheres):
        raise DomainError("all spheres must share one bilinear form")
    if form.ctx.kind != "prime":
        raise DomainError("flat computation is supported over prime fields only")
    ctx, d, p = form.ctx, form.dim, form.ctx.p
    if len(spheres) == 1:
        return AffineFlat.full(ctx, d)
    w1 = spheres[0].center
    n1 = form.norm_sq(w1)
    rows, rhs = [], []
    for s in spheres[1:]:
        wj = s.center
        coeff = [
            2 * sg * ((b - a) % p) % p
            for sg, a, b in zip(form.signature, w1, wj)
        ]
        rows.append([c % p for c in coeff])
        rhs.append((form.norm_sq(wj) - n1) % p)
    sol = linalg.solve_affine(rows, rhs, d, p)
    if sol is None:
        return AffineFlat.empty(ctx, d)
    x0, basis = sol
    return AffineFlat(ctx, d, x0, basis)


def is_totally_isotropic(form: BilinearForm, flat: AffineFlat) -> bool:
    """True iff every difference of flat points has self-inner-product zero.

    Equivalent (char != 2) to all basis pairs having inner product zero;
    empty and 0-dimensional flats qualify vacuously.
    """
    for i, bi in enumerate(flat.basis):
        for bj in flat.basis[i:]:
            if form.inner(bi, bj) != 0:
                return False
    return True


def _affine_closure(ctx: FieldCtx, pts):
    """Flat spanned by the given points (base = first point)."""
    base = pts[0]
    p = ctx.p
    dirs = [[(a - b) % p for a, b in zip(q, base)] for q in pts[1:]]
    reduced, pivots = linalg.row_reduce(dirs, p)
    basis = [tuple(reduced[r]) for r in range(len(pivots))]
    return AffineFlat(ctx, len(base), base, basis)


@dataclass
class FlatRecord:
    dim: int
    base: tuple
    basis: list
    isotropic_ok: bool
    radial_ok: bool


@dataclass
class SphereFlatsReport:
    entries: list = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return all(e.isotropic_ok and e.radial_ok for e in self.entries)

    def by_dim(self, d: int):
        return [e for e in self.entries if e.dim == d]


def flats_in_sphere_check(sphere: Sphere, dim_cap: int, cap: int = ENUM_CAP) -> SphereFlatsReport:
    """Enumerate every flat of dimension <= dim_cap contained in the sphere
    and check two identities on each: total isotropy of the flat, and
    <x - w, x - y> = 0 for all flat points x, y (w the center).

    Flats are built bottom-up: points, then closures of (flat, extra sphere
    point) pairs, deduplicated by their full point sets.
    """
    form = sphere.form
    ctx = form.ctx
    pts = sphere_points(sphere, cap)
    pt_set = set(pts)
    report = SphereFlatsReport()
    levels = {0: {frozenset((q,)): AffineFlat(ctx, form.dim, q, []) for q in pts}}
    for r in range(1, dim_cap + 1):
        nxt = {}
        for key, flat in levels[r - 1].items():
            for q in pts:
                if q in key:
                    continue
                closure = _affine_closure(ctx, [flat.base] + [q] + sorted(key - {flat.base}))
                if closure.dim != r:
                    continue
                cl_pts = frozenset(closure.points())
                if cl_pts in nxt or not cl_pts <= pt_set:
                    continue
                nxt[cl_pts] = closure
        levels[r] = nxt
        if not nxt:
            break
    w = sphere.center
    for r in sorted(levels):
        for cl_pts, flat in sorted(levels[r].items(), key=lambda kv: sorted(kv[0])):
            iso = is_totally_isotropic(form, flat)
            radial = True
            members = sorted(cl_pts)
            for x in members:
                for y in members:
                    if form.inner(form.diff(x, w), form.diff(x, y)) != 0:
                        radial = False
                        break
                if not radial:
                    break
            report.entries.append(FlatRecord(flat.dim, flat.base, flat.basis, iso, radial))
    return report


def _rref_row_candidates(p, d, pivot, other_pivots):
    """All RREF rows with leading 1 at `pivot`: zeros before it and at the
    other pivot columns, free entries elsewhere."""
    free = [c for c in range(pivot + 1, d) if c not in other_pivots]
    if not free:
        rows = np.zeros((1, d), dtype=np.int64)
    else:
        combos = domain_points(p, len(free))
        rows = np.zeros((combos.shape[0], d), dtype=np.int64)
        rows[:, free] = combos
    rows[:, pivot] = 1
    return rows


def isotropic_unit_pair_search(form: BilinearForm, cap: int = ENUM_CAP):
    """Exhaustive search for (V, w): a totally isotropic k-flat V and a
    norm-1 vector w orthogonal to V, in odd dimension d = 2k + 1.

    When x^2 = -1 has no root in F_p no such pair exists; the search verifies
    that by exhausting all totally isotropic k-dimensional direction spaces
    (canonical RREF enumeration) against all unit vectors. Returns the first
    pair found (deterministic order) or None.
    """
    d = form.dim
    if d % 2 == 0:
        raise DomainError("search is defined for odd dimensions d = 2k + 1")
    if form.ctx.kind != "prime":
        raise DomainError("search runs over prime fields only")
    p = form.ctx.p
    if p**d > cap:
        raise ResourceLimitError("vector enumeration exceeds cap")
    k = (d - 1) // 2
    grid = domain_points(p, d)
    norms = form.norms_of_rows(grid)
    units = grid[norms == 1]
    if k == 0:
        if units.shape[0]:
            w = tuple(int(v) for v in units[0])
            return AffineFlat(form.ctx, d, (0,) * d, []), w
        return None
    sig = form.sig_array()

    def orthogonal_units(basis_rows):
        mat = (np.asarray(basis_rows, dtype=np.int64) * sig) % p
        prods = units @ mat.T % p
        mask = (prods == 0).all(axis=1)
        return units[mask]

    for pivots in combinations(range(d), k):
        pivot_set = set(pivots)
        cands = []
        for i, piv in enumerate(pivots):
            rows = _rref_row_candidates(p, d, piv, pivot_set - {piv})
            iso = form.norms_of_rows(rows) == 0
            cands.append(rows[iso])
        hit = _extend_isotropic(form, p, sig, cands, [], orthogonal_units)
        if hit is not None:
            basis, w = hit
            flat = AffineFlat(form.ctx, d, (0,) * d, [tuple(int(v) for v in b) for b in basis])
            return flat, tuple(int(v) for v in w)
    return None


def _extend_isotropic(form, p, sig, cands, chosen, orthogonal_units):
    depth = len(chosen)
    if depth == len(cands):
        sols = orthogonal_units(chosen)
        if sols.shape[0]:
            return list(chosen), sols[0]
        return None
    pool = cands[depth]
    if chosen:
        mat = (np.asarray(chosen, dtype=np.int64) * sig) % p
        mask = (pool @ mat.T % p == 0).all(axis=1)
        pool = pool[mask]
    for row in pool:
        hit = _extend_isotropic(form, p, sig, cands, chosen + [row], orthogonal_units)
        if hit is not None:
            return hit
    return None


# -- unit-distance graphs ---------------------------------------------------


class UnitDistanceGraph:
    """Symmetric loop-free graph: i ~ j iff norm_sq(points[i] - points[j]) = 1."""

    __slots__ = ("points", "form", "adj")

    def __init__(self, points, form: BilinearForm, adj):
        self.points = points
        self.form = form
        self.adj = adj

    @property
    def n(self) -> int:
        return len(self.points)

    def edge_count(self) -> int:
        return sum(mask.bit_count() for mask in self.adj) // 2

    def degree(self, i: int) -> int:
        return self.adj[i].bit_count()

    def bipartite_double(self) -> BipartiteGraph:
        """Two copies of the point set; (i, j) is an edge iff i ~ j here."""
        g = BipartiteGraph.__new__(BipartiteGraph)
        g.m = g.n = self.n
        g.adj_a = list(self.adj)
        g.adj_b = list(self.adj)
        return g


def unit_distance_graph(points, form: BilinearForm) -> UnitDistanceGraph:
    """Build the unit-distance graph of a point list under `form`.

    Works over prime contexts (vectorized) and extension contexts (scalar
    field ops). A point is never adjacent to itself: the difference has norm
    zero, not one.
    """
    points = [tuple(pt) for pt in points]
    n = len(points)
    ctx = form.ctx
    for pt in points:
        if len(pt) != form.dim:
            raise DomainError("point dimension mismatch")
    if ctx.kind == "prime":
        arr = np.asarray(points, dtype=np.int64)
        p = ctx.p
        diff = (arr[:, None, :] - arr[None, :, :]) % p
        sq = diff * diff % p
        norms = sq @ form.sig_array() % p
        mat = norms == 1
        adj = [_mask_from_bools(mat[i]) for i in range(n)]
    else:
        one = (1, 0)
        adj = [0] * n
        for i in range(n):
            for j in range(i + 1, n):
                delta = form.diff(points[i], points[j])
                if form.norm_sq(delta) == one:
                    adj[i] |= 1 << j
                    adj[j] |= 1 << i
    return UnitDistanceGraph(points, form, adj)


def _mask_from_bools(row) -> int:
    mask = 0
    for j in np.nonzero(row)[0]:
        mask |= 1 << int(j)
    return mask


def point_sphere_incidence(points, centers, form: BilinearForm) -> BipartiteGraph:
    """Incidence graph: rows are points, columns are unit spheres (by center);
    an edge means the point lies on the sphere."""
    if form.ctx.kind != "prime":
        raise DomainError("incidence builder runs over prime fields only")
    p = form.ctx.p
    pa = np.asarray([tuple(pt) for pt in points], dtype=np.int64)
    ca = np.asarray([tuple(c) for c in centers], dtype=np.int64)
    diff = (pa[:, None, :] - ca[None, :, :]) % p
    norms = (diff * diff % p) @ form.sig_array() % p
    return BipartiteGraph.from_bool_matrix(norms == 1)


def embed_to_standard_norm(points, ext_ctx: FieldCtx):
    """Map (x_1, .., x_d) to (x_1, .., x_{d-1}, a * x_d) over F_{p^2}.

    Because a^2 = -1, the standard-form unit-distance relation between images
    coincides with the last-coordinate-negated relation between the original
    points. Requires an extension context (prime contexts are rejected).
    """
    if ext_ctx.kind != "ext":
        raise DomainError("embedding requires a quadratic-extension context")
    p = ext_ctx.p
    out = []
    for pt in points:
        head = tuple((int(c) % p, 0) for c in pt[:-1])
        out.append(head + (((0, int(pt[-1]) % p)),))
    return out


# -- point-set fixtures -------------------------------------------------------


def format_points(points, form: BilinearForm) -> str:
    """Header 'p d signature' (signature as +/- string), one point per line."""
    sig = "".join("+" if s == 1 else "-" for s in form.signature)
    lines = [f"{form.ctx.p} {form.dim} {sig}"]
    for pt in points:
        lines.append(" ".join(str(int(v)) for v in pt))
    return "\n".join(lines) + "\n"


def parse_points(text: str):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise DomainError("empty point fixture")
    p_str, d_str, sig = lines[0].split()
    p, d = int(p_str), int(d_str)
    if len(sig) != d or any(ch not in "+-" for ch in sig):
        raise DomainError("signature must be a +/- string of length d")
    form = BilinearForm(FieldCtx.prime(p), tuple(1 if ch == "+" else -1 for ch in sig))
    points = []
    for ln in lines[1:]:
        pt = tuple(int(t) % p for t in ln.split())
        if len(pt) != d:
            raise DomainError("point dimension mismatch in fixture")
        points.append(pt)
    return points, form
