"""Exact arithmetic in prime fields F_p and the quadratic extension F_{p^2}.

The extension is F_p[a] / (a^2 + 1) and is only defined for p = 3 (mod 4),
which makes a^2 + 1 irreducible. Raw values are ints in [0, p) for prime
contexts and pairs (x, y) meaning x + y*a for extension contexts; FieldElement
wraps a raw value with its context for operator arithmetic. Hot loops
elsewhere in the package work on raw values through the context methods.
"""

import math

from .errors import DomainError, ResourceLimitError

# Products of two residues must fit in 64-bit intermediates.
MAX_MODULUS = 2**31

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24 (covers 64-bit)."""
    if n < 2:
        return False
    for q in _MR_WITNESSES:
        if n % q == 0:
            return n == q
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def find_prime(lower: int, residue_class=None) -> int:
    """Smallest prime strictly greater than `lower`, optionally in a residue class.

    `residue_class` is a pair (r, m) with gcd(r, m) = 1. The search stops at
    4 * lower (comfortable headroom for Bertrand-type gaps in the classes used
    here); exceeding it raises ResourceLimitError.
    """
    if lower < 2:
        raise DomainError("find_prime requires lower >= 2")
    cap = 4 * lower
    if residue_class is None:
        n, step = lower + 1, 1
    else:
        r, m = residue_class
        if m < 1 or math.gcd(r % m if m else r, m) != 1:
            raise DomainError("residue class (r, m) must have gcd(r, m) = 1")
        n = lower + 1
        n += (r - n) % m
        step = m
    while n <= cap:
        if is_prime(n):
            return n
        n += step
    raise ResourceLimitError(f"no prime found in ({lower}, {cap}]")


def _inverse_mod(a: int, p: int) -> int:
    """Inverse of a mod p by extended Euclid; DomainError on zero."""
    a %= p
    if a == 0:
        raise DomainError("no inverse of zero")
    r0, r1 = p, a
    s0, s1 = 0, 1
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    return s0 % p


class FieldCtx:
    """Field context: prime F_p or quadratic extension F_{p^2}, a^2 = -1.

    Immutable after construction; all operations are pure functions on raw
    values, so contexts are safe to share freely.
    """

    __slots__ = ("kind", "p", "order")

    def __init__(self, p: int, kind: str = "prime"):
        if kind not in ("prime", "ext"):
            raise DomainError(f"unknown field kind {kind!r}")
        if not 2 <= p <= MAX_MODULUS:
            raise DomainError(f"modulus {p} outside supported range [2, 2^31]")
        if not is_prime(p):
            raise DomainError(f"{p} is not prime")
        if kind == "ext" and p % 4 != 3:
            raise DomainError("quadratic extension needs p = 3 (mod 4)")
        self.kind = kind
        self.p = p
        self.order = p if kind == "prime" else p * p

    @classmethod
    def prime(cls, p: int) -> "FieldCtx":
        return cls(p, "prime")

    @classmethod
    def quadratic(cls, p: int) -> "FieldCtx":
        return cls(p, "ext")

    def __repr__(self):
        return f"FieldCtx(F_{self.p})" if self.kind == "prime" else f"FieldCtx(F_{self.p}^2)"

    def __eq__(self, other):
        return (
            isinstance(other, FieldCtx) and self.kind == other.kind and self.p == other.p
        )

    def __hash__(self):
        return hash((self.kind, self.p))

    # -- raw-value arithmetic ------------------------------------------------

    def reduce(self, v):
        p = self.p
        if self.kind == "prime":
            if isinstance(v, tuple):
                raise DomainError("prime field value must be an int")
            return v % p
        if isinstance(v, int):
            return (v % p, 0)
        x, y = v
        return (x % p, y % p)

    def zero_raw(self):
        return 0 if self.kind == "prime" else (0, 0)

    def one_raw(self):
        return 1 if self.kind == "prime" else (1, 0)

    def add(self, x, y):
        p = self.p
        if self.kind == "prime":
            return (x + y) % p
        return ((x[0] + y[0]) % p, (x[1] + y[1]) % p)

    def sub(self, x, y):
        p = self.p
        if self.kind == "prime":
            return (x - y) % p
        return ((x[0] - y[0]) % p, (x[1] - y[1]) % p)

    def neg(self, x):
        p = self.p
        if self.kind == "prime":
            return (-x) % p
        return ((-x[0]) % p, (-x[1]) % p)

    def mul(self, x, y):
        p = self.p
        if self.kind == "prime":
            return x * y % p
        a, b = x
        c, d = y
        return ((a * c - b * d) % p, (a * d + b * c) % p)

    def inv(self, x):
        p = self.p
        if self.kind == "prime":
            return _inverse_mod(x, p)
        a, b = x
        # (a + b*alpha)^-1 = (a - b*alpha) / (a^2 + b^2); the norm a^2 + b^2
        # is nonzero for (a, b) != 0 because -1 is a non-residue mod p.
        n = (a * a + b * b) % p
        ninv = _inverse_mod(n, p)
        return (a * ninv % p, (-b) * ninv % p)

    def pow(self, x, e: int):
        if e < 0:
            return self.pow(self.inv(x), -e)
        if self.kind == "prime":
            return pow(x, e, self.p)
        out = self.one_raw()
        base = x
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def is_zero(self, x):
        return x == 0 if self.kind == "prime" else x == (0, 0)

    # -- elements ------------------------------------------------------------

    def elem(self, v) -> "FieldElement":
        return FieldElement(self, self.reduce(v))

    def zero(self) -> "FieldElement":
        return FieldElement(self, self.zero_raw())

    def one(self) -> "FieldElement":
        return FieldElement(self, self.one_raw())

    def alpha(self) -> "FieldElement":
        if self.kind != "ext":
            raise DomainError("alpha exists only in extension contexts")
        return FieldElement(self, (0, 1))

    def elements(self):
        """All field elements, lexicographic raw order."""
        if self.kind == "prime":
            for v in range(self.p):
                yield FieldElement(self, v)
        else:
            for x in range(self.p):
                for y in range(self.p):
                    yield FieldElement(self, (x, y))

    def random(self, rng) -> "FieldElement":
        if self.kind == "prime":
            return FieldElement(self, rng.randbelow(self.p))
        return FieldElement(self, (rng.randbelow(self.p), rng.randbelow(self.p)))


class FieldElement:
    """A field value tied to its context; supports + - * / ** and inverse()."""

    __slots__ = ("ctx", "val")

    def __init__(self, ctx: FieldCtx, val):
        self.ctx = ctx
        self.val = ctx.reduce(val)

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.ctx != self.ctx:
                raise DomainError("field context mismatch")
            return other.val
        if isinstance(other, int):
            return self.ctx.reduce(other)
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.ctx, self.ctx.add(self.val, v))

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.ctx, self.ctx.sub(self.val, v))

    def __rsub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.ctx, self.ctx.sub(v, self.val))

    def __mul__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.ctx, self.ctx.mul(self.val, v))

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(self.ctx, self.ctx.neg(self.val))

    def __truediv__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElement(self.ctx, self.ctx.mul(self.val, self.ctx.inv(v)))

    def __pow__(self, e: int):
        return FieldElement(self.ctx, self.ctx.pow(self.val, e))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.ctx, self.ctx.inv(self.val))

    def is_zero(self) -> bool:
        return self.ctx.is_zero(self.val)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.ctx == other.ctx and self.val == other.val
        if isinstance(other, int):
            return self.val == self.ctx.reduce(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.ctx, self.val))

    def __repr__(self):
        if self.ctx.kind == "prime":
            return f"F{self.ctx.p}({self.val})"
        return f"F{self.ctx.p}^2{self.val}"


def field_inverse(x: FieldElement) -> FieldElement:
    """Multiplicative inverse; DomainError('no inverse of zero') on zero."""
    return x.inverse()


def sqrt_minus_one(ctx: FieldCtx) -> FieldElement:
    """An element whose square is -1.

    Extension contexts return alpha itself. Prime contexts admit a root only
    for p = 2 or p = 1 (mod 4); p = 3 (mod 4) raises DomainError since
    x^2 = -1 has no solution there.
    """
    if ctx.kind == "ext":
        return ctx.alpha()
    p = ctx.p
    if p == 2:
        return ctx.one()
    if p % 4 == 3:
        raise DomainError(f"no square root of -1 in F_{p}")
    # p = 1 (mod 4): a non-residue g gives g^((p-1)/4) as a root.
    g = 2
    while pow(g, (p - 1) // 2, p) != p - 1:
        g += 1
    return ctx.elem(pow(g, (p - 1) // 4, p))
