"""p-typical Witt vectors of finite length over small F_p-algebras.

The addition, multiplication, negation and Frobenius laws are integer
polynomials obtained by solving the ghost equations
``w_n = sum_{i<=n} p^i x_i^(p^(n-i))`` one coordinate at a time.  They are
cached per ``(p, N)`` and evaluated in the base ring (coefficients mod p).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .errors import LengthUnderflow, MixedRings, NotInIdeal, ParseError, WittOverflow
from .fields import FqField
from .series import SeriesRing

DEFAULT_MAX_LENGTH = 6
COEFF_BIT_BUDGET = 1 << 14

Poly = dict  # exponent tuple -> int


def _padd(a: Poly, b: Poly, sign: int = 1) -> Poly:
    out = dict(a)
    for k, v in b.items():
        c = out.get(k, 0) + sign * v
        if c:
            out[k] = c
        else:
            out.pop(k, None)
    return out


def _pmul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            c = out.get(k, 0) + va * vb
            if c:
                out[k] = c
            else:
                out.pop(k, None)
    return out


def _ppow(a: Poly, n: int, nvars: int) -> Poly:
    acc: Poly = {(0,) * nvars: 1}
    base = a
    while n:
        if n & 1:
            acc = _pmul(acc, base)
        n >>= 1
        if n:
            base = _pmul(base, base)
    return acc


def _var(i: int, nvars: int) -> Poly:
    e = [0] * nvars
    e[i] = 1
    return {tuple(e): 1}


def _check_budget(poly: Poly) -> None:
    for c in poly.values():
        if c.bit_length() > COEFF_BIT_BUDGET:
            raise WittOverflow("Witt polynomial coefficient exceeds the integer budget")


def _ghost(vars_: list[Poly], n: int, p: int, nvars: int) -> Poly:
    out: Poly = {}
    for i in range(n + 1):
        term = _ppow(vars_[i], p ** (n - i), nvars)
        out = _padd(out, {k: v * p**i for k, v in term.items()})
    return out


def _solve(p: int, N: int, nvars: int, target) -> list[Poly]:
    """Solve w_n(S) = target(n) for S_0..S_{N-1}."""
    sols: list[Poly] = []
    for n in range(N):
        rest = dict(target(n))
        for i, s in enumerate(sols):
            term = _ppow(s, p ** (n - i), nvars)
            rest = _padd(rest, {k: v * p**i for k, v in term.items()}, -1)
        pn = p**n
        for k, v in rest.items():
            if v % pn:
                raise AssertionError("ghost recursion produced a non-integral coefficient")
        sol = {k: v // pn for k, v in rest.items()}
        _check_budget(sol)
        sols.append(sol)
    return sols


@dataclass(frozen=True)
class WittLaws:
    """Integer polynomials for the ring laws of W_N, variables x_0..x_{N-1}, y_0..y_{N-1}."""

    p: int
    N: int
    add: tuple
    mul: tuple
    neg: tuple
    frob: tuple  # F_n(x_0..x_N), one variable block of length N+1


@lru_cache(maxsize=None)
def witt_laws(p: int, N: int, max_length: int = DEFAULT_MAX_LENGTH) -> WittLaws:
    if N < 1:
        raise LengthUnderflow("Witt length must be positive")
    if N > max_length:
        raise WittOverflow(f"length {N} above configured maximum {max_length}")
    nv = 2 * N
    xs = [_var(i, nv) for i in range(N)]
    ys = [_var(N + i, nv) for i in range(N)]
    gx = [_ghost(xs, n, p, nv) for n in range(N)]
    gy = [_ghost(ys, n, p, nv) for n in range(N)]
    add = _solve(p, N, nv, lambda n: _padd(gx[n], gy[n]))
    mul = _solve(p, N, nv, lambda n: _pmul(gx[n], gy[n]))
    neg = _solve(p, N, nv, lambda n: {k: -v for k, v in gx[n].items()})
    nf = N + 1
    fx = [_var(i, nf) for i in range(nf)]
    frob = _solve(p, N, nf, lambda n: _ghost(fx, n + 1, p, nf))
    return WittLaws(p, N, tuple(add), tuple(mul), tuple(neg), tuple(frob))


def reduced_law(poly: Poly, p: int) -> tuple:
    """Coefficients reduced mod p, zero terms dropped, deterministic order."""
    return tuple(sorted((k, v % p) for k, v in poly.items() if v % p))


class TruncPolyRing:
    """F_p[x]/(x^k), a non-perfect base for Witt vectors.  Elements are int codes."""

    perfect = False

    def __init__(self, p: int, k: int):
        self.p, self.k = p, k
        self._ring = SeriesRing(FqField(p, 1), k)
        self.q = self._ring.size

    def add(self, a, b):
        return self._ring.add(a, b)

    def neg(self, a):
        return self._ring.neg(a)

    def sub(self, a, b):
        return self._ring.sub(a, b)

    def mul(self, a, b):
        return self._ring.mul(a, b)

    def pow(self, a, n):
        acc = 1
        for _ in range(n):
            acc = self.mul(acc, a)
        return acc

    def from_int(self, n):
        return n % self.p

    def frob(self, a, power=None):
        return self.pow(a, self.p if power is None else power)

    def elements(self):
        return range(self.q)

    def check(self, a):
        if not isinstance(a, int) or not 0 <= a < self.q:
            raise MixedRings(f"{a!r} is not an element of F_{self.p}[x]/(x^{self.k})")
        return a

    def format(self, a):
        cs = self._ring.decode(a)
        terms = []
        for i, c in enumerate(cs):
            if c:
                mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
                terms.append(str(c) if not mono else (mono if c == 1 else f"{c}*{mono}"))
        return "+".join(terms) if terms else "0"

    def parse(self, text):
        s = text.replace(" ", "")
        coeffs = [0] * self.k
        for term in s.split("+"):
            if not term:
                raise ParseError(f"bad element {text!r}")
            if "x" in term:
                c, _, rest = term.partition("x")
                c = int(c.rstrip("*")) if c.rstrip("*") else 1
                e = int(rest[1:]) if rest.startswith("^") else 1
            else:
                c, e = int(term), 0
            if e < self.k:
                coeffs[e] = (coeffs[e] + c) % self.p
        return self._ring.encode(coeffs)

    def __eq__(self, other):
        return isinstance(other, TruncPolyRing) and (self.p, self.k) == (other.p, other.k)

    def __hash__(self):
        return hash(("trunc", self.p, self.k))

    def __repr__(self):
        return f"TruncPolyRing(p={self.p}, k={self.k})"


def _is_perfect(base) -> bool:
    return isinstance(base, FqField)


class _Evaluator:
    """Evaluate reduced law polynomials in a base ring."""

    def __init__(self, base, polys, p):
        self.base = base
        self.terms = []
        for poly in polys:
            self.terms.append([(c, [(i, e) for i, e in enumerate(k) if e]) for k, c in reduced_law(poly, p)])

    def __call__(self, values, n):
        B = self.base
        acc = 0
        for c, mono in self.terms[n]:
            t = B.from_int(c)
            for i, e in mono:
                v = values[i]
                if v == 0:
                    t = 0
                    break
                t = B.mul(t, B.pow(v, e))
            if t:
                acc = B.add(acc, t)
        return acc


class WittRing:
    """W_N(R) for R a finite field or F_p[x]/(x^k)."""

    TABLE_LIMIT = 64

    def __init__(self, base, N: int, max_length: int = DEFAULT_MAX_LENGTH):
        self.base, self.N, self.p = base, N, base.p
        self.perfect = _is_perfect(base)
        self.laws = witt_laws(self.p, N, max_length)
        self._add = _Evaluator(base, self.laws.add, self.p)
        self._mul = _Evaluator(base, self.laws.mul, self.p)
        self._neg = _Evaluator(base, self.laws.neg, self.p)
        self._frob = _Evaluator(base, self.laws.frob, self.p) if N > 1 or not self.perfect else None
        self._tables = None

    def __eq__(self, other):
        return isinstance(other, WittRing) and self.base == other.base and self.N == other.N

    def __hash__(self):
        return hash((self.base, self.N))

    def __repr__(self):
        return f"WittRing({self.base!r}, N={self.N})"

    # element constructors ---------------------------------------------------
    def vec(self, coords) -> "WittVec":
        coords = tuple(self.base.check(int(c)) for c in coords)
        if len(coords) != self.N:
            raise MixedRings(f"expected {self.N} coordinates, got {len(coords)}")
        return WittVec(self, coords)

    def zero(self):
        return WittVec(self, (0,) * self.N)

    def one(self):
        return WittVec(self, (1,) + (0,) * (self.N - 1))

    def teichmuller(self, a) -> "WittVec":
        return WittVec(self, (a,) + (0,) * (self.N - 1))

    def from_int(self, n: int) -> "WittVec":
        out, base = self.zero(), self.one()
        if n < 0:
            base, n = self.neg(base), -n
        while n:
            if n & 1:
                out = self.add(out, base)
            base = self.add(base, base)
            n >>= 1
        return out

    def elements(self):
        for coords in product(list(self.base.elements()), repeat=self.N):
            yield WittVec(self, coords)

    def size(self) -> int:
        return self.base.q**self.N

    # raw laws on coordinate tuples -------------------------------------------
    def _laws_tables(self):
        if self._tables is None and self.size() <= self.TABLE_LIMIT:
            elems = [v.coords for v in self.elements()]
            self._tables = (
                {(a, b): self._raw(self._add, a, b) for a in elems for b in elems},
                {(a, b): self._raw(self._mul, a, b) for a in elems for b in elems},
            )
        return self._tables

    def _raw(self, ev, a, b):
        vals = list(a) + list(b)
        return tuple(ev(vals, n) for n in range(self.N))

    def add_c(self, a: tuple, b: tuple) -> tuple:
        t = self._laws_tables()
        return t[0][(a, b)] if t else self._raw(self._add, a, b)

    def mul_c(self, a: tuple, b: tuple) -> tuple:
        t = self._laws_tables()
        return t[1][(a, b)] if t else self._raw(self._mul, a, b)

    def neg_c(self, a: tuple) -> tuple:
        return tuple(self._neg(list(a) + [0] * self.N, n) for n in range(self.N))

    # public operations -------------------------------------------------------
    def _own(self, *xs):
        for x in xs:
            if not isinstance(x, WittVec) or x.ring != self:
                raise MixedRings("Witt vectors over different bases or lengths")

    def add(self, a, b):
        self._own(a, b)
        return WittVec(self, self.add_c(a.coords, b.coords))

    def mul(self, a, b):
        self._own(a, b)
        return WittVec(self, self.mul_c(a.coords, b.coords))

    def neg(self, a):
        self._own(a)
        return WittVec(self, self.neg_c(a.coords))

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def is_unit(self, a) -> bool:
        if self.perfect:
            return a.coords[0] != 0
        return self.base._ring.is_unit(a.coords[0])


@dataclass(frozen=True)
class WittVec:
    ring: WittRing
    coords: tuple

    def __add__(self, other):
        return self.ring.add(self, other)

    def __sub__(self, other):
        return self.ring.sub(self, other)

    def __mul__(self, other):
        return self.ring.mul(self, other)

    def __neg__(self):
        return self.ring.neg(self)

    def __str__(self):
        return format_witt(self)


@lru_cache(maxsize=None)
def witt_ring(base, N: int) -> WittRing:
    return WittRing(base, N)


def witt_add(a: WittVec, b: WittVec) -> WittVec:
    if a.ring != b.ring:
        raise MixedRings("Witt vectors over different bases or lengths")
    return a.ring.add(a, b)


def witt_mul(a: WittVec, b: WittVec) -> WittVec:
    if a.ring != b.ring:
        raise MixedRings("Witt vectors over different bases or lengths")
    return a.ring.mul(a, b)


def witt_frobenius(a: WittVec) -> WittVec:
    """F.  Length-preserving coordinatewise p-th power over a perfect base;
    over a non-perfect base the universal law is used and the length drops by one."""
    W = a.ring
    if W.perfect:
        return WittVec(W, tuple(W.base.frob(c) for c in a.coords))
    if W.N == 1:
        raise LengthUnderflow("Frobenius of a length-1 Witt vector over a non-perfect base")
    shorter = witt_ring(W.base, W.N - 1)
    vals = list(a.coords)
    return WittVec(shorter, tuple(W._frob(vals, n) for n in range(W.N - 1)))


def witt_frobenius_inverse(a: WittVec) -> WittVec:
    W = a.ring
    if not W.perfect:
        raise MixedRings("inverse Frobenius needs a perfect base")
    F = W.base
    return WittVec(W, tuple(F.pow(c, F.q // F.p) for c in a.coords))


def witt_verschiebung(a: WittVec) -> WittVec:
    """Length-preserving V: (a_0,...,a_{N-1}) -> (0,a_0,...,a_{N-2})."""
    return WittVec(a.ring, (0,) + a.coords[:-1])


def witt_shift(a: WittVec) -> WittVec:
    """Primitive V: W_N -> W_{N+1}, injective, lands in the ideal V W_N."""
    return WittVec(witt_ring(a.ring.base, a.ring.N + 1), (0,) + a.coords)


def witt_v_untwist(w: WittVec) -> WittVec:
    """Inverse of the primitive V on its image: (0,a_1,...,a_{N-1}) -> (a_1,...,a_{N-1})."""
    if w.coords[0] != 0:
        raise NotInIdeal(f"{format_witt(w)} is not in the image of V")
    if w.ring.N == 1:
        raise LengthUnderflow("untwisting a length-1 vector leaves nothing")
    return WittVec(witt_ring(w.ring.base, w.ring.N - 1), w.coords[1:])


def witt_truncate(a: WittVec, n: int) -> WittVec:
    return WittVec(witt_ring(a.ring.base, n), a.coords[:n])


def witt_pad(a: WittVec, n: int) -> WittVec:
    """Lift to length n >= N by appending zero coordinates."""
    return WittVec(witt_ring(a.ring.base, n), a.coords + (0,) * (n - a.ring.N))


def witt_unit_inverse(a: WittVec) -> WittVec:
    W = a.ring
    if not W.is_unit(a):
        raise NotInIdeal("not a unit")
    for b in W.elements():
        if W.mul_c(a.coords, b.coords) == W.one().coords:
            return b
    raise AssertionError("unit without inverse")


def witt_to_zmod(a: WittVec) -> int:
    """The isomorphism W_N(F_p) -> Z/p^N, sum_i V^i[a_i] -> sum_i p^i T(a_i)."""
    W = a.ring
    if not (W.perfect and W.base.deg == 1):
        raise MixedRings("only defined over a prime field")
    p, N = W.p, W.N
    mod = p**N
    return sum(p**i * pow(c, p ** (N - 1), mod) for i, c in enumerate(a.coords)) % mod


def format_witt(a: WittVec) -> str:
    fmt = a.ring.base.format
    return "(" + ",".join(fmt(c) for c in a.coords) + ")"


def parse_witt(text: str, W: WittRing) -> WittVec:
    s = text.strip()
    if not (s.startswith("(") and s.endswith(")")):
        raise ParseError(f"Witt vector must be parenthesised: {text!r}")
    parts = [t for t in s[1:-1].split(",")]
    if len(parts) != W.N:
        raise ParseError(f"expected {W.N} coordinates in {text!r}")
    return W.vec(W.base.parse(t) for t in parts)
