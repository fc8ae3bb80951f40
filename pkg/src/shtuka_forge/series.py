"""Truncated power series F_q[z]/(z^N) and a packed table-driven variant."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import FieldMismatch, NonUnit, ParseError
from .fields import FqField

MAX_PRECISION = 64


@dataclass(frozen=True)
class TruncSeries:
    """Series ``sum c_i z^i`` known modulo ``z^N``."""

    field: FqField
    N: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= self.N <= MAX_PRECISION:
            raise ValueError(f"precision {self.N} outside 1..{MAX_PRECISION}")
        if len(self.coeffs) != self.N:
            raise ValueError("coefficient count must equal N")

    @classmethod
    def make(cls, field: FqField, N: int, coeffs) -> "TruncSeries":
        cs = [field.check(int(c)) for c in coeffs][:N]
        return cls(field, N, tuple(cs + [0] * (N - len(cs))))

    @classmethod
    def zero(cls, field, N):
        return cls(field, N, (0,) * N)

    @classmethod
    def one(cls, field, N):
        return cls.make(field, N, [1])

    def _compat(self, other: "TruncSeries") -> None:
        if self.field != other.field or self.N != other.N:
            raise FieldMismatch("series over different fields or precisions")

    def __add__(self, other):
        return ts_add(self, other)

    def __sub__(self, other):
        return ts_sub(self, other)

    def __mul__(self, other):
        return ts_mul(self, other)

    def __neg__(self):
        F = self.field
        return TruncSeries(F, self.N, tuple(F.neg(c) for c in self.coeffs))

    def valuation(self) -> int:
        """Index of the first nonzero coefficient, or N for the zero series."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return self.N

    def is_unit(self) -> bool:
        return self.coeffs[0] != 0

    def __str__(self) -> str:
        return format_series(self)


def ts_add(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    a._compat(b)
    F = a.field
    return TruncSeries(F, a.N, tuple(F.add(x, y) for x, y in zip(a.coeffs, b.coeffs)))


def ts_sub(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    a._compat(b)
    F = a.field
    return TruncSeries(F, a.N, tuple(F.sub(x, y) for x, y in zip(a.coeffs, b.coeffs)))


def ts_mul(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    a._compat(b)
    return TruncSeries(a.field, a.N, _mul(a.field, a.coeffs, b.coeffs, a.N))


def ts_inv(a: TruncSeries) -> TruncSeries:
    if not a.is_unit():
        raise NonUnit("constant term is zero")
    return TruncSeries(a.field, a.N, _inv(a.field, a.coeffs, a.N))


def ts_frobenius(a: TruncSeries, q: int | None = None) -> TruncSeries:
    """Coefficientwise q-th power; ``q`` defaults to the field order."""
    F = a.field
    q = F.q if q is None else q
    return TruncSeries(F, a.N, tuple(F.pow(c, q) for c in a.coeffs))


def ts_shift(a: TruncSeries, k: int) -> TruncSeries:
    """Multiply by z^k, k >= 0."""
    return TruncSeries(a.field, a.N, ((0,) * k + a.coeffs)[: a.N])


def _mul(F: FqField, a, b, N: int) -> tuple[int, ...]:
    out = [0] * N
    mt, at = F.mul_t, F.add_t
    for i, x in enumerate(a):
        if x:
            row = mt[x]
            for j in range(N - i):
                y = b[j]
                if y:
                    out[i + j] = at[out[i + j]][row[y]]
    return tuple(out)


def _inv(F: FqField, a, N: int) -> tuple[int, ...]:
    inv0 = F.inv(a[0])
    out = [inv0] + [0] * (N - 1)
    for n in range(1, N):
        acc = 0
        for i in range(1, n + 1):
            if a[i] and out[n - i]:
                acc = F.add(acc, F.mul(a[i], out[n - i]))
        out[n] = F.neg(F.mul(acc, inv0))
    return tuple(out)


# text ----------------------------------------------------------------------

def format_series(a: TruncSeries) -> str:
    F = a.field
    terms = []
    for i, c in enumerate(a.coeffs):
        if not c:
            continue
        cs = F.format(c)
        if F.deg > 1 and ("+" in cs or "*" in cs) and i:
            cs = f"({cs})"
        if i == 0:
            terms.append(cs)
        else:
            mono = "z" if i == 1 else f"z^{i}"
            terms.append(mono if c == 1 else f"{cs}*{mono}")
    return " + ".join(terms) if terms else "0"


def _split_top(s: str) -> list[str]:
    parts, depth, cur = [], 0, ""
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "+" and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return parts


_ZTERM = re.compile(r"^(?:(\(.*\)|[0-9x^+*]+?)\*?)?z(?:\^(-?\d+))?$")


def parse_terms(text: str, field: FqField) -> dict[int, int]:
    """Parse ``c0 + c1*z + ...`` into exponent -> coefficient; negative exponents allowed."""
    s = re.sub(r"(?<!\^)-", "+-", text.replace(" ", ""))
    if s.startswith("+"):
        s = s[1:]
    if not s:
        raise ParseError("empty series")
    out: dict[int, int] = {}
    for term in _split_top(s):
        if not term:
            raise ParseError(f"bad series {text!r}")
        neg = term.startswith("-")
        if neg:
            term = term[1:]
        if "z" in term:
            m = _ZTERM.match(term)
            if not m:
                raise ParseError(f"bad term {term!r}")
            coef = field.parse(m.group(1)) if m.group(1) else 1
            exp = int(m.group(2)) if m.group(2) is not None else 1
        else:
            coef, exp = field.parse(term), 0
        if neg:
            coef = field.neg(coef)
        out[exp] = field.add(out.get(exp, 0), coef)
    return out


def parse_series(text: str, field: FqField, N: int) -> TruncSeries:
    terms = parse_terms(text, field)
    if any(e < 0 for e in terms):
        raise ParseError("negative exponent in a power series")
    coeffs = [0] * N
    for e, c in terms.items():
        if e < N:
            coeffs[e] = c
    return TruncSeries(field, N, tuple(coeffs))


class SeriesRing:
    """F_q[z]/(z^N) on integer codes ``sum c_i q^i`` with lookup tables.

    Used by the enumeration-heavy modules; tables are built only when the
    ring is small enough.
    """

    TABLE_LIMIT = 256

    def __init__(self, field: FqField, N: int):
        self.field, self.N, self.q = field, N, field.q
        self.size = field.q**N
        self._tables = self.size <= self.TABLE_LIMIT
        if self._tables:
            tuples = [self.decode(c) for c in range(self.size)]
            F = field
            self.add_t = [[self.encode(tuple(F.add(x, y) for x, y in zip(a, b))) for b in tuples]
                          for a in tuples]
            self.mul_t = [[self.encode(_mul(F, a, b, N)) for b in tuples] for a in tuples]
            self.neg_t = [self.encode(tuple(F.neg(x) for x in a)) for a in tuples]

    def encode(self, coeffs) -> int:
        v = 0
        for c in reversed(tuple(coeffs)):
            v = v * self.q + c
        return v

    def decode(self, code: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.N):
            code, r = divmod(code, self.q)
            out.append(r)
        return tuple(out)

    def add(self, a: int, b: int) -> int:
        if self._tables:
            return self.add_t[a][b]
        F = self.field
        return self.encode(tuple(F.add(x, y) for x, y in zip(self.decode(a), self.decode(b))))

    def neg(self, a: int) -> int:
        if self._tables:
            return self.neg_t[a]
        return self.encode(tuple(self.field.neg(x) for x in self.decode(a)))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self._tables:
            return self.mul_t[a][b]
        return self.encode(_mul(self.field, self.decode(a), self.decode(b), self.N))

    def inv(self, a: int) -> int:
        return self.encode(_inv(self.field, self.decode(a), self.N))

    def is_unit(self, a: int) -> bool:
        return a % self.q != 0

    def valuation(self, a: int) -> int:
        if a == 0:
            return self.N
        v = 0
        while a % self.q == 0:
            a //= self.q
            v += 1
        return v

    def shift(self, a: int, k: int) -> int:
        """Multiply by z^k (k >= 0)."""
        if k >= self.N:
            return 0
        return (a * self.q**k) % self.size

    def frob(self, a: int, power: int) -> int:
        F = self.field
        return self.encode(tuple(F.pow(c, power) for c in self.decode(a)))

    def truncate(self, a: int, n: int) -> int:
        return a % (self.q**n)
