"""Finite fields F_q = F_p[x]/(f) with table-driven arithmetic.

Elements are plain ints in ``range(q)``; the base-p digits of the int are the
coefficients of the representing polynomial (least significant digit first).
"""

from __future__ import annotations

import itertools
import re
from functools import lru_cache

from .errors import FieldMismatch, NotIrreducible, NonUnit, ParseError

MAX_ORDER = 4096


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % k for k in range(2, int(n**0.5) + 1))


def _poly_mod(num: list[int], den: list[int], p: int) -> list[int]:
    num = num[:]
    inv_lead = pow(den[-1], p - 2, p)
    while len(num) >= len(den) and any(num):
        if num[-1] == 0:
            num.pop()
            continue
        c = num[-1] * inv_lead % p
        shift = len(num) - len(den)
        for i, d in enumerate(den):
            num[shift + i] = (num[shift + i] - c * d) % p
        num.pop()
    while num and num[-1] == 0:
        num.pop()
    return num


def is_irreducible(modulus: tuple[int, ...], p: int) -> bool:
    """Exhaustive test: no monic factor of degree 1..deg/2 divides ``modulus``."""
    deg = len(modulus) - 1
    if deg < 1 or modulus[-1] % p != 1:
        return False
    for k in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=k):
            if not _poly_mod(list(modulus), list(low) + [1], p):
                return False
    return True


def default_modulus(p: int, deg: int) -> tuple[int, ...]:
    """The first monic irreducible of degree ``deg``, ordered by coefficient tuple."""
    if deg == 1:
        return (0, 1)
    for low in itertools.product(range(p), repeat=deg):
        cand = tuple(reversed(low)) + (1,)
        if cand[0] != 0 and is_irreducible(cand, p):
            return cand
    raise NotIrreducible(f"no irreducible of degree {deg} over F_{p}")


class FqField:
    """The field with ``q = p**deg`` elements."""

    def __init__(self, p: int, deg: int = 1, modulus: tuple[int, ...] | None = None):
        if not _is_prime(p):
            raise NotIrreducible(f"{p} is not prime")
        if deg < 1:
            raise NotIrreducible("degree must be positive")
        q = p**deg
        if q > MAX_ORDER:
            raise ValueError(f"field order {q} above supported maximum {MAX_ORDER}")
        if modulus is None:
            modulus = default_modulus(p, deg)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != deg + 1 or not is_irreducible(modulus, p):
            raise NotIrreducible(f"modulus {modulus} is not irreducible of degree {deg}")
        self.p, self.deg, self.q, self.modulus = p, deg, q, modulus
        self._build_tables()

    def _digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.deg):
            a, r = divmod(a, self.p)
            out.append(r)
        return out

    def _undigits(self, ds) -> int:
        v = 0
        for c in reversed(list(ds)):
            v = v * self.p + c
        return v

    def _build_tables(self) -> None:
        p, q, deg = self.p, self.q, self.deg
        digits = [self._digits(a) for a in range(q)]
        self.add_t = [[self._undigits((x + y) % p for x, y in zip(digits[a], digits[b]))
                       for b in range(q)] for a in range(q)]
        self.neg_t = [self._undigits((-x) % p for x in digits[a]) for a in range(q)]
        mod = list(self.modulus)
        mul = [[0] * q for _ in range(q)]
        for a in range(q):
            for b in range(a, q):
                prod = [0] * (2 * deg - 1)
                for i, x in enumerate(digits[a]):
                    if x:
                        for j, y in enumerate(digits[b]):
                            prod[i + j] = (prod[i + j] + x * y) % p
                red = _poly_mod(prod, mod, p) if deg > 1 else [prod[0] % p]
                red = (red + [0] * deg)[:deg]
                mul[a][b] = mul[b][a] = self._undigits(red)
        self.mul_t = mul
        self.inv_t = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if mul[a][b] == 1:
                    self.inv_t[a] = b
                    break
        self.frob_t = [self.pow(a, p) for a in range(q)]
        self.sub_t = [[self.add_t[a][self.neg_t[b]] for b in range(q)] for a in range(q)]

    # arithmetic -----------------------------------------------------------
    def add(self, a: int, b: int) -> int:
        return self.add_t[a][b]

    def sub(self, a: int, b: int) -> int:
        return self.sub_t[a][b]

    def neg(self, a: int) -> int:
        return self.neg_t[a]

    def mul(self, a: int, b: int) -> int:
        return self.mul_t[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise NonUnit("zero has no inverse")
        return self.inv_t[a]

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            return self.pow(self.inv(a), -n)
        acc, base = 1, a
        while n:
            if n & 1:
                acc = self.mul_t[acc][base]
            base = self.mul_t[base][base]
            n >>= 1
        return acc

    def frob(self, a: int, power: int | None = None) -> int:
        """Raise to ``power`` (a power of p); default is the absolute Frobenius a -> a^p."""
        if power is None or power == self.p:
            return self.frob_t[a]
        return self.pow(a, power)

    def from_int(self, n: int) -> int:
        """Image of the integer ``n`` under Z -> F_q."""
        return n % self.p

    def elements(self) -> range:
        return range(self.q)

    def units(self) -> range:
        return range(1, self.q)

    def generator(self) -> int:
        """Smallest multiplicative generator."""
        for g in range(1, self.q):
            if self.q == 2 or all(self.pow(g, (self.q - 1) // r) != 1
                                  for r in range(2, self.q) if (self.q - 1) % r == 0 and _is_prime(r)):
                return g
        raise AssertionError("unreachable")

    def fp_basis(self) -> list[int]:
        """The basis 1, x, ..., x^(deg-1) of F_q over F_p."""
        return [self.p**i for i in range(self.deg)]

    def check(self, a: int) -> int:
        if not isinstance(a, int) or not 0 <= a < self.q:
            raise FieldMismatch(f"{a!r} is not an element of F_{self.q}")
        return a

    # text -----------------------------------------------------------------
    def format(self, a: int) -> str:
        if self.deg == 1:
            return str(a)
        terms = []
        for i, c in reversed(list(enumerate(self._digits(a)))):
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if not mono:
                terms.append(str(c))
            else:
                terms.append(mono if c == 1 else f"{c}*{mono}")
        return "+".join(terms) if terms else "0"

    _TERM = re.compile(r"^(\d+)?\*?(x(?:\^(\d+))?)?$")

    def parse(self, text: str) -> int:
        s = text.replace(" ", "")
        if s.startswith("(") and s.endswith(")"):
            s = s[1:-1]
        if not s:
            raise ParseError("empty field element")
        if self.deg == 1 or "x" not in s:
            try:
                n = int(s)
            except ValueError as exc:
                raise ParseError(f"bad field element {text!r}") from exc
            if self.deg > 1 and not 0 <= n < self.q:
                raise ParseError(f"{n} out of range for F_{self.q}")
            return n % self.p if self.deg == 1 else n
        coeffs = [0] * max(self.deg, 1)
        for term in s.split("+"):
            m = self._TERM.match(term)
            if not m or not term:
                raise ParseError(f"bad term {term!r} in {text!r}")
            c = int(m.group(1)) if m.group(1) else 1
            e = 0 if not m.group(2) else (int(m.group(3)) if m.group(3) else 1)
            if e >= self.deg:
                raise ParseError(f"degree {e} too large in {text!r}")
            coeffs[e] = (coeffs[e] + c) % self.p
        return self._undigits(coeffs)

    def __eq__(self, other) -> bool:
        return isinstance(other, FqField) and (self.p, self.modulus) == (other.p, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.modulus))

    def __repr__(self) -> str:
        return f"FqField(p={self.p}, deg={self.deg}, modulus={self.modulus})"


@lru_cache(maxsize=None)
def gf(q: int) -> FqField:
    """Cached field of order ``q`` with the default modulus."""
    for p in range(2, q + 1):
        if q % p == 0:
            break
    deg, n = 0, q
    while n % p == 0:
        n //= p
        deg += 1
    if n != 1:
        raise NotIrreducible(f"{q} is not a prime power")
    return FqField(p, deg)
