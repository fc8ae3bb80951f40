"""Finite chain rings: F_q, F_q[z]/(z^K) and W_N(F_q).

Each has a uniformizer pi with pi^K = 0 and residue field F_q, so every
element is a unit times a power of pi.  This is what the graded-module and
Hecke code needs: valuations, unit inverses and Smith normal form.
"""

from __future__ import annotations

import random

from .errors import NonUnit, ParseError, PrecisionExhausted
from .fields import FqField
from .series import SeriesRing, format_series, parse_terms, TruncSeries
from .witt import WittRing, WittVec, format_witt, parse_witt, witt_ring


class ChainRing:
    field: FqField
    K: int  # length: pi^K = 0
    zero = 0
    one = 1

    def val(self, a) -> int:
        raise NotImplementedError

    def is_unit(self, a) -> bool:
        return self.val(a) == 0

    def residue(self, a) -> int:
        raise NotImplementedError

    def lift(self, c: int):
        raise NotImplementedError

    def pi_power(self, k: int):
        raise NotImplementedError

    def divide_pi(self, a, k: int):
        """Some b with pi^k b = a; requires val(a) >= k."""
        raise NotImplementedError

    def random(self, rng: random.Random):
        raise NotImplementedError

    def elements(self):
        raise NotImplementedError


class FieldChain(ChainRing):
    def __init__(self, field: FqField):
        self.field, self.K, self.tag = field, 1, "field"

    def add(self, a, b):
        return self.field.add(a, b)

    def sub(self, a, b):
        return self.field.sub(a, b)

    def neg(self, a):
        return self.field.neg(a)

    def mul(self, a, b):
        return self.field.mul(a, b)

    def inv(self, a):
        return self.field.inv(a)

    def val(self, a):
        return 0 if a else 1

    def residue(self, a):
        return a

    def lift(self, c):
        return c

    def pi_power(self, k):
        return 1 if k == 0 else 0

    def divide_pi(self, a, k):
        return a if k == 0 else 0

    def random(self, rng):
        return rng.randrange(self.field.q)

    def elements(self):
        return range(self.field.q)

    def format(self, a):
        return self.field.format(a)

    def parse(self, s):
        return self.field.parse(s)

    def describe(self):
        return {"base": "field", "q": self.field.q}

    def __eq__(self, o):
        return isinstance(o, FieldChain) and o.field == self.field

    def __hash__(self):
        return hash(("field", self.field))


class SeriesChain(ChainRing):
    """F_q[z]/(z^K); elements are SeriesRing codes."""

    def __init__(self, field: FqField, K: int):
        self.field, self.K, self.tag = field, K, "series"
        self.R = SeriesRing(field, K)

    def add(self, a, b):
        return self.R.add(a, b)

    def sub(self, a, b):
        return self.R.sub(a, b)

    def neg(self, a):
        return self.R.neg(a)

    def mul(self, a, b):
        return self.R.mul(a, b)

    def inv(self, a):
        if not self.R.is_unit(a):
            raise NonUnit("non-unit series")
        return self.R.inv(a)

    def val(self, a):
        return self.R.valuation(a)

    def residue(self, a):
        return a % self.field.q

    def lift(self, c):
        return c

    def pi_power(self, k):
        return self.R.shift(1, k)

    def divide_pi(self, a, k):
        return a // (self.field.q**k)

    def random(self, rng):
        return rng.randrange(self.R.size)

    def elements(self):
        return range(self.R.size)

    def format(self, a):
        return format_series(TruncSeries(self.field, self.K, self.R.decode(a)))

    def parse(self, s):
        terms = parse_terms(s, self.field)
        if any(e < 0 for e in terms):
            raise ParseError("negative exponent in a power series")
        return self.R.encode([terms.get(i, 0) for i in range(self.K)])

    def describe(self):
        return {"base": "series", "q": self.field.q, "K": self.K}

    def __eq__(self, o):
        return isinstance(o, SeriesChain) and (o.field, o.K) == (self.field, self.K)

    def __hash__(self):
        return hash(("series", self.field, self.K))


class WittChain(ChainRing):
    """W_N(F_q); elements are coordinate tuples."""

    def __init__(self, field: FqField, N: int):
        self.field, self.K, self.tag = field, N, "witt"
        self.W: WittRing = witt_ring(field, N)
        self.zero = (0,) * N
        self.one = (1,) + (0,) * (N - 1)
        self._inv_cache = {}

    def add(self, a, b):
        return self.W.add_c(a, b)

    def neg(self, a):
        return self.W.neg_c(a)

    def sub(self, a, b):
        return self.W.add_c(a, self.W.neg_c(b))

    def mul(self, a, b):
        return self.W.mul_c(a, b)

    def inv(self, a):
        if a[0] == 0:
            raise NonUnit("non-unit Witt vector")
        if a not in self._inv_cache:
            # Newton iteration b <- b(2 - ab) doubles p-adic precision
            F = self.field
            b = (F.inv(a[0]),) + (0,) * (self.K - 1)
            two = self.W.from_int(2).coords
            for _ in range(self.K.bit_length() + 1):
                b = self.mul(b, self.sub(two, self.mul(a, b)))
            if self.mul(a, b) != self.one:
                raise AssertionError("Newton inverse failed")
            self._inv_cache[a] = b
        return self._inv_cache[a]

    def val(self, a):
        for i, c in enumerate(a):
            if c:
                return i
        return self.K

    def residue(self, a):
        return a[0]

    def lift(self, c):
        return (c,) + (0,) * (self.K - 1)

    def pi_power(self, k):
        return self.W.from_int(self.field.p**k).coords

    def divide_pi(self, a, k):
        # (0,..,0,a_k,..) = V^k(a_k,..) = p^k F^{-k}(a_k,..)
        F = self.field
        shifted = a[k:] + (0,) * k
        e = F.q // F.p if F.deg > 1 else 1
        out = shifted
        for _ in range(k):
            out = tuple(F.pow(c, e) for c in out)
        return out

    def random(self, rng):
        return tuple(rng.randrange(self.field.q) for _ in range(self.K))

    def elements(self):
        return [v.coords for v in self.W.elements()]

    def format(self, a):
        return format_witt(WittVec(self.W, a))

    def parse(self, s):
        return parse_witt(s, self.W).coords

    def describe(self):
        return {"base": "witt", "p": self.field.p, "q": self.field.q, "N": self.K}

    def __eq__(self, o):
        return isinstance(o, WittChain) and (o.field, o.K) == (self.field, self.K)

    def __hash__(self):
        return hash(("witt", self.field, self.K))


# matrices over a chain ring --------------------------------------------------

def mat_identity(A: ChainRing, n: int):
    return [[A.one if i == j else A.zero for j in range(n)] for i in range(n)]


def mat_mul(A: ChainRing, X, Y):
    if not X:
        return []
    cols = len(Y[0]) if Y else 0
    out = []
    for row in X:
        r = []
        for j in range(cols):
            acc = A.zero
            for k, x in enumerate(row):
                y = Y[k][j]
                if x != A.zero and y != A.zero:
                    acc = A.add(acc, A.mul(x, y))
            r.append(acc)
        out.append(r)
    return out


def mat_scale(A: ChainRing, c, X):
    return [[A.mul(c, x) for x in row] for row in X]


def mat_equal(A: ChainRing, X, Y) -> bool:
    return [list(r) for r in X] == [list(r) for r in Y]


def mat_residue(A: ChainRing, X):
    return tuple(tuple(A.residue(x) for x in row) for row in X)


def smith(A: ChainRing, M, track: bool = False):
    """Smith normal form over a chain ring by valuation pivoting.

    Returns (vals, P, Q) with P M Q = diag(pi^vals) (padded with zeros); vals
    lists the pivot valuations in elimination order, K meaning the pivot
    vanished.  P and Q are only computed when ``track`` is set.
    """
    rows = len(M)
    cols = len(M[0]) if rows else 0
    X = [list(r) for r in M]
    P = mat_identity(A, rows) if track else None
    Q = mat_identity(A, cols) if track else None
    vals = []
    for t in range(min(rows, cols)):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                v = A.val(X[i][j])
                if best is None or v < best[0]:
                    best = (v, i, j)
                    if v == 0:
                        break
            if best and best[0] == 0:
                break
        v, i, j = best
        if v >= A.K:
            vals.extend([A.K] * (min(rows, cols) - t))
            break
        X[t], X[i] = X[i], X[t]
        if track:
            P[t], P[i] = P[i], P[t]
        for row in X:
            row[t], row[j] = row[j], row[t]
        if track:
            for row in Q:
                row[t], row[j] = row[j], row[t]
        # normalise the pivot to pi^v
        unit = A.divide_pi(X[t][t], v)
        uinv = A.inv(unit)
        X[t] = [A.mul(uinv, x) for x in X[t]]
        if track:
            P[t] = [A.mul(uinv, x) for x in P[t]]
        for r in range(rows):
            if r != t and A.val(X[r][t]) < A.K:
                f = A.divide_pi(X[r][t], v)
                X[r] = [A.sub(x, A.mul(f, y)) for x, y in zip(X[r], X[t])]
                if track:
                    P[r] = [A.sub(x, A.mul(f, y)) for x, y in zip(P[r], P[t])]
        for c in range(cols):
            if c != t and A.val(X[t][c]) < A.K:
                f = A.divide_pi(X[t][c], v)
                for r in range(rows):
                    X[r][c] = A.sub(X[r][c], A.mul(f, X[r][t]))
                if track:
                    for r in range(cols):
                        Q[r][c] = A.sub(Q[r][c], A.mul(f, Q[r][t]))
        vals.append(v)
    return vals, P, Q


def mat_inverse(A: ChainRing, M):
    """Inverse of a square matrix whose residue is invertible (Gauss-Jordan with unit pivots)."""
    n = len(M)
    X = [list(M[i]) + mat_identity(A, n)[i] for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A.is_unit(X[r][c])), None)
        if piv is None:
            raise NonUnit("matrix is not invertible over the chain ring")
        X[c], X[piv] = X[piv], X[c]
        inv = A.inv(X[c][c])
        X[c] = [A.mul(inv, x) for x in X[c]]
        for r in range(n):
            if r != c and X[r][c] != A.zero:
                f = X[r][c]
                X[r] = [A.sub(x, A.mul(f, y)) for x, y in zip(X[r], X[c])]
    return [row[n:] for row in X]


def random_invertible(A: ChainRing, n: int, rng: random.Random):
    while True:
        M = [[A.random(rng) for _ in range(n)] for _ in range(n)]
        try:
            mat_inverse(A, M)
            return M
        except NonUnit:
            continue


def make_chain(tag: str, q: int, K: int = 1) -> ChainRing:
    from .fields import gf
    F = gf(q)
    if tag == "field":
        return FieldChain(F)
    if tag == "series":
        return SeriesChain(F, K)
    if tag == "witt":
        return WittChain(F, K)
    raise ParseError(f"unknown base {tag!r}")


__all__ = [
    "ChainRing", "FieldChain", "SeriesChain", "WittChain", "make_chain", "smith",
    "mat_mul", "mat_inverse", "mat_identity", "mat_residue", "random_invertible",
    "PrecisionExhausted",
]


# finitely presented modules A^n / im(S) ------------------------------------------

def columns(M, nrows: int) -> list:
    if not M or not M[0]:
        return []
    return [[M[i][j] for i in range(nrows)] for j in range(len(M[0]))]


def hcat(A: ChainRing, nrows: int, *mats):
    """Concatenate matrices with ``nrows`` rows side by side (empty ones allowed)."""
    out = [[] for _ in range(nrows)]
    for M in mats:
        if M and M[0]:
            for i in range(nrows):
                out[i].extend(M[i])
    return out


def kernel_gens(A: ChainRing, M, ncols: int) -> list:
    """Generators of {x in A^ncols : M x = 0}."""
    if not M or ncols == 0:
        return [[A.one if i == j else A.zero for i in range(ncols)] for j in range(ncols)]
    vals, P, Q = smith(A, M, track=True)
    gens = []
    for j in range(ncols):
        v = vals[j] if j < len(vals) else A.K
        if v == 0:
            continue
        scale = A.one if v >= A.K else A.pi_power(A.K - v)
        gens.append([A.mul(Q[i][j], scale) for i in range(ncols)])
    return gens


def in_span(A: ChainRing, S, x, nrows: int) -> bool:
    """Is the column vector x in the column span of S?"""
    if not S or not S[0]:
        return all(A.val(c) >= A.K for c in x)
    vals, P, _ = smith(A, S, track=True)
    Px = [sum_row(A, P[i], x) for i in range(nrows)]
    for i in range(nrows):
        need = vals[i] if i < len(vals) else A.K
        if A.val(Px[i]) < need:
            return False
    return True


def sum_row(A: ChainRing, row, x):
    acc = A.zero
    for a, b in zip(row, x):
        acc = A.add(acc, A.mul(a, b))
    return acc


def module_structure(A: ChainRing, n: int, S) -> dict:
    """A^n / im S as a direct sum of A^free and A/pi^e (the torsion exponents)."""
    if n == 0:
        return {"free": 0, "torsion": []}
    vals = smith(A, S)[0] if S and S[0] else []
    torsion = sorted(v for v in vals if 0 < v < A.K)
    killed = sum(1 for v in vals if v < A.K)
    return {"free": n - killed, "torsion": torsion}


def structure_length(A: ChainRing, st: dict) -> int:
    return st["free"] * A.K + sum(st["torsion"])


def free_over(A: ChainRing, st: dict, k: int) -> bool:
    """Is a module with structure ``st`` free over A/pi^k?"""
    if k >= A.K:
        return not st["torsion"]
    return st["free"] == 0 and all(e == k for e in st["torsion"])


def map_injective(A: ChainRing, F, n_src: int, S_src, n_tgt: int, S_tgt) -> bool:
    """Injectivity of the map A^n_src/S_src -> A^n_tgt/S_tgt given by the matrix F."""
    if n_src == 0:
        return True
    if n_tgt == 0:
        return all(in_span(A, S_src, e, n_src) for e in mat_identity(A, n_src))
    big = hcat(A, n_tgt, F, S_tgt)
    ncols = n_src + (len(S_tgt[0]) if S_tgt and S_tgt[0] else 0)
    for g in kernel_gens(A, big, ncols):
        if not in_span(A, S_src, g[:n_src], n_src):
            return False
    return True
