"""Truncated display groups E_N(mu) and their two maps tau, sigma into GL_h(R_N).

An element of E_N is an h x h matrix whose (i, j) entry lies in
z^{m_ij} F_q[[z]] modulo z^{m_ij + N}, m_ij = max(0, mu_j - mu_i).  We store
the N coefficients of entry / z^{m_ij} as a SeriesRing code, so an element is
a flat tuple of h*h ints.  The group law is ordinary matrix multiplication.

tau(e) = e mod z^N and sigma(e) = phi(mu(z) e mu(z)^{-1}) mod z^N where phi
raises coefficients to the q-th power.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import product

from .errors import BudgetExceeded, FieldMismatch, NotDominant, NotInvertible
from .fields import FqField, gf
from .linalg import det_nonzero, general_linear, gl_order
from .series import SeriesRing, TruncSeries

DEFAULT_BUDGET = 10**7


def check_dominant(mu) -> tuple[int, ...]:
    mu = tuple(int(x) for x in mu)
    if any(a < b for a, b in zip(mu, mu[1:])):
        raise NotDominant(f"{mu} is not weakly decreasing")
    return mu


def blocks(mu) -> list[list[int]]:
    """Index blocks of equal mu entries, in order."""
    out: list[list[int]] = []
    for i, m in enumerate(mu):
        if out and mu[out[-1][0]] == m:
            out[-1].append(i)
        else:
            out.append([i])
    return out


@dataclass(frozen=True)
class LoopMat:
    """An h x h matrix over R_N = F_q[z]/(z^N), entries as SeriesRing codes (row-major)."""

    field: FqField
    N: int
    h: int
    entries: tuple[int, ...]

    def entry(self, i: int, j: int) -> TruncSeries:
        R = ring(self.field, self.N)
        return TruncSeries(self.field, self.N, R.decode(self.entries[i * self.h + j]))

    def rows(self) -> list[list[TruncSeries]]:
        return [[self.entry(i, j) for j in range(self.h)] for i in range(self.h)]

    @classmethod
    def from_series(cls, field, N, rows) -> "LoopMat":
        R = ring(field, N)
        h = len(rows)
        return cls(field, N, h, tuple(R.encode(s.coeffs) for row in rows for s in row))


@lru_cache(maxsize=None)
def ring(field: FqField, N: int) -> SeriesRing:
    return SeriesRing(field, N)


def mat_mul_codes(R: SeriesRing, A, B, h: int) -> tuple:
    out = []
    for i in range(h):
        Ai = A[i * h:(i + 1) * h]
        for j in range(h):
            acc = 0
            for k in range(h):
                a, b = Ai[k], B[k * h + j]
                if a and b:
                    acc = R.add(acc, R.mul(a, b))
            out.append(acc)
    return tuple(out)


def mat_inv_codes(R: SeriesRing, A, h: int) -> tuple:
    """Inverse in GL_h(R) by Gauss-Jordan with unit pivots."""
    X = [list(A[i * h:(i + 1) * h]) + [1 if i == j else 0 for j in range(h)] for i in range(h)]
    for c in range(h):
        piv = next((r for r in range(c, h) if R.is_unit(X[r][c])), None)
        if piv is None:
            raise NotInvertible("matrix is not invertible modulo z")
        X[c], X[piv] = X[piv], X[c]
        inv = R.inv(X[c][c])
        X[c] = [R.mul(inv, x) for x in X[c]]
        for r in range(h):
            if r != c and X[r][c]:
                f = R.neg(X[r][c])
                X[r] = [R.add(x, R.mul(f, y)) for x, y in zip(X[r], X[c])]
    return tuple(x for row in X for x in row[h:])


class DisplayGroup:
    """E_N(mu) over ``field`` with Frobenius x -> x^frob_q."""

    def __init__(self, field: FqField, h: int, mu, N: int, frob_q: int | None = None):
        mu = check_dominant(mu)
        if len(mu) != h:
            raise NotDominant(f"mu has {len(mu)} entries, expected {h}")
        if N < 1:
            raise ValueError("N must be positive")
        self.field, self.h, self.mu, self.N = field, h, mu, N
        self.frob_q = field.q if frob_q is None else frob_q
        self.R = ring(field, N)
        self.m = tuple(max(0, mu[j] - mu[i]) for i in range(h) for j in range(h))
        self.sig_shift = tuple(max(0, mu[i] - mu[j]) for i in range(h) for j in range(h))
        self.M = max(self.m)
        self.Rext = ring(field, N + self.M)
        self.blocks = blocks(mu)
        self.identity = tuple(1 if i == j else 0 for i in range(h) for j in range(h))

    def key(self):
        return (self.field, self.h, self.mu, self.N, self.frob_q)

    def __eq__(self, other):
        return isinstance(other, DisplayGroup) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    # group law ---------------------------------------------------------------
    def mul(self, a: tuple, b: tuple) -> tuple:
        R, h, m = self.R, self.h, self.m
        out = []
        for i in range(h):
            for j in range(h):
                acc = 0
                mij = m[i * h + j]
                for k in range(h):
                    x, y = a[i * h + k], b[k * h + j]
                    if x and y:
                        s = m[i * h + k] + m[k * h + j] - mij
                        acc = R.add(acc, R.shift(R.mul(x, y), s))
                out.append(acc)
        return tuple(out)

    def is_invertible(self, a: tuple) -> bool:
        F, h, q = self.field, self.h, self.field.q
        for blk in self.blocks:
            sub = tuple(tuple(a[i * h + j] % q for j in blk) for i in blk)
            if not det_nonzero(F, sub):
                return False
        return True

    def inv(self, a: tuple) -> tuple:
        if not self.is_invertible(a):
            raise NotInvertible("a diagonal block is singular modulo z")
        Rx, h, m = self.Rext, self.h, self.m
        actual = tuple(Rx.shift(a[k], m[k]) for k in range(h * h))
        inv = mat_inv_codes(Rx, actual, h)
        q, N = self.field.q, self.N
        out = []
        for k, c in enumerate(inv):
            if Rx.valuation(c) < m[k]:
                raise AssertionError("inverse left the display group")
            out.append((c // q ** m[k]) % q**N)
        return tuple(out)

    # the two maps --------------------------------------------------------------
    def tau(self, a: tuple) -> tuple:
        R = self.R
        return tuple(R.shift(x, s) for x, s in zip(a, self.m))

    def sigma(self, a: tuple) -> tuple:
        R, fq = self.R, self.frob_q
        return tuple(R.frob(R.shift(x, s), fq) for x, s in zip(a, self.sig_shift))

    # enumeration ------------------------------------------------------------------
    def order(self) -> int:
        q, h = self.field.q, self.h
        e1 = 1
        for blk in self.blocks:
            e1 *= gl_order(q, len(blk))
        e1 *= q ** (h * h - sum(len(b) ** 2 for b in self.blocks))
        return e1 * q ** ((self.N - 1) * h * h)

    def elements(self, budget: int = DEFAULT_BUDGET):
        """Every element, in a fixed order."""
        if self.order() > budget:
            raise BudgetExceeded(f"|E_N| = {self.order()} exceeds budget {budget}")
        F, h, q, N = self.field, self.h, self.field.q, self.N
        in_block = {(i, j) for blk in self.blocks for i in blk for j in blk}
        block_choices = [general_linear(F, len(blk)) for blk in self.blocks]
        free_pos = [k for k in range(h * h) if (k // h, k % h) not in in_block]
        hi = q ** (N - 1)
        for levis in product(*block_choices):
            const = [0] * (h * h)
            for blk, mat in zip(self.blocks, levis):
                for a, i in enumerate(blk):
                    for b, j in enumerate(blk):
                        const[i * h + j] = mat[a][b]
            for free in product(range(q), repeat=len(free_pos)):
                base = const[:]
                for k, v in zip(free_pos, free):
                    base[k] = v
                for highs in product(range(hi), repeat=h * h):
                    yield tuple(c + q * x for c, x in zip(base, highs))

    def truncate(self, a: tuple, n: int) -> tuple:
        return tuple(x % self.field.q**n for x in a)

    # conversions --------------------------------------------------------------------
    def wrap(self, a: tuple) -> "DisplayGroupElem":
        return DisplayGroupElem(self, a)


@dataclass(frozen=True)
class DisplayGroupElem:
    group: DisplayGroup
    data: tuple

    @property
    def N(self):
        return self.group.N

    def stored(self, i: int, j: int) -> TruncSeries:
        G = self.group
        return TruncSeries(G.field, G.N, G.R.decode(self.data[i * G.h + j]))

    def entry_exponent(self, i: int, j: int) -> int:
        return self.group.m[i * self.group.h + j]

    def __mul__(self, other):
        return dg_mul(self, other)


def make_elem(group: DisplayGroup, stored_rows) -> DisplayGroupElem:
    """Build from rows of stored coefficient lists (entry / z^{m_ij})."""
    R, h = group.R, group.h
    data = tuple(R.encode((list(c) + [0] * group.N)[: group.N]) for row in stored_rows for c in row)
    if len(data) != h * h:
        raise ValueError("wrong shape")
    e = DisplayGroupElem(group, data)
    if not group.is_invertible(data):
        raise NotInvertible("a diagonal block is singular modulo z")
    return e


def _same(a: DisplayGroupElem, b: DisplayGroupElem) -> DisplayGroup:
    if a.group != b.group:
        raise FieldMismatch("elements of different display groups")
    return a.group


def dg_mul(a: DisplayGroupElem, b: DisplayGroupElem) -> DisplayGroupElem:
    G = _same(a, b)
    return DisplayGroupElem(G, G.mul(a.data, b.data))


def dg_inv(a: DisplayGroupElem) -> DisplayGroupElem:
    return DisplayGroupElem(a.group, a.group.inv(a.data))


def dg_tau(a: DisplayGroupElem) -> LoopMat:
    G = a.group
    return LoopMat(G.field, G.N, G.h, G.tau(a.data))


def dg_sigma(a: DisplayGroupElem) -> LoopMat:
    G = a.group
    return LoopMat(G.field, G.N, G.h, G.sigma(a.data))


def dg_membership(g: LoopMat, mu) -> bool:
    """Does g lie in the image of tau, i.e. val(g_ij) >= m_ij and g invertible?"""
    mu = check_dominant(mu)
    R, h = ring(g.field, g.N), g.h
    for i in range(h):
        for j in range(h):
            m = max(0, mu[j] - mu[i])
            if R.valuation(g.entries[i * h + j]) < min(m, g.N):
                return False
    const = tuple(tuple(g.entries[i * h + j] % g.field.q for j in range(h)) for i in range(h))
    return det_nonzero(g.field, const)


def dg_enumerate(q: int, h: int, mu, N: int, budget: int = DEFAULT_BUDGET):
    G = DisplayGroup(gf(q), h, mu, N)
    return (DisplayGroupElem(G, d) for d in G.elements(budget))


def dg_count(q: int, h: int, mu, N: int) -> int:
    """|E_N(mu)(F_q)| from the closed formula."""
    return DisplayGroup(gf(q), h, mu, N).order()


def dg_count_enumerated(q: int, h: int, mu, N: int, budget: int = DEFAULT_BUDGET) -> int:
    return sum(1 for _ in DisplayGroup(gf(q), h, mu, N).elements(budget))


def dg_kernel_count(q: int, h: int, mu, N: int, budget: int = DEFAULT_BUDGET) -> int:
    """Number of elements of E_{N+1} that truncate to the identity of E_N, by enumeration."""
    G = DisplayGroup(gf(q), h, mu, N + 1)
    ident = G.truncate(G.identity, N)
    return sum(1 for d in G.elements(budget) if G.truncate(d, N) == ident)


def dg_factorize_E1(e: DisplayGroupElem):
    """Write e in E_1 as c * u_minus * u_plus with c block diagonal and u_-, u_+ unipotent."""
    G = e.group
    if G.N != 1:
        raise ValueError("factorisation is for E_1")
    h = G.h
    where = {i: b for b, blk in enumerate(G.blocks) for i in blk}
    c = tuple(x if where[k // h] == where[k % h] else 0 for k, x in enumerate(e.data))
    v = G.mul(G.inv(c), e.data)
    lower = tuple(x if where[k // h] > where[k % h] else (1 if k // h == k % h else 0)
                  for k, x in enumerate(v))
    upper = tuple(x if where[k // h] < where[k % h] else (1 if k // h == k % h else 0)
                  for k, x in enumerate(v))
    return DisplayGroupElem(G, c), DisplayGroupElem(G, lower), DisplayGroupElem(G, upper)


def group_counts(q: int, h: int, mu, N: int, budget: int = DEFAULT_BUDGET) -> dict:
    """Enumerated and predicted orders used by the count-groups command."""
    G = DisplayGroup(gf(q), h, mu, N)
    G1 = DisplayGroup(gf(q), h, mu, 1)
    return {
        "count": sum(1 for _ in G.elements(budget)),
        "e1_count": sum(1 for _ in G1.elements(budget)),
        "kernel_count": dg_kernel_count(q, h, mu, max(N - 1, 1), budget),
        "predicted_count": G.order(),
    }
