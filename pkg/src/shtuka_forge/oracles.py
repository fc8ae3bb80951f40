"""Brute-force oracles.

Each oracle recomputes a quantity by a route that shares as little code as
possible with the main implementation: Witt arithmetic through ghost
components over Z[x]/(f), display groups as explicit matrices e with
e_ij in z^m_ij R, class counts by Burnside's lemma with fixed points found by
linear algebra, F-zips as sets of vectors, displays over F_p as matrices over
Z/p^N, Hecke types through determinantal divisors.  Only the finite-field
tables and F_p-linear algebra are shared.
"""

from __future__ import annotations

from itertools import combinations, permutations, product

from .fields import FqField, gf
from .linalg import nullspace, rref


# Witt vectors through ghost components ---------------------------------------------

class _ZPoly:
    """Z[x]/(f) for a monic integer polynomial f (coefficients low to high)."""

    def __init__(self, modulus):
        self.f = [int(c) for c in modulus]
        self.d = len(self.f) - 1

    def mul(self, a, b):
        prod = [0] * (2 * self.d - 1 if self.d else 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        for top in range(len(prod) - 1, self.d - 1, -1):
            c = prod[top]
            if c:
                for j in range(self.d):
                    prod[top - self.d + j] -= c * self.f[j]
                prod[top] = 0
        return prod[:self.d] if self.d else prod[:1]

    def pow(self, a, n):
        out = [1] + [0] * (max(self.d, 1) - 1)
        while n:
            if n & 1:
                out = self.mul(out, a)
            a = self.mul(a, a)
            n >>= 1
        return out


def _lift(base_p: int, dim: int, code: int) -> list:
    out = []
    for _ in range(dim):
        code, r = divmod(code, base_p)
        out.append(r)
    return out


def _ghost(Z: _ZPoly, p: int, coords) -> list:
    out = []
    for n in range(len(coords)):
        acc = [0] * len(coords[0])
        for i in range(n + 1):
            term = Z.pow(coords[i], p ** (n - i))
            acc = [a + p**i * t for a, t in zip(acc, term)]
        out.append(acc)
    return out


def _unghost(Z: _ZPoly, p: int, ghosts) -> list:
    coords = []
    for n, w in enumerate(ghosts):
        acc = list(w)
        for i, c in enumerate(coords):
            term = Z.pow(c, p ** (n - i))
            acc = [a - p**i * t for a, t in zip(acc, term)]
        if any(a % p**n for a in acc):
            raise ArithmeticError("ghost components not integral")
        coords.append([a // p**n for a in acc])
    return coords


def ghost_witt(p: int, modulus, op: str, a, b=None, scale: int | None = None) -> tuple:
    """Witt operation on coordinate codes over F_p[x]/(modulus), computed by ghost components.

    ``op`` is one of add, mul, neg, scale (multiplication by the integer ``scale``).
    """
    Z = _ZPoly(modulus)
    dim = max(Z.d, 1)
    A = [_lift(p, dim, c) for c in a]
    wa = _ghost(Z, p, A)
    if op == "neg":
        w = [[-x for x in g] for g in wa]
    elif op == "scale":
        w = [[scale * x for x in g] for g in wa]
    else:
        wb = _ghost(Z, p, [_lift(p, dim, c) for c in b])
        if op == "add":
            w = [[x + y for x, y in zip(g, h)] for g, h in zip(wa, wb)]
        elif op == "mul":
            w = [Z.mul(g, h) for g, h in zip(wa, wb)]
        else:
            raise ValueError(op)
    out = []
    for c in _unghost(Z, p, w):
        code = 0
        for x in reversed(c):
            code = code * p + x % p
        out.append(code)
    return tuple(out)


def teichmuller_zmod(p: int, N: int, a: int) -> int:
    """The Teichmueller lift of a in Z/p^N as the limit of a, a^p, a^(p^2), ..."""
    mod = p**N
    x = a % mod
    while True:
        y = pow(x, p, mod)
        if y == x:
            return x
        x = y


def zmod_of_witt(p: int, N: int, coords) -> int:
    return sum(p**i * teichmuller_zmod(p, N, c) for i, c in enumerate(coords)) % p**N


# display groups as explicit matrices --------------------------------------------------

class _Trunc:
    """F_q[z]/(z^N) on coefficient tuples."""

    def __init__(self, F: FqField, N: int):
        self.F, self.N = F, N

    def add(self, a, b):
        return tuple(self.F.add(x, y) for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple(self.F.sub(x, y) for x, y in zip(a, b))

    def mul(self, a, b):
        out = [0] * self.N
        for i, x in enumerate(a):
            if x:
                for j in range(self.N - i):
                    if b[j]:
                        out[i + j] = self.F.add(out[i + j], self.F.mul(x, b[j]))
        return tuple(out)

    def shift(self, a, k):
        return (0,) * k + tuple(a[:self.N - k]) if k < self.N else (0,) * self.N

    def frob(self, a, r):
        return tuple(self.F.pow(x, r) for x in a)

    def inv(self, a):
        # Newton-free: solve a * b = 1 coefficient by coefficient
        F = self.F
        b = [F.inv(a[0])] + [0] * (self.N - 1)
        for n in range(1, self.N):
            acc = 0
            for i in range(1, n + 1):
                acc = F.add(acc, F.mul(a[i], b[n - i]))
            b[n] = F.neg(F.mul(b[0], acc))
        return tuple(b)

    def zero(self):
        return (0,) * self.N

    def one(self):
        return (1,) + (0,) * (self.N - 1)


def _mat_mul(T: _Trunc, X, Y):
    h = len(X)
    out = []
    for i in range(h):
        row = []
        for j in range(h):
            acc = T.zero()
            for k in range(h):
                acc = T.add(acc, T.mul(X[i][k], Y[k][j]))
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def _mat_inv(T: _Trunc, X):
    h = len(X)
    M = [list(X[i]) + [T.one() if i == j else T.zero() for j in range(h)] for i in range(h)]
    for c in range(h):
        piv = next(r for r in range(c, h) if M[r][c][0])
        M[c], M[piv] = M[piv], M[c]
        inv = T.inv(M[c][c])
        M[c] = [T.mul(inv, x) for x in M[c]]
        for r in range(h):
            if r != c and any(M[r][c]):
                f = M[r][c]
                M[r] = [T.sub(x, T.mul(f, y)) for x, y in zip(M[r], M[c])]
    return tuple(tuple(row[h:]) for row in M)


def _residue_invertible(F: FqField, rows) -> bool:
    return len(rref(F, [tuple(r) for r in rows])[0]) == len(rows)


def display_group_pairs(q: int, h: int, mu, N: int, field: FqField | None = None,
                        frob_q: int | None = None):
    """Yield (tau(e), sigma(e)) for every e in E_N, built from the matrix picture.

    e_ij = z^m_ij x_ij with m_ij = max(0, mu_j - mu_i); tau(e) = e mod z^N and
    sigma(e) = Frobenius of (mu e mu^-1) mod z^N, whose (i, j) entry is
    z^max(0, mu_i - mu_j) x_ij.
    """
    F = field or gf(q)
    r = frob_q or q
    T = _Trunc(F, N)
    mu = tuple(mu)
    m = [[max(0, mu[j] - mu[i]) for j in range(h)] for i in range(h)]
    s = [[max(0, mu[i] - mu[j]) for j in range(h)] for i in range(h)]
    coeffs = list(product(range(F.q), repeat=N))
    for xs in product(coeffs, repeat=h * h):
        res = [[xs[i * h + j][0] if m[i][j] == 0 else 0 for j in range(h)] for i in range(h)]
        if not _residue_invertible(F, res):
            continue
        tau = tuple(tuple(T.shift(xs[i * h + j], m[i][j]) for j in range(h)) for i in range(h))
        sig = tuple(tuple(T.frob(T.shift(xs[i * h + j], s[i][j]), r) for j in range(h))
                    for i in range(h))
        yield tau, sig


def group_order_oracle(q: int, h: int, mu, N: int) -> int:
    return sum(1 for _ in display_group_pairs(q, h, mu, N))


def kernel_order_oracle(q: int, h: int, mu, N: int = 2) -> int:
    """Elements of E_N acting trivially modulo z (the kernel of E_N -> E_1)."""
    count = 0
    for tau, sig in display_group_pairs(q, h, mu, N):
        if all(tau[i][j][0] == (1 if i == j else 0) and sig[i][j][0] == (1 if i == j else 0)
               for i in range(h) for j in range(h)):
            count += 1
    return count


# shtuka classes --------------------------------------------------------------------

def _gl_points(F: FqField, h: int, N: int):
    T = _Trunc(F, N)
    coeffs = list(product(range(F.q), repeat=N))
    for xs in product(coeffs, repeat=h * h):
        if _residue_invertible(F, [[xs[i * h + j][0] for j in range(h)] for i in range(h)]):
            yield tuple(tuple(xs[i * h:(i + 1) * h]) for i in range(h))


def _point_key(g) -> tuple:
    return tuple(c for row in g for x in row for c in x)


def shtuka_orbits_oracle(q: int, h: int, mu, N: int, m: int = 1, literal: bool = False):
    """Orbit partition by explicit sets: list of (sorted members) sorted by lex-min member."""
    F = _tower(q, m)
    T = _Trunc(F, N)
    pairs = []
    for tau, sig in display_group_pairs(q, h, mu, N, F, q):
        pairs.append((tau, sig if literal else _mat_inv(T, sig)))
    pts = sorted(_gl_points(F, h, N), key=_point_key)
    seen, orbits = set(), []
    for g in pts:
        if g in seen:
            continue
        members, frontier = {g}, [g]
        while frontier:
            nxt = []
            for x in frontier:
                for a, b in pairs:
                    y = _mat_mul(T, _mat_mul(T, a, x), b)
                    if y not in members:
                        members.add(y)
                        nxt.append(y)
            frontier = nxt if literal else []
        seen |= members
        orbits.append(sorted(members, key=_point_key))
    return orbits


def _tower(q: int, m: int) -> FqField:
    base = gf(q)
    return FqField(base.p, base.deg * m) if m > 1 else base


def shtuka_count_burnside(q: int, h: int, mu, N: int, m: int = 1) -> int:
    """Number of classes = average number of g with tau(e) g = g sigma(e)."""
    F = _tower(q, m)
    T = _Trunc(F, N)
    Fp = gf(F.p)
    deg = F.deg
    n = h * h * N * deg
    basis = []
    for pos in range(h * h):
        for k in range(N):
            for b in range(deg):
                g = [[T.zero() for _ in range(h)] for _ in range(h)]
                coeff = [0] * N
                coeff[k] = F.p**b
                g[pos // h][pos % h] = tuple(coeff)
                basis.append(tuple(tuple(r) for r in g))

    def flat(g):
        out = []
        for row in g:
            for x in row:
                for c in x:
                    out.extend(F._digits(c))
        return out

    res_cache: dict = {}
    total = 0
    count = 0
    for tau, sig in display_group_pairs(q, h, mu, N, F, q):
        count += 1
        cols = []
        for g in basis:
            left = _mat_mul(T, tau, g)
            right = _mat_mul(T, g, sig)
            cols.append(flat(tuple(tuple(T.sub(a, b) for a, b in zip(ra, rb))
                                   for ra, rb in zip(left, right))))
        D = tuple(tuple(cols[c][r] for c in range(n)) for r in range(n))
        X = nullspace(Fp, D)
        # residue map: coordinates (pos, k=0, b)
        res_idx = [pos * N * deg + b for pos in range(h * h) for b in range(deg)]
        images = [tuple(v[i] for i in res_idx) for v in X]
        R, _ = rref(Fp, images) if images else ((), ())
        kernel_dim = len(X) - len(R)
        key = tuple(R)
        if key not in res_cache:
            res_cache[key] = _count_invertible_in_span(F, Fp, h, list(R))
        total += Fp.p**kernel_dim * res_cache[key]
    assert total % count == 0
    return total // count


def _count_invertible_in_span(F: FqField, Fp: FqField, h: int, rows) -> int:
    deg = F.deg
    c = 0
    for combo in product(range(Fp.q), repeat=len(rows)):
        v = [0] * (h * h * deg)
        for a, row in zip(combo, rows):
            if a:
                v = [Fp.add(x, Fp.mul(a, y)) for x, y in zip(v, row)]
        M = [[F._undigits(v[(i * h + j) * deg:(i * h + j + 1) * deg]) for j in range(h)]
             for i in range(h)]
        if _residue_invertible(F, M):
            c += 1
    return c


def shtuka_fibers_oracle(q: int, h: int, mu, N: int) -> dict:
    """Classes at N and N+1, and how many level-(N+1) classes lie over each level-N class."""
    low = shtuka_orbits_oracle(q, h, mu, N)
    high = shtuka_orbits_oracle(q, h, mu, N + 1)
    where = {}
    for c, orb in enumerate(low):
        for g in orb:
            where[g] = c
    fib = [0] * len(low)
    for orb in high:
        g = orb[0]
        fib[where[tuple(tuple(x[:N] for x in row) for row in g)]] += 1
    return {"classes_low": len(low), "classes_high": len(high),
            "surjective": all(f > 0 for f in fib), "injective": all(f <= 1 for f in fib),
            "fiber_sizes": fib}


# F-zips as sets ----------------------------------------------------------------------

def _vectors(F: FqField, h: int):
    return list(product(range(F.q), repeat=h))


def _vadd(F, a, b):
    return tuple(F.add(x, y) for x, y in zip(a, b))


def _vscale(F, c, a):
    return tuple(F.mul(c, x) for x in a)


def _span(F: FqField, vs) -> frozenset:
    h = len(vs[0]) if vs else 0
    out = {tuple([0] * h)} if vs else set()
    for v in vs:
        out |= {_vadd(F, w, _vscale(F, c, v)) for w in out for c in range(F.q)}
    return frozenset(out)


def _subspaces(F: FqField, h: int, d: int) -> list:
    zero = tuple([0] * h)
    if d == 0:
        return [frozenset([zero])]
    nz = [v for v in _vectors(F, h) if v != zero]
    out = set()
    for vs in combinations(nz, d):
        S = _span(F, list(vs))
        if len(S) == F.q**d:
            out.add(S)
    return sorted(out, key=lambda S: sorted(S))


def _coset(F, v, S) -> frozenset:
    return frozenset(_vadd(F, v, s) for s in S)


def _semilinear_graphs(F: FqField, r: int, src_basis, src_space, image_choices, to_key):
    graphs = set()
    k = len(src_basis)
    for ys in product(image_choices, repeat=k):
        graph = {}
        ok = True
        for lam in product(range(F.q), repeat=k):
            x = tuple([0] * len(src_basis[0])) if k else ()
            y = None
            for l, b, yy in zip(lam, src_basis, ys):
                x = _vadd(F, x, _vscale(F, l, b))
                t = _vscale(F, F.pow(l, r), yy)
                y = t if y is None else _vadd(F, y, t)
            kx, ky = src_space(x), to_key(y)
            if kx in graph and graph[kx] != ky:
                ok = False
                break
            graph[kx] = ky
        if ok and len(set(graph.values())) == F.q**k:
            graphs.add(frozenset(graph.items()))
    return graphs


def zip_set_oracle(q: int, h: int, d: int, r: int | None = None) -> dict:
    """Orbits of GL_h(F_q) on all (C1, D0, alpha0, alpha1), with everything stored as sets."""
    F = gf(q)
    r = r or q
    V = _vectors(F, h)
    zips = set()
    for C in _subspaces(F, h, d):
        # basis of V / C: complete a basis of C
        cbasis = _basis_of(F, C)
        qbasis = _complete(F, h, cbasis)
        for D in _subspaces(F, h, h - d):
            dvecs = sorted(D)
            a0 = _semilinear_graphs(F, r, qbasis, lambda x: _coset(F, x, C), dvecs, lambda y: y)
            a1 = _semilinear_graphs(F, r, cbasis, lambda x: x, V, lambda y: _coset(F, y, D))
            for g0 in a0:
                for g1 in a1:
                    zips.add((C, D, g0, g1))
    G = [g for g in product(V, repeat=h) if len(_span(F, list(g))) == F.q**h]

    def apply(g, v):  # g given by its columns
        out = tuple([0] * h)
        for c, col in zip(v, g):
            out = _vadd(F, out, _vscale(F, c, col))
        return out

    def move(g, Z):
        C, D, g0, g1 = Z
        mv = lambda S: frozenset(apply(g, v) for v in S)
        return (mv(C), mv(D), frozenset((mv(k), apply(g, y)) for k, y in g0),
                frozenset((apply(g, x), mv(k)) for x, k in g1))

    remaining, sizes = set(zips), []
    while remaining:
        Z = next(iter(remaining))
        orbit = {move(g, Z) for g in G}
        remaining -= orbit
        sizes.append(len(orbit))
    return {"zips": len(zips), "class_count": len(sizes), "orbit_sizes": sorted(sizes)}


def _basis_of(F: FqField, S) -> list:
    h = len(next(iter(S)))
    basis, cur = [], frozenset([tuple([0] * h)])
    for v in sorted(S):
        if v not in cur:
            basis.append(v)
            cur = _span(F, basis)
    return basis


def _complete(F: FqField, h: int, basis) -> list:
    """Vectors extending ``basis`` to a basis of F^h (a basis of the quotient)."""
    cur = _span(F, basis) if basis else frozenset([tuple([0] * h)])
    have, out = list(basis), []
    for v in _vectors(F, h):
        if v not in cur:
            have.append(v)
            out.append(v)
            cur = _span(F, have)
    return out


# displays over F_p via Z/p^N ------------------------------------------------------------

def _zmat_mul(X, Y, mod):
    n, k, c = len(X), len(Y), len(Y[0])
    return tuple(tuple(sum(X[i][l] * Y[l][j] for l in range(k)) % mod for j in range(c))
                 for i in range(n))


def _zmat_inv(X, p, mod):
    n = len(X)
    M = [list(X[i]) + [1 if i == j else 0 for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = next(r for r in range(c, n) if M[r][c] % p)
        M[c], M[piv] = M[piv], M[c]
        inv = pow(M[c][c], -1, mod)
        M[c] = [x * inv % mod for x in M[c]]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c]
                M[r] = [(x - f * y) % mod for x, y in zip(M[r], M[c])]
    return tuple(tuple(row[n:]) for row in M)


def _z_invertible(X, p) -> bool:
    F = gf(p)
    return _residue_invertible(F, [[x % p for x in row] for row in X])


def display_autos_zmod(p: int, h: int, d: int, N: int) -> list:
    """(U, T^-1) for every pair automorphism: U = [[a, b], [p c, e]], T = [[a, p b], [c, e]]."""
    mod = p**N
    k = h - d
    out = []
    ring = range(mod)
    for a in product(ring, repeat=d * d):
        A = [a[i * d:(i + 1) * d] for i in range(d)]
        if not _z_invertible(A, p):
            continue
        for e in product(ring, repeat=k * k):
            E = [e[i * k:(i + 1) * k] for i in range(k)]
            if not _z_invertible(E, p):
                continue
            for b in product(ring, repeat=d * k):
                for c in product(ring, repeat=k * d):
                    U = [[0] * h for _ in range(h)]
                    T = [[0] * h for _ in range(h)]
                    for i in range(d):
                        for j in range(d):
                            U[i][j] = T[i][j] = A[i][j]
                        for j in range(k):
                            U[i][d + j] = b[i * k + j] % mod
                            T[i][d + j] = p * b[i * k + j] % mod
                    for i in range(k):
                        for j in range(d):
                            U[d + i][j] = p * c[i * d + j] % mod
                            T[d + i][j] = c[i * d + j] % mod
                        for j in range(k):
                            U[d + i][d + j] = T[d + i][d + j] = E[i][j]
                    U = tuple(tuple(r) for r in U)
                    out.append((U, _zmat_inv(tuple(tuple(r) for r in T), p, mod)))
    return out


def display_orbits_zmod(p: int, h: int, d: int, N: int) -> dict:
    mod = p**N
    autos = display_autos_zmod(p, h, d, N)
    psis = [tuple(tuple(v[i * h:(i + 1) * h]) for i in range(h))
            for v in product(range(mod), repeat=h * h)]
    psis = [P for P in psis if _z_invertible(P, p)]
    seen, sizes, reps = set(), [], []
    for P in psis:
        if P in seen:
            continue
        orbit = {_zmat_mul(_zmat_mul(U, P, mod), Ti, mod) for U, Ti in autos}
        seen |= orbit
        sizes.append(len(orbit))
        reps.append(P)
    return {"class_count": len(sizes), "orbit_sizes": sorted(sizes), "reps": reps}


def displays_isomorphic_zmod(p: int, d: int, N: int, P1, P2) -> bool:
    mod = p**N
    P1 = tuple(tuple(r) for r in P1)
    P2 = tuple(tuple(r) for r in P2)
    return any(_zmat_mul(_zmat_mul(U, P1, mod), Ti, mod) == P2
               for U, Ti in display_autos_zmod(p, len(P1), d, N))


# Hecke types through determinantal divisors ---------------------------------------------

def hecke_type_oracle(q: int, K: int, s: int, phi0) -> tuple | None:
    """Exponents from d_k = min valuation of k x k minors; None if d_h is not visible at K."""
    F = gf(q)
    T = _Trunc(F, K)
    h = len(phi0)

    def val(a):
        return next((i for i, c in enumerate(a) if c), K)

    def det(rows, cols):
        acc = T.zero()
        for perm in permutations(range(len(cols))):
            sign = _perm_sign(perm)
            term = T.one()
            for r, pc in zip(rows, perm):
                term = T.mul(term, phi0[r][cols[pc]])
            acc = T.add(acc, term) if sign > 0 else T.sub(acc, term)
        return acc

    d = [0]
    for k in range(1, h + 1):
        best = K
        for rows in combinations(range(h), k):
            for cols in combinations(range(h), k):
                best = min(best, val(det(rows, cols)))
        d.append(best)
    if d[h] >= K:
        return None
    f = [d[k] - d[k - 1] for k in range(1, h + 1)]
    return tuple(sorted((x - s for x in f), reverse=True))


def _perm_sign(perm) -> int:
    sign, seen = 1, set()
    for i in range(len(perm)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


__all__ = [
    "ghost_witt", "teichmuller_zmod", "zmod_of_witt", "display_group_pairs",
    "group_order_oracle", "kernel_order_oracle", "shtuka_orbits_oracle",
    "shtuka_count_burnside", "shtuka_fibers_oracle", "zip_set_oracle",
    "display_orbits_zmod", "displays_isomorphic_zmod", "hecke_type_oracle",
]
