"""Dense linear algebra over a finite field given by an ``FqField``-like object.

Vectors are tuples, matrices are tuples of row tuples.
"""

from __future__ import annotations

from itertools import product

from .errors import NotInvertible


def identity(n: int) -> tuple:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zeros(r: int, c: int) -> tuple:
    return tuple((0,) * c for _ in range(r))


def transpose(A) -> tuple:
    return tuple(zip(*A)) if A else ()


def matmul(F, A, B) -> tuple:
    Bt = transpose(B)
    mt, at = F.mul_t, F.add_t
    out = []
    for row in A:
        r = []
        for col in Bt:
            acc = 0
            for x, y in zip(row, col):
                if x and y:
                    acc = at[acc][mt[x][y]]
            r.append(acc)
        out.append(tuple(r))
    return tuple(out)


def matvec(F, A, v) -> tuple:
    return tuple(matmul(F, A, tuple((x,) for x in v))[i][0] for i in range(len(A)))


def matfrob(F, A, power: int) -> tuple:
    return tuple(tuple(F.pow(x, power) for x in row) for row in A)


def rref(F, rows) -> tuple[tuple, tuple]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    M = [list(r) for r in rows]
    if not M:
        return (), ()
    ncols = len(M[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = F.inv(M[r][c])
        M[r] = [F.mul(inv, x) for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return tuple(tuple(row) for row in M[:r]), tuple(pivots)


def rank(F, A) -> int:
    return len(rref(F, A)[0])


def inverse(F, A) -> tuple:
    n = len(A)
    aug = [tuple(A[i]) + identity(n)[i] for i in range(n)]
    R, piv = rref(F, aug)
    if len(R) < n or piv[n - 1] != n - 1:
        raise NotInvertible("singular matrix")
    return tuple(row[n:] for row in R)


def det_nonzero(F, A) -> bool:
    return rank(F, A) == len(A)


def nullspace(F, A) -> tuple:
    """Basis (as tuples) of {x : A x = 0}."""
    ncols = len(A[0]) if A else 0
    R, piv = rref(F, A)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for row, pc in zip(R, piv):
            v[pc] = F.neg(row[f])
        basis.append(tuple(v))
    return tuple(basis)


def solve(F, A, b):
    """One solution of A x = b, or None."""
    n = len(A[0])
    aug = [tuple(A[i]) + (b[i],) for i in range(len(A))]
    R, piv = rref(F, aug)
    if piv and piv[-1] == n:
        return None
    x = [0] * n
    for row, pc in zip(R, piv):
        x[pc] = row[n]
    return tuple(x)


def span_elements(F, basis) -> list:
    """All vectors in the span of ``basis`` (small fields only)."""
    if not basis:
        return []
    n = len(basis[0])
    out = []
    for coeffs in product(range(F.q), repeat=len(basis)):
        v = [0] * n
        for c, b in zip(coeffs, basis):
            if c:
                v = [F.add(x, F.mul(c, y)) for x, y in zip(v, b)]
        out.append(tuple(v))
    return out


def subspaces(F, n: int, k: int) -> list:
    """Every k-dimensional subspace of F^n, as its RREF basis (sorted, deterministic)."""
    out = []
    from itertools import combinations
    for piv in combinations(range(n), k):
        # free positions: columns after each pivot that are not pivots
        slots = [(i, c) for i, p in enumerate(piv) for c in range(p + 1, n) if c not in piv]
        for vals in product(range(F.q), repeat=len(slots)):
            rows = [[0] * n for _ in range(k)]
            for i, p in enumerate(piv):
                rows[i][p] = 1
            for (i, c), v in zip(slots, vals):
                rows[i][c] = v
            out.append(tuple(tuple(r) for r in rows))
    return out


def general_linear(F, n: int) -> list:
    """All of GL_n(F), deterministic order."""
    out = []
    for entries in product(range(F.q), repeat=n * n):
        A = tuple(tuple(entries[i * n:(i + 1) * n]) for i in range(n))
        if det_nonzero(F, A):
            out.append(A)
    return out


def gl_order(q: int, n: int) -> int:
    out = 1
    for i in range(n):
        out *= q**n - q**i
    return out
