"""F-zips with a descending filtration C (one step, dim d) and an ascending
filtration D (one step, dim h-d) on V = F^h.

Coordinates are canonical: C1 and D0 are stored by their reduced echelon
bases.  V/C1 uses the standard vectors e_k at the non-pivot columns of C1,
and V/D0 likewise.  alpha0: V/C1 -> D0 and alpha1: C1 -> V/D0 are
semilinear for x -> x^r and stored as matrices in these bases, so
alpha(sum l_i b_i) = sum l_i^r alpha(b_i).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .errors import InvariantViolation, TypeMismatch
from .fields import FqField, gf
from .linalg import det_nonzero, general_linear, matfrob, rref, subspaces

Vec = tuple


@dataclass(frozen=True)
class FZipHD:
    field: FqField
    frob_q: int
    h: int
    d: int
    C1: tuple  # d rows
    D0: tuple  # h-d rows
    alpha0: tuple  # (h-d)x(h-d): columns are images of V/C1 basis in D0 coordinates
    alpha1: tuple  # d x d: columns are images of C1 basis in V/D0 coordinates

    def __post_init__(self):
        F, h, d = self.field, self.h, self.d
        if len(self.C1) != d or len(self.D0) != h - d:
            raise InvariantViolation("filtration dimensions do not match (h, d)")
        for rows in (self.C1, self.D0):
            if rows and rref(F, rows)[0] != tuple(tuple(r) for r in rows):
                raise InvariantViolation("filtration bases must be in reduced echelon form")
        if d and not det_nonzero(F, self.alpha1):
            raise InvariantViolation("alpha1 is not bijective")
        if h - d and not det_nonzero(F, self.alpha0):
            raise InvariantViolation("alpha0 is not bijective")

    def key(self) -> tuple:
        flat = lambda M: tuple(x for row in M for x in row)
        return flat(self.C1) + flat(self.D0) + flat(self.alpha0) + flat(self.alpha1)


def _pivots(F, rows):
    return rref(F, rows)[1] if rows else ()


def _reduce(F, x, rows, piv):
    x = list(x)
    for row, pc in zip(rows, piv):
        if x[pc]:
            f = x[pc]
            x = [F.sub(a, F.mul(f, b)) for a, b in zip(x, row)]
    return x


def _complement(h, piv):
    return [k for k in range(h) if k not in piv]


def _apply(F, g, x):
    return [_dot(F, row, x) for row in g]


def _dot(F, u, v):
    acc = 0
    for a, b in zip(u, v):
        if a and b:
            acc = F.add(acc, F.mul(a, b))
    return acc


def _comb(F, coeffs, vectors, n):
    out = [0] * n
    for c, v in zip(coeffs, vectors):
        if c:
            out = [F.add(a, F.mul(c, b)) for a, b in zip(out, v)]
    return out


def _unit(h, k):
    return [1 if i == k else 0 for i in range(h)]


def _alpha0_vec(Z, coords):
    """alpha0 applied to the class with complement coordinates ``coords`` (as a vector in V)."""
    F, r = Z.field, Z.frob_q
    tw = [F.pow(c, r) for c in coords]
    img = [_dot(F, Z.alpha0[i], tw) for i in range(len(Z.D0))]
    return _comb(F, img, Z.D0, Z.h)


def _alpha1_vec(Z, coords):
    """alpha1 applied to C1 coordinates; returns a lift to V via the standard complement of D0."""
    F, r = Z.field, Z.frob_q
    tw = [F.pow(c, r) for c in coords]
    comp = _complement(Z.h, _pivots(F, Z.D0))
    out = [0] * Z.h
    for i, k in enumerate(comp):
        out[k] = _dot(F, Z.alpha1[i], tw)
    return out


def zip_transport(g, Z: FZipHD) -> FZipHD:
    """The zip g.Z obtained by transport of structure along g in GL(V)."""
    from .linalg import inverse
    F, h, d = Z.field, Z.h, Z.d
    ginv = inverse(F, g)
    C1n, cpiv_n = rref(F, [_apply(F, g, c) for c in Z.C1]) if d else ((), ())
    D0n, dpiv_n = rref(F, [_apply(F, g, x) for x in Z.D0]) if h - d else ((), ())
    cpiv = _pivots(F, Z.C1)
    ccomp, ccomp_n = _complement(h, cpiv), _complement(h, cpiv_n)
    dcomp_n = _complement(h, dpiv_n)
    a0 = []
    for k in ccomp_n:
        x = _reduce(F, _apply(F, ginv, _unit(h, k)), Z.C1, cpiv)
        y = _apply(F, g, _alpha0_vec(Z, [x[j] for j in ccomp]))
        a0.append([y[p] for p in dpiv_n])
    a1 = []
    for row in C1n:
        x = _apply(F, ginv, row)
        y = _apply(F, g, _alpha1_vec(Z, [x[p] for p in cpiv]))
        y = _reduce(F, y, D0n, dpiv_n)
        a1.append([y[k] for k in dcomp_n])
    tr = lambda cols, n: tuple(tuple(cols[j][i] for j in range(len(cols))) for i in range(n))
    return FZipHD(F, Z.frob_q, h, d, tuple(C1n), tuple(D0n), tr(a0, h - d), tr(a1, d))


def zip_from_matrix(field: FqField, frob_q: int, d: int, g) -> FZipHD:
    """Zip with C1 = <e_1..e_d>, D0 = g<e_{d+1}..e_h>, alpha = (g o Frobenius) on graded pieces."""
    F, h = field, len(g)
    if not det_nonzero(F, g):
        raise InvariantViolation("matrix is not invertible")
    C1 = tuple(tuple(_unit(h, i)) for i in range(d))
    cols = [[g[i][j] for i in range(h)] for j in range(h)]
    D0, dpiv = rref(F, cols[d:]) if h - d else ((), ())
    dcomp = _complement(h, dpiv)
    a0 = [[col[p] for p in dpiv] for col in cols[d:]]
    a1 = [[_reduce(F, col, D0, dpiv)[k] for k in dcomp] for col in cols[:d]]
    tr = lambda cs, n: tuple(tuple(cs[j][i] for j in range(len(cs))) for i in range(n))
    return FZipHD(F, frob_q, h, d, C1, tuple(D0), tr(a0, h - d), tr(a1, d))


def zip_matrix(Z: FZipHD):
    """Some g with Z isomorphic to zip_from_matrix(g); also returns the base change used."""
    F, h, d = Z.field, Z.h, Z.d
    cpiv = _pivots(F, Z.C1)
    basis = [list(c) for c in Z.C1] + [_unit(h, k) for k in _complement(h, cpiv)]
    h0 = tuple(tuple(basis[j][i] for j in range(h)) for i in range(h))
    from .linalg import inverse
    Z0 = zip_transport(inverse(F, h0), Z)
    cols = []
    for j in range(d):
        cols.append(_alpha1_vec(Z0, _unit(d, j)))
    for j in range(h - d):
        cols.append(_alpha0_vec(Z0, _unit(h - d, j)))
    g = tuple(tuple(cols[j][i] for j in range(h)) for i in range(h))
    return g, h0


def zip_enumerate(field: FqField, frob_q: int, h: int, d: int):
    Cs = subspaces(field, h, d)
    Ds = subspaces(field, h, h - d)
    A0 = general_linear(field, h - d) if h - d else [()]
    A1 = general_linear(field, d) if d else [()]
    for C1, D0, a0, a1 in product(Cs, Ds, A0, A1):
        yield FZipHD(field, frob_q, h, d, C1, D0, a0, a1)


def zip_iso_test(Z1: FZipHD, Z2: FZipHD):
    """Exhaustive search for g in GL_h with g.Z1 = Z2.  Returns (bool, g or None)."""
    if (Z1.field, Z1.frob_q, Z1.h, Z1.d) != (Z2.field, Z2.frob_q, Z2.h, Z2.d):
        return False, None
    for g in general_linear(Z1.field, Z1.h):
        if zip_transport(g, Z1) == Z2:
            return True, g
    return False, None


@dataclass
class ZipTable:
    params: dict
    reps: list
    sizes: list

    @property
    def class_count(self):
        return len(self.reps)

    def to_json(self):
        return {"params": self.params, "class_count": self.class_count, "orbit_sizes": self.sizes,
                "representatives": [format_zip(z) for z in self.reps]}


def zip_classify(q: int, h: int, d: int, frob_q: int | None = None) -> ZipTable:
    F = gf(q)
    r = q if frob_q is None else frob_q
    allz = sorted(zip_enumerate(F, r, h, d), key=FZipHD.key)
    G = general_linear(F, h)
    seen, reps, sizes = set(), [], []
    for Z in allz:
        if Z in seen:
            continue
        orbit = {zip_transport(g, Z) for g in G}
        seen |= orbit
        reps.append(Z)
        sizes.append(len(orbit))
    return ZipTable({"q": q, "h": h, "d": d, "frob_q": r}, reps, sizes)


# Frobenius twist of the C side ---------------------------------------------------

@dataclass(frozen=True)
class ZipVariant:
    """(V, C on the Frobenius twist of V, D on V, linear alpha); isomorphisms act by
    phi(g) on the C side and g on the D side."""

    zip: FZipHD


def zip_twist(Z: FZipHD) -> ZipVariant:
    F, r = Z.field, Z.frob_q
    C1 = tuple(tuple(F.pow(x, r) for x in row) for row in Z.C1)
    return ZipVariant(FZipHD(F, r, Z.h, Z.d, C1, Z.D0, Z.alpha0, Z.alpha1))


def _untwist(Z: FZipHD) -> FZipHD:
    F, r = Z.field, Z.frob_q
    e = F.q // r if r < F.q else 1
    C1 = tuple(tuple(F.pow(x, e) for x in row) for row in Z.C1)
    return FZipHD(F, r, Z.h, Z.d, C1, Z.D0, Z.alpha0, Z.alpha1)


def variant_transport(g, V: ZipVariant) -> ZipVariant:
    """Transport along g: phi(g) moves C, g moves D, alpha -> g alpha phi(g)^-1.

    Untwisting C, transporting as a zip and twisting back realises exactly this rule.
    """
    return zip_twist(zip_transport(g, _untwist(V.zip)))


def variant_iso_test(V1: ZipVariant, V2: ZipVariant):
    for g in general_linear(V1.zip.field, V1.zip.h):
        if variant_transport(g, V1) == V2:
            return True, g
    return False, None


# comparison with level-1 shtukas of minuscule type ---------------------------------

def minuscule_d(mu) -> int:
    mu = tuple(mu)
    if any(x not in (0, 1) for x in mu) or list(mu) != sorted(mu, reverse=True):
        raise TypeMismatch(f"type {mu} is not of the form (1,...,1,0,...,0)")
    return sum(mu)


def shtuka1_to_zip(g, mu, field: FqField, frob_q: int | None = None) -> FZipHD:
    """Zip attached to a level-1 shtuka g in GL_h(F) of type mu_d."""
    d = minuscule_d(mu)
    if len(mu) != len(g):
        raise TypeMismatch("type length differs from matrix size")
    return zip_from_matrix(field, field.q if frob_q is None else frob_q, d, g)


def zip_to_shtuka1(Z: FZipHD):
    """Level-1 shtuka attached to Z; the Frobenius twist sits on this side, so the round
    trip from shtukas sends the class of g to the class of phi(g)."""
    g, _ = zip_matrix(Z)
    return matfrob(Z.field, g, Z.frob_q)


# text --------------------------------------------------------------------------------

def format_zip(Z: FZipHD) -> dict:
    fmt = Z.field.format
    m = lambda M: [[fmt(x) for x in row] for row in M]
    return {"C1": m(Z.C1), "D0": m(Z.D0), "alpha0": m(Z.alpha0), "alpha1": m(Z.alpha1)}
