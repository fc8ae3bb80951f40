"""Truncated displays over W_N(F_q) via pairs M = L + T with M_1 = L + I T.

The c-block of a pair morphism takes values in I_{N+1} = V W_N, the first
filtration step of the truncated Witt frame, so it is stored as a length N+1
Witt vector with vanishing first coordinate.  Its image in M is the length N
truncation and its contribution to the twisted map is the V-preimage.

    tilde(m) = [[F a, p F b], [V^{-1} c, F d]]

A display is a pair with an invertible Psi: tilde(M_1) -> M; a morphism f is
a pair morphism with Psi' tilde(f) = f Psi.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product

from .chain import WittChain, mat_inverse, mat_mul
from .errors import InvariantViolation, NonUnit, NotInIdeal, ShapeMismatch
from .fields import FqField, gf
from .witt import witt_ring
from .zips import FZipHD, zip_from_matrix


@dataclass(frozen=True)
class WittPair:
    """Pair of ranks (d, h-d) over W_N(F_q); M = L + T with rank L = d."""

    field: FqField
    N: int
    h: int
    d: int

    @property
    def W(self) -> WittChain:
        return _chain(self.field, self.N)

    @property
    def W1(self) -> WittChain:
        return _chain(self.field, self.N + 1)


_CHAINS: dict = {}


def _chain(field, N) -> WittChain:
    key = (field, N)
    if key not in _CHAINS:
        _CHAINS[key] = WittChain(field, N)
    return _CHAINS[key]


@dataclass(frozen=True)
class PairMor:
    """Blocks a: L->L', b: T->L', c: L->I T', d: T->T' as nested tuples of Witt coordinates."""

    src: WittPair
    dst: WittPair
    a: tuple
    b: tuple
    c: tuple  # entries of length N+1
    d: tuple

    def __post_init__(self):
        s, t = self.src, self.dst
        if (s.field, s.N) != (t.field, t.N):
            raise ShapeMismatch("pairs over different Witt rings")
        shapes = {"a": (t.d, s.d), "b": (t.d, s.h - s.d), "c": (t.h - t.d, s.d), "d": (t.h - t.d, s.h - s.d)}
        for name, (r, k) in shapes.items():
            M = getattr(self, name)
            if len(M) != r or any(len(row) != k for row in M):
                raise ShapeMismatch(f"block {name} has the wrong shape")


def _blocks(top_left, top_right, bot_left, bot_right):
    rows = [list(a) + list(b) for a, b in zip(top_left, top_right)] if top_left or top_right else []
    rows += [list(a) + list(b) for a, b in zip(bot_left, bot_right)]
    return rows


def _fill(r, k, val):
    return tuple(tuple(val for _ in range(k)) for _ in range(r))


def _frob(W: WittChain, x):
    F = W.field
    return tuple(F.frob(c) for c in x)


def pair_mor(src: WittPair, dst: WittPair, a, b, c, d) -> PairMor:
    """Build a morphism; c entries may be given with length N (then read as V of a length
    N vector is NOT assumed; they must already lie in I) or length N+1."""
    N = src.N
    fixc = []
    for row in c:
        r = []
        for x in row:
            x = tuple(x)
            if len(x) == N:
                x = x + (0,)
            r.append(x)
        fixc.append(tuple(r))
    norm = lambda M: tuple(tuple(tuple(x) for x in row) for row in M)
    m = PairMor(src, dst, norm(a), norm(b), tuple(fixc), norm(d))
    for row in m.c:
        for x in row:
            if x[0] != 0:
                raise NotInIdeal("c-block entries must lie in the ideal I")
    return m


def underlying(m: PairMor):
    """The W_N-linear map M -> M' as an h' x h matrix."""
    N = m.src.N
    c = tuple(tuple(x[:N] for x in row) for row in m.c)
    return _blocks(m.a, m.b, c, m.d)


def tilde_on_morphism(m: PairMor):
    """Matrix of the induced map on the twisted modules, [[F a, p F b], [V^-1 c, F d]]."""
    W = m.src.W
    p = W.pi_power(1)
    for row in m.c:
        for x in row:
            if x[0] != 0:
                raise NotInIdeal("c-block entry outside the ideal I")
    A = [[_frob(W, x) for x in row] for row in m.a]
    B = [[W.mul(p, _frob(W, x)) for x in row] for row in m.b]
    C = [[x[1:] for x in row] for row in m.c]
    D = [[_frob(W, x) for x in row] for row in m.d]
    return _blocks(A, B, C, D)


def compose(g: PairMor, f: PairMor) -> PairMor:
    """g o f for f: P -> P', g: P' -> P''."""
    if g.src != f.dst:
        raise ShapeMismatch("morphisms are not composable")
    W, W1, N = f.src.W, f.src.W1, f.src.N
    pad = lambda M: [[tuple(x) + (0,) for x in row] for row in M]
    cut = lambda M: [[tuple(x[:N]) for x in row] for row in M]
    add = lambda R, X, Y: [[R.add(x, y) for x, y in zip(r1, r2)] for r1, r2 in zip(X, Y)] if X else []

    def mm(R, X, Y, rows, cols):
        if not rows or not cols:
            return [[R.zero] * cols for _ in range(rows)]
        if not Y:
            return [[R.zero] * cols for _ in range(rows)]
        return mat_mul(R, X, Y)

    s, m_, t = f.src, f.dst, g.dst
    ls, ts = s.d, s.h - s.d
    lt, tt = t.d, t.h - t.d
    a = add(W, mm(W, g.a, f.a, lt, ls), mm(W, g.b, cut(f.c), lt, ls))
    b = add(W, mm(W, g.a, f.b, lt, ts), mm(W, g.b, f.d, lt, ts))
    c = add(W1, mm(W1, g.c, pad(f.a), tt, ls), mm(W1, pad(g.d), f.c, tt, ls))
    d = add(W, mm(W, cut(g.c), f.b, tt, ts), mm(W, g.d, f.d, tt, ts))
    fix = lambda M, r, k: tuple(tuple(tuple(x) for x in row) for row in M) if M else _fill(r, k, ())
    return PairMor(s, t, fix(a, lt, ls), fix(b, lt, ts), fix(c, tt, ls), fix(d, tt, ts))


def pair_morphisms(src: WittPair, dst: WittPair, invertible_only: bool = False):
    """Every pair morphism src -> dst (small cases only)."""
    W = src.W
    elems = W.elements()
    ideal = [(0,) + x for x in elems]
    units = [x for x in elems if x[0] != 0]
    ls, ts, lt, tt = src.d, src.h - src.d, dst.d, dst.h - dst.d

    def mats(r, k, pool):
        for vals in product(pool, repeat=r * k):
            yield tuple(tuple(vals[i * k:(i + 1) * k]) for i in range(r))

    for a in mats(lt, ls, elems):
        if invertible_only and a and not _invertible(W, a):
            continue
        for d in mats(tt, ts, elems):
            if invertible_only and d and not _invertible(W, d):
                continue
            for b in mats(lt, ts, elems):
                for c in mats(tt, ls, ideal):
                    yield PairMor(src, dst, a, b, c, d)
    del units


def _invertible(W, M) -> bool:
    try:
        mat_inverse(W, [list(r) for r in M])
        return True
    except NonUnit:
        return False


def random_pair_mor(src: WittPair, dst: WittPair, rng: random.Random) -> PairMor:
    W = src.W
    rnd = lambda r, k, ideal=False: tuple(
        tuple(((0,) + W.random(rng)) if ideal else W.random(rng) for _ in range(k)) for _ in range(r))
    ls, ts, lt, tt = src.d, src.h - src.d, dst.d, dst.h - dst.d
    return PairMor(src, dst, rnd(lt, ls), rnd(lt, ts), rnd(tt, ls, True), rnd(tt, ts))


# displays ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Display:
    pair: WittPair
    psi: tuple  # h x h over W_N

    def __post_init__(self):
        if len(self.psi) != self.pair.h or not _invertible(self.pair.W, self.psi):
            raise InvariantViolation("Psi must be an invertible h x h matrix")


def is_display_morphism(D1: Display, D2: Display, f: PairMor) -> bool:
    W = D1.pair.W
    lhs = mat_mul(W, [list(r) for r in D2.psi], tilde_on_morphism(f))
    rhs = mat_mul(W, underlying(f), [list(r) for r in D1.psi])
    return lhs == rhs


class DisplayAction:
    """Automorphism group of the pair acting on Psi by Psi -> f Psi tilde(f)^-1."""

    def __init__(self, pair: WittPair):
        self.pair = pair
        W = pair.W
        self.autos = list(pair_morphisms(pair, pair, invertible_only=True))
        self.mats = [(underlying(f), mat_inverse(W, tilde_on_morphism(f))) for f in self.autos]

    def act(self, k: int, psi):
        W = self.pair.W
        U, Tinv = self.mats[k]
        return tuple(tuple(r) for r in mat_mul(W, mat_mul(W, U, [list(r) for r in psi]), Tinv))


def display_iso_test(D1: Display, D2: Display, action: DisplayAction | None = None):
    """Search the invertible pair morphisms for an isomorphism D1 -> D2."""
    if D1.pair != D2.pair:
        return False, None
    action = action or DisplayAction(D1.pair)
    for k, f in enumerate(action.autos):
        if action.act(k, D1.psi) == D2.psi:
            return True, f
    return False, None


def all_psi(pair: WittPair):
    W, h = pair.W, pair.h
    elems = W.elements()
    for vals in product(elems, repeat=h * h):
        M = tuple(tuple(vals[i * h:(i + 1) * h]) for i in range(h))
        if _invertible(W, M):
            yield M


def display_classify(p: int, q: int, h: int, d: int, N: int) -> dict:
    F = gf(q)
    if F.p != p:
        raise ValueError(f"q={q} is not a power of p={p}")
    pair = WittPair(F, N, h, d)
    action = DisplayAction(pair)
    key = lambda M: tuple(c for row in M for x in row for c in x)
    psis = sorted(all_psi(pair), key=key)
    seen, reps, sizes = set(), [], []
    for psi in psis:
        if psi in seen:
            continue
        orbit = {action.act(k, psi) for k in range(len(action.autos))}
        seen |= orbit
        reps.append(psi)
        sizes.append(len(orbit))
    W = pair.W
    return {
        "params": {"p": p, "q": q, "h": h, "d": d, "N": N},
        "class_count": len(reps),
        "orbit_sizes": sizes,
        "representatives": [[[W.format(x) for x in row] for row in M] for M in reps],
    }


def zip_of_display_N1(D: Display) -> FZipHD:
    """The F-zip attached to a 1-truncated display: V = M/IM, C from M_1, D from Psi."""
    pair = D.pair
    if pair.N != 1:
        raise ShapeMismatch("zip comparison needs N = 1")
    g = tuple(tuple(x[0] for x in row) for row in D.psi)
    return zip_from_matrix(pair.field, pair.field.p, pair.d, g)
