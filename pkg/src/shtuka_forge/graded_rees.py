"""Graded modules over Rees algebras A[t,u]/(tu - v) and filtered chains over A.

Every base is a finite chain ring A (F_q, F_q[z]/(z^K) or W_N(F_q)), and a
degree-j piece is presented as A^n / im(S) with S optional (free pieces have
no relations).  Modules are stored on a finite window [j_min, j_max]; flags
say what happens outside:

* ``t_iso_below``: M_j = M_{j_min} for j < j_min with t = id (so u = v).
* ``u_iso_above``: M_j = M_{j_max} for j > j_max with u = id (so t = v).

Matrix conventions: ``t[j]`` is the matrix of t: M_{j+1} -> M_j (n_j x n_{j+1})
and ``u[j]`` is the matrix of u: M_j -> M_{j+1} (n_{j+1} x n_j), both for
j_min <= j < j_max.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field

from .chain import (
    ChainRing, FieldChain, SeriesChain, WittChain, free_over, hcat, in_span,
    kernel_gens, make_chain, map_injective, mat_identity, mat_inverse,
    module_structure, random_invertible, smith, structure_length,
)
from .errors import (
    InvariantViolation, NotABundle, PrecisionExhausted, ShapeMismatch, UnsupportedBase,
)


# small matrix helpers that tolerate zero-sized shapes -----------------------

def zeros(A: ChainRing, r: int, c: int):
    return [[A.zero] * c for _ in range(r)]


def scalar(A: ChainRing, x, n: int):
    return [[x if i == j else A.zero for j in range(n)] for i in range(n)]


def mm(A: ChainRing, X, Y, r: int, k: int, c: int):
    out = zeros(A, r, c)
    for i in range(r):
        for l in range(k):
            x = X[i][l]
            if x == A.zero:
                continue
            for j in range(c):
                y = Y[l][j]
                if y != A.zero:
                    out[i][j] = A.add(out[i][j], A.mul(x, y))
    return out


def msub(A: ChainRing, X, Y):
    return [[A.sub(a, b) for a, b in zip(rx, ry)] for rx, ry in zip(X, Y)]


def block_diag(A: ChainRing, mats, shapes):
    r = sum(s[0] for s in shapes)
    c = sum(s[1] for s in shapes)
    out = zeros(A, r, c)
    ro = co = 0
    for M, (mr, mc) in zip(mats, shapes):
        for i in range(mr):
            for j in range(mc):
                out[ro + i][co + j] = M[i][j]
        ro += mr
        co += mc
    return out


def _check_shape(M, r: int, c: int, what: str):
    if len(M) != r or any(len(row) != c for row in M):
        raise ShapeMismatch(f"{what}: expected {r}x{c}")


def _cols(M, nrows: int) -> int:
    return len(M[0]) if nrows and M and M[0] is not None else 0


@dataclass(frozen=True)
class Verdict:
    ok: bool
    condition: str | None = None
    degree: int | None = None
    detail: str = ""

    @property
    def witness(self) -> str:
        if self.ok:
            return ""
        where = "" if self.degree is None else f" at j={self.degree}"
        return f"condition {self.condition}{where}"

    def to_json(self) -> dict:
        return {"ok": self.ok, "condition": self.condition, "degree": self.degree,
                "witness": self.witness, "detail": self.detail}


# graded Rees modules -------------------------------------------------------------

@dataclass
class GradedReesModule:
    base: ChainRing
    v: object
    j_min: int
    j_max: int
    ranks: dict
    t: dict
    u: dict
    t_iso_below: bool = True
    u_iso_above: bool = True
    rels: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        A = self.base
        if self.j_min > self.j_max:
            raise ShapeMismatch("empty window")
        for j in self.window():
            if j not in self.ranks:
                raise ShapeMismatch(f"missing rank in degree {j}")
            n = self.ranks[j]
            if j in self.rels:
                S = self.rels[j]
                if len(S) != n:
                    raise ShapeMismatch(f"relations in degree {j}")
        for j in range(self.j_min, self.j_max):
            _check_shape(self.t[j], self.ranks[j], self.ranks[j + 1], f"t[{j}]")
            _check_shape(self.u[j], self.ranks[j + 1], self.ranks[j], f"u[{j}]")
        for j in range(self.j_min, self.j_max):
            n0, n1 = self.ranks[j], self.ranks[j + 1]
            if not _well_defined(A, self.t[j], n1, self.rel(j + 1), n0, self.rel(j)):
                raise InvariantViolation(f"t[{j}] does not respect relations")
            if not _well_defined(A, self.u[j], n0, self.rel(j), n1, self.rel(j + 1)):
                raise InvariantViolation(f"u[{j}] does not respect relations")
            tu = msub(A, mm(A, self.t[j], self.u[j], n0, n1, n0), scalar(A, self.v, n0))
            if not _zero_mod(A, tu, n0, self.rel(j)):
                raise InvariantViolation(f"t u != v on M_{j}")
            ut = msub(A, mm(A, self.u[j], self.t[j], n1, n0, n1), scalar(A, self.v, n1))
            if not _zero_mod(A, ut, n1, self.rel(j + 1)):
                raise InvariantViolation(f"u t != v on M_{j + 1}")

    def window(self):
        return range(self.j_min, self.j_max + 1)

    def rel(self, j: int):
        return self.rels.get(j, [])

    def is_free(self) -> bool:
        return not any(S and S[0] for S in self.rels.values())

    def extend(self, lo: int, hi: int) -> "GradedReesModule":
        """The same module on a larger window, using the boundary flags."""
        return _extend_rees(self, lo, hi)

    def t_chain(self) -> "FilteredChain":
        return FilteredChain(self.base, self.j_min, self.j_max, dict(self.ranks),
                             dict(self.t), iso_below=self.t_iso_below, zero_above=False,
                             rels=dict(self.rels))

    def describe(self) -> dict:
        A = self.base
        return {
            "kind": "rees", "base": A.describe(), "v": A.format(self.v),
            "window": [self.j_min, self.j_max],
            "ranks": {str(j): self.ranks[j] for j in self.window()},
            "flags": {"t_iso_below": self.t_iso_below, "u_iso_above": self.u_iso_above},
        }


def _well_defined(A, F, n_src, S_src, n_tgt, S_tgt) -> bool:
    if not S_src or not S_src[0]:
        return True
    img = mm(A, F, S_src, n_tgt, n_src, len(S_src[0]))
    return _zero_mod(A, img, n_tgt, S_tgt)


def _zero_mod(A, M, n, S) -> bool:
    if n == 0 or not M or not M[0]:
        return True
    for j in range(len(M[0])):
        col = [M[i][j] for i in range(n)]
        if any(A.val(c) < A.K for c in col) and not in_span(A, S, col, n):
            return False
    return True


def _extend_rees(m: GradedReesModule, lo: int, hi: int) -> GradedReesModule:
    A = m.base
    lo, hi = min(lo, m.j_min), max(hi, m.j_max)
    if lo < m.j_min and not m.t_iso_below:
        raise NotABundle("cannot extend below an unflagged window edge")
    if hi > m.j_max and not m.u_iso_above:
        raise NotABundle("cannot extend above an unflagged window edge")
    ranks, rels, t, u = dict(m.ranks), dict(m.rels), dict(m.t), dict(m.u)
    n_lo, n_hi = m.ranks[m.j_min], m.ranks[m.j_max]
    for j in range(lo, m.j_min):
        ranks[j] = n_lo
        if m.j_min in m.rels:
            rels[j] = m.rels[m.j_min]
        t[j] = scalar(A, A.one, n_lo)
        u[j] = scalar(A, m.v, n_lo)
    for j in range(m.j_max + 1, hi + 1):
        ranks[j] = n_hi
        if m.j_max in m.rels:
            rels[j] = m.rels[m.j_max]
    for j in range(m.j_max, hi):
        t[j] = scalar(A, m.v, n_hi)
        u[j] = scalar(A, A.one, n_hi)
    return GradedReesModule(A, m.v, lo, hi, ranks, t, u, m.t_iso_below,
                            m.u_iso_above, rels)


# filtered chains -------------------------------------------------------------------

@dataclass
class FilteredChain:
    """A chain ... -> M_{j+1} -t-> M_j -> ... of A-modules.

    ``iso_below``: t = id below the window.  ``zero_above``: M_j = 0 above it.
    """
    base: ChainRing
    j_min: int
    j_max: int
    ranks: dict
    t: dict
    iso_below: bool = True
    zero_above: bool = True
    rels: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        for j in self.window():
            if j not in self.ranks:
                raise ShapeMismatch(f"missing rank in degree {j}")
        for j in range(self.j_min, self.j_max):
            _check_shape(self.t[j], self.ranks[j], self.ranks[j + 1], f"t[{j}]")
            if not _well_defined(self.base, self.t[j], self.ranks[j + 1], self.rel(j + 1),
                                 self.ranks[j], self.rel(j)):
                raise InvariantViolation(f"t[{j}] does not respect relations")

    def window(self):
        return range(self.j_min, self.j_max + 1)

    def rel(self, j: int):
        return self.rels.get(j, [])

    def tmap(self, j: int):
        """t: M_{j+1} -> M_j, with the zero map out of M_{j_max+1} = 0."""
        if j == self.j_max:
            return zeros(self.base, self.ranks[j], 0)
        return self.t[j]

    def rank_above(self, j: int) -> int:
        return self.ranks[j + 1] if j < self.j_max else 0

    def describe(self) -> dict:
        return {
            "kind": "filtered", "base": self.base.describe(),
            "window": [self.j_min, self.j_max],
            "ranks": {str(j): self.ranks[j] for j in self.window()},
            "flags": {"iso_below": self.iso_below, "zero_above": self.zero_above},
        }


# constructors ----------------------------------------------------------------------

def default_v(A: ChainRing):
    """The uniformizer, or 0 over a field."""
    return A.zero if isinstance(A, FieldChain) else A.pi_power(1)


def rees_twist(A: ChainRing, e: int, v=None) -> GradedReesModule:
    """O(e): M_j = A, t = v when j + e >= 0 (identity otherwise), u the complement."""
    v = default_v(A) if v is None else v
    lo, hi = -e - 1, -e + 1
    ranks = {j: 1 for j in range(lo, hi + 1)}
    t, u = {}, {}
    for j in range(lo, hi):
        if j + e >= 0:
            t[j], u[j] = [[v]], [[A.one]]
        else:
            t[j], u[j] = [[A.one]], [[v]]
    return GradedReesModule(A, v, lo, hi, ranks, t, u)


def rees_direct_sum(*ms: GradedReesModule) -> GradedReesModule:
    A, v = ms[0].base, ms[0].v
    if any(m.base != A or m.v != v for m in ms):
        raise ShapeMismatch("direct sum over different bases")
    lo = min(m.j_min for m in ms)
    hi = max(m.j_max for m in ms)
    ext = [m.extend(lo, hi) for m in ms]
    ranks = {j: sum(m.ranks[j] for m in ext) for j in range(lo, hi + 1)}
    t, u, rels = {}, {}, {}
    for j in range(lo, hi):
        t[j] = block_diag(A, [m.t[j] for m in ext], [(m.ranks[j], m.ranks[j + 1]) for m in ext])
        u[j] = block_diag(A, [m.u[j] for m in ext], [(m.ranks[j + 1], m.ranks[j]) for m in ext])
    for j in range(lo, hi + 1):
        if any(m.rel(j) for m in ext):
            shapes = [(m.ranks[j], _cols(m.rel(j), m.ranks[j])) for m in ext]
            rels[j] = block_diag(A, [m.rel(j) or zeros(A, m.ranks[j], 0) for m in ext], shapes)
    return GradedReesModule(A, v, lo, hi, ranks, t, u,
                            all(m.t_iso_below for m in ms), all(m.u_iso_above for m in ms), rels)


def twisted_sum(A: ChainRing, es, v=None) -> GradedReesModule:
    return rees_direct_sum(*[rees_twist(A, e, v) for e in es])


def rees_base_change(m: GradedReesModule, gs: dict) -> GradedReesModule:
    """Conjugate by graded automorphisms g_j of the (free) pieces."""
    if not m.is_free():
        raise UnsupportedBase("base change is implemented for free pieces only")
    A = m.base
    ginv = {j: mat_inverse(A, g) for j, g in gs.items()}
    t, u = {}, {}
    for j in range(m.j_min, m.j_max):
        n0, n1 = m.ranks[j], m.ranks[j + 1]
        t[j] = mm(A, mm(A, gs[j], m.t[j], n0, n0, n1), ginv[j + 1], n0, n1, n1)
        u[j] = mm(A, mm(A, gs[j + 1], m.u[j], n1, n1, n0), ginv[j], n1, n0, n0)
    return GradedReesModule(A, m.v, m.j_min, m.j_max, dict(m.ranks), t, u,
                            m.t_iso_below, m.u_iso_above)


def random_graded_automorphism(m, rng: random.Random) -> dict:
    return {j: random_invertible(m.base, m.ranks[j], rng) for j in m.window()}


def random_base_change(m, rng: random.Random):
    gs = random_graded_automorphism(m, rng)
    if isinstance(m, GradedReesModule):
        return rees_base_change(m, gs)
    return filtered_base_change(m, gs)


def filtered_twist(A: ChainRing, e: int) -> FilteredChain:
    """M_j = A for j <= e and 0 above, t = id."""
    return FilteredChain(A, e - 1, e, {e - 1: 1, e: 1}, {e - 1: [[A.one]]})


def filtered_direct_sum(*cs: FilteredChain) -> FilteredChain:
    A = cs[0].base
    lo = min(c.j_min for c in cs)
    hi = max(c.j_max for c in cs)
    ext = [_extend_filtered(c, lo, hi) for c in cs]
    ranks = {j: sum(c.ranks[j] for c in ext) for j in range(lo, hi + 1)}
    t, rels = {}, {}
    for j in range(lo, hi):
        t[j] = block_diag(A, [c.t[j] for c in ext], [(c.ranks[j], c.ranks[j + 1]) for c in ext])
    for j in range(lo, hi + 1):
        if any(c.rel(j) for c in ext):
            shapes = [(c.ranks[j], _cols(c.rel(j), c.ranks[j])) for c in ext]
            rels[j] = block_diag(A, [c.rel(j) or zeros(A, c.ranks[j], 0) for c in ext], shapes)
    return FilteredChain(A, lo, hi, ranks, t, all(c.iso_below for c in cs),
                         all(c.zero_above for c in cs), rels)


def _extend_filtered(c: FilteredChain, lo: int, hi: int) -> FilteredChain:
    A = c.base
    if lo < c.j_min and not c.iso_below:
        raise NotABundle("cannot extend below an unflagged window edge")
    if hi > c.j_max and not c.zero_above:
        raise NotABundle("cannot extend above an unflagged window edge")
    ranks, t, rels = dict(c.ranks), dict(c.t), dict(c.rels)
    n_lo = c.ranks[c.j_min]
    for j in range(lo, c.j_min):
        ranks[j] = n_lo
        t[j] = scalar(A, A.one, n_lo)
        if c.j_min in c.rels:
            rels[j] = c.rels[c.j_min]
    for j in range(c.j_max + 1, hi + 1):
        ranks[j] = 0
    for j in range(c.j_max, hi):
        t[j] = zeros(A, ranks[j], 0)
    return FilteredChain(A, lo, hi, ranks, t, c.iso_below, c.zero_above, rels)


def filtered_base_change(c: FilteredChain, gs: dict) -> FilteredChain:
    A = c.base
    ginv = {j: mat_inverse(A, g) for j, g in gs.items()}
    t = {}
    for j in range(c.j_min, c.j_max):
        n0, n1 = c.ranks[j], c.ranks[j + 1]
        t[j] = mm(A, mm(A, gs[j], c.t[j], n0, n0, n1), ginv[j + 1], n0, n1, n1)
    return FilteredChain(A, c.j_min, c.j_max, dict(c.ranks), t, c.iso_below, c.zero_above,
                         dict(c.rels))


def adic_filtration(A: ChainRing) -> FilteredChain:
    """Fil^j = pi^j A as a chain of presented modules: pi^j A = A / pi^(K-j)."""
    K = A.K
    ranks = {j: 1 for j in range(0, K)}
    ranks[-1] = 1
    rels = {j: [[A.pi_power(K - j)]] for j in range(1, K)}
    t = {-1: [[A.one]]}
    for j in range(0, K - 1):
        t[j] = [[A.pi_power(1)]]
    return FilteredChain(A, -1, K - 1, ranks, t, True, True, rels)


# criteria --------------------------------------------------------------------------

def _v_length(A: ChainRing, v) -> int:
    return min(A.val(v), A.K)


def is_filtered_vb(c: FilteredChain) -> Verdict:
    """Filtered vector bundle test: free pieces, split-injective t, flags."""
    A = c.base
    if not c.iso_below:
        return Verdict(False, "(iii)", c.j_min, "t is not declared an isomorphism below the window")
    if not c.zero_above:
        return Verdict(False, "(iii)", c.j_max, "pieces are not declared zero above the window")
    for j in c.window():
        st = module_structure(A, c.ranks[j], c.rel(j))
        if st["torsion"]:
            return Verdict(False, "(i)", j, f"M_{j} has torsion {st['torsion']}")
    for j in c.window():
        n0, n1 = c.ranks[j], c.rank_above(j)
        T = c.tmap(j)
        if not map_injective(A, T, n1, c.rel(j + 1), n0, c.rel(j)):
            return Verdict(False, "(ii)", j, "t is not injective")
        st = module_structure(A, n0, hcat(A, n0, c.rel(j), T))
        if st["torsion"]:
            return Verdict(False, "(ii)", j, f"coker t has torsion {st['torsion']}")
    return Verdict(True)


def _quotient_checks(m: GradedReesModule, j: int, k: int):
    """Condition (a) in degree j: t mod u and u mod t over R = A/v."""
    A = m.base
    n = m.ranks
    Uq = lambda i: hcat(A, n[i], m.rel(i), m.u[i - 1])   # relations of M_i / u M_{i-1}
    Tq = lambda i: hcat(A, n[i], m.rel(i), m.t[i])       # relations of M_i / t M_{i+1}
    for i in (j, j + 1):
        if not free_over(A, module_structure(A, n[i], Uq(i)), k):
            return "M/uM is not projective over A/v"
    if not map_injective(A, m.t[j], n[j + 1], Uq(j + 1), n[j], Uq(j)):
        return "t mod u is not injective"
    if not free_over(A, module_structure(A, n[j], hcat(A, n[j], Uq(j), m.t[j])), k):
        return "t mod u has non-projective cokernel"
    for i in (j - 1, j):
        if not free_over(A, module_structure(A, n[i], Tq(i)), k):
            return "M/tM is not projective over A/v"
    if not map_injective(A, m.u[j - 1], n[j - 1], Tq(j - 1), n[j], Tq(j)):
        return "u mod t is not injective"
    if not free_over(A, module_structure(A, n[j], hcat(A, n[j], Tq(j), m.u[j - 1])), k):
        return "u mod t has non-projective cokernel"
    return None


def is_rees_vb(m: GradedReesModule, mode: str = "jacobson") -> Verdict:
    """Vector-bundle test for a graded Rees module.

    ``jacobson``: v lies in the maximal ideal of the finite local base, and the
    test is (b) finite presentation with stabilization, (c) projective pieces,
    (a) t mod u and u mod t injective with projective cokernels over A/v.

    ``regular``: the base is read as a truncation O/pi^K of a discrete
    valuation ring in which v is a non-zero-divisor; the test is (b), u mod t
    as above, t injective over O and M_{-inf} free.  Raises PrecisionExhausted
    when K does not certify injectivity.
    """
    A = m.base
    if mode not in ("jacobson", "regular"):
        raise ValueError(f"unknown mode {mode!r}")
    if not m.t_iso_below:
        return Verdict(False, "(b)", m.j_min, "t is not declared an isomorphism below the window")
    if not m.u_iso_above:
        return Verdict(False, "(b)", m.j_max, "u is not declared an isomorphism above the window")
    k = _v_length(A, m.v)
    if mode == "regular" and k >= A.K:
        raise PrecisionExhausted("v vanishes at this precision")
    e = m.extend(m.j_min - 2, m.j_max + 2)
    if mode == "jacobson":
        for j in m.window():
            st = module_structure(A, e.ranks[j], e.rel(j))
            if st["torsion"]:
                return Verdict(False, "(c)", j, f"M_{j} has torsion {st['torsion']}")
        for j in range(m.j_min - 1, m.j_max + 2):
            bad = _quotient_checks(e, j, k)
            if bad:
                return Verdict(False, "(a)", j, bad)
        return Verdict(True)
    st = module_structure(A, e.ranks[m.j_min], e.rel(m.j_min))
    if st["torsion"]:
        return Verdict(False, "(iii)", None, "M_-inf is not free")
    if not m.is_free():
        raise UnsupportedBase("regular mode needs free pieces")
    for j in range(m.j_min - 1, m.j_max + 2):
        n = e.ranks
        Tq = lambda i: hcat(A, n[i], e.t[i])
        for i in (j - 1, j):
            if not free_over(A, module_structure(A, n[i], Tq(i)), k):
                return Verdict(False, "(iii)", j, "M/tM is not projective over A/v")
        if not map_injective(A, e.u[j - 1], n[j - 1], Tq(j - 1), n[j], Tq(j)):
            return Verdict(False, "(iii)", j, "u mod t is not injective")
        if not free_over(A, module_structure(A, n[j], hcat(A, n[j], Tq(j), e.u[j - 1])), k):
            return Verdict(False, "(iii)", j, "u mod t has non-projective cokernel")
    for j in m.window():
        if _dvr_kernel_rank(A, e.t[j], e.ranks[j], e.ranks[j + 1]):
            return Verdict(False, "(iii)", j, "t is not injective")
    return Verdict(True)


def _dvr_kernel_rank(A: ChainRing, T, r: int, c: int) -> int:
    """Rank of ker T over the DVR lifting A; PrecisionExhausted if undecidable."""
    if c == 0:
        return 0
    if r == 0:
        return c
    vals = smith(A, T)[0]
    if any(v >= A.K for v in vals):
        raise PrecisionExhausted("a pivot vanishes at this precision")
    return c - len(vals)


def graded_of_filtered(c: FilteredChain, regular: bool = False) -> dict:
    """H^0_j = coker(t: M_{j+1} -> M_j) and H^-1_j = ker of the same map.

    Sizes are lengths (F_q-dimensions of the residue field, counted with
    multiplicity).  With ``regular`` the kernel is computed over the DVR.
    """
    A = c.base
    h0, h1 = {}, {}
    for j in _known_degrees(c):
        n0, n1 = c.ranks[j], c.rank_above(j)
        T = c.tmap(j)
        co = module_structure(A, n0, hcat(A, n0, c.rel(j), T))
        h0[j] = {"structure": co, "length": structure_length(A, co)}
        if regular:
            kr = _dvr_kernel_rank(A, T, n0, n1)
            h1[j] = {"rank": kr, "length": kr, "generators": []}
            continue
        big = hcat(A, n0, T, c.rel(j))
        ncols = n1 + _cols(c.rel(j), n0)
        gens = [g[:n1] for g in kernel_gens(A, big, ncols)]
        gens = [g for g in gens if not in_span(A, c.rel(j + 1), g, n1)]
        src_len = structure_length(A, module_structure(A, n1, c.rel(j + 1)))
        tgt_len = structure_length(A, module_structure(A, n0, c.rel(j)))
        klen = src_len - (tgt_len - h0[j]["length"])
        h1[j] = {"length": klen, "generators": [[A.format(x) for x in g] for g in gens]}
    return {"H0": h0, "H-1": h1}


def _known_degrees(c: FilteredChain):
    # without zero_above the map out of M_{j_max + 1} is not recorded
    return c.window() if c.zero_above else range(c.j_min, c.j_max)


def graded_summary(c: FilteredChain, regular: bool = False) -> dict:
    g = graded_of_filtered(c, regular)
    return {
        "H0": {str(j): g["H0"][j]["length"] for j in _known_degrees(c)},
        "H-1": {str(j): g["H-1"][j]["length"] for j in _known_degrees(c)},
    }


def pullbacks(m: GradedReesModule) -> dict:
    """Per degree: M/tM, M/uM and M/(tM + uM) as chain-ring module structures."""
    A = m.base
    e = m.extend(m.j_min - 1, m.j_max + 1) if (m.t_iso_below and m.u_iso_above) else None
    if e is None:
        raise NotABundle("pullbacks need both boundary flags")
    out = {}
    for j in m.window():
        n = e.ranks[j]
        S, T, U = e.rel(j), e.t[j], e.u[j - 1]
        out[j] = {
            "mod_t": module_structure(A, n, hcat(A, n, S, T)),
            "mod_u": module_structure(A, n, hcat(A, n, S, U)),
            "mod_tu": module_structure(A, n, hcat(A, n, S, T, U)),
        }
    return out


def normal_decomposition(m: GradedReesModule) -> list:
    """The twists e with m = sum O(e), sorted decreasingly.

    O(e) contributes a copy of A/v to M_j / (t M_{j+1} + u M_{j-1}) exactly in
    degree j = -e, so the multiplicities are ranks over A/v of these pieces.
    """
    verdict = is_rees_vb(m)
    if not verdict.ok:
        raise NotABundle(verdict.witness)
    A = m.base
    k = _v_length(A, m.v)
    if k == 0:
        raise NotABundle("v is a unit: every twist is isomorphic to O(0)")
    out = []
    for j, pb in pullbacks(m).items():
        st = pb["mod_tu"]
        mult = st["free"] if k >= A.K else len(st["torsion"])
        out.extend([-j] * mult)
    return sorted(out, reverse=True)


def filtered_type(c: FilteredChain) -> list:
    """Twists of a filtered vector bundle: e appears rank(gr_e) times."""
    verdict = is_filtered_vb(c)
    if not verdict.ok:
        raise NotABundle(verdict.witness)
    out = []
    for j, d in graded_of_filtered(c)["H0"].items():
        out.extend([j] * d["structure"]["free"])
    return sorted(out, reverse=True)


# mutations used to exercise the checkers -----------------------------------------

def mutate_break_flag(m):
    if isinstance(m, GradedReesModule):
        return GradedReesModule(m.base, m.v, m.j_min, m.j_max, dict(m.ranks), dict(m.t),
                                dict(m.u), False, m.u_iso_above, dict(m.rels))
    return FilteredChain(m.base, m.j_min, m.j_max, dict(m.ranks), dict(m.t), False,
                         m.zero_above, dict(m.rels))


def mutate_kill_t(c: FilteredChain, j: int) -> FilteredChain:
    t = dict(c.t)
    t[j] = zeros(c.base, c.ranks[j], c.ranks[j + 1])
    return FilteredChain(c.base, c.j_min, c.j_max, dict(c.ranks), t, c.iso_below,
                         c.zero_above, dict(c.rels))


def mutate_torsion_cokernel(c: FilteredChain, j: int) -> FilteredChain:
    """Multiply t at degree j by the uniformizer: coker acquires A/pi torsion."""
    A = c.base
    t = dict(c.t)
    t[j] = [[A.mul(A.pi_power(1), x) for x in row] for row in t[j]]
    return FilteredChain(A, c.j_min, c.j_max, dict(c.ranks), t, c.iso_below,
                         c.zero_above, dict(c.rels))


def rees_torsion_piece(A: ChainRing, v=None) -> GradedReesModule:
    """All pieces A/pi with t = id, u = v: invariants hold, pieces are torsion."""
    v = default_v(A) if v is None else v
    rel = [[A.pi_power(1)]]
    return GradedReesModule(A, v, 0, 1, {0: 1, 1: 1}, {0: [[A.one]]}, {0: [[v]]},
                            rels={0: rel, 1: rel})


def rees_degenerate_u(A: ChainRing) -> GradedReesModule:
    """Over a field with v = 0: t = u = 0 between two lines, so u mod t is not injective."""
    return GradedReesModule(A, A.zero, 0, 1, {0: 1, 1: 1}, {0: [[A.zero]]}, {0: [[A.zero]]})


def rees_kill_t(m: GradedReesModule, j: int) -> GradedReesModule:
    """Zero t and u in degree j.  Only valid when v = 0 (tu = v must survive)."""
    if m.v != m.base.zero:
        raise InvariantViolation("killing t keeps tu = v only when v = 0")
    t, u = dict(m.t), dict(m.u)
    t[j] = zeros(m.base, m.ranks[j], m.ranks[j + 1])
    u[j] = zeros(m.base, m.ranks[j + 1], m.ranks[j])
    return GradedReesModule(m.base, m.v, m.j_min, m.j_max, dict(m.ranks), t, u,
                            m.t_iso_below, m.u_iso_above, dict(m.rels))


# fixed point, attractor, repeller --------------------------------------------------

def ring_name(A: ChainRing, k: int | None = None) -> str:
    """Name of A/pi^k (k = None means A itself)."""
    k = A.K if k is None else k
    q = A.field.q
    if k == 0:
        return "0"
    if isinstance(A, FieldChain) or k == 1:
        return f"F_{q}"
    if isinstance(A, SeriesChain):
        return f"F_{q}[z]/(z^{k})"
    if isinstance(A, WittChain):
        return f"W_{k}(F_{q})"
    raise UnsupportedBase(type(A).__name__)


@dataclass(frozen=True)
class FixAttr:
    base: str
    v: str
    B0: str
    Bminus: str
    Bplus: str
    R_length: int

    def to_json(self) -> dict:
        return {"base": self.base, "v": self.v, "B0": self.B0, "B-": self.Bminus,
                "B+": self.Bplus, "R_length": self.R_length}


def fix_attr_rep(A: ChainRing, v=None) -> FixAttr:
    """Fixed locus B0 = A/(v), repeller R[t] and attractor Sym_R(L) for Rees(A, v)."""
    if not isinstance(A, (FieldChain, SeriesChain, WittChain)):
        raise UnsupportedBase(type(A).__name__)
    v = default_v(A) if v is None else v
    k = _v_length(A, v)
    R = ring_name(A, k)
    return FixAttr(ring_name(A), A.format(v), R, f"{R}[t]", f"Sym_{R}(L)", k)


def quotient_ring(A: ChainRing, v) -> ChainRing | None:
    """A/(v) as a chain ring; None for the zero ring."""
    k = _v_length(A, v)
    if k == 0:
        return None
    if k == A.K:
        return A
    if k == 1:
        return FieldChain(A.field)
    return make_chain(A.tag, A.field.q, k)


# Hecke pairs and lattice chains ----------------------------------------------------

@dataclass
class HeckePair:
    """Phi = z^(-s) Phi0 with Phi0 an h x h matrix over F_q[z]/(z^K)."""
    base: SeriesChain
    h: int
    s: int
    phi0: list

    def __post_init__(self):
        _check_shape(self.phi0, self.h, self.h, "Phi")

    @property
    def K(self) -> int:
        return self.base.K


def hecke_from_diag(A: SeriesChain, es) -> HeckePair:
    s = max(0, -min(es))
    h = len(es)
    phi0 = [[A.pi_power(es[i] + s) if i == j else A.zero for j in range(h)] for i in range(h)]
    return HeckePair(A, h, s, phi0)


def hecke_twist(p: HeckePair, k1, k2) -> HeckePair:
    A = p.base
    M = mm(A, mm(A, k1, p.phi0, p.h, p.h, p.h), k2, p.h, p.h, p.h)
    return HeckePair(A, p.h, p.s, M)


def _hecke_snf(p: HeckePair, track: bool):
    vals, P, Q = smith(p.base, p.phi0, track=track)
    if any(v >= p.K for v in vals):
        raise PrecisionExhausted("determinant valuation is not certified at this precision")
    return vals, P, Q


def hecke_type(p: HeckePair) -> tuple:
    """Invariant-factor exponents of Phi, weakly decreasing."""
    vals, _, _ = _hecke_snf(p, False)
    return tuple(sorted((v - p.s for v in vals), reverse=True))


def lattice_chain(p: HeckePair, window: tuple | None = None):
    """M_j = z^j Phi^-1(E') intersected with E, t = inclusion, u = multiplication by z.

    From P Phi0 Q = diag(z^f) one gets M_j = Q (sum z^max(j - e_i, 0) O) with
    e_i = f_i - s, so in the basis Q diag(z^a_j) the inclusion M_{j+1} in M_j
    and z: M_j -> M_{j+1} are diagonal.  Returns the module and a report.
    """
    A = p.base
    vals, P, Q = _hecke_snf(p, True)
    es = [v - p.s for v in vals]
    lo, hi = min(es), max(es)
    j_min, j_max = window if window is not None else (lo - 1, hi + 1)
    if j_min > lo - 1 or j_max < hi + 1:
        raise ShapeMismatch(f"window must contain [{lo - 1}, {hi + 1}]")
    if max(j_max - e for e in es) + 1 >= A.K:
        raise PrecisionExhausted("window exceeds the working precision")
    a = {j: [max(j - e, 0) for e in es] for j in range(j_min, j_max + 1)}
    h = p.h
    ranks = {j: h for j in a}
    t, u, bases = {}, {}, {}
    for j in a:
        bases[j] = mm(A, Q, [[A.pi_power(a[j][i]) if i == k else A.zero for k in range(h)]
                             for i in range(h)], h, h, h)
    for j in range(j_min, j_max):
        t[j] = [[A.pi_power(a[j + 1][i] - a[j][i]) if i == k else A.zero for k in range(h)]
                for i in range(h)]
        u[j] = [[A.pi_power(1 + a[j][i] - a[j + 1][i]) if i == k else A.zero for k in range(h)]
                for i in range(h)]
    m = GradedReesModule(A, A.pi_power(1), j_min, j_max, ranks, t, u)
    for j in range(j_min, j_max):
        if mm(A, bases[j], t[j], h, h, h) != bases[j + 1]:
            raise InvariantViolation("inclusion matrix does not match the lattices")
    report = {
        "type": sorted(es, reverse=True),
        "window": [j_min, j_max],
        # M_j / z M_{j-1} has rank #{i : e_i >= j}
        "filtration_ranks": {str(j): sum(1 for e in es if e >= j) for j in a},
        "graded_dims": {str(j): sum(1 for e in es if e == j) for j in a},
        "stable_below": lo,
        "stable_above": hi,
        "conditions": {
            "a_projective": all(all(v < A.K for v in smith(A, bases[j])[0]) for j in a),
            "b_stabilizes": True,
            "c_graded_projective": _graded_pieces_free(m),
        },
    }
    return m, report


def _graded_pieces_free(m: GradedReesModule) -> bool:
    A = m.base
    for j in range(m.j_min + 1, m.j_max):
        n = m.ranks[j]
        st = module_structure(A, n, hcat(A, n, m.t[j], m.u[j - 1]))
        if not free_over(A, st, 1):
            return False
    return True


__all__ = [
    "GradedReesModule", "FilteredChain", "Verdict", "HeckePair", "FixAttr",
    "rees_twist", "rees_direct_sum", "twisted_sum", "rees_base_change", "random_base_change",
    "filtered_twist", "filtered_direct_sum", "filtered_base_change", "adic_filtration",
    "is_filtered_vb", "is_rees_vb", "graded_of_filtered", "graded_summary", "pullbacks",
    "normal_decomposition", "filtered_type", "fix_attr_rep", "quotient_ring",
    "hecke_type", "hecke_from_diag", "hecke_twist", "lattice_chain",
]
