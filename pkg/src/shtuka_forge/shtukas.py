"""Isomorphism classes of N-truncated local GL_h-shtukas of bounded type.

Classes are orbits of E_N(mu) on GL_h(R_N), R_N = F[z]/(z^N), under
g -> tau(e) g sigma(e)^{-1}.  The convention ``inverse-element`` uses
sigma(e^{-1}) instead (the same action, since sigma is a homomorphism);
``literal`` uses tau(e) g sigma(e), which is not an action, and classes are
then the equivalence classes it generates.  Three strategies compute the orbit partition:

``full``   apply every group element to an unassigned point;
``bfs``    close each orbit under a small generating set;
``lift``   climb one level at a time, using that the kernel of E_{N+1} -> E_N
           acts on each fibre of GL_h(R_{N+1}) -> GL_h(R_N) by translations.
           This never enumerates GL_h(R_N) and is what makes larger fields
           and levels feasible.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import product

from .display_groups import (DEFAULT_BUDGET, DisplayGroup, check_dominant, mat_inv_codes,
                             mat_mul_codes)
from .errors import BudgetExceeded, NotDominant
from .fields import FqField, gf
from .linalg import general_linear, gl_order, nullspace, rref, solve
from .series import TruncSeries, format_series
from .rootdata import cutoff_bounds

STRATEGIES = ("full", "bfs", "lift")
CONVENTIONS = ("inverse", "inverse-element", "literal")


def tower_field(q: int, m: int) -> FqField:
    base = gf(q)
    return FqField(base.p, base.deg * m) if m > 1 else base


@dataclass
class ShtukaSetup:
    q: int
    h: int
    mu: tuple
    N: int
    m: int = 1

    def __post_init__(self):
        self.mu = check_dominant(self.mu)
        if len(self.mu) != self.h:
            raise NotDominant(f"mu must have {self.h} entries")
        self.field = tower_field(self.q, self.m)
        self.group = DisplayGroup(self.field, self.h, self.mu, self.N, frob_q=self.q)
        self.R = self.group.R

    def point_count(self) -> int:
        Q = self.field.q
        return gl_order(Q, self.h) * Q ** ((self.N - 1) * self.h * self.h)

    def points(self, budget: int = DEFAULT_BUDGET):
        if self.point_count() > budget:
            raise BudgetExceeded(f"{self.point_count()} points exceed budget {budget}")
        Q, hh = self.field.q, self.h * self.h
        hi = Q ** (self.N - 1)
        for const in general_linear(self.field, self.h):
            flat = [x for row in const for x in row]
            for highs in product(range(hi), repeat=hh):
                yield tuple(c + Q * x for c, x in zip(flat, highs))

    def key(self, g: tuple) -> tuple:
        return tuple(c for x in g for c in self.R.decode(x))

    def pair(self, e: tuple, convention: str = "inverse") -> tuple:
        G = self.group
        s = G.sigma(e)
        if convention == "inverse":
            s = mat_inv_codes(self.R, s, self.h)
        elif convention == "inverse-element":
            s = G.sigma(G.inv(e))
        elif convention != "literal":
            raise ValueError(f"unknown convention {convention!r}")
        return G.tau(e), s

    def act(self, pair: tuple, g: tuple) -> tuple:
        R, h = self.R, self.h
        return mat_mul_codes(R, mat_mul_codes(R, pair[0], g, h), pair[1], h)

    def generators(self) -> list:
        """Torus generators, elementary unipotents and one z^k unipotent per level and slot."""
        G, F, h, N, Q = self.group, self.field, self.h, self.N, self.field.q
        ident = list(G.identity)
        gens = []
        zeta = F.generator()
        if Q > 2:
            for i in range(h):
                e = ident[:]
                e[i * h + i] = zeta
                gens.append(tuple(e))
        for i in range(h):
            for j in range(h):
                for beta in F.fp_basis():
                    for k in range(N):
                        if k == 0 and i == j:
                            continue
                        e = ident[:]
                        e[i * h + j] += beta * Q**k
                        gens.append(tuple(e))
        return gens

    def format_point(self, g: tuple) -> list:
        h, F, N = self.h, self.field, self.N
        return [[format_series(TruncSeries(F, N, self.R.decode(g[i * h + j]))) for j in range(h)]
                for i in range(h)]


@dataclass
class OrbitTable:
    params: dict
    reps: list  # raw points
    sizes: list
    canonical: bool
    setup: ShtukaSetup = dc_field(repr=False)
    index: dict | None = dc_field(default=None, repr=False)  # point -> class id
    parents: list | None = dc_field(default=None, repr=False)
    stabilizers: list | None = dc_field(default=None, repr=False)

    @property
    def class_count(self) -> int:
        return len(self.reps)

    def to_json(self) -> dict:
        return {
            "params": self.params,
            "class_count": self.class_count,
            "orbit_sizes": list(self.sizes),
            "canonical_representatives": self.canonical,
            "representatives": [self.setup.format_point(g) for g in self.reps],
        }

    def partition(self) -> list:
        """Orbits as sorted tuples of points (full/bfs only)."""
        if self.index is None:
            raise ValueError("partition not recorded by this strategy")
        groups: dict = {}
        for g, c in self.index.items():
            groups.setdefault(c, []).append(g)
        return sorted(tuple(sorted(v)) for v in groups.values())


def _finish(setup, params, orbits, canonical=True):
    order = sorted(range(len(orbits)), key=lambda c: setup.key(orbits[c][0]))
    index, reps, sizes = {}, [], []
    for new, c in enumerate(order):
        rep, members = orbits[c]
        reps.append(rep)
        sizes.append(len(members))
        for g in members:
            index[g] = new
    return OrbitTable(params, reps, sizes, canonical, setup, index=index)


def _classify_full(setup, convention, budget):
    pts = sorted(setup.points(budget), key=setup.key)
    if setup.group.order() * len(pts) > budget * 50 and convention == "literal":
        raise BudgetExceeded("literal convention closure too large")
    pairs = [setup.pair(e, convention) for e in setup.group.elements(budget)]
    seen: set = set()
    orbits = []
    for g in pts:
        if g in seen:
            continue
        if convention != "literal":
            members = {setup.act(pr, g) for pr in pairs}
        else:
            members = _closure(setup, g, pairs)
        seen |= members
        orbits.append((g, members))
    return orbits


def _closure(setup, g, pairs):
    members, frontier = {g}, [g]
    while frontier:
        nxt = []
        for x in frontier:
            for pr in pairs:
                y = setup.act(pr, x)
                if y not in members:
                    members.add(y)
                    nxt.append(y)
        frontier = nxt
    return members


def _classify_bfs(setup, convention, budget):
    pts = sorted(setup.points(budget), key=setup.key)
    pairs = [setup.pair(e, convention) for e in setup.generators()]
    seen: set = set()
    orbits = []
    for g in pts:
        if g in seen:
            continue
        members = _closure(setup, g, pairs)
        seen |= members
        orbits.append((g, members))
    return orbits


# lifting strategy -----------------------------------------------------------------

def _digits(F: FqField, a: int) -> list:
    return F._digits(a)


def _level_one(setup, budget):
    orbits = _classify_full(setup, "inverse", budget)
    elems = list(setup.group.elements(budget))
    pairs = [setup.pair(e) for e in elems]
    out = []
    for rep, members in sorted(orbits, key=lambda o: setup.key(o[0])):
        stab = [e for e, pr in zip(elems, pairs) if setup.act(pr, rep) == rep]
        out.append((rep, stab, None))
    return out


def _lift_once(prev: ShtukaSetup, nxt: ShtukaSetup, classes):
    """Classes at level N+1 from (rep, stabiliser) data at level N."""
    F, h, N, Q = nxt.field, nxt.h, prev.N, nxt.field.q
    Fp = gf(F.p)
    G1 = nxt.group
    top = Q**N
    n = h * h * F.deg
    ident = G1.identity

    def topvec(x):
        out = []
        for c in x:
            out.extend(_digits(F, c // top))
        return out

    def fiber_point(base, vec):
        return tuple(c + F._undigits(vec[k * F.deg:(k + 1) * F.deg]) * top for k, c in enumerate(base))

    kernel_basis = []
    for pos in range(h * h):
        for b in range(F.deg):
            e = list(ident)
            e[pos] += F.p**b * top
            kernel_basis.append(tuple(e))
    kernel_pairs = [nxt.pair(k) for k in kernel_basis]

    result = []
    for parent, (g, stab, _) in enumerate(classes):
        gt = g  # the zero-padded lift has the same codes
        D_cols = [topvec(nxt.act(pr, gt)) for pr in kernel_pairs]
        D = tuple(tuple(D_cols[c][r] for c in range(n)) for r in range(n))
        W, wpiv = rref(Fp, [tuple(col) for col in D_cols])
        Kg = nullspace(Fp, D)

        def reduce(vec):
            v = list(vec)
            for row, pc in zip(W, wpiv):
                if v[pc]:
                    f = v[pc]
                    v = [Fp.sub(x, Fp.mul(f, y)) for x, y in zip(v, row)]
            return tuple(v)

        free = [i for i in range(n) if i not in wpiv]
        cosets = []
        for vals in product(range(F.p), repeat=len(free)):
            v = [0] * n
            for i, x in zip(free, vals):
                v[i] = x
            cosets.append(tuple(v))
        spairs = [nxt.pair(s) for s in stab]

        def move(pr, vec):
            return reduce(topvec(nxt.act(pr, fiber_point(gt, vec))))

        assigned: set = set()
        for X in cosets:
            if X in assigned:
                continue
            orbit = {move(pr, X) for pr in spairs}
            assigned |= orbit
            rep = fiber_point(gt, X)
            new_stab = []
            for s, pr in zip(stab, spairs):
                w = topvec(nxt.act(pr, rep))
                if reduce(w) != X:
                    continue
                target = tuple(Fp.sub(x, y) for x, y in zip(X, w))
                k0 = solve(Fp, D, target)
                for combo in product(range(F.p), repeat=len(Kg)):
                    kv = list(k0)
                    for c, vec in zip(combo, Kg):
                        if c:
                            kv = [Fp.add(x, Fp.mul(c, y)) for x, y in zip(kv, vec)]
                    k = list(ident)
                    for pos in range(h * h):
                        k[pos] += F._undigits(kv[pos * F.deg:(pos + 1) * F.deg]) * top
                    new_stab.append(G1.mul(tuple(k), s))
            result.append((rep, new_stab, parent))
    return result


def lift_tower(q, h, mu, N_top, m=1, budget=DEFAULT_BUDGET):
    """Class data (rep, stabiliser, parent index) at every level 1..N_top."""
    setups = [ShtukaSetup(q, h, mu, n, m) for n in range(1, N_top + 1)]
    levels = [_level_one(setups[0], budget)]
    for n in range(1, N_top):
        levels.append(_lift_once(setups[n - 1], setups[n], levels[-1]))
    return setups, levels


def _lift_table(setup, params, budget):
    setups, levels = lift_tower(setup.q, setup.h, setup.mu, setup.N, setup.m, budget)
    data = levels[-1]
    order = setup.group.order()
    return OrbitTable(params, [d[0] for d in data], [order // len(d[1]) for d in data], False,
                      setup, parents=[d[2] for d in data], stabilizers=[d[1] for d in data])


def shtuka_classify(q: int, h: int, mu, N: int, strategy: str = "full", convention: str = "inverse",
                    m: int = 1, budget: int = DEFAULT_BUDGET) -> OrbitTable:
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    setup = ShtukaSetup(q, h, tuple(mu), N, m)
    params = {"q": q, "h": h, "mu": list(setup.mu), "N": N, "m": m, "strategy": strategy,
              "convention": convention}
    if strategy == "lift":
        if convention != "inverse":
            raise ValueError("the lift strategy uses the inverse convention")
        return _lift_table(setup, params, budget)
    run = _classify_full if strategy == "full" else _classify_bfs
    return _finish(setup, params, run(setup, convention, budget))


def shtuka_truncation_analysis(q: int, h: int, mu, N: int, strategy: str = "full", m: int = 1,
                               budget: int = DEFAULT_BUDGET) -> dict:
    """How classes at level N+1 map to classes at level N."""
    if strategy == "lift":
        setups, levels = lift_tower(q, h, mu, N + 1, m, budget)
        parents = [d[2] for d in levels[-1]]
        n_low = len(levels[-2])
    else:
        low = shtuka_classify(q, h, mu, N, strategy, m=m, budget=budget)
        high = shtuka_classify(q, h, mu, N + 1, strategy, m=m, budget=budget)
        cut = low.setup.field.q**N
        parents = [low.index[tuple(x % cut for x in g)] for g in high.reps]
        n_low = low.class_count
    fibers = [parents.count(c) for c in range(n_low)]
    return {
        "N": N,
        "classes_low": n_low,
        "classes_high": len(parents),
        "surjective": all(f > 0 for f in fibers),
        "injective": all(f <= 1 for f in fibers),
        "fiber_sizes": fibers,
    }


def cutoff_experiment(q: int, h: int, mu, N_max: int, tower_degrees=(1,), strategy: str = "lift",
                      budget: int = DEFAULT_BUDGET) -> dict:
    """Smallest N <= N_max where truncation N+1 -> N is bijective on classes, per field F_{q^m}."""
    mu = check_dominant(mu)
    rows = []
    for m in tower_degrees:
        if strategy == "lift":
            setups, levels = lift_tower(q, h, mu, N_max + 1, m, budget)
            counts = [len(lv) for lv in levels]
            verdicts = []
            for n in range(1, N_max + 1):
                parents = [d[2] for d in levels[n]]
                fib = [parents.count(c) for c in range(len(levels[n - 1]))]
                verdicts.append({"N": n, "surjective": all(f > 0 for f in fib),
                                 "bijective": all(f == 1 for f in fib), "fiber_sizes": fib})
        else:
            counts, verdicts = [], []
            for n in range(1, N_max + 1):
                a = shtuka_truncation_analysis(q, h, mu, n, strategy, m, budget)
                if not counts:
                    counts.append(a["classes_low"])
                counts.append(a["classes_high"])
                verdicts.append({"N": n, "surjective": a["surjective"],
                                 "bijective": a["surjective"] and a["injective"],
                                 "fiber_sizes": a["fiber_sizes"]})
        cutoff = next((v["N"] for v in verdicts if v["bijective"]), None)
        rows.append({"m": m, "field_order": q**m, "class_counts": counts, "truncation": verdicts,
                     "cutoff": cutoff})
    b = cutoff_bounds(h, [mu])
    return {
        "params": {"q": q, "h": h, "mu": list(mu), "N_max": N_max, "tower_degrees": list(tower_degrees),
                   "strategy": strategy},
        "rows": rows,
        "bounds": {"C": b.C, "isogeny": b.isogeny, "isomorphism": b.isomorphism},
    }
