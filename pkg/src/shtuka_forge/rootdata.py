"""Root-datum constant C for GL_h and the truncation bounds derived from it."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NotDominant


def dominance_check(mu) -> bool:
    mu = tuple(mu)
    return all(a >= b for a, b in zip(mu, mu[1:]))


def roots(h: int) -> list[tuple[int, int]]:
    """Roots e_i - e_j of GL_h as index pairs (i, j), i != j."""
    return [(i, j) for i in range(h) for j in range(h) if i != j]


@dataclass(frozen=True)
class Bounds:
    C: int
    isogeny: int
    isomorphism: int


def root_constant(h: int, S) -> int:
    """max over roots alpha = e_i - e_j and xi in S of <alpha, xi> = xi_i - xi_j."""
    S = [tuple(int(x) for x in xi) for xi in S]
    if not S:
        raise ValueError("S must be non-empty")
    for xi in S:
        if len(xi) != h:
            raise NotDominant(f"{xi} does not have {h} entries")
        if not dominance_check(xi):
            raise NotDominant(f"{xi} is not dominant")
    if h == 1:
        return 0
    return max(xi[i] - xi[j] for xi in S for i, j in roots(h))


def cutoff_bounds(h: int, S) -> Bounds:
    C = root_constant(h, S)
    return Bounds(C, C + 1, 2 * C + 1)


def parse_coweights(text: str) -> list[tuple[int, ...]]:
    """'(1,0);(2,0)' -> [(1, 0), (2, 0)]."""
    out = []
    for part in text.split(";"):
        part = part.strip().strip("()")
        if part:
            out.append(tuple(int(x) for x in part.split(",")))
    return out
