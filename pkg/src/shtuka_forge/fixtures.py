"""Oracle fixtures: JSON files with a content hash, regenerated only on request.

Each file holds ``{"schema", "name", "data", "sha256"}`` where the hash is
taken over the canonical JSON of ``data``.  ``SHTUKA_FORGE_FIXTURES`` points
at an alternative directory.
"""

from __future__ import annotations

import hashlib
import json
import os
from itertools import product
from pathlib import Path

from . import oracles
from .errors import BudgetExceeded, InvariantViolation

SCHEMA = "shtuka-forge-fixture/1"
DEFAULT_DIR = Path(__file__).parent / "fixtures" / "v1"
SCOPES = ("witt", "groups", "triangle", "shtukas", "cutoff", "displays", "hecke")


def fixture_dir() -> Path:
    env = os.environ.get("SHTUKA_FORGE_FIXTURES")
    return Path(env) if env else DEFAULT_DIR


def canonical(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def digest(data) -> str:
    return hashlib.sha256(canonical(data).encode()).hexdigest()


def render(name: str, data) -> str:
    doc = {"schema": SCHEMA, "name": name, "data": data, "sha256": digest(data)}
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def load(name: str, directory: Path | None = None) -> dict:
    path = (directory or fixture_dir()) / f"{name}.json"
    doc = json.loads(path.read_text(encoding="utf-8"))
    if doc.get("schema") != SCHEMA:
        raise InvariantViolation(f"{path}: unknown schema {doc.get('schema')!r}")
    if digest(doc["data"]) != doc["sha256"]:
        raise InvariantViolation(f"{path}: fixture hash mismatch")
    return doc["data"]


def fixture_hash(name: str, directory: Path | None = None) -> str | None:
    path = (directory or fixture_dir()) / f"{name}.json"
    if not path.exists():
        return None
    return json.loads(path.read_text(encoding="utf-8"))["sha256"]


# generators ------------------------------------------------------------------------

def _witt_tables(p: int, modulus, N: int) -> dict:
    size = p ** (len(modulus) - 1)
    elems = list(product(range(size), repeat=N))
    add = [list(oracles.ghost_witt(p, modulus, "add", a, b)) for a in elems for b in elems]
    mul = [list(oracles.ghost_witt(p, modulus, "mul", a, b)) for a in elems for b in elems]
    return {"p": p, "modulus": list(modulus), "N": N, "elements": [list(e) for e in elems],
            "add": add, "mul": mul}


def gen_witt() -> dict:
    tables = []
    for N in (1, 2, 3):
        tables.append(_witt_tables(2, (0, 1), N))      # F_2 (modulus x)
        tables.append(_witt_tables(2, (0, 0, 1), N))   # F_2[x]/(x^2)
        tables.append(_witt_tables(3, (0, 1), N))      # F_3
    zmod = []
    for p in (2, 3):
        for N in (1, 2, 3):
            elems = list(product(range(p), repeat=N))
            zmod.append({"p": p, "N": N,
                         "map": [[list(e), oracles.zmod_of_witt(p, N, e)] for e in elems]})
    return {"tables": tables, "zmod": zmod}


GROUP_CONFIGS = [(2, (1, 0), 2), (2, (1, 0), 3), (3, (1, 1, 0), 2)]


def gen_groups() -> dict:
    rows = []
    for h, mu, q in GROUP_CONFIGS:
        rows.append({"h": h, "mu": list(mu), "q": q,
                     "order": {str(N): oracles.group_order_oracle(q, h, mu, N) for N in (1, 2)},
                     "kernel": oracles.kernel_order_oracle(q, h, mu, 2)})
    return {"rows": rows}


TRIANGLE = [(2, 1, 2), (2, 1, 3), (3, 1, 2)]


def gen_triangle() -> dict:
    rows = []
    for h, d, q in TRIANGLE:
        mu = tuple([1] * d + [0] * (h - d))
        zips = oracles.zip_set_oracle(q, h, d)
        disp = oracles.display_orbits_zmod(q, h, d, 1)
        sht = oracles.shtuka_orbits_oracle(q, h, mu, 1)
        rows.append({
            "h": h, "d": d, "q": q,
            "shtukas": {"class_count": len(sht), "orbit_sizes": sorted(len(o) for o in sht),
                        "burnside": oracles.shtuka_count_burnside(q, h, mu, 1)},
            "zips": {"class_count": zips["class_count"], "orbit_sizes": zips["orbit_sizes"]},
            "displays": {"class_count": disp["class_count"], "orbit_sizes": disp["orbit_sizes"]},
        })
    return {"rows": rows, "zip_round_trip": [_zip_round_trip(q, h, d) for h, d, q in ROUND_TRIP]}


ROUND_TRIP = [(2, 1, 2), (2, 1, 3), (2, 1, 4), (3, 1, 2)]


def _zip_round_trip(q: int, h: int, d: int) -> dict:
    """Whether shtuka -> zip -> shtuka is the identity on classes, using oracle orbits."""
    from .fields import gf
    from .linalg import matfrob
    from .zips import shtuka1_to_zip, zip_to_shtuka1
    F = gf(q)
    mu = tuple([1] * d + [0] * (h - d))
    cls = {}
    for i, orbit in enumerate(oracles.shtuka_orbits_oracle(q, h, mu, 1)):
        for g in orbit:
            cls[tuple(tuple(x[0] for x in row) for row in g)] = i
    fixed = identity = frob_p = 0
    for g, i in cls.items():
        back = zip_to_shtuka1(shtuka1_to_zip(g, mu, F))
        fixed += back == g
        identity += cls[back] == i
        frob_p += cls[back] == cls[matfrob(F, g, F.p)]
    return {"q": q, "h": h, "d": d, "points": len(cls), "pointwise_fixed": fixed,
            "class_preserved": identity, "matches_p_frobenius_class": frob_p}


def _orbit_json(orbits) -> dict:
    return {"class_count": len(orbits), "orbit_sizes": [len(o) for o in orbits],
            "representatives": [[[list(x) for x in row] for row in o[0]] for o in orbits]}


def gen_shtukas() -> dict:
    counts = []
    for q, m, levels in ((2, 1, (1, 2, 3, 4)), (3, 1, (1, 2)), (2, 2, (1, 2))):
        for N in levels:
            counts.append({"q": q, "m": m, "h": 2, "mu": [1, 0], "N": N,
                           "class_count": oracles.shtuka_count_burnside(q, 2, (1, 0), N, m)})
    partitions = []
    for N in (1, 2):
        inv = oracles.shtuka_orbits_oracle(2, 2, (1, 0), N)
        lit = oracles.shtuka_orbits_oracle(2, 2, (1, 0), N, literal=True)
        partitions.append({"N": N, "inverse": _orbit_json(inv),
                           "literal": {"class_count": len(lit),
                                       "orbit_sizes": [len(o) for o in lit]}})
    fibers = [dict(oracles.shtuka_fibers_oracle(2, 2, (1, 0), N), N=N) for N in (1, 2)]
    return {"counts": counts, "partitions": partitions, "fibers": fibers}


def gen_cutoff() -> dict:
    from .shtukas import cutoff_experiment
    table = cutoff_experiment(2, 2, (1, 0), 3, (1, 2))
    checks = []
    for row in table["rows"]:
        m = row["m"]
        feasible = 4 if m == 1 else 2
        for N, c in enumerate(row["class_counts"], start=1):
            if N <= feasible:
                b = oracles.shtuka_count_burnside(2, 2, (1, 0), N, m)
                if b != c:
                    raise InvariantViolation(f"cutoff table disagrees with Burnside at m={m}, N={N}")
                checks.append({"m": m, "N": N, "burnside": b})
    for N in (1, 2):
        fib = oracles.shtuka_fibers_oracle(2, 2, (1, 0), N)["fiber_sizes"]
        if fib != table["rows"][0]["truncation"][N - 1]["fiber_sizes"]:
            raise InvariantViolation(f"cutoff fibers disagree with the set oracle at N={N}")
        checks.append({"m": 1, "N": N, "fibers": fib})
    return {"table": table, "oracle_checks": checks}


def gen_displays() -> dict:
    rows = []
    for q, h, d, N in ((2, 2, 1, 1), (3, 2, 1, 1), (2, 3, 1, 1), (2, 2, 1, 2)):
        r = oracles.display_orbits_zmod(q, h, d, N)
        rows.append({"q": q, "h": h, "d": d, "N": N, "class_count": r["class_count"],
                     "orbit_sizes": r["orbit_sizes"]})
    iso = oracles.displays_isomorphic_zmod(2, 1, 1, [[0, 1], [1, 0]], [[1, 0], [0, 1]])
    return {"rows": rows, "swap_vs_identity_isomorphic": iso}


def gen_hecke() -> dict:
    K = 10

    def z(k):
        return [1 if i == k else 0 for i in range(K)]

    zero = [0] * K
    cases = {
        "diag(z^2,1)": (0, [[z(2), zero], [zero, z(0)]]),
        "antidiag(z,z^3)": (0, [[zero, z(1)], [z(3), zero]]),
        "identity3": (0, [[z(0), zero, zero], [zero, z(0), zero], [zero, zero, z(0)]]),
        "laurent": (1, [[z(0), z(2)], [zero, z(4)]]),
    }
    out = []
    for name, (s, M) in cases.items():
        t = oracles.hecke_type_oracle(2, K, s, [[tuple(x) for x in row] for row in M])
        out.append({"name": name, "q": 2, "K": K, "s": s, "phi0": M, "type": list(t)})
    return {"cases": out}


GENERATORS = {
    "witt": gen_witt, "groups": gen_groups, "triangle": gen_triangle, "shtukas": gen_shtukas,
    "cutoff": gen_cutoff, "displays": gen_displays, "hecke": gen_hecke,
}


def regen(scopes=SCOPES, directory: Path | None = None) -> dict:
    """Rerun the oracles for ``scopes`` and rewrite their fixture files."""
    directory = directory or fixture_dir()
    directory.mkdir(parents=True, exist_ok=True)
    written = {}
    for scope in scopes:
        if scope not in GENERATORS:
            raise BudgetExceeded(f"unknown fixture scope {scope!r}")
        text = render(scope, GENERATORS[scope]())
        (directory / f"{scope}.json").write_text(text, encoding="utf-8")
        written[scope] = json.loads(text)["sha256"]
    return written


__all__ = ["load", "regen", "render", "digest", "fixture_dir", "fixture_hash", "SCOPES"]
