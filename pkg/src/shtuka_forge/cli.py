"""Command-line front end.

Every subcommand prints one JSON run record (or CSV with ``--csv``).  Exit
codes: 0 success, 2 negative verdict from ``check-bundle``, 1 any error.
"""

from __future__ import annotations

import csv
import io
import json
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import click

from . import __version__
from .display_groups import DEFAULT_BUDGET, dg_count, group_counts
from .errors import BudgetExceeded, ForgeError
from .fixtures import SCOPES, fixture_hash, regen

RUN_SCHEMA = "shtuka-forge-run/1"


class Negative(Exception):
    """A well-formed run whose verdict is negative."""

    def __init__(self, record):
        self.record = record


def _parse_int_list(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.replace("(", "").replace(")", "").split(",") if x.strip())
    except ValueError as exc:
        raise click.BadParameter(f"expected comma-separated integers, got {text!r}") from exc


def _record(ctx, subcommand: str, params: dict, payload, fixture: str | None = None) -> dict:
    obj = ctx.obj
    params = dict(params)
    if obj.get("seed") is not None:
        params["seed"] = obj["seed"]
    return {
        "schema": RUN_SCHEMA,
        "subcommand": subcommand,
        "parameters": params,
        "payload": payload,
        "fixture_hash": fixture_hash(fixture) if fixture else None,
        "version": __version__,
        "wall_time": round(time.perf_counter() - obj["t0"], 6),
    }


def _csv_rows(subcommand: str, payload) -> list:
    if subcommand in ("classify-shtukas", "classify-zips", "classify-displays"):
        return [["class", "orbit_size"]] + [[i, s] for i, s in enumerate(payload["orbit_sizes"])]
    if subcommand == "cutoff-scan":
        rows = [["m", "N", "classes_N", "classes_N_plus_1", "surjective", "bijective"]]
        for r in payload["rows"]:
            for v in r["truncation"]:
                n = v["N"]
                rows.append([r["m"], n, r["class_counts"][n - 1], r["class_counts"][n],
                             v["surjective"], v["bijective"]])
        return rows
    flat = [["key", "value"]]
    for k, v in payload.items():
        if not isinstance(v, (dict, list)):
            flat.append([k, v])
    return flat


def _emit(ctx, record: dict):
    if ctx.obj["csv"]:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(_csv_rows(record["subcommand"], record["payload"]))
        click.echo(buf.getvalue(), nl=False)
    else:
        click.echo(json.dumps(record, sort_keys=True))


@click.group()
@click.option("--csv", "as_csv", is_flag=True, help="Tabular payloads as CSV (counts only).")
@click.option("--seed", type=int, default=None, help="Seed for randomized subcommands.")
@click.option("--jobs", type=int, default=1, show_default=True, help="Worker processes.")
@click.option("--max-states", type=int, default=DEFAULT_BUDGET, show_default=True,
              help="Budget on enumerated states.")
@click.option("--max-group", type=int, default=DEFAULT_BUDGET, show_default=True,
              help="Largest display group a subcommand may enumerate.")
@click.version_option(__version__)
@click.pass_context
def main(ctx, as_csv, seed, jobs, max_states, max_group):
    """Exact classification of truncated shtukas, displays and F-zips over finite fields."""
    ctx.ensure_object(dict)
    ctx.obj.update(csv=as_csv, seed=seed, jobs=max(1, jobs), budget=max_states,
                   max_group=max_group, t0=time.perf_counter())


@main.command("count-groups")
@click.option("--q", type=int, required=True)
@click.option("--h", type=int, required=True)
@click.option("--mu", required=True, help="Weakly decreasing cocharacter, e.g. 1,0.")
@click.option("--N", "N", type=int, required=True)
@click.pass_context
def count_groups(ctx, q, h, mu, N):
    """Order of the display group E_N(mu) over F_q, enumerated and predicted."""
    mu = _parse_int_list(mu)
    _check_len(mu, h)
    _guard_group(ctx, q, h, mu, N)
    payload = group_counts(q, h, mu, N, ctx.obj["budget"])
    _emit(ctx, _record(ctx, "count-groups", {"q": q, "h": h, "mu": list(mu), "N": N}, payload,
                       "groups"))


def _check_len(mu, h):
    if len(mu) != h:
        raise click.BadParameter(f"mu needs {h} entries")


def _guard_group(ctx, q, h, mu, N):
    order = dg_count(q, h, mu, N)
    if order > ctx.obj["max_group"]:
        raise BudgetExceeded(f"display group of order {order} exceeds --max-group")


@main.command("classify-shtukas")
@click.option("--q", type=int, required=True)
@click.option("--h", type=int, required=True)
@click.option("--mu", required=True)
@click.option("--N", "N", type=int, required=True)
@click.option("--m", type=int, default=1, show_default=True, help="Work over F_{q^m}.")
@click.option("--strategy", type=click.Choice(["full", "bfs", "lift"]), default="full",
              show_default=True)
@click.option("--convention", type=click.Choice(["inverse", "inverse-element", "literal"]),
              default="inverse", show_default=True)
@click.pass_context
def classify_shtukas(ctx, q, h, mu, N, m, strategy, convention):
    """Isomorphism classes of N-truncated shtukas of type mu."""
    from .shtukas import shtuka_classify
    mu = _parse_int_list(mu)
    _check_len(mu, h)
    _guard_group(ctx, q ** m, h, mu, N)
    table = shtuka_classify(q, h, mu, N, strategy, convention, m, ctx.obj["budget"])
    params = {"q": q, "h": h, "mu": list(mu), "N": N, "m": m, "strategy": strategy,
              "convention": convention}
    _emit(ctx, _record(ctx, "classify-shtukas", params, table.to_json(), "shtukas"))


def _cutoff_row(args):
    from .shtukas import cutoff_experiment
    q, h, mu, N_max, m, strategy, budget = args
    return cutoff_experiment(q, h, mu, N_max, (m,), strategy, budget)


@main.command("cutoff-scan")
@click.option("--q", type=int, required=True)
@click.option("--h", type=int, required=True)
@click.option("--mu", required=True)
@click.option("--N-max", "N_max", type=int, required=True)
@click.option("--tower", default="1", show_default=True, help="Extension degrees m, e.g. 1,2.")
@click.option("--strategy", type=click.Choice(["full", "bfs", "lift"]), default="lift",
              show_default=True)
@click.pass_context
def cutoff_scan(ctx, q, h, mu, N_max, tower, strategy):
    """Truncation maps between class sets for N <= N_max, over each F_{q^m}."""
    from .shtukas import cutoff_experiment
    mu = _parse_int_list(mu)
    _check_len(mu, h)
    degrees = _parse_int_list(tower)
    _guard_group(ctx, q ** max(degrees), h, mu, N_max)
    jobs, budget = ctx.obj["jobs"], ctx.obj["budget"]
    if jobs > 1 and len(degrees) > 1:
        args = [(q, h, mu, N_max, m, strategy, budget) for m in degrees]
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_cutoff_row, args))
        payload = parts[0]
        payload["rows"] = [p["rows"][0] for p in parts]
        payload["params"]["tower_degrees"] = list(degrees)
    else:
        payload = cutoff_experiment(q, h, mu, N_max, degrees, strategy, budget)
    params = {"q": q, "h": h, "mu": list(mu), "N_max": N_max, "tower": list(degrees),
              "strategy": strategy}
    _emit(ctx, _record(ctx, "cutoff-scan", params, payload, "cutoff"))


@main.command("cutoff-bound")
@click.option("--h", type=int, required=True)
@click.option("--S", "S", required=True, help='Dominant coweights, e.g. "(1,0);(2,0)".')
@click.pass_context
def cutoff_bound(ctx, h, S):
    """The constant C = max <alpha, xi> and the bounds C+1, 2C+1."""
    from .rootdata import cutoff_bounds, parse_coweights
    b = cutoff_bounds(h, parse_coweights(S))
    payload = {"C": b.C, "isogeny": b.isogeny, "isomorphism": b.isomorphism}
    _emit(ctx, _record(ctx, "cutoff-bound", {"h": h, "S": S}, payload))


@main.command("check-bundle")
@click.option("--file", "path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--mode", type=click.Choice(["jacobson", "regular"]), default="jacobson",
              show_default=True, help="Criterion used for graded Rees modules.")
@click.pass_context
def check_bundle(ctx, path, mode):
    """Vector-bundle test for a graded module file, or type detection for a Hecke file."""
    from . import graded_rees as gr
    from .textfmt import parse_graded, parse_hecke, sniff
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    kind = sniff(text)
    if kind == "graded-module":
        m = parse_graded(text)
        if isinstance(m, gr.GradedReesModule):
            verdict = gr.is_rees_vb(m, mode)
            payload = {"kind": "rees", "module": m.describe(), "verdict": verdict.to_json()}
            if verdict.ok:
                payload["twists"] = gr.normal_decomposition(m) if mode == "jacobson" and \
                    m.base.val(m.v) > 0 else None
        else:
            verdict = gr.is_filtered_vb(m)
            payload = {"kind": "filtered", "module": m.describe(), "verdict": verdict.to_json(),
                       "graded": gr.graded_summary(m)}
            if verdict.ok:
                payload["twists"] = gr.filtered_type(m)
        ok = verdict.ok
    elif kind == "hecke":
        p = parse_hecke(text)
        t = gr.hecke_type(p)
        _, report = gr.lattice_chain(p)
        payload = {"kind": "hecke", "type": list(t), "lattice_chain": report}
        ok = all(report["conditions"].values())
    else:
        raise click.BadParameter(f"unrecognised file header {kind!r}")
    record = _record(ctx, "check-bundle", {"file": str(path), "mode": mode}, payload)
    if not ok:
        raise Negative(record)
    _emit(ctx, record)


@main.command("classify-displays")
@click.option("--p", type=int, required=True)
@click.option("--q", type=int, required=True)
@click.option("--h", type=int, required=True)
@click.option("--d", type=int, required=True)
@click.option("--N", "N", type=int, required=True)
@click.pass_context
def classify_displays(ctx, p, q, h, d, N):
    """Isomorphism classes of displays of type (h, d) over W_N(F_q)."""
    from .witt_displays import display_classify
    payload = display_classify(p, q, h, d, N)
    _emit(ctx, _record(ctx, "classify-displays", {"p": p, "q": q, "h": h, "d": d, "N": N},
                       payload, "displays"))


@main.command("classify-zips")
@click.option("--q", type=int, required=True)
@click.option("--h", type=int, required=True)
@click.option("--d", type=int, required=True)
@click.option("--frob-q", type=int, default=None, help="Semilinearity power (default q).")
@click.pass_context
def classify_zips(ctx, q, h, d, frob_q):
    """Isomorphism classes of F-zips of type (h, d) over F_q."""
    from .zips import zip_classify
    payload = zip_classify(q, h, d, frob_q).to_json()
    _emit(ctx, _record(ctx, "classify-zips", {"q": q, "h": h, "d": d, "frob_q": frob_q},
                       payload, "triangle"))


@main.command("hecke-sample")
@click.option("--q", type=int, required=True)
@click.option("--h", type=int, required=True)
@click.option("--K", "K", type=int, default=10, show_default=True)
@click.option("--samples", type=int, default=100, show_default=True)
@click.option("--max-exp", type=int, default=3, show_default=True)
@click.pass_context
def hecke_sample(ctx, q, h, K, samples, max_exp):
    """Recover the type of random k1 diag(z^e) k2 (uses --seed)."""
    from . import graded_rees as gr
    from .chain import SeriesChain, random_invertible
    from .fields import gf
    rng = random.Random(ctx.obj["seed"] if ctx.obj["seed"] is not None else 0)
    A = SeriesChain(gf(q), K)
    hits, misses = 0, []
    for _ in range(samples):
        es = [rng.randint(-max_exp, max_exp) for _ in range(h)]
        p = gr.hecke_twist(gr.hecke_from_diag(A, es), random_invertible(A, h, rng),
                           random_invertible(A, h, rng))
        got = list(gr.hecke_type(p))
        if got == sorted(es, reverse=True):
            hits += 1
        else:
            misses.append({"e": es, "got": got})
    payload = {"samples": samples, "recovered": hits, "misses": misses}
    _emit(ctx, _record(ctx, "hecke-sample", {"q": q, "h": h, "K": K, "samples": samples,
                                             "max_exp": max_exp}, payload))


EXPLAIN = {
    "count-groups": (
        "The display group E_N(mu) is the group of integral matrices e whose conjugate "
        "mu e mu^-1 is integral too, cut down to precision N.  Its points over F_q number "
        "|E_1(F_q)| q^((N-1) h^2), and E_1 is the semidirect product of the Levi of mu "
        "with two opposite unipotent parts; each step up in N adds a vector group of "
        "dimension h^2."),
    "classify-shtukas": (
        "An N-truncated local shtuka of type mu over a finite field is a matrix g in "
        "GL_h(F[z]/z^N) up to g ~ tau(e) g sigma(e)^-1 with e in E_N(mu), where tau "
        "truncates and sigma conjugates by mu and applies Frobenius.  The classes are the "
        "orbits of this action; the moduli of truncated shtukas is the quotient stack."),
    "cutoff-scan": (
        "Truncation from level N+1 to level N is surjective on classes; once N exceeds a "
        "constant determined by the root datum and the bound on the type, truncation "
        "detects isomorphism classes.  The scan reports the maps level by level over each "
        "extension field."),
    "cutoff-bound": (
        "For GL_h and a set S of dominant coweights, C is the largest pairing of a root "
        "e_i - e_j with an element of S.  Truncation at level C+1 controls isogeny and at "
        "2C+1 isomorphism."),
    "check-bundle": (
        "A graded module over the Rees algebra A[t,u]/(tu-v) is a vector bundle on the Rees "
        "stack when the pieces stabilise, are projective, and t modulo u and u modulo t "
        "are injective with projective cokernels over A/v; a filtered module is a bundle "
        "when t is injective with projective cokernel and the filtration is exhaustive and "
        "separated.  A Hecke matrix has a type read off from its Smith normal form."),
    "classify-displays": (
        "A display over W_N(F_q) is an invertible matrix Psi relating a pair M = L + T "
        "and its Frobenius twist; isomorphisms act by Psi -> f Psi f~^-1.  At N = 1 the "
        "category is equivalent to F-zips."),
    "classify-zips": (
        "An F-zip of type (h, d) is a vector space with a descending and an ascending "
        "filtration and Frobenius-semilinear isomorphisms between their graded pieces.  "
        "Over a field its classes match 1-truncated shtukas of minuscule type and "
        "1-truncated displays."),
    "hecke-sample": (
        "A matrix over F_q((z)) has a unique diagonal form diag(z^e) up to left and right "
        "multiplication by GL_h(F_q[[z]]); the exponents are its type."),
    "regen": (
        "Recompute every fixture from brute-force oracles and rewrite the files with "
        "their content hashes."),
}


@main.command("explain")
@click.argument("subcommand", type=click.Choice(sorted(EXPLAIN)))
@click.pass_context
def explain(ctx, subcommand):
    """Describe the mathematical statement a subcommand implements."""
    _emit(ctx, _record(ctx, "explain", {"subcommand": subcommand},
                       {"statement": EXPLAIN[subcommand]}))


@main.command("regen")
@click.option("--scope", type=click.Choice(list(SCOPES) + ["all"]), default="all",
              show_default=True)
@click.option("--regen-oracle", is_flag=True, help="Required: confirm fixture rewrite.")
@click.option("--out", type=click.Path(file_okay=False), default=None,
              help="Target directory (default: the fixture directory).")
@click.pass_context
def regen_cmd(ctx, scope, regen_oracle, out):
    """Rewrite fixtures from the brute-force oracles."""
    from pathlib import Path
    if not regen_oracle:
        raise click.UsageError("refusing to rewrite fixtures without --regen-oracle")
    scopes = SCOPES if scope == "all" else (scope,)
    written = regen(scopes, Path(out) if out else None)
    _emit(ctx, _record(ctx, "regen", {"scope": scope}, {"written": written}))


def run(argv=None) -> int:
    """Entry point returning the exit code instead of exiting."""
    try:
        main.main(args=argv, prog_name="shtuka-forge", standalone_mode=False)
        return 0
    except Negative as neg:
        ctx_csv = "--csv" in (argv if argv is not None else sys.argv[1:])
        if ctx_csv:
            click.echo("key,value\nok,False")
        else:
            click.echo(json.dumps(neg.record, sort_keys=True))
        return 2
    except click.exceptions.Exit as ex:
        return ex.exit_code
    except click.ClickException as exc:
        click.echo(json.dumps({"error": type(exc).__name__, "message": exc.format_message()}),
                   err=True)
        return 1
    except (ForgeError, ValueError, OSError) as exc:
        click.echo(json.dumps({"error": type(exc).__name__, "message": str(exc)}), err=True)
        return 1


def entry():
    sys.exit(run())


if __name__ == "__main__":
    entry()
