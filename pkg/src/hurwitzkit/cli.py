"""Command-line front end.

Every command prints one JSON document (sorted keys) to stdout or to
``--out``.  Exit status is 0 for an exact answer, 2 when the answer is
partial (a cap was hit or a search stayed undecided) and 1 on error.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import click

from . import __version__
from .ambiguity import PLATEAU_TUPLE_CAP, ambiguity_report
from .cache import ResultCache, digest
from .cgraph import EquippedGroup, build_cgraph, prune_free_factors, threshold_T1, validate_cgraph
from .enumeration import DEFAULT_TUPLE_CAP, enumerate_classes
from .errors import CapExceeded, HurwitzKitError, NotAmple, Undecided
from .facsemi import chi_coefficients, rational_tail_check
from .io import load_equipment, parse_tau, parse_word
from .wordproblem import DEFAULT_UNIVERSE_CAP, CGroupSolver, refine_partition, tilde_group

SCHEMA_VERSION = 1

DEFAULT_CAPS = {"orbit": DEFAULT_TUPLE_CAP, "tuples": DEFAULT_TUPLE_CAP, "universe": DEFAULT_UNIVERSE_CAP,
                "rounds": 64, "pad": 4}


class Partial(Exception):
    """Carries a result that is valid but not exact."""

    def __init__(self, payload: dict):
        super().__init__("partial result")
        self.payload = payload


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _envelope(command: str, result: dict, certified: bool) -> dict:
    return {"schema_version": SCHEMA_VERSION, "tool_version": __version__, "command": command,
            "certified": certified, **result}


def _load_config(path: str | None) -> dict:
    cfg = {"caps": dict(DEFAULT_CAPS), "threads": 1}
    if path:
        raw = json.loads(Path(path).read_text())
        cfg["caps"].update(raw.get("caps", {}))
        cfg["threads"] = raw.get("threads", 1)
    for k, v in cfg["caps"].items():
        if not isinstance(v, int) or v < 1:
            raise click.UsageError(f"cap {k!r} must be a positive integer")
    return cfg


def _run(ctx: click.Context, command: str, body) -> None:
    """Run ``body() -> (result, certified)``, print, and exit with the matching status."""
    out = ctx.obj["out"]
    try:
        result, certified = body()
    except Partial as exc:
        _emit(_envelope(command, exc.payload, False), out)
        ctx.exit(2)
    except (Undecided, CapExceeded) as exc:
        _emit(_envelope(command, {"error": type(exc).__name__, "message": str(exc)}, False), out)
        ctx.exit(2)
    except (HurwitzKitError, OSError, ValueError) as exc:
        click.echo(json.dumps({"error": type(exc).__name__, "message": str(exc)}, sort_keys=True), err=True)
        ctx.exit(1)
    _emit(_envelope(command, result, certified), out)
    ctx.exit(0 if certified else 2)


def _equipped(spec_path: str) -> tuple[EquippedGroup, str]:
    spec = load_equipment(spec_path)
    eg = spec.load()
    return eg, eg.digest_source()


@click.group()
@click.version_option(__version__)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write JSON here instead of stdout.")
@click.option("--cache-dir", type=click.Path(file_okay=False), default=None,
              help="Result cache directory (default: $HURWITZKIT_CACHE; unset disables caching).")
@click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON file with default caps and thread count.")
@click.pass_context
def main(ctx: click.Context, out, cache_dir, config):
    """Factorizations in finite groups: C-graphs, Hurwitz classes and the ambiguity index."""
    ctx.ensure_object(dict)
    ctx.obj.update(out=out, cache=ResultCache(cache_dir), config=_load_config(config))


@main.command()
@click.argument("spec", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def validate(ctx, spec):
    """Check the C-graph conditions for an equipment file."""

    def body():
        eg, _ = _equipped(spec)
        gamma = build_cgraph(eg)
        rep = validate_cgraph(gamma)
        vp = gamma.vertex_period
        constant = all(len({int(vp[v]) for v in comp}) == 1 for comp in gamma.components)
        result = rep.to_json()
        result["periods_component_constant"] = constant
        result["generating"] = eg.generates()
        if not (rep.ok and constant):
            raise HurwitzKitError("C-graph conditions violated: " + json.dumps(result, sort_keys=True))
        return result, True

    _run(ctx, "validate", body)


@main.command()
@click.argument("spec", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def cgraph(ctx, spec):
    """Print the C-graph: vertices, components, periods and action tables."""

    def body():
        eg, _ = _equipped(spec)
        gamma = build_cgraph(eg)
        result = gamma.to_json()
        try:
            result["T1"] = threshold_T1(gamma)
        except NotAmple:
            result["T1"] = None
        return result, True

    _run(ctx, "cgraph", body)


@main.command()
@click.argument("spec", type=click.Path(exists=True, dir_okay=False))
@click.option("--tau", required=True, help="Comma-separated counts per class, e.g. 1,1,1.")
@click.option("--product", default="identity", show_default=True, help="Target product in cycle notation.")
@click.option("--require-generating/--any-subgroup", default=False, show_default=True)
@click.option("--cap-orbit", type=int, default=None, help="Largest move graph (tuples) to build.")
@click.option("--cap-tuples", type=int, default=None, help="Largest tuple list to build.")
@click.option("--threads", type=int, default=None)
@click.pass_context
def orbits(ctx, spec, tau, product, require_generating, cap_orbit, cap_tuples, threads):
    """Count Hurwitz classes of product-constrained tuples of a given type."""
    cfg = ctx.obj["config"]
    cap = min(cap_tuples or cfg["caps"]["tuples"], cap_orbit or cfg["caps"]["orbit"])
    threads = threads or cfg["threads"]

    def body():
        eg, source = _equipped(spec)
        t = parse_tau(tau)
        target = eg.group.parse_element(product)
        key = digest("orbits", source, t, product, require_generating, cap)
        cache = ctx.obj["cache"]
        hit = cache.get(key)
        if hit is None:
            res = enumerate_classes(eg, t, target, require_generating, cap_tuples=cap, threads=threads)
            fmt = eg.group.format
            hit = {"tau": list(t), "product": fmt(target), "require_generating": require_generating,
                   "count": res.count, "capped": res.capped, "detail": res.detail,
                   "representatives": [[fmt(g) for g in rep] for rep in res.representatives],
                   "orbit_sizes": list(res.orbit_sizes), "n_tuples": res.n_tuples,
                   "n_orbits_total": res.n_orbits_total}
            if not res.capped:
                cache.put(key, hit)
        if hit["capped"]:
            raise Partial(hit)
        return hit, True

    _run(ctx, "orbits", body)


@main.command()
@click.argument("spec", type=click.Path(exists=True, dir_okay=False))
@click.option("--max-length", type=int, required=True, help="Largest total type length.")
@click.option("--tail/--no-tail", default=False, help="Check the periodic tail (single class only).")
@click.option("--cap-tuples", type=int, default=None)
@click.pass_context
def chi(ctx, spec, max_length, tail, cap_tuples):
    """Coefficients of the generating function of generating class counts."""
    cap = cap_tuples or ctx.obj["config"]["caps"]["tuples"]

    def body():
        eg, source = _equipped(spec)
        key = digest("chi", source, max_length, cap)
        cache = ctx.obj["cache"]
        hit = cache.get(key)
        if hit is None:
            coeffs = chi_coefficients(eg, max_length, cap_tuples=cap)
            hit = {"max_length": max_length,
                   "coefficients": [{"tau": list(t), "count": r.count, "capped": r.capped}
                                    for t, r in sorted(coeffs.items())]}
            if eg.m == 1:
                hit["h"] = [[t[0], r.count] for t, r in sorted(coeffs.items())]
            cache.put(key, hit)
        capped = any(c["capped"] for c in hit["coefficients"])
        if tail and eg.m == 1 and not capped:
            from .ambiguity import ambiguity_via_commutator

            gamma = build_cgraph(eg)
            a = ambiguity_via_commutator(eg).value
            h = dict(hit["h"])
            rep = rational_tail_check(h, gamma.periods[0], gamma.sizes[0], a)
            hit = dict(hit, tail={"ok": rep.ok, "threshold": rep.threshold, "period": rep.period,
                                  "minimal_period": rep.minimal_period, "residues": list(rep.residues),
                                  "a": a, "detail": rep.detail})
        if capped:
            raise Partial(hit)
        return hit, True

    _run(ctx, "chi", body)


@main.command()
@click.argument("spec", type=click.Path(exists=True, dir_okay=False))
@click.option("--method", type=click.Choice(["partition", "commutator", "orbits", "all"]), default="all",
              show_default=True)
@click.option("--cap-tuples", type=int, default=PLATEAU_TUPLE_CAP, show_default=True,
              help="Tuple cap per plateau sample.")
@click.option("--cap-universe", type=int, default=None)
@click.pass_context
def ambiguity(ctx, spec, method, cap_tuples, cap_universe):
    """Compute the ambiguity index by one or all methods."""
    methods = ("partition", "commutator", "orbits") if method == "all" else (method,)
    universe = cap_universe or ctx.obj["config"]["caps"]["universe"]

    def body():
        eg, source = _equipped(spec)
        key = digest("ambiguity", source, methods, cap_tuples, universe)
        cache = ctx.obj["cache"]
        hit = cache.get(key)
        if hit is None:
            hit = ambiguity_report(eg, methods, cap_tuples=cap_tuples, universe_cap=universe).to_json()
            cache.put(key, hit)
        if not hit["methodsAgree"]:
            raise HurwitzKitError("methods disagree: " + json.dumps(hit["perMethod"], sort_keys=True, default=str))
        if hit["value"] is None:
            raise Partial(hit)
        return {k: v for k, v in hit.items() if k != "certified"}, True

    _run(ctx, "ambiguity", body)


@main.command()
@click.argument("spec", type=click.Path(exists=True, dir_okay=False))
@click.argument("word1")
@click.argument("word2")
@click.pass_context
def wordeq(ctx, spec, word1, word2):
    """Decide equality of two positive words in the C-group.

    Words are whitespace-separated vertex indices or elements of O in
    cycle notation; use "" for the empty word.
    """

    def body():
        eg, _ = _equipped(spec)
        gamma = build_cgraph(eg)
        w1, w2 = parse_word(word1, gamma), parse_word(word2, gamma)
        solver = CGroupSolver(gamma, universe_cap=ctx.obj["config"]["caps"]["universe"])
        i1, i2 = solver.invariants(w1), solver.invariants(w2)
        as_list = lambda inv: {"free_counts": list(inv[0]), "component_counts": list(inv[1]), "tilde_element": inv[2]}
        return {"equal": i1 == i2, "word1": w1, "word2": w2,
                "invariants1": as_list(i1), "invariants2": as_list(i2)}, True

    _run(ctx, "wordeq", body)


@main.command()
@click.argument("spec", type=click.Path(exists=True, dir_okay=False))
@click.option("--strategy", type=click.Choice(["auto", "literal", "letters"]), default="auto", show_default=True)
@click.option("--cap-universe", type=int, default=None)
@click.pass_context
def partition(ctx, spec, strategy, cap_universe):
    """Refine the bounded word universe and dump the round trace."""
    cfg = ctx.obj["config"]["caps"]

    def body():
        eg, _ = _equipped(spec)
        reduced, pruned = prune_free_factors(build_cgraph(eg))
        if reduced.n_vertices == 0:
            return {"N": 1, "pruned_vertices": pruned, "trace": [], "class_sizes": [1]}, True
        part = refine_partition(reduced, strategy, universe_cap=cap_universe or cfg["universe"],
                                max_rounds=cfg["rounds"])
        tg = tilde_group(part, reduced)
        result = part.to_json()
        result.update(class_sizes=[len(c) for c in part.classes], tilde_order=tg.order,
                      period_product=math.prod(reduced.periods), pruned_vertices=pruned)
        return result, True

    _run(ctx, "partition", body)


def corpus_report(corpus_dir: str | Path, with_partition: bool = True) -> list[dict]:
    """One row per ``*.equip`` file, sorted by name; failures are recorded per row."""
    from .ambiguity import ambiguity_via_commutator, ambiguity_via_partition

    rows = []
    for path in sorted(Path(corpus_dir).glob("*.equip")):
        row = {"name": path.stem}
        try:
            eg = load_equipment(path).load()
            gamma = build_cgraph(eg)
            rep = validate_cgraph(gamma)
            row.update(order=eg.group.order, classes=[len(c.members) for c in eg.classes],
                       periods=list(gamma.periods), axioms_ok=rep.ok, generating=eg.generates())
            if eg.generates():
                row["a_commutator"] = ambiguity_via_commutator(eg).value
                if with_partition:
                    try:
                        row["a_partition"] = ambiguity_via_partition(eg).value
                    except CapExceeded as exc:
                        row["a_partition"] = None
                        row["partition_note"] = str(exc)
                    if row["a_partition"] is not None:
                        row["agree"] = row["a_partition"] == row["a_commutator"]
            row["status"] = "ok"
        except CapExceeded as exc:
            row.update(status="capped", note=str(exc))
        except Exception as exc:  # one bad entry must not stop the batch
            row.update(status="error", error=f"{type(exc).__name__}: {exc}")
        rows.append(row)
    return rows


@main.command()
@click.argument("corpus_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--partition/--no-partition", "with_partition", default=True, show_default=True)
@click.pass_context
def report(ctx, corpus_dir, with_partition):
    """Axiom checks and ambiguity indices for every equipment file in a directory."""

    def body():
        rows = corpus_report(corpus_dir, with_partition)
        return {"rows": rows, "errors": sum(r["status"] == "error" for r in rows)}, True

    _run(ctx, "report", body)


if __name__ == "__main__":  # pragma: no cover
    main()
