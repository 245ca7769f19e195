"""CLI entry point for cubex."""

from __future__ import annotations

import asyncio
import json
import logging
import sys
from functools import wraps

import click

from cubex import dsl
from cubex.algebra import small_groups
from cubex.classes import ClassName, audit_axioms, extension_class, lift_class
from cubex.config import Caps, load_caps, parse_caps_option, use_caps
from cubex.cubes import extension_failures, is_extension_inductive
from cubex.errors import CubexError, CubexParseError, format_subset
from cubex.generate import all_maps_universe, group_hom_universe, squares_universe
from cubex.simplicial import CHOOSERS, exactness, kan_report, tv_resolution
from cubex.theorems import THEOREMS, exit_code, run_suite, search_maltsev_counterexample
from cubex.types import AxiomStatus, Document, TheoremReport, Verdict

CLASS_CHOICES = click.Choice([c.value for c in ClassName])


def _run(coro):
    return asyncio.run(coro)


def _error(exc: Exception) -> dict:
    data = {"error": str(exc), "type": exc.__class__.__name__}
    if isinstance(exc, CubexParseError):
        data.update(reason=exc.reason, line=exc.line, column=exc.column)
    return data


def _guard(fn):
    """Input, config and resource errors exit with status 2 and a JSON error on stderr."""
    @wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (CubexError, OSError) as exc:
            click.echo(json.dumps(_error(exc)), err=True)
            sys.exit(2)
    return wrapper


def _emit(ctx, reports: list[TheoremReport]):
    """Print reports and exit with the status their verdicts imply."""
    opts = ctx.obj
    for r in reports:
        record = r.record(timing=opts["timing"])
        if opts["report"] == "structured":
            indent = 2 if opts["pretty"] else None
            click.echo(json.dumps(record, sort_keys=True, indent=indent))
            continue
        line = f"{r.verdict.value:<22} {r.theorem}  {r.instance}"
        if r.reason:
            line += f"  ({r.reason})"
        if opts["timing"] and r.wall_time is not None:
            line += f"  [{r.wall_time:.3f}s]"
        click.echo(line)
        if r.witness is not None:
            click.echo(f"    witness: {json.dumps(r.witness, sort_keys=True)}")
    sys.exit(exit_code(reports))


def _caps(ctx) -> Caps:
    return ctx.obj["caps"]


def _select(table: dict, name: str | None, kind: str) -> dict:
    if name is None:
        if not table:
            raise CubexError(f"the document declares no {kind}")
        return table
    if name not in table:
        raise CubexError(f"no {kind} named {name!r}")
    return {name: table[name]}


@click.group()
@click.option("--pretty", is_flag=True, help="Indent structured report records")
@click.option("--report", "report", default="text", type=click.Choice(["text", "structured"]), help="Report format")
@click.option("--caps", "caps_raw", default=None, help="Cap overrides, key=value[,key=value]")
@click.option("--timing", is_flag=True, help="Include wall times in reports")
@click.option("--verbose", "-v", count=True, help="Log to stderr (-vv for debug)")
@click.pass_context
@_guard
def main(ctx, pretty, report, caps_raw, timing, verbose):
    """Check higher extensions and resolutions on finite examples."""
    if verbose:
        logging.basicConfig(level=logging.DEBUG if verbose > 1 else logging.INFO, stream=sys.stderr)
    ctx.ensure_object(dict)
    ctx.obj.update(
        pretty=pretty,
        report=report,
        timing=timing,
        caps=load_caps(**parse_caps_option(caps_raw)),
    )


@main.command("check-cube")
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("--class", "class_name", default="surjections", type=CLASS_CHOICES)
@click.option("--name", default=None, help="Check only this cube")
@click.pass_context
@_guard
def check_cube(ctx, path, class_name, name):
    """Check whether the cubes in a .cx file are n-fold extensions."""
    e = extension_class(class_name)
    caps = _caps(ctx)
    reports = []
    with use_caps(caps):
        for cube_name, c in sorted(_select(dsl.load(path).cubes, name, "cubes").items()):
            failing = extension_failures(c, e, caps=caps)
            inductive = is_extension_inductive(c, e, caps=caps)
            reports.append(TheoremReport(
                theorem="check-cube",
                instance=cube_name,
                verdict=Verdict.HOLDS if not failing else Verdict.VIOLATED,
                witness={"failing": [format_subset(s) for s in failing]} if failing else None,
                reason=f"not an extension for {e.name}" if failing else None,
                detail={"dim": c.dim, "class": e.name, "inductive": inductive},
            ))
    _emit(ctx, reports)


@main.command("check-resolution")
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("--class", "class_name", default="surjections", type=CLASS_CHOICES)
@click.option("--name", default=None, help="Check only this simplicial object")
@click.pass_context
@_guard
def check_resolution(ctx, path, class_name, name):
    """Check whether the simplicial objects in a .cx file are resolutions."""
    e = extension_class(class_name)
    caps = _caps(ctx)
    reports = []
    with use_caps(caps):
        for ss_name, ss in sorted(_select(dsl.load(path).simplicials, name, "simplicial objects").items()):
            if not ss.augmented:
                reports.append(TheoremReport(
                    theorem="check-resolution", instance=ss_name, verdict=Verdict.SKIPPED,
                    reason="object is not augmented",
                ))
                continue
            levels = exactness(ss, e, caps=caps)
            first = next((n for n, ok in enumerate(levels) if not ok), None)
            reports.append(TheoremReport(
                theorem="check-resolution",
                instance=ss_name,
                verdict=Verdict.HOLDS if first is None else Verdict.VIOLATED,
                witness=None if first is None else {"first_inexact_level": first},
                reason=None if first is None else f"not exact at level {first}",
                detail={"class": e.name, "exact": levels},
            ))
    _emit(ctx, reports)


@main.command("check-kan")
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("--class", "class_name", default="surjections", type=CLASS_CHOICES)
@click.option("--level", default=None, type=int, help="Highest horn level to check")
@click.option("--name", default=None, help="Check only this simplicial object")
@click.pass_context
@_guard
def check_kan(ctx, path, class_name, level, name):
    """Check the Kan property of the simplicial objects in a .cx file."""
    e = extension_class(class_name)
    caps = _caps(ctx)
    reports = []
    with use_caps(caps):
        for ss_name, ss in sorted(_select(dsl.load(path).simplicials, name, "simplicial objects").items()):
            kan = kan_report(ss, e, max_level=level, caps=caps)
            failing = [list(h) for h in kan.failing]
            reports.append(TheoremReport(
                theorem="check-kan",
                instance=ss_name,
                verdict=Verdict.HOLDS if kan.holds else Verdict.VIOLATED,
                witness={"horns": failing} if failing else None,
                reason=f"horn comparisons outside {e.name}" if failing else None,
                detail={"class": e.name, "horns": len(kan.entries)},
            ))
    _emit(ctx, reports)


@main.command("audit-class")
@click.option("--class", "class_name", default="surjections", type=CLASS_CHOICES)
@click.option("--universe", default="sets", type=click.Choice(["sets", "groups"]))
@click.option("--max-size", default=2, type=int, help="Largest carrier in the universe")
@click.option("--lifted", is_flag=True, help="Audit the class of double extensions on squares")
@click.option("--axiom", "axioms", multiple=True, type=click.Choice(["E1", "E2", "E3", "E4", "E5"]))
@click.pass_context
@_guard
def audit_class(ctx, class_name, universe, max_size, lifted, axioms):
    """Audit the axioms (E1)-(E5) of a class on a generated universe."""
    e = extension_class(class_name)
    caps = _caps(ctx)
    axioms = axioms or ("E1", "E2", "E3", "E4", "E5")
    with use_caps(caps):
        arrows = all_maps_universe(max_size) if universe == "sets" else group_hom_universe(max_size)
        if lifted:
            arrows = squares_universe(arrows, e)
            e = lift_class(e)
        audit = audit_axioms(e, arrows, axioms=axioms, caps=caps)
    reports = [
        TheoremReport(
            theorem="audit-class",
            instance=f"{universe}<={max_size}/{e.name}/{f.axiom}",
            verdict={
                AxiomStatus.VIOLATED: Verdict.VIOLATED,
                AxiomStatus.NOT_APPLICABLE: Verdict.SKIPPED,
            }.get(f.status, Verdict.HOLDS),
            witness=f.witness if f.status is AxiomStatus.VIOLATED else None,
            reason=None if f.status is AxiomStatus.VERIFIED else f.status.value,
            detail={"checked": f.checked, "status": f.status.value, "universe": audit.universe_size},
        )
        for f in audit.findings
    ]
    _emit(ctx, reports)


@main.command("tv-generate")
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("--class", "class_name", default="surjections", type=CLASS_CHOICES)
@click.option("--level", default=2, type=int)
@click.option("--chooser", default="identity", type=click.Choice(sorted(CHOOSERS)))
@click.option("--name", default=None, help="Resolve only this object")
@click.option("--output", "-o", default=None, type=click.Path(dir_okay=False), help="Write here instead of stdout")
@click.pass_context
@_guard
def tv_generate(ctx, path, class_name, level, chooser, name, output):
    """Build Tierney-Vogel resolutions of the objects in a .cx file."""
    e = extension_class(class_name)
    caps = _caps(ctx)
    doc = dsl.load(path)
    objects = _select(doc.objects, name, "objects")
    with use_caps(caps):
        simplicials = {
            f"tv_{obj_name}": tv_resolution(x, e, CHOOSERS[chooser], level, caps=caps)
            for obj_name, x in objects.items()
        }
    out = Document(
        meta={"generator": f"tv-generate class={e.name} level={level} chooser={chooser}"},
        objects=dict(objects),
        simplicials=simplicials,
    )
    text = dsl.serialize(out)
    if output:
        with open(output, "w") as f:
            f.write(text)
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--id", "ids", multiple=True, type=click.Choice(sorted(THEOREMS)), help="Theorem id (repeatable)")
@click.option("--seed", default=None, type=int)
@click.option("--quick", is_flag=True, help="Smaller generated instance counts")
@click.pass_context
@_guard
def verify(ctx, ids, seed, quick):
    """Run theorem checks by id over seeded generated instances."""
    reports = _run(run_suite(ids or None, seed, caps=_caps(ctx), quick=quick))
    _emit(ctx, reports)


@main.command("search-counterexample")
@click.option("--kind", default="sets", type=click.Choice(["sets", "groups"]))
@click.option("--max-size", default=3, type=int, help="Largest carrier (sets) or group order")
@click.option("--class", "class_name", default="surjections", type=CLASS_CHOICES)
@click.pass_context
@_guard
def search_counterexample(ctx, kind, max_size, class_name):
    """Search for a split epimorphism of split epimorphisms that is not a double extension."""
    if kind == "groups" and max_size > max(g.size for g in small_groups().values()):
        raise CubexError(f"groups are only tabulated up to order {max(g.size for g in small_groups().values())}")
    caps = _caps(ctx)
    with use_caps(caps):
        report = search_maltsev_counterexample(kind, max_size, e=extension_class(class_name), caps=caps)
    _emit(ctx, [report])


@main.command()
@click.argument("path", type=click.Path(dir_okay=False))
@_guard
def parse(path):
    """Load a .cx file and print its canonical form."""
    click.echo(dsl.serialize(dsl.load(path)), nl=False)


@main.command("list-theorems")
@click.pass_context
def list_theorems(ctx):
    """List theorem ids accepted by verify."""
    if ctx.obj["report"] == "structured":
        for tid, text in THEOREMS.items():
            click.echo(json.dumps({"id": tid, "description": text}, sort_keys=True))
        return
    width = max(len(t) for t in THEOREMS)
    for tid, text in THEOREMS.items():
        click.echo(f"{tid:<{width}}  {text}")
