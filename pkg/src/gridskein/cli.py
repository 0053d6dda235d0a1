"""Command-line interface.

Every command takes ``--format text|tsv``, ``--threads N`` and ``--signs``.
Exit status is 0 when everything checked passes, 1 when a named check
fails, and 2 for usage errors and unreadable or invalid input.
"""

from __future__ import annotations

import functools
import sys
from pathlib import Path

import click

from .alexander import LaurentPoly, alexander_oracle, euler_characteristic
from .catalog import CorpusError, corpus_check, resolve
from .complexes import build_complex, d_squared_check
from .grid import GridDiagram, GridError, parse_and_validate, trace_link
from .homology import HomologyError, RankTable, Window
from .invariants import hfk_hat, hfk_minus
from .signs import SignError, sign_assignment
from .skein import ReportRow, SkeinReport, TemplateError, parse_template, skein_report, validate_template

DEFAULT_WINDOW = "-8:2,-4:4"


class InputError(click.ClickException):
    exit_code = 2


def _common(fn):
    @click.option("--format", "fmt", type=click.Choice(["text", "tsv"]), default="text",
                  show_default=True, help="Output format.")
    @click.option("--threads", type=click.IntRange(min=1), default=1, show_default=True,
                  help="Worker processes (used by corpus-check).")
    @click.option("--signs", is_flag=True, help="Also run the integer sign checks where supported.")
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        return fn(*args, **kwargs)
    return wrapper


def _read(path: str) -> tuple[Path, str]:
    try:
        p = resolve(path)
        return p, p.read_text()
    except (CorpusError, OSError) as exc:
        raise InputError(str(exc)) from None


def _load_grid(path: str) -> GridDiagram:
    p, text = _read(path)
    try:
        return parse_and_validate(text)
    except GridError as exc:
        raise InputError(f"{p}: {exc}") from None


def _window(text: str | None) -> Window | None:
    if text is None:
        return None
    try:
        return Window.parse(text)
    except HomologyError as exc:
        raise InputError(str(exc)) from None


def _emit_table(table: RankTable, fmt: str, title: str) -> None:
    if fmt == "tsv":
        click.echo("m\ts\trank")
        click.echo(table.serialize(), nl=False)
        return
    click.echo(f"{title}  (window {table.window if table.window else 'full'})")
    for (m, s), r in sorted(table.entries.items(), key=lambda kv: (-kv[0][1], -kv[0][0])):
        click.echo(f"  m={m:>3} s={s:>3}  rank {r}")
    click.echo(f"  total rank {table.total()}")


@click.group()
@click.version_option(package_name="gridskein")
def main() -> None:
    """Grid knot Floer homology and skein exact triangle checks."""


@main.command()
@click.argument("grid")
@_common
def validate(grid, fmt, threads, signs):
    """Parse and validate a grid file."""
    g = _load_grid(grid)
    ell = trace_link(g).ell
    rows = [("grid", "valid", True)]
    if signs:
        try:
            sa = sign_assignment(g)
        except SignError as exc:
            raise click.ClickException(f"sign assignment: {exc}") from None
        for flavor in ("tilde", "minus"):
            ok, bad = d_squared_check(build_complex(g, flavor, signs=sa))
            rows.append((f"d_squared_integer_{flavor}", "zero" if ok else f"nonzero at {bad}", ok))
    if fmt == "tsv":
        click.echo("n\tcomponents")
        click.echo(f"{g.n}\t{ell}")
        for name, detail, ok in rows[1:]:
            click.echo(f"{name}\t{detail}\t{'PASS' if ok else 'FAIL'}")
    else:
        click.echo(f"valid grid: n={g.n} components={ell}")
        for name, detail, ok in rows[1:]:
            click.echo(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    if not all(ok for _, _, ok in rows):
        sys.exit(1)


@main.command()
@click.argument("grid")
@_common
def trace(grid, fmt, threads, signs):
    """Components, crossings and linking numbers of the traced link."""
    link = trace_link(_load_grid(grid))
    pairs = [(a, b, link.linking_number(a, b)) for a in range(link.ell) for b in range(a + 1, link.ell)]
    if fmt == "tsv":
        click.echo("col\trow\tsign\tover\tunder")
        for c in link.crossings:
            click.echo(f"{c.col}\t{c.row}\t{c.sign:+d}\t{c.over_component}\t{c.under_component}")
        return
    click.echo(f"components {link.ell}")
    click.echo(f"component of each O column: {' '.join(map(str, link.component_of_O))}")
    click.echo(f"orientation: {link.orientation}")
    click.echo(f"crossings {len(link.crossings)}  writhe {link.writhe:+d}")
    for c in link.crossings:
        click.echo(f"  column {c.col} over row {c.row}  sign {c.sign:+d}  "
                   f"components {c.over_component}/{c.under_component}")
    for a, b, lk in pairs:
        click.echo(f"linking number ({a},{b}) = {lk:+d}")


@main.command("hfk-hat")
@click.argument("grid")
@_common
def hfk_hat_cmd(grid, fmt, threads, signs):
    """Hat ranks (tilde homology divided by the extra basepoints)."""
    g = _load_grid(grid)
    try:
        table = hfk_hat(g)
    except HomologyError as exc:
        raise click.ClickException(f"hat_from_tilde: {exc}") from None
    _emit_table(table, fmt, "HFK-hat")


@main.command("hfk-minus")
@click.argument("grid")
@click.option("--window", "window", default=None, help="m0:m1,s0:s1")
@_common
def hfk_minus_cmd(grid, window, fmt, threads, signs):
    """Minus ranks on a bigrading window."""
    g = _load_grid(grid)
    _emit_table(hfk_minus(g, _window(window)), fmt, "HFK-minus")


@main.command()
@click.argument("grid")
@_common
def euler(grid, fmt, threads, signs):
    """Graded Euler characteristic, compared with the Fox-calculus oracle."""
    g = _load_grid(grid)
    link = trace_link(g)
    chi = euler_characteristic(g)
    delta = alexander_oracle(link)
    # tilde carries one factor (1 - t^-1) per extra basepoint
    factor = LaurentPoly.from_exponents({0: 1, -1: -1}) ** (g.n - link.ell)
    z = LaurentPoly.from_dict({1: 1, -1: -1})
    expected = delta * z ** (link.ell - 1) * factor
    ok = chi.equiv(expected) if not expected.is_zero() else chi.is_zero()
    if fmt == "tsv":
        click.echo("euler\talexander\tverdict")
        click.echo(f"{chi}\t{delta}\t{'PASS' if ok else 'FAIL'}")
    else:
        click.echo(f"euler characteristic  {chi}")
        click.echo(f"alexander (oracle)    {delta}")
        click.echo(f"{'PASS' if ok else 'FAIL'}  euler_vs_oracle")
    if not ok:
        sys.exit(1)


def _load_template(path: str):
    p, text = _read(path)
    return parse_template(text, p.stem)


def _emit_report(rep: SkeinReport, fmt: str) -> None:
    click.echo(rep.to_tsv() if fmt == "tsv" else rep.to_text(), nl=False)
    if not rep.ok:
        names = ", ".join(dict.fromkeys(r.check for r in rep.failures()))
        click.echo(f"failing checks: {names}", err=True)
        sys.exit(1)


@main.command("skein-validate")
@click.argument("template")
@_common
def skein_validate(template, fmt, threads, signs):
    """Structure, link-triple and scalar-identity checks of a template."""
    try:
        t = _load_template(template)
    except TemplateError as exc:
        _emit_report(SkeinReport(Path(template).stem, [ReportRow("structure", "-", str(exc), "valid", False)]), fmt)
        return
    _emit_report(SkeinReport(t.name, validate_template(t)), fmt)


@main.command("skein-report")
@click.argument("template")
@click.option("--window", "window", default=DEFAULT_WINDOW, show_default=True, help="m0:m1,s0:s1")
@_common
def skein_report_cmd(template, window, fmt, threads, signs):
    """Full skein triangle verification on a window."""
    w = _window(window)
    try:
        t = _load_template(template)
    except TemplateError as exc:
        _emit_report(SkeinReport(Path(template).stem, [ReportRow("structure", "-", str(exc), "valid", False)]), fmt)
        return
    _emit_report(skein_report(t, w), fmt)


@main.command("corpus-check")
@click.option("--corpus-dir", type=click.Path(file_okay=False), default=None,
              help="Alternative corpus directory (defaults to the bundled one).")
@_common
def corpus_check_cmd(corpus_dir, fmt, threads, signs):
    """Run the expected-property checks of every corpus entry."""
    try:
        rows = corpus_check(Path(corpus_dir) if corpus_dir else None, workers=threads)
    except CorpusError as exc:
        raise InputError(str(exc)) from None
    if fmt == "tsv":
        click.echo("entry\tcheck\texpected\tactual\tverdict")
        for r in rows:
            click.echo(r.tsv())
    else:
        for r in rows:
            line = f"{'PASS' if r.ok else 'FAIL'}  {r.entry}: {r.check}"
            if not r.ok:
                line += f"  expected {r.expected}, got {r.actual}"
            click.echo(line)
    bad = list(dict.fromkeys(r.entry for r in rows if not r.ok))
    click.echo(f"corpus {'PASS' if not bad else 'FAIL'}: {len(rows) - sum(not r.ok for r in rows)}/{len(rows)} checks"
               + (f"; failing entries: {', '.join(bad)}" if bad else ""))
    if bad:
        sys.exit(1)


if __name__ == "__main__":
    main()
