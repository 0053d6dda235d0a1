"""Bundled corpus: file lookup and expected-property checks."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from .alexander import LaurentPoly, alexander_oracle, euler_characteristic
from .grid import GridError, num_components, parse_and_validate, trace_link
from .invariants import hfk_hat
from .skein import TemplateError, parse_template, validate_template

MANIFEST = "manifest.json"


class CorpusError(RuntimeError):
    pass


def corpus_dir() -> Path:
    return Path(str(resources.files("gridskein") / "corpus"))


def resolve(path: str | Path) -> Path:
    """``path`` itself if it exists, else the bundled file of the same name."""
    p = Path(path)
    if p.exists():
        return p
    bundled = corpus_dir() / p.name
    if bundled.exists():
        return bundled
    raise CorpusError(f"no such file: {path}")


def poly_from_list(coeffs: list[int]) -> LaurentPoly:
    return LaurentPoly.from_exponents(dict(enumerate(coeffs)))


def hat_from_list(rows: list[list[int]]) -> dict:
    return {(m, s): r for m, s, r in rows}


@dataclass(frozen=True)
class CorpusRow:
    entry: str
    check: str
    expected: str
    actual: str
    ok: bool

    def tsv(self) -> str:
        return "\t".join([self.entry, self.check, self.expected, self.actual,
                          "PASS" if self.ok else "FAIL"])


def _row(rows, entry, check, expected, actual, ok=None) -> None:
    rows.append(CorpusRow(entry, check, str(expected), str(actual),
                          expected == actual if ok is None else ok))


def _fmt_hat(d: dict) -> str:
    return " ".join(f"({m},{s}):{r}" for (m, s), r in sorted(d.items()))


def check_grid(directory: str, entry: dict) -> list[CorpusRow]:
    name = entry["name"]
    rows: list[CorpusRow] = []
    g = parse_and_validate((Path(directory) / entry["file"]).read_text())
    link = trace_link(g)
    _row(rows, name, "components", entry["components"]["value"], link.ell)
    if link.ell != num_components(g):
        _row(rows, name, "component_orbits", link.ell, num_components(g))
    _row(rows, name, "crossings", entry["crossings"]["value"], len(link.crossings))
    delta = alexander_oracle(link)
    want = poly_from_list(entry["alexander"]["value"])
    _row(rows, name, "alexander", want, delta, want.equiv(delta))
    if link.ell == 1:
        chi = euler_characteristic(g)
        factor = LaurentPoly.from_exponents({0: 1, -1: -1}) ** (g.n - 1)
        _row(rows, name, "euler_vs_oracle", delta * factor, chi, chi.equiv(delta * factor))
    if "hat" in entry:
        hat = hfk_hat(g).entries
        want_hat = hat_from_list(entry["hat"]["value"])
        _row(rows, name, "hat", _fmt_hat(want_hat), _fmt_hat(hat))
    return rows


def check_template(directory: str, entry: dict) -> list[CorpusRow]:
    name = entry["name"]
    rows: list[CorpusRow] = []
    t = parse_template((Path(directory) / entry["file"]).read_text(), name)
    _row(rows, name, "same_component", entry["same_component"]["value"], t.same_component)
    polys = {}
    for which in ("K+", "K-", "K0"):
        link = trace_link(t.grid(which))
        _row(rows, name, f"components_{which}", entry["components"]["value"][which], link.ell)
        polys[which] = alexander_oracle(link)
        want = poly_from_list(entry["alexander"]["value"][which])
        _row(rows, name, f"alexander_{which}", want, polys[which], want.equiv(polys[which]))
    for r in validate_template(t):
        _row(rows, name, r.check, r.rhs, r.lhs, r.verdict)
    return rows


def check_negative(directory: str, entry: dict) -> list[CorpusRow]:
    name = entry["name"]
    text = (Path(directory) / entry["file"]).read_text()
    try:
        if entry["file"].endswith(".skein"):
            parse_template(text, name)
        else:
            parse_and_validate(text)
    except (GridError, TemplateError) as exc:
        msg = str(exc)
        return [CorpusRow(name, "rejected", entry["error"], msg, entry["error"] in msg)]
    return [CorpusRow(name, "rejected", entry["error"], "accepted", False)]


_CHECKERS = {"grids": check_grid, "templates": check_template, "negative": check_negative}


def _run(job) -> list[CorpusRow]:
    kind, directory, entry = job
    return _CHECKERS[kind](directory, entry)


def load_manifest(directory: Optional[Path] = None) -> tuple[Path, dict]:
    directory = Path(directory) if directory is not None else corpus_dir()
    path = directory / MANIFEST
    if not path.exists():
        raise CorpusError(f"missing corpus manifest {path}")
    manifest = json.loads(path.read_text())
    missing = [e["file"] for kind in _CHECKERS for e in manifest.get(kind, [])
               if not (directory / e["file"]).exists()]
    if missing:
        raise CorpusError(f"missing corpus files: {', '.join(missing)}")
    return directory, manifest


def corpus_check(directory: Optional[Path] = None, workers: int = 1) -> list[CorpusRow]:
    """Run every entry's checks; rows come back in manifest order."""
    directory, manifest = load_manifest(directory)
    jobs = [(kind, str(directory), e) for kind in _CHECKERS for e in manifest.get(kind, [])]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run, jobs))
    else:
        results = [_run(j) for j in jobs]
    rows = [r for chunk in results for r in chunk]
    by_name = {e["name"]: e for e in manifest.get("grids", [])}
    for e in manifest.get("grids", []):
        base = e.get("stabilization_of")
        if base:
            a = hfk_hat(parse_and_validate((directory / e["file"]).read_text())).entries
            b = hfk_hat(parse_and_validate((directory / by_name[base]["file"]).read_text())).entries
            rows.append(CorpusRow(e["name"], f"stabilization_of_{base}", _fmt_hat(b), _fmt_hat(a), a == b))
    return rows
