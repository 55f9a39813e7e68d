"""Command-line front end.

Every subcommand prints a plain table to standard output and builds a JSON
document (keys sorted, no timestamps, so reruns are byte identical).  The
JSON goes to standard output with ``--json`` and to ``<output dir>/<command>.json``
when an output directory is configured.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from . import automata
from .classes import (
    ENUMERATION_CAP,
    GeomClass,
    Inflation,
    ResourceLimit,
    SpecSyntaxError,
    class_members,
    closure_basis,
    enumerate_class,
    member,
    parse_spec,
)
from .gf import Series, fit_rational, growth_rate
from .grid import (
    CertificationError,
    decode,
    format_word,
    geom_member,
    infer_signs,
    least_preimage,
    load_matrix,
    normal_form_automaton,
    parse_word,
    is_forest,
    row_column_graph,
)
from .perm import (
    Perm,
    all_perms,
    antichain_element,
    increasing_oscillation,
    is_simple,
    is_parallel_alternation,
    oscillation_census,
    parallel_alternation_census,
    simples,
    substitution_decompose,
)
from .properties import family_extended, framework_properties, simple_framework_of

ORACLE_CAP = 12
OUTPUT_DIR_ENV = "PERMCLASS_OUTPUT_DIR"
ORACLE_VERIFIED = "oracle-verified"
AUTOMATON_CERTIFIED = "automaton-certified"
HEURISTIC = "heuristic"


class DomainError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: list[str] = field(default_factory=list)
    n_max: int = 10
    certify: int = 7
    max_deg: int = 3
    output: str | None = None
    workers: int = 1
    cap: int = ENUMERATION_CAP

    def check(self) -> None:
        if self.n_max > self.cap:
            raise ResourceLimit(f"n = {self.n_max} exceeds the cap {self.cap}", self.cap + 1)
        if self.certify > ORACLE_CAP:
            raise ResourceLimit(f"certification length {self.certify} exceeds the cap {ORACLE_CAP}", ORACLE_CAP + 1)


# --- helpers -------------------------------------------------------------------------------


def _perm(text: str) -> Perm:
    try:
        return Perm.parse(text)
    except ValueError as exc:
        raise DomainError(f"bad permutation {text!r}: {exc}") from None


def _matrix(path: str):
    try:
        return load_matrix(path)
    except OSError as exc:
        raise DomainError(f"{path}: {exc.strerror}") from None
    except ValueError as exc:
        raise DomainError(f"{path}: {exc}") from None


def _spec(text: str):
    """A class expression given inline or as the path of a file holding one."""
    base = "."
    if os.path.isfile(text):
        base = os.path.dirname(os.path.abspath(text))
        with open(text, encoding="utf-8") as fh:
            text = " ".join(line.split("#", 1)[0] for line in fh).strip()
    return parse_spec(text, base)


def _table(rows: list[tuple]) -> str:
    width = max((len(str(r[0])) for r in rows), default=0)
    return "\n".join(f"{str(k):<{width}}  {v}" for k, v in rows)


def _nums(values) -> str:
    return " ".join(str(v) for v in values)


def _signed(m):
    if m.has_signs:
        return m
    signs = infer_signs(m)
    if signs is None:
        raise DomainError("matrix is not a partial multiplication matrix; give signs or use a forest")
    return m.with_signs()


# --- subcommands --------------------------------------------------------------------------


def cmd_decompose(args, cfg: RunConfig):
    pi = _perm(args.perm)
    d = substitution_decompose(pi)
    doc = {
        "permutation": str(pi),
        "skeleton": str(d.skeleton),
        "blocks": [str(b) for b in d.blocks],
        "simple": is_simple(pi),
        "provenance": ORACLE_VERIFIED,
    }
    table = _table([("skeleton", d.skeleton), ("blocks", ",".join(map(str, d.blocks)))])
    return doc, table


def cmd_simples(args, cfg: RunConfig):
    if args.max > ORACLE_CAP:
        n = max(args.min, ORACLE_CAP + 1)
        raise ResourceLimit(f"length {n} exceeds the cap {ORACLE_CAP}", n)
    rows = {}
    for n in range(args.min, args.max + 1):
        found = simples(n)
        rows[str(n)] = {
            "simples": len(found),
            "parallel_alternations": sum(1 for s in found if is_parallel_alternation(s)),
        }
    doc = {"census": rows, "provenance": ORACLE_VERIFIED}
    lines = [("n", "simples  parallel alternations")]
    lines += [(n, f"{r['simples']}  {r['parallel_alternations']}") for n, r in rows.items()]
    return doc, _table(lines)


def cmd_geom(args, cfg: RunConfig):
    m = _matrix(args.matrix)
    graph = row_column_graph(m)
    doc: dict = {"matrix": m.to_text(), "forest": is_forest(graph)}
    if args.action == "decode":
        try:
            word = parse_word(args.value)
        except ValueError as exc:
            raise DomainError(str(exc)) from None
        signed = _signed(m)
        bad = [c for c in word if c not in signed.cells]
        if bad:
            raise DomainError(f"letter {bad[0]} names an empty cell")
        pi, psi = decode(signed, word)
        doc.update(permutation=str(pi), psi=list(psi), provenance=ORACLE_VERIFIED)
        return doc, _table([("permutation", pi), ("psi", _nums(psi))])
    if args.action == "member":
        pi = _perm(args.value)
        ok = geom_member(m, pi)
        doc.update(permutation=str(pi), member=ok, provenance=ORACLE_VERIFIED)
        return doc, _table([(str(pi), "member" if ok else "not a member")])
    if args.action == "encode":
        pi = _perm(args.value)
        w = least_preimage(_signed(m), pi)
        if w is None:
            raise DomainError(f"{pi} is not in the class")
        doc.update(permutation=str(pi), word=format_word(w), provenance=ORACLE_VERIFIED)
        return doc, _table([("word", format_word(w))])
    # automaton
    try:
        nf = normal_form_automaton(_signed(m), cfg.certify)
    except CertificationError as exc:
        raise DomainError(str(exc)) from None
    text = automata.to_text(nf.dfa, lambda c: f"a{c[0]}{c[1]}")
    doc.update(
        states=nf.dfa.n_states,
        certified_to=nf.certified_to,
        counts=list(nf.class_counts),
        gf=str(automata.gf_of_dfa(nf.dfa)),
        automaton=text,
        provenance=AUTOMATON_CERTIFIED,
    )
    table = _table([
        ("states", nf.dfa.n_states),
        ("certified to", nf.certified_to),
        ("counts", _nums(nf.class_counts)),
        ("gf", doc["gf"]),
    ])
    return doc, table


def _naive_count(spec_and_n):
    spec, n = spec_and_n
    return sum(1 for p in all_perms(n) if member(spec, p))


def _naive_counts(spec, n_max: int, workers: int) -> list[int]:
    jobs = [(spec, n) for n in range(1, n_max + 1)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_naive_count, jobs))
    return [_naive_count(j) for j in jobs]


def cmd_enumerate(args, cfg: RunConfig):
    spec = _spec(args.spec)
    n = min(cfg.n_max, args.check)
    if n > ORACLE_CAP:
        raise ResourceLimit(f"brute-force check to {n} exceeds the cap {ORACLE_CAP}", ORACLE_CAP + 1)
    counts = enumerate_class(spec, cfg.n_max, cfg.cap)
    doc: dict = {"spec": spec.to_text(), "counts": counts, "provenance": HEURISTIC}
    rows = [("n", _nums(range(1, cfg.n_max + 1))), ("count", _nums(counts))]
    if args.check:
        naive = _naive_counts(spec, n, cfg.workers)
        if naive != counts[:n]:
            raise DomainError(f"generation tree disagrees with brute force: {counts[:n]} vs {naive}")
        doc["provenance"] = ORACLE_VERIFIED
        doc["checked_to"] = n
        rows.append(("checked to", n))
    if args.members is not None:
        doc["members"] = [str(p) for p in class_members(spec, args.members, cfg.cap)]
    return doc, _table(rows)


def _read_counts(text: str) -> list[int]:
    if os.path.isfile(text):
        with open(text, encoding="utf-8") as fh:
            text = fh.read()
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError as exc:
        raise DomainError(f"bad count list: {exc}") from None


def cmd_fit(args, cfg: RunConfig):
    s = Series.from_counts(_read_counts(args.counts))
    gf = fit_rational(s, cfg.max_deg)
    doc = {
        "counts": s.counts(),
        "max_deg": cfg.max_deg,
        "fit": gf.to_json() if gf else None,
        "gf": str(gf) if gf else "no rational fit at bound",
        "provenance": HEURISTIC,
    }
    return doc, _table([("gf", doc["gf"])])


def cmd_closure_basis(args, cfg: RunConfig):
    spec = _spec(args.spec)
    cb = closure_basis(spec, args.max_len)
    doc = {
        "spec": spec.to_text(),
        "basis": [str(p) for p in cb.elements],
        "parallel_alternations": cb.parallel_alternations,
        "max_len": cb.max_len,
        "provenance": ORACLE_VERIFIED,
    }
    return doc, _table([("basis", " ".join(doc["basis"]) or "(none)"), ("complete to", cb.max_len)])


def cmd_frameworks(args, cfg: RunConfig):
    pi = _perm(args.perm)
    basis = [_perm(b) for b in args.basis]
    fam = family_extended(basis)
    f = simple_framework_of(pi, fam)
    props = framework_properties(f, fam)
    doc = {
        "permutation": str(pi),
        "family": [str(p) for p in fam],
        "framework": f.render(fam),
        "properties": [str(p) for p in fam.members(props)],
        "provenance": ORACLE_VERIFIED,
    }
    return doc, _table([("framework", doc["framework"]), ("properties", "{" + ", ".join(doc["properties"]) + "}")])


def cmd_oscillations(args, cfg: RunConfig):
    rows = {}
    for n in range(1, args.n + 1):
        rows[str(n)] = {"increasing": str(increasing_oscillation(n)), "count": oscillation_census(n)}
    doc = {"oscillations": rows, "provenance": ORACLE_VERIFIED}
    return doc, _table([(n, f"{r['count']}  {r['increasing']}") for n, r in rows.items()])


def cmd_antichain(args, cfg: RunConfig):
    elems = [antichain_element(k) for k in range(1, args.k + 1)]
    doc = {"elements": [p.to_text() for p in elems], "provenance": ORACLE_VERIFIED}
    return doc, _table([(k, p.to_text()) for k, p in enumerate(elems, 1)])


def cmd_census(args, cfg: RunConfig):
    doc = {str(n): parallel_alternation_census(n)[0] for n in range(args.min, args.max + 1)}
    return {"parallel_alternations": doc, "provenance": ORACLE_VERIFIED}, _table(list(doc.items()))


def build_report(spec_text: str, cfg: RunConfig) -> dict:
    """Counts, rational fit, growth interval, closure basis and certification,
    each with its own status so one failing section does not hide the rest."""
    spec = _spec(spec_text)
    sections: dict[str, dict] = {}

    def section(name: str, provenance: str, fn: Callable[[], dict]):
        try:
            body = fn()
            body.update(status="ok", provenance=provenance)
        except (ValueError, ArithmeticError, RuntimeError) as exc:
            body = {"status": f"error: {exc}", "provenance": provenance}
        sections[name] = body

    counts: list[int] = []

    def do_counts():
        counts.extend(enumerate_class(spec, cfg.n_max, cfg.cap))
        check = min(cfg.n_max, 7)
        naive = _naive_counts(spec, check, cfg.workers)
        if naive != counts[:check]:
            raise ArithmeticError(f"brute force disagrees: {naive}")
        return {"counts": list(counts), "checked_to": check}

    section("counts", ORACLE_VERIFIED, do_counts)

    def do_fit():
        gf = fit_rational(Series.from_counts(counts), cfg.max_deg)
        return {"gf": str(gf) if gf else "no rational fit at bound", "fit": gf.to_json() if gf else None, "max_deg": cfg.max_deg}

    def do_growth():
        lo, hi = growth_rate(Series.from_counts(counts))
        return {"interval": [round(lo, 6), round(hi, 6)]}

    if counts:
        section("fit", HEURISTIC, do_fit)
        section("growth", HEURISTIC, do_growth)

    def do_basis():
        cb = closure_basis(spec, min(cfg.certify, 8))
        return {"basis": [str(p) for p in cb.elements], "parallel_alternations": cb.parallel_alternations, "max_len": cb.max_len}

    section("closure_basis", ORACLE_VERIFIED, do_basis)

    if isinstance(spec, GeomClass):

        def do_cert():
            nf = normal_form_automaton(_signed(spec.matrix), cfg.certify)
            if list(nf.class_counts[1:]) != counts[: cfg.certify]:
                raise ArithmeticError("automaton counts disagree with enumeration")
            return {"certified_to": nf.certified_to, "states": nf.dfa.n_states, "gf": str(automata.gf_of_dfa(nf.dfa))}

        section("certification", AUTOMATON_CERTIFIED, do_cert)
    return {"spec": spec.to_text(), "sections": sections}


def cmd_report(args, cfg: RunConfig):
    doc = build_report(args.spec, cfg)
    rows = []
    for name, body in sorted(doc["sections"].items()):
        if body["status"] != "ok":
            rows.append((name, body["status"]))
            continue
        value = {
            "counts": lambda b: _nums(b["counts"]),
            "fit": lambda b: b["gf"],
            "growth": lambda b: f"[{b['interval'][0]}, {b['interval'][1]}]",
            "closure_basis": lambda b: (" ".join(b["basis"]) or "(none)") + f" (to length {b['max_len']})",
            "certification": lambda b: f"certified to {b['certified_to']}, {b['states']} states",
        }[name](body)
        rows.append((name, f"{value}  [{body['provenance']}]"))
    return doc, _table(rows)


COMMANDS = {
    "decompose": cmd_decompose,
    "simples": cmd_simples,
    "geom": cmd_geom,
    "enumerate": cmd_enumerate,
    "fit": cmd_fit,
    "closure-basis": cmd_closure_basis,
    "frameworks": cmd_frameworks,
    "oscillations": cmd_oscillations,
    "antichain": cmd_antichain,
    "alternations": cmd_census,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, dest="n_max", help="largest length to enumerate")
    common.add_argument("--certify", type=int, help="length up to which automata are certified")
    common.add_argument("--max-deg", type=int, dest="max_deg", help="largest denominator degree for fitting")
    common.add_argument("--cap", type=int, help="enumeration length cap")
    common.add_argument("--workers", type=int, help="processes for brute-force checks")
    common.add_argument("--config", help="JSON file with defaults for the flags above")
    common.add_argument("--output-dir", dest="output", help=f"directory for JSON output (or ${OUTPUT_DIR_ENV})")
    common.add_argument("--json", action="store_true", help="print JSON instead of a table")
    common.add_argument("--csv", action="store_true", help="also write counts as CSV to the output directory")

    p = argparse.ArgumentParser(prog="permclass", description="Permutation class toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("decompose", parents=[common], help="substitution decomposition")
    s.add_argument("perm")
    s = sub.add_parser("simples", parents=[common], help="census of simple permutations")
    s.add_argument("--min", type=int, default=4)
    s.add_argument("--max", type=int, default=7)
    s = sub.add_parser("geom", parents=[common], help="geometric grid classes")
    s.add_argument("action", choices=["decode", "encode", "member", "automaton"])
    s.add_argument("matrix", help="matrix file")
    s.add_argument("value", nargs="?", default="", help="word (decode) or permutation (encode, member)")
    s = sub.add_parser("enumerate", parents=[common], help="count a class by length")
    s.add_argument("spec", help="class expression or a file holding one")
    s.add_argument("--check", type=int, default=0, help="cross-check by brute force up to this length")
    s.add_argument("--members", type=int, help="also list the members of this length")
    s = sub.add_parser("fit", parents=[common], help="fit a rational generating function")
    s.add_argument("counts", help="counts for n = 1, 2, ... (inline or a file)")
    s = sub.add_parser("closure-basis", parents=[common], help="basis of the substitution closure")
    s.add_argument("spec")
    s.add_argument("--max-len", type=int, default=6)
    s = sub.add_parser("frameworks", parents=[common], help="simple framework of a permutation")
    s.add_argument("perm")
    s.add_argument("--basis", nargs="*", default=[], help="patterns whose avoidance is tracked")
    s = sub.add_parser("oscillations", parents=[common], help="oscillation census")
    s.add_argument("--upto", type=int, default=8, dest="n")
    s = sub.add_parser("antichain", parents=[common], help="elements of the infinite antichain")
    s.add_argument("--k", type=int, default=5)
    s = sub.add_parser("alternations", parents=[common], help="simple parallel alternation census")
    s.add_argument("--min", type=int, default=4)
    s.add_argument("--max", type=int, default=12)
    s = sub.add_parser("report", parents=[common], help="one-shot report for a class")
    s.add_argument("spec", help="class expression or a file holding one")
    return p


CONFIG_KEYS = ("n_max", "certify", "max_deg", "cap", "workers", "output")


def make_config(args) -> RunConfig:
    cfg = RunConfig(command=args.command)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise DomainError(f"{args.config}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise DomainError(f"{args.config}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        unknown = set(data) - set(CONFIG_KEYS)
        if unknown:
            raise DomainError(f"{args.config}: unknown keys {sorted(unknown)}")
        for k, v in data.items():
            setattr(cfg, k, v)
    if os.environ.get(OUTPUT_DIR_ENV):
        cfg.output = os.environ[OUTPUT_DIR_ENV]
    for k in CONFIG_KEYS:
        v = getattr(args, k, None)
        if v is not None:
            setattr(cfg, k, v)
    cfg.check()
    return cfg


def _write_outputs(cfg: RunConfig, doc: dict, want_csv: bool) -> None:
    if not cfg.output:
        return
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{cfg.command}.json").write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    counts = doc.get("counts") or doc.get("sections", {}).get("counts", {}).get("counts")
    if want_csv and counts:
        with open(out / f"{cfg.command}.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "count"])
            w.writerows(enumerate(counts, 1))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = make_config(args)
        doc, table = COMMANDS[args.command](args, cfg)
        _write_outputs(cfg, doc, args.csv)
    except (DomainError, ResourceLimit, SpecSyntaxError, CertificationError) as exc:
        print(f"permclass: error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError) as exc:
        print(f"permclass: error: {exc}", file=sys.stderr)
        return 1
    if args.json:
        print(json.dumps(doc, sort_keys=True, indent=2))
    else:
        print(table)
    return 0


if __name__ == "__main__":
    sys.exit(main())
