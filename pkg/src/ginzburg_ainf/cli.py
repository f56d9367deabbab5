"""Command-line front end.

JSON is the canonical output and the text format is rendered from it.
Exit codes: 0 success, 1 violations or mismatches, 2 input errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from .algebra import hilbert_series, hilbert_to_json, preprojective
from .ar_mesh import NotDynkinError, knit, nakayama_and_N
from .ginzburg import DifferentialError, build_ginzburg, fraction_str, truncate_dg
from .quiver import Quiver, QuiverError, dynkin_type, is_acyclic, parse_quiver
from .transfer import (AInfinityTable, HomologyClass, Retraction, RetractionError, check_ainf_relations,
                       transfer)
from .translation import (HomologyAlgebra, build_twisted, build_U, homology_comparison, twisted_comparison,
                          u_equivariant_gauge, u_generator_labels)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    quiver_text: str
    max_weight: int = 4
    n_max: int = 6
    depth: int | None = None
    fmt: str = "json"
    out: str | None = None
    mode: str = "thm42"
    of: str = "homology"
    gauge: str = "auto"
    table_path: str | None = None
    workers: int = 1


# -- helpers -------------------------------------------------------------------


def thread_cap(env: dict | None = None) -> int:
    """Validated ``GINZBURG_THREADS``; the pipelines themselves run serially."""
    raw = (os.environ if env is None else env).get("GINZBURG_THREADS")
    if raw is None or raw == "":
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"GINZBURG_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InputError(f"GINZBURG_THREADS must be a positive integer, got {raw!r}")
    return n


def load_quiver(text: str) -> Quiver:
    if not text.strip():
        raise InputError("empty quiver file")
    q = parse_quiver(text)
    if not q.vertices:
        raise InputError("empty quiver file")
    if not is_acyclic(q):
        raise InputError("quiver is not acyclic")
    return q


def minimal_table(q: Quiver, max_weight: int, n_max: int, gauge: str = "auto"):
    """Truncation, retraction, transfer and (for Dynkin input) the u-equivariant gauge."""
    c = truncate_dg(build_ginzburg(q), max_weight)
    r = Retraction(c)
    r.verify()
    table = transfer(c, r, n_max)
    info: dict = {"kind": "none"}
    if gauge == "auto" and dynkin_type(q) is not None:
        dyn = nakayama_and_N(q)
        labels = u_generator_labels(table, dyn)
        f2, gauged = u_equivariant_gauge(table, labels.values())
        if gauged is None:
            info = {"kind": "u-equivariant", "solved": False}
        else:
            table = gauged
            info = {
                "kind": "u-equivariant", "solved": True,
                "f2": [{"inputs": list(k), "output": [{"label": lab, "coeff": fraction_str(v)}
                                                       for lab, v in sorted(val.items())]}
                       for k, val in sorted(f2.items()) if val],
            }
    return c, r, table, info


def table_from_json(data: dict) -> AInfinityTable:
    try:
        classes = {}
        for h in data["classes"]:
            block = (str(h["source"]), str(h["target"]), int(h["weight"]), int(h["degree"]))
            classes[h["label"]] = HomologyClass(h["label"], block, ())
        table = AInfinityTable(int(data["max_weight"]), int(data["n_max"]), classes)
        for op in data["operations"]:
            inputs = tuple(op["inputs"])
            for x in inputs:
                if x not in classes:
                    raise InputError(f"unknown class {x!r}")
            out = {o["label"]: Fraction(o["coeff"]) for o in op["output"]}
            table.mu.setdefault(int(op["n"]), {})[inputs] = {k: v for k, v in out.items() if v}
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed table: {exc}") from None
    return table


# -- subcommands ---------------------------------------------------------------


def cmd_minimal_model(cfg: RunConfig) -> tuple[int, dict]:
    q = load_quiver(cfg.quiver_text)
    c, r, table, gauge = minimal_table(q, cfg.max_weight, cfg.n_max, cfg.gauge)
    report = check_ainf_relations(table, c, cfg.n_max, r)
    counts = {str(n): len(table.entries(n)) for n in range(2, cfg.n_max + 1)}
    out = {
        "subcommand": "minimal-model",
        "quiver": q.to_text(),
        "max_weight": cfg.max_weight,
        "n_max": cfg.n_max,
        "gauge": gauge,
        "nonzero_entries": counts,
        "table": table.to_json(),
        "relations": report.to_json(),
        "violations": len(report.violations),
    }
    return (EXIT_OK if report.ok else EXIT_FAIL), out


def cmd_check(cfg: RunConfig) -> tuple[int, dict]:
    if cfg.table_path is not None:
        with open(cfg.table_path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InputError(f"table is not JSON: {exc}") from None
        table = table_from_json(data.get("table", data))
        report = check_ainf_relations(table)
        out = {"subcommand": "check", "source": "table", "relations": report.to_json(),
               "violations": len(report.violations)}
        return (EXIT_OK if report.ok else EXIT_FAIL), out
    q = load_quiver(cfg.quiver_text)
    out: dict = {"subcommand": "check", "quiver": q.to_text(), "max_weight": cfg.max_weight, "n_max": cfg.n_max}
    failures = 0
    c = truncate_dg(build_ginzburg(q), cfg.max_weight, verify=False)
    try:
        out["differential"] = c.verify()
    except DifferentialError as exc:
        out["differential"] = {"error": str(exc)}
        out["violations"] = 1
        return EXIT_FAIL, out
    r = Retraction(c)
    try:
        out["retraction"] = r.verify()
    except RetractionError as exc:
        out["retraction"] = {"error": str(exc)}
        out["violations"] = 1
        return EXIT_FAIL, out
    table = transfer(c, r, cfg.n_max)
    report = check_ainf_relations(table, c, cfg.n_max, r)
    out["relations"] = report.to_json()
    failures += len(report.violations)
    out["violations"] = failures
    return (EXIT_OK if failures == 0 else EXIT_FAIL), out


def cmd_compare(cfg: RunConfig) -> tuple[int, dict]:
    q = load_quiver(cfg.quiver_text)
    if cfg.mode == "thm55":
        if dynkin_type(q) is None:
            raise InputError("thm55 mode needs a Dynkin quiver")
        report, _, _ = twisted_comparison(q, cfg.max_weight)
        pair = ["twisted polynomial algebra", "translation algebra"]
    else:
        c = truncate_dg(build_ginzburg(q), cfg.max_weight)
        r = Retraction(c)
        report, _, _ = homology_comparison(c, r, cfg.max_weight)
        pair = ["translation algebra", "homology"]
    out = {"subcommand": "compare", "mode": cfg.mode, "quiver": q.to_text(), "max_weight": cfg.max_weight,
           "compared": pair}
    out.update(report.to_json())
    out["violations"] = len(report.mismatches)
    return (EXIT_OK if report.ok else EXIT_FAIL), out


def cmd_ar_quiver(cfg: RunConfig) -> tuple[int, dict | str]:
    q = load_quiver(cfg.quiver_text)
    depth = cfg.depth
    if depth is None:
        depth = nakayama_and_N(q).depth if dynkin_type(q) is not None else 4
    if depth < 1:
        raise InputError("depth must be at least 1")
    frag = knit(q, depth)
    if cfg.fmt == "dot":
        return EXIT_OK, frag.to_dot()
    out = {"subcommand": "ar-quiver", "unshifted": len(frag.unshifted())}
    out.update(frag.to_json())
    if dynkin_type(q) is not None:
        dyn = nakayama_and_N(q)
        out["nakayama"] = dict(sorted(dyn.nu.items()))
        out["shift_steps"] = dict(sorted(dyn.N.items()))
    out["mesh_additivity"] = frag.mesh_additivity_holds()
    out["violations"] = 0 if out["mesh_additivity"] else 1
    return (EXIT_OK if out["mesh_additivity"] else EXIT_FAIL), out


def cmd_hilbert(cfg: RunConfig) -> tuple[int, dict]:
    q = load_quiver(cfg.quiver_text)
    w = cfg.max_weight
    if cfg.of == "preprojective":
        alg = preprojective(q, w)
    elif cfg.of == "homology":
        c = truncate_dg(build_ginzburg(q), w)
        alg = HomologyAlgebra(c, Retraction(c))
    elif cfg.of == "translation":
        alg = build_U(q, w)
    else:
        if dynkin_type(q) is None:
            raise InputError("the twisted polynomial algebra needs a Dynkin quiver")
        alg = build_twisted(q, w)
    out = {"subcommand": "hilbert", "of": cfg.of, "quiver": q.to_text(), "max_weight": w}
    out.update(hilbert_to_json(hilbert_series(alg)))
    return EXIT_OK, out


def cmd_dump(cfg: RunConfig) -> tuple[int, dict]:
    q = load_quiver(cfg.quiver_text)
    c = truncate_dg(build_ginzburg(q), cfg.max_weight)
    out = {"subcommand": "dump"}
    out.update(c.to_json())
    return EXIT_OK, out


COMMANDS = {
    "minimal-model": cmd_minimal_model,
    "check": cmd_check,
    "compare": cmd_compare,
    "ar-quiver": cmd_ar_quiver,
    "hilbert": cmd_hilbert,
    "dump": cmd_dump,
}


# -- rendering -----------------------------------------------------------------


def render_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def render_text(data) -> str:
    lines = []
    for key in sorted(data):
        val = data[key]
        if isinstance(val, (dict, list)):
            size = len(val)
            lines.append(f"{key}: <{size} {'entries' if isinstance(val, dict) else 'items'}>")
        elif isinstance(val, str) and "\n" in val:
            lines.append(f"{key}:")
            lines.extend("  " + ln for ln in val.rstrip("\n").splitlines())
        else:
            lines.append(f"{key}: {val}")
    return "\n".join(lines) + "\n"


# -- entry point ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ginzburg-ainf",
                                description="Minimal A-infinity models of Ginzburg algebras of acyclic quivers.")
    sub = p.add_subparsers(dest="subcommand", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--quiver", metavar="PATH", default="-", help="quiver file, '-' for stdin")
        s.add_argument("--wmax", type=int, default=4, help="weight truncation (default 4)")
        s.add_argument("--nmax", type=int, default=6, help="highest arity transferred (default 6)")
        s.add_argument("--format", dest="fmt", default="json",
                       choices=["json", "text", "dot"] if name == "ar-quiver" else ["json", "text"])
        s.add_argument("--out", metavar="PATH", default=None)
        if name == "ar-quiver":
            s.add_argument("--depth", type=int, default=None)
        if name == "compare":
            s.add_argument("--mode", choices=["thm42", "thm55"], default="thm42")
        if name == "hilbert":
            s.add_argument("--of", choices=["homology", "preprojective", "translation", "twisted"],
                           default="homology")
        if name == "minimal-model":
            s.add_argument("--gauge", choices=["auto", "none"], default="auto",
                           help="auto applies the u-equivariant gauge to Dynkin input")
        if name == "check":
            s.add_argument("--table", dest="table_path", metavar="PATH", default=None,
                           help="check a stored minimal-model table instead of recomputing")
    return p


def _read_quiver(path: str, stdin) -> str:
    if path == "-":
        return stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def main(argv: list[str] | None = None, stdin=None, stdout=None, stderr=None) -> int:
    stdin = sys.stdin if stdin is None else stdin
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        workers = thread_cap()
        if args.wmax < 1:
            raise InputError("--wmax must be at least 1")
        if args.nmax < 2:
            raise InputError("--nmax must be at least 2")
        needs_quiver = not (args.subcommand == "check" and args.table_path is not None)
        text = _read_quiver(args.quiver, stdin) if needs_quiver else ""
        cfg = RunConfig(
            subcommand=args.subcommand, quiver_text=text, max_weight=args.wmax, n_max=args.nmax,
            depth=getattr(args, "depth", None), fmt=args.fmt, out=args.out,
            mode=getattr(args, "mode", "thm42"), of=getattr(args, "of", "homology"),
            gauge=getattr(args, "gauge", "auto"), table_path=getattr(args, "table_path", None),
            workers=workers,
        )
        code, data = COMMANDS[cfg.subcommand](cfg)
    except (InputError, QuiverError, NotDynkinError, OSError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    if isinstance(data, str):
        text_out = data
    elif cfg.fmt == "text":
        text_out = render_text(data)
    else:
        text_out = render_json(data)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text_out)
    else:
        stdout.write(text_out)
    return code


if __name__ == "__main__":
    sys.exit(main())
