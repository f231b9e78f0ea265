"""Command-line driver: ``nonfail analyze`` and ``nonfail verify``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import builtins
from .analysis import AnalysisOptions
from .builtins import FAILING
from .checker import is_trivial_calltype
from .domain import DomainConfig
from .interface import InterfaceError, interface_path, load_interface, write_interface
from .interp import EvalConfig, Evaluator, check_calltype_oracle, check_inout_oracle
from .ir import IRError, called_functions
from .pipeline import analyze_module, import_order, link, read_module
from .report import render_json, render_text, report_dict

log = logging.getLogger("nonfail")


def positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nonfail", description="Infer and verify non-failure conditions of kernel programs.")
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("inputs", nargs="+", type=Path, help="module source files (.fcir)")
    common.add_argument("--depth", type=positive, default=1, help="depth k of the abstract domain")
    common.add_argument("--error-as-failure", action="store_true",
                        help="treat calls to error like failures")
    common.add_argument("--max-iterations", type=positive, default=100)
    common.add_argument("--include", action="append", type=Path, default=[],
                        help="directory searched for interface files of imported modules")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("-v", "--verbose", action="store_true")

    a = sub.add_parser("analyze", parents=[common], help="infer call types and write interface files")
    a.add_argument("--strict", action="store_true", help="exit with status 2 if any operation is failing")
    a.add_argument("--out-dir", type=Path, default=None,
                   help="where to write interface files (default: next to each input)")

    v = sub.add_parser("verify", parents=[common], help="check analysis results with the evaluator")
    v.add_argument("--term-size", type=positive, default=4)
    v.add_argument("--step-budget", type=positive, default=10000)
    return p


def _search_path(opts, module) -> list:
    dirs = list(opts.include)
    if module.path is not None:
        dirs.append(module.path.parent)
    if getattr(opts, "out_dir", None) is not None:
        dirs.append(opts.out_dir)
    return dirs


def _load(opts):
    modules = [read_module(p) for p in opts.inputs]
    return import_order(modules)


def _error(msg: str) -> int:
    print(f"nonfail: error: {msg}", file=sys.stderr)
    return 1


def run_analyze(opts) -> int:
    config = DomainConfig(depth=opts.depth)
    options = AnalysisOptions(opts.error_as_failure, opts.max_iterations)
    interfaces, reports, texts = {}, [], []
    any_failing = False
    try:
        for module in _load(opts):
            done = analyze_module(module, interfaces, _search_path(opts, module), config, options)
            out_dir = opts.out_dir or (module.path.parent if module.path else Path.cwd())
            write_interface(done.result, done.program, out_dir)
            reports.append(report_dict(done.result, done.program))
            texts.append(render_text(done.result))
            any_failing |= any(f.calltype is FAILING for f in done.result.functions.values())
    except (IRError, OSError) as exc:
        return _error(str(exc))
    sys.stdout.write(render_json(reports) if opts.format == "json" else "\n".join(texts))
    return 2 if opts.strict and any_failing else 0


def run_verify(opts) -> int:
    config = DomainConfig(depth=opts.depth)
    options = AnalysisOptions(opts.error_as_failure, opts.max_iterations)
    cfg = EvalConfig(step_budget=opts.step_budget, free_term_size=opts.term_size,
                     error_as_failure=opts.error_as_failure)
    interfaces = {}
    total = 0
    summary = []
    try:
        for module in _load(opts):
            search = _search_path(opts, module)
            done = analyze_module(module, interfaces, search, config, options)
            infos = done.result.infos()
            source = "computed"
            stored = next((interface_path(d, module.name) for d in search
                           if interface_path(d, module.name).exists()), None)
            if stored is not None:
                try:
                    infos = load_interface(stored, config).functions
                    source = str(stored)
                except InterfaceError as exc:
                    log.warning("ignoring %s: %s", stored, exc)
            lines, found = _verify_module(done, infos, search, cfg)
            total += found
            summary.append({"module": module.name, "analysis": source,
                            "counterexamples": found, "lines": lines})
    except (IRError, OSError) as exc:
        return _error(str(exc))
    if opts.format == "json":
        import json
        print(json.dumps(summary, indent=2, sort_keys=True))
    else:
        for s in summary:
            print(f"module {s['module']} (analysis: {s['analysis']})")
            for line in s["lines"]:
                print("  " + line)
            print(f"  counterexamples: {s['counterexamples']}")
    return 0 if total == 0 else 1


def _verify_module(done, infos: dict, search, cfg: EvalConfig):
    linked, missing = link(done.program, search)
    local = {f.name for f in done.program.funcs if f.external is None}
    nontrivial = {n for n, i in infos.items() if not is_trivial_calltype(i.calltype)}
    ev = Evaluator(linked, cfg, exclude_functions=nontrivial)
    lines, found = [], 0
    if missing:
        lines.append("note: sources of " + ", ".join(missing) + " not found; "
                     "operations using them are skipped")
    for name in sorted(local, key=[f.name for f in done.program.funcs].index):
        if not _closed(linked, name):
            lines.append(f"{name}: skipped (depends on operations without source)")
            continue
        info = infos[name]
        reports = []
        if info.calltype is not FAILING:
            reports.append(check_calltype_oracle(name, info.calltype, linked, evaluator=ev))
        reports.append(check_inout_oracle(name, info.inout, linked, evaluator=ev))
        for r in reports:
            found += len(r.counterexamples)
            status = "ok" if r.ok else f"{len(r.counterexamples)} counterexample(s)"
            note = ""
            if r.tuples == 0 and r.kind == "calltype":
                note = f" (vacuous: no argument tuples of size <= {cfg.free_term_size} satisfy the call type)"
            elif r.cutoffs and r.values == 0 and r.tuples:
                note = " (warning: step budget too small, only cutoffs observed)"
            lines.append(f"{name} {r.kind}: {status}, {r.tuples} tuple(s){note}")
            for c in r.counterexamples:
                lines.append(f"  counterexample: {c}")
    return lines, found


def _closed(program, name) -> bool:
    """Whether every operation reachable from ``name`` can be evaluated."""
    seen, todo = set(), [name]
    while todo:
        n = todo.pop()
        if n in seen:
            continue
        seen.add(n)
        if not program.has_function(n):
            if n not in builtins.BUILTINS:
                return False
            continue
        f = program.function(n)
        if f.body is not None:
            todo.extend(called_functions(f.body))
    return True


def main(argv=None) -> int:
    opts = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if opts.verbose else logging.WARNING,
                        format="nonfail: %(levelname)s: %(message)s")
    if opts.command == "analyze":
        return run_analyze(opts)
    return run_verify(opts)


if __name__ == "__main__":
    sys.exit(main())
