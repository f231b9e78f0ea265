"""Text and JSON renderings of analysis results."""
from __future__ import annotations

import json

from .analysis import AnalysisResult
from .checker import show_calltype
from .domain import render
from .inout import show_io
from .interface import calltype_json, interface_dict


def report_dict(result: AnalysisResult, program) -> dict:
    out = interface_dict(result, program)
    for name, f in result.functions.items():
        entry = out["functions"][name]
        entry["status"] = f.status
        entry["public"] = f.public
        entry["initial_calltype"] = calltype_json(f.initial_calltype)
        if f.status == "failing":
            entry["reason"] = f.reason
            entry["requirements"] = [
                {"variable": r.variable, "required": render(r.required),
                 "callsite": {"function": r.function, "callee": r.callee, "argument": r.position + 1}}
                for r in f.requirements]
    out["iterations"] = result.iterations
    out["summary"] = result.summary().as_dict()
    out["result_values"] = {n: render(f.result) for n, f in result.functions.items()}
    out["inout_types"] = {n: out["functions"][n]["inout"] for n in result.functions}
    out["diagnostics"] = list(result.diagnostics)
    return out


def render_json(reports) -> str:
    """One report object, or an array of them for several modules."""
    data = reports[0] if len(reports) == 1 else reports
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _pair(p) -> str:
    return f"{p[0]}/{p[1]}"


def render_text(result: AnalysisResult) -> str:
    lines = [f"module {result.module} (depth {result.config.depth})"]
    width = max((len(n) for n in result.functions), default=0)
    for name, f in result.functions.items():
        vis = "" if f.public else " (private)"
        lines.append(f"  {name.ljust(width)}  {f.status:<8}  CT {show_calltype(f.calltype)}{vis}")
        lines.append(f"  {' ' * width}  {'':<8}  IO {show_io(f.inout)}")
        if f.status == "failing":
            if f.reason:
                lines.append(f"  {' ' * width}  {'':<8}  reason: {f.reason}")
            for r in f.requirements:
                lines.append(f"  {' ' * width}  {'':<8}  requires {r}")
    for d in result.diagnostics:
        lines.append(f"  warning: {d}")
    s = result.summary()
    lines.append(
        f"summary: operations: {_pair(s.operations)}, non-trivial in/out: {_pair(s.inout_nontrivial)}, "
        f"initial non-trivial: {_pair(s.initial_nontrivial)}, final non-trivial: {_pair(s.final_nontrivial)}, "
        f"final failing: {_pair(s.final_failing)}, iterations: {s.iterations}, time: {s.time_ms:.1f} ms")
    return "\n".join(lines) + "\n"
