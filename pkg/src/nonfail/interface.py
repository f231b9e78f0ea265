"""Interface files: the persisted analysis results of a module."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .analysis import AnalysisResult, FunctionInfo
from .builtins import FAILING
from .domain import DomainConfig, Signature, parse_value, render
from .inout import IOEntry
from .ir import BUILTIN_DATA, IRError
from .parser import parse_program, show_data

SUFFIX = ".nonfail.json"


class InterfaceError(IRError):
    pass


@dataclass
class Interface:
    module: str
    k: int
    datas: tuple
    functions: dict  # name -> FunctionInfo


def interface_path(directory, module: str) -> Path:
    return Path(directory) / f"{module}{SUFFIX}"


def calltype_json(ct):
    return "failing" if ct is FAILING else [render(a) for a in ct]


def interface_dict(result: AnalysisResult, program) -> dict:
    datas = [d for d in program.all_datas() if d not in BUILTIN_DATA]
    functions = {}
    for name, f in result.functions.items():
        functions[name] = {
            "arity": f.arity,
            "calltype": calltype_json(f.calltype),
            "inout": [{"args": [render(a) for a in e.args], "result": render(e.result)}
                      for e in f.inout],
            "resultvalue": render(f.result),
        }
    return {
        "module": result.module,
        "domain": {"kind": "depthk", "k": result.config.depth},
        "data": [show_data(d) for d in datas],
        "functions": functions,
    }


def write_interface(result: AnalysisResult, program, directory) -> Path:
    path = interface_path(directory, result.module)
    path.write_text(json.dumps(interface_dict(result, program), indent=2, sort_keys=True) + "\n")
    return path


def read_interface(data: dict, config: DomainConfig) -> Interface:
    try:
        module = data["module"]
        domain = data["domain"]
        if domain.get("kind") != "depthk":
            raise InterfaceError(f"interface of {module} uses unknown domain {domain.get('kind')}")
        if domain["k"] != config.depth:
            raise InterfaceError(
                f"interface of {module} was computed with depth {domain['k']}, "
                f"but the analysis uses depth {config.depth}")
        text = "(module " + module + "\n" + "\n".join(data.get("data", [])) + ")"
        datas = parse_program(text).datas
        sig = Signature(BUILTIN_DATA + datas)
        functions = {}
        for name, f in data["functions"].items():
            ct = f["calltype"]
            ct = FAILING if ct == "failing" else tuple(parse_value(a, sig) for a in ct)
            io = tuple(IOEntry(tuple(parse_value(a, sig) for a in e["args"]),
                               parse_value(e["result"], sig)) for e in f["inout"])
            arity = f.get("arity", len(ct) if ct is not FAILING else len(io[0].args) if io else 0)
            functions[name] = FunctionInfo(name, arity, ct, io, parse_value(f["resultvalue"], sig))
    except (KeyError, TypeError, ValueError) as exc:
        raise InterfaceError(f"malformed interface file: {exc}") from None
    return Interface(module, domain["k"], datas, functions)


def load_interface(path, config: DomainConfig) -> Interface:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InterfaceError(f"{path}: not valid JSON ({exc})") from None
    return read_interface(data, config)


def find_interface(module: str, search) -> Path:
    for d in search:
        p = interface_path(d, module)
        if p.exists():
            return p
    raise InterfaceError(f"missing interface file for imported module {module}")
