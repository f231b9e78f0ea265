"""Loading modules, resolving imports and running the analysis end to end."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import networkx as nx

from .analysis import AnalysisOptions, AnalysisResult, analyze_fixpoint
from .domain import DomainConfig
from .interface import Interface, InterfaceError, find_interface, load_interface
from .ir import BUILTIN_DATA, CoreProgram
from .normalize import normalize
from .parser import ParseError, check_program, parse_program

SOURCE_SUFFIX = ".fcir"


@dataclass
class Module:
    path: Optional[Path]
    raw: CoreProgram

    @property
    def name(self) -> str:
        return self.raw.module


def read_module(path) -> Module:
    path = Path(path)
    return Module(path, parse_program(path.read_text(), validate=False))


def import_order(modules: list) -> list:
    """Modules sorted so that every module follows the ones it imports."""
    by_name = {m.name: m for m in modules}
    g = nx.DiGraph()
    g.add_nodes_from(by_name)
    for m in modules:
        for imp in m.raw.imports:
            if imp in by_name:
                g.add_edge(imp, m.name)
    try:
        names = list(nx.lexicographical_topological_sort(g))
    except nx.NetworkXUnfeasible:
        raise InterfaceError("cyclic imports between " + ", ".join(sorted(by_name))) from None
    return [by_name[n] for n in names]


def resolve_imports(raw: CoreProgram, interfaces: dict, search, config: DomainConfig) -> list:
    """Interfaces of the imported modules, from this run or from disk."""
    out = []
    for imp in raw.imports:
        if imp not in interfaces:
            interfaces[imp] = load_interface(find_interface(imp, search), config)
        out.append(interfaces[imp])
    return out


def prepare(raw: CoreProgram, imports: list) -> CoreProgram:
    """Validate against the imported interfaces and normalize."""
    datas, seen = [], {d.name for d in raw.datas}
    known = {}
    for itf in imports:
        for d in itf.datas:
            if d.name not in seen:
                seen.add(d.name)
                datas.append(d)
        known.update({n: f.arity for n, f in itf.functions.items()})
    program = dataclasses.replace(raw, imported_datas=tuple(datas))
    diags = check_program(program, known_functions=known)
    if diags:
        raise ParseError(diags)
    return normalize(program)


def imported_infos(imports: list) -> dict:
    infos = {}
    for itf in imports:
        infos.update(itf.functions)
    return infos


@dataclass
class Analyzed:
    module: Module
    program: CoreProgram
    result: AnalysisResult


def analyze_module(module: Module, interfaces: dict, search, config: DomainConfig,
                   options: AnalysisOptions) -> Analyzed:
    imports = resolve_imports(module.raw, interfaces, search, config)
    program = prepare(module.raw, imports)
    result = analyze_fixpoint(program, config, options, imported_infos(imports))
    datas = tuple(d for d in program.all_datas() if d not in BUILTIN_DATA)
    interfaces[module.name] = Interface(module.name, config.depth, datas, result.infos())
    return Analyzed(module, program, result)


def link(program: CoreProgram, search, _seen=None) -> tuple:
    """A closed program with the rules of all imported modules whose sources
    can be found, and the names of modules whose sources are missing."""
    seen = set() if _seen is None else _seen
    seen.add(program.module)
    datas, funcs, missing = list(program.datas), list(program.funcs), []
    names = {f.name for f in funcs}
    dnames = {d.name for d in datas}
    for imp in program.imports:
        if imp in seen:
            continue
        src = next((Path(d) / f"{imp}{SOURCE_SUFFIX}" for d in search
                    if (Path(d) / f"{imp}{SOURCE_SUFFIX}").exists()), None)
        if src is None:
            missing.append(imp)
            continue
        sub, sub_missing = link(parse_program(src.read_text(), validate=False), search, seen)
        missing += sub_missing
        datas += [d for d in sub.datas if d.name not in dnames]
        dnames |= {d.name for d in sub.datas}
        funcs += [f for f in sub.funcs if f.name not in names]
        names |= {f.name for f in sub.funcs}
    linked = CoreProgram(program.module, (), tuple(datas), tuple(funcs))
    if _seen is None:
        linked = normalize(linked)
    return linked, missing


CORPUS = ("Examples", "HdHead", "HdFree", "Split", "Errors", "Prelude")


def corpus_path(name: str) -> Path:
    return Path(__file__).parent / "corpus" / f"{name}{SOURCE_SUFFIX}"


def load_corpus(name: str) -> CoreProgram:
    """A bundled corpus module, parsed and normalized."""
    return normalize(parse_program(corpus_path(name).read_text()))
