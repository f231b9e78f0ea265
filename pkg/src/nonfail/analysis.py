"""Iterated inference of call types for all operations of a module."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Optional

import networkx as nx

from . import builtins
from .builtins import FAILING
from .checker import (
    CallTypeContext, Fail, Refine, Verified, check_function, initial_calltype,
    is_trivial_calltype,
)
from .domain import BOTTOM, DepthK, DomainConfig, Signature
from .inout import InOutInference, is_trivial_io
from .ir import CoreProgram, called_functions
from .values import ResultValues

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FunctionInfo:
    """Analysis results of an operation, as stored in interface files."""
    name: str
    arity: int
    calltype: object
    inout: tuple
    result: object


@dataclass(frozen=True)
class AnalysisOptions:
    error_as_failure: bool = False
    max_iterations: int = 100

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass
class FunctionResult:
    name: str
    arity: int
    public: bool
    initial_calltype: object
    calltype: object
    inout: tuple
    result: object
    status: str = "verified"
    requirements: tuple = ()
    reason: str = ""
    checks: int = 0


@dataclass
class Summary:
    operations: tuple
    inout_nontrivial: tuple
    initial_nontrivial: tuple
    final_nontrivial: tuple
    final_failing: tuple
    iterations: int
    time_ms: float

    def as_dict(self) -> dict:
        return {
            "operations": {"public": self.operations[0], "all": self.operations[1]},
            "inout_nontrivial": {"public": self.inout_nontrivial[0], "all": self.inout_nontrivial[1]},
            "initial_calltypes_nontrivial": {"public": self.initial_nontrivial[0], "all": self.initial_nontrivial[1]},
            "final_calltypes_nontrivial": {"public": self.final_nontrivial[0], "all": self.final_nontrivial[1]},
            "final_failing": {"public": self.final_failing[0], "all": self.final_failing[1]},
            "iterations": self.iterations,
            "time_ms": self.time_ms,
        }


@dataclass
class AnalysisResult:
    module: str
    config: DomainConfig
    options: AnalysisOptions
    functions: dict
    iterations: int
    elapsed_ms: float
    diagnostics: list = field(default_factory=list)
    domain: Optional[DepthK] = None

    def calltype(self, name: str):
        return self.functions[name].calltype

    def status(self, name: str) -> str:
        return self.functions[name].status

    def summary(self) -> Summary:
        fs = list(self.functions.values())

        def count(pred):
            return (sum(1 for f in fs if f.public and pred(f)), sum(1 for f in fs if pred(f)))

        return Summary(
            operations=count(lambda f: True),
            inout_nontrivial=count(lambda f: not is_trivial_io(f.inout)),
            initial_nontrivial=count(lambda f: not is_trivial_calltype(f.initial_calltype)),
            final_nontrivial=count(lambda f: not is_trivial_calltype(f.calltype)),
            final_failing=count(lambda f: f.calltype is FAILING),
            iterations=self.iterations,
            time_ms=self.elapsed_ms,
        )

    def infos(self) -> dict:
        return {n: FunctionInfo(n, f.arity, f.calltype, f.inout, f.result)
                for n, f in self.functions.items()}


def call_graph(program: CoreProgram) -> nx.DiGraph:
    """Edges from each analysed operation to the local operations it calls."""
    g = nx.DiGraph()
    local = [f for f in program.funcs if f.external is None]
    names = {f.name for f in local}
    for f in local:
        g.add_node(f.name)
    for f in local:
        for callee in called_functions(f.body):
            if callee in names:
                g.add_edge(f.name, callee)
    return g


def scc_order(graph: nx.DiGraph, declared: list) -> list:
    """Operations grouped by strongly connected component, callees first."""
    position = {n: i for i, n in enumerate(declared)}
    cond = nx.condensation(graph)
    order = list(nx.lexicographical_topological_sort(
        cond, key=lambda c: min(position[n] for n in cond.nodes[c]["members"])))
    out = []
    for c in reversed(order):
        out.extend(sorted(cond.nodes[c]["members"], key=position.get))
    return out


def transitive_callers(graph: nx.DiGraph, names) -> set:
    out = set()
    for n in names:
        out |= nx.ancestors(graph, n)
    return out


def analyze_fixpoint(program: CoreProgram, config: DomainConfig = DomainConfig(),
                     options: AnalysisOptions = AnalysisOptions(),
                     imported: Optional[dict] = None, order: Optional[list] = None) -> AnalysisResult:
    """Infer result values, in/out types and call types, then refine call
    types until every operation checks under its call type or fails."""
    start = time.perf_counter()
    imported = imported or {}
    dom = DepthK(Signature.of(program), config)
    values = ResultValues(program, dom, imported)
    results = values.solve()

    iot = InOutInference(dom, values.of_call)
    inouts, initial = {}, {}
    for f in program.funcs:
        if f.external is not None:
            b = builtins.lookup(f.external)
            inouts[f.name] = builtins.builtin_inout(b, dom)
        else:
            inouts[f.name] = iot.infer_inout(f)
        initial[f.name] = initial_calltype(f, dom, options.error_as_failure)

    calltypes = dict(initial)
    ctx = CallTypeContext(program, dom, calltypes, inouts, imported, options.error_as_failure)
    graph = call_graph(program)
    declared = [f.name for f in program.funcs if f.external is None]
    if order is None:
        order = scc_order(graph, declared)
    last_outcome: dict = {}
    checks = {n: 0 for n in declared}
    diagnostics = []

    worklist = {n for n in declared if calltypes[n] is not FAILING}
    iterations = 0
    while worklist:
        if iterations >= options.max_iterations:
            msg = f"iteration budget of {options.max_iterations} exhausted with {len(worklist)} operations pending"
            log.warning(msg)
            diagnostics.append(msg)
            break
        iterations += 1
        changed = set()
        for name in order:
            if name not in worklist or calltypes[name] is FAILING:
                continue
            f = program.function(name)
            outcome = check_function(f, ctx)
            checks[name] += 1
            last_outcome[name] = outcome
            if isinstance(outcome, Verified):
                continue
            new = FAILING
            if isinstance(outcome, Refine):
                new = _refine(dom, f.params, calltypes[name], outcome.requirements)
            calltypes[name] = new
            changed.add(name)
        worklist = {n for n in changed | transitive_callers(graph, changed)
                    if calltypes[n] is not FAILING}

    functions = {}
    for f in program.funcs:
        if f.external is not None:
            continue
        ct = calltypes[f.name]
        fr = FunctionResult(f.name, f.arity, f.public, initial[f.name], ct, inouts[f.name],
                            results[f.name], checks=checks.get(f.name, 0))
        outcome = last_outcome.get(f.name)
        if ct is FAILING:
            fr.status = "failing"
            if isinstance(outcome, (Fail, Refine)):
                fr.requirements = outcome.requirements
            fr.reason = outcome.reason if isinstance(outcome, Fail) else (
                "requirement on a non-parameter variable" if outcome is not None else "initial call type is failing")
        elif ct != initial[f.name]:
            fr.status = "refined"
        functions[f.name] = fr
    elapsed = (time.perf_counter() - start) * 1000.0
    return AnalysisResult(program.module, config, options, functions, iterations, elapsed,
                          diagnostics, dom)


def _refine(dom: DepthK, params, ct, requirements):
    """Restrict a call type by requirements on parameters, or give up."""
    index = {p: i for i, p in enumerate(params)}
    if not all(r.variable in index for r in requirements):
        return FAILING
    new = list(ct)
    for r in requirements:
        i = index[r.variable]
        new[i] = dom.glb(new[i], r.required)
        if new[i] is BOTTOM:
            return FAILING
    new = tuple(new)
    if new == tuple(ct):
        return FAILING
    return new
