"""Result-value analysis: one abstract type per operation approximating
every value the operation can return, computed as a least fixpoint."""
from __future__ import annotations

from collections import deque

from . import builtins
from .domain import ANY, BOTTOM, DepthK
from .ir import (
    Call, Case, Cons, ConsPattern, CoreProgram, Failed, Free, Let, Lit, Or, Var,
    called_functions,
)


def callers_map(program: CoreProgram) -> dict:
    """Map each local operation to the local operations calling it."""
    callers = {f.name: set() for f in program.funcs}
    for f in program.funcs:
        if f.body is None:
            continue
        for g in called_functions(f.body):
            if g in callers:
                callers[g].add(f.name)
    return callers


class ResultValues:
    def __init__(self, program: CoreProgram, dom: DepthK, imported: dict = None):
        self.program = program
        self.dom = dom
        self.imported = imported or {}
        self.table = {f.name: BOTTOM for f in program.funcs}
        self.steps = 0

    def of_call(self, name: str, nargs: int):
        if self.program.has_function(name):
            f = self.program.function(name)
            if nargs < f.arity:
                return ANY
            if f.external is not None:
                return builtins.builtin_result(builtins.lookup(f.external), self.dom)
            return self.table[name]
        if name in self.imported:
            info = self.imported[name]
            return ANY if nargs < info.arity else info.result
        if name in builtins.BUILTINS:
            b = builtins.BUILTINS[name]
            return ANY if nargs < b.arity else builtins.builtin_result(b, self.dom)
        return ANY

    def value(self, e, env: dict):
        dom = self.dom
        if isinstance(e, Var):
            return env.get(e.name, ANY)
        if isinstance(e, Lit):
            return dom.cons(e.value)
        if isinstance(e, Cons):
            return dom.cons(e.name, [self.value(a, env) for a in e.args])
        if isinstance(e, Call):
            return self.of_call(e.name, len(e.args))
        if isinstance(e, Or):
            return dom.lub(self.value(e.left, env), self.value(e.right, env))
        if isinstance(e, Failed):
            return BOTTOM
        if isinstance(e, Free):
            return self.value(e.body, {**env, **{v: ANY for v in e.vars}})
        if isinstance(e, Let):
            return self.value(e.body, {**env, e.var: self.value(e.bound, env)})
        if isinstance(e, Case):
            out = BOTTOM
            for b in e.branches:
                inner = env
                if isinstance(b.pattern, ConsPattern) and b.pattern.vars:
                    inner = {**env, **{v: ANY for v in b.pattern.vars}}
                out = dom.lub(out, self.value(b.body, inner))
            return out
        raise TypeError(e)

    def transfer(self, name: str):
        f = self.program.function(name)
        if f.external is not None:
            return builtins.builtin_result(builtins.lookup(f.external), self.dom)
        return self.value(f.body, {p: ANY for p in f.params})

    def solve(self) -> dict:
        callers = callers_map(self.program)
        work = deque(f.name for f in self.program.funcs)
        queued = set(work)
        while work:
            name = work.popleft()
            queued.discard(name)
            self.steps += 1
            old = self.table[name]
            new = self.dom.lub(old, self.transfer(name))
            if new != old:
                self.table[name] = new
                for c in sorted(callers[name]):
                    if c not in queued:
                        work.append(c)
                        queued.add(c)
        return dict(self.table)


def infer_result_values(program: CoreProgram, dom: DepthK, imported: dict = None) -> dict:
    """Least fixpoint of the result-value transfer over all operations."""
    return ResultValues(program, dom, imported).solve()
