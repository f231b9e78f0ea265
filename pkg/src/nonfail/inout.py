"""In/out types: finite disjunctions ``a1 ... an -> a`` over-approximating
the input/output behaviour of each operation."""
from __future__ import annotations

from dataclasses import dataclass

from .domain import ANY, BOTTOM, DepthK, render
from .ir import (
    Call, Case, Cons, ConsPattern, Failed, Free, FuncDecl, Let, Lit, LitPattern,
    Or, Var,
)


@dataclass(frozen=True)
class IOEntry:
    args: tuple
    result: object

    def __str__(self) -> str:
        ins = " ".join(render(a) for a in self.args) or "ε"
        return f"{ins} -> {render(self.result)}"


def entry_key(e: IOEntry) -> tuple:
    return (tuple(render(a) for a in e.args), render(e.result))


def normalize_io(entries, dom: DepthK) -> tuple:
    """Merge entries with identical argument tuples; order canonically."""
    merged: dict = {}
    for e in entries:
        if e.args in merged:
            merged[e.args] = dom.lub(merged[e.args], e.result)
        else:
            merged[e.args] = e.result
    out = [IOEntry(args, res) for args, res in merged.items()]
    out.sort(key=entry_key)
    return tuple(out)


def is_trivial_io(io) -> bool:
    return all(e.result is ANY and all(a is ANY for a in e.args) for e in io)


def show_io(io) -> str:
    return "{" + ", ".join(str(e) for e in io) + "}"


class InOutInference:
    """Derive judgements ``env |- e : {env_i -> a_i}``.

    ``result_of(name, nargs)`` supplies the result value of a call.
    """

    def __init__(self, dom: DepthK, result_of):
        self.dom = dom
        self.result_of = result_of

    def infer_expr(self, env: dict, e) -> list:
        """List of ``(env_i, a_i, from_failed)`` triples."""
        dom = self.dom
        if isinstance(e, Var):
            return [(env, env[e.name], False)]
        if isinstance(e, Lit):
            return [(env, dom.cons(e.value), False)]
        if isinstance(e, Cons):
            return [(env, dom.cons(e.name, [env[a.name] for a in e.args]), False)]
        if isinstance(e, Call):
            return [(env, self.result_of(e.name, len(e.args)), False)]
        if isinstance(e, Failed):
            return [(env, BOTTOM, True)]
        if isinstance(e, Or):
            return self.infer_expr(env, e.left) + self.infer_expr(env, e.right)
        if isinstance(e, Free):
            return self.infer_expr({**env, **{v: ANY for v in e.vars}}, e.body)
        if isinstance(e, Let):
            return self.infer_expr({**env, e.var: ANY}, e.body)
        if isinstance(e, Case):
            assert e.scrutinee in env, e.scrutinee
            out = []
            for b in e.branches:
                p = b.pattern
                if isinstance(p, ConsPattern):
                    inner = {**env, e.scrutinee: dom.cons(p.name), **{v: ANY for v in p.vars}}
                elif isinstance(p, LitPattern):
                    inner = {**env, e.scrutinee: dom.cons(p.value)}
                else:
                    inner = env
                out.extend(self.infer_expr(inner, b.body))
            return out
        raise TypeError(e)

    def infer_inout(self, f: FuncDecl) -> tuple:
        results = self.infer_expr({p: ANY for p in f.params}, f.body)
        entries = [IOEntry(tuple(env[p] for p in f.params), a)
                   for env, a, from_failed in results if not from_failed]
        return normalize_io(entries, self.dom)


def infer_inout(f: FuncDecl, dom: DepthK, result_of) -> tuple:
    return InOutInference(dom, result_of).infer_inout(f)
