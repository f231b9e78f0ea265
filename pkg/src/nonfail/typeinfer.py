"""Hindley-Milner style type reconstruction for kernel programs.

The analyses are untyped; types are only needed by the oracle to
enumerate well-typed arguments and guesses for free variables.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import networkx as nx

from . import builtins
from .ir import (
    Call, Case, Cons, ConsPattern, CoreProgram, Failed, Free,
    IRError, Let, Lit, LitPattern, Literal, Or, TCon, TVar, Var, called_functions,
)
from .terms import DEFAULT_TYPE


class TypeInferenceError(IRError):
    pass


def arrow(a, b) -> TCon:
    return TCon("->", (a, b))


def split_arrows(t, n: int):
    args = []
    for _ in range(n):
        if not (isinstance(t, TCon) and t.name == "->"):
            raise TypeInferenceError(f"expected a function type, got {t}")
        args.append(t.args[0])
        t = t.args[1]
    return tuple(args), t


def type_vars(t) -> set:
    if isinstance(t, TVar):
        return {t.name}
    return set().union(*(type_vars(a) for a in t.args)) if t.args else set()


def rename(t, mapping: dict):
    if isinstance(t, TVar):
        return mapping.get(t.name, t)
    return TCon(t.name, tuple(rename(a, mapping) for a in t.args))


def default_ground(t):
    """Instantiate every remaining type variable with the default type."""
    if isinstance(t, TVar):
        return DEFAULT_TYPE
    return TCon(t.name, tuple(default_ground(a) for a in t.args))


@dataclass(frozen=True)
class Scheme:
    vars: tuple
    type: object


class Inference:
    def __init__(self, program: CoreProgram):
        self.program = program
        self.subst: dict = {}
        self.counter = itertools.count()
        self.schemes: dict = {}
        self.var_types: dict = {}  # (function, variable) -> type

    def fresh(self) -> TVar:
        return TVar(f"'t{next(self.counter)}")

    def resolve(self, t):
        while isinstance(t, TVar) and t.name in self.subst:
            t = self.subst[t.name]
        return t

    def zonk(self, t):
        t = self.resolve(t)
        if isinstance(t, TVar):
            return t
        return TCon(t.name, tuple(self.zonk(a) for a in t.args))

    def occurs(self, name: str, t) -> bool:
        t = self.resolve(t)
        if isinstance(t, TVar):
            return t.name == name
        return any(self.occurs(name, a) for a in t.args)

    def unify(self, a, b, where: str = ""):
        a, b = self.resolve(a), self.resolve(b)
        if isinstance(a, TVar):
            if isinstance(b, TVar) and a.name == b.name:
                return
            if self.occurs(a.name, b):
                raise TypeInferenceError(f"infinite type {a} = {self.zonk(b)} {where}")
            self.subst[a.name] = b
            return
        if isinstance(b, TVar):
            self.unify(b, a, where)
            return
        if a.name != b.name or len(a.args) != len(b.args):
            raise TypeInferenceError(f"cannot unify {self.zonk(a)} with {self.zonk(b)} {where}")
        for x, y in zip(a.args, b.args):
            self.unify(x, y, where)

    def instantiate(self, s: Scheme):
        mapping = {v: self.fresh() for v in s.vars}
        return rename(s.type, mapping)

    # -- constructors and operations
    def constructor_type(self, name: str):
        d = self.program.data(self.program.type_of_constructor(name))
        c = d.constructor(name)
        mapping = {v: self.fresh() for v in d.tyvars}
        result = TCon(d.name, tuple(mapping[v] for v in d.tyvars))
        if c.fields is None:
            fields = [self.fresh() for _ in range(c.arity)]
        else:
            fields = [rename(f, mapping) for f in c.fields]
        return fields, result

    def function_type(self, name: str):
        if name in self.schemes:
            s = self.schemes[name]
            return self.instantiate(s) if isinstance(s, Scheme) else s
        if self.program.has_function(name):
            f = self.program.function(name)
            if f.external is not None:
                b = builtins.lookup(f.external)
                return self.instantiate(Scheme(tuple(type_vars(b.type)), b.type))
        if name in builtins.BUILTINS:
            b = builtins.BUILTINS[name]
            return self.instantiate(Scheme(tuple(type_vars(b.type)), b.type))
        # imported operation without type information
        return self.fresh()

    # -- expressions
    def infer(self, e, env: dict, fname: str):
        if isinstance(e, Var):
            return env[e.name]
        if isinstance(e, Lit):
            return TCon(e.value.type_name)
        if isinstance(e, Failed):
            return self.fresh()
        if isinstance(e, Cons):
            fields, result = self.constructor_type(e.name)
            for a, ft in zip(e.args, fields):
                self.unify(self.infer(a, env, fname), ft, f"in {fname}")
            return result
        if isinstance(e, Call):
            t = self.function_type(e.name)
            for a in e.args:
                res = self.fresh()
                self.unify(t, arrow(self.infer(a, env, fname), res), f"in call of {e.name} in {fname}")
                t = res
            return t
        if isinstance(e, Or):
            t = self.infer(e.left, env, fname)
            self.unify(t, self.infer(e.right, env, fname), f"in {fname}")
            return t
        if isinstance(e, Free):
            env = dict(env)
            for v in e.vars:
                env[v] = self.fresh()
                self.var_types[(fname, v)] = env[v]
            return self.infer(e.body, env, fname)
        if isinstance(e, Let):
            t = self.infer(e.bound, env, fname)
            self.var_types[(fname, e.var)] = t
            return self.infer(e.body, {**env, e.var: t}, fname)
        if isinstance(e, Case):
            scrut = env[e.scrutinee]
            result = self.fresh()
            for b in e.branches:
                inner = env
                p = b.pattern
                if isinstance(p, ConsPattern):
                    fields, ctype = self.constructor_type(p.name)
                    self.unify(scrut, ctype, f"in case of {fname}")
                    inner = dict(env)
                    for v, ft in zip(p.vars, fields):
                        inner[v] = ft
                        self.var_types[(fname, v)] = ft
                elif isinstance(p, LitPattern):
                    self.unify(scrut, TCon(p.value.type_name), f"in case of {fname}")
                self.unify(result, self.infer(b.body, inner, fname), f"in case of {fname}")
            return result
        raise TypeError(e)

    def run(self):
        local = [f for f in self.program.funcs if f.external is None]
        graph = nx.DiGraph()
        graph.add_nodes_from(f.name for f in local)
        names = set(graph.nodes)
        for f in local:
            for g in called_functions(f.body):
                if g in names:
                    graph.add_edge(f.name, g)
        cond = nx.condensation(graph)
        for c in reversed(list(nx.topological_sort(cond))):
            members = sorted(cond.nodes[c]["members"])
            for name in members:
                f = self.program.function(name)
                params = [self.fresh() for _ in f.params]
                res = self.fresh()
                t = res
                for p in reversed(params):
                    t = arrow(p, t)
                self.schemes[name] = t
            for name in members:
                f = self.program.function(name)
                params, res = split_arrows(self.schemes[name], f.arity)
                env = dict(zip(f.params, params))
                for p, t in env.items():
                    self.var_types[(name, p)] = t
                self.unify(res, self.infer(f.body, env, name), f"in {name}")
            for name in members:
                t = self.zonk(self.schemes[name])
                self.schemes[name] = Scheme(tuple(sorted(type_vars(t))), t)
        return self


@dataclass
class ProgramTypes:
    program: CoreProgram
    inference: Inference

    def signature(self, name: str):
        """Argument and result types of a local operation, defaults applied."""
        f = self.program.function(name)
        t = self.inference.function_type(name)
        t = default_ground(self.inference.zonk(t))
        return split_arrows(t, f.arity)

    def variable_type(self, function: str, var: str):
        return default_ground(self.inference.zonk(self.inference.var_types[(function, var)]))

    def term_type(self, t):
        """Principal type of a ground value (used for substitution entries)."""
        from .terms import PartialApp

        inf = self.inference
        if isinstance(t, PartialApp):
            ft = inf.function_type(t.name)
            for a in t.args:
                res = inf.fresh()
                inf.unify(ft, arrow(self.term_type(a), res))
                ft = res
            return ft
        if isinstance(t.con, Literal):
            return TCon(t.con.type_name)
        fields, result = inf.constructor_type(t.con)
        for a, ft in zip(t.args, fields):
            inf.unify(self.term_type(a), ft)
        return result

    def expression(self, e, sigma: dict, key: str):
        """Infer the variables of a top-level expression under ``key``."""
        env = {v: self.term_type(t) for v, t in sigma.items()}
        for v, t in env.items():
            self.inference.var_types[(key, v)] = t
        return self.inference.infer(e, env, key)

    def function_values(self, typ: TCon, exclude=frozenset()) -> list:
        """Unapplied operations whose type instantiates to ``typ``, except
        those named in ``exclude``."""
        from .terms import PartialApp

        out = []
        for f in self.program.funcs:
            if f.arity == 0 or f.name in exclude:
                continue
            if f.external is not None and builtins.lookup(f.external).kind != "total":
                continue
            inf = self.inference
            saved = dict(inf.subst)
            try:
                inf.unify(inf.function_type(f.name), typ)
                out.append(PartialApp(f.name, (), f.arity))
            except TypeInferenceError:
                pass
            finally:
                inf.subst = saved
        return out


def infer_types(program: CoreProgram) -> ProgramTypes:
    return ProgramTypes(program, Inference(program).run())
