"""Bring parsed programs into the normalized kernel form.

After normalization every rule has uniquely named variables, all
constructor and function arguments are variables (arguments of
``allValues`` excepted), and every case expression lists each constructor
of its scrutinee type exactly once, missing ones mapped to ``failed``.
Cases over literals always end with a ``failed`` default branch.
"""
from __future__ import annotations

import itertools

from .ir import (
    Branch, Call, Case, Cons, ConsPattern, CoreProgram, DefaultPattern,
    FAILED, Failed, Free, FuncDecl, IRError, Let, Lit, LitPattern, Or, Var,
    subexprs,
)

# arguments of these operations are kept unevaluated
ENCAPSULATING = {"allValues"}


class NormalizeError(IRError):
    pass


def free_vars(e) -> set:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, (Lit, Failed)):
        return set()
    if isinstance(e, (Cons, Call)):
        return set().union(*(free_vars(a) for a in e.args)) if e.args else set()
    if isinstance(e, Or):
        return free_vars(e.left) | free_vars(e.right)
    if isinstance(e, Free):
        return free_vars(e.body) - set(e.vars)
    if isinstance(e, Let):
        return free_vars(e.bound) | (free_vars(e.body) - {e.var})
    if isinstance(e, Case):
        out = {e.scrutinee}
        for b in e.branches:
            bound = set(b.pattern.vars) if isinstance(b.pattern, ConsPattern) else set()
            out |= free_vars(b.body) - bound
        return out
    raise TypeError(e)


def _all_names(f: FuncDecl) -> set:
    names = set(f.params)
    for e in subexprs(f.body):
        if isinstance(e, Var):
            names.add(e.name)
        elif isinstance(e, Free):
            names.update(e.vars)
        elif isinstance(e, Let):
            names.add(e.var)
        elif isinstance(e, Case):
            for b in e.branches:
                if isinstance(b.pattern, ConsPattern):
                    names.update(b.pattern.vars)
    return names


class _RuleNormalizer:
    def __init__(self, program: CoreProgram, f: FuncDecl):
        self.program = program
        self.f = f
        self.reserved = _all_names(f)
        self.used: set = set()

    def fresh(self, base: str) -> str:
        if base not in self.used:
            self.used.add(base)
            return base
        stem = base.rstrip("0123456789_") or "v"
        for i in itertools.count(1):
            name = f"{stem}_{i}"
            if name not in self.used and name not in self.reserved:
                self.used.add(name)
                return name

    def bind(self, env: dict, names) -> tuple:
        env = dict(env)
        new = []
        for n in names:
            m = self.fresh(n)
            env[n] = m
            new.append(m)
        return env, tuple(new)

    def atomize(self, args, env: dict):
        """Normalize call arguments, lifting non-variables into lets."""
        lets, out = [], []
        for a in args:
            if isinstance(a, Var):
                out.append(self.rename(a.name, env))
            else:
                v = self.fresh("v")
                lets.append((v, self.expr(a, env)))
                out.append(Var(v))
        return lets, tuple(out)

    def rename(self, name: str, env: dict) -> Var:
        if name not in env:
            raise NormalizeError(f"unbound variable {name} in {self.f.name}")
        return Var(env[name])

    def expr(self, e, env: dict):
        if isinstance(e, Var):
            return self.rename(e.name, env)
        if isinstance(e, (Lit, Failed)):
            return e
        if isinstance(e, Call) and e.name in ENCAPSULATING:
            return Call(e.name, tuple(self.expr(a, env) for a in e.args))
        if isinstance(e, (Cons, Call)):
            lets, args = self.atomize(e.args, env)
            out = type(e)(e.name, args)
            for v, bound in reversed(lets):
                out = Let(v, bound, out)
            return out
        if isinstance(e, Or):
            return Or(self.expr(e.left, env), self.expr(e.right, env))
        if isinstance(e, Free):
            env2, vs = self.bind(env, e.vars)
            return Free(vs, self.expr(e.body, env2))
        if isinstance(e, Let):
            if e.var in free_vars(e.bound):
                raise NormalizeError(f"recursive let binding of {e.var} in {self.f.name}")
            bound = self.expr(e.bound, env)
            env2, (v,) = self.bind(env, (e.var,))
            return Let(v, bound, self.expr(e.body, env2))
        if isinstance(e, Case):
            return self.case(e, env)
        raise TypeError(e)

    def case(self, e: Case, env: dict):
        scrut = self.rename(e.scrutinee, env).name
        cons_br = [b for b in e.branches if isinstance(b.pattern, ConsPattern)]
        lit_br = [b for b in e.branches if isinstance(b.pattern, LitPattern)]
        defaults = [b for b in e.branches if isinstance(b.pattern, DefaultPattern)]
        where = f"case on {e.scrutinee} in {self.f.name}"
        if len(defaults) > 1:
            raise NormalizeError(f"several default branches in {where}")
        if defaults and e.branches[-1] is not defaults[0]:
            raise NormalizeError(f"default branch must be last in {where}")
        if cons_br and lit_br:
            raise NormalizeError(f"mixed constructor and literal patterns in {where}")
        default = defaults[0] if defaults else None
        if lit_br:
            seen, kinds, out = set(), set(), []
            for b in lit_br:
                lit = b.pattern.value
                if lit in seen:
                    raise NormalizeError(f"overlapping pattern {lit} in {where}")
                seen.add(lit)
                kinds.add(lit.kind)
                out.append(Branch(b.pattern, self.expr(b.body, env)))
            if len(kinds) > 1:
                raise NormalizeError(f"literal patterns of different types in {where}")
            body = self.expr(default.body, env) if default else FAILED
            out.append(Branch(DefaultPattern(), body))
            return Case(scrut, tuple(out))
        if not cons_br:
            # only a default branch: nothing to discriminate
            return Case(scrut, (Branch(DefaultPattern(), self.expr(default.body, env)),))
        types = {self.program.type_of_constructor(b.pattern.name) for b in cons_br}
        if len(types) > 1:
            raise NormalizeError(f"constructors of different types in {where}")
        (type_name,) = types
        out, seen = [], set()
        for b in cons_br:
            p = b.pattern
            if p.name in seen:
                raise NormalizeError(f"overlapping pattern {p.name} in {where}")
            seen.add(p.name)
            env2, vs = self.bind(env, p.vars)
            out.append(Branch(ConsPattern(p.name, vs), self.expr(b.body, env2)))
        for c in self.program.constructors_of(type_name):
            if c.name in seen:
                continue
            _, vs = self.bind(env, [f"x{i}" if c.arity > 1 else "x" for i in range(c.arity)])
            body = self.expr(default.body, env) if default else FAILED
            out.append(Branch(ConsPattern(c.name, vs), body))
        return Case(scrut, tuple(out))

    def run(self) -> FuncDecl:
        if self.f.body is None:
            return self.f
        env, params = self.bind({}, self.f.params)
        return FuncDecl(self.f.name, params, self.expr(self.f.body, env), self.f.public, self.f.external)


def normalize(program: CoreProgram) -> CoreProgram:
    funcs = tuple(_RuleNormalizer(program, f).run() for f in program.funcs)
    return CoreProgram(program.module, program.imports, program.datas, funcs, program.imported_datas)


def is_normalized(program: CoreProgram) -> bool:
    """Check the structural properties that normalization establishes."""
    for f in program.funcs:
        if f.body is None:
            continue
        names = list(f.params)
        for e in subexprs(f.body):
            if isinstance(e, (Cons, Call)) and e.name not in ENCAPSULATING:
                if not all(isinstance(a, Var) for a in e.args):
                    return False
            if isinstance(e, Free):
                names.extend(e.vars)
            elif isinstance(e, Let):
                names.append(e.var)
            elif isinstance(e, Case):
                pats = [b.pattern for b in e.branches]
                cons = [p.name for p in pats if isinstance(p, ConsPattern)]
                for b in e.branches:
                    if isinstance(b.pattern, ConsPattern):
                        names.extend(b.pattern.vars)
                if cons:
                    expected = [c.name for c in program.siblings(cons[0])]
                    if sorted(cons) != sorted(expected) or len(pats) != len(cons):
                        return False
                elif any(isinstance(p, LitPattern) for p in pats):
                    if not isinstance(pats[-1], DefaultPattern):
                        return False
        if len(names) != len(set(names)):
            return False
    return True
