"""Checking abstract call types against the right-hand sides of rules."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import builtins
from .builtins import FAILING
from .domain import ANY, BOTTOM, DepthK, Shapes, render
from .inout import IOEntry
from .ir import (
    Call, Case, Cons, ConsPattern, CoreProgram, DefaultPattern, Failed, Free,
    FuncDecl, Let, Lit, LitPattern, Or, Var,
)
from .vartypes import VarTriple, VarTypes, definite


def is_trivial_calltype(ct) -> bool:
    return ct is not FAILING and all(a is ANY for a in ct)


def show_calltype(ct) -> str:
    if ct is FAILING:
        return "failing"
    return "(" + ", ".join(render(a) for a in ct) + ")"


@dataclass(frozen=True)
class Requirement:
    variable: str
    required: object
    function: str
    callee: str
    position: int

    def __str__(self) -> str:
        return (f"{self.variable} must be {render(self.required)} "
                f"(argument {self.position + 1} of {self.callee} in {self.function})")


@dataclass(frozen=True)
class Verified:
    delta: VarTypes


@dataclass(frozen=True)
class Refine:
    requirements: tuple


@dataclass(frozen=True)
class Fail:
    reason: str
    requirements: tuple = ()


@dataclass(frozen=True)
class CalleeInfo:
    arity: int
    calltype: object
    inout: tuple
    encapsulating: bool = False


class CallTypeContext:
    """Call and in/out types of every operation visible from a module."""

    def __init__(self, program: CoreProgram, dom: DepthK, calltypes: dict, inouts: dict,
                 imported: Optional[dict] = None, error_as_failure: bool = False):
        self.program = program
        self.dom = dom
        self.calltypes = calltypes
        self.inouts = inouts
        self.imported = imported or {}
        self.error_as_failure = error_as_failure

    def callee(self, name: str) -> CalleeInfo:
        if self.program.has_function(name):
            f = self.program.function(name)
            if f.external is None:
                return CalleeInfo(f.arity, self.calltypes[name], self.inouts[name])
            name = f.external
        elif name in self.imported:
            info = self.imported[name]
            return CalleeInfo(info.arity, info.calltype, info.inout)
        b = builtins.lookup(name)
        return CalleeInfo(b.arity, builtins.builtin_calltype(b, self.error_as_failure),
                          builtins.builtin_inout(b, self.dom), b.kind == "encapsulate")


class Checker:
    """Derives ``delta, z = e |- delta'`` for one rule, collecting
    requirements of unsatisfied call types and reachable failures."""

    def __init__(self, ctx: CallTypeContext, function: str):
        self.ctx = ctx
        self.dom = ctx.dom
        self.function = function
        self.requirements: list = []
        self.failures: list = []

    def fail(self, reason: str):
        if reason not in self.failures:
            self.failures.append(reason)

    def check_expr(self, delta: VarTypes, z: str, e) -> VarTypes:
        dom = self.dom
        if isinstance(e, Var):
            return VarTypes(dom, [definite(z, delta.value(e.name))])
        if isinstance(e, Lit):
            return VarTypes(dom, [definite(z, dom.cons(e.value))])
        if isinstance(e, Cons):
            names = tuple(a.name for a in e.args)
            result = dom.cons(e.name, [delta.value(x) for x in names])
            return VarTypes(dom, [VarTriple(z, (IOEntry((ANY,) * len(names), result),), names)])
        if isinstance(e, Call):
            return self.check_call(delta, z, e)
        if isinstance(e, Failed):
            self.fail("failed is reachable")
            return VarTypes(dom, [definite(z, BOTTOM)])
        if isinstance(e, Or):
            left = self.check_expr(delta, z, e.left)
            right = self.check_expr(delta, z, e.right)
            return left.union(right)
        if isinstance(e, Free):
            inner = delta.union([definite(v, ANY) for v in e.vars])
            return self.check_expr(inner, z, e.body)
        if isinstance(e, Let):
            bound = self.check_expr(delta, e.var, e.bound)
            return self.check_expr(delta.union(bound).propagate(), z, e.body)
        if isinstance(e, Case):
            return self.check_case(delta, z, e)
        raise TypeError(e)

    def check_call(self, delta: VarTypes, z: str, e: Call) -> VarTypes:
        dom = self.dom
        info = self.ctx.callee(e.name)
        if info.encapsulating:
            return VarTypes(dom, [definite(z, ANY)])
        ct = info.calltype
        if len(e.args) < info.arity:
            # functional values are assumed to have trivial call types
            if not is_trivial_calltype(ct):
                self.fail(f"partial application of {e.name} with call type {show_calltype(ct)}")
            return VarTypes(dom, [definite(z, ANY)])
        if ct is FAILING:
            self.fail(f"call to failing operation {e.name}")
            return VarTypes(dom, [definite(z, BOTTOM)])
        names = tuple(a.name for a in e.args)
        for i, (x, required) in enumerate(zip(names, ct)):
            actual = delta.value(x)
            if not dom.leq(actual, required):
                self.requirements.append(
                    Requirement(x, dom.glb(actual, required), self.function, e.name, i))
        return VarTypes(dom, [VarTriple(z, info.inout, names)])

    def check_case(self, delta: VarTypes, z: str, e: Case) -> VarTypes:
        dom = self.dom
        x = e.scrutinee
        results = []
        explicit_lits = {b.pattern.value for b in e.branches if isinstance(b.pattern, LitPattern)}
        for b in e.branches:
            p = b.pattern
            if isinstance(p, DefaultPattern):
                if not self._default_reachable(delta.value(x), explicit_lits):
                    continue
                inner = delta
            else:
                con = p.name if isinstance(p, ConsPattern) else p.value
                inner = delta.meet_cons(x, con)
                if inner.value(x) is BOTTOM:
                    continue
                if isinstance(p, ConsPattern) and p.vars:
                    inner = inner.union([definite(v, ANY) for v in p.vars])
            results.append(self.check_expr(inner, z, b.body))
        if not results:
            return VarTypes(dom, [definite(z, BOTTOM)])
        out = results[0]
        for r in results[1:]:
            out = out.union(r)
        return out

    def _default_reachable(self, value, explicit_lits) -> bool:
        if value is BOTTOM:
            return False
        if isinstance(value, Shapes):
            return any(c not in explicit_lits for c in value.cons())
        return True

    def outcome(self, delta: VarTypes):
        if self.failures:
            return Fail("; ".join(self.failures), tuple(self.requirements))
        if self.requirements:
            return Refine(tuple(self.requirements))
        return Verified(delta)


def fresh_result_var(f: FuncDecl) -> str:
    from .normalize import _all_names
    names = _all_names(f) if f.body is not None else set(f.params)
    z = "z"
    while z in names:
        z = "_" + z
    return z


def check_function(f: FuncDecl, ctx: CallTypeContext, calltype=None):
    """Check one rule under its call type; returns Verified, Refine or Fail."""
    ct = ctx.calltypes[f.name] if calltype is None else calltype
    if ct is FAILING:
        return Fail("call type is failing")
    delta0 = VarTypes(ctx.dom, [definite(p, a) for p, a in zip(f.params, ct)])
    checker = Checker(ctx, f.name)
    result = checker.check_expr(delta0, fresh_result_var(f), f.body)
    return checker.outcome(result)


def check_expr(delta: VarTypes, z: str, e, ctx: CallTypeContext, function: str = "?"):
    checker = Checker(ctx, function)
    result = checker.check_expr(delta.propagate(), z, e)
    return checker.outcome(result)


# ---------------------------------------------------------------- initial call types

def is_failing_body(e, error_as_failure: bool = False) -> bool:
    """Syntactically failing right-hand side of a case branch."""
    if isinstance(e, Failed):
        return True
    if isinstance(e, Call) and len(e.args) == (1 if e.name == "error" else 0):
        if e.name == "failed":
            return True
        if e.name == "error" and error_as_failure:
            return True
    if isinstance(e, Let):
        return is_failing_body(e.body, error_as_failure)
    return False


def initial_calltype(f: FuncDecl, dom: DepthK, error_as_failure: bool = False):
    if f.external is not None:
        return builtins.builtin_calltype(builtins.lookup(f.external), error_as_failure)
    params = set(f.params)
    found: dict = {}

    def scan(e):
        if isinstance(e, Let):
            scan(e.body)
        elif isinstance(e, Case):
            if e.scrutinee in params:
                allowed = BOTTOM
                for b in e.branches:
                    if is_failing_body(b.body, error_as_failure):
                        continue
                    p = b.pattern
                    if isinstance(p, ConsPattern):
                        allowed = dom.lub(allowed, dom.cons(p.name))
                    elif isinstance(p, LitPattern):
                        allowed = dom.lub(allowed, dom.cons(p.value))
                    else:
                        allowed = ANY
                cons = [b.pattern.name for b in e.branches if isinstance(b.pattern, ConsPattern)]
                if cons and _covers_type(dom, allowed, cons):
                    allowed = ANY
                prev = found.get(e.scrutinee)
                found[e.scrutinee] = allowed if prev is None else dom.lub(prev, allowed)
            for b in e.branches:
                scan(b.body)

    scan(f.body)
    ct = tuple(found.get(p, ANY) for p in f.params)
    if any(a is BOTTOM for a in ct):
        return FAILING
    return ct


def _covers_type(dom: DepthK, allowed, cons) -> bool:
    if not isinstance(allowed, Shapes):
        return False
    all_cons = dom.sig.by_type[dom.sig.type_of(cons[0])]
    return set(allowed.cons()) == set(all_cons)


def initial_call_types(program: CoreProgram, dom: DepthK, error_as_failure: bool = False) -> dict:
    return {f.name: initial_calltype(f, dom, error_as_failure) for f in program.funcs}
