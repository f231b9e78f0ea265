"""Concrete nondeterministic evaluator used as ground truth for the analyses.

Evaluation is call-by-value: a let binding is evaluated to a data term
before its body, which is conservative for failure checks (a lazy system
might never demand a failing binding). Every derivation is explored in a
fixed depth-first order. A step budget shared by the whole search bounds
the number of function unfoldings; derivations that run out yield
``Cutoff``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from . import builtins
from .builtins import FAILING
from .domain import DepthK, DomainConfig, Signature
from .ir import (
    Call, Case, Cons, CoreProgram, DefaultPattern, Failed, Free,
    IRError, Let, Lit, LitPattern, Literal, Or, Var,
)
from .terms import PartialApp, Term, Universe, literal_pool, show_term
from .typeinfer import ProgramTypes, infer_types


# ---------------------------------------------------------------- outcomes

@dataclass(frozen=True)
class Value:
    term: object

    def __str__(self) -> str:
        return str(self.term)


@dataclass(frozen=True)
class Failure:
    site: str

    def __str__(self) -> str:
        return f"failure ({self.site})"


@dataclass(frozen=True)
class Error:
    """A call to ``error`` when errors are not treated as failures."""
    message: str

    def __str__(self) -> str:
        return f"error ({self.message})"


@dataclass(frozen=True)
class Cutoff:
    def __str__(self) -> str:
        return "cutoff"


CUTOFF = Cutoff()


@dataclass(frozen=True)
class EvalConfig:
    step_budget: int = 10000
    free_term_size: int = 4
    pool: Optional[tuple] = None
    error_as_failure: bool = False

    def __post_init__(self):
        if self.step_budget < 1 or self.free_term_size < 1:
            raise ValueError("step_budget and free_term_size must be at least 1")


TRUE, FALSE = Term("True"), Term("False")


# ---------------------------------------------------------------- evaluator

class _Budget:
    def __init__(self, steps: int):
        self.left = steps

    def take(self) -> bool:
        if self.left <= 0:
            return False
        self.left -= 1
        return True


class Evaluator:
    def __init__(self, program: CoreProgram, cfg: EvalConfig = EvalConfig(),
                 types: Optional[ProgramTypes] = None, exclude_functions=()):
        self.program = program
        self.cfg = cfg
        self.types = types or infer_types(program)
        pool = cfg.pool if cfg.pool is not None else literal_pool(program)
        self.universe = Universe(program, pool, self._function_values)
        self.exclude_functions = frozenset(exclude_functions)
        self._order = {}
        for d in program.all_datas():
            for i, c in enumerate(d.constructors):
                self._order[c.name] = i
        self._fresh = itertools.count()

    def _function_values(self, typ):
        return self.types.function_values(typ, exclude=self.exclude_functions)

    # A configuration is ("eval", expr, env, cont) or ("ret", value, cont);
    # a continuation is a linked list of frames (frame, next).
    def run(self, e, env: dict, budget: _Budget, function: str = "") -> list:
        outcomes = []
        stack = [("eval", e, env, None, function)]
        while stack:
            item = stack.pop()
            if item[0] == "ret":
                _, v, k = item
                if k is None:
                    outcomes.append(Value(v))
                    continue
                (var, body, benv, bfun), rest = k
                stack.append(("eval", body, {**benv, var: v}, rest, bfun))
                continue
            _, e, env, k, fun = item
            for res in self.step(e, env, k, fun, budget):
                if isinstance(res, tuple):
                    stack.append(res)
                else:
                    outcomes.append(res)
        return outcomes

    def step(self, e, env, k, fun, budget):
        """Successor configurations (pushed in reverse order) or outcomes."""
        if isinstance(e, Var):
            if e.name not in env:
                raise IRError(f"unbound variable {e.name} during evaluation of {fun}")
            return [("ret", env[e.name], k)]
        if isinstance(e, Lit):
            return [("ret", Term(e.value), k)]
        if isinstance(e, Failed):
            return [Failure(f"failed in {fun}" if fun else "failed")]
        if isinstance(e, Or):
            return [("eval", e.right, env, k, fun), ("eval", e.left, env, k, fun)]
        if isinstance(e, Let):
            return [("eval", e.bound, env, ((e.var, e.body, env, fun), k), fun)]
        if isinstance(e, Free):
            choices = [self.guesses(fun, v) for v in e.vars]
            out = [("eval", e.body, {**env, **dict(zip(e.vars, combo))}, k, fun)
                   for combo in itertools.product(*choices)]
            return out[::-1]
        if isinstance(e, Call) and self._is_encapsulating(e.name):
            return self.encapsulate(e.args[0], env, k, fun, budget)
        if isinstance(e, (Cons, Call)):
            atomic = self._lift(e, env, k, fun)
            if atomic is not None:
                return atomic
            args = [env[a.name] if isinstance(a, Var) else Term(a.value) for a in e.args]
            if isinstance(e, Cons):
                return [("ret", Term(e.name, tuple(args)), k)]
            return self.call(e.name, args, k, fun, budget)
        if isinstance(e, Case):
            v = env[e.scrutinee]
            for b in e.branches:
                p = b.pattern
                if isinstance(p, DefaultPattern):
                    return [("eval", b.body, env, k, fun)]
                if isinstance(p, LitPattern):
                    if v.con == p.value:
                        return [("eval", b.body, env, k, fun)]
                elif isinstance(v, Term) and v.con == p.name:
                    return [("eval", b.body, {**env, **dict(zip(p.vars, v.args))}, k, fun)]
            return [Failure(f"no matching branch in {fun}")]
        raise TypeError(e)

    def _lift(self, e, env, k, fun):
        """Evaluate a non-atomic argument first (kernel code is already flat)."""
        for i, a in enumerate(e.args):
            if not isinstance(a, (Var, Lit)):
                tmp = f"#arg{next(self._fresh)}"
                args = e.args[:i] + (Var(tmp),) + e.args[i + 1:]
                rebuilt = Cons(e.name, args) if isinstance(e, Cons) else Call(e.name, args)
                return [("eval", a, env, ((tmp, rebuilt, env, fun), k), fun)]
        return None

    def _is_encapsulating(self, name: str) -> bool:
        if self.program.has_function(name):
            f = self.program.function(name)
            return f.external is not None and builtins.lookup(f.external).kind == "encapsulate"
        b = builtins.BUILTINS.get(name)
        return b is not None and b.kind == "encapsulate"

    def guesses(self, fun: str, var: str) -> list:
        typ = self.types.variable_type(fun, var)
        return self.universe.terms(typ, self.cfg.free_term_size)

    def call(self, name: str, args: list, k, fun, budget):
        p = self.program
        f = p.function(name) if p.has_function(name) else None
        if f is None:
            if name not in builtins.BUILTINS:
                raise IRError(f"unknown operation {name} during evaluation")
            return self.builtin(builtins.BUILTINS[name], args, k, fun, budget)
        if f.external is not None:
            return self.builtin(builtins.lookup(f.external), args, k, fun, budget)
        if len(args) < f.arity:
            return [("ret", PartialApp(name, tuple(args), f.arity - len(args)), k)]
        if not budget.take():
            return [CUTOFF]
        env = dict(zip(f.params, args))
        return [("eval", f.body, env, k, name)]

    def builtin(self, b, args, k, fun, budget):
        if len(args) < b.arity:
            return [("ret", PartialApp(b.name, tuple(args), b.arity - len(args)), k)]
        kind = b.kind
        if kind == "failed":
            return [Failure(f"failed called in {fun}")]
        if kind == "error":
            msg = show_term(args[0])
            return [Failure(f"error {msg} in {fun}") if self.cfg.error_as_failure else Error(msg)]
        if kind == "apply":
            fn, x = args
            if not isinstance(fn, PartialApp):
                raise IRError(f"apply of a non-function value {fn} in {fun}")
            return self.call(fn.name, list(fn.args) + [x], k, fun, budget)
        if kind == "encapsulate":
            return [("ret", self.collect([Value(args[0])]), k)]
        if b.name == "otherwise":
            return [("ret", TRUE, k)]
        x, y = args
        if b.name in ("div", "mod"):
            if y.con.value == 0:
                return [Failure(f"{b.name} by zero in {fun}")]
            n = x.con.value // y.con.value if b.name == "div" else x.con.value % y.con.value
            return [("ret", Term(Literal("int", n)), k)]
        if b.name in ("+", "-", "*"):
            n = {"+": lambda a, c: a + c, "-": lambda a, c: a - c, "*": lambda a, c: a * c}[b.name](
                x.con.value, y.con.value)
            return [("ret", Term(Literal("int", n)), k)]
        c = self.compare(x, y)
        result = {"==": c == 0, "/=": c != 0, "<": c < 0, "<=": c <= 0, ">": c > 0, ">=": c >= 0}[b.name]
        return [("ret", TRUE if result else FALSE, k)]

    def encapsulate(self, e, env, k, fun, budget):
        """Encapsulated search: all values of ``e`` as a list, failures dropped."""
        inner = self.run(e, env, budget, fun)
        if any(o is CUTOFF for o in inner):
            return [CUTOFF]
        errors = [o for o in inner if isinstance(o, Error)]
        if errors:
            return [errors[0]]
        return [("ret", self.collect(inner), k)]

    @staticmethod
    def collect(outcomes) -> Term:
        out = Term("Nil")
        for o in reversed([o for o in outcomes if isinstance(o, Value)]):
            out = Term("Cons", (o.term, out))
        return out

    def compare(self, x, y) -> int:
        if isinstance(x, PartialApp) or isinstance(y, PartialApp):
            raise IRError("comparison of function values")
        if isinstance(x.con, Literal) and isinstance(y.con, Literal):
            return (x.con.value > y.con.value) - (x.con.value < y.con.value)
        ox, oy = self._order.get(x.con, 0), self._order.get(y.con, 0)
        if ox != oy:
            return (ox > oy) - (ox < oy)
        for a, b in zip(x.args, y.args):
            c = self.compare(a, b)
            if c:
                return c
        return 0


# ---------------------------------------------------------------- entry points

def eval_all(program: CoreProgram, e, sigma: Optional[dict] = None, cfg: EvalConfig = EvalConfig(),
             evaluator: Optional[Evaluator] = None) -> list:
    """All outcomes of ``e`` under the substitution ``sigma``, in search order."""
    sigma = dict(sigma or {})
    ev = evaluator or Evaluator(program, cfg)
    key = "#top"
    ev.types.expression(e, sigma, key)
    return ev.run(e, sigma, _Budget(ev.cfg.step_budget), key)


def eval_call(ev: Evaluator, name: str, args) -> list:
    params = [f"#p{i}" for i in range(len(args))]
    e = Call(name, tuple(Var(p) for p in params))
    return ev.run(e, dict(zip(params, args)), _Budget(ev.cfg.step_budget), "#top")


@dataclass
class Counterexample:
    function: str
    args: tuple
    outcome: object

    def __str__(self) -> str:
        call = " ".join([self.function] + [show_term(a) for a in self.args])
        if isinstance(self.outcome, Value):
            return f"(call {call}) yields {show_term(self.outcome.term)}"
        return f"(call {call}) -> {self.outcome}"


@dataclass
class OracleReport:
    function: str
    kind: str  # "calltype" or "inout"
    tuples: int = 0
    values: int = 0
    cutoffs: int = 0
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def _arg_types(ev: Evaluator, name: str):
    return ev.types.signature(name)[0]


def check_calltype_oracle(f: str, calltype, program: CoreProgram, cfg: EvalConfig = EvalConfig(),
                          evaluator: Optional[Evaluator] = None) -> OracleReport:
    """Evaluate ``f`` on every argument tuple within its call type and
    report the tuples that can fail."""
    if calltype is FAILING:
        raise ValueError("call type must not be failing")
    ev = evaluator or Evaluator(program, cfg)
    dom = DepthK(Signature.of(program), DomainConfig())
    size = ev.cfg.free_term_size
    choices = [[t for t in ev.universe.terms(typ, size) if dom.member(t, a)]
               for typ, a in zip(_arg_types(ev, f), calltype)]
    report = OracleReport(f, "calltype")
    for args in itertools.product(*choices):
        report.tuples += 1
        for o in eval_call(ev, f, args):
            if isinstance(o, Failure):
                report.counterexamples.append(Counterexample(f, args, o))
                break
            report.values += isinstance(o, Value)
            report.cutoffs += o is CUTOFF
    return report


def check_inout_oracle(f: str, io, program: CoreProgram, cfg: EvalConfig = EvalConfig(),
                       evaluator: Optional[Evaluator] = None) -> OracleReport:
    """Every value of ``f`` on every argument tuple must be covered by an entry."""
    ev = evaluator or Evaluator(program, cfg)
    dom = DepthK(Signature.of(program), DomainConfig())
    size = ev.cfg.free_term_size
    choices = [ev.universe.terms(typ, size) for typ in _arg_types(ev, f)]
    report = OracleReport(f, "inout")
    for args in itertools.product(*choices):
        report.tuples += 1
        entries = [en for en in io if all(dom.member(t, a) for t, a in zip(args, en.args))]
        for o in eval_call(ev, f, args):
            report.cutoffs += o is CUTOFF
            if not isinstance(o, Value):
                continue
            report.values += 1
            if not any(dom.member(o.term, en.result) for en in entries):
                report.counterexamples.append(Counterexample(f, args, o))
    return report
