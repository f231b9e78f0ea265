"""Call types, in/out types and result values of external operations."""
from __future__ import annotations

from dataclasses import dataclass

from .domain import ANY, BOTTOM, DepthK
from .ir import IRError, TCon, TVar

INT = TCon("Int")
BOOL = TCon("Bool")
A, B = TVar("a"), TVar("b")


def fun(*types):
    out = types[-1]
    for t in reversed(types[:-1]):
        out = TCon("->", (t, out))
    return out


@dataclass(frozen=True)
class Builtin:
    name: str
    arity: int
    kind: str  # "total", "partial", "failed", "error", "encapsulate", "apply"
    result: str  # "any", "bool", "true", "none"
    type: object


BUILTINS = {b.name: b for b in [
    Builtin("failed", 0, "failed", "none", A),
    Builtin("error", 1, "error", "none", fun(A, B)),
    Builtin("div", 2, "partial", "any", fun(INT, INT, INT)),
    Builtin("mod", 2, "partial", "any", fun(INT, INT, INT)),
    Builtin("+", 2, "total", "any", fun(INT, INT, INT)),
    Builtin("-", 2, "total", "any", fun(INT, INT, INT)),
    Builtin("*", 2, "total", "any", fun(INT, INT, INT)),
    Builtin("==", 2, "total", "bool", fun(A, A, BOOL)),
    Builtin("/=", 2, "total", "bool", fun(A, A, BOOL)),
    Builtin("<", 2, "total", "bool", fun(A, A, BOOL)),
    Builtin("<=", 2, "total", "bool", fun(A, A, BOOL)),
    Builtin(">", 2, "total", "bool", fun(A, A, BOOL)),
    Builtin(">=", 2, "total", "bool", fun(A, A, BOOL)),
    Builtin("allValues", 1, "encapsulate", "any", fun(A, TCon("List", (A,)))),
    Builtin("apply", 2, "apply", "any", fun(fun(A, B), A, B)),
    Builtin("otherwise", 0, "total", "true", BOOL),
]}


def lookup(name: str) -> Builtin:
    try:
        return BUILTINS[name]
    except KeyError:
        raise IRError(f"unknown external operation {name}") from None


@dataclass(frozen=True)
class Failing:
    """The empty call type: every call may fail."""

    def __repr__(self) -> str:
        return "FAILING"


FAILING = Failing()


def builtin_result(b: Builtin, dom: DepthK):
    if b.result == "none":
        return BOTTOM
    if b.result == "bool":
        return dom.lub(dom.cons("False"), dom.cons("True"))
    if b.result == "true":
        return dom.cons("True")
    return ANY


def builtin_calltype(b: Builtin, error_as_failure: bool = False):
    if b.kind in ("failed", "partial"):
        return FAILING
    if b.kind == "error" and error_as_failure:
        return FAILING
    return (ANY,) * b.arity


def builtin_inout(b: Builtin, dom: DepthK) -> tuple:
    from .inout import IOEntry
    return (IOEntry((ANY,) * b.arity, builtin_result(b, dom)),)


def builtin_table(dom: DepthK, error_as_failure: bool = False, names=None) -> dict:
    """Map each builtin name to its (call type, in/out type, result value)."""
    names = BUILTINS if names is None else names
    table = {}
    for n in names:
        b = lookup(n)
        table[n] = (builtin_calltype(b, error_as_failure), builtin_inout(b, dom), builtin_result(b, dom))
    return table
