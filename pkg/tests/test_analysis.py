import random

import pytest

from nonfail.analysis import AnalysisOptions, analyze_fixpoint, call_graph, scc_order
from nonfail.builtins import FAILING
from nonfail.checker import CallTypeContext, Refine, Verified, check_function, initial_call_types, show_calltype
from nonfail.domain import ANY, BOTTOM, DepthK, DomainConfig, Signature, render
from nonfail.inout import IOEntry, InOutInference, normalize_io, show_io
from nonfail.interp import Evaluator, eval_call
from nonfail.values import ResultValues
from nonfail.vartypes import VarTriple, VarTypes, definite, delta_meet_cons, delta_value, propagate_definite


def ct(result, name):
    return show_calltype(result.calltype(name))


def io(result, name):
    return show_io(result.functions[name].inout)


# ---------------------------------------------------------------- result values

def test_result_values(corpus):
    p = corpus["Examples"]
    dom = DepthK(Signature.of(p))
    r = ResultValues(p, dom).solve()
    assert r["loop"] is BOTTOM
    assert render(r["null"]) == "{False,True}"
    assert r["head"] is ANY
    assert render(r["k"]) == "{'a','b'}"


def test_result_values_cover_io(analyzed):
    for res in analyzed.values():
        dom = res.domain
        for f in res.functions.values():
            assert dom.leq(dom.lub_all(e.result for e in f.inout), f.result), f.name


# ---------------------------------------------------------------- in/out types

def test_inout_goldens(analyzed):
    ex = analyzed["Examples"]
    assert io(ex, "null") == "{{Cons(_,_)} -> {False}, {Nil} -> {True}}"
    assert io(ex, "head") == "{{Cons(_,_)} -> _}"
    assert io(ex, "loop") == "{ε -> {}}"
    assert io(ex, "k") == "{{0} -> {'a'}, {1} -> {'b'}}"
    assert io(analyzed["Split"], "split") == "{_ {Cons(_,_)} -> {Cons(_,_)}, _ {Nil} -> {Cons(_,_)}}"


def test_infer_expr_case_rule(corpus):
    p = corpus["Examples"]
    dom = DepthK(Signature.of(p))
    values = ResultValues(p, dom)
    values.solve()
    inf = InOutInference(dom, values.of_call)
    f = p.function("null")
    got = {(render(env["zs"]), render(a)) for env, a, _ in inf.infer_expr({"zs": ANY}, f.body)}
    assert got == {("{Nil}", "{True}"), ("{Cons(_,_)}", "{False}")}


def test_normalize_io_merges_and_is_idempotent(dom):
    t, f = dom.cons("True"), dom.cons("False")
    entries = [IOEntry((ANY,), t), IOEntry((ANY,), f), IOEntry((t,), f)]
    once = normalize_io(entries, dom)
    assert len(once) == 2
    assert normalize_io(once, dom) == once


# ---------------------------------------------------------------- variable types

def null_io(analyzed):
    return analyzed["Examples"].functions["null"].inout


def test_delta_examples(analyzed, dom):
    d1 = VarTypes(dom, [definite("x", ANY), VarTriple("y", null_io(analyzed), ("x",))])
    assert delta_value(d1, "x") is ANY
    assert render(delta_value(d1, "y")) == "{False,True}"
    d3 = delta_meet_cons(d1, "y", "False")
    (ytriple,) = d3.triples_of("y")
    assert [str(e) for e in ytriple.io] == ["{Cons(_,_)} -> {False}"]
    assert render(delta_value(d3, "x")) == "{Cons(_,_)}"
    assert delta_meet_cons(d3, "y", "False") == d3
    assert delta_value(delta_meet_cons(VarTypes(dom, [definite("y", dom.cons("True"))]), "y", "False"), "y") is BOTTOM


def test_delta_value_of_empty_io_and_unknown(dom):
    d = VarTypes(dom, [VarTriple("z", (), ())])
    assert delta_value(d, "z") is BOTTOM
    with pytest.raises(KeyError):
        delta_value(d, "q")


def test_propagate_without_triples_is_identity(dom):
    d = VarTypes(dom, [definite("x", ANY), definite("y", dom.cons("Nil"))])
    assert propagate_definite(d) == d


def test_chained_propagation_matches_brute_force(analyzed, corpus, dom):
    prelude = analyzed["Prelude"]
    not_io = prelude.functions["not"].inout
    d = VarTypes(dom, [definite("x", ANY), VarTriple("y", null_io(analyzed), ("x",)),
                       VarTriple("w", not_io, ("y",))])
    d = delta_meet_cons(d, "w", "True")
    x_abs = delta_value(d, "x")
    assert render(x_abs) == "{Cons(_,_)}"
    # concrete: all lists x with not(null(x)) == True lie in the concretization
    ev = Evaluator(corpus["Prelude"])
    for x in ev.universe.terms(ev.types.signature("null")[0][0], 3):
        (y,) = eval_call(ev, "null", [x])
        (w,) = eval_call(ev, "not", [y.term])
        assert (w.term.con == "True") == dom.member(x, x_abs)


# ---------------------------------------------------------------- call types

def test_initial_call_types(corpus):
    p = corpus["Examples"]
    dom = DepthK(Signature.of(p))
    init = initial_call_types(p, dom)
    assert show_calltype(init["head"]) == "({Cons(_,_)})"
    assert show_calltype(init["null"]) == "(_)"
    assert show_calltype(init["k"]) == "({0,1})"


def test_calltype_goldens(analyzed):
    ex = analyzed["Examples"]
    for name in ("head", "tail", "last"):
        assert ct(ex, name) == "({Cons(_,_)})"
    assert ct(ex, "null") == "(_)"
    assert ct(ex, "k") == "({0,1})"
    for name in ("readCmd", "f"):
        assert ct(ex, name) == "(_)" and ex.status(name) == "verified"
    hd = analyzed["HdHead"]
    assert hd.functions["hd"].initial_calltype == (ANY,)
    assert ct(hd, "hd") == "({Cons(_,_)})" and hd.status("hd") == "refined"
    assert hd.iterations == 2
    assert analyzed["HdFree"].calltype("hdfree") is FAILING
    split = analyzed["Split"]
    assert all(f.status != "failing" for f in split.functions.values())
    assert ct(split, "split_ys") == ct(split, "split_yss") == "({Cons(_,_)})"


def test_check_outcomes(corpus, analyzed):
    p = corpus["HdHead"]
    res = analyzed["HdHead"]
    dom = res.domain
    cts = {"head": (dom.cons("Cons"),), "hd": (ANY,)}
    ios = {n: f.inout for n, f in res.functions.items()}
    ctx = CallTypeContext(p, dom, cts, ios)
    out = check_function(p.function("hd"), ctx)
    assert isinstance(out, Refine)
    (req,) = out.requirements
    assert req.variable == "x" and render(req.required) == "{Cons(_,_)}"
    assert isinstance(check_function(p.function("hd"), ctx, (dom.cons("Cons"),)), Verified)


def test_hdfree_fails_on_free_variable(analyzed):
    f = analyzed["HdFree"].functions["hdfree"]
    assert f.status == "failing"
    assert f.requirements and f.requirements[0].variable not in ("x",)


def test_prelude_failing_operations(analyzed):
    prelude = analyzed["Prelude"]
    failing = {n for n, f in prelude.functions.items() if f.status == "failing"}
    assert {"second", "headOfAppend", "nth", "half", "mapHead", "someHead"} <= failing
    assert prelude.status("headValues") == "verified"  # allValues skips the argument check


def test_error_mode(corpus):
    p = corpus["Errors"]
    default = analyze_fixpoint(p)
    strict = analyze_fixpoint(p, options=AnalysisOptions(error_as_failure=True))
    assert ct(default, "errhead") == "(_)"
    assert ct(strict, "errhead") == "({Cons(_,_)})"
    assert strict.status("firstOfEmpty") == "failing"
    assert default.status("firstOfEmpty") == "verified"


@pytest.mark.parametrize("name", ["Examples", "Prelude", "Split", "HdHead"])
def test_check_order_independence(corpus, analyzed, name):
    p = corpus[name]
    base = {n: f.calltype for n, f in analyzed[name].functions.items()}
    names = [f.name for f in p.funcs if f.external is None]
    rng = random.Random(3)
    for _ in range(5):
        order = names[:]
        rng.shuffle(order)
        res = analyze_fixpoint(p, order=order)
        assert {n: f.calltype for n, f in res.functions.items()} == base


@pytest.mark.parametrize("k", [2, 3, 5])
def test_depth_consistency(corpus, analyzed, k):
    for name, p in corpus.items():
        res = analyze_fixpoint(p, DomainConfig(depth=k))
        base = analyzed[name]
        assert res.iterations == base.iterations
        assert {n: f.calltype is FAILING for n, f in res.functions.items()} == \
               {n: f.calltype is FAILING for n, f in base.functions.items()}


def test_scc_order_puts_callees_first(corpus):
    p = corpus["Examples"]
    order = scc_order(call_graph(p), [f.name for f in p.funcs])
    assert order.index("null") < order.index("readCmd")
    assert order.index("head") < order.index("f")


def test_iteration_budget_is_reported(corpus):
    res = analyze_fixpoint(corpus["HdHead"], options=AnalysisOptions(max_iterations=1))
    assert res.iterations == 1 and res.diagnostics


def test_summary_counts(analyzed):
    s = analyzed["Split"].summary()
    assert s.operations == (3, 5)
    assert s.final_failing == (0, 0)
    assert s.iterations == 1
