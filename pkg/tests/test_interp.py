import pytest
from hypothesis import given, settings, strategies as st

from nonfail.builtins import FAILING
from nonfail.checker import is_trivial_calltype
from nonfail.domain import ANY
from nonfail.inout import IOEntry
from nonfail.interp import (
    CUTOFF, Error, EvalConfig, Evaluator, Failure, Value, check_calltype_oracle,
    check_inout_oracle, eval_all, eval_call,
)
from nonfail.ir import Literal, TCon
from nonfail.parser import parse_expr
from nonfail.terms import PartialApp, Term, show_term
from nonfail.typeinfer import TypeInferenceError, infer_types

NIL = Term("Nil")
TRUE, FALSE = Term("True"), Term("False")


def cons(*xs):
    out = NIL
    for x in reversed(xs):
        out = Term("Cons", (x, out))
    return out


def run(program, text, sigma=None, **cfg):
    return eval_all(program, parse_expr(text), sigma, EvalConfig(**cfg))


def test_head_of_nil_fails(corpus):
    out = run(corpus["Examples"], "(call head xs)", {"xs": NIL})
    assert len(out) == 1 and isinstance(out[0], Failure)


def test_or_explores_both(corpus):
    assert run(corpus["Examples"], "(or (cons True) (cons False))") == [Value(TRUE), Value(FALSE)]


def test_loop_is_cut_off(corpus):
    for budget in (1, 100, 5000):
        assert run(corpus["Examples"], "(call loop)", step_budget=budget) == [CUTOFF]


def test_last_singleton(corpus):
    assert run(corpus["Examples"], "(call last xs)", {"xs": cons(TRUE)}) == [Value(TRUE)]


def test_k_outside_literals_fails(corpus):
    p = corpus["Examples"]
    assert run(p, "(call k n)", {"n": Term(Literal("int", 1))}) == [Value(Term(Literal("char", "b")))]
    assert isinstance(run(p, "(call k n)", {"n": Term(Literal("int", 2))})[0], Failure)


def test_free_variables_are_guessed(corpus):
    out = run(corpus["Prelude"], "(free (x) (call not x))")
    assert out == [Value(TRUE), Value(FALSE)]


def test_nondeterministic_operation(corpus):
    out = run(corpus["Prelude"], "(call choose a b)", {"a": TRUE, "b": FALSE})
    assert out == [Value(TRUE), Value(FALSE)]


def test_all_values_encapsulates(corpus):
    p = corpus["Prelude"]
    out = run(p, "(call headValues xs)", {"xs": NIL})
    assert out == [Value(NIL)]
    out = run(p, "(call headValues xs)", {"xs": cons(TRUE)})
    assert out == [Value(cons(TRUE))]


def test_higher_order_apply(corpus):
    p = corpus["Prelude"]
    out = run(p, "(call map f xs)", {"f": PartialApp("not", (), 1), "xs": cons(TRUE, FALSE)})
    assert out == [Value(cons(FALSE, TRUE))]


def test_error_outcome_depends_on_mode(corpus):
    p = corpus["Errors"]
    default = run(p, "(call errhead xs)", {"xs": NIL})
    strict = run(p, "(call errhead xs)", {"xs": NIL}, error_as_failure=True)
    assert isinstance(default[0], Error)
    assert isinstance(strict[0], Failure)


def test_integer_division(corpus):
    p = corpus["Prelude"]
    four, zero = Term(Literal("int", 4)), Term(Literal("int", 0))
    assert run(p, "(call half n)", {"n": four}) == [Value(Term(Literal("int", 2)))]
    assert isinstance(run(p, "(call div n m)", {"n": four, "m": zero})[0], Failure)


def test_determinism(corpus):
    p = corpus["Prelude"]
    a = run(p, "(free (x y) (call append x y))", free_term_size=3)
    b = run(p, "(free (x y) (call append x y))", free_term_size=3)
    assert a == b and len(a) > 4


@settings(max_examples=30, deadline=None)
@given(small=st.integers(1, 40), extra=st.integers(0, 200))
def test_budget_monotonicity(corpus, small, extra):
    p = corpus["Examples"]
    expr = "(free (s) (call readCmd s))"
    lo = run(p, expr, step_budget=small, free_term_size=3)
    hi = run(p, expr, step_budget=small + extra, free_term_size=3)
    keep = lambda outs: {o for o in outs if isinstance(o, (Value, Failure))}
    assert keep(lo) <= keep(hi)


def test_show_term_is_ir_syntax():
    assert show_term(cons(TRUE)) == "(cons Cons (cons True) (cons Nil))"
    assert show_term(Term(Literal("char", "a"))) == '(lit char "a")'


# ---------------------------------------------------------------- oracles

def test_calltype_oracle_examples(corpus, analyzed):
    p = corpus["Examples"]
    dom = analyzed["Examples"].domain
    assert check_calltype_oracle("head", (dom.cons("Cons"),), p).ok
    bad = check_calltype_oracle("head", (ANY,), p)
    assert [c.args for c in bad.counterexamples] == [(NIL,)]
    k_ct = analyzed["Examples"].calltype("k")
    assert check_calltype_oracle("k", k_ct, p).ok
    with pytest.raises(ValueError):
        check_calltype_oracle("head", FAILING, p)


def test_inout_oracle_examples(corpus, analyzed):
    p = corpus["Examples"]
    dom = analyzed["Examples"].domain
    assert check_inout_oracle("null", analyzed["Examples"].functions["null"].inout, p).ok
    wrong = (IOEntry((dom.cons("Nil"),), dom.cons("False")),)
    rep = check_inout_oracle("null", wrong, p)
    assert any(c.args == (NIL,) and c.outcome == Value(TRUE) for c in rep.counterexamples)
    assert check_inout_oracle("split_ys", (IOEntry((dom.cons("Cons"),), ANY),), corpus["Split"]).ok


@pytest.mark.parametrize("name", ["Examples", "HdHead", "HdFree", "Split", "Errors", "Prelude"])
def test_corollaries_on_corpus(corpus, analyzed, name):
    p, res = corpus[name], analyzed[name]
    exclude = {n for n, f in res.functions.items() if not is_trivial_calltype(f.calltype)}
    ev = Evaluator(p, EvalConfig(free_term_size=3), exclude_functions=exclude)
    for n, f in res.functions.items():
        if f.calltype is not FAILING:
            assert check_calltype_oracle(n, f.calltype, p, evaluator=ev).ok, n
        assert check_inout_oracle(n, f.inout, p, evaluator=ev).ok, n


def test_result_values_are_sound(corpus, analyzed):
    p, res = corpus["Prelude"], analyzed["Prelude"]
    ev = Evaluator(p, EvalConfig(free_term_size=3))
    import itertools
    for n, f in res.functions.items():
        choices = [ev.universe.terms(t, 3) for t in ev.types.signature(n)[0]]
        for args in itertools.product(*choices):
            for o in eval_call(ev, n, args):
                if isinstance(o, Value):
                    assert res.domain.member(o.term, f.result), (n, args, o)


# ---------------------------------------------------------------- type reconstruction

def test_inferred_signatures(corpus):
    types = infer_types(corpus["Prelude"])
    args, res = types.signature("map")
    assert args[1] == TCon("List", (TCon("Bool"),))
    assert args[0].name == "->"
    assert types.signature("length")[1] == TCon("Int")


def test_ill_typed_program_is_rejected():
    from nonfail.parser import parse_program
    p = parse_program("(module M (func f 1 (rule (x) (case x ((True) (lit int 1)) ((False) (cons True))))))")
    with pytest.raises(TypeInferenceError):
        infer_types(p)
