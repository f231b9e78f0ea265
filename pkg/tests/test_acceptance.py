"""Acceptance criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` or directly with
``python3 tests/test_acceptance.py``.
"""
import json
import random
import shutil
import subprocess
import sys
import time
from pathlib import Path

import pytest

from nonfail.analysis import AnalysisOptions, analyze_fixpoint
from nonfail.builtins import FAILING
from nonfail.checker import is_trivial_calltype, show_calltype
from nonfail.domain import ANY, DomainConfig
from nonfail.inout import show_io
from nonfail.interp import EvalConfig, Evaluator, check_calltype_oracle, check_inout_oracle
from nonfail.pipeline import CORPUS, corpus_path, load_corpus

sys.path.insert(0, str(Path(__file__).parent))
from lattice_laws import LAWS, random_case  # noqa: E402

CONS = "{Cons(_,_)}"


def report(number: int, title: str, ok: bool, detail: str, seconds: float, limit=None) -> str:
    timing = f"{seconds:.2f}s" + (f" (limit {limit})" if limit else "")
    return f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}: {detail}; {timing}"


def timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


def programs():
    return {name: load_corpus(name) for name in CORPUS}


# ---------------------------------------------------------------- criteria

def criterion_1():
    def run():
        res = {n: analyze_fixpoint(p) for n, p in programs().items()}
        ex, hd, split = res["Examples"], res["HdHead"], res["Split"]
        ct = lambda r, n: show_calltype(r.calltype(n))
        checks = {
            "CT(head)": ct(ex, "head") == f"({CONS})",
            "CT(tail)": ct(ex, "tail") == f"({CONS})",
            "CT(last)": ct(ex, "last") == f"({CONS})",
            "CT(null)": ct(ex, "null") == "(_)",
            "CT(k)": ct(ex, "k") == "({0,1})",
            "CT(hd) refined": hd.functions["hd"].initial_calltype == (ANY,)
                              and ct(hd, "hd") == f"({CONS})" and hd.status("hd") == "refined",
            "hd/head 2 iterations": hd.iterations == 2,
            "CT(hdfree) failing": res["HdFree"].calltype("hdfree") is FAILING,
            "readCmd, f trivial": all(ex.status(n) == "verified" and ct(ex, n) == "(_)"
                                      for n in ("readCmd", "f")),
            "split verified": all(f.status != "failing" for f in split.functions.values()),
            "CT(split_ys/yss)": ct(split, "split_ys") == ct(split, "split_yss") == f"({CONS})",
        }
        return checks
    checks, secs = timed(run)
    bad = [k for k, v in checks.items() if not v]
    ok = not bad and secs < 1.0
    return ok, report(1, "golden call types", ok, f"{len(checks) - len(bad)}/{len(checks)} exact" +
                      (f", mismatched {bad}" if bad else ""), secs, "1s")


def criterion_2():
    def run():
        ex, split = analyze_fixpoint(load_corpus("Examples")), analyze_fixpoint(load_corpus("Split"))
        io = lambda r, n: show_io(r.functions[n].inout)
        return {
            "IO(null)": io(ex, "null") == "{{Cons(_,_)} -> {False}, {Nil} -> {True}}",
            "IO(head)": io(ex, "head") == "{{Cons(_,_)} -> _}",
            "IO(loop)": io(ex, "loop") == "{ε -> {}}",
            "IO(split)": io(split, "split") == "{_ {Cons(_,_)} -> {Cons(_,_)}, _ {Nil} -> {Cons(_,_)}}",
            "IO(k)": io(ex, "k") == "{{0} -> {'a'}, {1} -> {'b'}}",
        }
    checks, secs = timed(run)
    bad = [k for k, v in checks.items() if not v]
    return not bad, report(2, "golden in/out types", not bad,
                           f"{len(checks) - len(bad)}/{len(checks)} exact" + (f", mismatched {bad}" if bad else ""), secs)


def _sweep(term_size: int, calltypes: bool):
    found, checked, tuples = [], 0, 0
    for name, p in programs().items():
        res = analyze_fixpoint(p)
        exclude = {n for n, f in res.functions.items() if not is_trivial_calltype(f.calltype)}
        ev = Evaluator(p, EvalConfig(step_budget=10000, free_term_size=term_size), exclude_functions=exclude)
        for n, f in res.functions.items():
            if calltypes:
                if f.calltype is FAILING:
                    continue
                rep = check_calltype_oracle(n, f.calltype, p, evaluator=ev)
            else:
                rep = check_inout_oracle(n, f.inout, p, evaluator=ev)
            checked += 1
            tuples += rep.tuples
            found += [f"{name}.{c}" for c in rep.counterexamples]
    return found, checked, tuples


def criterion_3():
    (found, checked, tuples), secs = timed(lambda: _sweep(4, True))
    ok = not found and secs < 60
    return ok, report(3, "call types sound (oracle, size 4, budget 10000)", ok,
                      f"{checked} operations, {tuples} argument tuples, {len(found)} failures"
                      + (f" e.g. {found[0]}" if found else ""), secs, "60s")


def criterion_4():
    (found, checked, tuples), secs = timed(lambda: _sweep(3, False))
    ok = not found and secs < 60
    return ok, report(4, "in/out types cover all oracle values (size 3)", ok,
                      f"{checked} operations, {tuples} argument tuples, {len(found)} violations"
                      + (f" e.g. {found[0]}" if found else ""), secs, "60s")


def criterion_5():
    ps = programs()
    per_depth, times = {}, {}
    for k in (1, 2, 5):
        def run():
            out = {}
            for name, p in ps.items():
                r = analyze_fixpoint(p, DomainConfig(depth=k))
                out[name] = (r.iterations, {n: f.calltype is FAILING for n, f in r.functions.items()})
            return out
        per_depth[k], times[k] = timed(run)
    same = per_depth[1] == per_depth[2] == per_depth[5]
    ok = same and all(t < 5 for t in times.values())
    detail = "identical status and iterations for k=1,2,5" if same else "differences between depths"
    return ok, report(5, "depth consistency", ok, detail + ", " +
                      ", ".join(f"k={k}: {t:.2f}s" for k, t in times.items()), sum(times.values()), "5s per depth")


def criterion_6():
    def run():
        p = load_corpus("Errors")
        default = analyze_fixpoint(p)
        strict = analyze_fixpoint(p, options=AnalysisOptions(error_as_failure=True))
        flagged = check_calltype_oracle("errhead", default.calltype("errhead"), p,
                                        EvalConfig(error_as_failure=False)).counterexamples
        return {
            "default CT (_)": show_calltype(default.calltype("errhead")) == "(_)",
            "head [] not flagged": not flagged,
            "--error-as-failure CT ({Cons})": show_calltype(strict.calltype("errhead")) == f"({CONS})",
            "CLI flag": _cli_errhead_ct(True) == [CONS] and _cli_errhead_ct(False) == ["_"],
        }
    checks, secs = timed(run)
    bad = [k for k, v in checks.items() if not v]
    return not bad, report(6, "error-mode switch", not bad,
                           f"{len(checks) - len(bad)}/{len(checks)} checks" + (f", failed {bad}" if bad else ""), secs)


def _cli_errhead_ct(strict: bool):
    import tempfile
    with tempfile.TemporaryDirectory() as d:
        shutil.copy(corpus_path("Errors"), d)
        args = [sys.executable, "-m", "nonfail", "analyze", str(Path(d) / "Errors.fcir"), "--format", "json"]
        if strict:
            args.append("--error-as-failure")
        out = subprocess.run(args, capture_output=True, text=True, check=True).stdout
    return json.loads(out)["functions"]["errhead"]["calltype"]


def criterion_7(cases: int = 10000):
    def run():
        bad = {}
        for name, law in LAWS.items():
            rng = random.Random(f"law:{name}")
            misses = sum(not law(*random_case(rng)) for _ in range(cases))
            if misses:
                bad[name] = misses
        return bad
    bad, secs = timed(run)
    ok = not bad and secs < 30
    return ok, report(7, "lattice laws", ok, f"{len(LAWS)} laws x {cases} random cases, "
                      f"{sum(bad.values())} violations" + (f" in {sorted(bad)}" if bad else ""), secs, "30s")


def criterion_8():
    import tempfile

    def run():
        with tempfile.TemporaryDirectory() as d:
            paths = []
            for name in CORPUS:
                shutil.copy(corpus_path(name), d)
                paths.append(str(Path(d) / f"{name}.fcir"))
            cmd = [sys.executable, "-m", "nonfail", "analyze", *paths, "--format", "json"]
            a = subprocess.run(cmd, capture_output=True, check=True).stdout
            b = subprocess.run(cmd, capture_output=True, check=True).stdout
        return a, b
    (a, b), secs = timed(run)
    la, lb = a.splitlines(), b.splitlines()
    diff = [i for i, (x, y) in enumerate(zip(la, lb)) if x != y]
    only_time = len(la) == len(lb) and all(b'"time_ms"' in la[i] and b'"time_ms"' in lb[i] for i in diff)
    return only_time, report(8, "deterministic JSON reports", only_time,
                             f"{len(diff)} differing line(s), all in the time field" if only_time
                             else f"{len(diff)} differing line(s) outside the time field", secs)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 9)])
def test_acceptance(criterion, capsys):
    ok, line = criterion()
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
