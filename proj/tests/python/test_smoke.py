"""Smoke tests for the mshot python module."""

import os
import sys

import mshot

SIMPLE = """\
#external p(1;2;3).
p(0) :- p(3).
p(0) :- not p(0).

#program succ(n).
#external p(n+3).
p(n) :- p(n+3).
p(n) :- not p(n+1), not p(n+2).
"""

LISTING1 = """\
a(1).
a(2).

#program acid(k).
b(k).
c(X,k) :- a(X).
"""


def models_of(result):
    return sorted(tuple(sorted(m["atoms"])) for m in result["models"])


def test_one_shot():
    models = mshot.stable_models("a. b :- a. c :- not d.")
    assert models == [["a", "b", "c"]]


def test_simple_sequence():
    ctl = mshot.Control(SIMPLE)
    ctl.ground("base")
    ctl.assign_external("p(3)", "true")
    r1 = ctl.solve()
    assert models_of(r1) == [("p(0)", "p(3)")]
    ctl.assign_external("p(3)", "false")
    r2 = ctl.solve()
    assert not r2["satisfiable"] and r2["models"] == []
    ctl.ground([("succ", [1]), ("succ", [2])])
    r3 = ctl.solve()
    assert not r3["satisfiable"]
    ctl.ground([("succ", [3])])
    r4 = ctl.solve()
    assert models_of(r4) == [("p(0)", "p(3)")]
    assert sorted(ctl.inputs()) == ["p(4)", "p(5)", "p(6)"]


def test_grounding_order():
    first = mshot.Control(LISTING1)
    first.ground("base")
    first.ground([("acid", [42])])
    assert "c(1,42) :- a(1)." in first.dump()

    second = mshot.Control(LISTING1)
    second.ground([("acid", [42])])
    second.ground("base")
    assert "c(1,42)" not in second.dump()


def test_externals_and_release():
    ctl = mshot.Control("#external e(1..2).\nb(X) :- e(X).")
    ctl.ground("base")
    ctl.assign_external("e(1)", "true")
    r = ctl.solve()
    assert models_of(r) == [("b(1)", "e(1)")]
    ctl.release_external("e(1)")
    r = ctl.solve()
    assert models_of(r) == [()]


def test_assumptions():
    ctl = mshot.Control("{ q(1) }.")
    ctl.ground("base")
    assert len(ctl.solve()["models"]) == 2
    r = ctl.solve(must_true=["q(1)"])
    assert models_of(r) == [("q(1)",)]
    r = ctl.solve(must_false=["q(1)"])
    assert models_of(r) == [()]


def test_optimization():
    ctl = mshot.Control("{ q(1) }.\n{ q(2) }.\n:- not q(1), not q(2).\n"
                        "#minimize{ 1,X : q(X) }.")
    ctl.ground("base")
    r = ctl.solve()
    assert r["satisfiable"]
    assert all(m["cost"] == {0: 1} for m in r["models"])
    assert len(r["models"]) == 2


def test_trace():
    ctl = mshot.Control("a.")
    ctl.ground("base")
    ctl.solve()
    assert ctl.trace()[0] == "create()"
    assert "ground((base,()))" in ctl.trace()


def main():
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
                print(f"PASS {name}")
            except AssertionError as e:
                failures += 1
                print(f"FAIL {name}: {e}")
    return failures


if __name__ == "__main__":
    sys.exit(1 if main() else 0)
