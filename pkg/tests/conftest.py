import os
import sys

from hypothesis import HealthCheck, settings, strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from unets.syntax import App, Atom, Exists, Forall, Par, Tensor, Var  # noqa: E402

settings.register_profile("default", max_examples=150, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

VARS = ("x", "y", "z", "u", "v")


def terms(depth: int = 2):
    base = st.one_of(st.sampled_from([Var(v) for v in VARS]),
                     st.sampled_from([App("a"), App("b")]))
    if depth == 0:
        return base
    sub = terms(depth - 1)
    return st.one_of(base,
                     st.builds(lambda t: App("f", (t,)), sub),
                     st.builds(lambda s, t: App("g", (s, t)), sub, sub))


def atoms():
    return st.one_of(
        st.builds(lambda t, n: Atom("P", (t,), n), terms(), st.booleans()),
        st.builds(lambda s, t, n: Atom("Q", (s, t), n), terms(), terms(), st.booleans()),
        st.builds(lambda n: Atom("R", (), n), st.booleans()),
    )


def formulas():
    return st.recursive(
        atoms(),
        lambda inner: st.one_of(
            st.builds(Tensor, inner, inner),
            st.builds(Par, inner, inner),
            st.builds(Forall, st.sampled_from(VARS), inner),
            st.builds(Exists, st.sampled_from(VARS), inner),
        ),
        max_leaves=6,
    )


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion that ran in this session."""
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
