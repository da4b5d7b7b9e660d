import pytest
from hypothesis import given, settings, strategies as st

from ltlfsat.formula import (
    FALSE,
    TAIL,
    TRUE,
    And,
    Atom,
    FiniteTrace,
    Next,
    Not,
    Or,
    ParseError,
    Release,
    ReservedAtomError,
    Until,
    WeakNext,
    atoms,
    closure,
    conjuncts,
    is_nnf,
    is_tnf,
    parse,
    render,
    to_nnf,
    to_tnf,
)
from ltlfsat.semantics import evaluate


def test_parse_overview_formula():
    f = parse("(! Tail & a) U b")
    assert f is Until(And(Not(Atom("Tail")), Atom("a")), Atom("b"))


def test_parse_keywords():
    assert parse("true") is TRUE
    assert parse("false") is FALSE


def test_parse_globally_is_sugar():
    assert parse("G p") is Release(FALSE, Atom("p"))
    assert parse("F p") is Until(TRUE, Atom("p"))


def test_parse_implication_desugars():
    f = parse("a -> b")
    assert f is Or(Not(Atom("a")), Atom("b"))


def test_parse_equivalence_desugars():
    f = parse("a <-> b")
    a, b = Atom("a"), Atom("b")
    assert f is And(Or(Not(a), b), Or(Not(b), a))


def test_parse_precedence_until_binds_tighter_than_and():
    # ascending precedence: | then & then U then R
    f = parse("a & b U c")
    assert f is And(Atom("a"), Until(Atom("b"), Atom("c")))
    g = parse("a | b & c")
    assert g is Or(Atom("a"), And(Atom("b"), Atom("c")))


def test_parse_until_right_associative():
    f = parse("a U b U c")
    assert f is Until(Atom("a"), Until(Atom("b"), Atom("c")))


def test_parse_release_binds_tighter_than_until():
    f = parse("a U b R c")
    assert f is Until(Atom("a"), Release(Atom("b"), Atom("c")))


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as err:
        parse("a &\n& b")
    assert err.value.line == 2
    with pytest.raises(ParseError, match="empty input"):
        parse("   ")
    with pytest.raises(ParseError, match="unknown operator"):
        parse("a < b")
    with pytest.raises(ParseError, match="trailing"):
        parse("a b")
    with pytest.raises(ParseError):
        parse("(a")


def test_and_or_are_canonically_ordered():
    a, b = Atom("a"), Atom("b")
    assert And(a, b) is And(b, a)
    assert Or(a, b) is Or(b, a)
    assert Until(a, b) is not Until(b, a)


def test_render_examples():
    assert render(Until(Atom("a"), Atom("b"))) == "(a) U (b)"
    assert render(Not(Atom("p"))) == "! (p)"
    assert render(WeakNext(Atom("p"))) == "N (p)"


_names = st.sampled_from(["a", "b", "Tail", "p_1"])


def _formulas(depth, names=_names):
    leaf = st.one_of(st.just(TRUE), st.just(FALSE), st.builds(Atom, names))
    return st.recursive(
        leaf,
        lambda sub: st.one_of(
            st.builds(Not, sub),
            st.builds(Next, sub),
            st.builds(WeakNext, sub),
            st.builds(And, sub, sub),
            st.builds(Or, sub, sub),
            st.builds(Until, sub, sub),
            st.builds(Release, sub, sub),
        ),
        max_leaves=depth,
    )


@settings(max_examples=1000, deadline=None)
@given(_formulas(25))
def test_render_parse_round_trip(f):
    assert parse(render(f)) is f


@settings(max_examples=300, deadline=None)
@given(_formulas(12))
def test_to_nnf_shape(f):
    g = to_nnf(f)
    assert is_nnf(g)


def test_to_nnf_examples():
    a, b, p = Atom("a"), Atom("b"), Atom("p")
    assert to_nnf(Not(Until(a, b))) is Release(Not(a), Not(b))
    assert to_nnf(Not(Next(a))) is WeakNext(Not(a))
    assert to_nnf(Not(Not(p))) is p


def _all_traces(names, max_len):
    from itertools import product

    alphabet = frozenset(names)
    for length in range(1, max_len + 1):
        for codes in product(range(1 << len(names)), repeat=length):
            yield FiniteTrace(
                tuple(
                    frozenset(n for j, n in enumerate(names) if code & (1 << j))
                    for code in codes
                ),
                alphabet,
            )


@settings(max_examples=150, deadline=None)
@given(_formulas(10))
def test_to_nnf_preserves_semantics(f):
    g = to_nnf(f)
    for trace in _all_traces(["a", "b", "Tail", "p_1"], 3):
        assert evaluate(trace, f) == evaluate(trace, g)


def test_to_tnf_examples():
    a, b = Atom("a"), Atom("b")
    tail = Atom(TAIL)
    f_tail = Until(TRUE, tail)
    assert to_tnf(Next(a)) is And(And(Not(tail), Next(a)), f_tail)
    assert to_tnf(WeakNext(a)) is And(Or(tail, Next(a)), f_tail)
    assert to_tnf(Until(a, b)) is And(Until(And(Not(tail), a), b), f_tail)
    assert to_tnf(Release(a, b)) is And(Release(Or(tail, a), b), f_tail)
    assert to_tnf(And(a, b)) is And(And(a, b), f_tail)


def test_to_tnf_rejects_reserved_atom():
    with pytest.raises(ReservedAtomError):
        to_tnf(Atom(TAIL))


def test_to_tnf_rejects_non_nnf():
    with pytest.raises(ValueError):
        to_tnf(Not(Next(Atom("a"))))


@settings(max_examples=200, deadline=None)
@given(_formulas(10))
def test_to_tnf_output_shape(f):
    g = to_nnf(f)
    if TAIL in atoms(g):
        return
    t = to_tnf(g)
    assert is_tnf(t)
    assert Until(TRUE, Atom(TAIL)) in closure(t)


@settings(max_examples=150, deadline=None)
@given(_formulas(8, names=st.sampled_from(["a", "b"])))
def test_tnf_trace_correspondence(f):
    """A trace satisfies f exactly when its Tail-marked twin satisfies the
    tail normal form."""
    g = to_nnf(f)
    t = to_tnf(g)
    for trace in _all_traces(["a", "b"], 3):
        marked = FiniteTrace(
            trace.positions[:-1] + (trace.positions[-1] | {TAIL},),
            trace.alphabet | {TAIL},
        )
        assert evaluate(trace, g) == evaluate(marked, t)


def test_closure_examples():
    a, b = Atom("a"), Atom("b")
    f = Until(a, b)
    assert closure(f) == frozenset({f, a, b})
    assert closure(a) == frozenset({a})
    tail_closure = closure(to_tnf(Until(a, b)))
    assert Until(TRUE, Atom(TAIL)) in tail_closure
    assert Atom(TAIL) in tail_closure


def test_conjuncts_split_nested():
    a, b, c = Atom("a"), Atom("b"), Atom("c")
    f = And(And(a, b), c)
    assert set(conjuncts(f)) == {a, b, c}
    assert conjuncts(a) == (a,)


def test_trace_text_round_trip():
    trace = FiniteTrace.make([{"a", "b"}, set(), {"b"}])
    text = trace.to_text()
    assert text == "a,b\n\nb\n"
    back = FiniteTrace.from_text(text, trace.alphabet)
    assert back.positions == trace.positions


def test_trace_rejects_empty():
    with pytest.raises(ValueError):
        FiniteTrace.make([])
    with pytest.raises(ValueError):
        FiniteTrace.from_text("")


def test_trace_rejects_undeclared_atoms():
    with pytest.raises(ValueError):
        FiniteTrace.make([{"a"}], alphabet=frozenset({"b"}))
