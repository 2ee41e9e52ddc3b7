import numpy as np
import pytest
from hypothesis import given, settings, HealthCheck

from arcmatch.arcstr import is_arc_preserving_split, parse_dotbracket, substring_view, validate
from arcmatch.errors import IntervalMismatch, OutOfRange, PreconditionViolated
from arcmatch.gamma import GammaSeq, PatternContext, combine, extend, init_empty, init_single, meld
from arcmatch.oracle import gamma_def

from conftest import nested_strings

GAU = parse_dotbracket("GAU", "(.)")
GCAU = parse_dotbracket("GCAU", "(..)")


def oracle_seq(P, Q, i1, i2):
    m = len(P)
    return GammaSeq.from_values([gamma_def(P, Q, j, m, i1, i2) for j in range(1, m + 1)], i1, i2)


@pytest.fixture
def ctx():
    return PatternContext(GAU)


def test_init_single_examples(ctx):
    Q = parse_dotbracket("UA#", "...", allow_sentinel=True)
    assert init_single(ctx, Q, 1).tolist() == [0, 1, 3]
    assert init_single(ctx, Q, 2).tolist() == [0, 2, 2]
    assert init_single(ctx, Q, 3).tolist() == [0, 1, 2]
    with pytest.raises(OutOfRange):
        init_single(ctx, Q, 4)


def test_init_empty():
    assert init_empty(3).tolist() == [0, 1, 2]
    assert init_empty(1).tolist() == [0]
    assert init_empty(3, boundary=5).interval == (5, 4)


def test_extend_examples(ctx):
    g44 = init_single(ctx, GCAU, 4)
    g34 = extend(ctx, GCAU, g44, 3)
    assert g34.tolist() == [0, 3, 3]
    g24 = extend(ctx, GCAU, g34, 2)
    assert g24.tolist() == [0, 3, 3]
    g33 = init_single(ctx, GCAU, 3)
    assert g33.tolist() == [0, 2, 2]
    g23 = extend(ctx, GCAU, g33, 2)
    assert g23.tolist() == [0, 2, 2]
    assert g23.interval == (2, 3)


def test_extend_preconditions(ctx):
    g24 = GammaSeq.from_values([0, 3, 3], 2, 4)
    with pytest.raises(PreconditionViolated):
        extend(ctx, GCAU, g24, 1)
    with pytest.raises(IntervalMismatch):
        extend(ctx, GCAU, g24, 2)


def test_extend_inplace_reuses_buffer(ctx):
    g = init_single(ctx, GCAU, 4)
    out = extend(ctx, GCAU, g, 3, inplace=True)
    assert out.values is g.values


def test_meld_example(ctx):
    g_a = GammaSeq.from_values([0, 3, 3], 2, 4)
    g_b = GammaSeq.from_values([0, 2, 2], 1, 3)
    g_c = GammaSeq.from_values([0, 2, 2], 2, 3)
    assert meld(ctx, GCAU, g_a, g_b, g_c, (1, 4)).tolist() == [3, 3, 3]
    with pytest.raises(IntervalMismatch):
        meld(ctx, GCAU, g_b, g_a, g_c, (1, 4))


def test_meld_bare_arc_onto_bare_arc():
    P = parse_dotbracket("AU", "()")
    Q = parse_dotbracket("AU", "()")
    c = PatternContext(P)
    g_a = init_single(c, Q, 2)
    g_b = init_single(c, Q, 1)
    out = meld(c, Q, g_a, g_b, init_empty(2, boundary=2), (1, 2))
    assert out.tolist() == [2, 2]


def test_meld_degenerate_copies_g_a():
    P = parse_dotbracket("GAU", "(.)")
    Q = parse_dotbracket("CCCC", "(..)")
    c = PatternContext(P)
    g_a = oracle_seq(P, Q, 2, 4)
    g_b = oracle_seq(P, Q, 1, 3)
    g_c = oracle_seq(P, Q, 2, 3)
    assert meld(c, Q, g_a, g_b, g_c, (1, 4)) == GammaSeq(g_a.values, 1, 4)


def test_combine_identity_and_sentinel():
    left = GammaSeq.from_values([0, 1, 3], 1, 2)
    assert combine(left, init_empty(3, boundary=3)).tolist() == [0, 1, 3]
    full = GammaSeq.from_values([3, 3, 3], 1, 2)
    right = GammaSeq.from_values([0, 1, 2], 3, 5)
    assert combine(full, right).tolist() == [3, 3, 3]
    with pytest.raises(IntervalMismatch):
        combine(left, GammaSeq.from_values([0, 1, 2], 4, 5))


def test_combine_against_definition():
    P = parse_dotbracket("#AU#", "(..)", allow_sentinel=True)
    Q = parse_dotbracket("#AUAU#", "(()..)", allow_sentinel=True)
    left = oracle_seq(P, Q, 2, 3)
    right = oracle_seq(P, Q, 4, 6)
    assert combine(left, right, Q) == oracle_seq(P, Q, 2, 6)


def test_combine_requires_arc_when_text_given():
    P = parse_dotbracket("AU", "..")
    Q = parse_dotbracket("AUAU", "....")
    with pytest.raises(IntervalMismatch):
        combine(oracle_seq(P, Q, 1, 2), oracle_seq(P, Q, 3, 4), Q)


def test_sequence_accessors():
    g = GammaSeq.from_values([0, 1, 3], 1, 4)
    assert g[1] == 0 and g[3] == 3 and g[4] == 3
    assert g.descending() == [3, 1, 0]
    with pytest.raises(OutOfRange):
        g[0]


def primitive_cases(P, Q):
    """Every primitive application whose operands are oracle sequences of P against Q."""
    n = len(Q)
    for i in range(1, n + 1):
        yield ("init", i), oracle_seq(P, Q, i, i), lambda c, i=i: init_single(c, Q, i)
    for i1 in range(1, n + 1):
        for i2 in range(i1, n + 1):
            p = int(Q.partner[i1])
            if not (i1 < p <= i2) and i1 < i2:
                g = oracle_seq(P, Q, i1 + 1, i2)
                yield ("extend", i1, i2), oracle_seq(P, Q, i1, i2), lambda c, g=g, i1=i1: extend(c, Q, g, i1)
            if i1 < p < i2:
                gl, gr = oracle_seq(P, Q, i1, p), oracle_seq(P, Q, p + 1, i2)
                yield ("combine", i1, p, i2), oracle_seq(P, Q, i1, i2), lambda c, gl=gl, gr=gr: combine(gl, gr, Q)
            if p == i2:
                ga = oracle_seq(P, Q, i1 + 1, i2)
                gb = oracle_seq(P, Q, i1, i2 - 1)
                gc = oracle_seq(P, Q, i1 + 1, i2 - 1)
                yield (
                    ("meld", i1, i2),
                    oracle_seq(P, Q, i1, i2),
                    lambda c, ga=ga, gb=gb, gc=gc, a=(i1, i2): meld(c, Q, ga, gb, gc, a),
                )


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(nested_strings(max_len=5, min_len=1), nested_strings(max_len=7, min_len=1))
def test_primitives_match_definition(P, Q):
    c = PatternContext(P)
    for label, expected, run in primitive_cases(P, Q):
        got = run(c)
        assert got == expected, (label, got, expected)
        assert got.is_monotone()


@settings(max_examples=60, deadline=None)
@given(nested_strings(max_len=5, min_len=1), nested_strings(max_len=7, min_len=1))
def test_greedy_composition(P, Q):
    m, n = len(P), len(Q)
    for i1 in range(1, n + 1):
        for i2 in range(i1, n + 1):
            view = substring_view(Q, i1, i2)
            for cut in range(i1, i2):
                if not is_arc_preserving_split(view, cut - i1 + 1):
                    continue
                for j1 in range(1, m + 1):
                    first = gamma_def(P, Q, j1, m, i1, cut)
                    assert gamma_def(P, Q, j1, m, i1, i2) == gamma_def(P, Q, first + 1, m, cut + 1, i2)


@settings(max_examples=60, deadline=None)
@given(nested_strings(max_len=6, min_len=1), nested_strings(max_len=8, min_len=1))
def test_values_induce_splits(P, Q):
    m = len(P)
    for i1 in range(1, len(Q) + 1):
        for i2 in range(i1, len(Q) + 1):
            g = oracle_seq(P, Q, i1, i2)
            for j1 in range(1, m + 1):
                k = g[j1]
                assert is_arc_preserving_split(substring_view(P, j1, m), k - j1 + 1)


@given(nested_strings(max_len=20, min_len=1, alphabet="ACGU"), nested_strings(max_len=30, min_len=1, alphabet="ACGU"))
def test_extend_over_mismatch_is_identity(P, Q):
    c = PatternContext(P)
    X = validate("Z" + Q.bases, [(a + 1, b + 1) for a, b in Q.arcs])
    g = GammaSeq(init_single(c, X, 2).values, 2, 2)
    assert extend(c, X, g, 1).tolist() == g.tolist()
