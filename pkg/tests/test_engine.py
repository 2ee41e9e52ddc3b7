import math

import numpy as np
import pytest

from arcmatch.arcstr import parse_dotbracket
from arcmatch.engine import (
    MODES,
    EngineConfig,
    light_depth_bound,
    longest_prefix,
    naps,
    naps_prepared,
    prepare_text,
    wrap_pair,
)
from arcmatch.gamma import PatternContext
from arcmatch.instances import bench_instance, random_instance

ALL = pytest.mark.parametrize("mode", MODES)


@ALL
def test_leaf_example(mode):
    r = naps(parse_dotbracket("GAU", "(.)"), parse_dotbracket("GCAU", "(..)"), EngineConfig(mode=mode))
    assert r.is_subsequence and r.gamma_root == 3 and not r.wrapped


@ALL
def test_nested_pair(mode, nested_pair):
    r = naps(*nested_pair, EngineConfig(mode=mode))
    assert r.is_subsequence and r.gamma_root == 9
    s = r.stats
    assert (s.initialize, s.meld, s.combine, s.extend) == (8, 4, 6, 8)


@ALL
def test_arc_must_match_both_ways(mode):
    r = naps(parse_dotbracket("AU", ".."), parse_dotbracket("AU", "()"), EngineConfig(mode=mode))
    assert not r.is_subsequence and r.wrapped


@ALL
def test_empty_pattern(mode):
    r = naps(parse_dotbracket("", ""), parse_dotbracket("ACG", "(.)"), EngineConfig(mode=mode))
    assert r.is_subsequence and r.m == 2


def test_longest_prefix_examples(nested_pair):
    assert longest_prefix(*nested_pair) == 9
    assert longest_prefix(parse_dotbracket("GAU", "(.)"), parse_dotbracket("GA", "..")) == 0
    assert longest_prefix(parse_dotbracket("AAU", ".()"), parse_dotbracket("A", ".")) == 1


def test_config_validation():
    with pytest.raises(ValueError):
        EngineConfig(mode="fast")
    P = parse_dotbracket("AU", "..")
    with pytest.raises(ValueError):
        naps_prepared(PatternContext(P), prepare_text(parse_dotbracket("AU", "()")))


def check_counts(r, text):
    s = r.stats
    a = text.n_arcs
    assert s.initialize == 2 * a
    assert s.meld == a
    assert s.combine == 2 * (a - 1)
    assert s.extend <= 2 * text.n + 4 * a
    assert s.peak_live_gamma <= 3 * (math.floor(math.log2(a)) + 2)


def test_mode_equivalence_and_counts():
    rng = np.random.default_rng(11)
    for _ in range(150):
        P, Q = random_instance(rng, 50, 200)
        P2, Q2, wrapped = wrap_pair(P, Q)
        ctx, text = PatternContext(P2), prepare_text(Q2)
        rs = [naps_prepared(ctx, text, EngineConfig(mode=m, debug=True), wrapped=wrapped) for m in MODES]
        for r in rs:
            assert np.array_equal(r.root.values, rs[0].root.values)
            assert r.is_subsequence == (r.gamma_root == ctx.m)
            assert r.stats.envelope_violations == 0
            check_counts(r, text)
        assert rs[0].stats.encode == 0
        assert rs[1].stats.encode == rs[1].stats.decode
        assert rs[2].stats.decode == 0


def test_determinism():
    P, Q = bench_instance(30, 3000, seed=5)
    for mode in MODES:
        a = naps(P, Q, EngineConfig(mode=mode)).stats.as_dict()
        b = naps(P, Q, EngineConfig(mode=mode)).stats.as_dict()
        a.pop("wall_time"), b.pop("wall_time")
        assert a == b


@ALL
def test_deep_chain_uses_no_native_recursion(mode):
    depth = 100_000
    Q = parse_dotbracket("A" * (2 * depth), "(" * depth + ")" * depth)
    P = parse_dotbracket("AAAA", "(())")
    r = naps(P, Q, EngineConfig(mode=mode))
    assert r.is_subsequence
    assert r.stats.meld == depth and r.lightdepth_max == 0


@ALL
def test_wide_fan(mode):
    k = 5000
    Q = parse_dotbracket("G" + "AU" * k + "C", "(" + "()" * k + ")")
    cfg = EngineConfig(mode=mode)
    # unpaired bases may land on endpoints of different arcs
    assert naps(parse_dotbracket("GUAC", "(..)"), Q, cfg).is_subsequence
    assert naps(parse_dotbracket("GAUAUC", "(()())"), Q, cfg).is_subsequence
    # nesting depth 3 cannot fit into depth 2
    assert not naps(parse_dotbracket("GAAUUC", "((()))"), Q, cfg).is_subsequence
    # a single pair's endpoints are both in the image, so the arc must be kept
    assert not naps(parse_dotbracket("GAUC", "(..)"), parse_dotbracket("GAUC", "(())"), cfg).is_subsequence


def test_light_depth_bound():
    assert light_depth_bound(1) == 0
    assert light_depth_bound(1024) == 10
