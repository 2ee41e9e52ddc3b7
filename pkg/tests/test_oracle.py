from itertools import product

import pytest

from arcmatch.arcstr import parse_dotbracket, validate
from arcmatch.errors import InstanceTooLarge
from arcmatch.instances import all_strings
from arcmatch.oracle import (
    Recurrence,
    embed_exists,
    find_embedding,
    gamma_def,
    gamma_rec,
    is_embedding,
    split_composition_violations,
)


def test_nested_pair_witness(nested_pair):
    P, Q = nested_pair
    f = find_embedding(P, Q)
    assert f is not None and is_embedding(P, Q, f)
    # the hand-built map f(1)=1, f(2)=2, f(j)=j+2 is an embedding too
    hand_map = [1, 2] + [j + 2 for j in range(3, 10)]
    assert is_embedding(P, Q, hand_map)


def test_arc_match_is_two_way():
    P = parse_dotbracket("AU", "..")
    Q = parse_dotbracket("AU", "()")
    assert not embed_exists(P, Q)
    assert embed_exists(Q, Q)
    assert find_embedding(Q, Q) == [1, 2]


def test_identity_embedding():
    S = parse_dotbracket("GGACUCCU", "((.(.)))")
    assert find_embedding(S, S) == list(range(1, 9))


def test_cap():
    Q = parse_dotbracket("A" * 30, "." * 30)
    with pytest.raises(InstanceTooLarge):
        embed_exists(parse_dotbracket("A", "."), Q)


def test_find_embedding_matches_exhaustive_maps():
    """Backtracking against enumeration of every order-preserving map."""
    from itertools import combinations

    for P in all_strings(3):
        for Q in all_strings(4):
            brute = any(is_embedding(P, Q, list(c)) for c in combinations(range(1, len(Q) + 1), len(P)))
            assert embed_exists(P, Q) == brute, (P, Q)


def test_gamma_def_examples():
    P = parse_dotbracket("GAU", "(.)")
    Q = parse_dotbracket("GCAU", "(..)")
    assert gamma_def(P, Q, 1, 3, 1, 4) == 3
    assert gamma_def(P, Q, 3, 2, 1, 4) == 2
    S = parse_dotbracket("GAU", "...")
    assert gamma_def(S, parse_dotbracket("A", "."), 2, 3, 1, 1) == 2


def test_recurrence_matches_definition_exhaustively():
    Ps = list(all_strings(4))
    Qs = list(all_strings(5))
    checked = 0
    for P in Ps[::7]:
        m = len(P)
        for Q in Qs[::5]:
            n = len(Q)
            rec = Recurrence(P, Q)
            for j1, i1 in product(range(1, m + 2), range(1, n + 2)):
                for j2 in range(j1 - 1, m + 1):
                    for i2 in range(i1 - 1, n + 1):
                        assert rec.gamma(j1, j2, i1, i2) == gamma_def(P, Q, j1, j2, i1, i2), (P, Q, j1, j2, i1, i2)
                        checked += 1
    assert checked > 10_000


def test_case5_split():
    P = parse_dotbracket("AUG", "...")
    Q = parse_dotbracket("AUCG", "()..")
    rec = Recurrence(P, Q)
    assert rec.gamma(1, 3, 1, 4) == rec.gamma(rec.gamma(1, 3, 1, 2) + 1, 3, 3, 4)
    assert gamma_rec(P, Q, 1, 3, 1, 4) == gamma_def(P, Q, 1, 3, 1, 4) == 1


def test_case6_max():
    # base-only head of P against an arc of Q: best of dropping either end
    Q = parse_dotbracket("AU", "()")
    for bases, expected in (("U", 1), ("A", 1), ("G", 0)):
        P = parse_dotbracket(bases, ".")
        rec = Recurrence(P, Q)
        assert rec.gamma(1, 1, 1, 2) == max(rec.gamma(1, 1, 2, 2), rec.gamma(1, 1, 1, 1)) == expected
        assert gamma_def(P, Q, 1, 1, 1, 2) == expected


def test_split_composition_small():
    for P in list(all_strings(3))[::3]:
        for Q in list(all_strings(4))[::4]:
            assert split_composition_violations(P, Q) == []


def test_deep_recursion_is_safe():
    n = 600
    Q = parse_dotbracket("A" * n, "(" * (n // 2) + ")" * (n // 2))
    P = parse_dotbracket("AA", "()")
    assert gamma_rec(P, Q, 1, 2, 1, n) == 2
