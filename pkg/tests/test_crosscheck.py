import numpy as np

from arcmatch.arcstr import parse_dotbracket
from arcmatch.crosscheck import CrossChecker
from arcmatch.instances import random_instance


def test_agreement_on_random_instances():
    cc = CrossChecker()
    rng = np.random.default_rng(1)
    for _ in range(300):
        assert cc.check(*random_instance(rng, 6, 9)) is None
    assert cc.tally.agree == cc.tally.instances == 300
    assert cc.tally.envelope_checked > 0 and cc.tally.envelope_violations == 0


def test_broken_phi_is_caught_quickly():
    cc = CrossChecker(flip_phi=True)
    rng = np.random.default_rng(42)
    found = None
    for i in range(1000):
        found = cc.check(*random_instance(rng, 8, 10))
        if found:
            break
    assert found is not None
    text = str(found)
    assert text.startswith("divergence:") and "P = " in text and "Q = " in text


def test_unknown_oracle_rejected():
    import pytest

    with pytest.raises(ValueError):
        CrossChecker(oracles=("magic",))


def test_rec_only_for_larger_texts():
    cc = CrossChecker(oracles=("rec",))
    P = parse_dotbracket("GAU", "(.)")
    Q = parse_dotbracket("G" + "C" * 40 + "AU", "(" + "." * 41 + ")")
    assert cc.check(P, Q) is None
