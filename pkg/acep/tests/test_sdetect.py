import itertools
import logging

import pytest

from acep.fiber import CaseLabel, classify

from acep.graph import build_stallings, trivial_graph
from acep.sdetect import (
    SStatus,
    conjugate_witness,
    default_bound,
    find_cycle_pair,
    is_cyclic_shift,
    is_s_subgroup,
    verify_witness,
)
from acep.words import Alphabet, cyclic_reduce, words_up_to

XY = Alphabet(("x", "y"))
ABC = Alphabet(("a", "b", "c"))


def _subgroup(alphabet, *generators):
    return build_stallings(alphabet, [alphabet.parse_word(w) for w in generators])


@pytest.fixture
def h1():
    return _subgroup(XY, "xx", "Yxxy")


def test_cyclic_shift(h1):
    h2 = _subgroup(XY, "xxx", "yyy")
    xxx = XY.parse_word("xxx")
    assert is_cyclic_shift(h2, 0, 0, xxx)
    assert is_cyclic_shift(h2, 0, h2.trace(0, (1,)), xxx)
    assert not is_cyclic_shift(h1, 0, 2, XY.parse_word("xx"))


def test_default_bound(h1):
    # twelve edges in the dotted product, longest basis word Yxxy
    assert default_bound(h1) == 2 * 12 + 4
    assert default_bound(_subgroup(XY, "Yxxy", "xx", "xxxx")) == default_bound(h1)


def test_verify_witness(h1):
    xx, y = XY.parse_word("xx"), XY.parse_word("y")
    assert verify_witness(h1, xx, y)
    assert not verify_witness(h1, xx, xx)
    # x itself is not in H
    assert not verify_witness(h1, XY.parse_word("x"), y)


def test_h1_is_an_s_subgroup(h1):
    result = is_s_subgroup(h1)
    assert result.status is SStatus.YES
    assert result.exact
    assert verify_witness(h1, result.witness.w, result.witness.a)
    star, _ = cyclic_reduce(result.witness.w)
    assert star.representative in {(1, 1), (-1, -1)}


def test_h1_pair_found(h1):
    pair = find_cycle_pair(h1)
    assert pair is not None
    assert pair.v != pair.v_prime
    assert not is_cyclic_shift(h1.core(), pair.v, pair.v_prime, pair.label.representative)


@pytest.mark.parametrize(
    "generators",
    [
        ("x", "Yxy"),  # cyclic intersection, not a proper power
        ("y", "xyX", "xx"),  # normal of index two
    ],
)
def test_cases_two_and_three_are_s_subgroups(generators):
    g = _subgroup(XY, *generators)
    result = is_s_subgroup(g)
    assert result.status is SStatus.YES
    assert verify_witness(g, result.witness.w, result.witness.a)


def test_generated_cases_two_and_three_are_s_subgroups():
    words = [w for w in words_up_to(XY.rank, 2) if w]
    n_checked = 0
    for pair in itertools.combinations(words, 2):
        g = build_stallings(XY, pair)
        if classify(g).case not in (CaseLabel.NON_CYCLONORMAL, CaseLabel.CYCLIC_NON_POWER):
            continue
        n_checked += 1
        result = is_s_subgroup(g)
        assert result.status is SStatus.YES
        assert verify_witness(g, result.witness.w, result.witness.a)
    assert n_checked > 0


def test_h2_has_no_pair():
    g = _subgroup(XY, "xxx", "yyy")
    result = is_s_subgroup(g)
    assert result.status is SStatus.NO_WITHIN_BOUND
    assert not result.exact
    assert result.witness is None


def test_truncated_search_is_reported(caplog):
    g = _subgroup(XY, "xxx", "yyy")
    with caplog.at_level(logging.WARNING, logger="acep.sdetect"):
        assert find_cycle_pair(g, max_candidates=1) is None
    assert "inconclusive" in caplog.text
    assert is_s_subgroup(g, max_candidates=1).status is SStatus.UNKNOWN


def test_rank_four_example_has_no_pair():
    g = _subgroup(ABC, "aaaa", "aaba", "acaa", "bC")
    assert find_cycle_pair(g) is None
    assert is_s_subgroup(g).status is SStatus.NO_WITHIN_BOUND


@pytest.mark.parametrize("generators", [("x",), ("xy",), ()])
def test_malnormal_answers_are_exact(generators):
    g = _subgroup(XY, *generators) if generators else trivial_graph(XY)
    result = is_s_subgroup(g)
    assert result.status is SStatus.NO_WITHIN_BOUND
    assert result.exact


def test_bound_must_be_positive(h1):
    with pytest.raises(ValueError):
        find_cycle_pair(h1, bound=0)


def test_witness_transports_to_conjugates(h1):
    witness = is_s_subgroup(h1).witness
    for b in words_up_to(XY.rank, 3):
        conjugated = conjugate_witness(witness, b)
        assert verify_witness(h1.conjugate(b), conjugated.w, conjugated.a)
