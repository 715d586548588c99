import json
import numpy as np
import pytest

from acep.graph import (
    StallingsGraph,
    XDigraph,
    build_stallings,
    conjugate_subgroups,
    count_paths,
    fold,
    isomorphic_based,
    load_subgroup_spec,
    parse_subgroup_spec,
    petal_graph,
    trivial_graph,
)
from acep.words import (
    Alphabet,
    conjugate,
    inverse,
    multiply,
    random_reduced_word,
    words_up_to,
)

XY = Alphabet(("x", "y"))
ABC = Alphabet(("a", "b", "c"))


def _h1():
    return build_stallings(XY, [XY.parse_word("xx"), XY.parse_word("Yxxy")])


def _h2():
    return build_stallings(XY, [XY.parse_word("xxx"), XY.parse_word("yyy")])


def _rank_four_example():
    return build_stallings(ABC, [ABC.parse_word(w) for w in ("aaaa", "aaba", "acaa", "bC")])


def test_h1_graph():
    g = _h1()
    assert (g.n_vertices, g.n_edges, g.rank) == (4, 5, 2)
    assert g.basepoint == 0
    assert g.member(XY.parse_word("xxYxxy"))
    assert not g.member(XY.parse_word("x"))
    assert not g.member(XY.parse_word("y"))


def test_rank_four_example():
    g = _rank_four_example()
    assert (g.n_vertices, g.n_edges) == (5, 8)
    assert g.rank == 4
    assert g.betti_number() == 4
    # w4 = a^-2 w2 a w3^-1 a
    assert g.member(ABC.parse_word("AAaabaaAACAa"))


def test_trivial_and_whole_group():
    assert trivial_graph(XY).rank == 0
    assert build_stallings(XY, []).n_vertices == 1
    whole = build_stallings(XY, [XY.parse_word("x"), XY.parse_word("xy")])
    assert (whole.n_vertices, whole.n_edges) == (1, 2)


def test_folding_is_canonical():
    # Two bases of the same subgroup
    g1 = build_stallings(XY, [XY.parse_word("xx"), XY.parse_word("Yxxy")])
    g2 = build_stallings(XY, [XY.parse_word("xxYxxy"), XY.parse_word("XX")])
    assert g1.edges == g2.edges
    assert isomorphic_based(g1, g2)
    assert g1.canonical_key == g2.canonical_key


def test_fold_strips_tail():
    g = fold(petal_graph(XY, [XY.parse_word("yxY"), XY.parse_word("yxxY")]), 0)
    assert g.is_folded()
    assert (g.n_vertices, g.n_edges) == (2, 2)
    # Every generator starts with y, so the basepoint hangs on a tail
    assert g.core().n_vertices == g.n_vertices - 1


def test_invalid_stallings_graph():
    with pytest.raises(ValueError):
        StallingsGraph(XY, [0, 1, 2], [(0, 1, 0), (0, 2, 0), (1, 0, 1), (2, 0, 1)], 0)
    with pytest.raises(ValueError):
        StallingsGraph(XY, [0, 1], [(0, 0, 0), (0, 1, 1)], 0)
    with pytest.raises(ValueError):
        XDigraph(XY, [0], [(0, 0, 2)])


def test_trace_rejects_unknown_vertex():
    with pytest.raises(ValueError):
        _h1().trace(17, XY.parse_word("x"))


def test_basis_rewriting():
    g = _rank_four_example()
    basis = g.basis()
    assert len(basis) == 4
    assert isomorphic_based(build_stallings(ABC, basis.basis_words), g)
    rng = np.random.default_rng(3)
    for _ in range(20):
        indices = rng.integers(0, 4, size=3)
        signs = rng.choice([-1, 1], size=3)
        factors = [basis.basis_words[i] for i in indices]
        word = multiply(*[h if s > 0 else inverse(h) for h, s in zip(factors, signs)])
        rewritten = g.rewrite_in_basis(word)
        assert rewritten is not None
        assert basis.evaluate(rewritten) == word
    assert g.rewrite_in_basis(ABC.parse_word("b")) is None


def test_tree_paths_reach_vertices():
    g = _h1()
    for v, path in g.tree_paths().items():
        assert g.trace(g.basepoint, path) == v


def test_conjugate_graph():
    g = _h1()
    b = XY.parse_word("xy")
    conjugated = g.conjugate(b)
    for h in g.basis().basis_words:
        assert conjugated.member(conjugate(h, b))
    assert conjugate_subgroups(g, conjugated)
    assert not conjugate_subgroups(_h1(), _h2())


def _brute_members(generators, max_factors):
    letters = list(generators) + [inverse(g) for g in generators]
    found = {()}
    frontier = {()}
    for _ in range(max_factors):
        frontier = {multiply(w, g) for w in frontier for g in letters}
        found |= frontier
    return found


@pytest.mark.parametrize("make", [_h1, _h2])
def test_member_agrees_with_enumeration(make):
    g = make()
    brute = _brute_members(g.basis().basis_words, 4)
    rng = np.random.default_rng(11)
    for _ in range(1000):
        word = random_reduced_word(rng, 2, int(rng.integers(0, 5)))
        assert g.member(word) == (word in brute)
    for word in brute:
        assert g.member(word)


def _brute_conjugate(g1, g2, max_length=2):
    return any(
        isomorphic_based(g1.conjugate(b), g2) for b in words_up_to(g1.alphabet.rank, max_length)
    )


def test_conjugate_subgroups_agrees_with_enumeration():
    rng = np.random.default_rng(5)
    for _ in range(50):
        pair = []
        for _ in range(2):
            generators = [random_reduced_word(rng, 2, int(rng.integers(1, 3))) for _ in range(2)]
            pair.append(build_stallings(XY, generators))
        assert conjugate_subgroups(*pair) == _brute_conjugate(*pair)


def _random_path(g, rng, length):
    """A reduced word traced from the basepoint by a non-backtracking walk."""
    word, v = (), g.basepoint
    for _ in range(length):
        options = [
            (letter, u)
            for letter in g.alphabet.letters
            if not (word and word[-1] == -letter)
            for _, u in g.moves(v, letter)
        ]
        if not options:
            break
        letter, v = options[int(rng.integers(len(options)))]
        word += (letter,)
    return word


@pytest.mark.parametrize("make", [_h1, _h2])
def test_endpoints_agree_iff_quotient_in_subgroup(make):
    g = make()
    rng = np.random.default_rng(11)
    for _ in range(200):
        w1 = _random_path(g, rng, int(rng.integers(0, 7)))
        w2 = _random_path(g, rng, int(rng.integers(0, 7)))
        same_end = g.trace(g.basepoint, w1) == g.trace(g.basepoint, w2)
        assert same_end == g.member(multiply(w1, inverse(w2)))


def test_count_paths():
    g = _h1()
    assert count_paths(g, XY.parse_word("x")) == 4
    assert count_paths(g, XY.parse_word("y")) == 1
    assert count_paths(g, XY.parse_word("yy")) == 0


def test_dot_output():
    text = _h1().to_dot()
    assert text.startswith("digraph")
    assert text.count("->") == 5
    assert "doublecircle" in text


def test_subgroup_spec(tmp_path):
    path = tmp_path / "h1.json"
    path.write_text(json.dumps({"alphabet": ["x", "y"], "generators": ["xx", "Yxxy"]}))
    alphabet, generators = load_subgroup_spec(path)
    assert alphabet == XY
    assert generators == [XY.parse_word("xx"), XY.parse_word("Yxxy")]


def test_subgroup_spec_errors(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"alphabet": ["x", "y"],\n "generators": [xx]}')
    with pytest.raises(ValueError, match="line 2"):
        load_subgroup_spec(path)
    with pytest.raises(ValueError, match="generators"):
        parse_subgroup_spec({"alphabet": ["x"]})
    with pytest.raises(ValueError, match="column 2"):
        parse_subgroup_spec({"alphabet": ["x"], "generators": ["xz"]})


def test_cyclic_subgroup_members():
    g = build_stallings(XY, [XY.parse_word("x")])
    members = [w for w in words_up_to(2, 3) if g.member(w)]
    expected = [(), (1,), (-1,), (1, 1), (-1, -1), (1, 1, 1), (-1, -1, -1)]
    assert sorted(members) == sorted(expected)
