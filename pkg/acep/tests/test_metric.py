import math

import numpy as np
import pytest

from acep.fiber import product
from acep.graph import build_stallings, count_paths, trivial_graph
from acep.metric import (
    BallAutomaton,
    OmegaFamily,
    OmegaMetric,
    alt_distance_upper,
    constants,
    gamma,
    gamma_h,
    h_length,
    lipschitz_report,
    omega,
    omega_length,
    path_labels,
)
from acep.words import (
    Alphabet,
    inverse,
    multiply,
    power,
    random_reduced_word,
    substitute,
    words_up_to,
)

XY = Alphabet(("x", "y"))
X, Y = (1,), (2,)


def _subgroup(*generators):
    return build_stallings(XY, [XY.parse_word(w) for w in generators])


def _family(*generators):
    member = _subgroup(*generators)
    return OmegaFamily(XY, (member,), ((0, 1),))


def _syllables(word):
    """Signed exponents of the maximal x-syllables, and the number of y letters."""
    exponents, n_y, run = [], 0, 0
    for letter in word:
        if abs(letter) == 1:
            run += letter
        else:
            if run:
                exponents.append(run)
            run = 0
            n_y += 1
    if run:
        exponents.append(run)
    return exponents, n_y


def _free_product_length(word, even_only):
    # F(x, y) = <x> * <y>, so the length adds up over syllables
    exponents, n_y = _syllables(word)
    if not even_only:
        return len(exponents) + n_y
    return sum(1 if m % 2 == 0 or abs(m) == 1 else 2 for m in exponents) + n_y


@pytest.fixture
def h1():
    return _subgroup("xx", "Yxxy")


def test_omega_of_malnormal_is_empty():
    assert len(omega(_subgroup("x"))) == 0
    assert len(omega(_subgroup("x", "y"))) == 0


def test_omega_of_h1(h1):
    family = omega(h1)
    assert len(family) == 1
    (member,) = family.members
    assert member.rank == 1
    assert member.member(XY.parse_word("xx"))
    assert not member.member(X)


def test_length_with_empty_family():
    family = OmegaFamily(XY)
    for word in [(), (1, 2, -1), (2, 2, 2, 1)]:
        assert omega_length(word, family) == len(word)


def test_length_with_cyclic_member():
    family = _family("x")
    assert omega_length(multiply(power(X, 5), Y), family) == 2
    assert omega_length(power(X, -7), family) == 1


@pytest.mark.parametrize("generators, even_only", [(("x",), False), (("xx",), True)])
def test_length_matches_syllable_count(generators, even_only):
    family = _family(*generators)
    for word in words_up_to(XY.rank, 6):
        assert omega_length(word, family) == _free_product_length(word, even_only)


def _brute_lengths(family, max_length):
    """Least number of factors, each a letter or a member element, over words
    of at most ``max_length`` letters whose prefixes stay that short."""
    pieces = [(letter,) for letter in XY.letters]
    pieces += [w for member in family.members for w in member.cycle_labels(max_length)]
    distance, frontier = {(): 0}, [()]
    while frontier:
        following = []
        for u in frontier:
            for piece in pieces:
                v = multiply(u, piece)
                if len(v) <= max_length and v not in distance:
                    distance[v] = distance[u] + 1
                    following.append(v)
        frontier = following
    return distance


@pytest.mark.parametrize(
    "make",
    [lambda: OmegaFamily(XY), lambda: _family("x"), lambda: omega(_subgroup("xx", "Yxxy"))],
    ids=["empty", "cyclic", "h1"],
)
def test_length_matches_factorization_search(make):
    family = make()
    expected = _brute_lengths(family, 6)
    for word in words_up_to(XY.rank, 6):
        assert omega_length(word, family) == expected[word]


def test_length_function_axioms(h1):
    rng = np.random.default_rng(4)
    for _ in range(100):
        u = random_reduced_word(rng, 2, int(rng.integers(0, 8)))
        v = random_reduced_word(rng, 2, int(rng.integers(0, 8)))
        assert h_length(inverse(u), h1) == h_length(u, h1)
        assert h_length(multiply(u, v), h1) <= h_length(u, h1) + h_length(v, h1)
    assert h_length((), h1) == 0


def test_alphabet_mismatch():
    with pytest.raises(ValueError):
        omega_length(X, _family("x"), Alphabet(("a", "b")))


def test_balls():
    metric = OmegaMetric(_family("xx"))
    ball = metric.ball(2)
    assert ball.radius == 2
    assert ball.accepts(XY.parse_word("xxxxy"))
    assert ball.accepts(XY.parse_word("xy"))
    assert not ball.accepts(XY.parse_word("xyx"))
    assert metric.ball(3).n_states > ball.n_states
    with pytest.raises(ValueError):
        metric.ball(0)
    empty = BallAutomaton.from_family(_family("xx"), 0)
    assert empty.accepts(())
    assert not empty.accepts(X)


def test_constants(h1):
    assert constants(_subgroup("x")).to_dict() == {"diam": 0, "C": 1, "C_H": 6}
    c = constants(h1)
    assert (c.diam_gamma, c.c, c.c_h) == (3, 2, 18)


def test_path_labels_are_short(h1):
    dotted = product(h1, remove_diagonal=True)
    assert path_labels(dotted, 2) == [(-1,), (1,), (-1, -1), (1, 1)]
    c = constants(h1).c
    for word in path_labels(dotted, 10):
        assert h_length(word, h1) <= c
    assert path_labels(product(_subgroup("x"), remove_diagonal=True), 3) == []


def _random_walk(g, rng, length):
    v = g.vertices[int(rng.integers(g.n_vertices))]
    word = ()
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


def test_long_labels_have_one_path(h1):
    rng = np.random.default_rng(13)
    c = constants(h1).c
    n_checked = 0
    while n_checked < 200:
        word = _random_walk(h1, rng, int(rng.integers(3, 11)))
        if h_length(word, h1) <= c:
            continue
        n_checked += 1
        assert count_paths(h1, word) == 1


def test_gamma():
    assert gamma(_subgroup("xxxxx")) == 5
    klein = _subgroup("xx", "yy", "xyyX", "yxxY", "xyXY")
    assert klein.n_vertices == 4
    assert gamma(klein) == 2
    assert gamma(trivial_graph(XY)) == math.inf


def test_gamma_h(h1):
    n = _subgroup("xxxx")
    assert gamma(n) == 4
    assert gamma_h(n, h1) == 1
    whole = _subgroup("x", "y")
    klein = _subgroup("xx", "yy", "xyyX", "yxxY", "xyXY")
    assert gamma_h(klein, whole) == gamma(klein)
    with pytest.raises(ValueError):
        gamma_h(_subgroup("x"), h1)


def test_alt_distance():
    g = _subgroup("y")
    for k in range(1, 5):
        assert alt_distance_upper(power(X, k), g) == k
    assert alt_distance_upper((), g) == 0
    h1 = _subgroup("xx", "Yxxy")
    word = power(X, 6)
    assert alt_distance_upper(word, h1) <= 3


def _subgroup_samples(g, rng, n_samples, max_factors, max_length=12):
    basis = g.basis().basis_words
    samples = []
    while len(samples) < n_samples:
        word = substitute(random_reduced_word(rng, 2, int(rng.integers(1, max_factors + 1))), basis)
        if 0 < len(word) <= max_length:
            samples.append(word)
    return samples


def test_lipschitz_cyclic():
    g = _subgroup("xy")
    xy = XY.parse_word("xy")
    report = lipschitz_report(g, [xy, power(xy, 3), power(xy, -2)])
    assert len(report.records) == 3
    assert report.violations == ()


def test_lipschitz_malnormal():
    g = _subgroup("xxY", "yyX")
    report = lipschitz_report(g, _subgroup_samples(g, np.random.default_rng(3), 50, 4))
    assert len(report.records) == 50
    assert all(r.h_length == len(r.word) for r in report.records)
    assert report.violations == ()


def test_lipschitz_h1():
    g = _subgroup("xxx", "Yxxxy")
    report = lipschitz_report(g, _subgroup_samples(g, np.random.default_rng(7), 50, 3))
    assert len(report.records) == 50
    assert report.violations == ()
    with pytest.raises(ValueError):
        lipschitz_report(g, [X])
