"""Covering graphs of finite-index normal subgroups and normal-closure certificates.

Finite quotients are given by permutation images of the generators of the
source group (``F`` itself, or ``H`` through the free basis read off
``Γ(H)``). Permutations are numpy index arrays on ``0..degree-1`` and
compose left to right: ``perm_mul(a, b)`` applies ``a`` first.
"""
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
import itertools
import logging
import math
import re
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm.autonotebook import tqdm

from acep.graph import StallingsGraph, Vertex, XDigraph, as_basis_word, fold
from acep.metric import Constants, constants, gamma, gamma_h, metric_for
from acep.words import (
    Alphabet,
    Letter,
    Word,
    conjugator_between,
    cyclic_reduce,
    inverse,
    letter_generator,
    multiply,
    power,
    random_reduced_word,
    reduce,
    reduced_words,
    rotate,
    substitute,
)

log = logging.getLogger(__name__)

DEFAULT_MAX_FACTORS = 3
DEFAULT_MAX_CONJUGATOR = 2
DEFAULT_CHECK_BUDGET = 200000
DEFAULT_MAX_DEGREE = 5
DEFAULT_EXHAUSTIVE_LIMIT = 20000
DEFAULT_RANDOM_TRIALS = 5000

# Per-word limits when sweeping every short word of H
SWEEP_MAX_FACTORS = 2
SWEEP_MAX_CONJUGATOR = 0
SWEEP_CHECK_BUDGET = 2000


# --------------------------------------------------------------------------------
#                                                                 | Permutations |
#                                                                 ----------------


def perm_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``a`` followed by ``b``."""
    return b[a]


def perm_inverse(a: np.ndarray) -> np.ndarray:
    return np.argsort(a)


def parse_cycles(text: str, degree: int) -> np.ndarray:
    """Parses cycle notation on the points ``1..degree``, e.g. ``"(1 2 3)(4 5)"``
    or ``"(1,2)"``; ``"()"`` is the identity.

    Raises
    ------
    ValueError
        On malformed text or points outside ``1..degree``.
    """
    perm = np.arange(degree)
    stripped = text.replace(",", " ")
    position = 0
    for match in re.finditer(r"\s*\(([^()]*)\)\s*", stripped):
        if match.start() != position:
            raise ValueError(f"Malformed cycle notation {text!r}")
        position = match.end()
        items = match.group(1).split()
        points = []
        for item in items:
            if not item.isdigit() or not 1 <= int(item) <= degree:
                raise ValueError(f"Point {item!r} outside 1..{degree} in {text!r}")
            points.append(int(item) - 1)
        if len(set(points)) != len(points):
            raise ValueError(f"Repeated point in cycle {match.group(0)!r}")
        if any(perm[p] != p for p in points):
            raise ValueError(f"Cycles of {text!r} are not disjoint.")
        for p, q in zip(points, points[1:] + points[:1]):
            perm[p] = q
    if position != len(stripped):
        raise ValueError(f"Malformed cycle notation {text!r}")
    return perm


def format_cycles(perm: Sequence[int]) -> str:
    """Cycle notation with 1-based points; fixed points are omitted."""
    perm = np.asarray(perm)
    seen = np.zeros(len(perm), dtype=bool)
    cycles = []
    for start in range(len(perm)):
        if seen[start] or perm[start] == start:
            continue
        cycle = []
        p = start
        while not seen[p]:
            seen[p] = True
            cycle.append(str(p + 1))
            p = perm[p]
        cycles.append("(" + " ".join(cycle) + ")")
    return "".join(cycles) or "()"


@dataclass(frozen=True)
class FiniteQuotient:
    """
    Homomorphism from a free group onto the permutation group generated by
    ``images``; ``images[i]`` is the image of the i-th free generator.

    Any assignment of images defines a homomorphism of a free group.

    Raises
    ------
    ValueError
        If an image is not a permutation of ``0..degree-1``.
    """

    degree: int
    images: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        images = tuple(tuple(int(p) for p in image) for image in self.images)
        object.__setattr__(self, "images", images)
        if self.degree < 1:
            raise ValueError(f"The degree must be positive, got {self.degree}")
        for i, image in enumerate(images):
            if sorted(image) != list(range(self.degree)):
                raise ValueError(f"Image {i} is not a permutation of degree {self.degree}.")

    @classmethod
    def from_cycles(cls, degree: int, cycles: Sequence[str]) -> "FiniteQuotient":
        return cls(degree, tuple(tuple(parse_cycles(text, degree)) for text in cycles))

    def to_cycles(self) -> List[str]:
        return [format_cycles(image) for image in self.images]

    @property
    def rank(self) -> int:
        return len(self.images)

    @property
    def identity(self) -> np.ndarray:
        return np.arange(self.degree)

    @cached_property
    def _arrays(self) -> Tuple[List[np.ndarray], List[np.ndarray]]:
        forward = [np.array(image, dtype=np.intp) for image in self.images]
        return forward, [perm_inverse(perm) for perm in forward]

    def image(self, letter: Letter) -> np.ndarray:
        forward, backward = self._arrays
        return (forward if letter > 0 else backward)[letter_generator(letter)]

    def evaluate(self, word: Sequence[Letter]) -> np.ndarray:
        accumulated = self.identity
        for letter in word:
            accumulated = perm_mul(accumulated, self.image(letter))
        return accumulated

    def kills(self, word: Sequence[Letter]) -> bool:
        return bool(np.array_equal(self.evaluate(word), self.identity))

    def restrict(self, words: Sequence[Sequence[Letter]]) -> "FiniteQuotient":
        """The quotient of the subgroup generated by ``words``, e.g. of ``H``
        from a quotient of ``F`` and the basis of ``Γ(H)``."""
        return FiniteQuotient(self.degree, tuple(tuple(self.evaluate(w)) for w in words))

    def elements(self) -> List[Tuple[int, ...]]:
        """The image group, enumerated breadth-first from the identity."""
        start = tuple(range(self.degree))
        found = {start: None}
        queue = deque([start])
        generators = self._arrays[0]
        while queue:
            current = np.array(queue.popleft())
            for generator in generators:
                following = tuple(perm_mul(current, generator))
                if following not in found:
                    found[following] = None
                    queue.append(following)
        return list(found)

    @property
    def order(self) -> int:
        return len(self.elements())


# --------------------------------------------------------------------------------
#                                                                      | Covers |
#                                                                      ----------


class CoveringGraph(XDigraph):
    """
    The cover ``Γ(N)`` of ``Γ(H)`` with deck group ``G = H/N``.

    Vertices are pairs ``(v, g)`` with ``v`` a vertex of ``Γ(H)`` and ``g`` an
    element of ``G`` (a permutation tuple). Build instances with :func:`cover`.
    """

    def __init__(self, base: StallingsGraph, quotient: FiniteQuotient, group, vertices, edges):
        super().__init__(base.alphabet, vertices, edges)
        self._base = base
        self._quotient = quotient
        self._group = tuple(group)

    @property
    def base(self) -> StallingsGraph:
        return self._base

    @property
    def quotient(self) -> FiniteQuotient:
        return self._quotient

    @property
    def group(self) -> Tuple[Tuple[int, ...], ...]:
        return self._group

    @property
    def basepoint(self) -> Vertex:
        return (self._base.basepoint, self._group[0])

    def project(self, v: Vertex) -> Vertex:
        self.check_vertex(v)
        return v[0]

    def fiber(self, v: Vertex) -> List[Vertex]:
        """Vertices lying over the vertex ``v`` of ``Γ(H)``."""
        return [(v, g) for g in self._group]

    def verify(self) -> bool:
        """True iff the projection preserves labels and endpoints, maps every
        in-star and out-star bijectively, and the cover is folded."""
        base_edges = set(self._base.edges)
        for o, t, x in self.edges:
            if (o[0], t[0], x) not in base_edges:
                return False
        for v in self.vertices:
            for letter in self.alphabet.letters:
                above = [u[0] for _, u in self.moves(v, letter)]
                below = [u for _, u in self._base.moves(v[0], letter)]
                if sorted(above, key=str) != sorted(below, key=str):
                    return False
        return self.is_folded()

    def deck_transformation(self, source: Vertex, target: Vertex) -> Dict[Vertex, Vertex]:
        """The automorphism ``(b, h) -> (b, k·h)`` with ``k = h2·h1⁻¹`` taking
        ``source = (v, h1)`` to ``target = (v, h2)``.

        Raises
        ------
        ValueError
            If the two vertices lie over different vertices of ``Γ(H)``.
        """
        self.check_vertex(source)
        self.check_vertex(target)
        if source[0] != target[0]:
            raise ValueError(f"{source} and {target} lie in different fibers.")
        h1, h2 = np.array(source[1]), np.array(target[1])
        k = perm_mul(h2, perm_inverse(h1))
        return {(b, h): (b, tuple(perm_mul(k, np.array(h)))) for b, h in self.vertices}

    def is_automorphism(self, mapping: Dict[Vertex, Vertex]) -> bool:
        edges = set(self.edges)
        if len(set(mapping.values())) != self.n_vertices:
            return False
        return all((mapping[o], mapping[t], x) in edges for o, t, x in self.edges)

    def stallings(self) -> StallingsGraph:
        """``Γ(N)``: the cover folded and trimmed at ``(1_H, 1)``."""
        return fold(XDigraph(self.alphabet, self.vertices, self.edges), self.basepoint)


def cover(g: StallingsGraph, q: FiniteQuotient) -> CoveringGraph:
    """Builds the cover of ``Γ(H)`` for the kernel of ``q: H -> G``.

    With ``T`` the breadth-first spanning tree of ``Γ(H)``, an edge ``e`` from
    ``o`` to ``t`` lifts to ``(o, g) -> (t, g)`` if ``e ∈ T`` and to
    ``(o, g) -> (t, g·h_e)`` otherwise, ``h_e`` being the image of the basis
    element read along ``e``.

    Raises
    ------
    ValueError
        If ``q`` does not assign one image per basis element of ``H``.
    """
    basis = g.basis()
    if q.rank != len(basis):
        raise ValueError(
            f"The quotient has {q.rank} images but H has rank {len(basis)}."
        )
    group = q.elements()
    position = {e: i for i, e in enumerate(basis.basis_edges)}
    vertices = [(v, h) for v in g.vertices for h in group]
    edges = []
    for e, (o, t, x) in enumerate(g.edges):
        step = np.array(q.images[position[e]]) if e in position else None
        for h in group:
            following = h if step is None else tuple(perm_mul(np.array(h), step))
            edges.append(((o, h), (t, following), x))
    covering = CoveringGraph(g, q, group, vertices, edges)
    log.info(
        "Built a cover of degree %d with %d vertices and %d edges",
        len(group),
        covering.n_vertices,
        covering.n_edges,
    )
    return covering


# --------------------------------------------------------------------------------
#                                                                | Certificates |
#                                                                ----------------


@dataclass(frozen=True)
class Factor:
    """The conjugate ``c · r^sign · c⁻¹``."""

    conjugator: Word
    relator: Word
    sign: int

    @property
    def word(self) -> Word:
        return multiply(self.conjugator, power(self.relator, self.sign), inverse(self.conjugator))


@dataclass(frozen=True)
class PositiveCertificate:
    """``target`` written as a product of conjugated relators."""

    target: Word
    factors: Tuple[Factor, ...]

    def product(self) -> Word:
        return multiply(*(f.word for f in self.factors))

    def verify(
        self,
        relators: Optional[Iterable[Sequence[Letter]]] = None,
        n_graph: Optional[StallingsGraph] = None,
    ) -> bool:
        """Re-checks the identity by reduction, and optionally that every
        relator is among ``relators`` or accepted by ``n_graph``."""
        if self.product() != reduce(self.target):
            return False
        if relators is not None:
            allowed = {reduce(r) for r in relators}
            if any(reduce(f.relator) not in allowed for f in self.factors):
                return False
        if n_graph is not None and not all(n_graph.member(f.relator) for f in self.factors):
            return False
        return True

    def to_dict(self, alphabet: Alphabet) -> dict:
        return {
            "kind": "positive",
            "target": alphabet.format_word(self.target),
            "factors": [
                {
                    "conjugator": alphabet.format_word(f.conjugator),
                    "relator": alphabet.format_word(f.relator),
                    "sign": f.sign,
                }
                for f in self.factors
            ],
            "verified": self.verify(),
        }


@dataclass(frozen=True)
class NegativeCertificate:
    """A finite quotient killing every relator but not the target.

    ``target`` and ``relators`` are words over the generators of the quotient's
    source group. ``basis`` gives those generators as words of ``F`` when the
    source is a subgroup ``H``; it is None when the source is ``F`` itself.
    """

    target: Word
    relators: Tuple[Word, ...]
    quotient: FiniteQuotient
    basis: Optional[Tuple[Word, ...]] = None

    @property
    def expanded_target(self) -> Word:
        return self.target if self.basis is None else substitute(self.target, self.basis)

    def verify(self) -> bool:
        return all(self.quotient.kills(r) for r in self.relators) and not self.quotient.kills(
            self.target
        )

    def to_dict(self, alphabet: Alphabet) -> dict:
        if self.basis is None:
            names = list(alphabet.names)
        else:
            names = [f"h{i + 1}" for i in range(len(self.basis))]
        document = {
            "kind": "negative",
            "target": alphabet.format_word(self.expanded_target),
            "degree": self.quotient.degree,
            "images": dict(zip(names, self.quotient.to_cycles())),
            "verified": self.verify(),
        }
        if self.basis is not None:
            document["basis"] = {
                name: alphabet.format_word(word) for name, word in zip(names, self.basis)
            }
        return document


def _conjugacy_representatives(words: Iterable[Sequence[Letter]]) -> List[Word]:
    """The shortest of ``words`` in each conjugacy class of ``{w, w⁻¹}``.

    The words are kept as given, not cyclically reduced: a conjugate of an
    element of ``N`` need not lie in ``N`` when ``N`` is only normal in ``H``.
    """
    found = {}
    for word in sorted((reduce(w) for w in words), key=lambda w: (len(w), w)):
        core, _ = cyclic_reduce(word)
        if len(core) == 0:
            continue
        rotations = [
            rotate(w, k) for w in (core.representative, inverse(core.representative))
            for k in range(len(core))
        ]
        key = min(rotations)
        found.setdefault(key, word)
    return sorted(found.values(), key=lambda w: (len(w), w))


def relators_from_graph(n_graph: StallingsGraph, max_length: int) -> List[Word]:
    """Short relators of ``N``: the cycle labels at the basepoint with at most
    ``max_length`` letters, one per conjugacy class. Every relator lies in ``N``."""
    return _conjugacy_representatives(n_graph.cycle_labels(max_length))


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def spend(self) -> bool:
        self.used += 1
        return self.used <= self.limit


def closure_member_search(
    w: Sequence[Letter],
    relators: Iterable[Sequence[Letter]],
    rank: int,
    max_factors: int = DEFAULT_MAX_FACTORS,
    max_conjugator: int = DEFAULT_MAX_CONJUGATOR,
    budget: int = DEFAULT_CHECK_BUDGET,
) -> Optional[PositiveCertificate]:
    """
    Searches for ``w = Π c_i r_i^{±1} c_i⁻¹`` with ``r_i`` among ``relators``.

    Iterative deepening over the conjugator length of all factors but the
    last, then over the number of factors. The last factor takes any
    conjugator: it is found by a conjugacy test on the remainder.

    Parameters
    ----------
    w : word
    relators : iterable of words
        Words of ``F`` whose normal closure is searched.
    rank : int
        Rank of ``F``.
    max_factors, max_conjugator : int
        Search limits.
    budget : int
        Maximum number of conjugacy tests.

    Returns
    -------
    PositiveCertificate or None
        None when nothing was found within the limits; this proves nothing.
    """
    target = reduce(w)
    if len(target) == 0:
        return PositiveCertificate(target, ())
    powers = []
    for r in dict.fromkeys(reduce(r) for r in relators):
        if len(r) > 0:
            powers.extend([(r, 1), (r, -1)])
    if not powers:
        return None
    tests = _Budget(budget)

    def _last_factor(remainder):
        for r, sign in powers:
            if not tests.spend():
                return None
            c = conjugator_between(remainder, power(r, sign))
            if c is not None:
                return Factor(c, r, sign)
        return None

    for length in range(max_conjugator + 1):
        conjugators = [c for n in range(length + 1) for c in reduced_words(rank, n)]
        pieces = [Factor(c, r, sign) for c in conjugators for r, sign in powers]
        failed = set()

        def _search(remainder, n_factors):
            if n_factors == 1:
                found = _last_factor(remainder)
                return None if found is None else (found,)
            if (remainder, n_factors) in failed:
                return None
            for piece in pieces:
                if tests.used > tests.limit:
                    return None
                rest = multiply(inverse(piece.word), remainder)
                if len(rest) == 0:
                    return (piece,)
                found = _search(rest, n_factors - 1)
                if found is not None:
                    return (piece,) + found
            failed.add((remainder, n_factors))
            return None

        for n_factors in range(1, max_factors + 1):
            found = _search(target, n_factors)
            if found is not None:
                certificate = PositiveCertificate(target, found)
                log.debug("Certificate with %d factors after %d tests", len(found), tests.used)
                return certificate
            if tests.used > tests.limit:
                log.warning("Closure search for %s ran out of budget", target)
                return None
    return None


def _homomorphisms(
    rank: int, degree: int, exhaustive_limit: int, n_random: int, rng: np.random.Generator
) -> Iterator[Tuple[Tuple[int, ...], ...]]:
    perms = list(itertools.permutations(range(degree)))
    if len(perms) ** rank <= exhaustive_limit:
        yield from itertools.product(perms, repeat=rank)
        return
    for _ in range(n_random):
        yield tuple(tuple(rng.permutation(degree)) for _ in range(rank))


def quotient_nonmember(
    w: Sequence[Letter],
    relators: Iterable[Sequence[Letter]],
    rank: int,
    max_degree: int = DEFAULT_MAX_DEGREE,
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
    n_random: int = DEFAULT_RANDOM_TRIALS,
    seed: Optional[int] = None,
) -> Optional[NegativeCertificate]:
    """
    Searches for a homomorphism of the free group of rank ``rank`` into a
    symmetric group killing every relator but not ``w``.

    Degrees ``2..max_degree`` are tried in turn: exhaustively while there
    are at most ``exhaustive_limit`` assignments, by ``n_random`` seeded
    random assignments otherwise.

    Returns
    -------
    NegativeCertificate or None
        A certificate proves that ``w`` is not in the normal closure of the
        relators; None proves nothing.
    """
    target = reduce(w)
    relators = tuple(reduce(r) for r in relators)
    if len(target) == 0:
        return None
    rng = np.random.default_rng(seed)
    for degree in range(2, max_degree + 1):
        for images in _homomorphisms(rank, degree, exhaustive_limit, n_random, rng):
            q = FiniteQuotient(degree, images)
            if q.kills(target) or not all(q.kills(r) for r in relators):
                continue
            log.debug("Found a separating quotient of degree %d", degree)
            return NegativeCertificate(target, relators, q)
    return None


def subgroup_nonmember(
    w: Sequence[Letter],
    relators: Iterable[Sequence[Letter]],
    g: StallingsGraph,
    **limits,
) -> Optional[NegativeCertificate]:
    """Like :func:`quotient_nonmember` for the normal closure of ``relators``
    in ``H``: everything is rewritten over the free basis of ``Γ(H)``.

    Raises
    ------
    ValueError
        If ``w`` or a relator is not in ``H``.
    """
    rewritten = []
    for word in [w] + list(relators):
        basis_word = g.rewrite_in_basis(word)
        if basis_word is None:
            raise ValueError(f"{word} is not in H.")
        rewritten.append(as_basis_word(basis_word))
    found = quotient_nonmember(rewritten[0], rewritten[1:], g.rank, **limits)
    if found is None:
        return None
    return NegativeCertificate(found.target, found.relators, found.quotient, g.basis().basis_words)


# --------------------------------------------------------------------------------
#                                                            | Length bound check |
#                                                            ----------------------


@dataclass(frozen=True)
class NewmanReport:
    u: Word
    n: int
    bound: int
    n_samples: int
    shortest: Optional[int]
    violations: Tuple[Word, ...]


def newman_check(
    u: Sequence[Letter],
    n: int,
    rank: int,
    n_samples: int = 500,
    max_factors: int = 4,
    max_conjugator: int = 6,
    seed: Optional[int] = None,
) -> NewmanReport:
    """Samples nontrivial elements of ``⟨⟨uⁿ⟩⟩_F`` and checks that each has at
    least ``(n - 1)·|u*|`` letters, ``u*`` being the cyclic reduction of ``u``.

    Raises
    ------
    ValueError
        If ``u`` is trivial or ``n < 2``.
    """
    u = reduce(u)
    if len(u) == 0:
        raise ValueError("u must be nontrivial.")
    if n < 2:
        raise ValueError(f"The exponent must be at least 2, got {n}")
    core, _ = cyclic_reduce(u)
    bound = (n - 1) * len(core)
    relator = power(u, n)
    rng = np.random.default_rng(seed)

    lengths, violations = [], []
    while len(lengths) < n_samples:
        factors = []
        for _ in range(int(rng.integers(1, max_factors + 1))):
            c = random_reduced_word(rng, rank, int(rng.integers(0, max_conjugator + 1)))
            sign = 1 if rng.random() < 0.5 else -1
            factors.append(Factor(c, relator, sign).word)
        sample = multiply(*factors)
        if len(sample) == 0:
            continue
        lengths.append(len(sample))
        if len(sample) < bound:
            violations.append(sample)
    if violations:
        log.warning("%d samples shorter than %d", len(violations), bound)
    return NewmanReport(u, n, bound, len(lengths), min(lengths), tuple(violations))


# --------------------------------------------------------------------------------
#                                                                  | Experiment |
#                                                                  --------------


@dataclass(frozen=True)
class ExperimentReport:
    """
    Outcome of :func:`acep_experiment`.

    ``gamma_exact`` is False when ``N`` is given by relators; ``gamma_h`` is then
    an upper bound and ``hypothesis_met`` is None unless that bound already
    fails the hypothesis.
    """

    constants: Constants
    gamma: Optional[Union[int, float]]
    gamma_h: Union[int, float]
    gamma_exact: bool
    hypothesis_met: Optional[bool]
    n_words: int
    n_members: int
    n_searched: int
    counterexamples: Tuple[PositiveCertificate, ...] = ()
    exclusions: Tuple[NegativeCertificate, ...] = ()
    sigma: Tuple[Tuple[PositiveCertificate, NegativeCertificate], ...] = ()
    unresolved: Tuple[Word, ...] = field(default=())

    def to_dict(self, alphabet: Alphabet) -> dict:
        def _number(value):
            return None if value is None or value == math.inf else int(value)

        return {
            "constants": self.constants.to_dict(),
            "gamma": _number(self.gamma),
            "gamma_h": _number(self.gamma_h),
            "gamma_exact": self.gamma_exact,
            "hypothesis_met": self.hypothesis_met,
            "words": self.n_words,
            "members": self.n_members,
            "searched": self.n_searched,
            "counterexamples": [c.to_dict(alphabet) for c in self.counterexamples],
            "exclusions": [c.to_dict(alphabet) for c in self.exclusions],
            "sigma": [
                {"positive": p.to_dict(alphabet), "negative": q.to_dict(alphabet)}
                for p, q in self.sigma
            ],
            "unresolved": [alphabet.format_word(w) for w in self.unresolved],
        }


def subgroup_words(g: StallingsGraph, max_length: int) -> Iterator[Word]:
    """Nontrivial reduced words of ``H`` with at most ``max_length`` letters,
    read as reduced cycles at the basepoint of ``Γ(H)``."""
    return iter(g.cycle_labels(max_length))


def kernel_gamma_bound(
    relators: Iterable[Sequence[Letter]], g: StallingsGraph
) -> Union[int, float]:
    """Upper bound on ``γ_H`` of the normal closure of ``relators`` in ``H``:
    the least ``|r|_H`` over the nontrivial relators.

    Shorter elements of the closure may exist, so :func:`acep_experiment`
    reports this value with ``gamma_exact=False``.
    """
    metric = metric_for(g)
    lengths = [metric.length(r) for r in relators if len(reduce(r)) > 0]
    return min(lengths, default=math.inf)


def acep_experiment(
    g: StallingsGraph,
    q: Optional[FiniteQuotient] = None,
    horizon: int = 10,
    relators: Optional[Sequence[Sequence[Letter]]] = None,
    targets: Optional[Sequence[Sequence[Letter]]] = None,
    max_words: Optional[int] = None,
    n_exclusions: int = 10,
    max_factors: Optional[int] = None,
    max_conjugator: Optional[int] = None,
    budget: Optional[int] = None,
    seed: Optional[int] = None,
) -> ExperimentReport:
    """
    Tests ``N = ⟨⟨N⟩⟩_F ∩ H`` on short words of ``H``.

    With a quotient ``q`` of ``H``, ``N`` is its kernel, read off the cover.
    Every nontrivial ``w ∈ H`` with ``|w| <= horizon`` is checked against
    ``Γ(N)``; non-members are searched for a closure certificate, which
    would be a counterexample. Members of ``N`` are always checked; at most
    ``max_words`` non-members are searched, sampled with ``seed``.

    With ``relators`` instead, ``N`` is their normal closure in ``H`` and each of
    ``targets`` is searched both ways; a target with a closure certificate
    and a proof of ``w ∉ N`` exhibits the failure of ``N = ⟨⟨N⟩⟩_F ∩ H``.

    Unset search limits default to the ``SWEEP_*`` constants with a quotient
    and to the ``DEFAULT_*`` constants with relators.

    Raises
    ------
    ValueError
        If neither or both of ``q`` and ``relators`` are given.
    """
    if (q is None) == (relators is None):
        raise ValueError("Give exactly one of a quotient or a relator list.")
    consts = constants(g)
    rank = g.alphabet.rank
    if q is not None:
        fallback = (SWEEP_MAX_FACTORS, SWEEP_MAX_CONJUGATOR, SWEEP_CHECK_BUDGET)
    else:
        fallback = (DEFAULT_MAX_FACTORS, DEFAULT_MAX_CONJUGATOR, DEFAULT_CHECK_BUDGET)
    search = {
        "max_factors": fallback[0] if max_factors is None else max_factors,
        "max_conjugator": fallback[1] if max_conjugator is None else max_conjugator,
        "budget": fallback[2] if budget is None else budget,
    }
    rng = np.random.default_rng(seed)

    if relators is not None:
        relators = [reduce(r) for r in relators]
        bound = kernel_gamma_bound(relators, g)
        hypothesis = False if bound <= consts.c_h else None
        targets = [reduce(t) for t in (targets or [])]
        sigma, unresolved = [], []
        for target in tqdm(targets, desc="targets", disable=len(targets) < 2):
            positive = closure_member_search(target, relators, rank, **search)
            negative = subgroup_nonmember(target, relators, g, seed=seed)
            if positive is not None and negative is not None:
                sigma.append((positive, negative))
            else:
                unresolved.append(target)
        log.info("%d of %d targets lie in the closure but not in N", len(sigma), len(targets))
        return ExperimentReport(
            consts,
            None,
            bound,
            False,
            hypothesis,
            n_words=len(targets),
            n_members=0,
            n_searched=len(targets),
            sigma=tuple(sigma),
            unresolved=tuple(unresolved),
        )

    covering = cover(g, q)
    if not covering.verify():
        raise ValueError("The quotient data does not define a covering.")
    n_graph = covering.stallings()
    gamma_n = gamma(n_graph)
    gamma_hn = gamma_h(n_graph, g)
    hypothesis = gamma_hn > consts.c_h
    if not hypothesis:
        log.warning("gamma_H(N) = %s does not exceed C_H = %d", gamma_hn, consts.c_h)

    words = list(subgroup_words(g, horizon))
    members = [w for w in words if n_graph.member(w)]
    others = [w for w in words if not n_graph.member(w)]
    if max_words is not None and len(others) > max_words:
        chosen = rng.choice(len(others), size=max_words, replace=False)
        others = [others[i] for i in sorted(chosen)]
    relators = relators_from_graph(n_graph, horizon)
    log.info(
        "%d words of H up to length %d, %d in N, %d relators",
        len(words),
        horizon,
        len(members),
        len(relators),
    )

    counterexamples, unresolved = [], []
    for w in tqdm(others, desc="closure search"):
        found = closure_member_search(w, relators, rank, **search)
        if found is not None and found.verify(n_graph=n_graph):
            counterexamples.append(found)
        else:
            unresolved.append(w)

    basis = g.basis().basis_words
    n_relators = [as_basis_word(g.rewrite_in_basis(h)) for h in n_graph.basis().basis_words]
    exclusions = []
    for w in others[:n_exclusions]:
        certificate = NegativeCertificate(
            as_basis_word(g.rewrite_in_basis(w)), tuple(n_relators), q, basis
        )
        if certificate.verify():
            exclusions.append(certificate)
    if counterexamples:
        log.warning("%d counterexamples to N = <<N>> ∩ H", len(counterexamples))
    return ExperimentReport(
        consts,
        gamma_n,
        gamma_hn,
        True,
        hypothesis,
        len(words),
        len(members),
        len(others),
        tuple(counterexamples),
        tuple(exclusions),
        (),
        tuple(unresolved),
    )
