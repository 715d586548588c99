"""Deciding the S-subgroup property and producing S-witnesses.

``H`` is an S-subgroup when some ``w ∈ H`` is conjugate into ``H`` by an
element outside ``H`` but by no element of ``H``. Equivalently, two distinct
vertices of ``Γ(H)`` carry cyclically reduced cycles with the same label that
are not cyclic permutations of one another.
"""
from collections import deque
from dataclasses import dataclass
from enum import Enum
import logging
from typing import Iterator, List, Optional, Sequence, Tuple

from acep.fiber import IntersectionComponent, components, product
from acep.graph import StallingsGraph, Vertex, XDigraph, as_basis_word
from acep.words import (
    IDENTITY,
    CyclicWord,
    Letter,
    Word,
    conjugate,
    conjugate_in_free,
    cyclic_reduce,
    inverse,
    make_letter,
    multiply,
    reduce,
    rotate,
)

log = logging.getLogger(__name__)

DEFAULT_MAX_CANDIDATES = 20000


@dataclass(frozen=True)
class SWitness:
    """A pair ``(w, a)`` with ``w, w^a ∈ H`` and ``w^a`` not conjugate to ``w``
    by any element of ``H``."""

    w: Word
    a: Word


@dataclass(frozen=True)
class CyclePair:
    v: Vertex
    v_prime: Vertex
    label: CyclicWord


class SStatus(Enum):
    YES = "yes"
    NO_WITHIN_BOUND = "no_within_bound"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SResult:
    """Outcome of :func:`is_s_subgroup`.

    ``exact`` is True when the answer is a proof: always for ``YES`` (the
    witness is verified) and for ``NO_WITHIN_BOUND`` only when the
    non-diagonal product carries no cycles at all.
    """

    status: SStatus
    bound: int
    witness: Optional[SWitness] = None
    exact: bool = False


def is_cyclic_shift(g: XDigraph, v: Vertex, v_prime: Vertex, word: Sequence[Letter]) -> bool:
    """True iff the cycle labeled ``word`` at ``v_prime`` is a cyclic permutation
    of the cycle labeled ``word`` at ``v``: some rotation offset ``k`` fixes
    ``word`` and the prefix of length ``k`` leads from ``v`` to ``v_prime``."""
    word = tuple(word)
    for k in range(max(len(word), 1)):
        if rotate(word, k) == word and g.trace(v, word[:k]) == v_prime:
            return True
    return False


def _tree_paths(g: XDigraph, root: Vertex) -> Tuple[dict, List[int]]:
    paths = {root: IDENTITY}
    tree = set()
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for letter, e, u in g.incident(v):
            if u not in paths:
                paths[u] = paths[v] + (letter,)
                tree.add(e)
                queue.append(u)
    return paths, [e for e in range(g.n_edges) if e not in tree]


def _structured_candidates(component: IntersectionComponent) -> Iterator[Tuple[Vertex, Word]]:
    """Fundamental cycles of the component core and products of two of them,
    as cycle labels at the root of the spanning tree."""
    core = component.core
    root = core.vertices[0]
    paths, chords = _tree_paths(core, root)
    fundamental = []
    for e in chords:
        o, t, x = core.edges[e]
        fundamental.append(multiply(paths[o], (make_letter(x),), inverse(paths[t])))
    for f in fundamental:
        yield root, f
    for i, f in enumerate(fundamental):
        for j in range(i, len(fundamental)):
            yield root, multiply(f, fundamental[j])
            if j > i:
                yield root, multiply(f, inverse(fundamental[j]))


def _iter_cycles(g: XDigraph, v: Vertex, max_length: int) -> Iterator[Word]:
    """Cyclically reduced cycle labels at ``v`` of length at most ``max_length``."""
    stack = [(v, IDENTITY)]
    while stack:
        u, word = stack.pop()
        if word and u == v and word[0] != -word[-1]:
            yield word
        if len(word) == max_length:
            continue
        for letter in g.alphabet.letters:
            if word and word[-1] == -letter:
                continue
            following = g.step(u, letter)
            if following is not None:
                stack.append((following, word + (letter,)))


def _search(
    g: StallingsGraph, bound: int, max_candidates: int
) -> Tuple[Optional[CyclePair], bool, bool]:
    """Returns ``(pair, has_cycles, truncated)``."""
    core = g.core()
    dotted = product(core, remove_diagonal=True)
    cyclic = [c for c in components(dotted) if c.rank >= 1]
    if not cyclic:
        return None, False, False

    def _test(vertex, word):
        star, conjugator = cyclic_reduce(word)
        if len(star) == 0 or len(star) > bound:
            return None
        v, v_prime = dotted.trace(vertex, conjugator)
        if is_cyclic_shift(core, v, v_prime, star.representative):
            return None
        return CyclePair(v, v_prime, star)

    for component in cyclic:
        for vertex, word in _structured_candidates(component):
            pair = _test(vertex, word)
            if pair is not None:
                return pair, True, False

    checked = 0
    for component in cyclic:
        for vertex in component.core.vertices:
            for word in _iter_cycles(component.core, vertex, bound):
                checked += 1
                if checked > max_candidates:
                    log.warning(
                        "Cycle enumeration stopped after %d candidates", max_candidates
                    )
                    return None, True, True
                pair = _test(vertex, word)
                if pair is not None:
                    return pair, True, False
    return None, True, False


def find_cycle_pair(
    g: StallingsGraph,
    bound: Optional[int] = None,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
) -> Optional[CyclePair]:
    """Searches ``core(Γ) ×̇ core(Γ)`` for two cycles with the same cyclically
    reduced label that are not cyclic permutations of one another.

    Parameters
    ----------
    g : StallingsGraph
    bound : int, optional
        Longest label considered. Defaults to :func:`default_bound`.
    max_candidates : int, optional
        Cap on the number of brute-force cycle labels tested.

    Returns
    -------
    CyclePair or None
        None when no pair was found; after a truncated search this proves
        nothing, and a warning says so.
    """
    bound = default_bound(g) if bound is None else bound
    if bound < 1:
        raise ValueError(f"The length bound must be positive, got {bound}")
    pair, _, truncated = _search(g, bound, max_candidates)
    if truncated:
        log.warning("Cycle pair search truncated at bound %d; no pair is inconclusive", bound)
    return pair


def default_bound(g: StallingsGraph) -> int:
    """Twice the edge count of the dotted core product plus the longest basis word.

    The basis read off ``Γ(H)`` stands in for the generators, so the bound
    depends on ``H`` alone and not on how it was presented.
    """
    dotted = product(g.core(), remove_diagonal=True)
    longest = max((len(h) for h in g.basis().basis_words), default=1)
    return 2 * dotted.n_edges + max(longest, 1)


def verify_witness(g: StallingsGraph, w: Sequence[Letter], a: Sequence[Letter]) -> bool:
    """Exact check that ``(w, a)`` is an S-witness.

    Both ``w`` and ``w^a`` are rewritten over the free basis of ``H``; they must
    not be conjugate in that free group.
    """
    w, a = reduce(w), reduce(a)
    if not g.member(w) or g.member(a):
        return False
    w_a = conjugate(w, a)
    if not g.member(w_a):
        return False
    rewritten = as_basis_word(g.rewrite_in_basis(w))
    rewritten_a = as_basis_word(g.rewrite_in_basis(w_a))
    return not conjugate_in_free(rewritten, rewritten_a)


def witness_from_pair(g: StallingsGraph, pair: CyclePair) -> SWitness:
    """Turns a cycle pair into a verified S-witness.

    With ``p = P(v')`` and ``q = P(v)`` the spanning-tree paths from the
    basepoint, ``w = p w* p⁻¹`` and ``a = p q⁻¹`` satisfy ``w^a = q w* q⁻¹``.

    Raises
    ------
    ValueError
        If neither orientation of the pair yields a verified witness.
    """
    paths = g.tree_paths()
    star = pair.label.representative
    candidates = []
    for v, v_prime in ((pair.v, pair.v_prime), (pair.v_prime, pair.v)):
        p, q = paths[v_prime], paths[v]
        candidates.append(SWitness(multiply(p, star, inverse(p)), multiply(p, inverse(q))))
    candidates.sort(key=lambda c: (len(c.w) + len(c.a), c.w, c.a))
    for candidate in candidates:
        if verify_witness(g, candidate.w, candidate.a):
            return candidate
    raise ValueError(f"{pair} does not yield an S-witness.")


def conjugate_witness(witness: SWitness, b: Sequence[Letter]) -> SWitness:
    """The witness ``(w^b, a^b)`` for the conjugate subgroup ``H^b``."""
    return SWitness(conjugate(witness.w, b), conjugate(witness.a, b))


def is_s_subgroup(
    g: StallingsGraph,
    bound: Optional[int] = None,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
) -> SResult:
    """Decides the S-property up to a length bound.

    Returns
    -------
    SResult
        ``YES`` with a verified witness, ``NO_WITHIN_BOUND`` (exact when there
        are no candidate cycles at all), or ``UNKNOWN`` when the search was
        truncated or a pair failed to produce a witness.
    """
    bound = default_bound(g) if bound is None else bound
    pair, has_cycles, truncated = _search(g, bound, max_candidates)
    if pair is not None:
        try:
            witness = witness_from_pair(g, pair)
        except ValueError as err:
            log.warning("%s", err)
            return SResult(SStatus.UNKNOWN, bound)
        log.info("Found an S-witness of length %d", len(witness.w))
        return SResult(SStatus.YES, bound, witness, exact=True)
    if truncated:
        return SResult(SStatus.UNKNOWN, bound)
    if not has_cycles:
        return SResult(SStatus.NO_WITHIN_BOUND, bound, exact=True)
    log.info("No cycle pair with labels up to length %d", bound)
    return SResult(SStatus.NO_WITHIN_BOUND, bound)
