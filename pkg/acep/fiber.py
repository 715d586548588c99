"""Fiber products of Stallings graphs and the four-case classification.

Cycles at a vertex ``(u, v)`` of ``Γ × Γ`` spell exactly the intersection of
the conjugates ``H^u ∩ H^v``; the non-diagonal components therefore encode all
intersections ``H ∩ H^a`` with ``a ∉ H``.
"""
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
import itertools
import logging
from typing import Iterator, List, Optional, Tuple

import numpy as np
from scipy.sparse.csgraph import shortest_path

from acep.graph import StallingsGraph, Vertex, XDigraph, build_stallings
from acep.words import Alphabet, CyclicWord, is_proper_power, words_up_to

log = logging.getLogger(__name__)


class ProductGraph(XDigraph):
    """
    Category product of an X-digraph with itself.

    Parameters
    ----------
    base : XDigraph
        The factor graph.
    vertices, edges
        Pair-labeled vertices and edges, as produced by :func:`product`.
    diagonal_removed : bool
        True for the dotted product, from which the diagonal component has been
        deleted.
    """

    def __init__(self, base: XDigraph, vertices, edges, diagonal_removed: bool):
        super().__init__(base.alphabet, vertices, edges)
        self._base = base
        self._diagonal_removed = diagonal_removed

    @property
    def base(self) -> XDigraph:
        return self._base

    @property
    def diagonal_removed(self) -> bool:
        return self._diagonal_removed

    def to_dot(self, basepoint=None, name: str = "P") -> str:
        return super().to_dot(basepoint, name)


def _fiber(g1: XDigraph, g2: XDigraph) -> Tuple[list, list]:
    by_label = defaultdict(list)
    for o, t, x in g2.edges:
        by_label[x].append((o, t))
    vertices = [(u, v) for u in g1.vertices for v in g2.vertices]
    edges = [
        ((o1, o2), (t1, t2), x)
        for o1, t1, x in g1.edges
        for o2, t2 in by_label[x]
    ]
    return vertices, edges


def product(g: XDigraph, remove_diagonal: bool = False) -> ProductGraph:
    """Returns ``Γ × Γ``, or the dotted product ``Γ ×̇ Γ`` with the diagonal
    component (the pairs ``(v, v)``) deleted."""
    vertices, edges = _fiber(g, g)
    if remove_diagonal:
        vertices = [p for p in vertices if p[0] != p[1]]
        edges = [e for e in edges if e[0][0] != e[0][1]]
    return ProductGraph(g, vertices, edges, remove_diagonal)


@dataclass(frozen=True)
class IntersectionComponent:
    """A non-diagonal component of a product graph, encoding ``H^u ∩ H^v``
    for each of its vertices ``(u, v)``."""

    vertices: Tuple[Vertex, ...]
    anchor: Vertex
    rank: int
    generator: Optional[CyclicWord] = None
    core: Optional[XDigraph] = field(default=None, compare=False, repr=False)

    @property
    def is_proper_power(self) -> Optional[bool]:
        """Whether the cyclic generator is a proper power; None unless rank one."""
        if self.generator is None:
            return None
        return is_proper_power(self.generator.representative) is not None


def _cycle_label(core: XDigraph) -> CyclicWord:
    """Label of the single cycle of a rank-one core, read from its first vertex."""
    start = core.vertices[0]
    letters = []
    v, previous = start, None
    while True:
        letter, e, u = next(
            (letter, e, u) for letter, e, u in core.incident(v) if e != previous
        )
        letters.append(letter)
        v, previous = u, e
        if v == start:
            break
    return CyclicWord(tuple(letters))


def components(p: ProductGraph) -> List[IntersectionComponent]:
    """Non-diagonal connected components of ``p`` with their ranks.

    The rank is ``|E| - |V| + 1`` of the component's core; rank-one components
    also carry the label of their cycle as a generator.
    """
    found = []
    for vertices in p.components():
        if any(u == v for u, v in vertices):
            continue
        core = p.subgraph(vertices).core()
        rank = core.n_edges - core.n_vertices + 1 if core.n_vertices else 0
        generator = _cycle_label(core) if rank == 1 else None
        found.append(
            IntersectionComponent(tuple(vertices), vertices[0], rank, generator, core)
        )
    return found


def diameter(g: XDigraph) -> int:
    """Largest finite undirected distance between two vertices; 0 if edgeless."""
    if g.n_edges == 0:
        return 0
    distances = shortest_path(g.adjacency(), directed=False, unweighted=True)
    finite = distances[np.isfinite(distances)]
    return int(finite.max()) if finite.size else 0


def core_product_components(g: StallingsGraph) -> List[IntersectionComponent]:
    """Components of ``core(Γ) ×̇ core(Γ)``."""
    return components(product(g.core(), remove_diagonal=True))


def is_malnormal(g: StallingsGraph) -> bool:
    return all(c.rank == 0 for c in core_product_components(g))


def malnormal_subgroups(
    alphabet: Alphabet, max_length: int, rank: int = 2
) -> Iterator[StallingsGraph]:
    """Proper malnormal subgroups of the given rank generated by ``rank``
    reduced words of at most ``max_length`` letters.

    Generator tuples are tried in shortlex order and each subgroup is
    yielded once.
    """
    words = [w for w in words_up_to(alphabet.rank, max_length) if w]
    seen = set()
    for generators in itertools.combinations(words, rank):
        g = build_stallings(alphabet, generators)
        if g.rank != rank or g.n_vertices == 1 or g.canonical_key in seen:
            continue
        seen.add(g.canonical_key)
        if is_malnormal(g):
            log.debug("Malnormal subgroup generated by %s", generators)
            yield g


def is_cyclonormal(g: StallingsGraph) -> bool:
    return all(c.rank <= 1 for c in core_product_components(g))


class CaseLabel(Enum):
    MALNORMAL = 1
    NON_CYCLONORMAL = 2
    CYCLIC_NON_POWER = 3
    CYCLIC_POWERS = 4


class Verdict(Enum):
    HAS_ACEP = "has_ACEP"
    NO_ACEP = "no_ACEP"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class Classification:
    case: CaseLabel
    witnesses: Tuple[IntersectionComponent, ...]

    @property
    def verdict(self) -> Verdict:
        """Verdict implied by the case alone."""
        if self.case is CaseLabel.MALNORMAL:
            return Verdict.HAS_ACEP
        if self.case is CaseLabel.CYCLIC_POWERS:
            return Verdict.UNDETERMINED
        return Verdict.NO_ACEP


def classify(g: StallingsGraph) -> Classification:
    """Places the subgroup of ``g`` into one of the four cases.

    Runs on ``core(Γ) ×̇ core(Γ)``: rank and proper-power status of the
    intersections are invariant under conjugation, and every cycle lives in
    the core.
    """
    cyclic = [c for c in core_product_components(g) if c.rank >= 1]
    if not cyclic:
        case, witnesses = CaseLabel.MALNORMAL, ()
    elif any(c.rank >= 2 for c in cyclic):
        case = CaseLabel.NON_CYCLONORMAL
        witnesses = tuple(c for c in cyclic if c.rank >= 2)
    elif any(not c.is_proper_power for c in cyclic):
        case = CaseLabel.CYCLIC_NON_POWER
        witnesses = tuple(c for c in cyclic if not c.is_proper_power)
    else:
        case, witnesses = CaseLabel.CYCLIC_POWERS, tuple(cyclic)
    log.info("Subgroup falls into case %d", case.value)
    return Classification(case, witnesses)
