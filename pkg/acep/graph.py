"""Labeled digraphs, Stallings folding and subgroup automata.

An :class:`XDigraph` has edges ``(origin, terminus, generator)``; reading an
edge forwards spells the positive letter, backwards the inverse letter. A
:class:`StallingsGraph` is a folded, connected, base-pointed XDigraph whose
reduced basepoint cycles spell exactly the elements of a subgroup.
"""
from collections import defaultdict, deque
from dataclasses import dataclass
import json
import logging
from pathlib import Path
from typing import Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from acep.words import (
    IDENTITY,
    Alphabet,
    Letter,
    Word,
    conjugate as conjugate_word,
    inverse,
    letter_generator,
    make_letter,
    multiply,
    reduce,
    substitute,
)

log = logging.getLogger(__name__)

Vertex = Hashable
Edge = Tuple[Vertex, Vertex, int]


class XDigraph:
    """
    Directed multigraph with edges labeled by generator indices.

    Parameters
    ----------
    alphabet : Alphabet
        The generators that may label edges.
    vertices : iterable
        Hashable vertex ids. Order is preserved.
    edges : iterable of (origin, terminus, generator)
        Generator indices are zero-based.

    Raises
    ------
    ValueError
        If an edge refers to an unknown vertex or generator.
    """

    def __init__(self, alphabet: Alphabet, vertices: Iterable[Vertex], edges: Iterable[Edge]):
        self._alphabet = alphabet
        self._vertices = tuple(vertices)
        self._index = {v: i for i, v in enumerate(self._vertices)}
        if len(self._index) != len(self._vertices):
            raise ValueError("Vertex ids must be distinct.")
        self._edges = tuple((o, t, int(x)) for o, t, x in edges)

        self._out = {v: defaultdict(list) for v in self._vertices}
        self._in = {v: defaultdict(list) for v in self._vertices}
        for number, (o, t, x) in enumerate(self._edges):
            if o not in self._index or t not in self._index:
                raise ValueError(f"Edge {(o, t, x)} has an endpoint outside the graph.")
            if not 0 <= x < alphabet.rank:
                raise ValueError(f"Edge {(o, t, x)} has a label outside the alphabet.")
            self._out[o][x].append(number)
            self._in[t][x].append(number)

    # --------------------------------------------------------------------------------
    #                                                         | Read-only properties |
    #                                                         ------------------------

    @property
    def alphabet(self) -> Alphabet:
        return self._alphabet

    @property
    def vertices(self) -> Tuple[Vertex, ...]:
        return self._vertices

    @property
    def edges(self) -> Tuple[Edge, ...]:
        return self._edges

    @property
    def n_vertices(self) -> int:
        return len(self._vertices)

    @property
    def n_edges(self) -> int:
        return len(self._edges)

    # --------------------------------------------------------------------------------
    #                                                               | Public methods |
    #                                                               ------------------

    def check_vertex(self, v: Vertex):
        if v not in self._index:
            raise ValueError(f"Invalid vertex id: {v!r}")

    def degree(self, v: Vertex) -> int:
        """Number of edge ends at ``v``; a loop counts twice."""
        return sum(map(len, self._out[v].values())) + sum(map(len, self._in[v].values()))

    def moves(self, v: Vertex, letter: Letter) -> List[Tuple[int, Vertex]]:
        """Edges readable from ``v`` with ``letter``, as ``(edge number, endpoint)``.

        A positive letter follows an out-edge, a negative letter an in-edge
        backwards.
        """
        x = letter_generator(letter)
        if letter > 0:
            return [(e, self._edges[e][1]) for e in self._out[v].get(x, ())]
        return [(e, self._edges[e][0]) for e in self._in[v].get(x, ())]

    def incident(self, v: Vertex) -> Iterable[Tuple[Letter, int, Vertex]]:
        """All ``(letter, edge number, endpoint)`` readable from ``v``."""
        for letter in self._alphabet.letters:
            for e, u in self.moves(v, letter):
                yield letter, e, u

    def step(self, v: Vertex, letter: Letter) -> Optional[Vertex]:
        """Endpoint of the edge read from ``v`` with ``letter`` (folded graphs)."""
        found = self.moves(v, letter)
        return found[0][1] if found else None

    def trace(self, v: Vertex, word: Sequence[Letter]) -> Optional[Vertex]:
        """Endpoint of the unique path from ``v`` labeled ``word``, or None.

        Only meaningful for folded graphs, where such a path is unique.

        Raises
        ------
        ValueError
            If ``v`` is not a vertex.
        """
        self.check_vertex(v)
        for letter in word:
            v = self.step(v, letter)
            if v is None:
                return None
        return v

    def is_folded(self) -> bool:
        for v in self._vertices:
            for table in (self._out[v], self._in[v]):
                if any(len(numbers) > 1 for numbers in table.values()):
                    return False
        return True

    def subgraph(self, vertices: Iterable[Vertex]) -> "XDigraph":
        """Induced subgraph, keeping vertex ids."""
        keep = set(vertices)
        return XDigraph(
            self._alphabet,
            [v for v in self._vertices if v in keep],
            [e for e in self._edges if e[0] in keep and e[1] in keep],
        )

    def adjacency(self):
        """Symmetric sparse adjacency matrix (edge directions and labels dropped)."""
        n = self.n_vertices
        rows = [self._index[o] for o, _, _ in self._edges]
        cols = [self._index[t] for _, t, _ in self._edges]
        data = np.ones(len(rows), dtype=np.int8)
        matrix = coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()
        return ((matrix + matrix.T) > 0).astype(np.int8)

    def components(self) -> List[Tuple[Vertex, ...]]:
        """Connected components (edges traversable both ways)."""
        if self.n_vertices == 0:
            return []
        n_components, labels = connected_components(self.adjacency(), directed=False)
        groups = [[] for _ in range(n_components)]
        for v, label in zip(self._vertices, labels):
            groups[label].append(v)
        return [tuple(group) for group in groups]

    def betti_number(self) -> int:
        """First Betti number ``|E| - |V| + #components``."""
        return self.n_edges - self.n_vertices + len(self.components())

    def core(self, keep: Optional[Vertex] = None) -> "XDigraph":
        """Iteratively strips vertices of degree one, except ``keep``."""
        degree = {v: self.degree(v) for v in self._vertices}
        removed = set()
        stack = [v for v in self._vertices if degree[v] == 1 and v != keep]
        while stack:
            v = stack.pop()
            if v in removed or degree[v] != 1:
                continue
            removed.add(v)
            for _, _, u in self.incident(v):
                if u not in removed:
                    degree[u] -= 1
                    if degree[u] == 1 and u != keep:
                        stack.append(u)
        return self.subgraph(v for v in self._vertices if v not in removed)

    def to_dot(self, basepoint: Optional[Vertex] = None, name: str = "G") -> str:
        """Graphviz DOT text: one statement per edge, basepoint double-circled."""
        ids = {v: f"v{i}" for i, v in enumerate(self._vertices)}
        lines = [f"digraph {name} {{"]
        for v in self._vertices:
            shape = "doublecircle" if v == basepoint else "circle"
            label = str(v).replace('"', "'")
            lines.append(f'  {ids[v]} [label="{label}", shape={shape}];')
        for o, t, x in self._edges:
            lines.append(f'  {ids[o]} -> {ids[t]} [label="{self._alphabet.names[x]}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _extend_isomorphism(
    g1: XDigraph, g2: XDigraph, a: Vertex, b: Vertex
) -> Optional[Dict[Vertex, Vertex]]:
    """Propagates ``a -> b`` along labels; returns the label-preserving
    isomorphism of connected folded graphs it determines, or None."""
    if g1.n_vertices != g2.n_vertices or g1.n_edges != g2.n_edges:
        return None
    mapping = {a: b}
    used = {b}
    queue = deque([a])
    while queue:
        u = queue.popleft()
        for letter in g1.alphabet.letters:
            u_next = g1.step(u, letter)
            w_next = g2.step(mapping[u], letter)
            if (u_next is None) != (w_next is None):
                return None
            if u_next is None:
                continue
            if u_next in mapping:
                if mapping[u_next] != w_next:
                    return None
            else:
                if w_next in used:
                    return None
                mapping[u_next] = w_next
                used.add(w_next)
                queue.append(u_next)
    if len(mapping) != g1.n_vertices:
        return None
    return mapping


@dataclass(frozen=True)
class SubgroupBasis:
    """Free basis read off a spanning tree.

    ``basis_words[i]`` is the label of ``P(o(e)) e P(t(e))⁻¹`` for the i-th
    non-tree edge ``e = basis_edges[i]``.
    """

    spanning_tree: FrozenSet[int]
    basis_edges: Tuple[int, ...]
    basis_words: Tuple[Word, ...]

    def __len__(self) -> int:
        return len(self.basis_words)

    def evaluate(self, rewritten: Sequence[Tuple[int, int]]) -> Word:
        """Substitutes basis words into a word over the basis."""
        return substitute(as_basis_word(rewritten), self.basis_words)


def as_basis_word(rewritten: Sequence[Tuple[int, int]]) -> Word:
    """Converts ``(basis index, sign)`` pairs into letters over the basis."""
    return tuple(make_letter(i, sign) for i, sign in rewritten)


class StallingsGraph(XDigraph):
    """
    Folded, connected, base-pointed XDigraph representing a subgroup.

    Build instances with :func:`fold` or :func:`build_stallings`; the
    constructor checks the defining invariants.

    Raises
    ------
    ValueError
        If the graph is not folded or connected, or a non-basepoint vertex has
        degree below two.
    """

    def __init__(self, alphabet: Alphabet, vertices, edges, basepoint: Vertex):
        super().__init__(alphabet, vertices, edges)
        self.check_vertex(basepoint)
        self._basepoint = basepoint
        if not self.is_folded():
            raise ValueError("A Stallings graph must be folded.")
        if len(self.components()) != 1:
            raise ValueError("A Stallings graph must be connected.")
        for v in self.vertices:
            if v != basepoint and self.degree(v) < 2:
                raise ValueError(f"Vertex {v} is a hanging tail vertex.")
        self._basis = None

    @property
    def basepoint(self) -> Vertex:
        return self._basepoint

    @property
    def rank(self) -> int:
        """Rank of the subgroup, ``|E| - |V| + 1``."""
        return self.n_edges - self.n_vertices + 1

    @property
    def canonical_key(self) -> tuple:
        """Equal for two graphs iff they are isomorphic respecting basepoints."""
        relabelled = fold(self, self._basepoint)
        return (relabelled.n_vertices, tuple(sorted(relabelled.edges)))

    def member(self, word: Sequence[Letter]) -> bool:
        return self.trace(self._basepoint, word) == self._basepoint

    def core(self, keep: Optional[Vertex] = None) -> XDigraph:
        """Type of the graph: the basepoint tail stripped (no exemption)."""
        return XDigraph.core(self, keep=keep)

    def basis(self) -> SubgroupBasis:
        """Free basis from the breadth-first spanning tree at the basepoint.

        Edges are explored in letter order (positive letters first, by
        generator), so the basis is deterministic.
        """
        if self._basis is not None:
            return self._basis
        paths = self.tree_paths()
        tree = self._tree_edges
        basis_edges = tuple(e for e in range(self.n_edges) if e not in tree)
        words = []
        for e in basis_edges:
            o, t, x = self.edges[e]
            words.append(multiply(paths[o], (make_letter(x),), inverse(paths[t])))
        self._basis = SubgroupBasis(frozenset(tree), basis_edges, tuple(words))
        return self._basis

    def tree_paths(self) -> Dict[Vertex, Word]:
        """Label of the spanning-tree path ``P(v)`` from the basepoint to each vertex."""
        if getattr(self, "_paths", None) is None:
            paths = {self._basepoint: IDENTITY}
            tree = set()
            queue = deque([self._basepoint])
            while queue:
                v = queue.popleft()
                for letter, e, u in self.incident(v):
                    if u not in paths:
                        paths[u] = paths[v] + (letter,)
                        tree.add(e)
                        queue.append(u)
            self._paths = paths
            self._tree_edges = frozenset(tree)
        return self._paths

    def rewrite_in_basis(self, word: Sequence[Letter]) -> Optional[Tuple[Tuple[int, int], ...]]:
        """Expresses ``word`` over the free basis, or None if it is not a member.

        Returns
        -------
        tuple of (basis index, sign) or None
        """
        basis = self.basis()
        position = {e: i for i, e in enumerate(basis.basis_edges)}
        v = self._basepoint
        letters = []
        for letter in reduce(word):
            found = self.moves(v, letter)
            if not found:
                return None
            e, v = found[0]
            if e in position:
                letters.append(make_letter(position[e], 1 if letter > 0 else -1))
        if v != self._basepoint:
            return None
        return tuple(
            (letter_generator(letter), 1 if letter > 0 else -1)
            for letter in reduce(letters)
        )

    def conjugate(self, by: Sequence[Letter]) -> "StallingsGraph":
        """Stallings graph of ``H^b = b⁻¹ H b``."""
        generators = [conjugate_word(h, by) for h in self.basis().basis_words]
        return build_stallings(self.alphabet, generators)

    def cycle_labels(self, max_length: int, v: Optional[Vertex] = None) -> List[Word]:
        """All nontrivial reduced cycle labels at ``v`` (default: basepoint)."""
        return cycle_labels(self, self._basepoint if v is None else v, max_length)

    def to_dot(self, basepoint: Optional[Vertex] = None, name: str = "G") -> str:
        return super().to_dot(self._basepoint if basepoint is None else basepoint, name)


def cycle_labels(g: XDigraph, v: Vertex, max_length: int) -> List[Word]:
    """Nontrivial labels of reduced paths from ``v`` to ``v`` of length at most
    ``max_length``, found by depth-first search."""
    g.check_vertex(v)
    found = []

    def _walk(u, word):
        if word and u == v:
            found.append(word)
        if len(word) == max_length:
            return
        for letter in g.alphabet.letters:
            if word and word[-1] == -letter:
                continue
            for _, w in g.moves(u, letter):
                _walk(w, word + (letter,))

    _walk(v, IDENTITY)
    return found


class _UnionFind:
    """Union-find with path halving and union by size."""

    def __init__(self, items):
        self.parent = {item: item for item in items}
        self.size = {item: 1 for item in items}

    def find(self, item):
        parent = self.parent
        while parent[item] != item:
            parent[item] = parent[parent[item]]
            item = parent[item]
        return item

    def union(self, a, b) -> Tuple[Hashable, Hashable]:
        """Merges the classes of ``a`` and ``b``; returns ``(kept, absorbed)`` roots."""
        a, b = self.find(a), self.find(b)
        if a == b:
            return a, b
        if self.size[a] < self.size[b]:
            a, b = b, a
        self.parent[b] = a
        self.size[a] += self.size[b]
        return a, b


def fold(g: XDigraph, basepoint: Vertex) -> StallingsGraph:
    """Stallings folding followed by trimming of hanging vertices.

    Vertices are identified with a union-find structure, driven by a worklist
    of vertices that may carry two equally labeled edges in the same direction.
    The result is renumbered ``0, 1, ...`` in breadth-first order from the
    basepoint, exploring letters in alphabet order, so isomorphic inputs give
    identical outputs.

    Parameters
    ----------
    g : XDigraph
        A connected labeled graph.
    basepoint : vertex
        The vertex that becomes ``1_H``.
    """
    g.check_vertex(basepoint)
    uf = _UnionFind(g.vertices)
    out = {v: defaultdict(set) for v in g.vertices}
    inn = {v: defaultdict(set) for v in g.vertices}
    for o, t, x in g.edges:
        out[o][x].add(t)
        inn[t][x].add(o)

    def _clash(v):
        for table in (out[v], inn[v]):
            for x in list(table):
                roots = {uf.find(u) for u in table[x]}
                table[x] = roots
                if len(roots) > 1:
                    return tuple(sorted(roots, key=str)[:2])
        return None

    def _merge(a, b):
        kept, absorbed = uf.union(a, b)
        for table, other in ((out, out[absorbed]), (inn, inn[absorbed])):
            for x, ends in other.items():
                table[kept][x] |= ends
        out[absorbed].clear()
        inn[absorbed].clear()
        return kept

    n_merges = 0
    work = list(g.vertices)
    while work:
        v = uf.find(work.pop())
        pair = _clash(v)
        if pair is not None:
            kept = _merge(*pair)
            n_merges += 1
            work.extend([kept, uf.find(v)])

    roots = {uf.find(v) for v in g.vertices}
    edges = {
        (v, uf.find(t), x) for v in roots for x, ends in out[v].items() for t in ends
    }
    log.debug("Folding identified %d vertex pairs", n_merges)

    # Trim hanging vertices other than the basepoint
    base = uf.find(basepoint)
    folded = XDigraph(g.alphabet, sorted(roots, key=str), sorted(edges, key=str))
    trimmed = folded.core(keep=base)
    return _renumber(trimmed, base)


def _renumber(g: XDigraph, basepoint: Vertex) -> StallingsGraph:
    number = {basepoint: 0}
    queue = deque([basepoint])
    while queue:
        v = queue.popleft()
        for _, _, u in g.incident(v):
            if u not in number:
                number[u] = len(number)
                queue.append(u)
    if len(number) != g.n_vertices:
        raise ValueError("Folding requires a connected graph.")
    edges = sorted((number[o], number[t], x) for o, t, x in g.edges)
    return StallingsGraph(g.alphabet, range(len(number)), edges, 0)


def petal_graph(alphabet: Alphabet, generators: Iterable[Sequence[Letter]]) -> XDigraph:
    """Wedge of cycles at vertex 0, one cycle spelling each generator."""
    vertices = [0]
    edges = []
    for word in generators:
        word = reduce(word)
        if len(word) == 0:
            continue
        previous = 0
        for i, letter in enumerate(word):
            if i == len(word) - 1:
                following = 0
            else:
                following = len(vertices)
                vertices.append(following)
            x = letter_generator(letter)
            edges.append((previous, following, x) if letter > 0 else (following, previous, x))
            previous = following
    return XDigraph(alphabet, vertices, edges)


def build_stallings(alphabet: Alphabet, generators: Iterable[Sequence[Letter]]) -> StallingsGraph:
    """Returns ``Γ(⟨generators⟩)``; no generators gives the trivial subgroup."""
    generators = [reduce(word) for word in generators]
    graph = fold(petal_graph(alphabet, generators), 0)
    log.info(
        "Folded %d generators into a graph with %d vertices, %d edges, rank %d",
        len(generators),
        graph.n_vertices,
        graph.n_edges,
        graph.rank,
    )
    return graph


def trivial_graph(alphabet: Alphabet) -> StallingsGraph:
    return StallingsGraph(alphabet, [0], [], 0)


def conjugate_subgroups(g1: StallingsGraph, g2: StallingsGraph) -> bool:
    """True iff the subgroups are conjugate, i.e. their cores are isomorphic as
    labeled graphs (basepoints ignored)."""
    core1, core2 = g1.core(), g2.core()
    if core1.n_vertices != core2.n_vertices or core1.n_edges != core2.n_edges:
        return False
    if core1.n_edges == 0:
        return True
    anchor = core1.vertices[0]
    return any(
        _extend_isomorphism(core1, core2, anchor, b) is not None for b in core2.vertices
    )


def isomorphic_based(g1: StallingsGraph, g2: StallingsGraph) -> bool:
    """True iff the graphs are isomorphic respecting basepoints (equal subgroups)."""
    return _extend_isomorphism(g1, g2, g1.basepoint, g2.basepoint) is not None


def count_paths(g: XDigraph, word: Sequence[Letter]) -> int:
    """Number of paths labeled ``word`` in a folded graph (one per start vertex)."""
    return sum(1 for v in g.vertices if g.trace(v, word) is not None)


def load_subgroup_spec(path) -> Tuple[Alphabet, List[Word]]:
    """Reads a subgroup spec: a JSON object with ``alphabet`` and ``generators``.

    Raises
    ------
    ValueError
        On malformed JSON (with line and column), missing fields or words
        outside the alphabet.
    """
    text = Path(path).read_text()
    try:
        document = json.loads(text)
    except json.JSONDecodeError as err:
        raise ValueError(
            f"{path}: parse error at line {err.lineno}, column {err.colno}: {err.msg}"
        ) from err
    return parse_subgroup_spec(document)


def parse_subgroup_spec(document: dict) -> Tuple[Alphabet, List[Word]]:
    if not isinstance(document, dict):
        raise ValueError("A subgroup spec must be an object.")
    for field in ("alphabet", "generators"):
        if field not in document:
            raise ValueError(f"Subgroup spec is missing the field {field!r}.")
    alphabet = Alphabet(tuple(document["alphabet"]))
    generators = []
    for i, text in enumerate(document["generators"]):
        try:
            generators.append(alphabet.parse_word(text))
        except ValueError as err:
            raise ValueError(f"generator {i}: {err}") from err
    return alphabet, generators
