"""The length function ``|·|_H`` and the constants of the ACEP bound.

``|w|_Ω`` is the word length of ``w`` when every member subgroup of the
family ``Ω`` is added to the generating set. It is computed with ball
automata: ``B_k`` accepts every reduced word of ``|·|_Ω``-length at most ``k``.
``B_k`` is a chain of ``k`` one-step automata, each reading a letter, an
element of a member subgroup or nothing, saturated so that it accepts the
free reductions of everything it reads.
"""
from collections import defaultdict, deque
import copy
from dataclasses import dataclass
from functools import lru_cache
import logging
import math
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from acep.fiber import components, diameter, product
from acep.graph import StallingsGraph, Vertex, XDigraph, conjugate_subgroups, fold
from acep.words import (
    IDENTITY,
    Alphabet,
    Letter,
    Word,
    inverse,
    make_letter,
    reduce,
    reduced_words,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class OmegaFamily:
    """The intersections ``H^a ∩ H^b`` over distinct vertices ``a, b`` of ``Γ(H)``,
    one Stallings graph per distinct nontrivial intersection.

    ``anchors[i]`` is the product vertex ``(a, b)`` at which ``members[i]`` was
    read off.
    """

    alphabet: Alphabet
    members: Tuple[StallingsGraph, ...] = ()
    anchors: Tuple[Vertex, ...] = ()

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class Constants:
    """``C = diam(Γ ×̇ Γ) + 1`` and ``C_H = 6C + 2 diam(Γ)``."""

    diam_gamma: int
    c: int
    c_h: int

    def to_dict(self) -> dict:
        return {"diam": self.diam_gamma, "C": self.c, "C_H": self.c_h}


def omega(g: StallingsGraph) -> OmegaFamily:
    """Computes ``Ω(H)`` from the non-diagonal components of ``Γ × Γ``.

    Members with basepoint-isomorphic graphs are the same subgroup and are
    kept once. A warning is logged when some member is conjugate to ``H``
    itself, in which case ``|·|_H`` is bounded on ``H``.
    """
    dotted = product(g, remove_diagonal=True)
    members, anchors, keys = [], [], set()
    for component in components(dotted):
        if component.rank < 1:
            continue
        graph = dotted.subgraph(component.vertices)
        for vertex in component.vertices:
            member = fold(graph, vertex)
            key = member.canonical_key
            if key in keys:
                continue
            keys.add(key)
            members.append(member)
            anchors.append(vertex)
    family = OmegaFamily(g.alphabet, tuple(members), tuple(anchors))
    log.debug("Omega family has %d members", len(family))
    if g.rank >= 1 and any(conjugate_subgroups(m, g) for m in members):
        log.warning("Omega contains a conjugate of H: |.|_H is bounded on H")
    return family


def constants(g: StallingsGraph) -> Constants:
    diam_gamma = diameter(g)
    c = diameter(product(g, remove_diagonal=True)) + 1
    return Constants(diam_gamma, c, 6 * c + 2 * diam_gamma)


def _epsilon_closures(eps: List[set]) -> List[FrozenSet[int]]:
    closures = []
    for state in range(len(eps)):
        seen = {state}
        stack = [state]
        while stack:
            for following in eps[stack.pop()]:
                if following not in seen:
                    seen.add(following)
                    stack.append(following)
        closures.append(frozenset(seen))
    return closures


class BallAutomaton:
    """
    Nondeterministic automaton with epsilon moves accepting the reduced words
    of ``|·|_Ω``-length at most ``radius``.

    Build balls with :meth:`from_family` and grow them with :meth:`extended`;
    both return saturated automata.

    Parameters
    ----------
    alphabet : Alphabet
    delta : list of dict
        ``delta[p][letter]`` is the set of states reached from ``p``.
    eps : list of set
        Epsilon moves.
    start, accept : int
    radius : int
        Number of chained one-step layers.
    """

    def __init__(self, alphabet: Alphabet, delta, eps, start: int, accept: int, radius: int):
        self._alphabet = alphabet
        self._delta = delta
        self._eps = eps
        self._start = start
        self._accept = accept
        self._radius = radius
        self._saturate()

    @classmethod
    def from_family(cls, family: OmegaFamily, radius: int) -> "BallAutomaton":
        if radius < 0:
            raise ValueError(f"The ball radius must be non-negative, got {radius}")
        delta, eps = [defaultdict(set)], [set()]
        entry = 0
        for _ in range(radius):
            entry = cls._append_layer(family, delta, eps, entry)
        return cls(family.alphabet, delta, eps, 0, entry, radius)

    @staticmethod
    def _append_layer(family: OmegaFamily, delta, eps, entry: int) -> int:
        def _new_state():
            delta.append(defaultdict(set))
            eps.append(set())
            return len(delta) - 1

        exit_ = _new_state()
        eps[entry].add(exit_)
        for letter in family.alphabet.letters:
            delta[entry][letter].add(exit_)
        for member in family.members:
            index = {v: _new_state() for v in member.vertices}
            for o, t, x in member.edges:
                delta[index[o]][make_letter(x)].add(index[t])
                delta[index[t]][make_letter(x, -1)].add(index[o])
            eps[entry].add(index[member.basepoint])
            eps[index[member.basepoint]].add(exit_)
        return exit_

    def extended(self, family: OmegaFamily) -> "BallAutomaton":
        """The ball of radius one larger, built on top of this one."""
        delta, eps = copy.deepcopy(self._delta), copy.deepcopy(self._eps)
        accept = self._append_layer(family, delta, eps, self._accept)
        return BallAutomaton(self._alphabet, delta, eps, self._start, accept, self._radius + 1)

    def _saturate(self):
        """Adds ``p -ε-> s`` whenever ``p -x-> q``, ``q -ε*-> r`` and
        ``r -x⁻¹-> s``, until nothing changes."""
        n_rounds = 0
        changed = True
        while changed:
            changed = False
            n_rounds += 1
            closures = _epsilon_closures(self._eps)
            for p, table in enumerate(self._delta):
                for letter, targets in list(table.items()):
                    for q in list(targets):
                        for r in closures[q]:
                            for s in self._delta[r].get(-letter, ()):
                                if s != p and s not in self._eps[p]:
                                    self._eps[p].add(s)
                                    changed = True
        self._closures = _epsilon_closures(self._eps)
        log.debug("Saturated a ball of radius %d in %d rounds", self._radius, n_rounds)

    # --------------------------------------------------------------------------------
    #                                                         | Read-only properties |
    #                                                         ------------------------

    @property
    def radius(self) -> int:
        return self._radius

    @property
    def start(self) -> int:
        return self._start

    @property
    def accept(self) -> int:
        return self._accept

    @property
    def n_states(self) -> int:
        return len(self._delta)

    def closure(self, state: int) -> FrozenSet[int]:
        """States reachable from ``state`` by epsilon moves, itself included."""
        return self._closures[state]

    def transitions(self, state: int) -> Iterable[Tuple[Letter, set]]:
        return self._delta[state].items()

    def accepts(self, word: Sequence[Letter]) -> bool:
        """Membership of a reduced word."""
        current = self._closures[self._start]
        for letter in word:
            following = set()
            for state in current:
                following |= self._delta[state].get(letter, set())
            if not following:
                return False
            current = frozenset().union(*(self._closures[s] for s in following))
        return self._accept in current


class OmegaMetric:
    """
    Evaluates ``|·|_Ω`` for a fixed family, caching the balls it builds.

    Parameters
    ----------
    family : OmegaFamily
    """

    def __init__(self, family: OmegaFamily):
        self._family = family
        self._balls: List[BallAutomaton] = []

    @property
    def family(self) -> OmegaFamily:
        return self._family

    def ball(self, radius: int) -> BallAutomaton:
        """``B_radius`` for ``radius >= 1``."""
        if radius < 1:
            raise ValueError(f"Balls are cached from radius 1, got {radius}")
        if not self._balls:
            self._balls.append(BallAutomaton.from_family(self._family, 1))
        while len(self._balls) < radius:
            self._balls.append(self._balls[-1].extended(self._family))
        return self._balls[radius - 1]

    def length(self, word: Sequence[Letter]) -> int:
        word = reduce(word)
        if len(word) == 0:
            return 0
        if len(self._family) == 0:
            return len(word)
        for k in range(1, len(word)):
            if self.ball(k).accepts(word):
                return k
        return len(word)


def omega_length(
    word: Sequence[Letter], family: OmegaFamily, alphabet: Optional[Alphabet] = None
) -> int:
    """Exact ``|word|_Ω``.

    Raises
    ------
    ValueError
        If ``alphabet`` is given and differs from the family's.
    """
    if alphabet is not None and alphabet != family.alphabet:
        raise ValueError("The word alphabet does not match the family's alphabet.")
    return _metric_for_family(family).length(word)


@lru_cache(maxsize=32)
def _metric_for_family(family: OmegaFamily) -> OmegaMetric:
    return OmegaMetric(family)


@lru_cache(maxsize=32)
def metric_for(g: StallingsGraph) -> OmegaMetric:
    """The cached ``|·|_H`` evaluator of ``Γ(H)``."""
    return OmegaMetric(omega(g))


def h_length(word: Sequence[Letter], g: StallingsGraph) -> int:
    """``|word|_H = |word|_{Ω(H)}``."""
    return metric_for(g).length(word)


def gamma(n_graph: StallingsGraph) -> Union[int, float]:
    """Length of the shortest nontrivial element of ``N``; ``math.inf`` if ``N = 1``.

    Breadth-first search over ``(vertex, last letter)`` for the shortest
    reduced cycle at the basepoint.
    """
    base = n_graph.basepoint
    seen = {(base, 0)}
    queue = deque([(base, 0, 0)])
    while queue:
        v, last, depth = queue.popleft()
        for letter in n_graph.alphabet.letters:
            if letter == -last:
                continue
            u = n_graph.step(v, letter)
            if u is None:
                continue
            if u == base:
                return depth + 1
            if (u, letter) not in seen:
                seen.add((u, letter))
                queue.append((u, letter, depth + 1))
    return math.inf


def _ball_meets_cycles(ball: BallAutomaton, n_graph: StallingsGraph) -> bool:
    """True iff some nontrivial reduced cycle label at the basepoint of
    ``n_graph`` is accepted by ``ball``."""
    base = n_graph.basepoint
    start = (ball.start, base, 0)
    seen = {start}
    stack = [start]
    while stack:
        state, v, last = stack.pop()
        if last != 0 and v == base and state == ball.accept:
            return True
        following = [(s, v, last) for s in ball.closure(state)]
        for letter, targets in ball.transitions(state):
            if letter == -last:
                continue
            u = n_graph.step(v, letter)
            if u is not None:
                following.extend((s, u, letter) for s in targets)
        for item in following:
            if item not in seen:
                seen.add(item)
                stack.append(item)
    return False


def gamma_h(n_graph: StallingsGraph, g: StallingsGraph) -> Union[int, float]:
    """``γ_H(N)``, the least ``|w|_H`` over nontrivial ``w ∈ N``.

    Raises
    ------
    ValueError
        If a basis word of ``N`` is not in ``H``.
    """
    for word in n_graph.basis().basis_words:
        if not g.member(word):
            raise ValueError(f"N is not a subgroup of H: {word} is not in H.")
    upper = gamma(n_graph)
    metric = metric_for(g)
    if len(metric.family) == 0 or upper is math.inf:
        return upper
    for k in range(1, upper):
        if _ball_meets_cycles(metric.ball(k), n_graph):
            return k
    return upper


def path_labels(p: XDigraph, max_length: int) -> List[Word]:
    """Distinct labels of nonempty reduced paths in ``p`` with at most
    ``max_length`` letters, in shortlex order."""
    found = set()
    for start in p.vertices:
        stack = [(start, IDENTITY)]
        while stack:
            v, word = stack.pop()
            if word:
                found.add(word)
            if len(word) == max_length:
                continue
            for letter in p.alphabet.letters:
                if word and word[-1] == -letter:
                    continue
                for _, u in p.moves(v, letter):
                    stack.append((u, word + (letter,)))
    return sorted(found, key=lambda w: (len(w), w))


def _coset_key(g: StallingsGraph, word: Sequence[Letter]) -> Tuple[Vertex, Word]:
    """Names the right coset ``H·word`` of a reduced word: the end of its
    longest prefix readable from the basepoint, and the unread suffix."""
    v = g.basepoint
    for i, letter in enumerate(word):
        u = g.step(v, letter)
        if u is None:
            return v, tuple(word[i:])
        v = u
    return v, IDENTITY


def _bounded_words(h: Word, rank: int, radius: int, cap: int) -> Iterator[Word]:
    """Reduced words that leave ``h`` after a common prefix by at most
    ``radius`` letters, with at most ``cap`` letters in total."""
    for j in range(len(h) + 1):
        prefix = h[:j]
        for length in range(0, min(radius, cap - j) + 1):
            for tail in reduced_words(rank, length):
                if tail and j < len(h) and tail[0] == h[j]:
                    continue
                if tail and j > 0 and tail[0] == -h[j - 1]:
                    continue
                yield prefix + tail


def alt_distance_upper(
    h: Sequence[Letter],
    g: StallingsGraph,
    cap: Optional[int] = None,
    radius: Optional[int] = None,
) -> int:
    """Upper bound on the least weight of an alternating product equal to ``h``.

    Breadth-first search over reduced words ``u``: appending a letter costs
    one, and so does multiplying by a nontrivial element of ``H``, which moves
    ``u`` anywhere in its coset ``uH``. The latter is forbidden while
    ``u ∈ H``. Words are confined to within ``radius`` letters of a prefix of
    ``h`` and to at most ``cap`` letters.

    Parameters
    ----------
    h : word
    g : StallingsGraph
    cap : int, optional
        Defaults to ``|h| + radius``.
    radius : int, optional
        Defaults to ``diam(Γ(H)) + 1``.

    Returns
    -------
    int
        Never more than ``|h|``.
    """
    h = reduce(h)
    if len(h) == 0:
        return 0
    radius = diameter(g) + 1 if radius is None else radius
    cap = len(h) + radius if cap is None else cap

    states = set(_bounded_words(h, g.alphabet.rank, radius, cap))
    classes: Dict[tuple, List[Word]] = defaultdict(list)
    key_of = {}
    for u in states:
        key = _coset_key(g, inverse(u))
        key_of[u] = key
        classes[key].append(u)
    in_h = (g.basepoint, IDENTITY)

    distance = {IDENTITY: 0}
    queue = deque([IDENTITY])
    expanded = set()
    while queue:
        u = queue.popleft()
        d = distance[u]
        if u == h:
            return min(d, len(h))
        following = []
        for letter in g.alphabet.letters:
            following.append(u[:-1] if u and u[-1] == -letter else u + (letter,))
        key = key_of[u]
        if key != in_h and key not in expanded:
            expanded.add(key)
            following.extend(classes[key])
        for v in following:
            if v in states and v not in distance:
                distance[v] = d + 1
                queue.append(v)
    return len(h)


@dataclass(frozen=True)
class LipschitzRecord:
    word: Word
    h_length: int
    alt_upper: int
    lower_ok: bool
    upper_ok: bool


@dataclass(frozen=True)
class LipschitzReport:
    """Checks ``|h|_H <= C·d`` and ``d <= (1 + 2 diam(Γ))·|h|_H`` with ``d`` the
    alternating-product upper bound, per sample."""

    constants: Constants
    records: Tuple[LipschitzRecord, ...]

    @property
    def violations(self) -> Tuple[LipschitzRecord, ...]:
        return tuple(r for r in self.records if not (r.lower_ok and r.upper_ok))


def lipschitz_report(
    g: StallingsGraph, samples: Iterable[Sequence[Letter]], cap: Optional[int] = None
) -> LipschitzReport:
    """
    Each sample is searched with radius ``max(2 diam(Γ), diam(Γ) + 1)`` and
    a cap of at least ``(1 + 2 diam(Γ))·|h|_H + 2 diam(Γ)`` letters, room for
    the alternating product that conjugates each factor of ``h`` into ``H``.

    Raises
    ------
    ValueError
        If a sample is not in ``H``.
    """
    consts = constants(g)
    metric = metric_for(g)
    radius = max(2 * consts.diam_gamma, consts.diam_gamma + 1)
    records = []
    for h in samples:
        h = reduce(h)
        if not g.member(h):
            raise ValueError(f"Sample {h} is not in H.")
        length = metric.length(h)
        needed = max(
            (1 + 2 * consts.diam_gamma) * length + 2 * consts.diam_gamma, len(h) + radius
        )
        upper = alt_distance_upper(
            h, g, cap=needed if cap is None else max(cap, needed), radius=radius
        )
        records.append(
            LipschitzRecord(
                h,
                length,
                upper,
                length <= consts.c * upper,
                upper <= (1 + 2 * consts.diam_gamma) * length,
            )
        )
    report = LipschitzReport(consts, tuple(records))
    if report.violations:
        log.warning("%d Lipschitz violations", len(report.violations))
    return report
