"""Free-group word arithmetic.

A letter is encoded as a nonzero integer: generator ``i`` (zero-based) is
``i + 1`` and its inverse is ``-(i + 1)``. A word is a tuple of letters.
Words returned by this module are always freely reduced.
"""
from dataclasses import dataclass
import logging
from typing import Iterable, Iterator, Optional, Sequence, Tuple

import numpy as np

log = logging.getLogger(__name__)

Letter = int
Word = Tuple[Letter, ...]

IDENTITY: Word = ()


def make_letter(generator: int, sign: int = 1) -> Letter:
    """Returns the letter for ``generator`` (zero-based) raised to ``sign``."""
    if generator < 0:
        raise ValueError(f"Generator index must be non-negative, got {generator}")
    if sign not in (1, -1):
        raise ValueError(f"Sign must be +1 or -1, got {sign}")
    return sign * (generator + 1)


def letter_generator(letter: Letter) -> int:
    return abs(letter) - 1


@dataclass(frozen=True)
class Alphabet:
    """Ordered generator symbols of a free group.

    Symbols are single lowercase letters; in the text syntax the uppercase
    symbol denotes the inverse, so ``"xYx"`` is x·y⁻¹·x. The identity is
    written ``"1"``.
    """

    names: Tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if len(names) < 1:
            raise ValueError("An alphabet needs at least one generator.")
        if len(set(names)) != len(names):
            raise ValueError(f"Generator symbols must be distinct, got {names}")
        for name in names:
            if not (isinstance(name, str) and len(name) == 1 and name.isalpha()):
                raise ValueError(
                    f"Generator symbols must be single letters, got {name!r}"
                )
            if not name.islower():
                raise ValueError(
                    f"Generator symbols must be lowercase, got {name!r} "
                    "(uppercase denotes the inverse)"
                )

    @property
    def rank(self) -> int:
        return len(self.names)

    @property
    def letters(self) -> Tuple[Letter, ...]:
        """All letters, positive first, in generator order."""
        return tuple(range(1, self.rank + 1)) + tuple(
            range(-1, -self.rank - 1, -1)
        )

    def parse_word(self, text: str) -> Word:
        """Parses ``text`` into a reduced word.

        Raises
        ------
        ValueError
            If a symbol is not in the alphabet. The message names the column
            (one-based) of the offending symbol.
        """
        text = text.strip()
        if text == "1":
            return IDENTITY
        raw = []
        for column, symbol in enumerate(text, start=1):
            if symbol.isspace():
                continue
            lower = symbol.lower()
            if lower not in self.names:
                raise ValueError(
                    f"unknown symbol {symbol!r} at column {column} in {text!r}"
                )
            sign = 1 if symbol.islower() else -1
            raw.append(make_letter(self.names.index(lower), sign))
        return reduce(raw)

    def format_word(self, word: Sequence[Letter]) -> str:
        if len(word) == 0:
            return "1"
        symbols = []
        for letter in word:
            name = self.names[letter_generator(letter)]
            symbols.append(name if letter > 0 else name.upper())
        return "".join(symbols)


def reduce(raw: Iterable[Letter]) -> Word:
    """Freely reduces a letter sequence using a stack."""
    stack = []
    for letter in raw:
        if letter == 0:
            raise ValueError("Zero is not a valid letter.")
        if stack and stack[-1] == -letter:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


def is_reduced(word: Sequence[Letter]) -> bool:
    return all(a != -b for a, b in zip(word, word[1:]))


def is_cyclically_reduced(word: Sequence[Letter]) -> bool:
    return is_reduced(word) and (len(word) <= 1 or word[0] != -word[-1])


def inverse(word: Sequence[Letter]) -> Word:
    return tuple(-letter for letter in reversed(word))


def multiply(*words: Sequence[Letter]) -> Word:
    """Reduced product of the given words, left to right."""
    return reduce(letter for word in words for letter in word)


def power(word: Sequence[Letter], exponent: int) -> Word:
    base = tuple(word) if exponent >= 0 else inverse(word)
    return reduce(base * abs(exponent))


def conjugate(word: Sequence[Letter], by: Sequence[Letter]) -> Word:
    """Returns ``by⁻¹ · word · by`` (the convention ``w^a = a⁻¹wa``)."""
    return multiply(inverse(by), word, by)


def commutator(u: Sequence[Letter], v: Sequence[Letter]) -> Word:
    """Returns ``[u, v] = u v u⁻¹ v⁻¹``."""
    return multiply(u, v, inverse(u), inverse(v))


def rotate(word: Sequence[Letter], offset: int) -> Word:
    if len(word) == 0:
        return IDENTITY
    offset %= len(word)
    return tuple(word[offset:]) + tuple(word[:offset])


@dataclass(frozen=True)
class CyclicWord:
    """A cyclically reduced word, considered up to rotation by its users."""

    representative: Word

    def __post_init__(self):
        if not is_cyclically_reduced(self.representative):
            raise ValueError(
                f"{self.representative} is not cyclically reduced."
            )

    def __len__(self) -> int:
        return len(self.representative)

    def rotations(self) -> Iterator[Word]:
        for offset in range(max(len(self.representative), 1)):
            yield rotate(self.representative, offset)


def cyclic_reduce(word: Sequence[Letter]) -> Tuple[CyclicWord, Word]:
    """Splits a reduced word as ``conjugator · w* · conjugator⁻¹``.

    Returns
    -------
    (CyclicWord, Word)
        The cyclically reduced core ``w*`` and the conjugator.
    """
    word = reduce(word)
    start, stop = 0, len(word)
    while stop - start >= 2 and word[start] == -word[stop - 1]:
        start += 1
        stop -= 1
    return CyclicWord(word[start:stop]), word[:start]


def _prefix_function(sequence: Sequence) -> list:
    """Knuth-Morris-Pratt failure function."""
    pi = [0] * len(sequence)
    for i in range(1, len(sequence)):
        k = pi[i - 1]
        while k > 0 and sequence[i] != sequence[k]:
            k = pi[k - 1]
        if sequence[i] == sequence[k]:
            k += 1
        pi[i] = k
    return pi


def _find(pattern: Sequence, text: Sequence) -> int:
    """Index of the first occurrence of ``pattern`` in ``text``, or -1."""
    if len(pattern) == 0:
        return 0
    pi = _prefix_function(pattern)
    k = 0
    for i, item in enumerate(text):
        while k > 0 and item != pattern[k]:
            k = pi[k - 1]
        if item == pattern[k]:
            k += 1
        if k == len(pattern):
            return i - k + 1
    return -1


def rotation_offset(u: Sequence[Letter], v: Sequence[Letter]) -> Optional[int]:
    """Returns ``k`` with ``rotate(u, k) == v``, or None if ``v`` is not a
    rotation of ``u``. Uses the doubling trick: search ``v`` inside ``u·u``."""
    if len(u) != len(v):
        return None
    if len(u) == 0:
        return 0
    index = _find(tuple(v), tuple(u) + tuple(u))
    return None if index < 0 else index


def conjugate_in_free(w1: Sequence[Letter], w2: Sequence[Letter]) -> bool:
    """True iff the cyclic reductions of ``w1`` and ``w2`` are rotations of one
    another, i.e. ``w1`` and ``w2`` are conjugate in the free group."""
    c1, _ = cyclic_reduce(w1)
    c2, _ = cyclic_reduce(w2)
    return rotation_offset(c1.representative, c2.representative) is not None


def conjugator_between(u: Sequence[Letter], v: Sequence[Letter]) -> Optional[Word]:
    """Returns ``c`` with ``u = c · v · c⁻¹``, or None if ``u`` and ``v`` are not
    conjugate."""
    cu, pu = cyclic_reduce(u)
    cv, pv = cyclic_reduce(v)
    offset = rotation_offset(cv.representative, cu.representative)
    if offset is None:
        return None
    # u* = alpha⁻¹ v* alpha where alpha is the first `offset` letters of v*
    alpha = cv.representative[:offset]
    return multiply(pu, inverse(alpha), inverse(pv))


def primitive_period(word: Sequence[Letter]) -> int:
    """Length of the shortest ``r`` with ``word = r^k``; ``len(word)`` when the
    word is not a proper power of a shorter word (as a linear word)."""
    n = len(word)
    if n == 0:
        return 0
    period = n - _prefix_function(word)[-1]
    return period if n % period == 0 else n


def is_proper_power(word: Sequence[Letter]) -> Optional[Tuple[Word, int]]:
    """Returns ``(root, exponent)`` with ``exponent >= 2`` and maximal, or None.

    The decomposition is computed on the cyclic reduction and conjugated back,
    so ``power(root, exponent) == word``.

    Raises
    ------
    ValueError
        If ``word`` is trivial.
    """
    word = reduce(word)
    if len(word) == 0:
        raise ValueError("The trivial word has no root.")
    core, conjugator = cyclic_reduce(word)
    period = primitive_period(core.representative)
    exponent = len(core) // period
    if exponent < 2:
        return None
    root = multiply(conjugator, core.representative[:period], inverse(conjugator))
    return root, exponent


def substitute(word: Sequence[Letter], images: Sequence[Sequence[Letter]]) -> Word:
    """Evaluates ``word``, read over an abstract basis, by replacing basis letter
    ``i`` with ``images[i]`` and reducing."""
    parts = []
    for letter in word:
        image = tuple(images[letter_generator(letter)])
        parts.append(image if letter > 0 else inverse(image))
    return multiply(*parts)


def reduced_words(rank: int, length: int) -> Iterator[Word]:
    """Yields every reduced word of exactly ``length`` letters, in a fixed
    order (shortlex over the letter order of ``Alphabet.letters``)."""
    letters = tuple(range(1, rank + 1)) + tuple(range(-1, -rank - 1, -1))

    def _extend(prefix):
        if len(prefix) == length:
            yield prefix
            return
        for letter in letters:
            if prefix and prefix[-1] == -letter:
                continue
            yield from _extend(prefix + (letter,))

    yield from _extend(())


def words_up_to(rank: int, max_length: int) -> Iterator[Word]:
    for length in range(max_length + 1):
        yield from reduced_words(rank, length)


def random_reduced_word(rng: np.random.Generator, rank: int, length: int) -> Word:
    """Draws a reduced word of exactly ``length`` letters, uniformly at random
    among reduced words."""
    word = []
    while len(word) < length:
        generator = int(rng.integers(rank))
        letter = make_letter(generator, 1 if rng.random() < 0.5 else -1)
        if word and word[-1] == -letter:
            continue
        word.append(letter)
    return tuple(word)
