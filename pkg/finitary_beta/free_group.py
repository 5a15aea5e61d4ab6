"""
Reduced words in the free group F_l, word length, Cayley balls and the W_a
enumeration used by the counting bounds.

A letter is a nonzero int: +k is the k-th generator, -k its inverse.
"""
import logging
import re
from functools import lru_cache

from .constants import BALL_CACHE_LIMIT, DEFAULT_CARDINALITY_CAP, DEFAULT_GENERATOR, SHORTHAND_LETTERS
from .errors import ResourceCapError, ValidationError

_TOKEN_RE = re.compile(r"([aA])(\d+)")


def _reduce(letters):
    stack = []
    for letter in letters:
        if stack and stack[-1] == -letter:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


class GroupElement:
    __slots__ = ("letters", "_hash")

    def __init__(self, letters=()):
        for letter in letters:
            if not isinstance(letter, int) or letter == 0:
                raise ValidationError(f"invalid letter {letter!r}", key="error_word_syntax")
        self.letters = _reduce(letters)
        self._hash = hash(self.letters)

    @classmethod
    def identity(cls):
        return IDENTITY

    @classmethod
    def generator(cls, index):
        return cls((index,))

    def __mul__(self, other):
        return multiply(self, other)

    def __len__(self):
        return len(self.letters)

    def __eq__(self, other):
        return isinstance(other, GroupElement) and self.letters == other.letters

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __repr__(self):
        return f"GroupElement({self.serialize()!r})"

    def __str__(self):
        return self.serialize()

    def is_identity(self):
        return not self.letters

    def sort_key(self):
        # (length, lex) with a < a^-1 < b < b^-1 < ...
        return (len(self.letters), tuple((abs(k), k < 0) for k in self.letters))

    def serialize(self):
        if not self.letters:
            return "e"
        return "".join(("a" if k > 0 else "A") + str(abs(k)) for k in self.letters)

    def shorthand(self):
        """Letter form ("bA") when every generator fits the shorthand alphabet."""
        if not self.letters:
            return "e"
        if max(abs(k) for k in self.letters) > len(SHORTHAND_LETTERS):
            return self.serialize()
        out = []
        for k in self.letters:
            ch = SHORTHAND_LETTERS[abs(k) - 1]
            out.append(ch if k > 0 else ch.upper())
        return "".join(out)


IDENTITY = GroupElement(())


def multiply(g, h):
    if not g.letters:
        return h
    if not h.letters:
        return g
    left = list(g.letters)
    right = h.letters
    i = 0
    while left and i < len(right) and left[-1] == -right[i]:
        left.pop()
        i += 1
    return GroupElement(tuple(left) + right[i:])


def inverse(g):
    return GroupElement(tuple(-k for k in reversed(g.letters)))


def power(g, n):
    if n < 0:
        g, n = inverse(g), -n
    # g^n of a reduced word may still cancel at the seams, so reduce once
    return GroupElement(g.letters * n)


def word_length(g):
    return len(g.letters)


def a_power(n, gen=DEFAULT_GENERATOR):
    if n >= 0:
        return GroupElement((gen,) * n)
    return GroupElement((-gen,) * (-n))


def parse_word(text, rank=None):
    """
    Parse a group element.

    Accepts the token form ("a1A2", "e") and, for words without digits, the
    shorthand form over a..d ("bA" = b a^-1). "e" alone is the identity.

    Args:
        text (str): Serialized word.
        rank (int): When given, generator indices must lie in 1..rank.

    Returns:
        GroupElement: the reduced element.
    """
    if not isinstance(text, str):
        raise ValidationError(f"word must be a string, got {text!r}", key="error_word_syntax")
    text = text.strip()
    if text in ("", "e"):
        return IDENTITY

    letters = []
    if any(ch.isdigit() for ch in text):
        position = 0
        for match in _TOKEN_RE.finditer(text):
            if match.start() != position:
                break
            index = int(match.group(2))
            if index == 0:
                raise ValidationError(f"generator index 0 in {text!r}", key="error_word_syntax")
            letters.append(index if match.group(1) == "a" else -index)
            position = match.end()
        if position != len(text):
            raise ValidationError(f"malformed word {text!r}", key="error_word_syntax")
    else:
        for ch in text:
            lower = ch.lower()
            if lower not in SHORTHAND_LETTERS:
                raise ValidationError(f"unknown letter {ch!r} in {text!r}", key="error_word_syntax")
            index = SHORTHAND_LETTERS.index(lower) + 1
            letters.append(index if ch == lower else -index)

    if rank is not None:
        for k in letters:
            if abs(k) > rank:
                raise ValidationError(f"generator {abs(k)} exceeds rank {rank} in {text!r}",
                                      key="error_generator_range")
    return GroupElement(letters)


def alphabet(rank):
    """Letters in tie-break order: a, a^-1, b, b^-1, ..."""
    out = []
    for k in range(1, rank + 1):
        out.extend((k, -k))
    return tuple(out)


def ball_cardinality(rank, radius):
    if radius < 0:
        return 0
    if rank == 1:
        return 2 * radius + 1
    q = 2 * rank - 1
    return 1 + 2 * rank * ((q ** radius - 1) // (q - 1))


def sphere_cardinality(rank, radius):
    if radius == 0:
        return 1
    if rank == 1:
        return 2
    return 2 * rank * (2 * rank - 1) ** (radius - 1)


def wa_ball_cardinality(rank, radius):
    """|B(r) ∩ W_a|."""
    if radius < 0:
        return 0
    if rank == 1:
        return radius + 1
    q = 2 * rank - 1
    return 1 + (q ** radius - 1) // (q - 1)


def complement_ball_cardinality(rank, radius):
    return ball_cardinality(rank, radius) - wa_ball_cardinality(rank, radius)


def _check_rank(rank):
    if not isinstance(rank, int) or rank < 1:
        raise ValidationError(f"rank must be a positive integer, got {rank!r}")


def _next_sphere(sphere, letters):
    out = []
    for word in sphere:
        last = word.letters[-1] if word.letters else 0
        for letter in letters:
            if letter != -last:
                out.append(GroupElement(word.letters + (letter,)))
    return out


def _build_ball(rank, radius):
    letters = alphabet(rank)
    sphere = [IDENTITY]
    elements = [IDENTITY]
    for _ in range(radius):
        sphere = _next_sphere(sphere, letters)
        elements.extend(sphere)
    return tuple(elements)


@lru_cache(maxsize=16)
def _cached_ball(rank, radius):
    return _build_ball(rank, radius)


def _ball_elements(rank, radius):
    if ball_cardinality(rank, radius) > BALL_CACHE_LIMIT:
        return _build_ball(rank, radius)
    return _cached_ball(rank, radius)


class Ball:
    """B(r) in breadth-first, (length, lex) order."""

    def __init__(self, rank, radius, elements):
        self.rank = rank
        self.radius = radius
        self.elements = elements

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def __contains__(self, g):
        return word_length(g) <= self.radius and all(abs(k) <= self.rank for k in g.letters)


def ball(rank, radius, cap=DEFAULT_CARDINALITY_CAP):
    _check_rank(rank)
    if radius < 0:
        raise ValidationError(f"radius must be >= 0, got {radius}")
    predicted = ball_cardinality(rank, radius)
    if predicted > cap:
        raise ResourceCapError(predicted, cap, what=f"ball B({radius}) in F_{rank}")
    logging.debug(f"Enumerating B({radius}) in F_{rank}: {predicted} elements")
    return Ball(rank, radius, _ball_elements(rank, radius))


def in_Wa(g, gen=DEFAULT_GENERATOR):
    return not g.letters or g.letters[-1] == gen


def in_a_line(g, gen=DEFAULT_GENERATOR):
    """True iff g = a^k for some integer k."""
    return all(k == gen for k in g.letters) or all(k == -gen for k in g.letters)


def a_exponent(g, gen=DEFAULT_GENERATOR):
    if not in_a_line(g, gen):
        raise ValidationError(f"{g} is not a power of the generator")
    if not g.letters:
        return 0
    return len(g.letters) if g.letters[0] == gen else -len(g.letters)


def _iter_spheres(rank):
    letters = alphabet(rank)
    sphere = [IDENTITY]
    while True:
        yield sphere
        sphere = _next_sphere(sphere, letters)


def iter_Wa(rank, gen=DEFAULT_GENERATOR):
    """All of W_a in (length, lex) order, lazily."""
    _check_rank(rank)
    yield IDENTITY
    for sphere in _iter_spheres(rank):
        # words ending in a of length k+1 are (prefix of length k not ending in a^-1) + a;
        # the prefix sphere is sorted, so the extensions are too
        for word in sphere:
            if word.letters and word.letters[-1] == -gen:
                continue
            yield GroupElement(word.letters + (gen,))


def iter_complement(rank, gen=DEFAULT_GENERATOR):
    """F_l minus W_a in (length, lex) order, lazily."""
    _check_rank(rank)
    for sphere in _iter_spheres(rank):
        for word in sphere:
            if word.letters and word.letters[-1] != gen:
                yield word


def _take(iterator, count, cap, what):
    if count < 0:
        raise ValidationError(f"count must be >= 0, got {count}")
    if count > cap:
        raise ResourceCapError(count, cap, what=what)
    out = []
    for g in iterator:
        if len(out) == count:
            break
        out.append(g)
    return out


def enumerate_Wa(rank, count, gen=DEFAULT_GENERATOR, cap=DEFAULT_CARDINALITY_CAP):
    if count < 1:
        raise ValidationError(f"count must be >= 1, got {count}")
    return _take(iter_Wa(rank, gen), count, cap, "W_a enumeration")


def enumerate_complement(rank, count, gen=DEFAULT_GENERATOR, cap=DEFAULT_CARDINALITY_CAP):
    return _take(iter_complement(rank, gen), count, cap, "complement enumeration")


def first_bound_violation(sequence, rank, factor=1):
    """1-based index k of the first g_k with k > factor*(2l-1)^(|g_k|+1), else None."""
    q = 2 * rank - 1
    for k, g in enumerate(sequence, start=1):
        if k > factor * q ** (len(g.letters) + 1):
            return k
    return None


def enumeration_bound_violations(rank, count, gen=DEFAULT_GENERATOR, cap=DEFAULT_CARDINALITY_CAP):
    """
    First violations of k <= (2l-1)^(|g_k|+1) over the first `count` elements
    of W_a and of k <= 3(2l-1)^(|g_k|+1) over its complement, as (wa, complement).
    """
    if rank < 2:
        raise ValidationError(f"enumeration bound needs rank >= 2, got {rank}")
    wa = first_bound_violation(enumerate_Wa(rank, count, gen, cap), rank, 1)
    complement = first_bound_violation(enumerate_complement(rank, count, gen, cap), rank, 3)
    return wa, complement


def check_enumeration_bound(rank, count, gen=DEFAULT_GENERATOR, cap=DEFAULT_CARDINALITY_CAP):
    wa, complement = enumeration_bound_violations(rank, count, gen, cap)
    ok_wa = wa is None
    ok_complement = complement is None
    logging.info(f"Enumeration bounds for F_{rank}, n={count}: W_a={ok_wa}, complement={ok_complement}")
    return ok_wa and ok_complement
