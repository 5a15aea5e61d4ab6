"""
Locally finite automorphisms realised as finitely supported coordinate
permutations: (Vx)_g = x_{perm^-1(g)} on the support, identity elsewhere.
"""
import logging
from fractions import Fraction

from .constants import DEFAULT_CARDINALITY_CAP, DEFAULT_GENERATOR
from .errors import ValidationError
from .free_group import (
    ball,
    in_a_line,
    in_Wa,
    iter_complement,
    iter_Wa,
    multiply,
    parse_word,
    word_length,
)
from .prob import ConfigurationView, cylinder_measure
from .util import get_nested_field, load_json_source


class LocalAutomorphism:
    __slots__ = ("perm", "perm_inv")

    def __init__(self, perm=None):
        perm = {g: h for g, h in (perm or {}).items() if g != h}
        if set(perm) != set(perm.values()):
            raise ValidationError("coordinate map is not a bijection of its support", key="error_permutation")
        self.perm = perm
        self.perm_inv = {h: g for g, h in perm.items()}

    def __eq__(self, other):
        return isinstance(other, LocalAutomorphism) and self.perm == other.perm

    def __hash__(self):
        return hash(frozenset(self.perm.items()))

    def __repr__(self):
        return f"LocalAutomorphism({self.to_dict()['swaps']})"

    @property
    def support(self):
        return frozenset(self.perm)

    def image(self, g):
        return self.perm.get(g, g)

    def preimage(self, g):
        return self.perm_inv.get(g, g)

    def fixes(self, g):
        return g not in self.perm

    @classmethod
    def identity(cls):
        return cls()

    @classmethod
    def swap(cls, g, h):
        if g == h:
            return cls()
        return cls({g: h, h: g})

    @classmethod
    def from_swaps(cls, pairs):
        """Transpositions applied in list order (the first listed acts first)."""
        out = cls()
        for g, h in pairs:
            out = compose(cls.swap(g, h), out)
        return out

    def cycles(self):
        seen = set()
        out = []
        for start in sorted(self.perm, key=lambda g: g.sort_key()):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            nxt = self.perm[start]
            while nxt != start:
                cycle.append(nxt)
                seen.add(nxt)
                nxt = self.perm[nxt]
            out.append(cycle)
        return out

    def to_dict(self):
        # (c1 c2 ... ck) = swaps (c1 c2), (c1 c3), ..., (c1 ck) applied in order
        swaps = []
        for cycle in self.cycles():
            swaps.extend([cycle[0].serialize(), c.serialize()] for c in cycle[1:])
        return {"swaps": swaps}

    @classmethod
    def from_dict(cls, document, rank=None):
        pairs = get_nested_field(document, "swaps") if isinstance(document, dict) else None
        if not isinstance(pairs, list):
            raise ValidationError('automorphism JSON must look like {"swaps": [[g, h], ...]}',
                                  key="error_permutation")
        parsed = []
        for pair in pairs:
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise ValidationError(f"bad swap {pair!r}", key="error_permutation")
            parsed.append((parse_word(pair[0], rank), parse_word(pair[1], rank)))
        return cls.from_swaps(parsed)

    @classmethod
    def load(cls, source, rank=None):
        return cls.from_dict(load_json_source(source), rank)


def compose(V, W):
    """V∘W (W acts first): perm_{VW} = perm_V ∘ perm_W."""
    keys = set(V.perm) | set(W.perm)
    return LocalAutomorphism({g: V.image(W.image(g)) for g in keys})


def inverse_automorphism(V):
    return LocalAutomorphism(dict(V.perm_inv))


def conjugate(V, g):
    """The automorphism moving coordinate g h to g perm(h)."""
    return LocalAutomorphism({multiply(g, h): multiply(g, k) for h, k in V.perm.items()})


class PermutedConfiguration(ConfigurationView):
    def __init__(self, base, automorphism):
        self.base = base
        self.automorphism = automorphism
        self.seed = base.seed
        self.vector = base.vector

    def value_at(self, g):
        return self.base.value_at(self.automorphism.preimage(g))


def act(V, x):
    if not V.perm:
        return x
    return PermutedConfiguration(x, V)


def in_Lpa(V, gen=DEFAULT_GENERATOR):
    """V only moves coordinates off W_a or on the a-line."""
    return all(not in_Wa(g, gen) or in_a_line(g, gen) for g in V.perm)


def in_HC_plus(V, radius, gen=DEFAULT_GENERATOR):
    """Fixes B(N) and the complement of W_a pointwise."""
    return all(in_Wa(g, gen) and word_length(g) > radius for g in V.perm)


def in_HC_minus(V, radius, gen=DEFAULT_GENERATOR):
    """Fixes B(N) and W_a pointwise."""
    return all(not in_Wa(g, gen) and word_length(g) > radius for g in V.perm)


def _pair_with_targets(sources, targets, outer):
    perm = {}
    for g in sources:
        for h in targets:
            if word_length(h) > outer:
                break
        else:
            raise ValidationError("ran out of swap targets", key="error_precondition")
        perm[g] = h
        perm[h] = g
    return LocalAutomorphism(perm)


def build_weakmix_pair(rank, inner, outer, gen=DEFAULT_GENERATOR, cap=DEFAULT_CARDINALITY_CAP):
    """
    Swap maps (h_plus, h_minus) for the ring B(outer) minus B(inner).

    h_plus swaps each g in the ring ∩ W_a with the (length, lex)-smallest
    unused element of W_a outside B(outer); h_minus does the same on the
    complement of W_a.
    """
    if outer <= inner:
        raise ValidationError(f"outer radius {outer} must exceed inner radius {inner}", key="error_precondition")
    ring = [g for g in ball(rank, outer, cap) if word_length(g) > inner]
    plus_sources = [g for g in ring if in_Wa(g, gen)]
    minus_sources = [g for g in ring if not in_Wa(g, gen)]
    h_plus = _pair_with_targets(plus_sources, iter_Wa(rank, gen), outer)
    h_minus = _pair_with_targets(minus_sources, iter_complement(rank, gen), outer)
    logging.info(f"Weak-mixing pair for F_{rank}, N={inner}, B'={outer}: "
                 f"{len(plus_sources)} + {len(minus_sources)} swaps")
    return h_plus, h_minus


def transport(pattern, V):
    """Cylinder V[pattern]: the coordinate g of the pattern moves to perm(g)."""
    return pattern.map_keys(V.image)


def product_measure_check(p, h, C_j, C_k, C):
    """
    Exact (mu_C(h C_j ∩ C_k), mu_C(C_j) mu_C(C_k)) as Fractions.

    Requires C_j and C_k to refine C, h to fix the coordinates of C, and h to
    carry the remaining coordinates of C_j away from those of C_k.
    """
    for name, refinement in (("C_j", C_j), ("C_k", C_k)):
        if not all(refinement.get(g) == s for g, s in C):
            raise ValidationError(f"{name} does not refine C", key="error_precondition")
    base_keys = set(C.keys())
    if any(not h.fixes(g) for g in base_keys):
        raise ValidationError("h moves a coordinate of C", key="error_precondition")
    moved = {h.image(g) for g in C_j.keys() if g not in base_keys}
    if moved & set(C_k.keys()):
        raise ValidationError("h C_j overlaps C_k outside C", key="error_precondition")

    mu_c = cylinder_measure(p, C, exact=True)
    image = transport(C_j, h)
    if not image.compatible(C_k):
        lhs = Fraction(0)
    else:
        lhs = cylinder_measure(p, image.merge(C_k), exact=True) / mu_c
    rhs = cylinder_measure(p, C_j, exact=True) * cylinder_measure(p, C_k, exact=True) / (mu_c * mu_c)
    return lhs, rhs


def parse_cycle_notation(text, m):
    """
    Symbol permutation from "(2 3)", "(1 2)(3 4)" or one-line "1,3,2".

    Returns the one-line form: entry i-1 is the image of symbol i.
    """
    text = text.strip()
    image = list(range(1, m + 1))
    if text.startswith("("):
        cycles = []
        for chunk in text.replace(")", ")\n").splitlines():
            chunk = chunk.strip()
            if not chunk:
                continue
            if not (chunk.startswith("(") and chunk.endswith(")")):
                raise ValidationError(f"bad cycle {chunk!r}", key="error_permutation")
            try:
                cycle = [int(s) for s in chunk[1:-1].replace(",", " ").split()]
            except ValueError as e:
                raise ValidationError(f"bad cycle {chunk!r}", key="error_permutation") from e
            for s in cycle:
                if not 1 <= s <= m:
                    raise ValidationError(f"symbol {s} outside 1..{m}", key="error_permutation")
            if len(set(cycle)) != len(cycle):
                raise ValidationError(f"repeated symbol in {chunk!r}", key="error_permutation")
            cycles.append(cycle)
        # cycles act right to left
        for cycle in reversed(cycles):
            step = list(range(1, m + 1))
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                step[a - 1] = b
            image = [step[i - 1] for i in image]
    elif text:
        try:
            image = [int(s) for s in text.replace(",", " ").split()]
        except ValueError as e:
            raise ValidationError(f"bad permutation {text!r}", key="error_permutation") from e
    if sorted(image) != list(range(1, m + 1)):
        raise ValidationError(f"{text!r} is not a permutation of 1..{m}", key="error_permutation")
    return image
