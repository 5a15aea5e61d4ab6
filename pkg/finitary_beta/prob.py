"""
Probability vectors, cylinder patterns, and lazily sampled points of
X_p = {1..m}^(F_l) under the Bernoulli measure.
"""
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .constants import PROB_SUM_TOLERANCE
from .errors import ValidationError
from .free_group import IDENTITY, GroupElement, inverse, multiply, parse_word
from .keyed_sampler import uniforms
from .util import get_nested_field, load_json_source


def _to_fraction(value):
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValidationError(f"not a probability: {value!r}", key="error_prob_vector")
    try:
        # str() of a float is its shortest decimal form, so 0.3 reads as 3/10
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ValidationError(f"not a probability: {value!r}", key="error_prob_vector") from e


class ProbVector:
    """
    p = [P_1, ..., P_m] with strictly positive entries, normalized on load.

    `fractions` keeps an exact rational copy for identities that must hold
    exactly; `weights` is the float view used everywhere else.
    """

    def __init__(self, weights):
        weights = list(weights)
        if not weights:
            raise ValidationError("probability vector is empty", key="error_prob_vector")
        raw = [_to_fraction(w) for w in weights]
        for w in raw:
            if w <= 0:
                raise ValidationError(f"entry {float(w)} is not strictly positive",
                                      key="error_prob_vector")
        total = sum(raw)
        self.fractions = tuple(w / total for w in raw)
        self._hash = hash(self.fractions)
        self.weights = np.array([float(w) for w in self.fractions], dtype=np.float64)
        self.weights.setflags(write=False)
        if abs(math.fsum(self.weights) - 1.0) > PROB_SUM_TOLERANCE * max(1, len(raw)):
            raise ValidationError("normalization failed", key="error_prob_vector")
        self.log_weights = np.log(self.weights)
        self.log_weights.setflags(write=False)
        cdf = np.cumsum(self.weights)
        cdf[-1] = 1.0
        self.cdf = cdf
        self.cdf.setflags(write=False)

    @property
    def m(self):
        return len(self.fractions)

    def __len__(self):
        return self.m

    def __eq__(self, other):
        return isinstance(other, ProbVector) and self.fractions == other.fractions

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"ProbVector({self.to_list()})"

    def prob(self, symbol):
        self.check_symbol(symbol)
        return float(self.weights[symbol - 1])

    def log_prob(self, symbol):
        self.check_symbol(symbol)
        return float(self.log_weights[symbol - 1])

    def exact(self, symbol):
        self.check_symbol(symbol)
        return self.fractions[symbol - 1]

    def check_symbol(self, symbol):
        if not isinstance(symbol, (int, np.integer)) or not 1 <= symbol <= self.m:
            raise ValidationError(f"symbol {symbol!r} outside 1..{self.m}", key="error_symbol_range")

    def entropy(self):
        return float(-np.sum(self.weights * self.log_weights))

    def permuted(self, perm):
        """q with q[perm[i]] = p[i]; `perm` maps symbol i (1-based) to perm[i-1]."""
        perm = validate_permutation(perm, self.m)
        out = [None] * self.m
        for i, target in enumerate(perm):
            out[target - 1] = self.fractions[i]
        return ProbVector(out)

    def to_list(self):
        return [float(w) for w in self.weights]

    def to_dict(self):
        return {"p": self.to_list()}

    @classmethod
    def from_dict(cls, document):
        weights = get_nested_field(document, "p") if isinstance(document, dict) else document
        if not isinstance(weights, list):
            raise ValidationError('probability vector JSON must look like {"p": [...]}',
                                  key="error_prob_vector")
        return cls(weights)

    @classmethod
    def load(cls, source):
        return cls.from_dict(load_json_source(source))


def validate_permutation(perm, m):
    perm = [int(k) for k in perm]
    if sorted(perm) != list(range(1, m + 1)):
        raise ValidationError(f"{perm} is not a permutation of 1..{m}", key="error_permutation")
    return perm


class Pattern:
    """A finite partial configuration g -> symbol, kept in (length, lex) order."""

    __slots__ = ("_items", "_map", "_hash")

    def __init__(self, assignments=None):
        mapping = {}
        source = assignments.items() if isinstance(assignments, dict) else (assignments or ())
        for g, symbol in source:
            if isinstance(g, str):
                g = parse_word(g)
            if not isinstance(g, GroupElement):
                raise ValidationError(f"pattern key {g!r} is not a group element", key="error_pattern")
            if not isinstance(symbol, (int, np.integer)) or isinstance(symbol, bool) or symbol < 1:
                raise ValidationError(f"pattern symbol {symbol!r} is not a positive int", key="error_pattern")
            if g in mapping and mapping[g] != symbol:
                raise ValidationError(f"conflicting symbols at {g}", key="error_pattern")
            mapping[g] = int(symbol)
        self._items = tuple(sorted(mapping.items(), key=lambda kv: kv[0].sort_key()))
        self._map = mapping
        self._hash = hash(self._items)

    def __len__(self):
        return len(self._items)

    def __iter__(self):
        return iter(self._items)

    def __contains__(self, g):
        return g in self._map

    def __getitem__(self, g):
        return self._map[g]

    def __eq__(self, other):
        return isinstance(other, Pattern) and self._items == other._items

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Pattern({self.to_dict()['assign']})"

    def get(self, g, default=None):
        return self._map.get(g, default)

    def keys(self):
        return [g for g, _ in self._items]

    def items(self):
        return self._items

    def validate(self, m):
        for g, symbol in self._items:
            if symbol > m:
                raise ValidationError(f"symbol {symbol} at {g} outside 1..{m}", key="error_symbol_range")
        return self

    def compatible(self, other):
        small, large = (self, other) if len(self) <= len(other) else (other, self)
        return all(large._map.get(g, s) == s for g, s in small._items)

    def merge(self, other):
        if not self.compatible(other):
            raise ValidationError("patterns disagree on a common coordinate", key="error_pattern")
        merged = dict(self._map)
        merged.update(other._map)
        return Pattern(merged)

    def restrict(self, keys):
        keys = set(keys)
        return Pattern({g: s for g, s in self._items if g in keys})

    def map_keys(self, fn):
        return Pattern({fn(g): s for g, s in self._items})

    def to_dict(self):
        return {"assign": [[g.serialize(), s] for g, s in self._items]}

    @classmethod
    def from_dict(cls, document, rank=None):
        entries = get_nested_field(document, "assign") if isinstance(document, dict) else document
        if not isinstance(entries, list):
            raise ValidationError('pattern JSON must look like {"assign": [[word, symbol], ...]}',
                                  key="error_pattern")
        pairs = []
        for entry in entries:
            if not isinstance(entry, (list, tuple)) or len(entry) != 2:
                raise ValidationError(f"bad pattern entry {entry!r}", key="error_pattern")
            pairs.append((parse_word(entry[0], rank), entry[1]))
        return cls(pairs)

    @classmethod
    def load(cls, source, rank=None):
        return cls.from_dict(load_json_source(source), rank)


EMPTY_PATTERN = Pattern()


def _symbols_from_uniforms(vector, u):
    symbols = np.searchsorted(vector.cdf, u, side="right") + 1
    return np.minimum(symbols, vector.m)


class ConfigurationView:
    """Anything exposing value_at(g); subclasses decide how coordinates are produced."""

    seed = None
    vector = None

    def value_at(self, g):
        raise NotImplementedError

    def window(self, elements):
        return [self.value_at(g) for g in elements]

    def pattern_on(self, elements):
        return Pattern({g: self.value_at(g) for g in elements})


class Configuration(ConfigurationView):
    """
    A point of X_p addressed lazily.

    The visible coordinate h reads the base coordinate offset*h, where the
    base field is the override pattern on top of keyed sampling.
    """

    def __init__(self, seed, vector, overrides=None, offset=IDENTITY):
        self.seed = int(seed)
        self.vector = vector
        self.overrides = (overrides or EMPTY_PATTERN).validate(vector.m)
        self.offset = offset

    def __repr__(self):
        return f"Configuration(seed={self.seed}, offset={self.offset}, overrides={len(self.overrides)})"

    def base_value(self, k):
        forced = self.overrides.get(k)
        if forced is not None:
            return forced
        return sample_symbol(self.vector, self.seed, k)

    def value_at(self, g):
        return self.base_value(multiply(self.offset, g))

    def with_overrides(self, pattern):
        """Force visible coordinates; later forcing wins over earlier."""
        pattern.validate(self.vector.m)
        shifted = {multiply(self.offset, g): s for g, s in pattern}
        merged = dict(self.overrides.items())
        merged.update(shifted)
        return Configuration(self.seed, self.vector, Pattern(merged), self.offset)


class ShiftedConfiguration(ConfigurationView):
    def __init__(self, base, g):
        self.base = base
        self.g = g
        self.g_inv = inverse(g)
        self.seed = base.seed
        self.vector = base.vector

    def value_at(self, h):
        return self.base.value_at(multiply(self.g_inv, h))


def shift(x, g):
    """(g x)_h = x_{g^-1 h}."""
    if g.is_identity():
        return x
    if isinstance(x, Configuration):
        return Configuration(x.seed, x.vector, x.overrides, multiply(x.offset, inverse(g)))
    if isinstance(x, ShiftedConfiguration):
        return ShiftedConfiguration(x.base, multiply(g, x.g))
    return ShiftedConfiguration(x, g)


@lru_cache(maxsize=1 << 16)
def sample_symbol(vector, seed, g):
    u = uniforms(seed, g.serialize())
    return int(_symbols_from_uniforms(vector, u)[0])


def sample_symbols(vector, seeds, g):
    """Symbols at coordinate g for a batch of seeds (unshifted, unforced configurations)."""
    return _symbols_from_uniforms(vector, uniforms(seeds, g.serialize()))


def cylinder_measure(p, c, exact=False):
    c.validate(p.m)
    if exact:
        out = Fraction(1)
        for _, s in c:
            out *= p.fractions[s - 1]
        return out
    return float(math.prod(float(p.weights[s - 1]) for _, s in c))


def conditional_cylinder_measure(p, given, of, exact=False):
    """mu([of] | [given]); 0 when the patterns contradict each other."""
    given.validate(p.m)
    of.validate(p.m)
    if not given.compatible(of):
        return Fraction(0) if exact else 0.0
    free = Pattern([(g, s) for g, s in of if g not in given])
    return cylinder_measure(p, free, exact)
