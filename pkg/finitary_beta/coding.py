"""
Finitary codes phi: X_p -> X_q as equivariant local rules.

A fixed-radius code reads the window h -> x_{g h} for h in B(r) (ball order)
and looks the output up in a table. An adaptive code walks a decision tree
that queries one coordinate per node.
"""
import itertools
import logging
import math
from collections import Counter

import numpy as np

from .automorphism import act, in_HC_minus, in_HC_plus
from .constants import DEFAULT_CARDINALITY_CAP, DEFAULT_GENERATOR, MINIMAL_RADIUS_CAP, CodeKind
from .errors import ResourceCapError, ValidationError
from .free_group import (
    IDENTITY,
    ball,
    ball_cardinality,
    complement_ball_cardinality,
    inverse,
    iter_complement,
    iter_Wa,
    multiply,
    parse_word,
    wa_ball_cardinality,
    word_length,
)
from .parallel import SeedRangePool, merge_in_order
from .prob import Configuration, ConfigurationView, Pattern, sample_symbols, shift, validate_permutation
from .util import get_nested_field, load_json_source


class _UnboundedBelow:
    """sup over an empty index set."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNBOUNDED_BELOW"

    def to_json(self):
        return "unbounded-below"


UNBOUNDED_BELOW = _UnboundedBelow()

_UNSET = object()
_MIXED = object()
_MISSING = object()


###############
### Fixed radius
###############

class FixedRadiusCode:
    kind = CodeKind.FIXED

    def __init__(self, rank, m, n, radius, table, default=None, name="table"):
        if radius < 0:
            raise ValidationError(f"code radius must be >= 0, got {radius}", key="error_code_spec")
        self.rank = rank
        self.m = m
        self.n = n
        self.radius = radius
        self.window_elements = ball(rank, radius).elements
        self.table = dict(table)
        self.default = default
        self.name = name
        size = len(self.window_elements)
        for window, symbol in self.table.items():
            if len(window) != size or not all(1 <= s <= m for s in window):
                raise ValidationError(f"table key {window} is not a window over B({radius})",
                                      key="error_code_spec")
            if not 1 <= symbol <= n:
                raise ValidationError(f"table output {symbol} outside 1..{n}", key="error_code_spec")
        if default is not None and not 1 <= default <= n:
            raise ValidationError(f"default {default} outside 1..{n}", key="error_code_spec")
        self._determination = None

    @property
    def max_radius(self):
        return self.radius

    def __repr__(self):
        return f"FixedRadiusCode({self.name}, rank={self.rank}, r={self.radius}, {self.m}->{self.n})"

    def __getstate__(self):
        state = dict(self.__dict__)
        state["_determination"] = None
        return state

    def evaluate(self, window):
        symbol = self.table.get(tuple(window), self.default)
        if symbol is None:
            raise ValidationError(f"no table entry for window {tuple(window)}", key="error_code_table")
        return symbol

    def _lookup(self, window):
        symbol = self.table.get(window, self.default)
        return _MISSING if symbol is None else symbol

    def window_space_size(self):
        return self.m ** len(self.window_elements)

    def certifies_minimal_radius(self):
        """True when the window space is small enough to search for the minimal radius."""
        return self.window_space_size() <= MINIMAL_RADIUS_CAP

    def _determination_maps(self):
        """For r' < r: prefix over B(r') -> the single output it forces, or _MIXED."""
        if not self.certifies_minimal_radius():
            return None
        if self._determination is not None:
            return self._determination
        sizes = [ball_cardinality(self.rank, r) for r in range(self.radius)]
        maps = [dict() for _ in sizes]
        for window in itertools.product(range(1, self.m + 1), repeat=len(self.window_elements)):
            out = self._lookup(window)
            for size, mapping in zip(sizes, maps):
                key = window[:size]
                previous = mapping.get(key, _UNSET)
                if previous is _UNSET:
                    mapping[key] = out
                elif previous is not _MIXED and previous != out:
                    mapping[key] = _MIXED
        logging.debug(f"Built radius determination maps for {self!r}")
        self._determination = (sizes, maps)
        return self._determination

    def radius_of_window(self, window):
        """
        (radius, minimal) for a point whose B(r) window is `window`.

        Depends only on the code and the window: above MINIMAL_RADIUS_CAP
        windows the declared radius is returned with minimal=False.
        """
        if self.radius == 0:
            return 0, True
        determination = self._determination_maps()
        if determination is None:
            return self.radius, False
        sizes, maps = determination
        window = tuple(window)
        # B(r') is a prefix of the length-sorted window
        for r, (size, mapping) in enumerate(zip(sizes, maps)):
            if mapping[window[:size]] is not _MIXED:
                return r, True
        return self.radius, True

    def to_dict(self):
        return {
            "kind": CodeKind.FIXED.value,
            "rank": self.rank,
            "m": self.m,
            "n": self.n,
            "r": self.radius,
            "table": [
                [{"assign": [[g.serialize(), s] for g, s in zip(self.window_elements, window)]}, symbol]
                for window, symbol in sorted(self.table.items())
            ],
            "default": self.default,
        }

    @classmethod
    def from_function(cls, rank, m, n, radius, fn, cap=DEFAULT_CARDINALITY_CAP, name="function"):
        """Tabulate fn(window tuple) over every window on B(radius)."""
        size = ball_cardinality(rank, radius)
        if m ** size > cap:
            raise ResourceCapError(m ** size, cap, what=f"code table over B({radius})")
        table = {w: fn(w) for w in itertools.product(range(1, m + 1), repeat=size)}
        return cls(rank, m, n, radius, table, name=name)

    @classmethod
    def identity(cls, rank, m):
        return cls(rank, m, m, 0, {(i,): i for i in range(1, m + 1)}, name="identity")

    @classmethod
    def symbol_permutation(cls, rank, perm):
        perm = validate_permutation(perm, len(perm))
        m = len(perm)
        return cls(rank, m, m, 0, {(i,): perm[i - 1] for i in range(1, m + 1)}, name="permutation")

    @classmethod
    def constant(cls, rank, m, symbol, n=None, radius=0):
        n = n if n is not None else max(symbol, m)
        return cls(rank, m, n, radius, {}, default=symbol, name="constant")

    @classmethod
    def majority(cls, rank, m=2):
        """Most frequent symbol on B(1); ties go to the smallest symbol."""
        def rule(window):
            counts = Counter(window)
            return min(counts, key=lambda s: (-counts[s], s))
        return cls.from_function(rank, m, m, 1, rule, name="majority")

    @classmethod
    def parity(cls, rank, radius=1):
        """1 + (sum of the window mod 2) over {1,2}; depends on every coordinate of B(r)."""
        return cls.from_function(rank, 2, 2, radius, lambda w: 1 + sum(w) % 2, name="parity")


###############
### Adaptive
###############

class Leaf:
    __slots__ = ("symbol",)

    def __init__(self, symbol):
        self.symbol = symbol


class Query:
    __slots__ = ("word", "branches", "default")

    def __init__(self, word, branches, default=None):
        self.word = word
        self.branches = dict(branches)
        self.default = default


class AdaptiveCode:
    kind = CodeKind.ADAPTIVE

    def __init__(self, rank, m, n, root, name="tree"):
        self.rank = rank
        self.m = m
        self.n = n
        self.root = root
        self.name = name
        self.max_radius = self._check(root, 0)

    def __repr__(self):
        return f"AdaptiveCode({self.name}, rank={self.rank}, r_max={self.max_radius}, {self.m}->{self.n})"

    def _check(self, node, depth):
        if depth > 10_000:
            raise ValidationError("decision tree too deep", key="error_code_spec")
        if isinstance(node, Leaf):
            if not 1 <= node.symbol <= self.n:
                raise ValidationError(f"leaf {node.symbol} outside 1..{self.n}", key="error_code_spec")
            return 0
        if not isinstance(node, Query):
            raise ValidationError(f"bad tree node {node!r}", key="error_code_spec")
        if any(abs(k) > self.rank for k in node.word.letters):
            raise ValidationError(f"query {node.word} outside F_{self.rank}", key="error_generator_range")
        radius = word_length(node.word)
        for symbol, child in node.branches.items():
            if not 1 <= symbol <= self.m:
                raise ValidationError(f"branch symbol {symbol} outside 1..{self.m}", key="error_code_spec")
            radius = max(radius, self._check(child, depth + 1))
        if node.default is not None:
            radius = max(radius, self._check(node.default, depth + 1))
        return radius

    def walk(self, coordinate):
        """(output, radius) where `coordinate(h)` reads the window."""
        node = self.root
        radius = 0
        while isinstance(node, Query):
            radius = max(radius, word_length(node.word))
            symbol = coordinate(node.word)
            child = node.branches.get(symbol, node.default)
            if child is None:
                raise ValidationError(f"no branch for symbol {symbol} at {node.word}", key="error_code_table")
            node = child
        return node.symbol, radius

    def to_dict(self):
        return {"kind": CodeKind.ADAPTIVE.value, "rank": self.rank, "m": self.m, "n": self.n,
                "tree": _node_to_dict(self.root)}

    @classmethod
    def query_e_then_a(cls, rank=1, gen=DEFAULT_GENERATOR):
        """Query e; on symbol 1 answer 1, otherwise answer x_a."""
        a = parse_word(f"a{gen}")
        root = Query(IDENTITY, {1: Leaf(1), 2: Query(a, {1: Leaf(1), 2: Leaf(2)})})
        return cls(rank, 2, 2, root, name="e-then-a")


def _node_to_dict(node):
    if isinstance(node, Leaf):
        return {"leaf": node.symbol}
    out = {"query": node.word.serialize(),
           "branches": {str(s): _node_to_dict(c) for s, c in sorted(node.branches.items())}}
    if node.default is not None:
        out["default"] = _node_to_dict(node.default)
    return out


def _node_from_dict(document, rank):
    if not isinstance(document, dict):
        raise ValidationError(f"bad tree node {document!r}", key="error_code_spec")
    if "leaf" in document:
        return Leaf(int(document["leaf"]))
    if "query" not in document:
        raise ValidationError("tree node needs 'leaf' or 'query'", key="error_code_spec")
    branches = {int(s): _node_from_dict(c, rank) for s, c in (document.get("branches") or {}).items()}
    default = document.get("default")
    return Query(parse_word(document["query"], rank), branches,
                 _node_from_dict(default, rank) if default is not None else None)


def code_from_dict(document, rank=None, m=None, n=None):
    if not isinstance(document, dict):
        raise ValidationError("code JSON must be an object", key="error_code_spec")
    kind = get_nested_field(document, "kind")
    rank = document.get("rank", rank)
    m = document.get("m", m)
    if rank is None or m is None:
        raise ValidationError("code JSON needs 'rank' and 'm' (or pass --ell and --p)", key="error_code_spec")
    n = document.get("n", n if n is not None else m)
    if kind == CodeKind.FIXED.value:
        radius = int(document.get("r", 0))
        elements = ball(rank, radius).elements
        table = {}
        for entry in document.get("table", []):
            if not isinstance(entry, (list, tuple)) or len(entry) != 2:
                raise ValidationError(f"bad table entry {entry!r}", key="error_code_spec")
            pattern = Pattern.from_dict(entry[0], rank)
            if set(pattern.keys()) != set(elements):
                raise ValidationError(f"table pattern must cover exactly B({radius})", key="error_code_spec")
            table[tuple(pattern[g] for g in elements)] = int(entry[1])
        return FixedRadiusCode(rank, m, n, radius, table, document.get("default"))
    if kind == CodeKind.ADAPTIVE.value:
        return AdaptiveCode(rank, m, n, _node_from_dict(document.get("tree"), rank))
    raise ValidationError(f"unknown code kind {kind!r}", key="error_code_spec")


def load_code(source, rank=None, m=None, n=None):
    return code_from_dict(load_json_source(source), rank, m, n)


###############
### Evaluation
###############

def _window(code, x, g):
    return tuple(x.value_at(multiply(g, h)) for h in code.window_elements)


def apply(code, x, g=IDENTITY):
    """phi(x)_g."""
    if isinstance(code, FixedRadiusCode):
        return code.evaluate(_window(code, x, g))
    symbol, _ = code.walk(lambda h: x.value_at(multiply(g, h)))
    return symbol


def code_radius_checked(code, x):
    """(r_phi(x), minimal). minimal is False when the certifying search was skipped."""
    if isinstance(code, FixedRadiusCode):
        return code.radius_of_window(_window(code, x, IDENTITY))
    _, radius = code.walk(x.value_at)
    return radius, True


def code_radius(code, x):
    return code_radius_checked(code, x)[0]


def v_phi(code, x):
    return ball_cardinality(code.rank, code_radius(code, x))


def _truncated_sup(code, x, horizon, elements, predicted, cap):
    if horizon < 0:
        raise ValidationError(f"horizon must be >= 0, got {horizon}")
    if predicted > cap:
        raise ResourceCapError(predicted, cap, what=f"sup over B({horizon})")
    best = UNBOUNDED_BELOW
    for g in elements:
        length = word_length(g)
        if length > horizon:
            break
        # r_phi <= max_radius, and |g| only grows from here
        if best is not UNBOUNDED_BELOW and code.max_radius - length <= best:
            break
        value = code_radius(code, shift(x, inverse(g))) - length
        if best is UNBOUNDED_BELOW or value > best:
            best = value
    return best


def m_phi_truncated(code, x, horizon, gen=DEFAULT_GENERATOR, cap=DEFAULT_CARDINALITY_CAP):
    """max over g in W_a ∩ B(L) of r_phi(g^-1 x) - |g|."""
    return _truncated_sup(code, x, horizon, iter_Wa(code.rank, gen),
                          wa_ball_cardinality(code.rank, horizon), cap)


def a_phi_truncated(code, x, horizon, gen=DEFAULT_GENERATOR, cap=DEFAULT_CARDINALITY_CAP):
    """Same sup over (F_l minus W_a) ∩ B(L); UNBOUNDED_BELOW when that set is empty."""
    return _truncated_sup(code, x, horizon, iter_complement(code.rank, gen),
                          complement_ball_cardinality(code.rank, horizon), cap)


###############
### Locality of the past and the future
###############

def _locality_part(code, x, moved, bound, sites, sup):
    if sup is not UNBOUNDED_BELOW and sup > bound:
        return None
    mismatches = [g for g in sites if apply(code, moved, g) != apply(code, x, g)]
    return {"sup": sup, "sites": len(sites), "mismatches": mismatches}


def check_past_locality(code, x, V, bound, horizon, gen=DEFAULT_GENERATOR, cap=DEFAULT_CARDINALITY_CAP):
    """
    Compare phi(Vx)_g with phi(x)_g for g in B(horizon).

    The past part applies when m_phi(x) <= bound and V fixes W_a and
    B(bound + 2 * horizon); it compares the sites of W_a. The future part
    is the mirror image with a_phi, H_C^+ and the complement of W_a. For
    g in B(horizon) the window g B(r_phi(g^-1 x)) lies in B(bound + 2 * horizon)
    or on the fixed side, so neither part may report a mismatch.
    """
    if bound < 0:
        raise ValidationError(f"bound must be >= 0, got {bound}")
    fixed_radius = bound + 2 * horizon
    moved = act(V, x)
    past = future = None
    if in_HC_minus(V, fixed_radius, gen):
        sites = list(itertools.takewhile(lambda g: word_length(g) <= horizon, iter_Wa(code.rank, gen)))
        past = _locality_part(code, x, moved, bound, sites,
                              m_phi_truncated(code, x, horizon, gen, cap))
    if in_HC_plus(V, fixed_radius, gen):
        sites = list(itertools.takewhile(lambda g: word_length(g) <= horizon, iter_complement(code.rank, gen)))
        future = _locality_part(code, x, moved, bound, sites,
                                a_phi_truncated(code, x, horizon, gen, cap))
    if past is None and future is None:
        raise ValidationError(f"no locality statement applies: V must fix B({fixed_radius}) and one side of W_a, "
                              f"with the matching sup at most {bound}", key="error_precondition")
    ok = all(not part["mismatches"] for part in (past, future) if part is not None)
    logging.debug(f"Locality check at horizon {horizon}, fixed radius {fixed_radius}: ok={ok}")
    return {"fixed_radius": fixed_radius, "past": past, "future": future, "ok": ok}


###############
### Code length statistics
###############

class CodeStats:
    def __init__(self, mode, samples, v_distribution, m_phi_hist=None, a_phi_hist=None, horizon=None):
        """
        Args:
            mode (str): "exact" or "mc".
            samples (int): Monte Carlo sample count, 0 in exact mode.
            v_distribution (dict): v -> probability (exact) or frequency (mc).
        """
        self.mode = mode
        self.samples = samples
        self.v_distribution = dict(sorted(v_distribution.items()))
        self.v_mean = math.fsum(v * w for v, w in self.v_distribution.items())
        top = max(self.v_distribution) if self.v_distribution else 1
        self.v_tail = {
            n: math.fsum(w for v, w in self.v_distribution.items() if v > n)
            for n in range(1, top)
        }
        self.m_phi_hist = m_phi_hist
        self.a_phi_hist = a_phi_hist
        self.horizon = horizon

    def tail_sum(self):
        return math.fsum(self.v_tail.values())

    def to_dict(self):
        out = {
            "mode": self.mode,
            "samples": self.samples,
            "v_mean": self.v_mean,
            "v_distribution": {str(v): w for v, w in self.v_distribution.items()},
            "v_tail": {str(n): t for n, t in self.v_tail.items()},
        }
        if self.horizon is not None:
            out["horizon"] = self.horizon
            out["m_phi_hist"] = {_hist_key(k): c for k, c in sorted(self.m_phi_hist.items(), key=_hist_order)}
            out["a_phi_hist"] = {_hist_key(k): c for k, c in sorted(self.a_phi_hist.items(), key=_hist_order)}
        return out

    def csv_rows(self):
        return [[n, t] for n, t in self.v_tail.items()]


def _hist_key(k):
    return k.to_json() if k is UNBOUNDED_BELOW else str(k)


def _hist_order(item):
    k = item[0]
    return -math.inf if k is UNBOUNDED_BELOW else k


def _exact_fixed(code, p, cap):
    space = code.window_space_size()
    if space > cap:
        raise ResourceCapError(space, cap, what="exact code-length window space")
    weights = p.weights
    distribution = Counter()
    for window in itertools.product(range(1, code.m + 1), repeat=len(code.window_elements)):
        mass = math.prod(float(weights[s - 1]) for s in window)
        radius, _ = code.radius_of_window(window)
        distribution[ball_cardinality(code.rank, radius)] += mass
    return distribution


def _exact_adaptive(code, p):
    distribution = Counter()

    def descend(node, assigned, mass, radius):
        if isinstance(node, Leaf):
            distribution[ball_cardinality(code.rank, radius)] += mass
            return
        radius = max(radius, word_length(node.word))
        if node.word in assigned:
            options = [(assigned[node.word], 1.0)]
        else:
            options = [(s, float(p.weights[s - 1])) for s in range(1, code.m + 1)]
        for symbol, weight in options:
            child = node.branches.get(symbol, node.default)
            if child is None:
                raise ValidationError(f"no branch for symbol {symbol} at {node.word}", key="error_code_table")
            descend(child, {**assigned, node.word: symbol}, mass * weight, radius)

    descend(code.root, {}, 1.0, 0)
    return distribution


def _code_length_chunk(chunk_start, chunk_count, code, p, horizon, gen):
    """Counts of v, and of m_phi / a_phi when a horizon is given, over one seed chunk."""
    v_counts = Counter()
    m_hist = Counter()
    a_hist = Counter()
    seeds = np.arange(chunk_start, chunk_start + chunk_count, dtype=np.int64)
    if isinstance(code, FixedRadiusCode):
        windows = np.stack([sample_symbols(p, seeds, h) for h in code.window_elements], axis=1)
        for row in windows:
            radius, _ = code.radius_of_window(tuple(int(s) for s in row))
            v_counts[ball_cardinality(code.rank, radius)] += 1
    else:
        for seed in seeds:
            v_counts[v_phi(code, Configuration(int(seed), p))] += 1
    if horizon is not None:
        for seed in seeds:
            x = Configuration(int(seed), p)
            m_hist[m_phi_truncated(code, x, horizon, gen)] += 1
            a_hist[a_phi_truncated(code, x, horizon, gen)] += 1
    return _ChunkCounts(v_counts, m_hist, a_hist)


class _ChunkCounts:
    def __init__(self, v_counts, m_hist, a_hist):
        self.v_counts = v_counts
        self.m_hist = m_hist
        self.a_hist = a_hist

    def merge(self, other):
        return _ChunkCounts(self.v_counts + other.v_counts, self.m_hist + other.m_hist,
                            self.a_hist + other.a_hist)


def expected_code_length(code, p, mode="exact", samples=10_000, seed=0, horizon=None,
                         gen=DEFAULT_GENERATOR, workers=1, cap=DEFAULT_CARDINALITY_CAP):
    """
    E[v_phi] under mu_p with the tail mu(v_phi > n).

    exact: every window weighted by its cylinder measure (fixed codes) or
    every decision path (adaptive codes). mc: `samples` seeded configurations.
    """
    if p.m != code.m:
        raise ValidationError(f"code reads {code.m} symbols, vector has {p.m}")
    if mode == "exact":
        if isinstance(code, FixedRadiusCode):
            distribution = _exact_fixed(code, p, cap)
        else:
            distribution = _exact_adaptive(code, p)
        return CodeStats("exact", 0, distribution)
    if mode != "mc":
        raise ValidationError(f"unknown mode {mode!r}")
    if samples < 1:
        raise ValidationError("samples must be >= 1")
    if horizon is not None:
        predicted = ball_cardinality(code.rank, horizon)
        if predicted > cap:
            raise ResourceCapError(predicted, cap, what=f"sup over B({horizon})")

    pool = SeedRangePool(workers)
    parts = pool.run(_code_length_chunk, seed, samples, code, p, horizon, gen)
    merged = merge_in_order(parts)
    distribution = {v: c / samples for v, c in merged.v_counts.items()}
    if horizon is None:
        return CodeStats("mc", samples, distribution)
    return CodeStats("mc", samples, distribution, dict(merged.m_hist), dict(merged.a_hist), horizon)


###############
### Windows and pushforward
###############

class _PatternPoint(ConfigurationView):
    def __init__(self, pattern):
        self.pattern = pattern

    def value_at(self, g):
        value = self.pattern.get(g)
        if value is None:
            raise ValidationError(f"coordinate {g} outside the search window")
        return value


def invert_on_window(code, target, search_radius, cap=DEFAULT_CARDINALITY_CAP):
    """All source patterns on B(search_radius) that code onto `target`."""
    for g in target.keys():
        if word_length(g) + code.max_radius > search_radius:
            raise ValidationError(f"target coordinate {g} needs B({word_length(g) + code.max_radius})")
    target.validate(code.n)
    elements = ball(code.rank, search_radius, cap).elements
    space = code.m ** len(elements)
    if space > cap:
        raise ResourceCapError(space, cap, what="preimage search")
    preimages = set()
    for symbols in itertools.product(range(1, code.m + 1), repeat=len(elements)):
        candidate = Pattern(zip(elements, symbols))
        point = _PatternPoint(candidate)
        if all(apply(code, point, g) == s for g, s in target):
            preimages.add(candidate)
    return preimages


def _pushforward_chunk(chunk_start, chunk_count, code, p, g):
    seeds = np.arange(chunk_start, chunk_start + chunk_count, dtype=np.int64)
    counts = Counter()
    if isinstance(code, FixedRadiusCode):
        windows = np.stack([sample_symbols(p, seeds, multiply(g, h)) for h in code.window_elements], axis=1)
        for row in windows:
            counts[code.evaluate(tuple(int(s) for s in row))] += 1
    else:
        for seed in seeds:
            counts[apply(code, Configuration(int(seed), p), g)] += 1
    return _Tally(counts)


class _Tally:
    def __init__(self, counts):
        self.counts = counts

    def merge(self, other):
        return _Tally(self.counts + other.counts)


def pushforward_frequencies(code, p, samples, seed=0, g=IDENTITY, workers=1):
    """Empirical law of phi(x)_g, as a length-n array indexed by symbol - 1."""
    parts = SeedRangePool(workers).run(_pushforward_chunk, seed, samples, code, p, g)
    counts = merge_in_order(parts).counts
    return np.array([counts.get(s, 0) for s in range(1, code.n + 1)], dtype=np.float64) / samples


def pushforward_check(code, p, q, samples=100_000, seed=0, workers=1, sigmas=3.0):
    """Compare the pushforward of mu_p under phi with mu_q, symbol by symbol."""
    freqs = pushforward_frequencies(code, p, samples, seed, workers=workers)
    expected = np.asarray(q.weights)
    sd = np.sqrt(expected * (1 - expected) / samples)
    z = np.where(sd > 0, np.abs(freqs - expected) / np.where(sd > 0, sd, 1), 0.0)
    return {
        "samples": samples,
        "frequencies": [float(f) for f in freqs],
        "expected": [float(e) for e in expected],
        "max_z": float(np.max(z)),
        "ok": bool(np.all(z <= sigmas)),
    }


BUILTIN_CODES = ("identity", "permutation", "constant", "majority", "parity", "e-then-a")


def builtin_code(name, rank, m, perm=None, radius=1, symbol=1, gen=DEFAULT_GENERATOR):
    if name == "identity":
        return FixedRadiusCode.identity(rank, m)
    if name == "permutation":
        return FixedRadiusCode.symbol_permutation(rank, perm or list(range(1, m + 1)))
    if name == "constant":
        return FixedRadiusCode.constant(rank, m, symbol)
    if name == "majority":
        return FixedRadiusCode.majority(rank, m)
    if name == "parity":
        return FixedRadiusCode.parity(rank, radius)
    if name == "e-then-a":
        return AdaptiveCode.query_e_then_a(rank, gen)
    raise ValidationError(f"unknown builtin code {name!r}; choose from {', '.join(BUILTIN_CODES)}",
                          key="error_code_spec")
