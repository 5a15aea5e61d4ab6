"""
The information cocycle J(A_{p,a}, .) of the past algebra over W_a.

Shift powers follow T(x) = a^-1 x, so (T^n x)_h = x_{a^n h} and "J(a^n)"
below is the cocycle of T^n:

    J(a^n)(x)  = sum_{i=0}^{n-1} -ln P_{x_{a^i}}      (n >= 0)
    J(a^-n)(x) = sum_{i=1}^{n}    ln P_{x_{a^-i}}

A composite U with (Ux)_h = x_{sigma(h)} has

    J(U)(x) = sum_{h in W, sigma(h) not in W} ln P_{x_sigma(h)}
            - sum_{h not in W, sigma(h) in W} ln P_{x_sigma(h)}

which is what `cocycle_general` evaluates.
"""
import logging
import math

import numpy as np

from .automorphism import LocalAutomorphism, act, in_Lpa
from .constants import DEFAULT_CARDINALITY_CAP, DEFAULT_GENERATOR
from .errors import ValidationError
from .free_group import a_exponent, a_power, ball, in_a_line, in_Wa, multiply
from .parallel import MomentSums, SeedRangePool, merge_in_order
from .prob import Configuration, conditional_cylinder_measure, sample_symbols, shift


class _InfiniteInformation:
    """-ln 0. Deliberately has no arithmetic."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITE_INFORMATION"

    def to_json(self):
        return "infinite"


INFINITE_INFORMATION = _InfiniteInformation()


class CocycleContext:
    def __init__(self, vector, gen=DEFAULT_GENERATOR, rank=2):
        if not 1 <= gen <= rank:
            raise ValidationError(f"generator {gen} outside 1..{rank}", key="error_generator_range")
        self.vector = vector
        self.gen = gen
        self.rank = rank

    def log_p(self, symbol):
        return float(self.vector.log_weights[symbol - 1])

    def a(self, n):
        return a_power(n, self.gen)

    def in_W(self, g):
        return in_Wa(g, self.gen)

    def power_shift(self, x, n):
        """T^n x."""
        return shift(x, self.a(-n))


def J_shift(ctx, x, n):
    if n >= 0:
        return -math.fsum(ctx.log_p(x.value_at(ctx.a(i))) for i in range(n))
    return math.fsum(ctx.log_p(x.value_at(ctx.a(-i))) for i in range(1, -n + 1))


def _moved_log_ratio(ctx, x, V):
    return math.fsum(
        ctx.log_p(x.value_at(V.preimage(g))) - ctx.log_p(x.value_at(g))
        for g in V.perm if ctx.in_W(g)
    )


def J_local(ctx, x, V):
    """ln prod_{g in W_a} P_{(Vx)_g} / P_{x_g} for V in L_{p,a}."""
    if not in_Lpa(V, ctx.gen):
        raise ValidationError(f"{V!r} is not in L_(p,a)", key="error_not_in_lpa")
    return _moved_log_ratio(ctx, x, V)


class Transformation:
    """
    f_1 ∘ f_2 ∘ ... ∘ f_r with each factor an int n (meaning T^n) or a
    LocalAutomorphism; f_r acts first.
    """

    def __init__(self, factors):
        self.factors = []
        for f in factors:
            if isinstance(f, Transformation):
                self.factors.extend(f.factors)
            elif isinstance(f, (int, np.integer)) and not isinstance(f, bool):
                self.factors.append(int(f))
            elif isinstance(f, LocalAutomorphism):
                self.factors.append(f)
            else:
                raise ValidationError(f"unsupported factor {f!r}")

    @classmethod
    def of(cls, item):
        return item if isinstance(item, Transformation) else cls([item])

    def __matmul__(self, other):
        return Transformation(self.factors + Transformation.of(other).factors)

    def __repr__(self):
        return " ∘ ".join(f"T^{f}" if isinstance(f, int) else repr(f) for f in self.factors) or "id"

    def apply(self, ctx, x):
        for f in reversed(self.factors):
            x = ctx.power_shift(x, f) if isinstance(f, int) else act(f, x)
        return x


def _sigma(ctx, f, h):
    if isinstance(f, int):
        return multiply(ctx.a(f), h)
    return f.preimage(h)


def _sigma_inv(ctx, f, h):
    if isinstance(f, int):
        return multiply(ctx.a(-f), h)
    return f.image(h)


def _membership_changes(ctx, f):
    """A finite set containing every h with h in W xor sigma_f(h) in W."""
    if isinstance(f, int):
        if f >= 0:
            return [ctx.a(-j) for j in range(1, f + 1)]
        return [ctx.a(j) for j in range(0, -f)]
    return list(f.perm)


def _candidates(ctx, U):
    # sigma_U = sigma_r ∘ ... ∘ sigma_1: factor k sees sigma_{k-1}...sigma_1(h)
    candidates = set()
    for k, f in enumerate(U.factors):
        for d in _membership_changes(ctx, f):
            h = d
            for earlier in reversed(U.factors[:k]):
                h = _sigma_inv(ctx, earlier, h)
            candidates.add(h)
    return candidates


def coordinate_map(ctx, U, h):
    for f in U.factors:
        h = _sigma(ctx, f, h)
    return h


def cocycle_general(ctx, U, x):
    """J(U)(x) from the W_a difference sets of the coordinate map of U."""
    U = Transformation.of(U)
    gained = []
    lost = []
    for h in _candidates(ctx, U):
        image = coordinate_map(ctx, U, h)
        h_in, image_in = ctx.in_W(h), ctx.in_W(image)
        if h_in and not image_in:
            gained.append(ctx.log_p(x.value_at(image)))
        elif image_in and not h_in:
            lost.append(ctx.log_p(x.value_at(image)))
    return math.fsum(gained) - math.fsum(lost)


def cocycle_closed(ctx, U, x):
    """J(U)(x) from the closed forms, chained factor by factor."""
    U = Transformation.of(U)
    total = []
    for f in reversed(U.factors):
        if isinstance(f, int):
            total.append(J_shift(ctx, x, f))
            x = ctx.power_shift(x, f)
        else:
            total.append(J_local(ctx, x, f))
            x = act(f, x)
    return math.fsum(total)


def check_cocycle_identity(ctx, V, W, points):
    """
    max |J(VW)(x) - J(V)(Wx) - J(W)(x)| over `points`.

    The composite side is evaluated directly from its coordinate map; the
    split side uses the closed forms.
    """
    V = Transformation.of(V)
    W = Transformation.of(W)
    VW = V @ W
    worst = 0.0
    for x in points:
        lhs = cocycle_general(ctx, VW, x)
        rhs = cocycle_closed(ctx, V, W.apply(ctx, x)) + cocycle_closed(ctx, W, x)
        worst = max(worst, abs(lhs - rhs))
    return worst


def minimal_star_power(ctx, V):
    """Smallest n >= 1 with a^-n (moved a-line coordinates) off W_a."""
    exponents = [a_exponent(g, ctx.gen) for g in V.perm if in_a_line(g, ctx.gen)]
    return max([0] + exponents) + 1


def J_star_decomposition(ctx, x, V, n=None):
    """-J(a^n)(Vx) - J(a^-n)(T^n x), valid once n >= minimal_star_power(V)."""
    needed = minimal_star_power(ctx, V)
    if n is None:
        n = needed
    if n < needed:
        raise ValidationError(f"n={n} too small, need n >= {needed}", key="error_precondition")
    return -J_shift(ctx, act(V, x), n) - J_shift(ctx, ctx.power_shift(x, n), -n)


def conditional_information(ctx, given, of):
    measure = conditional_cylinder_measure(ctx.vector, given, of)
    if measure == 0:
        return INFINITE_INFORMATION
    return -math.log(measure)


def _translated_past(ctx, window, k):
    """a^k W ∩ window."""
    back = ctx.a(-k)
    return [g for g in window if ctx.in_W(multiply(back, g))]


def J_shift_via_atoms(ctx, x, n, radius=None, cap=DEFAULT_CARDINALITY_CAP):
    """
    J(a^n)(x) as a telescoping sum of conditional informations of the nested
    atoms a^k W ⊇ a^(k+1) W, observed through B(radius).
    """
    radius = abs(n) if radius is None else radius
    if radius < abs(n):
        raise ValidationError(f"radius {radius} cannot see a^{n}")
    window = ball(ctx.rank, radius, cap).elements
    patterns = {}

    def atom(k):
        if k not in patterns:
            patterns[k] = x.pattern_on(_translated_past(ctx, window, k))
        return patterns[k]

    terms = []
    if n >= 0:
        for k in range(n):
            terms.append(conditional_information(ctx, atom(k + 1), atom(k)))
        return math.fsum(terms)
    for k in range(1, -n + 1):
        terms.append(conditional_information(ctx, atom(-k + 1), atom(-k)))
    return -math.fsum(terms)


def _entropy_chunk(chunk_start, chunk_count, vector, n, gen):
    seeds = np.arange(chunk_start, chunk_start + chunk_count, dtype=np.int64)
    total = np.zeros(chunk_count, dtype=np.float64)
    for i in range(n):
        total -= vector.log_weights[sample_symbols(vector, seeds, a_power(i, gen)) - 1]
    return MomentSums.of(total / n)


def entropy_rate_estimate(ctx, n, samples, seed=0, workers=1):
    """(mean of J(a^n)/n over seeded configurations, its standard error)."""
    if n < 1 or samples < 1:
        raise ValidationError("n and samples must be >= 1")
    parts = SeedRangePool(workers).run(_entropy_chunk, seed, samples, ctx.vector, n, ctx.gen)
    moments = merge_in_order(parts)
    logging.info(f"Entropy rate estimate over {samples} samples")
    return moments.mean(), moments.stderr()


def random_lpa_swap(ctx, rng, max_power=5):
    """A transposition of two coordinates allowed in L_(p,a)."""
    choices = []
    for k in range(-max_power, max_power + 1):
        choices.append(ctx.a(k))
    for g in ball(ctx.rank, 2).elements:
        if not ctx.in_W(g):
            choices.append(g)
    choices = list(dict.fromkeys(choices))
    i, j = rng.choice(len(choices), size=2, replace=False)
    return LocalAutomorphism.swap(choices[int(i)], choices[int(j)])


def random_generator_word(ctx, rng, length, max_power=20, swap_power=5):
    """Random composite of shift powers and L_(p,a) swaps."""
    factors = []
    for _ in range(length):
        if rng.random() < 0.5:
            factors.append(int(rng.integers(-max_power, max_power + 1)))
        else:
            factors.append(random_lpa_swap(ctx, rng, swap_power))
    return Transformation(factors)


def configurations(vector, seeds):
    return [Configuration(int(s), vector) for s in seeds]
