"""
beta_p(t) = sum_i P_i^t: closed form, the limit formula evaluated exactly
and by Monte Carlo, single-coordinate pressure, and the growth rate of the
limit integral restricted to a cylinder D ∩ a^n D.

All integrands are handled in log space.
"""
import itertools
import logging
import math

import numpy as np

from .constants import DEFAULT_CARDINALITY_CAP, DEFAULT_GENERATOR, FINITE_DIFFERENCE_STEP, BetaReading
from .errors import ResourceCapError, ValidationError
from .free_group import a_exponent, a_power, in_a_line
from .parallel import LogMoments, SeedRangePool, merge_in_order
from .prob import Pattern, sample_symbols


def logsumexp(values):
    values = np.asarray(values, dtype=np.float64)
    top = np.max(values)
    if not np.isfinite(top):
        return float(top)
    return float(top + np.log(np.sum(np.exp(values - top))))


def beta_log(p, t):
    """ln sum_i P_i^t."""
    return logsumexp(t * p.log_weights)


def beta_closed(p, t):
    return math.exp(beta_log(p, t))


def beta_fsum(p, t):
    """sum_i P_i^t, correctly rounded and independent of entry order."""
    return math.fsum(float(w) ** t for w in p.weights)


def _coordinate_log_factor(p, s):
    """ln E[P_{x_e}^(-s)] = ln sum_i P_i^(1-s)."""
    return logsumexp(p.log_weights + (-s) * p.log_weights)


def beta_limit_exact(p, t, n):
    """
    n-th root of the integral of exp((1-t) J(a^n)) over mu_p.

    The integrand is prod_{i<n} P_{x_{a^i}}^(t-1) over independent
    coordinates, so the integral factorises into n equal sums.
    """
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    log_integral = math.fsum([_coordinate_log_factor(p, 1 - t)] * n)
    return math.exp(log_integral / n)


def integrand_sum_enumerated(p, t, n, cap=DEFAULT_CARDINALITY_CAP):
    """
    Same integral summed block by block over all m^n symbol strings.

    Returns (integral, n-th root).
    """
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    if p.m ** n > cap:
        raise ResourceCapError(p.m ** n, cap, what=f"enumeration of {p.m}^{n} blocks")
    # block log-mass plus (1 - t) * information = t * sum ln P
    log_terms = np.zeros(1)
    for _ in range(n):
        log_terms = np.add.outer(log_terms, t * p.log_weights).ravel()
    log_integral = logsumexp(log_terms)
    return math.exp(log_integral), math.exp(log_integral / n)


def _beta_mc_chunk(chunk_start, chunk_count, p, t, n, gen):
    seeds = np.arange(chunk_start, chunk_start + chunk_count, dtype=np.int64)
    information = np.zeros(chunk_count, dtype=np.float64)
    for i in range(n):
        information -= p.log_weights[sample_symbols(p, seeds, a_power(i, gen)) - 1]
    return LogMoments.of((1 - t) * information)


def beta_limit_mc(p, t, n, samples, seed=0, workers=1, gen=DEFAULT_GENERATOR):
    """
    Monte Carlo limit formula: (estimate, stderr).

    The mean of exp((1-t) J(a^n)) is accumulated in log space; the standard
    error of its n-th root comes from the delta method.

    For t >= 1 the integrand is bounded by 1 and estimate ± 3 stderr covers
    beta(t) at the nominal rate. For t < 1 it is heavy tailed, the sample
    variance runs low and the same interval under-covers (about 97% at t = -1,
    n = 8, 10^4 samples).
    """
    if n < 1 or samples < 1:
        raise ValidationError("n and samples must be >= 1")
    parts = SeedRangePool(workers).run(_beta_mc_chunk, seed, samples, p, t, n, gen)
    moments = merge_in_order(parts)
    estimate = math.exp(moments.log_mean() / n)
    relative = moments.relative_stderr()
    stderr = estimate * relative / n if samples > 1 else math.nan
    logging.info(f"beta MC t={t} n={n}: {estimate:.6g} ± {stderr:.2g} over {samples} samples")
    return estimate, stderr


def pressure_single_coordinate(p, t):
    """Pressure of -t I_{mu_p} for the shift T: ln sum_i P_i^t."""
    return beta_log(p, t)


def pressure_separated_sets(p, t, n, cap=DEFAULT_CARDINALITY_CAP):
    """
    (1/n) ln of the sum of exp(S_n f) over a maximal (n, eps)-separated set,
    f(x) = t ln P_{x_e}, with one representative per n-block.
    """
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    if p.m ** n > cap:
        raise ResourceCapError(p.m ** n, cap, what=f"separated set of {p.m}^{n} blocks")
    birkhoff = [t * math.fsum(p.log_weights[s - 1] for s in block)
                for block in itertools.product(range(1, p.m + 1), repeat=n)]
    return logsumexp(birkhoff) / n


def _restriction_coordinates(D, n, gen):
    """Fixed coordinates of D ∩ a^n D as exponent -> symbol."""
    fixed = {}
    radius = 0
    for g, s in D:
        if not in_a_line(g, gen):
            raise ValidationError(f"restriction key {g} is not on the a-line", key="error_pattern")
        k = a_exponent(g, gen)
        radius = max(radius, abs(k))
        fixed[k] = s
    if D and n <= 2 * radius:
        raise ValidationError(f"n={n} must exceed 2M={2 * radius}", key="error_horizon")
    shifted = {}
    for k, s in fixed.items():
        if k + n in fixed and fixed[k + n] != s:
            raise ValidationError("D and a^n D contradict each other", key="error_pattern")
        shifted[k + n] = s
    merged = dict(fixed)
    merged.update(shifted)
    return merged


def _reading_setup(t, n, reading):
    reading = BetaReading(reading)
    if reading is BetaReading.LIMIT:
        return 1 - t, range(0, n), t
    return -t, range(-n, 0), 1 + t


def restricted_growth_rate(p, t, D, n, reading=BetaReading.LIMIT, gen=DEFAULT_GENERATOR):
    """
    n-th root of the integral over D ∩ a^n D of prod_{k in window} P_{x_{a^k}}^(-s).

    reading "limit": s = 1 - t, window a^0..a^(n-1), tends to beta(t).
    reading "lemma": s = -t, window a^-n..a^-1, tends to beta(1 + t).
    """
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    D.validate(p.m)
    fixed = _restriction_coordinates(D, n, gen)
    s, window, _ = _reading_setup(t, n, reading)
    window = set(window)
    log_terms = []
    for k, symbol in fixed.items():
        log_p = float(p.log_weights[symbol - 1])
        log_terms.append(log_p)
        if k in window:
            log_terms.append(-s * log_p)
    free = len(window) - sum(1 for k in fixed if k in window)
    log_terms.extend([_coordinate_log_factor(p, s)] * free)
    return math.exp(math.fsum(log_terms) / n)


def restricted_log_gap(p, t, D, n, reading=BetaReading.LIMIT, gen=DEFAULT_GENERATOR):
    """ln(restricted rate) - ln(unrestricted target)."""
    _, _, target_t = _reading_setup(t, n, reading)
    return math.log(restricted_growth_rate(p, t, D, n, reading, gen)) - beta_log(p, target_t)


def a_line_pattern(symbols_by_exponent, gen=DEFAULT_GENERATOR):
    return Pattern({a_power(k, gen): s for k, s in symbols_by_exponent.items()})


def entropy_from_beta(p, step=FINITE_DIFFERENCE_STEP):
    """(-beta'(1) analytically, -beta'(1) by central difference)."""
    analytic = p.entropy()
    numeric = -(beta_closed(p, 1 + step) - beta_closed(p, 1 - step)) / (2 * step)
    return analytic, numeric


class BetaEvaluation:
    def __init__(self, t, closed_form, limit_exact=None, mc=None):
        """
        Args:
            limit_exact: list of (n, value).
            mc: dict with n, estimate, stderr, samples.
        """
        self.t = t
        self.closed_form = closed_form
        self.limit_exact = list(limit_exact or [])
        self.mc = mc

    def to_dict(self):
        out = {"t": self.t, "closed_form": self.closed_form}
        if self.limit_exact:
            out["limit_exact"] = [{"n": n, "value": v} for n, v in self.limit_exact]
        if self.mc is not None:
            out["mc"] = dict(self.mc)
        return out

    def csv_row(self):
        limit = self.limit_exact[-1][1] if self.limit_exact else ""
        mc = self.mc["estimate"] if self.mc else ""
        stderr = self.mc["stderr"] if self.mc else ""
        return [self.t, self.closed_form, limit, mc, stderr]


def beta_sweep(p, ts, limit_n=None, mc_n=None, samples=None, seed=0, workers=1, gen=DEFAULT_GENERATOR):
    rows = []
    for t in ts:
        limit = [(n, beta_limit_exact(p, t, n)) for n in range(1, limit_n + 1)] if limit_n else None
        mc = None
        if mc_n:
            estimate, stderr = beta_limit_mc(p, t, mc_n, samples, seed, workers, gen)
            mc = {"n": mc_n, "estimate": estimate, "stderr": stderr, "samples": samples}
        rows.append(BetaEvaluation(t, beta_closed(p, t), limit, mc))
    return rows
