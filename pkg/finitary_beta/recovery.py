"""
Recover a probability vector, up to permutation, from its power sums
p_k = sum_i P_i^k via Newton's identities and a simultaneous root iteration.

Power sums and elementary symmetric polynomials are kept as exact rationals;
the monic polynomial is split into square-free factors exactly, and each
float root is refined by Newton steps evaluated in exact arithmetic.
"""
import logging
import math
from fractions import Fraction

import numpy as np

from .constants import ROOT_FINDER
from .errors import InconsistentPowerSums, NumericFailure, ValidationError
from .prob import ProbVector

_EPS = float(np.finfo(np.float64).eps)


class PowerSums:
    """p_1, ..., p_K."""

    def __init__(self, values):
        values = [v if isinstance(v, Fraction) else _exact(v) for v in values]
        if not values:
            raise ValidationError("no power sums given")
        for k, v in enumerate(values, start=1):
            if v <= 0:
                raise InconsistentPowerSums(f"p_{k} = {float(v)} is not positive")
        for k in range(1, len(values)):
            if values[k] > values[k - 1] * (1 + Fraction(1, 10**12)):
                raise InconsistentPowerSums(f"p_{k + 1} exceeds p_{k}")
        self.values = tuple(values)

    @property
    def K(self):
        return len(self.values)

    def __getitem__(self, k):
        """1-based: ps[k] = p_k."""
        return self.values[k - 1]

    def to_list(self):
        return [float(v) for v in self.values]

    @classmethod
    def from_vector(cls, p, K):
        if K < 1:
            raise ValidationError(f"K must be >= 1, got {K}")
        return cls([sum(f ** k for f in p.fractions) for k in range(1, K + 1)])


def _exact(value):
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ValidationError(f"not a number: {value!r}") from e


def power_sums(p, K):
    return PowerSums.from_vector(p, K)


def newton_to_elementary(ps, m):
    """e_1..e_m with k e_k = sum_{i=1}^{k} (-1)^(i-1) e_(k-i) p_i."""
    if m < 1:
        raise ValidationError(f"m must be >= 1, got {m}")
    if ps.K < m:
        raise ValidationError(f"need at least {m} power sums, got {ps.K}")
    e = [Fraction(1)]
    for k in range(1, m + 1):
        total = Fraction(0)
        for i in range(1, k + 1):
            term = e[k - i] * ps[i]
            total += term if i % 2 == 1 else -term
        e.append(total / k)
    return e[1:]


def characteristic_polynomial(elementary):
    """Coefficients of sum_k (-1)^k e_k x^(m-k), leading first."""
    return [Fraction(1)] + [(-1) ** k * e for k, e in enumerate(elementary, start=1)]


###############
### Exact polynomial helpers
###############

def _trim(poly):
    i = 0
    while i < len(poly) - 1 and poly[i] == 0:
        i += 1
    return poly[i:]


def _degree(poly):
    poly = _trim(poly)
    return len(poly) - 1 if poly[0] != 0 else -1


def _monic(poly):
    poly = _trim(poly)
    return [c / poly[0] for c in poly]


def _derivative(poly):
    d = len(poly) - 1
    out = [c * (d - i) for i, c in enumerate(poly[:-1])]
    return out or [Fraction(0)]


def _sub(a, b):
    width = max(len(a), len(b))
    a = [Fraction(0)] * (width - len(a)) + list(a)
    b = [Fraction(0)] * (width - len(b)) + list(b)
    return _trim([x - y for x, y in zip(a, b)])


def _divmod(a, b):
    a = list(_trim(a))
    b = _trim(b)
    if _degree(b) < 0:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return [Fraction(0)], a
    quotient = []
    while len(a) >= len(b):
        factor = a[0] / b[0]
        quotient.append(factor)
        for i in range(len(b)):
            a[i] -= factor * b[i]
        a.pop(0)
    return quotient, _trim(a) if a else [Fraction(0)]


def _gcd(a, b):
    a, b = _trim(a), _trim(b)
    while _degree(b) >= 0:
        _, r = _divmod(a, b)
        a, b = b, r
    return _monic(a)


def _exact_div(a, b):
    q, _ = _divmod(a, b)
    return q


def square_free_factors(poly):
    """[(factor, multiplicity)] with poly = prod factor^multiplicity (monic input)."""
    factors = []
    derivative = _derivative(poly)
    a = _gcd(poly, derivative)
    b = _exact_div(poly, a)
    c = _exact_div(derivative, a)
    d = _sub(c, _derivative(b))
    multiplicity = 1
    while _degree(b) > 0:
        a = _gcd(b, d) if _degree(d) >= 0 else _monic(b)
        b = _exact_div(b, a)
        c = _exact_div(d, a)
        d = _sub(c, _derivative(b))
        if _degree(a) > 0:
            factors.append((a, multiplicity))
        multiplicity += 1
    return factors


def _horner(poly, x):
    out = Fraction(0)
    for c in poly:
        out = out * x + c
    return out


def _polish(poly, root, steps=12):
    """Newton steps with the residual evaluated exactly at the float iterate."""
    derivative = _derivative(poly)
    for _ in range(steps):
        x = Fraction(root)
        slope = _horner(derivative, x)
        if slope == 0:
            break
        try:
            updated = float(x - _horner(poly, x) / slope)
        except OverflowError:
            break
        if updated == root:
            break
        root = updated
    return root


###############
### Simultaneous iteration
###############

def durand_kerner(coefficients, tol=None, max_iterations=None):
    """
    All roots of a monic polynomial by simultaneous iteration.

    Stops when the step falls below `tol` or when every residual is within
    the rounding bound of Horner evaluation at that point.

    Returns (roots, converged, last_step).
    """
    tol = ROOT_FINDER["TOLERANCE"] if tol is None else tol
    max_iterations = ROOT_FINDER["MAX_ITERATIONS"] if max_iterations is None else max_iterations
    c = np.array([complex(float(x)) for x in coefficients], dtype=np.complex128)
    degree = len(c) - 1
    if degree == 0:
        return np.zeros(0, dtype=np.complex128), True, 0.0
    magnitudes = np.abs(c)
    center = -c[1] / degree
    angles = 2 * np.pi * np.arange(degree) / degree + 0.4
    z = center + 0.5 * np.exp(1j * angles)
    last_step = math.inf
    for _ in range(max_iterations):
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        denominator = np.prod(diff, axis=1)
        if np.any(denominator == 0):
            raise NumericFailure("root iterates collided", key="error_root_finder")
        step = np.polyval(c, z) / denominator
        z = z - step
        last_step = float(np.max(np.abs(step)))
        if last_step <= tol * max(1.0, float(np.max(np.abs(z)))):
            return z, True, last_step
        residual = np.abs(np.polyval(c, z))
        floor = 4 * degree * _EPS * np.polyval(magnitudes, np.abs(z))
        if np.all(residual <= floor):
            return z, True, last_step
    return z, False, last_step


def _brackets_root(poly, x, ulps=8):
    """Exact sign change of poly across x +- a few ulps."""
    center = Fraction(x)
    if _horner(poly, center) == 0:
        return True
    width = Fraction(math.ulp(x)) * ulps
    return _horner(poly, center - width) * _horner(poly, center + width) <= 0


def _cluster_average(values, gap):
    values = sorted(values)
    clusters = [[values[0]]]
    for v in values[1:]:
        if v - clusters[-1][-1] < gap:
            clusters[-1].append(v)
        else:
            clusters.append([v])
    out = []
    for cluster in clusters:
        out.extend([math.fsum(cluster) / len(cluster)] * len(cluster))
    return out


def _roots_of_factor(factor):
    if len(factor) == 2:
        return [complex(float(-factor[1] / factor[0]))]
    roots, converged, last_step = durand_kerner(factor)
    if not converged:
        real = np.sort(roots.real)
        min_gap = float(np.min(np.diff(real))) if real.size > 1 else math.inf
        if min_gap < ROOT_FINDER["CLUSTER_GAP"] and last_step <= ROOT_FINDER["CLUSTER_TOLERANCE"]:
            logging.warning(f"Root iteration accepted at relaxed tolerance (gap {min_gap:.2g}); averaging clusters")
            if np.max(np.abs(roots.imag)) >= ROOT_FINDER["IMAG_TOLERANCE"]:
                return list(roots)
            return [complex(v) for v in _cluster_average(list(roots.real), ROOT_FINDER["CLUSTER_GAP"])]
        raise NumericFailure(f"no convergence after {ROOT_FINDER['MAX_ITERATIONS']} iterations",
                             key="error_root_finder")
    out = [None] * len(roots)
    claimed = set()
    # nearly real iterates first, so a complex pair cannot take a real root's slot
    for i in sorted(range(len(roots)), key=lambda i: abs(roots[i].imag)):
        x = _polish(factor, float(roots[i].real))
        if x not in claimed and _brackets_root(factor, x):
            claimed.add(x)
            out[i] = complex(x)
        else:
            out[i] = complex(roots[i])
    return out


def recover_vector(ps, m):
    """Probability vector (sorted descending) whose first m power sums are ps."""
    if abs(float(ps[1]) - 1.0) > ROOT_FINDER["SUM_TOLERANCE"]:
        raise InconsistentPowerSums(f"p_1 = {float(ps[1])} is not 1")
    elementary = newton_to_elementary(ps, m)
    polynomial = characteristic_polynomial(elementary)

    roots = []
    for factor, multiplicity in square_free_factors(polynomial):
        roots.extend(_roots_of_factor(factor) * multiplicity)

    if any(abs(r.imag) >= ROOT_FINDER["IMAG_TOLERANCE"] for r in roots):
        raise InconsistentPowerSums("polynomial has non-real roots")
    values = [r.real for r in roots]
    if any(v <= 0 for v in values):
        raise InconsistentPowerSums("polynomial has non-positive roots")
    if abs(math.fsum(values) - 1.0) > ROOT_FINDER["SUM_TOLERANCE"]:
        raise InconsistentPowerSums(f"roots sum to {math.fsum(values)}")
    for k in range(m + 1, ps.K + 1):
        implied = math.fsum(v ** k for v in values)
        if abs(implied - float(ps[k])) > ROOT_FINDER["SUM_TOLERANCE"]:
            raise InconsistentPowerSums(f"p_{k} disagrees with the recovered vector")
    return ProbVector(sorted(values, reverse=True))


###############
### Equivalence
###############

def permutation_equivalent(p, q, tol=1e-9):
    if p.m != q.m:
        return False
    a = np.sort(p.weights)
    b = np.sort(q.weights)
    return bool(np.max(np.abs(a - b)) <= tol)


def power_sums_agree(p, q, tol=1e-10):
    K = max(p.m, q.m)
    a = power_sums(p, K).to_list()
    b = power_sums(q, K).to_list()
    return all(abs(x - y) <= tol for x, y in zip(a, b))


def _entropy_label(h, tol=1e-12):
    if abs(h) <= tol:
        return "0"
    k = round(math.exp(h))
    if k >= 2 and abs(h - math.log(k)) <= tol:
        return f"ln {k}"
    return f"{h:.6g}"


def distinguish(p, q, tol=1e-12):
    """
    Entropy comparison plus the first integer t (2..max(m, n), then 0) at
    which beta_p and beta_q differ.
    """
    h_p, h_q = p.entropy(), q.entropy()
    entropy_equal = abs(h_p - h_q) <= tol
    K = max(p.m, q.m)
    witness = None
    for t in list(range(2, K + 1)) + [0]:
        beta_p = sum(f ** t for f in p.fractions)
        beta_q = sum(f ** t for f in q.fractions)
        if beta_p != beta_q:
            witness = (t, float(beta_p), float(beta_q))
            break
    equivalent = witness is None

    if entropy_equal:
        entropy_text = f"entropy equal ({_entropy_label(h_p)})"
    else:
        entropy_text = f"entropy differs ({_entropy_label(h_p)} vs {_entropy_label(h_q)})"
    if witness:
        beta_text = f"beta differs at t={witness[0]}: {witness[1]:.6g} vs {witness[2]:.6g}"
    else:
        beta_text = f"beta agrees at t=0..{K}"
    verdict = "permutation-equivalent" if equivalent else "NOT permutation-equivalent"

    return {
        "entropy_p": h_p,
        "entropy_q": h_q,
        "entropy_equal": entropy_equal,
        "witness_t": witness[0] if witness else None,
        "beta_p": witness[1] if witness else None,
        "beta_q": witness[2] if witness else None,
        "permutation_equivalent": equivalent,
        "summary": f"{entropy_text}, {beta_text} → {verdict}",
    }
