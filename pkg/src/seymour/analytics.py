"""Closed-form quantities for Seymour-vertex counts.

Binomial tails are summed term by term with mpmath at 50 significant digits;
no normal approximation is used anywhere.  Exponentially small defect terms
are carried as natural logs next to their linear values.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from math import comb

import mpmath

from .models import parse_probability

#: even-n variance constant 1/4 - 1/(2 pi)
C1 = 0.25 - 1 / (2 * math.pi)
#: odd-n variance constant, 1/4 - 1/(2 pi) + 1/sqrt(2 pi)
C2 = C1 + 1 / math.sqrt(2 * math.pi)

_DPS = 50

BISECTION_TOL = 1e-13
BISECTION_MAX_ITER = 200


def _mp(p):
    if isinstance(p, Fraction):
        return mpmath.mpf(p.numerator) / p.denominator
    return mpmath.mpf(p)


def _mp_binom_tail_le(m, p, k):
    if p == 0:
        return mpmath.mpf(1)
    if p == 1:
        return mpmath.mpf(1 if k >= m else 0)
    q = 1 - p
    ratio = p / q
    term = q**m
    total = term
    for i in range(k):
        term = term * (m - i) / (i + 1) * ratio
        total += term
    return total


def binom_tail_le(m: int, p, k: int) -> float:
    """P(Bin(m, p) <= k)."""
    if m < 0 or not 0 <= k <= m:
        raise ValueError(f"need 0 <= k <= m, got m={m}, k={k}")
    if isinstance(p, str):
        p = parse_probability(p)
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    with mpmath.workdps(_DPS):
        return float(_mp_binom_tail_le(m, _mp(p), k))


def central_binom_pmf(m: int) -> float:
    """P(Bin(m, 1/2) = floor(m/2)), exact up to the final rounding."""
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    return comb(m, m // 2) / 2**m


def central_binom_stirling(m: int) -> float:
    """Stirling approximation sqrt(2 / (pi m)) to :func:`central_binom_pmf`."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return math.sqrt(2 / (math.pi * m))


def _half_tail(m, k):
    """Exact P(Bin(m, 1/2) <= k) as a Fraction.

    Sums outward from the centre using symmetry, so the cost grows with
    |k - m/2| rather than with k.
    """
    if k < 0:
        return Fraction(0)
    if k >= m:
        return Fraction(1)
    hi = m // 2 + 1 if m % 2 == 0 else (m + 1) // 2  # first index above the centre
    if k < hi - 1:
        return 1 - _half_tail(m, m - k - 1)
    # P(<= hi - 1) is 1/2 (odd m) or 1/2 + pmf(m/2)/2 (even m)
    twice = 2**m if m % 2 else 2**m + comb(m, m // 2)
    total = Fraction(twice, 2 ** (m + 1))
    if k >= hi:
        c = comb(m, hi)
        acc = 0
        for i in range(hi, k + 1):
            acc += c
            c = c * (m - i) // (i + 1)
        total += Fraction(acc, 2**m)
    return total


@dataclass(frozen=True)
class BoundsReport:
    n: int
    parity: str
    tail_probability: float
    e_s_lower: float
    e_s_upper: float
    e_s_lower_raw: float
    e_s_upper_raw: float
    lower_clamped: bool
    upper_clamped: bool
    var_asymptote: float
    c_constant: float
    diameter_defect: float
    log_diameter_defect: float

    def to_dict(self):
        return asdict(self)


def tournament_expectation_bounds(n: int) -> BoundsReport:
    """Sandwich bounds on E|S| for a uniform random tournament on n vertices.

    Both bounds are ``n * P(Bin(n-1, 1/2) <= (n-1)/2)`` shifted by the
    distance defect ``n(n-1)/2 * (3/4)^(n-2)``, then clamped to [0, n].
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    tail = _half_tail(n - 1, (n - 1) // 2)
    if n == 1:
        log_defect = -math.inf
        defect = 0.0
    else:
        log_defect = math.log(n * (n - 1) / 2) + (n - 2) * math.log(0.75)
        # direct product is exact for small n and underflows cleanly to 0.0
        defect = n * (n - 1) / 2 * 0.75 ** (n - 2)
    main = float(n * tail)
    lo_raw, hi_raw = main - defect, main + defect
    lo, hi = max(lo_raw, 0.0), min(hi_raw, float(n))
    c = C1 if n % 2 == 0 else C2
    return BoundsReport(
        n=n,
        parity="even" if n % 2 == 0 else "odd",
        tail_probability=float(tail),
        e_s_lower=lo,
        e_s_upper=hi,
        e_s_lower_raw=lo_raw,
        e_s_upper_raw=hi_raw,
        lower_clamped=lo != lo_raw,
        upper_clamped=hi != hi_raw,
        var_asymptote=c * n,
        c_constant=c,
        diameter_defect=defect,
        log_diameter_defect=log_defect,
    )


def tournament_variance_asymptote(n: int) -> float:
    """Linear variance asymptote: C1*n for even n, C2*n for odd n."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return (C1 if n % 2 == 0 else C2) * n


def degree_criterion_moments(n: int) -> tuple[Fraction, Fraction]:
    """Exact mean and variance of #{v : outdeg(v) <= indeg(v)} in a random tournament.

    This count equals |S| whenever the tournament has diameter at most 2, so
    it tracks E|S| and Var|S| up to exponentially small corrections.  Uses
    the pairwise decomposition Var = n q(1-q) + n(n-1)(P(X1 X2) - q^2),
    where conditioning on the arc between vertices 1 and 2 gives
    P(X1 X2) = P(Bin(n-2,1/2) <= h-1) * P(Bin(n-2,1/2) <= h), h = floor((n-1)/2).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    h = (n - 1) // 2
    q = _half_tail(n - 1, h)
    if n == 1:
        return q, Fraction(0)
    both = _half_tail(n - 2, h - 1) * _half_tail(n - 2, h)
    return n * q, n * q * (1 - q) + n * (n - 1) * (both - q * q)


@dataclass(frozen=True)
class PiTerms:
    n: int
    pi1: float
    pi2: float
    difference: float
    pi1_squared: float
    difference_asymptotic: float
    pi1_squared_asymptotic: float


def variance_pi_terms(n: int) -> PiTerms:
    """pi1 = P(Bin(n-1,1/2) = (n-1)/2) and pi2 = P(Bin(n-2,1/2) = (n-1)/2), n odd.

    The difference is computed exactly.  By Pascal's rule it is identically
    zero for odd n, whereas the Stirling estimate sqrt(2/pi)/n reported in
    ``difference_asymptotic`` is not.
    """
    if n < 3 or n % 2 == 0:
        raise ValueError(f"n must be odd and >= 3, got {n}")
    k = (n - 1) // 2
    pi1 = Fraction(comb(n - 1, k), 2 ** (n - 1))
    pi2 = Fraction(comb(n - 2, k), 2 ** (n - 2))
    return PiTerms(
        n=n,
        pi1=float(pi1),
        pi2=float(pi2),
        difference=float(pi2 - pi1),
        pi1_squared=float(pi1 * pi1),
        difference_asymptotic=math.sqrt(2 / math.pi) / n,
        pi1_squared_asymptotic=2 / (math.pi * n),
    )


def p1_upper_bound(n: int) -> float:
    """Product-of-tails bound on P(1, 2 in S; 1 -> 2; A1 and A2).

    ``(1/2) P(Bin(n-2,1/2) <= floor((n-1)/2) - 1) P(Bin(n-2,1/2) <= floor((n-1)/2))``.
    The remaining pieces of P(1, 2 in S; 1 -> 2), where vertex 1 or 2 has
    eccentricity above 2, are together at most (n/2)(3/4)^(n-2).
    """
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    h = (n - 1) // 2
    return float(Fraction(1, 2) * _half_tail(n - 2, h - 1) * _half_tail(n - 2, h))


def chernoff_upper(mean: float, epsilon: float) -> float:
    """[e^eps / (1+eps)^(1+eps)]^mean, evaluated in log space."""
    if not mean > 0 or not epsilon > 0:
        raise ValueError(f"mean and epsilon must be positive, got {mean}, {epsilon}")
    return math.exp(mean * (epsilon - (1 + epsilon) * math.log1p(epsilon)))


def digraph_expectation_lower(n: int, p, strict: bool = False) -> float:
    """Lower bound on E|S| in D(n, p), clamped at 0.

    ``n P(Bin(n, p) <= (n-1)/2) - n(n-1)(1-p)(1-p^2)^(n-2)``.  With
    ``strict=True`` the tail uses Bin(n-1, p), the exact out-degree law.
    """
    p = parse_probability(p)
    if not 0 < p < Fraction(1, 2):
        raise ValueError(f"p must lie in (0, 1/2), got {p}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    with mpmath.workdps(_DPS):
        pm = _mp(p)
        m = n - 1 if strict else n
        tail = _mp_binom_tail_le(m, pm, min((n - 1) // 2, m))
        defect = n * (n - 1) * (1 - pm) * (1 - pm * pm) ** max(n - 2, 0) if n > 1 else 0
        return float(max(n * tail - defect, mpmath.mpf(0)))


def _window_map(p):
    return 2 * p * math.exp(1 - 2 * p)


@dataclass(frozen=True)
class DigraphWindow:
    n: int
    epsilon: float
    eta: float
    eps_n: float
    p_min: float
    p_max: float
    delta_n: float
    residual: float
    iterations: int
    empty: bool

    def e_s_lower_at(self, p, strict: bool = False) -> float:
        return digraph_expectation_lower(self.n, p, strict=strict)

    def to_dict(self):
        return asdict(self)


def digraph_window(n: int, epsilon: float = 0.1, eta: float = 0.1) -> DigraphWindow:
    """Range of p over which E|S| = n - o(1) is guaranteed in D(n, p).

    ``p_min = sqrt((2+eps) ln n / n)``; ``p_max`` solves
    ``2p e^(1-2p) = 1 - eps_n`` with ``eps_n = (2+eta) ln n / n`` by bisection
    on (0, 1/2), where the left side is strictly increasing.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not epsilon > 0 or not eta > 0:
        raise ValueError("epsilon and eta must be positive")
    log_n = math.log(n)
    p_min = math.sqrt((2 + epsilon) * log_n / n)
    eps_n = (2 + eta) * log_n / n
    target = 1 - eps_n
    if target <= 0:
        return DigraphWindow(n, epsilon, eta, eps_n, p_min, 0.0, 0.5, math.nan, 0, True)
    lo, hi = 0.0, 0.5
    it = 0
    while hi - lo > BISECTION_TOL and it < BISECTION_MAX_ITER:
        mid = 0.5 * (lo + hi)
        if _window_map(mid) < target:
            lo = mid
        else:
            hi = mid
        it += 1
    p_max = 0.5 * (lo + hi)
    residual = abs(_window_map(p_max) - target)
    return DigraphWindow(
        n=n,
        epsilon=epsilon,
        eta=eta,
        eps_n=eps_n,
        p_min=p_min,
        p_max=p_max,
        delta_n=0.5 - p_max,
        residual=residual,
        iterations=it,
        empty=not p_min < p_max,
    )
