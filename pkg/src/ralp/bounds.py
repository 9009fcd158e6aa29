"""Analytic word-error-probability bounds for RA codes under LP decoding.

The finite-n union bound counts the n(2q-1)^{g/2} candidate simple windows
of g/2 line edges and multiplies by the probability that one window goes
nonpositive; g is the even-rounded floor(log_q n) - 1.  BSC windows fail via
a binomial tail, AWGN via a gaussian tail, and any MBIOS channel via the
g/2-fold convolution of its LLR distribution conditioned on bit 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

from .channels import LlrDistribution

CSV_HEADER = "q,n,p_or_sigma2,epsilon,g,wep_exact,wep_asymptotic,threshold,vacuous"


@dataclass(frozen=True)
class BoundReport:
    channel: str          # "bsc" | "awgn"
    q: int
    n: int
    g: int                # even analysis girth actually used
    g_raw: int            # floor(log_q n) - 1 before even rounding
    param: float          # p or sigma2
    epsilon: float
    threshold: float      # channel-parameter threshold at this epsilon
    wep_exact: float      # finite-n union bound (not clamped at 1)
    wep_asymptotic: float     # K (log_q n) n^-eps   (or the AWGN analogue)
    constant: float       # K or K~
    n_power: float        # exponent of n in the bound chain; < 0 decays

    @property
    def vacuous(self) -> bool:
        return self.wep_exact >= 1.0

    def csv_row(self) -> str:
        return ",".join(str(v) for v in (
            self.q, self.n, self.param, self.epsilon, self.g,
            self.wep_exact, self.wep_asymptotic, self.threshold,
            int(self.vacuous)))


def _floor_log(n: int, q: int) -> int:
    e = 0
    while q ** (e + 1) <= n:
        e += 1
    return e


def analysis_girth(q: int, n: int) -> tuple[int, int]:
    """(raw, even) girth floor(log_q n) - 1; windows need an even girth,
    so odd values round down (conservative)."""
    raw = _floor_log(n, q) - 1
    even = raw - (raw % 2)
    if even < 2:
        raise ValueError(f"block length n={n} too small for a g/2 window (g={raw})")
    return raw, even


def _logq(x: float, q: int) -> float:
    return math.log(x) / math.log(q)


def bsc_threshold(q: int, epsilon: float) -> float:
    """Largest crossover probability with a decaying bound at exponent epsilon."""
    return q ** (-4.0 * (epsilon + 1.0 + 0.5 * _logq(4.0 * q - 2.0, q)))


def awgn_threshold_sigma2(q: int, epsilon: float) -> float:
    """Largest noise variance with a decaying bound at exponent epsilon."""
    return 1.0 / (4.0 * math.log(q) * (1.0 + epsilon + 0.5 * _logq(2.0 * q - 1.0, q)))


def binomial_tail(m: int, j0: int, p: float) -> float:
    """Pr(Binomial(m, p) >= j0), summed term by term."""
    return math.fsum(math.comb(m, j) * p ** j * (1.0 - p) ** (m - j)
                     for j in range(j0, m + 1))


def gaussian_upper_tail_bound(s: float, x: float) -> float:
    """The tail inequality Pr(N(0,s^2) >= x) <= s/(x sqrt(2 pi)) exp(-x^2/2s^2)."""
    return s / (x * math.sqrt(2.0 * math.pi)) * math.exp(-x * x / (2.0 * s * s))


def _check_even_q(q: int):
    if q < 4 or q % 2:
        raise ValueError(f"bounds require even q >= 4, got {q}")


def bsc_bound(q: int, n: int, p: float, epsilon: float) -> BoundReport:
    """Finite-n union bound and asymptotic form for the BSC.

    Exact part: n (2q-1)^{g/2} * Pr(at least ceil(g/4) of g/2 unit costs are
    -1).  Asymptotic part: K (log_q n) n^-eps with K = p^{-1/4}/4, valid when
    p is below the epsilon threshold.
    """
    _check_even_q(q)
    if not 0.0 < p < 0.5:
        raise ValueError(f"need 0 < p < 1/2, got {p}")
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    raw, g = analysis_girth(q, n)
    half = g // 2
    tail = binomial_tail(half, math.ceil(g / 4.0), p)
    wep_exact = n * (2.0 * q - 1.0) ** half * tail
    K = 0.25 * p ** -0.25
    wep_asym = K * _logq(n, q) * n ** (-epsilon)
    n_power = 1.0 + 0.5 * _logq(4.0 * q - 2.0, q) + 0.25 * _logq(p, q)
    return BoundReport("bsc", q, n, g, raw, p, epsilon,
                       bsc_threshold(q, epsilon), wep_exact, wep_asym, K,
                       n_power)


def awgn_bound(q: int, n: int, sigma2: float, epsilon: float) -> BoundReport:
    """Finite-n union bound and asymptotic form for binary-input AWGN.

    Window costs are g/2 + N(0, (g/2) sigma2); the gaussian tail inequality
    gives Pr(cost <= 0) <= sqrt(sigma2/(pi g)) exp(-g/(4 sigma2)).
    """
    _check_even_q(q)
    if not sigma2 > 0.0:
        raise ValueError(f"need sigma2 > 0, got {sigma2}")
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    raw, g = analysis_girth(q, n)
    half = g // 2
    tail = math.sqrt(sigma2 / (math.pi * g)) * math.exp(-g / (4.0 * sigma2))
    wep_exact = n * (2.0 * q - 1.0) ** half * tail
    K = math.sqrt(sigma2 / math.pi)
    wep_asym = K * math.sqrt(1.0 / (_logq(n, q) - 1.0)) * n ** (-epsilon)
    n_power = (1.0 + 0.5 * _logq(2.0 * q - 1.0, q)
               - _logq(math.e, q) / (4.0 * sigma2))
    return BoundReport("awgn", q, n, g, raw, sigma2, epsilon,
                       awgn_threshold_sigma2(q, epsilon), wep_exact, wep_asym,
                       K, n_power)


def sum_tail_nonpositive(dist: LlrDistribution, m: int,
                         atom_limit: int = 10 ** 6) -> float:
    """Pr(sum of m i.i.d. LLR samples <= 0).

    Discrete pmfs convolve exactly by enumerating atom combinations (guarded);
    gaussians sum in closed form.
    """
    if m < 1:
        raise ValueError("need m >= 1")
    if dist.kind == "gaussian":
        mean = m * dist.mean
        sd = math.sqrt(m * dist.variance)
        return 0.5 * math.erfc(mean / (sd * math.sqrt(2.0)))
    if len(dist.atoms) ** m > atom_limit:
        raise ValueError(f"convolution too large: {len(dist.atoms)}^{m} terms")
    total = 0.0
    for combo in product(dist.atoms, repeat=m):
        s = math.fsum(v for v, _ in combo)
        if s <= 0.0:
            total += math.prod(pr for _, pr in combo)
    return total


def chernoff_tail(dist: LlrDistribution, m: int) -> float:
    """min over s >= 0 of E[exp(-s z)]^m, an upper bound on the sum tail."""
    if dist.kind == "gaussian":
        # optimum at s = mean/variance
        return math.exp(-m * dist.mean ** 2 / (2.0 * dist.variance))

    def mgf(s: float) -> float:
        return math.fsum(pr * math.exp(-s * v) for v, pr in dist.atoms)

    lo, hi = 0.0, 60.0
    for _ in range(200):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if mgf(m1) <= mgf(m2):
            hi = m2
        else:
            lo = m1
    return min(mgf(0.5 * (lo + hi)), 1.0) ** m


def mbios_bound(q_max: int, g_half: int, n: int, dist: LlrDistribution) -> float:
    """Union bound n (2 q_max - 1)^{g_half} Pr(sum of g_half LLRs <= 0).

    Works for regular codes (g_half = (log_q n - 1)/2) and irregular codes
    with a measured girth; q_max is the largest repetition degree.
    """
    if g_half < 1:
        raise ValueError("g_half must be >= 1")
    if q_max < 2:
        raise ValueError("q_max must be >= 2")
    return n * (2.0 * q_max - 1.0) ** g_half * sum_tail_nonpositive(dist, g_half)


@dataclass(frozen=True)
class MbiosBoundDetails:
    bound: float
    tail: float
    chernoff_tail: float
    chernoff_bound: float


def mbios_bound_details(q_max: int, g_half: int, n: int,
                        dist: LlrDistribution) -> MbiosBoundDetails:
    tail = sum_tail_nonpositive(dist, g_half)
    ch = chernoff_tail(dist, g_half)
    factor = n * (2.0 * q_max - 1.0) ** g_half
    return MbiosBoundDetails(factor * tail, tail, ch, factor * ch)


def irregular_mbios_bound(degrees, girth_measured: int, n: int,
                          dist: LlrDistribution) -> float:
    """Bound for an irregular code from its measured girth.

    All repetition degrees must be even; the window carries girth/2 line
    edges (odd girths round down).
    """
    degrees = [int(d) for d in degrees]
    if any(d % 2 for d in degrees):
        raise ValueError("irregular bound needs all repetition degrees even")
    g = int(girth_measured)
    g -= g % 2
    if g < 2:
        raise ValueError(f"measured girth {girth_measured} leaves no window")
    return mbios_bound(max(degrees), g // 2, n, dist)
