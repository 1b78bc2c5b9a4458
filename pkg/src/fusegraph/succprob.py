"""Exact distribution of the number of resource states consumed.

The reciprocal of the Fourier-transformed PDF of the resource count is a
polynomial in z^-1 = e^{-ik}. A base resource state has reciprocal z^-1;
each fusion with success probability p combines two reciprocals A, B into
A*B/p - (1-p)/p (a loop uses A/p - (1-p)/p). Expanding the final
reciprocal's inverse as a power series gives the PMF, and a companion
recurrence gives the CMF directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from operator import mul

import numpy as np

from .network import FusionNetwork
from .ordering import FusionSchedule

__all__ = [
    "OverheadPoly",
    "OverheadDistribution",
    "DistributionError",
    "NumericalDegeneracyError",
    "combine_link",
    "combine_loop",
    "schedule_polynomial",
    "expand_pmf",
    "expand_cmf",
    "distribution",
    "distribution_to_tail",
    "quantile",
]

PMF_FLOOR = -1e-9
CMF_TOL = 1e-9


class DistributionError(ValueError):
    pass


class NumericalDegeneracyError(DistributionError):
    pass


@dataclass(frozen=True, eq=False)
class OverheadPoly:
    """Coefficients ``a_0..a_L`` of the reciprocal FTPDF, sum_l a_l z^-l.

    Coefficients are kept as exact rationals; ``coeffs`` gives them as floats.
    """

    exact: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        c = tuple(Fraction(x) for x in self.exact)
        if len(c) < 2:
            raise DistributionError("need at least a_0 and a_1")
        if c[-1] == 0:
            raise DistributionError("leading coefficient a_L must be non-zero")
        object.__setattr__(self, "exact", c)

    @classmethod
    def base(cls) -> OverheadPoly:
        return cls((Fraction(0), Fraction(1)))

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([float(x) for x in self.exact])

    @property
    def degree(self) -> int:
        return len(self.exact) - 1

    def mean(self) -> float:
        # q(k) = 1/P(e^{-ik}) with P(1) = 1, so E[C] = sum_l l a_l.
        return float(sum(l * a for l, a in enumerate(self.exact)))

    def reciprocal_at(self, k: float) -> complex:
        """Value of sum_l a_l e^{-ikl}."""
        c = self.coeffs
        return complex(np.sum(c * np.exp(-1j * k * np.arange(c.size))))


def _check_p(p_s: float) -> Fraction:
    if not 0.0 < p_s <= 1.0:
        raise DistributionError(f"fusion success probability must lie in (0, 1], got {p_s}")
    return Fraction(p_s)


def _convolve(a, b) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def combine_link(a: OverheadPoly, b: OverheadPoly, p_s: float) -> OverheadPoly:
    """Reciprocal after fusing two independently prepared pieces.

    A failed fusion regenerates both pieces, giving A*B/p - (1-p)/p.
    """
    p = _check_p(p_s)
    c = [x / p for x in _convolve(a.exact, b.exact)]
    c[0] -= (1 - p) / p
    return OverheadPoly(tuple(c))


def combine_loop(a: OverheadPoly, p_s: float) -> OverheadPoly:
    """Reciprocal after a fusion inside one piece: A/p - (1-p)/p."""
    p = _check_p(p_s)
    c = [x / p for x in a.exact]
    c[0] -= (1 - p) / p
    return OverheadPoly(tuple(c))


def schedule_polynomial(
    network: FusionNetwork, schedule: FusionSchedule, p_succ: float
) -> OverheadPoly:
    """Reciprocal FTPDF of the whole process.

    Disconnected networks yield independent pieces whose counts add, so
    their reciprocals multiply.
    """
    order = schedule.order
    if sorted(order) != list(range(len(network.links))):
        raise DistributionError("schedule does not cover the network's links exactly once")
    parent = {n.name: n.name for n in network.nodes}
    poly = {n.name: OverheadPoly.base() for n in network.nodes}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for lid in order:
        a, b = (find(x) for x in network.links[lid].ends)
        if a == b:
            poly[a] = combine_loop(poly[a], p_succ)
        else:
            poly[a] = combine_link(poly[a], poly.pop(b), p_succ)
            parent[b] = a
    if not poly:
        raise DistributionError("empty network")
    roots = sorted(poly)
    out = poly[roots[0]].exact
    for r in roots[1:]:
        out = _convolve(out, poly[r].exact)
    return OverheadPoly(tuple(out))


# The recurrences cancel large alternating terms, so they run in fixed point
# with this many fractional bits rather than in floats.
FIXED_BITS = 160


def _fixed(x: Fraction) -> int:
    return round(x * (1 << FIXED_BITS))


def _run(coef: list[int], first: int, terms: int, stop_mass: int | None = None) -> list[int]:
    # out[j] = sum_{l=1..min(j, n)} coef[l] * out[j - l], in fixed point.
    n = len(coef) - 1
    out = [first]
    total = first
    j = 1
    while j < terms:
        k = min(j, n)
        acc = sum(map(mul, coef[1 : k + 1], reversed(out[j - k : j])))
        v = acc >> FIXED_BITS
        out.append(v)
        total += v
        j += 1
        if stop_mass is not None and total >= stop_mass:
            break
    return out


def _leading(poly: OverheadPoly) -> Fraction:
    a_l = poly.exact[-1]
    if abs(a_l) < 1e-300:
        raise NumericalDegeneracyError(f"leading coefficient a_L={float(a_l)!r} is degenerate")
    return a_l


def _pmf_fixed(poly: OverheadPoly, terms: int, stop_mass: int | None = None) -> list[int]:
    a = poly.exact
    L = poly.degree
    a_l = _leading(poly)
    coef = [0] + [_fixed(-a[L - l] / a_l) for l in range(1, L + 1)]
    return _run(coef, _fixed(1 / a_l), terms, stop_mass)


def _cmf_fixed(poly: OverheadPoly, terms: int) -> list[int]:
    a = poly.exact
    L = poly.degree
    a_l = _leading(poly)

    def at(i: int) -> Fraction:
        return a[i] if i >= 0 else Fraction(0)

    # d_j = sum_{j'} (a_{L-j+j'+1} - a_{L-j+j'}) / a_L * d_{j'}; with l = j - j'
    coef = [0] + [_fixed((at(L - l + 1) - at(L - l)) / a_l) for l in range(1, L + 2)]
    return _run(coef, _fixed(1 / a_l), terms)


def _to_float(xs: list[int]) -> np.ndarray:
    scale = 1 << FIXED_BITS
    return np.array([x / scale for x in xs])


def expand_pmf(poly: OverheadPoly, terms: int) -> np.ndarray:
    """``b_0..b_{terms-1}`` with Pr(C = L + j) = b_j."""
    return _to_float(_pmf_fixed(poly, terms))


def expand_cmf(poly: OverheadPoly, terms: int) -> np.ndarray:
    """``d_0..d_{terms-1}`` with P_succ(L + j) = d_j, from its own recurrence."""
    return _to_float(_cmf_fixed(poly, terms))


@dataclass(frozen=True, eq=False)
class OverheadDistribution:
    """PMF and CMF of the resource count ``C`` for ``c = L .. c_max``."""

    poly: OverheadPoly
    pmf: np.ndarray
    cmf: np.ndarray
    c_max: int

    @property
    def L(self) -> int:
        return self.poly.degree

    @property
    def counts(self) -> np.ndarray:
        return np.arange(self.L, self.c_max + 1)

    def pmf_at(self, c: int) -> float:
        if c < self.L:
            return 0.0
        if c > self.c_max:
            raise DistributionError(f"c={c} beyond truncation c_max={self.c_max}")
        return float(self.pmf[c - self.L])

    def cmf_at(self, c: int) -> float:
        if c < self.L:
            return 0.0
        if c > self.c_max:
            raise DistributionError(f"c={c} beyond truncation c_max={self.c_max}")
        return float(self.cmf[c - self.L])

    @property
    def mass(self) -> float:
        return float(self.cmf[-1])

    @property
    def tail(self) -> float:
        """Probability mass beyond ``c_max``."""
        return max(0.0, 1.0 - self.mass)

    def mean(self, tail_corrected: bool = True) -> float:
        m = float(np.dot(self.counts, self.pmf))
        n = self.cmf.size
        if not tail_corrected or n < 8:
            return m
        # The tail mass decays geometrically far out; estimate its rate over
        # a wide window so that periodic zeros in the PMF average out.
        w = n // 4
        t_end, t_mid = 1.0 - self.cmf[-1], 1.0 - self.cmf[-1 - w]
        if t_end <= 0.0 or t_mid <= t_end:
            return m
        r = (t_end / t_mid) ** (1.0 / w)
        return m + t_end * (self.c_max + 1.0 / (1.0 - r))


def distribution(
    network: FusionNetwork,
    schedule: FusionSchedule,
    p_succ: float,
    c_max: int,
) -> OverheadDistribution:
    """PMF and CMF up to ``c_max`` resource states for a scheduled network."""
    poly = schedule_polynomial(network, schedule, p_succ)
    return _from_poly(poly, c_max)


def _from_poly(poly: OverheadPoly, c_max: int) -> OverheadDistribution:
    L = poly.degree
    if c_max < L:
        raise DistributionError(
            f"c_max={c_max} is below the minimum resource count L={L}"
        )
    return _finish(poly, _pmf_fixed(poly, c_max - L + 1))


def _finish(poly: OverheadPoly, b_fixed: list[int]) -> OverheadDistribution:
    terms = len(b_fixed)
    b = _to_float(b_fixed)
    d = expand_cmf(poly, terms)
    if not (np.all(np.isfinite(b)) and np.all(np.isfinite(d))):
        raise NumericalDegeneracyError("non-finite terms in the series expansion")
    if b.min() < PMF_FLOOR:
        raise NumericalDegeneracyError(
            f"negative probability {b.min():.3g}; the expansion is numerically unstable"
        )
    cum = np.cumsum(b_fixed, dtype=object)
    if max(abs(x - y) for x, y in zip(cum, _cmf_fixed(poly, terms))) > _fixed(Fraction(CMF_TOL)):
        raise NumericalDegeneracyError("CMF recurrence disagrees with the summed PMF")
    return OverheadDistribution(poly, b, d, poly.degree + terms - 1)


def distribution_to_tail(
    network: FusionNetwork,
    schedule: FusionSchedule,
    p_succ: float,
    tail: float = 1e-8,
    max_terms: int = 5_000_000,
) -> OverheadDistribution:
    """Distribution truncated where the remaining mass first drops below ``tail``."""
    poly = schedule_polynomial(network, schedule, p_succ)
    # The tail decays roughly like exp(-c / mean); refuse hopeless requests early.
    if poly.mean() * np.log(1 / tail) > max_terms:
        raise DistributionError(
            f"mean resource count {poly.mean():.3g} needs more than {max_terms} terms "
            f"to reach tail mass {tail}"
        )
    stop = _fixed(1 - Fraction(tail))
    b = _pmf_fixed(poly, max_terms, stop_mass=stop)
    if sum(b) < stop:
        raise DistributionError(
            f"tail mass still above {tail} after {max_terms} terms"
        )
    return _finish(poly, b)


def quantile(dist: OverheadDistribution, target: float) -> int:
    """Smallest count ``c`` with P_succ(c) >= target."""
    if not 0.0 < target < 1.0:
        raise DistributionError("target probability must lie in (0, 1)")
    idx = np.nonzero(dist.cmf >= target)[0]
    if idx.size == 0:
        raise DistributionError(
            f"target {target} not reached by c_max={dist.c_max}; "
            f"achieved mass {dist.mass:.6g}"
        )
    return int(dist.L + idx[0])
