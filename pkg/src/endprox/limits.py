"""Limiting laws of the end-proximity statistics and their moments.

Every supported (model, statistic) pair converges to either an offset
negative binomial, the canonical joint law with generating function
c*v / (1 - a*u - b*v)^2 in (u -> unp, v -> deg), or the u -> (u, u^2)
substitution of that joint law (the exterior nucleotide count).  The grammar
model enters only through the root of its singularity polynomial.

Rational model constants stay exact Fractions end to end; grammar-derived
quantities are floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .exact import (
    DEFAULT_PFOLD,
    Model,
    PfoldParams,
    Stat,
    UnsupportedCombination,
)
from .structure import DEFAULT_ETE, EteModel, ete_distance

Number = Union[Fraction, float]


class NoRootInRange(ValueError):
    """The singularity polynomial has no sign change in the search interval."""


class TolNotAchievable(ValueError):
    """Requested certified tolerance needs more terms than the hard cap."""


TERM_CAP = 10**6


@dataclass(frozen=True)
class NegBinomial:
    """offset + NB(r, p): failures before r successes, shifted by offset."""

    offset: int
    r: int
    p: Number

    def pmf(self, k: int) -> Number:
        t = k - self.offset
        if t < 0:
            return 0 * self.p
        return math.comb(t + self.r - 1, t) * self.p**self.r * (1 - self.p) ** t

    @property
    def mean(self) -> Number:
        return self.offset + self.r * (1 - self.p) / self.p

    @property
    def variance(self) -> Number:
        return self.r * (1 - self.p) / self.p**2


@dataclass(frozen=True)
class JointNB:
    """Joint (unp, deg) law with PGF c*v / (1 - a*u - b*v)^2, c = (1-a-b)^2."""

    a: Number
    b: Number

    @property
    def c(self) -> Number:
        return (1 - self.a - self.b) ** 2

    def pmf(self, i: int, j: int) -> Number:
        if j < 1 or i < 0:
            return 0 * self.a
        return (
            self.c
            * math.comb(i + j - 1, i)
            * (i + j)
            * self.a**i
            * self.b ** (j - 1)
        )

    def diagonal_pmf(self, n: int) -> Number:
        """P(unp + deg = n) = c * n * (a+b)^(n-1)."""
        if n < 1:
            return 0 * self.a
        return self.c * n * (self.a + self.b) ** (n - 1)

    def deg_marginal(self) -> NegBinomial:
        return NegBinomial(1, 2, (1 - self.a - self.b) / (1 - self.a))

    def unp_marginal(self) -> NegBinomial:
        return NegBinomial(0, 2, (1 - self.a - self.b) / (1 - self.b))

    def chn_law(self) -> NegBinomial:
        return NegBinomial(0, 2, 1 - self.a - self.b)

    def factorial_moments(self) -> dict[str, Number]:
        """First and second factorial moments of (unp, deg) at u = v = 1."""
        s0 = 1 - self.a - self.b
        a, b = self.a, self.b
        return {
            "eu": 2 * a / s0,
            "ev": 1 + 2 * b / s0,
            "euu": 6 * a**2 / s0**2,
            "evv": 4 * b / s0 + 6 * b**2 / s0**2,
            "euv": 2 * a / s0 + 6 * a * b / s0**2,
        }


@dataclass(frozen=True)
class LenDist:
    """Exterior nucleotide count 2*deg + unp under a joint law (the u -> (u, u^2)
    substitution of the joint PGF)."""

    joint: JointNB

    def pmf(self, m: int) -> Number:
        return sum(
            (self.joint.pmf(m - 2 * j, j) for j in range(1, m // 2 + 1)),
            start=0 * self.joint.a,
        )

    @property
    def mean(self) -> Number:
        fm = self.joint.factorial_moments()
        return fm["eu"] + 2 * fm["ev"]

    @property
    def variance(self) -> Number:
        fm = self.joint.factorial_moments()
        mean = fm["eu"] + 2 * fm["ev"]
        # chain rule for the substituted PGF: L''(1) then L'' + L' - L'^2
        second = fm["euu"] + 4 * fm["euv"] + 4 * fm["evv"] + 2 * fm["ev"]
        return second + mean - mean**2


LimitDist = Union[NegBinomial, JointNB, LenDist]


@dataclass(frozen=True)
class PfoldDerived:
    """Smallest positive root of the singularity polynomial and the derived
    scale delta = p1*q2*rho that parametrizes every grammar limit law."""

    rho: float
    delta: float
    residual: float


@dataclass(frozen=True)
class MomentSummary:
    mean: Number
    variance: Number
    certified_error: Number


def singularity_polynomial_coeffs(p: PfoldParams) -> tuple[float, float, float, float, float]:
    """Expanded coefficients (degree 0..4) of
    (1 - p1*q2*z)^2 * (1 - p3*z^2) - 4*p2*q1*q2*q3*z^3."""
    alpha = p.p1 * p.q2
    return (
        1.0,
        -2 * alpha,
        alpha**2 - p.p3,
        2 * alpha * p.p3 - 4 * p.p2 * p.q1 * p.q2 * p.q3,
        -(alpha**2) * p.p3,
    )


def singularity_polynomial_factored(p: PfoldParams, z: float) -> float:
    """Direct factored-form evaluation; guards the expansion above."""
    alpha = p.p1 * p.q2
    return (1 - alpha * z) ** 2 * (1 - p.p3 * z**2) - 4 * p.p2 * p.q1 * p.q2 * p.q3 * z**3


def pfold_rho_delta(p: PfoldParams = DEFAULT_PFOLD, tol: float = 1e-12) -> PfoldDerived:
    """Locate the smallest positive root by a scan-bracketed bisection, then
    polish with Newton steps on the expanded quartic."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    coeffs = singularity_polynomial_coeffs(p)

    def val(z: float) -> float:
        acc = 0.0
        for c in reversed(coeffs):
            acc = acc * z + c
        return acc

    def deriv(z: float) -> float:
        acc = 0.0
        for k in range(4, 0, -1):
            acc = acc * z + k * coeffs[k]
        return acc

    upper = 1.0 / math.sqrt(p.p3)
    steps = 4096
    lo, hi = None, None
    prev_z, prev_v = 0.0, val(0.0)
    for i in range(1, steps + 1):
        z = upper * i / steps
        v = val(z)
        if prev_v > 0 >= v:
            lo, hi = prev_z, z
            break
        prev_z, prev_v = z, v
    if lo is None:
        raise NoRootInRange(f"no sign change in (0, {upper:.6g})")

    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        if val(mid) > 0:
            lo = mid
        else:
            hi = mid
    rho = 0.5 * (lo + hi)
    for _ in range(100):
        d = deriv(rho)
        if d == 0:
            break
        step = val(rho) / d
        rho -= step
        if abs(step) < tol:
            break

    if not rho < upper:
        raise NoRootInRange("root does not satisfy rho < 1/sqrt(p3)")
    delta = p.p1 * p.q2 * rho
    if not 0 < delta < 1:
        raise NoRootInRange(f"derived delta {delta} outside (0, 1)")
    return PfoldDerived(rho=rho, delta=delta, residual=abs(val(rho)))


def pfold_limit_from_delta(stat: Stat, delta: float) -> LimitDist:
    """Grammar limit laws as functions of the scale parameter alone (HEL is
    excluded; it needs the root and p3 directly)."""
    if stat is Stat.DEG:
        return NegBinomial(1, 2, 1 / (1 + delta))
    if stat is Stat.UNP:
        return NegBinomial(0, 2, (1 - delta) / (1 + delta**2))
    if stat is Stat.CHN:
        return NegBinomial(0, 2, (1 - delta) / (1 + delta))
    if stat is Stat.JOINT:
        return JointNB(delta, delta * (1 - delta) / (1 + delta))
    if stat is Stat.LEN:
        return LenDist(JointNB(delta, delta * (1 - delta) / (1 + delta)))
    raise UnsupportedCombination(f"no delta-parametrized law for {stat.value}")


_MOTZKIN_JOINT = JointNB(Fraction(1, 3), Fraction(1, 3))

_RATIONAL_LAWS: dict[tuple[Model, Stat], LimitDist] = {
    (Model.DYCK, Stat.DEG): NegBinomial(1, 2, Fraction(1, 2)),
    (Model.DYCK, Stat.HEL): NegBinomial(1, 1, Fraction(3, 4)),
    (Model.MOTZKIN, Stat.DEG): NegBinomial(1, 2, Fraction(1, 2)),
    (Model.MOTZKIN, Stat.UNP): NegBinomial(0, 2, Fraction(1, 2)),
    (Model.MOTZKIN, Stat.CHN): NegBinomial(0, 2, Fraction(1, 3)),
    (Model.MOTZKIN, Stat.HEL): NegBinomial(1, 1, Fraction(8, 9)),
    (Model.MOTZKIN, Stat.STM): NegBinomial(1, 1, Fraction(3, 4)),
    (Model.MOTZKIN, Stat.STEM_HELICES): NegBinomial(1, 1, Fraction(27, 32)),
    (Model.MOTZKIN, Stat.JOINT): _MOTZKIN_JOINT,
    (Model.MOTZKIN, Stat.LEN): LenDist(_MOTZKIN_JOINT),
}


def limit_of(model: Model, stat: Stat, p: Optional[PfoldParams] = None) -> LimitDist:
    """The limiting law of a statistic under a model.

    Uniform-model laws carry exact rational parameters.  Unpaired positions
    do not exist in the Dyck model, so only DEG and HEL are defined there.
    """
    law = _RATIONAL_LAWS.get((model, stat))
    if law is not None:
        return law
    if model is Model.PFOLD:
        params = p or DEFAULT_PFOLD
        derived = pfold_rho_delta(params)
        if stat is Stat.HEL:
            return NegBinomial(1, 1, 1 - derived.rho**2 * params.p3)
        if stat in (Stat.DEG, Stat.UNP, Stat.CHN, Stat.JOINT, Stat.LEN):
            return pfold_limit_from_delta(stat, derived.delta)
    raise UnsupportedCombination(f"no limit law for {model.value} x {stat.value}")


def joint_pmf(d: JointNB, i: int, j: int) -> Number:
    """Probability of (unp = i, deg = j) under a joint law."""
    return d.pmf(i, j)


def moments(d: LimitDist) -> MomentSummary:
    """Closed-form mean and variance; exact when the law is rational."""
    if isinstance(d, NegBinomial):
        zero = 0 * d.p
        return MomentSummary(d.mean, d.variance, zero)
    if isinstance(d, LenDist):
        zero = 0 * d.joint.a
        return MomentSummary(d.mean, d.variance, zero)
    raise UnsupportedCombination("moments are defined for scalar laws only")


def pmf_expand(d: LimitDist, kmax: int) -> list[float]:
    """pmf values at 0..kmax for a scalar law."""
    if kmax < 0:
        raise ValueError("kmax must be nonnegative")
    if isinstance(d, (NegBinomial, LenDist)):
        return [float(d.pmf(k)) for k in range(kmax + 1)]
    raise UnsupportedCombination("pmf expansion is defined for scalar laws only")


# ---------------------------------------------------------------------------
# certified distance moments


def _tail_n2(k: int, s: float) -> float:
    """Exact sum of n^2 * s^n over n >= k."""
    q = 1 - s
    return s**k * (k**2 / q + 2 * k * s / q**2 + s * (1 + s) / q**3)


def _tail_n3(k: int, s: float) -> float:
    """Exact sum of n^3 * s^n over n >= k."""
    q = 1 - s
    return s**k * (
        k**3 / q
        + 3 * k**2 * s / q**2
        + 3 * k * s * (1 + s) / q**3
        + s * (1 + 4 * s + s**2) / q**4
    )


def dyck_ete_truncations(m: EteModel, tol: float) -> tuple[int, int]:
    """Truncation points for the mean and second-moment sums of the Dyck
    distance law, from the geometric-series tail bounds (the integrand is
    dominated by sqrt(b^2+c^2) * n^(e/2) with e/2 <= 1)."""
    c1 = math.sqrt(m.b_nm**2 + m.c_nm**2)
    c2 = m.b_nm**2 + m.c_nm**2

    def first_k(const: float, power: int, kmin: int) -> int:
        k = kmin
        while const * 3 * k**power / 2**k > tol:
            k += 1
            if k > 2000:
                raise TolNotAchievable("tail bound does not reach tol")
        return k

    return first_k(c1 / 2, 2, 6), first_k(c2 / 2, 3, 9)


def _dyck_sums(m: EteModel, k_mean: int, k_sec: int) -> tuple[float, float]:
    e = m.exponent
    mean = 0.0
    for n in range(1, k_mean):
        mean += n / 2 ** (n + 1) * math.sqrt(m.b_nm**2 * n**e + m.c_nm**2 * (n - 1) ** e)
    second = 0.0
    for n in range(1, k_sec):
        second += n / 2 ** (n + 1) * (m.b_nm**2 * n**e + m.c_nm**2 * (n - 1) ** e)
    return mean, second


def _joint_diag_cap(joint: JointNB, m: EteModel, tol: float, power: int) -> int:
    s = float(joint.a + joint.b)
    c = float(joint.c)
    c2 = m.b_nm**2 + m.c_nm**2
    const = c / s * (math.sqrt(c2) if power == 2 else c2)
    tail = _tail_n2 if power == 2 else _tail_n3
    k = 3
    while const * tail(k, s) > tol:
        k += 1
        if k * (k + 1) // 2 > TERM_CAP:
            raise TolNotAchievable("term cap exceeded before the tail bound reached tol")
    return k


def _joint_sums(joint: JointNB, m: EteModel, k_mean: int, k_sec: int) -> tuple[float, float]:
    a, b, c = float(joint.a), float(joint.b), float(joint.c)
    e = m.exponent
    b2, c2 = m.b_nm**2, m.c_nm**2
    mean = second = 0.0
    for d in range(1, max(k_mean, k_sec)):
        term = c * d * a ** (d - 1)  # j = 1, i = d-1
        for j in range(1, d + 1):
            if term > 0:
                sq = b2 * j**e + c2 * (d - 1) ** e
                if d < k_mean:
                    mean += term * math.sqrt(sq)
                if d < k_sec:
                    second += term * sq
            if j < d:
                term *= (d - j) * b / (j * a)
    return mean, second


def ete_limit_moments(
    model: Model,
    m: EteModel = DEFAULT_ETE,
    tol: float = 1e-3,
    p: Optional[PfoldParams] = None,
) -> MomentSummary:
    """Mean and variance of the two-scale distance under a model's limiting
    exterior law, summed to a truncation certified below tol.

    The Dyck case follows the univariate sum over deg with its geometric tail
    bounds; the joint models sum over unp + deg diagonals, whose law
    c*n*(a+b)^(n-1) admits the same closed-form tails.  The variance comes
    from the shortcut formula with the mean recomputed at a tighter internal
    tolerance so the propagated error stays below tol.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if model is Model.DYCK:
        k_mean, k_sec = dyck_ete_truncations(m, tol)
        mean, _ = _dyck_sums(m, k_mean, k_sec)
        rough = mean + tol
        tol_m = tol / (8 * (rough + 1))
        tol_s = tol / 2
        km2, _ = dyck_ete_truncations(m, tol_m)
        _, ks2 = dyck_ete_truncations(m, tol_s)
        mean_fine, second = _dyck_sums(m, km2, ks2)
    else:
        if model is Model.MOTZKIN:
            joint = JointNB(1 / 3, 1 / 3)
        elif model is Model.PFOLD:
            delta = pfold_rho_delta(p or DEFAULT_PFOLD).delta
            joint = pfold_limit_from_delta(Stat.JOINT, delta)
        else:
            raise UnsupportedCombination(f"no distance law for {model.value}")
        k_mean = _joint_diag_cap(joint, m, tol, 2)
        mean, _ = _joint_sums(joint, m, k_mean, 0)
        rough = mean + tol
        tol_m = tol / (8 * (rough + 1))
        tol_s = tol / 2
        km2 = _joint_diag_cap(joint, m, tol_m, 2)
        ks2 = _joint_diag_cap(joint, m, tol_s, 3)
        mean_fine, second = _joint_sums(joint, m, km2, ks2)
    variance = second - mean_fine**2
    return MomentSummary(mean=mean, variance=variance, certified_error=tol)


def ete_point(deg: int, chn: int, m: EteModel = DEFAULT_ETE) -> float:
    """Distance value at one (deg, chn) cell; re-exported for convenience."""
    return ete_distance(deg, chn, m)
