"""Exact finite-size distributions of end-proximity statistics.

Three models over dot-bracket structures are supported: uniform balanced
bracketings (Dyck), uniform dot-bracket strings (Motzkin), and the
three-rule stochastic grammar

    S -> L S (p1) | L (q1)      L -> ( F ) (p2) | . (q2)
    F -> ( F ) (p3) | L S (q3)

with qi = 1 - pi.  Uniform-model tables hold arbitrary-precision integers;
grammar tables hold double-precision weights.  The small-n tables double as
brute-force oracles for the limit laws; conditional_law evaluates the same
decompositions in scaled floating point so sizes in the thousands stay cheap.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import IO, Iterator, Optional, Union

import numpy as np

from .structure import SecondaryStructure, parse_dot_bracket


class Model(str, Enum):
    DYCK = "dyck"
    MOTZKIN = "motzkin"
    PFOLD = "pfold"


class Stat(str, Enum):
    DEG = "deg"
    UNP = "unp"
    CHN = "chn"
    LEN = "len"
    ETE = "ete"
    HEL = "hel"
    STM = "stm"
    STEM_HELICES = "stem_helices"
    JOINT = "joint"


class UnsupportedCombination(ValueError):
    """Model/statistic pairing with no defined table or law."""


class ZeroMassLength(ValueError):
    """The grammar assigns zero probability to this output length."""


class SizeTooLarge(ValueError):
    """Exhaustive enumeration requested beyond the guard size."""


@dataclass(frozen=True)
class PfoldParams:
    """Grammar rule probabilities; the complements qi = 1 - pi are derived."""

    p1: float = 0.868534
    p2: float = 0.105397
    p3: float = 0.787640

    def __post_init__(self):
        for name in ("p1", "p2", "p3"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name} must lie strictly between 0 and 1")

    @property
    def q1(self) -> float:
        return 1 - self.p1

    @property
    def q2(self) -> float:
        return 1 - self.p2

    @property
    def q3(self) -> float:
        return 1 - self.p3


DEFAULT_PFOLD = PfoldParams()

TableKey = Union[int, tuple, None]


@dataclass(frozen=True)
class CountTable:
    """Exact distribution of one statistic (or statistic tuple) at one size.

    entries maps a statistic value to its weight: an integer count for the
    uniform models, a nonnegative real for the grammar.  None is the absent
    bucket (structures that do not carry the statistic, e.g. no pair at all).
    axes names the key components, e.g. ("deg", "unp").
    """

    model: Model
    size: int
    axes: tuple[str, ...]
    entries: dict

    def total(self):
        return sum(self.entries.values())

    def write_csv(self, stream: IO[str]) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["model", "n", "stat_name", "stat_value", "weight"])
        name = ",".join(self.axes)
        for key in sorted(self.entries, key=_key_order):
            writer.writerow([self.model.value, self.size, name, _key_str(key), self.entries[key]])


def _key_order(key: TableKey):
    if key is None:
        return (0,)
    if isinstance(key, tuple):
        return (1,) + key
    return (1, key)


def _key_str(key: TableKey) -> str:
    if key is None:
        return "absent"
    if isinstance(key, tuple):
        return ",".join(str(v) for v in key)
    return str(key)


# ---------------------------------------------------------------------------
# counting sequences


def catalan(n: int) -> int:
    if n < 0:
        return 0
    return math.comb(2 * n, n) // (n + 1)


_MOTZKIN: list[int] = [1, 1]


def motzkin_number(n: int) -> int:
    if n < 0:
        return 0
    while len(_MOTZKIN) <= n:
        m = len(_MOTZKIN)
        value = _MOTZKIN[m - 1] + sum(
            _MOTZKIN[j] * _MOTZKIN[m - 2 - j] for j in range(m - 1)
        )
        _MOTZKIN.append(value)
    return _MOTZKIN[n]


# ---------------------------------------------------------------------------
# uniform-model tables


@lru_cache(maxsize=None)
def _dyck_deg_rows(n: int) -> tuple[dict, ...]:
    rows: list[dict] = [{0: 1}]
    for m in range(1, n + 1):
        row: dict = {}
        # first return to the axis: an arch over semilength j, then the rest
        for j in range(m):
            c = catalan(j)
            for l, w in rows[m - 1 - j].items():
                row[l + 1] = row.get(l + 1, 0) + c * w
        rows.append(row)
    return tuple(rows)


def dyck_deg_counts(n: int) -> CountTable:
    """Counts of semilength-n balanced bracketings by top-level pair count."""
    if n < 0:
        raise ValueError("semilength must be nonnegative")
    return CountTable(Model.DYCK, n, ("deg",), dict(_dyck_deg_rows(n)[n]))


@lru_cache(maxsize=None)
def _motzkin_joint_rows(n: int) -> tuple[dict, ...]:
    rows: list[dict] = [{(0, 0): 1}]
    for m in range(1, n + 1):
        row: dict = {}
        for (d, k), w in rows[m - 1].items():  # leading exterior dot
            row[(d, k + 1)] = row.get((d, k + 1), 0) + w
        for j in range(m - 1):  # leading arch over any length-j path
            c = motzkin_number(j)
            for (d, k), w in rows[m - 2 - j].items():
                row[(d + 1, k)] = row.get((d + 1, k), 0) + c * w
        rows.append(row)
    return tuple(rows)


def motzkin_joint_counts(n: int) -> CountTable:
    """Counts of length-n dot-bracket strings keyed by (deg, unp)."""
    if n < 0:
        raise ValueError("length must be nonnegative")
    return CountTable(Model.MOTZKIN, n, ("deg", "unp"), dict(_motzkin_joint_rows(n)[n]))


@lru_cache(maxsize=None)
def _motzkin_deg_rows(n: int) -> tuple[dict, ...]:
    # single-variable DP, kept independent of the joint table on purpose
    rows: list[dict] = [{0: 1}]
    for m in range(1, n + 1):
        row = dict(rows[m - 1])
        for j in range(m - 1):
            c = motzkin_number(j)
            for l, w in rows[m - 2 - j].items():
                row[l + 1] = row.get(l + 1, 0) + c * w
        rows.append(row)
    return tuple(rows)


def motzkin_deg_counts(n: int) -> CountTable:
    """Deg marginal at length n via a DP that never tracks unp."""
    return CountTable(Model.MOTZKIN, n, ("deg",), dict(_motzkin_deg_rows(n)[n]))


# ---------------------------------------------------------------------------
# grammar inside weights


@dataclass(frozen=True)
class PfoldInside:
    """Inside weight arrays of the grammar up to length n.

    S[m], L[m], F[m] are the probabilities of each symbol producing a string
    of length exactly m; LS[m] is the length convolution of L and S; arch[m]
    is the weight of one exterior item "( F )" of total length m.
    """

    params: PfoldParams
    n: int
    S: np.ndarray
    L: np.ndarray
    F: np.ndarray
    LS: np.ndarray
    arch: np.ndarray


_INSIDE_CACHE: dict[PfoldParams, PfoldInside] = {}


def pfold_inside(p: PfoldParams, n: int) -> PfoldInside:
    cached = _INSIDE_CACHE.get(p)
    if cached is not None and cached.n >= n:
        return cached
    size = max(n, 256, 0 if cached is None else 2 * cached.n)
    S = np.zeros(size + 1)
    L = np.zeros(size + 1)
    F = np.zeros(size + 1)
    LS = np.zeros(size + 1)
    for m in range(1, size + 1):
        LS[m] = float(np.dot(L[1:m], S[m - 1:0:-1]))
        F[m] = (p.p3 * F[m - 2] if m >= 2 else 0.0) + p.q3 * LS[m]
        L[m] = (p.p2 * F[m - 2] if m >= 2 else 0.0) + (p.q2 if m == 1 else 0.0)
        S[m] = p.p1 * LS[m] + p.q1 * L[m]
    arch = np.zeros(size + 1)
    arch[2:] = p.p2 * F[: size - 1]
    inside = PfoldInside(p, size, S, L, F, LS, arch)
    _INSIDE_CACHE[p] = inside
    return inside


def _arch_powers(p: PfoldParams, n: int, lmax: int) -> list[np.ndarray]:
    """Length-convolution powers of the exterior arch item, truncated at n."""
    inside = pfold_inside(p, n)
    arch = inside.arch[: n + 1]
    powers = [np.zeros(n + 1)]
    powers[0][0] = 1.0
    for _ in range(lmax):
        powers.append(np.convolve(powers[-1], arch)[: n + 1])
    return powers


def _exterior_coefs(p: PfoldParams, l: int, kmax: int) -> np.ndarray:
    """coef[k] = p1^(k+l-1) * C(k+l, k) * q2^k for k = 0..kmax."""
    x = p.p1 * p.q2
    coef = np.empty(kmax + 1)
    coef[0] = p.p1 ** (l - 1)
    if kmax:
        ks = np.arange(1, kmax + 1)
        coef[1:] = coef[0] * np.cumprod(x * (ks + l) / ks)
    return coef


def pfold_joint_table(n: int, p: PfoldParams = DEFAULT_PFOLD) -> CountTable:
    """Unconditional grammar weights keyed by (unp, deg); sums to S(n).

    The exterior is a sequence of items, each either a dot or an arch, so the
    weight of (k dots, l arches) factors into the item-order multinomial and
    the l-fold convolution of the arch weights.
    """
    if n < 1:
        raise ZeroMassLength("grammar output has length at least 1")
    inside = pfold_inside(p, n)
    lmax = n // 4
    powers = _arch_powers(p, n, lmax)
    entries: dict = {}
    for l in range(lmax + 1):
        kmax = n - 4 * l
        if kmax < 0:
            break
        coef = _exterior_coefs(p, l, kmax)
        power = powers[l]
        for k in range(kmax + 1):
            if k + l == 0:
                continue
            w = p.q1 * coef[k] * power[n - k]
            if w > 0.0:
                entries[(k, l)] = w
    return CountTable(Model.PFOLD, n, ("unp", "deg"), entries)


def pfold_joint_probs(n: int, p: PfoldParams = DEFAULT_PFOLD) -> dict[tuple[int, int], float]:
    """Conditional (unp, deg) distribution of the grammar at output length n."""
    table = pfold_joint_table(n, p)
    mass = pfold_inside(p, n).S[n]
    if mass <= 0.0:
        raise ZeroMassLength(f"no length-{n} output")
    return {key: w / mass for key, w in table.entries.items()}


def pfold_exterior_totals(p: PfoldParams, n: int) -> np.ndarray:
    """Sum of the exterior-tracking weights over (unp, deg) for every length
    up to n, computed from the item decomposition rather than the plain
    inside recursion; conservation demands it equal S elementwise.

    Coefficient arrays stop at the arch-support bound k <= n - 4l; past it
    they only multiply structural zeros (and would overflow the float range
    for sizes in the thousands).
    """
    powers = _arch_powers(p, n, n // 4)
    totals = np.zeros(n + 1)
    for l, power in enumerate(powers):
        coef = _exterior_coefs(p, l, n - 4 * l)
        if l == 0:
            coef[0] = 0.0
        totals += np.convolve(coef, power[: n + 1])[: n + 1] * p.q1
    return totals


def pfold_string_probability(
    structure: Union[str, SecondaryStructure], p: PfoldParams = DEFAULT_PFOLD
) -> float:
    """Probability that the grammar outputs exactly this dot-bracket string.

    The grammar is unambiguous, so the derivation (if any) is unique; strings
    it cannot produce get probability 0.  Used as an enumeration oracle for
    the length-indexed tables and the conditional sampler.
    """
    if isinstance(structure, SecondaryStructure):
        s = structure
    else:
        s = parse_dot_bracket(structure)
    if s.crossing:
        return 0.0
    match = s.partner

    def item_end(i: int) -> int:
        # end (exclusive, 0-based) of the first item of the span starting at i
        return i + 1 if match[i] == 0 else match[i]

    def prob_S(i: int, j: int) -> float:
        if i >= j:
            return 0.0
        a = item_end(i)
        if a == j:
            return p.q1 * prob_L(i, j)
        return p.p1 * prob_L(i, a) * prob_S(a, j)

    def prob_L(i: int, j: int) -> float:
        if j == i + 1:
            return p.q2 if match[i] == 0 else 0.0
        if match[i] == j:
            return p.p2 * prob_F(i + 1, j - 1)
        return 0.0

    def prob_F(i: int, j: int) -> float:
        if j - i < 2:
            return 0.0
        if match[i] == j:
            return p.p3 * prob_F(i + 1, j - 1)
        a = item_end(i)
        return p.q3 * prob_L(i, a) * prob_S(a, j)

    return prob_S(0, s.length)


# ---------------------------------------------------------------------------
# first-helix / first-stem tables


@lru_cache(maxsize=None)
def _dyck_hel_rows(n: int) -> tuple[dict, ...]:
    # helper H assigns positive depth only to paths whose first and last
    # steps are matched; everything else sits in its 0 bucket
    hrows: list[dict] = [{0: 1}]
    for m in range(1, n + 1):
        row = {d + 1: w for d, w in hrows[m - 1].items()}
        notch = catalan(m) - catalan(m - 1)
        if notch:
            row[0] = row.get(0, 0) + notch
        hrows.append(row)
    rows: list[dict] = [{}]
    for m in range(1, n + 1):
        row: dict = {}
        for j in range(m):
            c = catalan(m - 1 - j)
            for d, w in hrows[j].items():
                row[d + 1] = row.get(d + 1, 0) + c * w
        rows.append(row)
    return tuple(rows)


@lru_cache(maxsize=None)
def _motzkin_hel_rows(n: int) -> tuple[dict, ...]:
    hrows: list[dict] = [{0: 1}]
    if n >= 1:
        hrows.append({0: motzkin_number(1)})
    for m in range(2, n + 1):
        row = {d + 1: w for d, w in hrows[m - 2].items()}
        notch = motzkin_number(m) - motzkin_number(m - 2)
        if notch:
            row[0] = row.get(0, 0) + notch
        hrows.append(row)
    rows: list[dict] = [{0: 1}]
    for m in range(1, n + 1):
        row = {d: w for d, w in rows[m - 1].items()}  # leading dot
        for j in range(m - 1):
            c = motzkin_number(m - 2 - j)
            for d, w in hrows[j].items():
                row[d + 1] = row.get(d + 1, 0) + c * w
        rows.append(row)
    return tuple(rows)


def _dots_squared_triple(n: int) -> list[int]:
    """Coefficients of z^4 * L^2 * M^3 with L the dot-run series."""
    mot = [motzkin_number(i) for i in range(n + 1)]
    m2 = [sum(mot[a] * mot[m - a] for a in range(m + 1)) for m in range(n + 1)]
    m3 = [sum(mot[a] * m2[m - a] for a in range(m + 1)) for m in range(n + 1)]
    out = [0] * (n + 1)
    for m in range(4, n + 1):
        out[m] = sum((a + 1) * m3[m - 4 - a] for a in range(m - 3))
    return out


@lru_cache(maxsize=None)
def _motzkin_stem_rows(n: int, by_helices: bool) -> tuple[dict, ...]:
    tail = _dots_squared_triple(n)
    star: list[dict] = []
    for m in range(n + 1):
        row = {0: 1 + tail[m]}  # hairpin dots, or a multiloop ending the stem
        if by_helices:
            if m >= 2:
                for d, w in star[m - 2].items():  # tight nesting, same helix
                    row[d] = row.get(d, 0) + w
            for gap in range(1, m - 1):  # dots on either side start a helix
                for d, w in star[m - 2 - gap].items():
                    row[d + 1] = row.get(d + 1, 0) + (gap + 1) * w
        else:
            for gap in range(0, m - 1):  # any continuation pair extends stm
                for d, w in star[m - 2 - gap].items():
                    row[d + 1] = row.get(d + 1, 0) + (gap + 1) * w
        star.append(row)
    rows: list[dict] = [{0: 1}]
    for m in range(1, n + 1):
        row = dict(rows[m - 1])
        for a in range(m - 1):
            c = motzkin_number(m - 2 - a)
            for d, w in star[a].items():
                row[d + 1] = row.get(d + 1, 0) + c * w
        rows.append(row)
    return tuple(rows)


def _pfold_hel_weights(p: PfoldParams, n: int, hmax: Optional[int] = None) -> list[np.ndarray]:
    """Weight arrays by first-helix length; index h=0 is the no-pair bucket.

    Built from the helix-tracking rewrite of the grammar: the start symbol
    may emit leading dots, then the first "( F )" opens the helix and nested
    p3 productions extend it.
    """
    inside = pfold_inside(p, n)
    S, LS = inside.S[: n + 1], inside.LS[: n + 1]
    if hmax is None:
        hmax = max(0, (n - 2) // 2)
    x = p.p1 * p.q2
    out: list[np.ndarray] = []
    s0 = np.zeros(n + 1)
    if n >= 1:
        s0[1] = p.q1 * p.q2
        for m in range(2, n + 1):
            s0[m] = x * s0[m - 1]
    out.append(s0)
    for h in range(1, hmax + 1):
        # F_f at helix depth h-1: p3^(h-1) q3 LS shifted by the 2(h-1) brackets
        ff = np.zeros(n + 1)
        shift = 2 * (h - 1)
        if shift <= n:
            ff[shift:] = (p.p3 ** (h - 1)) * p.q3 * LS[: n + 1 - shift]
        rhs = np.zeros(n + 1)
        conv = np.convolve(ff, S)[: max(0, n - 1)]
        rhs[2 : 2 + conv.size] += p.p1 * p.p2 * conv
        rhs[2:] += p.q1 * p.p2 * ff[: n - 1]
        sf = np.zeros(n + 1)
        for m in range(1, n + 1):
            sf[m] = x * sf[m - 1] + rhs[m]
        out.append(sf)
    return out


def hel_stm_counts(
    model: Model, n: int, stat: Stat, p: Optional[PfoldParams] = None
) -> CountTable:
    """Finite-size table of a first-helix/first-stem statistic.

    Supported: Dyck x HEL, Motzkin x {HEL, STM, STEM_HELICES}, Pfold x HEL.
    The absent bucket (key None) collects structures with no pair.
    """
    if model is Model.DYCK and stat is Stat.HEL:
        row = _dyck_hel_rows(n)[n]
        entries = {(None if d == 0 else d): w for d, w in row.items() if w}
        if n == 0:
            entries = {None: 1}
        return CountTable(model, n, ("hel",), entries)
    if model is Model.MOTZKIN and stat is Stat.HEL:
        row = _motzkin_hel_rows(n)[n]
    elif model is Model.MOTZKIN and stat is Stat.STM:
        row = _motzkin_stem_rows(n, False)[n]
    elif model is Model.MOTZKIN and stat is Stat.STEM_HELICES:
        row = _motzkin_stem_rows(n, True)[n]
    elif model is Model.PFOLD and stat is Stat.HEL:
        if n < 1:
            raise ZeroMassLength("grammar output has length at least 1")
        weights = _pfold_hel_weights(p or DEFAULT_PFOLD, n)
        entries = {
            (None if h == 0 else h): arr[n]
            for h, arr in enumerate(weights)
            if arr[n] > 0.0
        }
        return CountTable(model, n, ("hel",), entries)
    else:
        raise UnsupportedCombination(f"no {stat.value} table for {model.value}")
    entries = {(None if d == 0 else d): w for d, w in row.items() if w}
    return CountTable(model, n, (stat.value,), entries)


# ---------------------------------------------------------------------------
# exhaustive enumeration (brute-force oracle)

ENUMERATION_GUARD = 16


def _dyck_strings(n: int) -> Iterator[str]:
    if n == 0:
        yield ""
        return
    for j in range(n):
        for inner in _dyck_strings(j):
            enclosed = "(" + inner + ")"
            for rest in _dyck_strings(n - 1 - j):
                yield enclosed + rest


def _motzkin_strings(n: int) -> Iterator[str]:
    if n == 0:
        yield ""
        return
    for rest in _motzkin_strings(n - 1):
        yield "." + rest
    for j in range(n - 1):
        for inner in _motzkin_strings(j):
            enclosed = "(" + inner + ")"
            for rest in _motzkin_strings(n - 2 - j):
                yield enclosed + rest


def enumerate_all(model: Model, n: int) -> Iterator[SecondaryStructure]:
    """Every structure of the given size exactly once.

    Dyck sizes are semilengths, Motzkin sizes are nucleotide counts.  Guarded
    at size 16 against exponential blowup.
    """
    if n > ENUMERATION_GUARD:
        raise SizeTooLarge(f"refusing to enumerate size {n} > {ENUMERATION_GUARD}")
    if model is Model.DYCK:
        strings = _dyck_strings(n)
    elif model is Model.MOTZKIN:
        strings = _motzkin_strings(n)
    else:
        raise UnsupportedCombination("enumeration covers the uniform models only")
    for text in strings:
        yield parse_dot_bracket(text)


# ---------------------------------------------------------------------------
# large-size conditional laws (floating point, scaled recurrences)


@lru_cache(maxsize=None)
def _scaled_motzkin(n: int) -> np.ndarray:
    """Motzkin counts scaled by 3^-length; same recurrence, float arrays."""
    x = 1.0 / 3.0
    mt = np.zeros(n + 1)
    mt[0] = 1.0
    for m in range(1, n + 1):
        arch = float(np.dot(mt[: m - 1], mt[m - 2 :: -1])) if m >= 2 else 0.0
        mt[m] = x * mt[m - 1] + x * x * arch
    return mt


@lru_cache(maxsize=None)
def _scaled_motzkin_powers(n: int, jmax: int) -> tuple[np.ndarray, ...]:
    mt = _scaled_motzkin(n)
    powers = [np.zeros(n + 1)]
    powers[0][0] = 1.0
    for _ in range(jmax):
        powers.append(np.convolve(powers[-1], mt)[: n + 1])
    return tuple(powers)


@lru_cache(maxsize=None)
def _scaled_catalan(n: int) -> np.ndarray:
    x = 0.25
    ct = np.zeros(n + 1)
    ct[0] = 1.0
    for m in range(1, n + 1):
        ct[m] = ct[m - 1] * x * (4 * m - 2) / (m + 1)
    return ct


def _motzkin_joint_law(n: int, jcap: int) -> np.ndarray:
    """P(unp=k, deg=j | length n) as a (k, j) array, j truncated at jcap."""
    x = 1.0 / 3.0
    jcap = min(jcap, n // 2)
    powers = _scaled_motzkin_powers(n, jcap)
    mt = _scaled_motzkin(n)
    law = np.zeros((n + 1, jcap + 1))
    for j in range(jcap + 1):
        kmax = n - 2 * j
        coef = np.empty(kmax + 1)
        coef[0] = 1.0
        if kmax:
            ks = np.arange(1, kmax + 1)
            coef[1:] = np.cumprod(x * (ks + j) / ks)
        law[: kmax + 1, j] = coef * powers[j][kmax::-1] * x ** (2 * j)
    return law / mt[n]


def conditional_law(
    model: Model,
    stat: Stat,
    n: int,
    p: Optional[PfoldParams] = None,
    cap: Optional[int] = None,
) -> np.ndarray:
    """Conditional finite-size distribution of a statistic as a probability
    array indexed by value (index 0 doubles as the absent bucket for HEL).

    Evaluates the same decompositions as the exact tables in scaled floating
    point, so sizes up to a few thousand are cheap; any mass beyond the
    truncation cap (already below double precision at the defaults) is simply
    missing from the array.
    """
    if model is Model.DYCK and stat is Stat.DEG:
        cap = min(cap or 400, n)
        ct = _scaled_catalan(n)
        out = np.zeros(cap + 1)
        if n == 0:
            out[0] = 1.0
            return out
        # l top-level arches leave a Catalan-power coefficient behind
        cpow = np.zeros(n + 1)
        cpow[0] = 1.0
        x = 0.25
        for l in range(1, cap + 1):
            cpow = np.convolve(cpow, ct)[: n + 1]
            if n - l >= 0:
                out[l] = cpow[n - l] * x**l / ct[n]
        return out
    if model is Model.DYCK and stat is Stat.HEL:
        ct = _scaled_catalan(n)
        notch = ct.copy()
        notch[1:] -= ct[:-1] * 0.25
        w = np.convolve(notch, ct)[: n + 1]
        cap = min(cap or 400, n)
        out = np.zeros(cap + 1)
        if n == 0:
            out[0] = 1.0
            return out
        for h in range(1, cap + 1):
            if n - h >= 0:
                out[h] = 0.25**h * w[n - h] / ct[n]
        return out
    if model is Model.MOTZKIN and stat in (Stat.DEG, Stat.UNP):
        law = _motzkin_joint_law(n, cap or 250)
        return law.sum(axis=0) if stat is Stat.DEG else law.sum(axis=1)
    if model is Model.MOTZKIN and stat is Stat.HEL:
        x = 1.0 / 3.0
        mt = _scaled_motzkin(n)
        notch = mt.copy()
        notch[2:] -= mt[:-2] * x * x
        w = np.convolve(notch, mt)[: n + 1]
        geo = x ** np.arange(n + 1)
        u = np.convolve(geo, w)[: n + 1]
        cap = min(cap or 400, max(1, n // 2))
        out = np.zeros(cap + 1)
        out[0] = geo[n] / mt[n]
        for d in range(1, cap + 1):
            if n - 2 * d >= 0:
                out[d] = x ** (2 * d) * u[n - 2 * d] / mt[n]
        return out
    if model is Model.PFOLD:
        params = p or DEFAULT_PFOLD
        mass = pfold_inside(params, n).S[n]
        if stat in (Stat.DEG, Stat.UNP):
            lcap = min(cap or 160, n // 4) if stat is Stat.DEG else min(160, n // 4)
            powers = _arch_powers(params, n, lcap)
            if stat is Stat.DEG:
                out = np.zeros(lcap + 1)
                for l in range(lcap + 1):
                    kmax = n - 4 * l
                    coef = _exterior_coefs(params, l, kmax)
                    if l == 0:
                        coef[0] = 0.0
                    out[l] = params.q1 * float(np.dot(coef, powers[l][n - kmax : n + 1][::-1]))
                return out / mass
            kcap = min(cap or n, n)
            out = np.zeros(kcap + 1)
            for l in range(lcap + 1):
                kmax = min(kcap, n - 4 * l)
                if kmax < 0:
                    break
                coef = _exterior_coefs(params, l, kmax)
                if l == 0:
                    coef[0] = 0.0
                seg = powers[l][n - kmax : n + 1][::-1]
                out[: kmax + 1] += params.q1 * coef * seg
            return out / mass
        if stat is Stat.HEL:
            hcap = min(cap or 120, max(0, (n - 2) // 2))
            weights = _pfold_hel_weights(params, n, hcap)
            return np.array([arr[n] for arr in weights]) / mass
    raise UnsupportedCombination(f"no conditional law for {model.value} x {stat.value}")
