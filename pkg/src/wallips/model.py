"""Transition rules and the ergodicity criterion for one-sided systems.

A rule assigns to every neighborhood pattern (s0, s1) a probability vector
over the alphabet.  Site j resamples its state from the vector for the
pattern (state(j), state(j+1)) at the arrival times of its rate-1 Poisson
clock, so information flows from right to left only.

This module holds the rule algebra: the birth/death coefficients beta and
delta of a designated long-lived state, the sqrt(2) criterion for
ergodicity, the time-scaling and state-swap transforms, and the classifier
that places two-state parameters into proven-ergodic regions of the
parameter cube.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

SQRT2 = math.sqrt(2.0)

_ROW_TOL = 1e-12
# Rational comparisons (equality, halves, sums of probabilities) are done on
# integers after quantizing to 12 decimals; raw floats would misplace grid
# points (0.1 + 0.2 > 0.3).  The sqrt(2) boundary is irrational and stays in
# float arithmetic.
_QSCALE = 10**12


class MalformedRule(ValueError):
    """Transition table fails shape, range, or normalization checks."""


def _q(x: float) -> int:
    """Quantize a probability to an integer at 12 decimals."""
    return round(x * _QSCALE)


#: Largest supported alphabet. Coefficient extraction and the classifier
#: enumerate all n^2 neighborhood patterns exactly, which stays cheap up to
#: this size; larger alphabets are rejected rather than silently slow.
MAX_STATES = 16


@dataclass(frozen=True)
class Alphabet:
    """Finite state set; states are the indices 0..size-1."""

    size: int

    def __post_init__(self) -> None:
        if self.size < 2:
            raise MalformedRule(f"alphabet needs at least 2 states, got {self.size}")
        if self.size > MAX_STATES:
            raise MalformedRule(
                f"alphabet of size {self.size} exceeds the supported cap {MAX_STATES}"
            )


@dataclass(frozen=True, eq=False)
class TransitionRule:
    """Homogeneous one-sided rule: table[s0, s1, b] = P(next = b | s0 s1)."""

    table: np.ndarray

    def __post_init__(self) -> None:
        t = np.ascontiguousarray(self.table, dtype=np.float64)
        if t.ndim != 3 or len(set(t.shape)) != 1:
            raise MalformedRule(f"table must be (n, n, n), got shape {t.shape}")
        Alphabet(t.shape[0])
        _check_table(t)
        t = t.copy()
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def n(self) -> int:
        return self.table.shape[0]

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.n)


def _check_table(t: np.ndarray) -> None:
    if np.any(t < 0.0) or np.any(t > 1.0):
        raise MalformedRule("table entries must lie in [0, 1]")
    sums = t.sum(axis=2)
    bad = np.abs(sums - 1.0) > _ROW_TOL
    if np.any(bad):
        s0, s1 = np.argwhere(bad)[0]
        raise MalformedRule(
            f"probability vector for pattern ({s0}, {s1}) sums to {sums[s0, s1]!r}"
        )


@dataclass(frozen=True)
class SimpleParams:
    """Two-state rule coordinates (P(1|11), P(1|10), P(1|01), P(1|00))."""

    p11: float
    p10: float
    p01: float
    p00: float

    def __post_init__(self) -> None:
        for name in ("p11", "p10", "p01", "p00"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise MalformedRule(f"{name}={v} outside [0, 1]")

    def to_rule(self) -> TransitionRule:
        t = np.empty((2, 2, 2))
        t[1, 1, 1] = self.p11
        t[1, 0, 1] = self.p10
        t[0, 1, 1] = self.p01
        t[0, 0, 1] = self.p00
        t[:, :, 0] = 1.0 - t[:, :, 1]
        return TransitionRule(t)

    @classmethod
    def from_rule(cls, rule: TransitionRule) -> "SimpleParams":
        if rule.n != 2:
            raise MalformedRule(f"simple rules have 2 states, got {rule.n}")
        t = rule.table
        return cls(p11=t[1, 1, 1], p10=t[1, 0, 1], p01=t[0, 1, 1], p00=t[0, 0, 1])


@dataclass(frozen=True)
class ValidationReport:
    n_states: int
    positive_rates: bool


def validate(rule: TransitionRule | np.ndarray) -> ValidationReport:
    """Check a rule table and report whether it has positive rates.

    Positive rates means the identity action is never certain: for every
    pattern (s0, s1) the probability of keeping state s0 is below 1.  Rules
    violating this (the East model) are accepted with the flag false; only
    genuinely malformed tables raise.
    """
    if not isinstance(rule, TransitionRule):
        rule = TransitionRule(np.asarray(rule))
    t = rule.table
    n = rule.n
    idx = np.arange(n)
    keep = t[idx[:, None], idx[None, :], idx[:, None]]  # P(s0 | s0 s1)
    return ValidationReport(n_states=n, positive_rates=bool(np.all(keep < 1.0)))


# ---------------------------------------------------------------------------
# criterion coefficients
# ---------------------------------------------------------------------------


def beta_delta(rule: TransitionRule, a: int) -> tuple[float, float, float]:
    """Birth/death coefficients of state a.

    beta is the worst-case birth probability min over all n^2 patterns of
    P(a|pattern); delta the worst-case death probability max over patterns
    with s0 = a of 1 - P(a|pattern); beta_eff restricts the beta minimum to
    patterns with s0 != a (the limit the time-scaling transform attains).
    Exact enumeration over the table, no sampling.
    """
    if not 0 <= a < rule.n:
        raise ValueError(f"state {a} outside alphabet of size {rule.n}")
    pa = rule.table[:, :, a]
    beta = float(pa.min())
    delta = float((1.0 - pa[a, :]).max())
    beta_eff = float(np.delete(pa, a, axis=0).min())
    return beta, delta, beta_eff


@dataclass(frozen=True)
class CriterionReport:
    state: int
    beta: float
    delta: float
    beta_eff: float
    raw_holds: bool
    eff_holds: bool
    drift_unscaled: float
    drift_scaled: float
    degenerate: bool


def criterion(rule: TransitionRule, a: int) -> CriterionReport:
    """Evaluate the sqrt(2) ergodicity criterion for designated state a.

    raw_holds tests delta < sqrt(2)*beta with the raw coefficient;
    eff_holds substitutes beta_eff, the effective birth rate after time
    scaling.  Strict inequalities resolve the degenerate cases by
    themselves: delta=0 with beta>0 holds, beta=0 fails.  The drift fields
    are NaN when their denominators vanish; `degenerate` flags that.

    drift_unscaled is the expected one-step increment of the gap walk
    Z = X - Y at raw beta; drift_scaled is its small-lambda limit
    -2*beta_eff/delta + delta/beta_eff, negative exactly when eff_holds.
    """
    beta, delta, beta_eff = beta_delta(rule, a)
    raw_holds = delta < SQRT2 * beta
    eff_holds = delta < SQRT2 * beta_eff
    degenerate = beta == 0.0 or delta == 0.0 or beta_eff == 0.0
    if beta > 0.0 and delta > 0.0:
        drift_unscaled = (
            -(beta + delta * delta) / (delta * (beta + delta))
            + delta / (beta * (beta + delta))
            - beta / (delta * (beta + delta))
        )
    else:
        drift_unscaled = math.nan
    if beta_eff > 0.0 and delta > 0.0:
        drift_scaled = -2.0 * beta_eff / delta + delta / beta_eff
    else:
        drift_scaled = math.nan
    return CriterionReport(
        state=a,
        beta=beta,
        delta=delta,
        beta_eff=beta_eff,
        raw_holds=raw_holds,
        eff_holds=eff_holds,
        drift_unscaled=drift_unscaled,
        drift_scaled=drift_scaled,
        degenerate=degenerate,
    )


# ---------------------------------------------------------------------------
# parameter-space transforms
# ---------------------------------------------------------------------------


def time_scale(rule: TransitionRule, lam: float) -> TransitionRule:
    """Mix the rule with the identity: P^lam = (1-lam)*I + lam*P.

    Slowing every clock by the factor lam leaves the process law unchanged
    up to a time change, so ergodicity is invariant.  delta scales exactly
    linearly in lam while beta tends to lam*beta_eff, which is how the
    criterion reaches its effective form.
    """
    if not 0.0 < lam <= 1.0:
        raise ValueError(f"lam must lie in (0, 1], got {lam}")
    t = rule.table * lam
    for s0 in range(rule.n):
        t[s0, :, s0] += 1.0 - lam
    return TransitionRule(t)


def swap_states(params: SimpleParams) -> SimpleParams:
    """Exchange the roles of states 0 and 1 (an involution of the cube)."""
    return SimpleParams(
        p11=1.0 - params.p00,
        p10=1.0 - params.p01,
        p01=1.0 - params.p10,
        p00=1.0 - params.p11,
    )


def relabel(rule: TransitionRule, perm) -> TransitionRule:
    """Rename states through a permutation; perm[s] is the new name of s."""
    p = np.asarray(perm, dtype=np.int64)
    n = rule.n
    if p.shape != (n,) or not np.array_equal(np.sort(p), np.arange(n)):
        raise ValueError(f"perm must permute 0..{n - 1}, got {perm}")
    inv = np.argsort(p)
    return TransitionRule(rule.table[inv][:, inv][:, :, inv])


# ---------------------------------------------------------------------------
# region classification on the reduced cube
# ---------------------------------------------------------------------------


class Region(Enum):
    NOT_POSITIVE_RATES = "not_positive_rates"
    EAST_LINE = "east_line"
    PRIOR_COVERED = "prior_covered"
    NEWLY_COVERED = "newly_covered"
    OPEN = "open"


PRIOR_CLAUSES = ("p10<1/2", "p10<p01+p00", "p01<p00")


@dataclass(frozen=True)
class RegionClass:
    region: Region
    clause: str | None
    report: CriterionReport


def classify_simple(params: SimpleParams) -> RegionClass:
    """Place two-state parameters into the proven-ergodic region map.

    The map is meant for the reduced cube p11 = 0 and its p00 boundary
    face; reduce other parameters via time_scale/swap_states first.
    Evaluation order: the East line, the non-positive-rates boundary, the
    previously covered union (first satisfied clause reported), then
    NewlyCovered where the effective criterion holds for state 0, Open
    otherwise.  Rational comparisons are exact on 12-decimal inputs.
    """
    one = _QSCALE
    q11, q10 = _q(params.p11), _q(params.p10)
    q01, q00 = _q(params.p01), _q(params.p00)
    rep = criterion(params.to_rule(), 0)
    if q10 == one and q00 == 0 and q11 == q01 and q01 > 0:
        return RegionClass(Region.EAST_LINE, None, rep)
    if q11 == one or q10 == one or q01 == 0:
        return RegionClass(Region.NOT_POSITIVE_RATES, None, rep)
    if q01 > 0 and q00 > 0:
        if 2 * q10 < one:
            return RegionClass(Region.PRIOR_COVERED, PRIOR_CLAUSES[0], rep)
        if q10 < q01 + q00:
            return RegionClass(Region.PRIOR_COVERED, PRIOR_CLAUSES[1], rep)
        if q01 < q00:
            return RegionClass(Region.PRIOR_COVERED, PRIOR_CLAUSES[2], rep)
    if rep.eff_holds:
        return RegionClass(Region.NEWLY_COVERED, None, rep)
    return RegionClass(Region.OPEN, None, rep)
