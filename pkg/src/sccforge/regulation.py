"""Output regulation planning: ratio dithering and LDO pre-selection.

A bank with fixed resolution only offers the lattice m / 2**n, so fine
regulation comes from either time-averaging two adjacent lattice ratios
(dithering) or picking the cheapest ratio whose output clears a linear
regulator's dropout (LDO pre-selection).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import DomainError, ResourceLimitError
from .numrep import TargetRatio

_MAX_PERIOD_LIMIT = 10_000


@dataclass(frozen=True)
class DitherPlan:
    """Repeating schedule: ratios[i] for weights[i] periods each."""

    ratios: tuple[TargetRatio, ...]
    weights: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.ratios or len(self.ratios) != len(self.weights):
            raise DomainError("one positive weight per ratio")
        if any(w < 1 for w in self.weights):
            raise DomainError("weights must be positive")
        if len(set(self.ratios)) != len(self.ratios):
            raise DomainError("duplicate ratio in plan")

    @property
    def period(self) -> int:
        return sum(self.weights)

    def to_json_dict(self) -> dict:
        return {
            "schema": "scc-forge/1",
            "ratios": [str(r) for r in self.ratios],
            "weights": list(self.weights),
            "period": self.period,
            "average": str(dither_average(self)),
        }


def dither_average(plan: DitherPlan) -> Fraction:
    """Exact time-averaged ratio of a plan."""
    total = sum(
        (w * r.value for r, w in zip(plan.ratios, plan.weights)), Fraction(0)
    )
    return total / plan.period


def _as_fraction(target) -> Fraction:
    # floats are read at their printed decimal value, not their binary one
    if isinstance(target, float):
        return Fraction(str(target))
    return Fraction(target)


def dither_plan(target, resolution: int, max_period: int) -> DitherPlan:
    """Cheapest dither between adjacent lattice ratios approximating target.

    Minimizes |average - target| over schedules of up to max_period periods;
    ties go to the shorter schedule, then to the lower average. A target
    sitting exactly on the lattice returns the single-ratio plan. Targets
    outside [1/2**n, (2**n - 1)/2**n] are unreachable and rejected.
    """
    if resolution < 1:
        raise DomainError("resolution must be at least 1")
    if max_period < 1:
        raise DomainError("max_period must be at least 1")
    if max_period > _MAX_PERIOD_LIMIT:
        raise ResourceLimitError(f"max_period beyond {_MAX_PERIOD_LIMIT}")
    t = _as_fraction(target)
    denom = 2**resolution
    if not Fraction(1, denom) <= t <= Fraction(denom - 1, denom):
        raise DomainError(
            f"target {t} outside the reachable band "
            f"[1/{denom}, {denom - 1}/{denom}]"
        )
    scaled = t * denom
    if scaled.denominator == 1:
        return DitherPlan((TargetRatio(int(scaled), 2, resolution),), (1,))
    m_lo = int(scaled)  # floor; scaled is positive and non-integer here
    best = None  # (error, period, average, k)
    for period in range(1, max_period + 1):
        ideal = (scaled - m_lo) * period
        for k in {int(ideal), int(ideal) + 1}:
            if not 0 <= k <= period:
                continue
            average = Fraction(period * m_lo + k, period * denom)
            key = (abs(t - average), period, average)
            if best is None or key < best[0]:
                best = (key, period, k)
    _, period, k = best
    lo = TargetRatio(m_lo, 2, resolution)
    if k == 0:
        return DitherPlan((lo,), (1,))
    hi = TargetRatio(m_lo + 1, 2, resolution)
    if k == period:
        return DitherPlan((hi,), (1,))
    return DitherPlan((lo, hi), (period - k, k))


class RatioChoice(NamedTuple):
    """A lattice ratio used straight (step-down) or inverted (step-up)."""

    ratio: TargetRatio
    step_up: bool

    @property
    def gain(self) -> Fraction:
        return 1 / self.ratio.value if self.step_up else self.ratio.value

    def __str__(self) -> str:
        denom = self.ratio.radix**self.ratio.resolution
        if self.step_up:
            return f"{denom}/{self.ratio.m}"
        return str(self.ratio)


def ldo_select_ratio(
    vin: float,
    vout: float,
    dropout: float,
    resolution: int,
    allow_step_up: bool = True,
) -> RatioChoice:
    """Smallest conversion gain that still clears the regulator's dropout.

    Scans the step-down lattice m/2**n in ascending gain, then (when
    allowed) the step-up lattice 2**n/m. Headroom beyond vout + dropout is
    pure dissipation, so smaller sufficient gain means better efficiency.
    """
    if vin <= 0 or vout <= 0:
        raise DomainError("vin and vout must be positive")
    if dropout < 0:
        raise DomainError("dropout must be non-negative")
    if resolution < 1:
        raise DomainError("resolution must be at least 1")
    need = vout + dropout
    denom = 2**resolution
    for m in range(1, denom):
        if Fraction(m, denom) * vin >= need:
            return RatioChoice(TargetRatio(m, 2, resolution), False)
    if allow_step_up:
        for m in range(denom - 1, 0, -1):
            if Fraction(denom, m) * vin >= need:
                return RatioChoice(TargetRatio(m, 2, resolution), True)
    raise DomainError(
        f"no ratio at resolution {resolution} lifts {vin:g} V to {need:g} V"
        + ("" if allow_step_up else " without step-up")
    )


def ldo_efficiency_bound(vout: float, dropout: float) -> float:
    """Best-case efficiency of the downstream regulator itself."""
    if vout <= 0:
        raise DomainError("vout must be positive")
    if dropout < 0:
        raise DomainError("dropout must be non-negative")
    return vout / (vout + dropout)
