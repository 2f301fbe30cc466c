"""Charge-redistribution simulation of a binary flying-capacitor bank.

Each slot connects the capacitors named by a code between the rails and lets
one packet of charge Q move instantaneously; switch and wire resistance only
shapes the current waveform, not where the voltages settle, so the lossless
step captures the steady state exactly. Cycling a code sequence drives the
bank to the voltages the loop equations pin, from any starting point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence, TextIO

import numpy as np

from .errors import DomainError
from .numrep import SignedDigitCode


@dataclass(frozen=True)
class BankState:
    """Capacitances and present voltages of the bank."""

    flying_caps: tuple[float, ...]
    output_cap: float
    flying_voltages: tuple[float, ...]
    output_voltage: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "flying_caps", tuple(float(c) for c in self.flying_caps))
        object.__setattr__(
            self, "flying_voltages", tuple(float(v) for v in self.flying_voltages)
        )
        if not self.flying_caps:
            raise DomainError("bank needs at least one flying capacitor")
        if len(self.flying_voltages) != len(self.flying_caps):
            raise DomainError("one voltage per flying capacitor")
        if any(c <= 0 for c in self.flying_caps) or self.output_cap <= 0:
            raise DomainError("capacitances must be positive")
        # negative voltages are legitimate transients; non-finite are not
        if not all(map(math.isfinite, (*self.flying_voltages, self.output_voltage))):
            raise DomainError("voltages must be finite")

    @property
    def size(self) -> int:
        return len(self.flying_caps)


class StepResult(NamedTuple):
    next_state: BankState
    charge: float


class TraceRecord(NamedTuple):
    iteration: int
    flying_voltages: tuple[float, ...]
    output_voltage: float
    charge: float


@dataclass(frozen=True)
class SimTrace:
    """Per-slot history of a simulation run.

    adjustment_iterations counts the slots executed before the first period
    whose boundary-to-boundary voltage change stayed below tolerance; None
    when the run never converged.
    """

    records: tuple[TraceRecord, ...]
    converged: bool
    adjustment_iterations: int | None
    final_state: BankState


def step(state: BankState, code: SignedDigitCode, vin: float) -> StepResult:
    """One redistribution slot: equalize the loop, return the moved charge.

    Engaged capacitors and the output settle to the joint solution of charge
    conservation plus the voltage loop; bypassed capacitors are untouched.
    Positive charge flows into the output.
    """
    if code.radix != 2:
        raise DomainError("redistribution model covers radix 2 banks only")
    if code.resolution != state.size:
        raise DomainError("code resolution does not match the bank")
    engaged = [j for j, d in enumerate(code.digits) if d != 0]
    if not engaged and not code.a0:
        raise DomainError("code engages nothing")
    e = len(engaged)
    # unknowns: engaged voltages, then the output voltage, then Q
    a = np.zeros((e + 2, e + 2))
    b = np.zeros(e + 2)
    for row, j in enumerate(engaged):
        a[row, row] = 1.0
        a[row, e + 1] = code.digits[j] / state.flying_caps[j]
        b[row] = state.flying_voltages[j]
    a[e, e] = 1.0
    a[e, e + 1] = -1.0 / state.output_cap
    b[e] = state.output_voltage
    for row, j in enumerate(engaged):
        a[e + 1, row] = code.digits[j]
    a[e + 1, e] = -1.0
    b[e + 1] = -code.a0 * vin
    x = np.linalg.solve(a, b)
    volts = list(state.flying_voltages)
    for row, j in enumerate(engaged):
        volts[j] = float(x[row])
    next_state = BankState(state.flying_caps, state.output_cap, tuple(volts), float(x[e]))
    return StepResult(next_state, float(x[e + 1]))


def run(
    state: BankState,
    sequence: Sequence[SignedDigitCode],
    vin: float,
    tol: float | None = None,
    max_periods: int = 500,
) -> SimTrace:
    """Cycle the code sequence until the bank settles or the budget runs out.

    Convergence is judged at period boundaries: the largest voltage change
    over one full pass of the sequence must drop below tol (default
    1e-9 * |vin|). A run that exhausts max_periods returns its trace with
    converged False rather than raising.
    """
    seq = tuple(sequence)
    if not seq:
        raise DomainError("empty code sequence")
    if tol is None:
        tol = 1e-9 * abs(vin)
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    if max_periods < 0:
        raise DomainError("max_periods must be non-negative")
    records: list[TraceRecord] = []
    current = state
    iteration = 0
    converged = False
    adjustment: int | None = None
    for period in range(1, max_periods + 1):
        before = (*current.flying_voltages, current.output_voltage)
        for code in seq:
            current, charge = step(current, code, vin)
            records.append(
                TraceRecord(iteration, current.flying_voltages, current.output_voltage, charge)
            )
            iteration += 1
        after = (*current.flying_voltages, current.output_voltage)
        if max(abs(x - y) for x, y in zip(after, before)) < tol:
            converged = True
            adjustment = (period - 1) * len(seq)
            break
    return SimTrace(tuple(records), converged, adjustment, current)


def charge_locus(trace: SimTrace, topologies: int) -> list[tuple[float, float]]:
    """Polar footprint of the charge series: slot angle versus |Q|.

    Slot k maps to angle 2*pi*(k mod topologies)/topologies; a settled bank
    collapses every spoke toward zero radius.
    """
    if topologies < 1:
        raise DomainError("topologies must be positive")
    return [
        (2.0 * math.pi * (rec.iteration % topologies) / topologies, abs(rec.charge))
        for rec in trace.records
    ]


def write_trace_csv(trace: SimTrace, stream: TextIO) -> None:
    """iteration,V1..Vn,Vo,Q rows; header included."""
    size = trace.final_state.size
    header = ["iteration"] + [f"V{j}" for j in range(1, size + 1)] + ["Vo", "Q"]
    stream.write(",".join(header) + "\n")
    for rec in trace.records:
        cells = [str(rec.iteration)]
        cells += [f"{v:.12g}" for v in rec.flying_voltages]
        cells += [f"{rec.output_voltage:.12g}", f"{rec.charge:.12g}"]
        stream.write(",".join(cells) + "\n")


def write_locus_csv(points: Iterable[tuple[float, float]], stream: TextIO) -> None:
    stream.write("angle_rad,abs_charge\n")
    for angle, radius in points:
        stream.write(f"{angle:.12g},{radius:.12g}\n")
