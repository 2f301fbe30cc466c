"""Exact solving of the voltage-loop systems generated by code families.

Every code of a ratio contributes one loop equation over the per-capacitor
voltages x_1..x_n (in input-voltage units) and the output x_o. A complete
family pins all unknowns uniquely; the solution x_j = radix**-j, x_o = ratio
is what lets the bank self-adjust with no feedback. Ranks are computed by
integer fraction-free elimination and solutions by rational Gauss-Jordan,
two deliberately separate routes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

from .errors import DomainError, SingularSystemError
from .numrep import CodeSet, SignedDigitCode
from .topology import kvl_row

Row = tuple[Fraction, ...]


@dataclass(frozen=True)
class SolvabilityReport:
    rank_a: int
    rank_augmented: int
    unknowns: int

    @property
    def unique(self) -> bool:
        return self.rank_a == self.rank_augmented == self.unknowns


@dataclass(frozen=True)
class KvlSystem:
    """Loop equations A x = b with the codes that produced each row.

    Unknowns are labelled V1..Vn then Vo; the last matrix column always
    belongs to the output. codes may be empty for hand-built systems, in
    which case step_up is unavailable.
    """

    matrix: tuple[Row, ...]
    rhs: tuple[Fraction, ...]
    codes: tuple[SignedDigitCode, ...]
    radix: int

    def __post_init__(self) -> None:
        matrix = tuple(tuple(Fraction(x) for x in row) for row in self.matrix)
        rhs = tuple(Fraction(x) for x in self.rhs)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "rhs", rhs)
        if not matrix:
            raise DomainError("a system needs at least one row")
        width = len(matrix[0])
        if width < 2:
            raise DomainError("a system needs at least two unknowns")
        if any(len(row) != width for row in matrix):
            raise DomainError("ragged matrix")
        if len(rhs) != len(matrix):
            raise DomainError("right-hand side length does not match the matrix")
        if self.codes and len(self.codes) != len(matrix):
            raise DomainError("one code per row, or no codes at all")

    @property
    def rows(self) -> int:
        return len(self.matrix)

    @property
    def unknowns(self) -> int:
        return len(self.matrix[0])

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(f"V{j}" for j in range(1, self.unknowns)) + ("Vo",)

    def drop_rows(self, indices: Sequence[int]) -> "KvlSystem":
        """System with the given 0-based rows removed, order preserved."""
        drop = set(indices)
        bad = [i for i in drop if not 0 <= i < self.rows]
        if bad:
            raise DomainError(f"row indices out of range: {sorted(bad)}")
        keep = [i for i in range(self.rows) if i not in drop]
        if not keep:
            raise DomainError("cannot drop every row")
        return replace(
            self,
            matrix=tuple(self.matrix[i] for i in keep),
            rhs=tuple(self.rhs[i] for i in keep),
            codes=tuple(self.codes[i] for i in keep) if self.codes else (),
        )

    def to_text(self) -> str:
        """Aligned rows, rationals as p/q, rhs after a bar."""
        cells = [[str(x) for x in row] for row in self.matrix]
        rhs = [str(x) for x in self.rhs]
        widths = [max(len(r[c]) for r in cells) for c in range(self.unknowns)]
        wr = max(len(x) for x in rhs)
        lines = []
        for row, b in zip(cells, rhs):
            body = "  ".join(cell.rjust(w) for cell, w in zip(row, widths))
            lines.append(f"{body}  |  {b.rjust(wr)}")
        return "\n".join(lines)

    def to_json_dict(self) -> dict:
        return {
            "schema": "scc-forge/1",
            "radix": self.radix,
            "labels": list(self.labels),
            "matrix": [[str(x) for x in row] for row in self.matrix],
            "rhs": [str(x) for x in self.rhs],
            "codes": [c.to_json_dict() for c in self.codes],
        }


def build_system(codes: CodeSet | Sequence[SignedDigitCode]) -> KvlSystem:
    """One loop row per code, in the order given.

    A CodeSet contributes its codes in canonical order; a plain sequence is
    taken verbatim so callers control the row order. All codes must share
    radix and resolution.
    """
    seq = tuple(codes)
    if not seq:
        raise DomainError("no codes")
    radix, resolution = seq[0].radix, seq[0].resolution
    for code in seq:
        if code.radix != radix or code.resolution != resolution:
            raise DomainError("codes mix radix or resolution")
    rows, rhs = [], []
    for code in seq:
        coeffs, b = kvl_row(code)
        rows.append(tuple(Fraction(c) for c in coeffs))
        rhs.append(Fraction(b))
    return KvlSystem(tuple(rows), tuple(rhs), seq, radix)


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    # scale each row to integers; row scaling never changes rank
    out = []
    for row in rows:
        scale = math.lcm(*(x.denominator for x in row)) if row else 1
        out.append([int(x * scale) for x in row])
    return out


def _bareiss_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    """Rank by fraction-free (integer-preserving) elimination."""
    m = _integer_rows(rows)
    nrows, ncols = len(m), len(m[0])
    rank, row, prev = 0, 0, 1
    for col in range(ncols):
        if row >= nrows:
            break
        piv = next((i for i in range(row, nrows) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        for i in range(row + 1, nrows):
            for c in range(col + 1, ncols):
                # exact by construction: every entry stays a minor of the input
                m[i][c] = (m[row][col] * m[i][c] - m[i][col] * m[row][c]) // prev
            m[i][col] = 0
        prev = m[row][col]
        row += 1
        rank += 1
    return rank


def _rref(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over the rationals.

    Pivot rule: columns left to right, smallest available row index; no
    magnitude pivoting is needed in exact arithmetic.
    """
    m = [list(row) for row in rows]
    nrows, ncols = len(m), len(m[0])
    pivots: list[int] = []
    row = 0
    for col in range(ncols):
        if row >= nrows:
            break
        piv = next((i for i in range(row, nrows) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        inv = m[row][col]
        m[row] = [x / inv for x in m[row]]
        for i in range(nrows):
            if i != row and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[row])]
        pivots.append(col)
        row += 1
    return m, pivots


def check_solvable(system: KvlSystem) -> SolvabilityReport:
    """Ranks of A and [A|b]; unique iff both equal the unknown count."""
    rank_a = _bareiss_rank(system.matrix)
    augmented = [row + (b,) for row, b in zip(system.matrix, system.rhs)]
    rank_aug = _bareiss_rank(augmented)
    return SolvabilityReport(rank_a, rank_aug, system.unknowns)


def solve_unique(system: KvlSystem) -> tuple[Fraction, ...]:
    """Exact solution (V1..Vn, Vo) of a uniquely solvable system."""
    report = check_solvable(system)
    if not report.unique:
        raise SingularSystemError(
            "system is not uniquely solvable: rank(A) = "
            f"{report.rank_a}, rank([A|b]) = {report.rank_augmented}, "
            f"unknowns = {report.unknowns}",
            report,
        )
    augmented = [row + (b,) for row, b in zip(system.matrix, system.rhs)]
    reduced, pivots = _rref(augmented)
    # the rational route must agree with the integer route on rank
    if len([p for p in pivots if p < system.unknowns]) != report.rank_a:
        raise AssertionError("elimination routes disagree on rank")
    return tuple(reduced[i][-1] for i in range(system.unknowns))


def redundancy_scores(system: KvlSystem) -> tuple[Fraction, ...]:
    """Per-row dependence scores: column sums of |rref(A transposed)|.

    A score of 1 marks a row every solution needs; a score above 1 marks a
    row expressible through the others.
    """
    transposed = [
        tuple(system.matrix[i][c] for i in range(system.rows))
        for c in range(system.unknowns)
    ]
    reduced, _ = _rref(transposed)
    return tuple(
        sum((abs(reduced[r][c]) for r in range(len(reduced))), Fraction(0))
        for c in range(system.rows)
    )


def find_redundant(system: KvlSystem) -> list[int]:
    """0-based indices of rows that can be eliminated without losing rank."""
    return [i for i, s in enumerate(redundancy_scores(system)) if s > 1]


def sort_codes_by_zeros(codes: CodeSet | Sequence[SignedDigitCode]) -> list[SignedDigitCode]:
    """Codes sorted by descending count of zero digits; ties keep input order.

    Rows whose codes idle more capacitors end up first, which is the order
    measurement tables are reported in.
    """
    return sorted(codes, key=lambda c: -c.zero_count)


def step_up(system: KvlSystem) -> KvlSystem:
    """The reciprocal-ratio system of the same codes.

    Rewriting each loop around the output instead of the source turns row
    (A_1..A_n, -1 | -a0) into (A_1..A_n, a0 | 1); the solution then reads
    voltages in output units and Vo becomes the reciprocal ratio. Only
    meaningful for systems built from codes.
    """
    if not system.codes:
        raise DomainError("step_up needs the generating codes")
    rows, rhs = [], []
    for code in system.codes:
        rows.append(tuple(Fraction(x) for x in (*code.digits, code.a0)))
        rhs.append(Fraction(1))
    return KvlSystem(tuple(rows), tuple(rhs), system.codes, system.radix)
