"""Signed-digit representations of switched-capacitor conversion ratios.

A ratio m / radix**n admits many representations of the form

    value = a0 + sum_j A_j * radix**-j,    a0 in {0, 1},  |A_j| <= radix - 1,

and each one corresponds to a distinct way of stacking the flying capacitors
of an n-capacitor bank. This module generates the complete code family of a
ratio by two independent routes (carry spawning and full lattice enumeration)
and, for binary banks, produces a cyclic schedule that balances how often and
in which direction each capacitor is engaged.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, ResourceLimitError

_ENUMERATION_CELL_LIMIT = 10**7
_BALANCE_RESOLUTION_LIMIT = 10
_BALANCE_NODE_BUDGET = 500_000


@dataclass(frozen=True, order=True)
class TargetRatio:
    """A conversion ratio m / radix**resolution strictly between 0 and 1."""

    m: int
    radix: int
    resolution: int

    def __post_init__(self) -> None:
        if self.radix < 2:
            raise DomainError(f"radix must be at least 2, got {self.radix}")
        if self.resolution < 1:
            raise DomainError(f"resolution must be at least 1, got {self.resolution}")
        top = self.radix**self.resolution - 1
        if not 1 <= self.m <= top:
            raise DomainError(
                f"numerator must lie in [1, {top}] for radix {self.radix} "
                f"at resolution {self.resolution}, got {self.m}"
            )

    @classmethod
    def from_fraction(cls, numerator: int, denominator: int, radix: int = 2) -> "TargetRatio":
        """Build from numerator/denominator where the denominator is a radix power."""
        n, d = 0, denominator
        while d > 1 and d % radix == 0:
            d //= radix
            n += 1
        if d != 1 or n < 1:
            raise DomainError(
                f"denominator {denominator} is not a power of {radix} greater than 1"
            )
        return cls(numerator, radix, n)

    @property
    def value(self) -> Fraction:
        return Fraction(self.m, self.radix**self.resolution)

    @property
    def effective_resolution(self) -> int:
        """Digit positions that remain once trailing zeros of the plain expansion drop."""
        m, n = self.m, self.resolution
        while m % self.radix == 0:
            m //= self.radix
            n -= 1
        return n

    def reduced(self) -> "TargetRatio":
        """The same value expressed at its effective resolution."""
        shift = self.resolution - self.effective_resolution
        return TargetRatio(self.m // self.radix**shift, self.radix, self.resolution - shift)

    def __str__(self) -> str:
        return f"{self.m}/{self.radix**self.resolution}"


@dataclass(frozen=True)
class SignedDigitCode:
    """One representation a0 + sum_j digits[j-1] * radix**-j.

    a0 is the source-connection bit. Digit index 1 is the most significant;
    a positive digit stacks its capacitor subtractively during charge
    redistribution, a negative digit additively, zero leaves it bypassed.
    """

    a0: int
    digits: tuple[int, ...]
    radix: int = 2

    def __post_init__(self) -> None:
        object.__setattr__(self, "digits", tuple(int(d) for d in self.digits))
        if self.a0 not in (0, 1):
            raise DomainError(f"a0 must be 0 or 1, got {self.a0}")
        if self.radix < 2:
            raise DomainError(f"radix must be at least 2, got {self.radix}")
        if not self.digits:
            raise DomainError("a code needs at least one fractional digit")
        limit = self.radix - 1
        for j, d in enumerate(self.digits, start=1):
            if not -limit <= d <= limit:
                raise DomainError(f"digit {j} outside [-{limit}, {limit}]: {d}")

    @property
    def resolution(self) -> int:
        return len(self.digits)

    @property
    def value(self) -> Fraction:
        acc = Fraction(self.a0)
        for j, d in enumerate(self.digits, start=1):
            acc += Fraction(d, self.radix**j)
        return acc

    @property
    def zero_count(self) -> int:
        return sum(1 for d in self.digits if d == 0)

    @property
    def engaged_count(self) -> int:
        return len(self.digits) - self.zero_count

    def to_text(self) -> str:
        """Space-separated digits, a0 first: "1 -1 0 -1"."""
        return " ".join(str(x) for x in (self.a0, *self.digits))

    def to_json_dict(self) -> dict:
        return {"a0": self.a0, "digits": list(self.digits), "radix": self.radix}

    @classmethod
    def from_json_dict(cls, data: dict) -> "SignedDigitCode":
        return cls(data["a0"], tuple(data["digits"]), data.get("radix", 2))


def code_value(code: SignedDigitCode) -> Fraction:
    """Exact value represented by a code."""
    return code.value


def _canonical_key(code: SignedDigitCode) -> tuple[int, ...]:
    # ascending by the digit tuple read least-significant first; this is the
    # order a full factorial sweep with the last digit fastest meets matches
    return tuple(reversed(code.digits))


@dataclass(frozen=True)
class CodeSet:
    """The complete, duplicate-free code family of one ratio.

    Codes are kept in canonical order regardless of construction order. The
    family of any ratio has at least effective_resolution + 1 members, and in
    every digit column positive and negative entries either both occur or
    neither does; both facts are checked on construction.
    """

    ratio: TargetRatio
    codes: tuple[SignedDigitCode, ...]

    def __post_init__(self) -> None:
        codes = tuple(sorted(self.codes, key=_canonical_key))
        object.__setattr__(self, "codes", codes)
        if not codes:
            raise DomainError("empty code set")
        seen = set()
        for code in codes:
            if code.radix != self.ratio.radix:
                raise DomainError("code radix does not match the ratio")
            if code.resolution != self.ratio.resolution:
                raise DomainError("code resolution does not match the ratio")
            if code.value != self.ratio.value:
                raise DomainError(f"code {code.to_text()!r} does not represent {self.ratio}")
            key = (code.a0, code.digits)
            if key in seen:
                raise DomainError(f"duplicate code {code.to_text()!r}")
            seen.add(key)
        if len(codes) < self.ratio.effective_resolution + 1:
            raise DomainError(
                f"{len(codes)} codes cannot cover a ratio of effective resolution "
                f"{self.ratio.effective_resolution}"
            )
        for k in range(self.ratio.resolution):
            has_pos = any(c.digits[k] > 0 for c in codes)
            has_neg = any(c.digits[k] < 0 for c in codes)
            if has_pos != has_neg:
                raise DomainError(f"digit column {k + 1} is one-sided")

    def __iter__(self):
        return iter(self.codes)

    def __len__(self) -> int:
        return len(self.codes)

    def __getitem__(self, idx):
        return self.codes[idx]

    def __contains__(self, code) -> bool:
        return code in self.codes

    def as_set(self) -> frozenset[tuple[int, tuple[int, ...]]]:
        return frozenset((c.a0, c.digits) for c in self.codes)


def conventional_code(m: int, radix: int, resolution: int) -> SignedDigitCode:
    """Plain base-radix expansion of m / radix**resolution, a0 = 0."""
    TargetRatio(m, radix, resolution)  # bounds check
    digits = tuple((m // radix ** (resolution - j)) % radix for j in range(1, resolution + 1))
    return SignedDigitCode(0, digits, radix)


def spawn_codes(ratio: TargetRatio) -> CodeSet:
    """Every code of the ratio, found by carry spawning.

    Each positive digit of a known code spawns a child with that digit
    lowered by the radix and a +1 carry sent one position left. The carry
    cascades while it pushes a digit past radix - 1; a carry falling off the
    left end raises a0. Starting from the conventional code this closure
    visits the complete family.
    """
    r = ratio.radix
    root = conventional_code(ratio.m, r, ratio.resolution)
    seen = {(root.a0, root.digits)}
    frontier = [(root.a0, root.digits)]
    while frontier:
        a0, digits = frontier.pop()
        for j, d in enumerate(digits):
            if d <= 0:
                continue
            child = list(digits)
            child[j] = d - r
            b0, k, carry = a0, j - 1, 1
            while carry:
                if k < 0:
                    b0 += 1
                    carry = 0
                elif child[k] + 1 > r - 1:
                    child[k] += 1 - r
                    k -= 1
                else:
                    child[k] += 1
                    carry = 0
            # for ratios below unity the carry can never push a0 past 1
            if b0 > 1:
                raise AssertionError("carry overflow past the source bit")
            key = (b0, tuple(child))
            if key not in seen:
                seen.add(key)
                frontier.append(key)
    return CodeSet(ratio, tuple(SignedDigitCode(a, d, r) for a, d in seen))


def enumerate_codes(ratio: TargetRatio) -> CodeSet:
    """Every code of the ratio, by exhaustive sweep of the digit lattice.

    Deliberately independent of spawn_codes so the two generators can be
    cross-checked. The sweep size (2*radix - 1)**resolution is capped.
    """
    r, n = ratio.radix, ratio.resolution
    cells = (2 * r - 1) ** n
    if cells > _ENUMERATION_CELL_LIMIT:
        raise ResourceLimitError(
            f"enumeration would visit {cells} digit tuples (limit {_ENUMERATION_CELL_LIMIT})"
        )
    want_plain = ratio.m  # integer numerator when a0 == 0
    want_carry = ratio.m - r**n  # and when a0 == 1
    found = []
    for digits in itertools.product(range(-(r - 1), r), repeat=n):
        f = 0
        for d in digits:
            f = f * r + d
        if f == want_plain:
            found.append(SignedDigitCode(0, digits, r))
        elif f == want_carry:
            found.append(SignedDigitCode(1, digits, r))
    return CodeSet(ratio, tuple(found))


def _matched_cells(m: int, n: int) -> list[SignedDigitCode]:
    # One code per sign pattern: engaging the capacitors of mask row i with
    # the signs of row j gives numerator sum_k mask[k]*(+-1)*2**(n-1-k); the
    # signed subset sums of distinct powers of two tile an integer interval,
    # so exactly one mask row lands on m (a0 = 0) or m - 2**n (a0 = 1).
    size = 1 << n
    rows = [[(i >> (n - 1 - k)) & 1 for k in range(n)] for i in range(size)]
    cells: list[SignedDigitCode] = []
    for j in range(size):
        sign = rows[j]
        hit = None
        for i in range(size):
            mask = rows[i]
            f = 0
            for k in range(n):
                if mask[k]:
                    f += (-1 if sign[k] else 1) << (n - 1 - k)
            if f == m:
                a0 = 0
            elif f == m - size:
                a0 = 1
            else:
                continue
            if hit is not None:
                raise AssertionError("sign pattern matched two mask rows")
            hit = SignedDigitCode(
                a0, tuple((-1 if sign[k] else 1) * mask[k] for k in range(n)), 2
            )
        if hit is None:
            raise AssertionError("sign pattern matched no mask row")
        cells.append(hit)
    return cells


class _BudgetExceeded(Exception):
    pass


def _arrange(cells: list[SignedDigitCode], n: int, strict: bool) -> list[SignedDigitCode] | None:
    """Order the cell multiset so per-capacitor engagements alternate in sign.

    In strict mode consecutive engagements of each capacitor (wrap included)
    must also be floor(2**n/q) to ceil(2**n/q) rows apart, q being that
    capacitor's total engagement count over the cycle.
    """
    size = 1 << n
    counts = Counter((c.a0, c.digits) for c in cells)
    by_key = {(c.a0, c.digits): c for c in cells}
    order = sorted(counts, key=lambda key: tuple(reversed(key[1])))
    qcol = [sum(cnt for (_, dg), cnt in counts.items() if dg[k]) for k in range(n)]
    gmin = [size // q if q else 0 for q in qcol]
    gmax = [-(-size // q) if q else 0 for q in qcol]
    last: list[tuple[int, int] | None] = [None] * n
    first: list[tuple[int, int] | None] = [None] * n
    seq: list[SignedDigitCode] = []
    nodes = 0

    def admissible(code: SignedDigitCode, pos: int) -> bool:
        for k in range(n):
            d = code.digits[k]
            if d == 0:
                continue
            s = 1 if d > 0 else -1
            if last[k] is not None:
                li, ls = last[k]
                if ls == s:
                    return False
                if strict and not gmin[k] <= pos - li <= gmax[k]:
                    return False
        return True

    def wrap_ok() -> bool:
        for k in range(n):
            if first[k] is None:
                continue
            fi, fs = first[k]
            li, ls = last[k]
            if fi == li:
                # engaged exactly once; the only gap is the full cycle
                if strict and not gmin[k] <= size <= gmax[k]:
                    return False
                continue
            if fs == ls:
                return False
            if strict and not gmin[k] <= size - li + fi <= gmax[k]:
                return False
        return True

    def extend(pos: int) -> bool:
        nonlocal nodes
        if pos == size:
            return wrap_ok()
        for key in order:
            if counts[key] == 0:
                continue
            nodes += 1
            if nodes > _BALANCE_NODE_BUDGET:
                raise _BudgetExceeded
            code = by_key[key]
            if not admissible(code, pos):
                continue
            saved = [(k, last[k], first[k]) for k in range(n) if code.digits[k]]
            counts[key] -= 1
            for k in range(n):
                d = code.digits[k]
                if d:
                    s = 1 if d > 0 else -1
                    last[k] = (pos, s)
                    if first[k] is None:
                        first[k] = (pos, s)
            seq.append(code)
            if extend(pos + 1):
                return True
            seq.pop()
            counts[key] += 1
            for k, l, f in saved:
                last[k] = l
                first[k] = f
        return False

    try:
        return seq if extend(0) else None
    except _BudgetExceeded:
        return None


def balanced_sequence(ratio: TargetRatio) -> tuple[SignedDigitCode, ...]:
    """Cyclic schedule of 2**n codes that balances capacitor activity.

    Defined for radix 2 only. Each code of the ratio appears 2**(n - s) times,
    s being its engaged-digit count, so the schedule exercises the whole
    family. Consecutive engagements of every capacitor alternate in sign
    around the cycle and fall at near-uniform spacing; if no arrangement
    satisfies the spacing bound, an alternation-only arrangement is returned
    instead.
    """
    if ratio.radix != 2:
        raise DomainError("balanced sequencing is defined for radix 2 only")
    n = ratio.resolution
    if n > _BALANCE_RESOLUTION_LIMIT:
        raise ResourceLimitError(
            f"balanced sequence of 2**{n} rows exceeds the supported resolution "
            f"{_BALANCE_RESOLUTION_LIMIT}"
        )
    cells = _matched_cells(ratio.m, n)
    for strict in (True, False):
        seq = _arrange(cells, n, strict)
        if seq is not None:
            return tuple(seq)
    raise ResourceLimitError("no balanced arrangement found within the search budget")
