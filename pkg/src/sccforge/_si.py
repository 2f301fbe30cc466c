"""Parsing helpers for quantities, fractions, and flat config files."""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from .errors import DomainError

_PREFIXES = {
    "p": 1e-12,
    "n": 1e-9,
    "u": 1e-6,
    "µ": 1e-6,
    "m": 1e-3,
    "k": 1e3,
    "M": 1e6,
    "G": 1e9,
}

# unit letters that may trail a magnitude ("4.7uF", "100kHz", "1.2Ohm")
_UNIT_SUFFIXES = ("ohm", "Ohm", "OHM", "Hz", "hz", "F", "V", "A", "s", "S")


def parse_quantity(text: str) -> float:
    """Parse a number with an optional SI prefix and unit, e.g. "4.7uF" -> 4.7e-6.

    The unit letter is stripped and ignored; dimensional consistency is the
    caller's concern.
    """
    s = text.strip()
    if not s:
        raise DomainError("empty quantity")
    for unit in _UNIT_SUFFIXES:
        if s.endswith(unit) and len(s) > len(unit):
            s = s[: -len(unit)]
            break
    scale = 1.0
    if s and s[-1] in _PREFIXES and not s[-1].isdigit():
        # "1e-3" must not lose its exponent; prefixes never follow 'e'
        if not (s[-1] in "mM" and len(s) > 1 and s[-2] in "eE"):
            scale = _PREFIXES[s[-1]]
            s = s[:-1]
    try:
        return float(s) * scale
    except ValueError:
        raise DomainError(f"cannot parse quantity {text!r}") from None


def parse_fraction(text: str) -> Fraction:
    """Parse "3/8", "0.4", or "2" into an exact Fraction."""
    s = text.strip()
    try:
        if "/" in s:
            num, den = s.split("/")
            return Fraction(int(num), int(den))
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise DomainError(f"cannot parse fraction {text!r}") from None


def parse_slot(text: str) -> Fraction | float:
    """Parse a slot duration: "Ts/4" -> Fraction(1, 4) of a period, else seconds."""
    s = text.strip()
    if s.lower().startswith("ts/"):
        try:
            den = int(s[3:])
        except ValueError:
            raise DomainError(f"cannot parse slot spec {text!r}") from None
        if den < 1:
            raise DomainError(f"slot divisor must be positive, got {den}")
        return Fraction(1, den)
    return parse_quantity(s)


def load_config(path: str | Path) -> dict[str, str]:
    """Read a flat key = value file; '#' starts a comment, blank lines skipped.

    Keys are normalized to lowercase with hyphens replaced by underscores.
    Values are returned as raw strings for the caller to parse.
    """
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, value = line.split("=", 1)
        elif ":" in line:
            key, value = line.split(":", 1)
        else:
            raise DomainError(f"{path}:{lineno}: expected 'key = value'")
        key = key.strip().lower().replace("-", "_")
        if not key:
            raise DomainError(f"{path}:{lineno}: empty key")
        out[key] = value.strip()
    return out
