"""Exact rational feasibility of small systems ``A x <= b`` by Fourier-Motzkin."""

from __future__ import annotations

from fractions import Fraction
from math import ceil, floor, lcm
from typing import Sequence

Row = tuple[tuple[Fraction, ...], Fraction]


def _normalise(coeffs: Sequence[Fraction], rhs: Fraction) -> Row:
    # scale so the first non-zero coefficient has magnitude 1; dedupes parallel rows
    pivot = next((abs(c) for c in coeffs if c != 0), None)
    if pivot is None or pivot == 1:
        return tuple(coeffs), rhs
    return tuple(c / pivot for c in coeffs), rhs / pivot


def _eliminate(rows: list[Row], var: int) -> list[Row]:
    upper, lower, rest = [], [], []
    for coeffs, rhs in rows:
        c = coeffs[var]
        if c > 0:
            upper.append((coeffs, rhs))
        elif c < 0:
            lower.append((coeffs, rhs))
        else:
            rest.append((coeffs, rhs))
    out = set(rest)
    for cu, bu in upper:
        for cl, bl in lower:
            fu, fl = cu[var], -cl[var]
            coeffs = tuple(fl * u + fu * l for u, l in zip(cu, cl))
            out.add(_normalise(coeffs, fl * bu + fu * bl))
    return sorted(out)


def _pick(lo: Fraction | None, hi: Fraction | None) -> Fraction:
    """A value in [lo, hi], preferring 0, then the integer nearest zero."""
    if (lo is None or lo <= 0) and (hi is None or hi >= 0):
        return Fraction(0)
    if lo is not None and lo > 0:
        v = Fraction(ceil(lo))
        return v if hi is None or v <= hi else lo
    v = Fraction(floor(hi))
    return v if lo is None or v >= lo else hi


def solve(rows: Sequence[tuple[Sequence, object]], nvars: int) -> list[Fraction] | None:
    """Return some rational ``x`` with ``A x <= b`` for every row, or None if infeasible."""
    system = [_normalise(tuple(Fraction(c) for c in coeffs), Fraction(rhs)) for coeffs, rhs in rows]
    for coeffs, _ in system:
        if len(coeffs) != nvars:
            raise ValueError("row width does not match the number of variables")
    stages = [sorted(set(system))]
    for var in reversed(range(nvars)):
        stages.append(_eliminate(stages[-1], var))
    for coeffs, rhs in stages[-1]:
        if rhs < 0:
            return None
    x: list[Fraction] = [Fraction(0)] * nvars
    # stage nvars - k holds variables 0..k; assign x_k from it
    for k in range(nvars):
        lo = hi = None
        for coeffs, rhs in stages[nvars - k - 1]:
            c = coeffs[k]
            if c == 0:
                continue
            slack = rhs - sum(coeffs[i] * x[i] for i in range(k))
            bound = slack / c
            if c > 0:
                hi = bound if hi is None else min(hi, bound)
            else:
                lo = bound if lo is None else max(lo, bound)
        x[k] = _pick(lo, hi)
    return x


def to_integers(x: Sequence[Fraction]) -> list[int]:
    """Scale a rational vector by the lcm of its denominators."""
    scale = lcm(*(f.denominator for f in x)) if x else 1
    return [int(f * scale) for f in x]
