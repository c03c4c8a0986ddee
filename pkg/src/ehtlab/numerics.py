"""Accurate summation and small fitting helpers used throughout the package.

Partial sums with 1/k weights lose digits under naive accumulation once n
reaches 1e6-1e7, so every checkpointed sum goes through `checkpoint_sums`,
which combines pairwise segment sums with an exactly-rounded merge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class NeumaierSum:
    """Compensated accumulator (Kahan with Neumaier's correction).

    Keeps a running sum plus the rounding carry; `value` returns their total.
    """

    __slots__ = ("_s", "_c")

    def __init__(self, start: float = 0.0):
        self._s = float(start)
        self._c = 0.0

    def add(self, x: float) -> None:
        t = self._s + x
        if abs(self._s) >= abs(x):
            self._c += (self._s - t) + x
        else:
            self._c += (x - t) + self._s
        self._s = t

    @property
    def value(self) -> float:
        return self._s + self._c


def neumaier_total(values) -> float:
    acc = NeumaierSum()
    for v in values:
        acc.add(float(v))
    return acc.value


def checkpoint_sums(terms: np.ndarray, ends: Sequence[int]) -> np.ndarray:
    """Prefix sums ``sum(terms[:e])`` for each ``e`` in the increasing ``ends``.

    Two regimes: for a handful of checkpoints each prefix is summed pairwise
    from scratch; for dense checkpoint lists the array is cut into segments
    (pairwise within a segment) and segment totals are merged with fsum, so
    the error never accumulates linearly across the whole range.
    """
    ends = np.asarray(ends, dtype=np.int64)
    if ends.size == 0:
        return np.zeros(0, dtype=terms.dtype)
    if np.any(np.diff(ends) < 0) or ends[0] < 0 or ends[-1] > terms.size:
        raise ValueError("checkpoint ends must be increasing and within the term range")

    if ends.size <= 64:
        return np.array([terms[:e].sum() for e in ends], dtype=complex)

    starts = np.concatenate(([0], ends[:-1]))
    seg = np.add.reduceat(terms, starts)
    seg[starts == ends] = 0.0  # reduceat treats empty segments as terms[start]
    out = np.empty(ends.size, dtype=complex)
    re = NeumaierSum()
    im = NeumaierSum()
    for i in range(ends.size):
        re.add(seg[i].real)
        im.add(seg[i].imag)
        out[i] = re.value + 1j * im.value
    return out


@dataclass(frozen=True)
class LineFit:
    slope: float
    intercept: float
    residual: float  # rms of fit residuals


def fit_line(x: np.ndarray, y: np.ndarray) -> LineFit:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two points to fit a line")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return LineFit(float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))))


def fit_loglog(n: np.ndarray, y: np.ndarray) -> LineFit:
    """Least-squares exponent fit of y ~ C * n**slope (positive data only)."""
    n = np.asarray(n, dtype=float)
    y = np.asarray(y, dtype=float)
    mask = y > 0
    if mask.sum() < 2:
        return LineFit(0.0, -math.inf, 0.0)
    return fit_line(np.log(n[mask]), np.log(y[mask]))


def relative_error(a: float, b: float) -> float:
    return abs(a - b) / (1.0 + max(abs(a), abs(b)))
