"""Invertible measure-preserving systems with exact orbit evaluation.

Three concrete systems: an irrational circle rotation, the 3-cycle rotation
realized as rotation by 1/3 with the cell partition [0,1/3), [1/3,2/3),
[2/3,1), and the unit-determinant torus automorphism [[2,1],[1,1]].

Points remember their orbit index lazily (anchor plus integer shift), so
T^i followed by T^j is literally the same computation as T^(i+j); the
structural identities used elsewhere then hold bitwise, not just within a
tolerance. Rotation angles are realized through a split high/low
representation of the angle so that 1e7 orbit steps carry no multiplicative
drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

SQRT2_TURNS = math.sqrt(2.0) - 1.0  # sqrt(2) mod 1
_MAX_SHIFT = 1 << 27  # exactness limit of the split-angle product


def _split_angle(theta: float) -> tuple[float, float]:
    hi = math.floor(theta * 2.0**26 + 0.5) / 2.0**26
    return hi, theta - hi  # difference is exact (Sterbenz)


def angle_mod1(t0: float, ks: np.ndarray, theta_hi: float, theta_lo: float) -> np.ndarray:
    """(t0 + k*theta) mod 1 with the k*theta product split for exactness.

    k*theta_hi is exact for |k| < 2^27 (26-bit mantissa times 27-bit integer),
    so the only rounding happens in the small correction term.
    """
    a = ks * theta_hi
    frac_hi = a - np.floor(a)
    return (frac_hi + (ks * theta_lo + t0)) % 1.0


@dataclass(frozen=True)
class RotationPoint:
    t0: float      # anchor angle in turns, [0, 1)
    shift: int = 0


@dataclass(frozen=True)
class CyclePoint:
    cell0: int       # 0, 1, 2: which third of the circle the anchor sits in
    jitter: float = 0.0  # position within the cell, for genericity only
    shift: int = 0


@dataclass(frozen=True)
class TorusPoint:
    x: float
    y: float


@dataclass(frozen=True)
class LatticeTorusPoint:
    """Exact point (r/L, s/L); the integer matrix maps the lattice to itself."""
    r: int
    s: int
    L: int


@dataclass(frozen=True)
class Observable:
    """Complex observable evaluated on system-specific orbit coordinates.

    `coord_fn` receives the coordinate array produced by the system's
    `orbit_coords` (angles, cell indices, or an (x, y) pair of arrays)
    and returns complex values. `norms` carries closed-form L1/L2/Linf
    values when known; `meta` carries structure other modules exploit
    (character frequency, eigenfunction index).
    """

    label: str
    system_kind: str
    coord_fn: Callable
    norms: dict
    meta: dict = field(default_factory=dict)

    def norm(self, which: str) -> float:
        if which not in self.norms:
            raise ValueError(f"{self.label}: no closed-form {which} norm available")
        return self.norms[which]


class Rotation:
    kind = "rotation"

    def __init__(self, angle_turns: float):
        theta = float(angle_turns) % 1.0
        frac = Fraction(theta).limit_denominator(10**6)
        if abs(theta - float(frac)) < 1e-15:
            raise ValueError(
                f"rotation angle {theta} is (indistinguishable from) the rational "
                f"{frac}; pick an irrational angle"
            )
        self.theta = theta
        self._hi, self._lo = _split_angle(theta)

    @property
    def phi(self) -> complex:
        return complex(np.exp(2j * np.pi * self.theta))

    def forward(self, p: RotationPoint) -> RotationPoint:
        return RotationPoint(p.t0, p.shift + 1)

    def backward(self, p: RotationPoint) -> RotationPoint:
        return RotationPoint(p.t0, p.shift - 1)

    def iterate(self, p: RotationPoint, j: int) -> RotationPoint:
        return RotationPoint(p.t0, p.shift + int(j))

    def angle_of(self, p: RotationPoint) -> float:
        return float(angle_mod1(p.t0, np.array([p.shift]), self._hi, self._lo)[0])

    def orbit_coords(self, x0: RotationPoint, ks: np.ndarray) -> np.ndarray:
        idx = ks + x0.shift
        if np.max(np.abs(idx), initial=0) >= _MAX_SHIFT:
            raise ValueError(f"orbit index beyond the exact-angle range (|k| < {_MAX_SHIFT})")
        return angle_mod1(x0.t0, idx, self._hi, self._lo)

    def sample_points(self, count: int, rng: np.random.Generator) -> list[RotationPoint]:
        return [RotationPoint(float(t)) for t in rng.random(count)]

    def default_point(self) -> RotationPoint:
        # generic anchor: t0 = 0 or 1/2 would make even observables
        # reflection-symmetric along the orbit and cancel symmetric sums
        return RotationPoint(0.1)


class ThreeCycle:
    """Rotation by 1/3 with the three-cell partition; orbits live on Z/3."""

    kind = "three_cycle"
    # cell values of the balanced step observable: 0 on A, 1 on TA, -1 on T^2 A
    STEP_VALUES = (0.0, 1.0, -1.0)

    def forward(self, p: CyclePoint) -> CyclePoint:
        return CyclePoint(p.cell0, p.jitter, p.shift + 1)

    def backward(self, p: CyclePoint) -> CyclePoint:
        return CyclePoint(p.cell0, p.jitter, p.shift - 1)

    def iterate(self, p: CyclePoint, j: int) -> CyclePoint:
        return CyclePoint(p.cell0, p.jitter, p.shift + int(j))

    def cell_of(self, p: CyclePoint) -> int:
        return (p.cell0 + p.shift) % 3

    def orbit_coords(self, x0: CyclePoint, ks: np.ndarray) -> np.ndarray:
        return (np.asarray(ks, dtype=np.int64) + x0.cell0 + x0.shift) % 3

    def sample_points(self, count: int, rng: np.random.Generator) -> list[CyclePoint]:
        cells = rng.integers(0, 3, size=count)
        jit = rng.random(count) / 3.0
        return [CyclePoint(int(c), float(j)) for c, j in zip(cells, jit)]

    def default_point(self) -> CyclePoint:
        return CyclePoint(0, 0.1)  # x0 = 0.1 lies in the first cell


TORUS_MATRIX = np.array([[2, 1], [1, 1]], dtype=np.int64)
TORUS_MATRIX_INV = np.array([[1, -1], [-1, 2]], dtype=np.int64)  # det = 1


class TorusAutomorphism:
    """Unit square with Lebesgue measure under [[2,1],[1,1]] mod 1.

    Totally ergodic with countable Lebesgue spectrum on the nonconstant
    characters; it also serves as the weakly-mixing exemplar (no system
    separating the two classes is provided).

    Hyperbolicity amplifies float rounding by ~2.6x per step, so orbits of
    generic float points lose meaning past a few dozen iterates; quantities
    needing long or exact orbits go through `LatticeTorusPoint` (the integer
    lattice is invariant and its arithmetic is exact) or through the
    frequency-space machinery in the transform module.
    """

    kind = "torus_automorphism"
    matrix = TORUS_MATRIX

    def forward(self, p):
        if isinstance(p, LatticeTorusPoint):
            return LatticeTorusPoint((2 * p.r + p.s) % p.L, (p.r + p.s) % p.L, p.L)
        return TorusPoint((2 * p.x + p.y) % 1.0, (p.x + p.y) % 1.0)

    def backward(self, p):
        if isinstance(p, LatticeTorusPoint):
            return LatticeTorusPoint((p.r - p.s) % p.L, (-p.r + 2 * p.s) % p.L, p.L)
        return TorusPoint((p.x - p.y) % 1.0, (-p.x + 2 * p.y) % 1.0)

    def iterate(self, p, j: int):
        step = self.forward if j >= 0 else self.backward
        for _ in range(abs(int(j))):
            p = step(p)
        return p

    def xy_of(self, p) -> tuple[float, float]:
        if isinstance(p, LatticeTorusPoint):
            return p.r / p.L, p.s / p.L
        return p.x, p.y

    def orbit_coords(self, x0, ks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ks = np.asarray(ks, dtype=np.int64)
        lo, hi = int(ks.min()), int(ks.max())
        if isinstance(x0, LatticeTorusPoint):
            # exact integer orbit on the invariant lattice
            xs = np.empty(hi - lo + 1, dtype=float)
            ys = np.empty(hi - lo + 1, dtype=float)
            p = self.iterate(x0, lo)
            for i in range(hi - lo + 1):
                xs[i], ys[i] = p.r / p.L, p.s / p.L
                p = self.forward(p)
            return xs[ks - lo], ys[ks - lo]
        xs = np.empty(hi - lo + 1, dtype=float)
        ys = np.empty(hi - lo + 1, dtype=float)
        p = self.iterate(x0, lo)
        for i in range(hi - lo + 1):
            xs[i], ys[i] = p.x, p.y
            p = self.forward(p)
        return xs[ks - lo], ys[ks - lo]

    def sample_points(self, count: int, rng: np.random.Generator) -> list[TorusPoint]:
        pts = rng.random((count, 2))
        return [TorusPoint(float(x), float(y)) for x, y in pts]

    def default_point(self) -> TorusPoint:
        return TorusPoint(0.2, 0.3)


DynamicalSystem = Rotation | ThreeCycle | TorusAutomorphism


def make_system(kind: str, **params) -> DynamicalSystem:
    """Factory: rotation(angle_turns=... or phi=...), three_cycle, torus_automorphism."""
    if kind == "rotation":
        if "phi" in params:
            phi = complex(params["phi"])
            if abs(abs(phi) - 1.0) > 1e-12:
                raise ValueError("rotation factor must have modulus 1")
            angle = math.atan2(phi.imag, phi.real) / (2 * math.pi)
        else:
            angle = params.get("angle_turns", SQRT2_TURNS)
            if angle == "sqrt2":
                angle = SQRT2_TURNS
        return Rotation(float(angle))
    if kind == "three_cycle":
        return ThreeCycle()
    if kind == "torus_automorphism":
        return TorusAutomorphism()
    raise ValueError(f"unknown system kind {kind!r}")


# ---------------------------------------------------------------- observables

def rotation_character(m: int = 1) -> Observable:
    def fn(angles: np.ndarray) -> np.ndarray:
        return np.exp(2j * np.pi * ((m * angles) % 1.0))
    return Observable(f"z^{m}", "rotation", fn, {"l1": 1.0, "l2": 1.0, "linf": 1.0},
                      meta={"m": int(m)})


def rotation_raised_cosine() -> Observable:
    """Nonnegative observable 1 + cos(2 pi t); mean 1, sup 2."""
    def fn(angles: np.ndarray) -> np.ndarray:
        return (1.0 + np.cos(2 * np.pi * angles)).astype(complex)
    return Observable("1+cos", "rotation", fn,
                      {"l1": 1.0, "l2": math.sqrt(1.5), "linf": 2.0})


def cycle_step_observable() -> Observable:
    """0 on the first cell, 1 on its image, -1 on the second image."""
    table = np.array(ThreeCycle.STEP_VALUES, dtype=complex)
    def fn(cells: np.ndarray) -> np.ndarray:
        return table[cells]
    return Observable("cycle_step", "three_cycle", fn,
                      {"l1": 2.0 / 3.0, "l2": math.sqrt(2.0 / 3.0), "linf": 1.0})


def cycle_indicator_observable() -> Observable:
    table = np.array([1.0, 0.0, 0.0], dtype=complex)
    def fn(cells: np.ndarray) -> np.ndarray:
        return table[cells]
    return Observable("indicator_A", "three_cycle", fn,
                      {"l1": 1.0 / 3.0, "l2": 1.0 / math.sqrt(3.0), "linf": 1.0})


def torus_character(p: int, q: int) -> Observable:
    def fn(coords) -> np.ndarray:
        xs, ys = coords
        return np.exp(2j * np.pi * ((p * xs + q * ys) % 1.0))
    return Observable(f"e(px+qy)[{p},{q}]", "torus_automorphism", fn,
                      {"l1": 1.0, "l2": 1.0, "linf": 1.0}, meta={"pq": (int(p), int(q))})


def constant_observable(sys_kind: str, c: complex = 1.0) -> Observable:
    cc = complex(c)
    def fn(coords) -> np.ndarray:
        base = coords[0] if isinstance(coords, tuple) else coords
        return np.full(np.shape(base), cc, dtype=complex)
    return Observable(f"const({cc:.3g})", sys_kind, fn,
                      {"l1": abs(cc), "l2": abs(cc), "linf": abs(cc)})


def scale_observable(f: Observable, factor: float) -> Observable:
    def fn(coords) -> np.ndarray:
        return factor * f.coord_fn(coords)
    norms = {k: abs(factor) * v for k, v in f.norms.items()}
    return Observable(f"{factor:.6g}*{f.label}", f.system_kind, fn, norms)


# ----------------------------------------------------------------- operations

def orbit_values(sys: DynamicalSystem, f: Observable, x0, N: int) -> np.ndarray:
    """f(T^k x0) for -N <= k <= N as a length 2N+1 complex array."""
    if N < 0:
        raise ValueError("orbit radius must be nonnegative")
    if f.system_kind != sys.kind:
        raise ValueError(f"observable {f.label} does not belong to system {sys.kind}")
    ks = np.arange(-N, N + 1, dtype=np.int64)
    return np.asarray(f.coord_fn(sys.orbit_coords(x0, ks)), dtype=complex)


def sample_points(sys: DynamicalSystem, count: int, seed: int) -> list:
    """Deterministic pseudorandom points from the invariant measure."""
    if count < 1:
        raise ValueError("need at least one sample point")
    rng = np.random.default_rng(seed)
    return sys.sample_points(count, rng)


def invariance_check(sys: DynamicalSystem, observables: Sequence[Observable],
                     count: int = 4096, seed: int = 0) -> float:
    """Monte-Carlo discrepancy max_f |E[f o T] - E[f]| over the given observables."""
    pts = sample_points(sys, count, seed)
    worst = 0.0
    for f in observables:
        here = np.array([f.coord_fn(sys.orbit_coords(p, np.array([0]))) for p in pts]).ravel()
        there = np.array([f.coord_fn(sys.orbit_coords(p, np.array([1]))) for p in pts]).ravel()
        worst = max(worst, abs(complex(np.mean(there) - np.mean(here))))
    return worst


def orbit_to_csv(sys: DynamicalSystem, f: Observable, x0, N: int, path) -> None:
    """Dump f(T^k x0) for |k| <= N as CSV with columns k, re, im."""
    vals = orbit_values(sys, f, x0, N)
    with open(path, "w", newline="") as fh:
        fh.write("k,re,im\n")
        for k, v in zip(range(-N, N + 1), vals):
            fh.write(f"{k},{float(v.real)!r},{float(v.imag)!r}\n")


def lattice_character_correlation(p: int, q: int, k: int, L: int = 64) -> complex:
    """<T^k f, f> for the torus character f = e(px+qy), quadratured exactly.

    The L x L integer lattice is invariant under the matrix, so the average
    over lattice points is the exact integral as long as the shifted
    frequency does not wrap to the original one mod L.
    """
    rs = np.arange(L)
    R, S = np.meshgrid(rs, rs, indexing="ij")
    w = np.array([p, q], dtype=np.int64)
    Mk = np.linalg.matrix_power(TORUS_MATRIX if k >= 0 else TORUS_MATRIX_INV, abs(int(k)))
    wk = (w @ Mk) % L
    phase = (wk[0] - w[0]) * R + (wk[1] - w[1]) * S
    vals = np.exp(2j * np.pi * (phase % L) / L)
    return complex(vals.mean())
