"""Shared domain types and the candidate-spectrum families.

Everything here is an immutable value object: domains carrying Lebesgue
measure, windowed index sets, tolerance settings, and the parametrized
families of frequency sets that the rest of the package analyzes.  All
exponentials in the package use the normalization e(x) = exp(i*2*pi*lam.x),
so spectra live on the same scale as the frequency parameters stored here.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence, Union

import numpy as np

__all__ = [
    "SpectralBoxError",
    "ArityMismatchError",
    "WindowCapError",
    "UnitCube",
    "IntervalUnion",
    "DomainSpec",
    "IntFunction",
    "LatticeWindow",
    "ToleranceConfig",
    "TranslatedLattice",
    "ClassA2D",
    "ClassB2D",
    "Tower",
    "Tower3D",
    "ExplicitSpectrum",
    "SpectrumSpec",
    "enumerate_spectrum",
    "spectrum_difference_set",
]


class SpectralBoxError(Exception):
    """Base class for errors raised by this package."""


class ArityMismatchError(SpectralBoxError):
    """Argument count / dimension does not match the declared arity."""


class WindowCapError(SpectralBoxError):
    """A lattice window exceeds the configured cardinality cap."""


# ---------------------------------------------------------------------------
# Domains
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnitCube:
    """The half-open unit cube [0,1)^d with Lebesgue measure."""

    dimension: int

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise ValueError("cube dimension must be >= 1")

    @property
    def measure(self) -> float:
        return 1.0


@dataclass(frozen=True)
class IntervalUnion:
    """A finite union of disjoint open intervals on the real line."""

    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        if not ivs:
            raise ValueError("interval union needs at least one interval")
        for a, b in ivs:
            if not a < b:
                raise ValueError(f"interval ({a}, {b}) has left >= right")
        ordered = sorted(ivs)
        for (_, b0), (a1, _) in zip(ordered, ordered[1:]):
            if a1 < b0:
                raise ValueError("intervals must be pairwise disjoint")
        object.__setattr__(self, "intervals", tuple(ordered))

    @property
    def dimension(self) -> int:
        return 1

    @property
    def measure(self) -> float:
        return sum(b - a for a, b in self.intervals)


DomainSpec = Union[UnitCube, IntervalUnion]


# ---------------------------------------------------------------------------
# Integer-argument functions, windows, tolerances
# ---------------------------------------------------------------------------


def _normalize_key(key, arity: int) -> tuple[int, ...]:
    if arity == 0:
        raise ValueError("arity-0 functions take no table entries")
    if isinstance(key, (int, np.integer)):
        tup = (int(key),)
    else:
        tup = tuple(int(k) for k in key)
    if len(tup) != arity:
        raise ArityMismatchError(
            f"table key {key!r} has {len(tup)} indices, expected {arity}"
        )
    return tup


@dataclass(frozen=True)
class IntFunction:
    """Total function on integer tuples with values in [0,1).

    A finite table plus a default value outside the table; this keeps
    otherwise arbitrary phase functions serializable and reproducible.
    Arity 0 denotes a constant (the default value).
    """

    arity: int
    default: float = 0.0
    table: Mapping[tuple[int, ...], float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.arity < 0:
            raise ValueError("arity must be >= 0")
        if not 0.0 <= self.default < 1.0:
            raise ValueError(f"default {self.default} outside [0,1)")
        normalized = {}
        for key, value in dict(self.table).items():
            tup = _normalize_key(key, self.arity)
            value = float(value)
            if not 0.0 <= value < 1.0:
                raise ValueError(f"table value {value} at {tup} outside [0,1)")
            normalized[tup] = value
        object.__setattr__(self, "table", normalized)

    def __call__(self, *indices: int) -> float:
        if len(indices) != self.arity:
            raise ArityMismatchError(
                f"called with {len(indices)} indices, expected {self.arity}"
            )
        return self.table.get(tuple(int(i) for i in indices), self.default)

    @classmethod
    def constant(cls, value: float) -> "IntFunction":
        return cls(arity=0, default=value)


@dataclass(frozen=True)
class LatticeWindow:
    """Per-axis inclusive integer ranges; the finite stand-in for Z^d."""

    ranges: tuple[tuple[int, int], ...]
    max_cardinality: int = 10**6

    def __post_init__(self) -> None:
        rng = tuple((int(lo), int(hi)) for lo, hi in self.ranges)
        if not rng:
            raise ValueError("window needs at least one axis")
        for lo, hi in rng:
            if lo > hi:
                raise ValueError(f"window range ({lo},{hi}) has low > high")
        object.__setattr__(self, "ranges", rng)
        if self.cardinality > self.max_cardinality:
            raise WindowCapError(
                f"window cardinality {self.cardinality} exceeds cap "
                f"{self.max_cardinality}"
            )

    @classmethod
    def centered(cls, radius: int, dimension: int, **kw) -> "LatticeWindow":
        if radius < 0:
            raise ValueError("radius must be >= 0")
        return cls(tuple((-radius, radius) for _ in range(dimension)), **kw)

    @property
    def dimension(self) -> int:
        return len(self.ranges)

    @property
    def cardinality(self) -> int:
        return math.prod(hi - lo + 1 for lo, hi in self.ranges)

    def axis_indices(self, axis: int) -> np.ndarray:
        lo, hi = self.ranges[axis]
        return np.arange(lo, hi + 1)

    def indices(self) -> Iterator[tuple[int, ...]]:
        """Window tuples in lexicographic order (deterministic)."""
        return itertools.product(
            *(range(lo, hi + 1) for lo, hi in self.ranges)
        )

    def index_array(self) -> np.ndarray:
        """All window tuples as an (cardinality, d) integer array."""
        return np.array(list(self.indices()), dtype=int).reshape(
            self.cardinality, self.dimension
        )

    def contains(self, tup: Sequence[int]) -> bool:
        return all(
            lo <= int(t) <= hi for t, (lo, hi) in zip(tup, self.ranges)
        ) and len(tup) == self.dimension


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical tolerances and default resolutions, used package-wide.

    eq_tol guards closed-form identities, num_tol quadrature/grid
    comparisons; grid_n is samples per axis, quad_n quadrature nodes.
    """

    eq_tol: float = 1e-10
    num_tol: float = 1e-8
    grid_n: int = 256
    quad_n: int = 2048

    def __post_init__(self) -> None:
        if self.eq_tol <= 0 or self.num_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.grid_n < 2 or self.quad_n < 2:
            raise ValueError("grid_n and quad_n must be >= 2")


# ---------------------------------------------------------------------------
# Spectrum families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TranslatedLattice:
    """alpha + Z^d: the shifted integer lattice."""

    alpha: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        if not self.alpha:
            raise ValueError("alpha must have at least one coordinate")

    @property
    def dimension(self) -> int:
        return len(self.alpha)


@dataclass(frozen=True)
class ClassA2D:
    """Planar family (alpha+m, beta(m)+n): columns shifted by beta."""

    alpha: float
    beta: IntFunction

    def __post_init__(self) -> None:
        if self.beta.arity != 1:
            raise ArityMismatchError("beta must take one integer argument")

    @property
    def dimension(self) -> int:
        return 2


@dataclass(frozen=True)
class ClassB2D:
    """Planar family (beta(n)+m, alpha+n): rows shifted by beta."""

    alpha: float
    beta: IntFunction

    def __post_init__(self) -> None:
        if self.beta.arity != 1:
            raise ArityMismatchError("beta must take one integer argument")

    @property
    def dimension(self) -> int:
        return 2


@dataclass(frozen=True)
class Tower:
    """Staircase family in d dimensions.

    Coordinate j is levels[j](k_1, ..., k_j) + k_{j+1}; level k must be a
    function of exactly k integer arguments, level 0 the constant offset.
    """

    levels: tuple[IntFunction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "levels", tuple(self.levels))
        if not self.levels:
            raise ValueError("tower needs at least one level")
        for k, fn in enumerate(self.levels):
            if fn.arity != k:
                raise ArityMismatchError(
                    f"tower level {k} has arity {fn.arity}, expected {k}"
                )

    @property
    def dimension(self) -> int:
        return len(self.levels)


@dataclass(frozen=True)
class Tower3D:
    """Three-dimensional staircase (k, beta(k)+l, gamma(k,l)+m)."""

    beta: IntFunction
    gamma: IntFunction

    def __post_init__(self) -> None:
        if self.beta.arity != 1:
            raise ArityMismatchError("beta must take one integer argument")
        if self.gamma.arity != 2:
            raise ArityMismatchError("gamma must take two integer arguments")

    @property
    def dimension(self) -> int:
        return 3

    def as_tower(self) -> Tower:
        return Tower((IntFunction.constant(0.0), self.beta, self.gamma))


@dataclass(frozen=True)
class ExplicitSpectrum:
    """A finite, explicitly listed frequency set."""

    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.size == 0:
            raise ValueError("explicit spectrum needs at least one point")
        object.__setattr__(self, "points", pts)

    @property
    def dimension(self) -> int:
        return self.points.shape[1]


SpectrumSpec = Union[
    TranslatedLattice, ClassA2D, ClassB2D, Tower, Tower3D, ExplicitSpectrum
]


def _tower_point(levels: Sequence[IntFunction], idx: tuple[int, ...]) -> list[float]:
    return [levels[j](*idx[:j]) + idx[j] for j in range(len(levels))]


def enumerate_spectrum(spec: SpectrumSpec, window: LatticeWindow) -> np.ndarray:
    """Materialize the family over the window, one point per index tuple.

    Returns an (cardinality, d) float array in lexicographic window order.
    ExplicitSpectrum ignores the window: the caller already chose the
    finite set.  Raises ArityMismatchError when the window arity differs
    from the family dimension.
    """
    if isinstance(spec, ExplicitSpectrum):
        return np.array(spec.points, copy=True)
    if window.dimension != spec.dimension:
        raise ArityMismatchError(
            f"window has {window.dimension} axes, spectrum family needs "
            f"{spec.dimension}"
        )
    idx = window.index_array().astype(float)
    if isinstance(spec, TranslatedLattice):
        return idx + np.asarray(spec.alpha, dtype=float)
    if isinstance(spec, ClassA2D):
        m = idx[:, 0]
        beta = np.array([spec.beta(int(v)) for v in m])
        return np.column_stack([spec.alpha + m, beta + idx[:, 1]])
    if isinstance(spec, ClassB2D):
        n = idx[:, 1]
        beta = np.array([spec.beta(int(v)) for v in n])
        return np.column_stack([beta + idx[:, 0], spec.alpha + n])
    if isinstance(spec, Tower3D):
        spec = spec.as_tower()
    if isinstance(spec, Tower):
        pts = [
            _tower_point(spec.levels, tuple(int(v) for v in row))
            for row in idx
        ]
        return np.array(pts, dtype=float)
    raise TypeError(f"unsupported spectrum spec {type(spec).__name__}")


def spectrum_difference_set(points: np.ndarray) -> np.ndarray:
    """All ordered pairwise differences lam - lam' over distinct points.

    Duplicates are retained (callers may dedupe); a list of n points yields
    n*(n-1) difference vectors.  Raises on empty input.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] == 0:
        raise ValueError("difference set of an empty point list")
    n = pts.shape[0]
    diffs = pts[:, None, :] - pts[None, :, :]
    mask = ~np.eye(n, dtype=bool)
    return diffs[mask].reshape(n * (n - 1), pts.shape[1])
