"""Sampled complex states on uniform grids over the unit box.

Two sampling conventions coexist: "periodic" places samples at i/n (no
right endpoint; rectangle-rule quadrature, exact discrete orthogonality of
shifted exponential modes), "closed" places them at i/(n-1) including both
endpoints (trapezoid quadrature; used where boundary traces matter).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "GridState",
    "fft_mode_indices",
    "twisted_analysis",
    "twisted_synthesis",
]


@dataclass(frozen=True)
class GridState:
    """A complex-valued function sampled on a uniform grid over I^d."""

    values: np.ndarray
    sampling: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", vals)
        sampling = self.sampling or tuple("periodic" for _ in range(vals.ndim))
        if len(sampling) != vals.ndim:
            raise ValueError("one sampling tag per axis required")
        for tag in sampling:
            if tag not in ("periodic", "closed"):
                raise ValueError(f"unknown sampling tag {tag!r}")
        object.__setattr__(self, "sampling", tuple(sampling))
        for axis, tag in enumerate(sampling):
            if tag == "closed" and vals.shape[axis] < 2:
                raise ValueError("closed axes need at least two samples")
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid values must be finite")

    @property
    def dimension(self) -> int:
        return self.values.ndim

    def axis_coords(self, axis: int) -> np.ndarray:
        n = self.values.shape[axis]
        if self.sampling[axis] == "periodic":
            return np.arange(n) / n
        return np.arange(n) / (n - 1)

    def axis_weights(self, axis: int) -> np.ndarray:
        n = self.values.shape[axis]
        if self.sampling[axis] == "periodic":
            return np.full(n, 1.0 / n)
        w = np.full(n, 1.0 / (n - 1))
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    def _weight_tensor(self) -> np.ndarray:
        w = self.axis_weights(0)
        for axis in range(1, self.dimension):
            w = np.multiply.outer(w, self.axis_weights(axis))
        return w

    def inner(self, other: "GridState") -> complex:
        """Quadrature of conj(self) * other with this grid's weights."""
        if other.values.shape != self.values.shape:
            raise ValueError("grid shapes differ")
        return complex(
            np.sum(self._weight_tensor() * np.conj(self.values) * other.values)
        )

    def norm(self) -> float:
        return float(
            np.sqrt(np.sum(self._weight_tensor() * np.abs(self.values) ** 2).real)
        )

    def scaled(self, factor: complex) -> "GridState":
        return GridState(self.values * factor, self.sampling)

    def __add__(self, other: "GridState") -> "GridState":
        if other.sampling != self.sampling:
            raise ValueError("sampling conventions differ")
        return GridState(self.values + other.values, self.sampling)

    def __sub__(self, other: "GridState") -> "GridState":
        if other.sampling != self.sampling:
            raise ValueError("sampling conventions differ")
        return GridState(self.values - other.values, self.sampling)


def fft_mode_indices(n: int) -> np.ndarray:
    """Integer mode labels in numpy FFT order: 0..n/2-1, -n/2..-1."""
    return np.fft.fftfreq(n, d=1.0 / n).astype(int)


def twisted_analysis(values: np.ndarray, axis: int, shift: float) -> np.ndarray:
    """Coefficients of `values` against exp(i*2*pi*(k+shift)*x) along `axis`.

    Samples are assumed at x = j/n (periodic convention).  The returned
    array holds coefficients in FFT mode order; for band-limited data the
    analysis is exact (shifted modes stay exactly orthogonal on the grid).
    """
    n = values.shape[axis]
    j = np.arange(n)
    phase = np.exp(-2j * np.pi * shift * j / n)
    shape = [1] * values.ndim
    shape[axis] = n
    return np.fft.fft(values * phase.reshape(shape), axis=axis) / n


def twisted_synthesis(coeffs: np.ndarray, axis: int, shift: float) -> np.ndarray:
    """Inverse of twisted_analysis (same mode ordering)."""
    n = coeffs.shape[axis]
    j = np.arange(n)
    phase = np.exp(2j * np.pi * shift * j / n)
    shape = [1] * coeffs.ndim
    shape[axis] = n
    return np.fft.ifft(coeffs, axis=axis) * n * phase.reshape(shape)
