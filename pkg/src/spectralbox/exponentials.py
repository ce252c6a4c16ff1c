"""Box transforms of exponentials: zero sets, Gram matrices, completeness.

The central object is the complex function F(z) = integral over the domain
of exp(i*2*pi*z.x); orthogonality of two exponentials e_a, e_b is exactly
membership of a-b in its zero set.  For the unit cube F factors into the
product of exp(i*pi*z_j)*sin(pi*z_j)/(pi*z_j) over the coordinates, giving
a closed form; for interval unions the exact antiderivative is summed per
interval.  A Gauss-Legendre quadrature route is kept alongside as an
independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .grid import GridState
from .model import (
    ArityMismatchError,
    DomainSpec,
    IntervalUnion,
    LatticeWindow,
    SpectrumSpec,
    UnitCube,
    enumerate_spectrum,
)

__all__ = [
    "eval_F_omega",
    "f_omega_quadrature",
    "in_zero_set_cube",
    "in_zero_set_cube_many",
    "GramMatrix",
    "gram_matrix",
    "OrthogonalityReport",
    "orthogonality_verdict",
    "CompletenessReport",
    "completeness_probe",
    "RootScanReport",
    "unit_circle_root_scan",
]


def _sinc_pi(z: np.ndarray) -> np.ndarray:
    """sin(pi z)/(pi z) on complex arrays, = 1 at z = 0."""
    z = np.asarray(z, dtype=complex)
    w = np.pi * z
    small = np.abs(w) < 1e-6
    safe = np.where(small, 1.0, w)
    out = np.sin(safe) / safe
    # two series terms keep full double precision inside the cutoff
    series = 1.0 - w**2 / 6.0 + w**4 / 120.0
    return np.where(small, series, out)


def _f_cube(zs: np.ndarray) -> np.ndarray:
    """Product transform of the unit cube, vectorized over the last axis."""
    zs = np.asarray(zs, dtype=complex)
    factors = np.exp(1j * np.pi * zs) * _sinc_pi(zs)
    return np.prod(factors, axis=-1)


def _f_interval_union(domain: IntervalUnion, z: complex) -> complex:
    # midpoint-factored antiderivative: length * e^{i pi z (a+b)} *
    # sin(pi z L)/(pi z L); free of the cancellation the raw difference
    # quotient suffers near z = 0
    acc = 0.0 + 0.0j
    for a, b in domain.intervals:
        length = b - a
        acc += (
            length
            * np.exp(1j * np.pi * z * (a + b))
            * complex(_sinc_pi(np.array(z * length)))
        )
    return complex(acc)


def eval_F_omega(domain: DomainSpec, z: Sequence[complex]) -> complex:
    """Exact transform of the domain's indicator at frequency vector z."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if isinstance(domain, UnitCube):
        if z.shape[-1] != domain.dimension:
            raise ArityMismatchError(
                f"z has {z.shape[-1]} coordinates, cube dimension is "
                f"{domain.dimension}"
            )
        return complex(_f_cube(z))
    if isinstance(domain, IntervalUnion):
        if z.shape[-1] != 1:
            raise ArityMismatchError("interval unions are one-dimensional")
        return _f_interval_union(domain, complex(z[0]))
    raise TypeError(f"unsupported domain {type(domain).__name__}")


@lru_cache(maxsize=8)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def _gl_segment(f, a: float, b: float, quad_n: int) -> complex:
    nodes, weights = _leggauss(quad_n)
    x = 0.5 * (b - a) * nodes + 0.5 * (b + a)
    w = 0.5 * (b - a) * weights
    return complex(np.sum(w * f(x)))


def f_omega_quadrature(
    domain: DomainSpec, z: Sequence[complex], quad_n: int = 2048
) -> complex:
    """Quadrature oracle for eval_F_omega (independent of the closed forms).

    Product domains factor coordinate-wise, so Gauss-Legendre with quad_n
    nodes is applied per axis.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if isinstance(domain, UnitCube):
        if z.shape[-1] != domain.dimension:
            raise ArityMismatchError("arity mismatch")
        acc = 1.0 + 0.0j
        for zj in z:
            acc *= _gl_segment(
                lambda x, zj=zj: np.exp(2j * np.pi * zj * x), 0.0, 1.0, quad_n
            )
        return complex(acc)
    if isinstance(domain, IntervalUnion):
        if z.shape[-1] != 1:
            raise ArityMismatchError("interval unions are one-dimensional")
        z0 = complex(z[0])
        return complex(
            sum(
                _gl_segment(
                    lambda x: np.exp(2j * np.pi * z0 * x), a, b, quad_n
                )
                for a, b in domain.intervals
            )
        )
    raise TypeError(f"unsupported domain {type(domain).__name__}")


def in_zero_set_cube_many(
    d: int, zs: np.ndarray, tol: float = 1e-9
) -> np.ndarray:
    """Vectorized zero-set membership for a (P, d) array of points."""
    zs = np.atleast_2d(np.asarray(zs, dtype=complex))
    if zs.shape[-1] != d:
        raise ArityMismatchError(
            f"expected {d} coordinates, got {zs.shape[-1]}"
        )
    re = zs.real
    nearest = np.round(re)
    hits = (
        (np.abs(zs.imag) <= tol)
        & (np.abs(re - nearest) <= tol)
        & (nearest != 0)
    )
    return np.any(hits, axis=-1)


def in_zero_set_cube(d: int, z: Sequence[complex], tol: float = 1e-9) -> bool:
    """Membership in the cube transform's zero set.

    True iff z is nonzero and some coordinate sits within tol of a nonzero
    integer (real part near the integer, imaginary part near zero).  The
    tolerance accommodates floating-point spectra assembled from tables.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    return bool(in_zero_set_cube_many(d, z.reshape(1, -1), tol)[0])


@dataclass(frozen=True)
class GramMatrix:
    """Inner-product matrix of exponentials labeled by spectrum points."""

    entries: np.ndarray
    labels: np.ndarray
    domain: DomainSpec

    def max_offdiag(self) -> float:
        off = self.entries.copy()
        np.fill_diagonal(off, 0.0)
        return float(np.max(np.abs(off))) if off.size else 0.0

    def hermitian_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))


def gram_matrix(domain: DomainSpec, points: np.ndarray) -> GramMatrix:
    """Gram matrix G[j,k] = F(point_k - point_j); diagonal is the measure."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] == 0:
        raise ValueError("gram matrix of an empty point list")
    dim = domain.dimension if isinstance(domain, UnitCube) else 1
    if pts.shape[1] != dim:
        raise ArityMismatchError(
            f"points have {pts.shape[1]} coordinates, domain dimension {dim}"
        )
    diffs = pts[None, :, :] - pts[:, None, :]
    if isinstance(domain, UnitCube):
        entries = _f_cube(diffs)
    else:
        entries = np.array(
            [
                [_f_interval_union(domain, complex(d[0])) for d in row]
                for row in diffs
            ]
        )
    return GramMatrix(entries=entries, labels=pts, domain=domain)


@dataclass(frozen=True)
class OrthogonalityReport:
    is_orthogonal: bool
    worst_offdiag: float
    witness: Optional[tuple[np.ndarray, np.ndarray]]
    n_points: int


def orthogonality_verdict(
    domain: DomainSpec,
    spec: SpectrumSpec,
    window: LatticeWindow,
    tol: float = 1e-10,
) -> OrthogonalityReport:
    """Pairwise-orthogonality check of the windowed exponential family."""
    pts = enumerate_spectrum(spec, window)
    gram = gram_matrix(domain, pts)
    off = np.abs(gram.entries.copy())
    np.fill_diagonal(off, 0.0)
    worst = float(off.max()) if off.size else 0.0
    if worst < tol or pts.shape[0] == 1:
        return OrthogonalityReport(True, worst, None, pts.shape[0])
    j, k = np.unravel_index(int(np.argmax(off)), off.shape)
    return OrthogonalityReport(False, worst, (pts[j], pts[k]), pts.shape[0])


@dataclass(frozen=True)
class CompletenessReport:
    """Captured-energy ratios; totality is a limit, never a boolean.

    The plateau threshold separating 'looks complete' from 'incomplete'
    in rendered reports is a documented heuristic, not a theorem.
    """

    ratios: tuple[float, ...]
    plateau_threshold: float = 0.95


def completeness_probe(
    domain: DomainSpec,
    spec: SpectrumSpec,
    window: LatticeWindow,
    test_functions: Sequence[GridState],
    plateau_threshold: float = 0.95,
) -> CompletenessReport:
    """Parseval ratio sum |<e_lam, f>|^2 / (|f|^2 * measure) per test state.

    Ratios increase toward 1 with the window when the family is total;
    missing frequencies leave a plateau strictly below 1.  Only unit-cube
    domains carry the grid sampling this probe relies on.
    """
    if not isinstance(domain, UnitCube):
        raise TypeError("completeness probe requires a unit-cube domain")
    pts = enumerate_spectrum(spec, window)
    ratios = []
    for f in test_functions:
        if f.dimension != domain.dimension:
            raise ArityMismatchError("test function dimension mismatch")
        norm2 = f.norm() ** 2
        if norm2 <= 0.0:
            raise ValueError("zero-norm test function")
        coords = [f.axis_coords(ax) for ax in range(f.dimension)]
        captured = 0.0
        for lam in pts:
            phase = np.ones_like(f.values, dtype=complex)
            for ax, lj in enumerate(lam):
                shape = [1] * f.dimension
                shape[ax] = coords[ax].size
                phase = phase * np.exp(
                    2j * np.pi * lj * coords[ax]
                ).reshape(shape)
            mode = GridState(phase, f.sampling)
            captured += abs(mode.inner(f)) ** 2
        ratios.append(captured / (norm2 * domain.measure))
    return CompletenessReport(tuple(ratios), plateau_threshold)


@dataclass(frozen=True)
class RootScanReport:
    min_modulus: float
    argmin_angle: float
    samples: int


def _poly_on_circle(coefficients: np.ndarray, theta: np.ndarray) -> np.ndarray:
    z = np.exp(1j * theta)
    acc = np.zeros_like(z)
    for c in coefficients[::-1]:
        acc = acc * z + c
    return acc


def unit_circle_root_scan(
    coefficients: Sequence[complex], samples: int = 4096
) -> RootScanReport:
    """Minimum modulus of a polynomial on |z| = 1, coarse-to-fine.

    Coefficients are ascending (constant term first).  An equispaced scan
    locates the coarse minimum; golden-section refinement around it returns
    a stable minimum, which is all that is needed for a positive lower
    bound with margin (no root finder involved).
    """
    coeffs = np.asarray(list(coefficients), dtype=complex)
    if coeffs.size == 0:
        raise ValueError("empty coefficient list")
    if samples < 16:
        raise ValueError("samples must be >= 16")
    theta = 2.0 * np.pi * np.arange(samples) / samples
    mods = np.abs(_poly_on_circle(coeffs, theta))
    i0 = int(np.argmin(mods))
    delta = 2.0 * np.pi / samples
    lo, hi = theta[i0] - delta, theta[i0] + delta

    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc = abs(_poly_on_circle(coeffs, np.array([c]))[0])
    fd = abs(_poly_on_circle(coeffs, np.array([d]))[0])
    for _ in range(120):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = abs(_poly_on_circle(coeffs, np.array([c]))[0])
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = abs(_poly_on_circle(coeffs, np.array([d]))[0])
    angle = c if fc < fd else d
    refined = min(fc, fd)
    if refined <= mods[i0]:
        return RootScanReport(float(refined), float(angle % (2 * np.pi)), samples)
    return RootScanReport(float(mods[i0]), float(theta[i0]), samples)
