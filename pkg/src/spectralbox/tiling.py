"""Finite-torus tiling checks for cube translates, plus figure output.

A candidate translation set covers the torus window [0,N)^d with half-open
unit cubes; the multiplicity map counts covering translates per sample
point.  Samples that land on a cube face (measure zero) are excluded from
verdicts.  Tables indexing the translation families are used N-periodically
inside the window, a desk-scale surrogate for the full-space statement,
and reports label it as such.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Union

import numpy as np

from .model import (
    ClassA2D,
    ClassB2D,
    ExplicitSpectrum,
    IntFunction,
    SpectrumSpec,
    Tower,
    Tower3D,
    TranslatedLattice,
)

__all__ = [
    "torus_translates",
    "MultiplicityMap",
    "multiplicity_map",
    "TilingReport",
    "tiling_verdict",
    "emit_tiling_svg",
]


def _periodic(fn: IntFunction, n: int, *args: int) -> float:
    return fn(*(int(a) % n for a in args))


def torus_translates(
    spec: SpectrumSpec, torus_n: int, pad: int = 1
) -> np.ndarray:
    """Translation points covering [0,N)^d, padded one cube beyond.

    Family tables are reduced modulo N so the point set is N-periodic on
    the window.
    """
    if torus_n < 1:
        raise ValueError("torus window must be >= 1")
    lo, hi = -pad, torus_n + pad - 1
    rng = range(lo, hi + 1)
    pts = []
    if isinstance(spec, TranslatedLattice):
        d = spec.dimension
        grids = np.meshgrid(*([list(rng)] * d), indexing="ij")
        idx = np.stack([g.ravel() for g in grids], axis=1).astype(float)
        return idx + np.asarray(spec.alpha)
    if isinstance(spec, ClassA2D):
        for m in rng:
            bm = _periodic(spec.beta, torus_n, m)
            for n in rng:
                pts.append((spec.alpha + m, bm + n))
        return np.array(pts)
    if isinstance(spec, ClassB2D):
        for n in rng:
            bn = _periodic(spec.beta, torus_n, n)
            for m in rng:
                pts.append((bn + m, spec.alpha + n))
        return np.array(pts)
    if isinstance(spec, Tower3D):
        spec = spec.as_tower()
    if isinstance(spec, Tower):
        d = spec.dimension
        for idx in np.ndindex(*([hi - lo + 1] * d)):
            tup = tuple(i + lo for i in idx)
            point = [
                _periodic(spec.levels[j], torus_n, *tup[:j]) + tup[j]
                for j in range(d)
            ]
            pts.append(tuple(point))
        return np.array(pts)
    if isinstance(spec, ExplicitSpectrum):
        return np.array(spec.points, copy=True)
    raise TypeError(f"unsupported spectrum spec {type(spec).__name__}")


@dataclass(frozen=True)
class MultiplicityMap:
    """Covering counts over the sampled torus window."""

    counts: np.ndarray
    face_mask: np.ndarray
    torus_n: int
    resolution: int

    def off_face_counts(self) -> np.ndarray:
        return self.counts[~self.face_mask]


def multiplicity_map(
    spec: Union[SpectrumSpec, np.ndarray],
    torus_n: int,
    resolution: int,
    face_eps: float = 1e-9,
) -> MultiplicityMap:
    """Count covering translates at half-cell sample points.

    `spec` may be a spectrum family (periodized over the window) or an
    explicit (P, d) array of translation points.  Resolution is samples
    per unit length; fewer than 8 per unit is rejected as too coarse.
    """
    if resolution < 8:
        raise ValueError("resolution below 8 samples per unit is too coarse")
    if isinstance(spec, np.ndarray):
        points = np.atleast_2d(np.asarray(spec, dtype=float))
    else:
        points = torus_translates(spec, torus_n)
    d = points.shape[1]
    if d > 3:
        raise ValueError("multiplicity maps support d <= 3")
    n_samples = torus_n * resolution
    axis = (np.arange(n_samples) + 0.5) / resolution
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    counts = np.zeros(grids[0].shape, dtype=int)
    on_face = np.zeros(grids[0].shape, dtype=bool)
    for p in points:
        inside = np.ones(grids[0].shape, dtype=bool)
        near_face = np.zeros(grids[0].shape, dtype=bool)
        for j in range(d):
            u = grids[j] - p[j]
            inside &= (u >= 0.0) & (u < 1.0)
            near_face |= (np.abs(u) < face_eps) | (np.abs(u - 1.0) < face_eps)
        counts += inside
        on_face |= near_face & inside
    return MultiplicityMap(counts, on_face, torus_n, resolution)


@dataclass(frozen=True)
class TilingReport:
    tiles: bool
    overlap_fraction: float
    gap_fraction: float
    n_excluded: int


def tiling_verdict(mp: MultiplicityMap) -> TilingReport:
    """Tiles iff every off-face sample is covered exactly once."""
    counts = mp.off_face_counts()
    total = counts.size
    if total == 0:
        raise ValueError("no off-face samples to judge")
    gaps = int(np.count_nonzero(counts == 0))
    overlaps = int(np.count_nonzero(counts >= 2))
    return TilingReport(
        tiles=bool(gaps == 0 and overlaps == 0),
        overlap_fraction=overlaps / total,
        gap_fraction=gaps / total,
        n_excluded=int(np.count_nonzero(mp.face_mask)),
    )


_UNIT = 54  # pixels per unit length, matching the familiar figure scale


def _fmt(value: float) -> str:
    return f"{value:.3f}".rstrip("0").rstrip(".")


def emit_tiling_svg(
    spec: SpectrumSpec, torus_n: int, sink: Union[str, IO[bytes], None] = None
) -> bytes:
    """Deterministic SVG of the translated unit squares over the window.

    Column-shifted families are annotated with the successive shift
    differences between neighboring columns (rows for the transposed
    family), in the style of staggered-tiling diagrams.
    """
    points = torus_translates(spec, torus_n)
    if points.shape[1] != 2:
        raise ValueError("tiling figures are two-dimensional")
    lo, hi = -1.0, torus_n + 1.0
    span = hi - lo
    size = span * _UNIT

    def sx(x: float) -> float:
        return (x - lo) * _UNIT

    def sy(y: float) -> float:
        return (hi - y) * _UNIT  # flip: SVG y grows downward

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(size)}" '
        f'height="{_fmt(size)}" viewBox="0 0 {_fmt(size)} {_fmt(size)}">',
        f'<rect x="0" y="0" width="{_fmt(size)}" height="{_fmt(size)}" '
        'fill="white"/>',
    ]
    order = np.lexsort((points[:, 1], points[:, 0]))
    for p in points[order]:
        parts.append(
            f'<rect x="{_fmt(sx(p[0]))}" y="{_fmt(sy(p[1] + 1.0))}" '
            f'width="{_fmt(_UNIT)}" height="{_fmt(_UNIT)}" fill="none" '
            'stroke="black" stroke-width="1"/>'
        )
    if isinstance(spec, (ClassA2D, ClassB2D)):
        beta = spec.beta
        for m in range(0, torus_n - 1):
            d = _periodic(beta, torus_n, m + 1) - _periodic(beta, torus_n, m)
            label = f"d{m} = {_fmt(d)}"
            if isinstance(spec, ClassA2D):
                tx, ty = sx(spec.alpha + m + 1.0), sy(torus_n + 0.3)
            else:
                tx, ty = sx(torus_n + 0.1), sy(spec.alpha + m + 1.0)
            parts.append(
                f'<text x="{_fmt(tx)}" y="{_fmt(ty)}" font-size="11" '
                f'font-family="monospace" fill="black">{label}</text>'
            )
    parts.append("</svg>")
    payload = ("\n".join(parts) + "\n").encode("utf-8")
    if sink is not None:
        if isinstance(sink, (str, bytes)) or hasattr(sink, "__fspath__"):
            with open(sink, "wb") as fh:
                fh.write(payload)
        else:
            sink.write(payload)
    return payload
