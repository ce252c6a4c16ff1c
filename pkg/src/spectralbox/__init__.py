"""spectralbox: numerics for exponential bases and boundary unitaries on boxes.

Submodules:
  model         domain/spectrum value types and family enumeration
  exponentials  box transforms, Gram matrices, completeness, root scans
  cocycles      cocycle identities, classification, quasi-commutativity
  extensions    boundary unitaries and the fractional linear transform
  groups        induced one-parameter groups, grid and spectral realizations
  tiling        torus tiling multiplicity checks and figures
  diffraction   quasi-periodic shift models and point-mass expansions
  cli           config-driven batch runner
"""

from .model import (
    ClassA2D,
    ClassB2D,
    ExplicitSpectrum,
    IntervalUnion,
    IntFunction,
    LatticeWindow,
    SpectralBoxError,
    ToleranceConfig,
    Tower,
    Tower3D,
    TranslatedLattice,
    UnitCube,
    enumerate_spectrum,
    spectrum_difference_set,
)

__version__ = "0.1.0"

__all__ = [
    "ClassA2D",
    "ClassB2D",
    "ExplicitSpectrum",
    "IntervalUnion",
    "IntFunction",
    "LatticeWindow",
    "SpectralBoxError",
    "ToleranceConfig",
    "Tower",
    "Tower3D",
    "TranslatedLattice",
    "UnitCube",
    "enumerate_spectrum",
    "spectrum_difference_set",
    "__version__",
]
