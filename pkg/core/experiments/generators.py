# -*- coding: utf-8 -*-
"""
Signal generators

Test surfaces sampled on a homogeneous d x d grid x_k = (k - 1) / d, the
chessboard image with missing lines, seeded Gaussian noise and the error
measures used by the experiments. Grid values are stored column-major: the
first coordinate varies fastest, matching LatticeSpec vertex numbering.
"""

from dataclasses import dataclass, replace
from typing import Iterable, Optional

import numpy as np
from scipy.special import expit

from core.errors import ConfigurationError, DimensionMismatchError
from core.graph_model import LatticeSpec


DEFAULT_SIGMA2 = 0.25


@dataclass(frozen=True)
class GridSignal:
    """Signal on a lattice, plus the noise-free surface when known"""
    spec: LatticeSpec
    values: np.ndarray
    truth: Optional[np.ndarray] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (self.spec.size,):
            raise DimensionMismatchError(f"lattice {self.spec} needs {self.spec.size} values, got {values.shape}")
        object.__setattr__(self, "values", values)
        if self.truth is not None:
            truth = np.asarray(self.truth, dtype=np.float64)
            if truth.shape != values.shape:
                raise DimensionMismatchError("truth and values differ in length")
            object.__setattr__(self, "truth", truth)

    def as_image(self) -> np.ndarray:
        """n1 x n2 array, row index = first lattice coordinate"""
        return self.values.reshape(self.spec.dims, order="F")

    @classmethod
    def from_image(cls, image: np.ndarray, truth: Optional[np.ndarray] = None) -> "GridSignal":
        image = np.asarray(image, dtype=np.float64)
        spec = LatticeSpec(*image.shape)
        truth_vec = None if truth is None else np.asarray(truth, dtype=np.float64).ravel(order="F")
        return cls(spec, image.ravel(order="F"), truth_vec)


def grid_coordinates(d: int):
    """(x1, x2) sample vectors in vertex order for a d x d grid"""
    if d < 2:
        raise ConfigurationError(f"grid side must be >= 2, got {d}")
    axis = np.arange(d, dtype=np.float64) / d
    x1, x2 = np.meshgrid(axis, axis, indexing="ij")
    return x1.ravel(order="F"), x2.ravel(order="F")


def bisigmoid(x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    return 0.5 * (expit(16.0 * x1 - 8.0) + expit(16.0 * x2 - 8.0))


def bicubic(x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    return 0.5 * ((2.0 * x1 - 1.0) ** 3 + (2.0 * x2 - 1.0) ** 3) + 2.0


def _sampled(d: int, surface) -> GridSignal:
    x1, x2 = grid_coordinates(d)
    truth = surface(x1, x2)
    return GridSignal(LatticeSpec(d, d), truth.copy(), truth)


def gen_bisigmoid(d: int) -> GridSignal:
    return _sampled(d, bisigmoid)


def gen_bicubic(d: int) -> GridSignal:
    return _sampled(d, bicubic)


def gen_linear(d: int) -> GridSignal:
    """x1 + x2, in the null space of the Kronecker trend matrix"""
    return _sampled(d, lambda x1, x2: x1 + x2)


def noise_generator(seed: int) -> np.random.Generator:
    """PCG64 stream; identical draws for a given seed on every platform"""
    return np.random.Generator(np.random.PCG64(seed))


def add_noise(s: GridSignal, sigma2: float = DEFAULT_SIGMA2, seed: int = 0) -> GridSignal:
    """values + N(0, sigma2) i.i.d.; truth is carried over unchanged"""
    if sigma2 < 0:
        raise ConfigurationError(f"sigma2 must be >= 0, got {sigma2}")
    if sigma2 == 0:
        return replace(s, values=s.values.copy())
    draws = noise_generator(seed).normal(0.0, np.sqrt(sigma2), size=s.values.shape[0])
    return replace(s, values=s.values + draws)


def gen_chessboard(d: int = 64, squares: int = 8) -> GridSignal:
    """d x d board of squares x squares blocks with intensities {0, 1}, top-left block 0"""
    if d < 1 or squares < 1 or d % squares != 0:
        raise ConfigurationError(f"squares={squares} must divide the side d={d}")
    block = d // squares
    index = np.arange(d) // block
    image = ((index[:, None] + index[None, :]) % 2).astype(np.float64)
    return GridSignal.from_image(image, truth=image)


def corrupt_lines(s: GridSignal, line_rows: Iterable[int] = (), line_cols: Iterable[int] = (),
                  fill: float = 1.0) -> GridSignal:
    """Overwrite whole image rows and columns with fill; truth stays clean"""
    image = s.as_image().copy()
    n1, n2 = image.shape[0], image.shape[1]
    for r in line_rows:
        if not 0 <= r < n1:
            raise ConfigurationError(f"row {r} outside the image")
        image[r, :] = fill
    for c in line_cols:
        if not 0 <= c < n2:
            raise ConfigurationError(f"column {c} outside the image")
        image[:, c] = fill
    return replace(s, values=image.ravel(order="F"))


def mse(a: np.ndarray, b: np.ndarray) -> float:
    """Mean squared difference"""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"cannot compare vectors of shape {a.shape} and {b.shape}")
    return float(np.mean((a - b) ** 2)) if a.size else 0.0


def best_linear_fit(values: np.ndarray, spec: LatticeSpec) -> np.ndarray:
    """Least-squares affine fit c0 + sum_j c_j * coord_j over the lattice"""
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (spec.size,):
        raise DimensionMismatchError(f"lattice {spec} needs {spec.size} values, got {values.shape}")
    design = np.column_stack([np.ones(spec.size), spec.coordinates().astype(np.float64)])
    coef, *_ = np.linalg.lstsq(design, values, rcond=None)
    return design @ coef
