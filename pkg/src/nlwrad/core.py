"""Model parameters, radial grid, and quadrature for the defocusing wave
equation u_tt - Laplace(u) = -|u|^{p-1} u with radial data in dimension d >= 3.

Everything downstream works on the half-line r in [0, r_max] with uniform
node spacing dr.  Integrals over R^d of radial functions reduce to

    integral f dx = c_d * integral_0^inf f(r) r^{d-1} dr,

with c_d the area of the unit sphere S^{d-1}; they are evaluated by the
trapezoid rule on the solver's own grid so that all diagnostics commute with
the discrete fields.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ModelParams",
    "RadialGrid",
    "QuadratureTailWarning",
    "InvalidParameterError",
    "sphere_area",
    "make_params",
    "make_grid",
    "radial_integral",
    "hdot1_norm_sq",
    "l2_norm_sq",
    "lp1_norm_pow",
]


class InvalidParameterError(ValueError):
    """Raised for (d, p) outside the basic validity region d >= 3, p > 1."""


class QuadratureTailWarning(UserWarning):
    """Integrand has not decayed to negligible size at the outer grid edge."""


def _gamma_half_integer(n: int) -> float:
    """Gamma(n/2) for integer n >= 1, evaluated exactly.

    Even n: ordinary factorial.  Odd n: sqrt(pi) * (n-2)!! / 2^{(n-1)/2}.
    """
    if n % 2 == 0:
        return float(math.factorial(n // 2 - 1))
    dfac = 1
    for k in range(n - 2, 0, -2):
        dfac *= k
    return math.sqrt(math.pi) * dfac / 2.0 ** ((n - 1) // 2)


def sphere_area(d: int) -> float:
    """Area c_d of the unit sphere S^{d-1}: 2 pi^{d/2} / Gamma(d/2)."""
    return 2.0 * math.pi ** (d / 2.0) / _gamma_half_integer(d)


@dataclass(frozen=True)
class ModelParams:
    """Dimension, nonlinearity exponent, and every derived constant.

    The sub-conformal window 1 + 2/(d-1) < p < 1 + 4/(d-1) is equivalent to
    lam in (0,1) and to kappa_max in (0,1); p > p_scatter_min is equivalent
    to kappa_scatter < kappa_max.  Out-of-window parameters are allowed (the
    flags below record admissibility) so experiments can probe failure of
    the decay estimates; only d < 3 or p <= 1 are rejected outright.
    """

    d: int
    p: float
    lam: float = field(init=False)
    beta: float = field(init=False)
    kappa_max: float = field(init=False)
    kappa_scatter: float = field(init=False)
    p_scatter_min: float = field(init=False)
    in_theorem11_range: bool = field(init=False)
    in_scattering_range: bool = field(init=False)
    c_d: float = field(init=False)

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 3:
            raise InvalidParameterError(f"dimension must be an integer >= 3, got {self.d}")
        if not (self.p > 1.0):
            raise InvalidParameterError(f"exponent must satisfy p > 1, got {self.p}")
        d, p = self.d, self.p
        object.__setattr__(self, "lam", (4.0 - (d - 1) * (p - 1)) / 2.0)
        object.__setattr__(self, "beta", ((d - 1) * (p - 1) - 2.0) / (p + 1.0))
        object.__setattr__(self, "kappa_max", ((d - 1) * (p - 1) - 2.0) / 2.0)
        object.__setattr__(self, "kappa_scatter", ((2.0 - d) * p + d + 2.0) / (p + 1.0))
        object.__setattr__(
            self, "p_scatter_min", (3.0 - d + 2.0 * math.sqrt(d * d - d + 1.0)) / (d - 1.0)
        )
        object.__setattr__(self, "in_theorem11_range", 1.0 + 2.0 / (d - 1) < p < 1.0 + 4.0 / (d - 1))
        object.__setattr__(self, "in_scattering_range", p > self.p_scatter_min)
        object.__setattr__(self, "c_d", sphere_area(d))

    @property
    def potential_coeff(self) -> float:
        """(d-1)(d-3)/4, the 1/r^2 potential strength of the 1D reduction."""
        return (self.d - 1) * (self.d - 3) / 4.0

    @property
    def source_exponent(self) -> float:
        """gamma = (d-1)(p-1)/2; the nonlinearity in w-form is -r^{-gamma}|w|^{p-1}w."""
        return (self.d - 1) * (self.p - 1) / 2.0


def make_params(d: int, p: float) -> ModelParams:
    """Construct ModelParams, rejecting d < 3 or p <= 1."""
    return ModelParams(d=d, p=float(p))


@dataclass(frozen=True)
class RadialGrid:
    """Uniform mesh r_j = j*dr, j = 0..n.  The solver uses dt = dr exactly
    (unit CFL), so characteristics map nodes to nodes."""

    dr: float
    n: int

    def __post_init__(self):
        if not (self.dr > 0.0):
            raise InvalidParameterError(f"grid spacing must be positive, got {self.dr}")
        if self.n < 4:
            raise InvalidParameterError(f"grid needs at least 4 cells, got n={self.n}")

    @property
    def r(self) -> np.ndarray:
        return self.dr * np.arange(self.n + 1)

    @property
    def r_max(self) -> float:
        return self.n * self.dr

    @property
    def size(self) -> int:
        return self.n + 1

    def node_index(self, r: float) -> int:
        """Nearest node to radius r (used to snap window radii on-grid)."""
        j = int(round(r / self.dr))
        if j < 0 or j > self.n:
            raise ValueError(f"radius {r} outside grid [0, {self.r_max}]")
        return j


def make_grid(dr: float, r_max: float) -> RadialGrid:
    """Grid covering [0, r_max] with spacing dr (r_max rounded up to a node)."""
    return RadialGrid(dr=dr, n=int(math.ceil(r_max / dr - 1e-12)))


def radial_integral(f: np.ndarray, grid: RadialGrid, d: int, check_tail: bool = True) -> float:
    """c_d * trapezoid(f(r_j) r_j^{d-1}) over the grid.

    Warns (QuadratureTailWarning) when the weighted integrand has not decayed
    at r_max; the value is still returned.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != (grid.size,):
        raise ValueError(f"expected {grid.size} node samples, got shape {f.shape}")
    g = f * grid.r ** (d - 1)
    total = sphere_area(d) * float(np.trapezoid(g, dx=grid.dr))
    if check_tail:
        tail = abs(g[-1]) * grid.dr
        if tail > 1e-10 * (abs(total) + 1.0):
            warnings.warn(
                f"integrand tail {g[-1]:.3e} at r_max={grid.r_max:g} is not negligible",
                QuadratureTailWarning,
                stacklevel=2,
            )
    return total


def hdot1_norm_sq(u_r: np.ndarray, grid: RadialGrid, d: int) -> float:
    """Squared homogeneous H^1 norm of a radial function given its radial
    derivative samples (the angular gradient vanishes for radial data)."""
    return radial_integral(np.asarray(u_r) ** 2, grid, d)


def l2_norm_sq(u: np.ndarray, grid: RadialGrid, d: int) -> float:
    return radial_integral(np.asarray(u) ** 2, grid, d)


def lp1_norm_pow(u: np.ndarray, p: float, grid: RadialGrid, d: int) -> float:
    """integral |u|^{p+1} dx, i.e. the (p+1)-th power of the L^{p+1} norm."""
    return radial_integral(np.abs(u) ** (p + 1), grid, d)
