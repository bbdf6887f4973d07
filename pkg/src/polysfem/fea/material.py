"""Isotropic linear elastic material."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

MODES = ("plane_stress", "plane_strain", "solid")


@dataclass(frozen=True)
class Material:
    E: float
    nu: float
    mode: str = "plane_stress"

    def __post_init__(self):
        if self.E <= 0:
            raise ValueError("Young's modulus must be positive")
        if not -1.0 < self.nu < 0.5:
            raise ValueError("Poisson's ratio must lie in (-1, 0.5)")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")

    @property
    def dim(self) -> int:
        return 3 if self.mode == "solid" else 2

    @property
    def shear_modulus(self) -> float:
        return self.E / (2.0 * (1.0 + self.nu))

    @property
    def kolosov(self) -> float:
        """kappa = (3 - nu)/(1 + nu) in plane stress, 3 - 4 nu otherwise."""
        if self.mode == "plane_stress":
            return (3.0 - self.nu) / (1.0 + self.nu)
        return 3.0 - 4.0 * self.nu

    def effective(self) -> tuple:
        """(E_bar, nu_bar) entering plane-stress formulas: identity in plane stress."""
        if self.mode == "plane_strain":
            return self.E / (1.0 - self.nu**2), self.nu / (1.0 - self.nu)
        return self.E, self.nu


def constitutive_matrix(material: Material) -> np.ndarray:
    """Voigt D: (exx, eyy, gxy) in 2D, (exx, eyy, ezz, gxy, gyz, gzx) in 3D."""
    E, nu = material.E, material.nu
    if material.mode != "plane_stress" and 0.5 - nu < 1e-3:
        warnings.warn("nearly incompressible material: D is ill-conditioned", RuntimeWarning, stacklevel=2)
    if material.mode == "plane_stress":
        return E / (1.0 - nu**2) * np.array([[1.0, nu, 0.0], [nu, 1.0, 0.0], [0.0, 0.0, 0.5 * (1.0 - nu)]])
    lam = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu))
    mu = E / (2.0 * (1.0 + nu))
    if material.mode == "plane_strain":
        return np.array([[lam + 2 * mu, lam, 0.0], [lam, lam + 2 * mu, 0.0], [0.0, 0.0, mu]])
    D = np.zeros((6, 6))
    D[:3, :3] = lam
    D[np.arange(3), np.arange(3)] += 2.0 * mu
    D[np.arange(3, 6), np.arange(3, 6)] = mu
    return D
