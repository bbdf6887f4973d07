"""Closed-form elasticity fields used as exact solutions, and reference SIFs."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ..errors import FormulaRangeError
from .material import Material, constitutive_matrix


@dataclass(frozen=True)
class FieldSample:
    """Exact field at N points: displacement (N, dim), engineering strain and stress in Voigt order."""

    displacement: np.ndarray
    strain: np.ndarray
    stress: np.ndarray


def _from_stress(u, stress, material):
    D = constitutive_matrix(material)
    strain = np.linalg.solve(D, stress.T).T
    return FieldSample(u, strain, stress)


def _from_strain(u, strain, material):
    return FieldSample(u, strain, strain @ constitutive_matrix(material).T)


# ---------------------------------------------------------------------------
# 2D cantilever with parabolic end shear
# ---------------------------------------------------------------------------

CANTILEVER_DEFAULTS = dict(L=8.0, D=4.0, E=3.0e7, nu=0.3, P=250.0, mode="plane_stress")


def cantilever_field(points, L=8.0, D=4.0, E=3.0e7, nu=0.3, P=250.0, mode="plane_stress") -> FieldSample:
    """Beam on x in [0, L], y in [-D/2, D/2], clamped at x = 0, shear P at x = L."""
    mat = Material(E, nu, mode)
    Eb, nb = mat.effective()
    I = D**3 / 12.0
    x, y = np.asarray(points, float).T
    c = P / (6.0 * Eb * I)
    u = c * y * ((6.0 * L - 3.0 * x) * x + (2.0 + nb) * (y**2 - D**2 / 4.0))
    v = -c * (3.0 * nb * y**2 * (L - x) + (4.0 + 5.0 * nb) * D**2 * x / 4.0 + (3.0 * L - x) * x**2)
    exx = P * y * (L - x) / (Eb * I)
    eyy = -nb * exx
    gxy = P * (1.0 + nb) * (y**2 - D**2 / 4.0) / (Eb * I)
    return _from_strain(np.column_stack([u, v]), np.column_stack([exx, eyy, gxy]), mat)


# ---------------------------------------------------------------------------
# Infinite plate with a circular hole, uniaxial tension along x
# ---------------------------------------------------------------------------

KIRSCH_DEFAULTS = dict(a=1.0, E=1.0e5, nu=0.3, sigma=1.0, mode="plane_stress")


def kirsch_stress(points, a=1.0, sigma=1.0) -> np.ndarray:
    x, y = np.asarray(points, float).T
    r = np.hypot(x, y)
    th = np.arctan2(y, x)
    q2, q4 = (a / r) ** 2, (a / r) ** 4
    c2, c4, s2, s4 = np.cos(2 * th), np.cos(4 * th), np.sin(2 * th), np.sin(4 * th)
    sxx = 1.0 - q2 * (1.5 * c2 + c4) + 1.5 * q4 * c4
    syy = -q2 * (0.5 * c2 - c4) - 1.5 * q4 * c4
    txy = -q2 * (0.5 * s2 + s4) + 1.5 * q4 * s4
    return sigma * np.column_stack([sxx, syy, txy])


def kirsch_field(points, a=1.0, E=1.0e5, nu=0.3, sigma=1.0, mode="plane_stress") -> FieldSample:
    mat = Material(E, nu, mode)
    mu, kap = mat.shear_modulus, mat.kolosov
    x, y = np.asarray(points, float).T
    r = np.hypot(x, y)
    th = np.arctan2(y, x)
    f = sigma * a / (8.0 * mu)
    ra, ar = r / a, a / r
    ux = f * (ra * (kap + 1) * np.cos(th) + 2 * ar * ((1 + kap) * np.cos(th) + np.cos(3 * th)) - 2 * ar**3 * np.cos(3 * th))
    uy = f * (ra * (kap - 3) * np.sin(th) + 2 * ar * ((1 - kap) * np.sin(th) + np.sin(3 * th)) - 2 * ar**3 * np.sin(3 * th))
    return _from_stress(np.column_stack([ux, uy]), kirsch_stress(points, a, sigma), mat)


# ---------------------------------------------------------------------------
# Reentrant corner: first symmetric (mode I) term of the corner expansion
# ---------------------------------------------------------------------------

L_SHAPE_DEFAULTS = dict(K_I=1.0, E=1000.0, nu=0.3, mode="plane_strain", opening=1.5 * np.pi, bisector=0.75 * np.pi)


def williams_eigenvalue(opening: float = 1.5 * np.pi) -> float:
    """Smallest positive root of lambda sin(w) + sin(lambda w) = 0 for a notch of angle w."""

    def f(lam):
        return lam * np.sin(opening) + np.sin(lam * opening)

    if abs(opening - 1.5 * np.pi) < 1e-12:
        return brentq(f, 0.5, 0.6, xtol=1e-15)
    grid = np.linspace(0.01, 1.0, 200)
    vals = f(grid)
    for lo, hi, flo, fhi in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if flo * fhi < 0:
            return brentq(f, lo, hi, xtol=1e-15)
    raise FormulaRangeError("no eigenvalue in (0, 1) for this notch angle")


def l_shape_field(points, K_I=1.0, E=1000.0, nu=0.3, mode="plane_strain", opening=1.5 * np.pi,
                  bisector=0.75 * np.pi) -> FieldSample:
    """Corner field around the origin; the material occupies the wedge of angle
    ``opening`` centred on the direction ``bisector``. ``K_I`` is the
    generalized SIF: sigma_theta theta = K_I r^(lambda-1) / sqrt(2 pi) on the bisector.
    """
    mat = Material(E, nu, mode)
    lam = williams_eigenvalue(opening)
    alpha = 0.5 * opening
    Q = -np.cos((lam - 1) * alpha) / np.cos((lam + 1) * alpha)
    A = K_I / (np.sqrt(2 * np.pi) * lam * (1 + lam) * (1 + Q))
    c, s = np.cos(bisector), np.sin(bisector)
    R = np.array([[c, -s], [s, c]])
    p = np.asarray(points, float) @ R  # local coordinates (bisector = local x)
    r = np.hypot(p[:, 0], p[:, 1])
    t = np.arctan2(p[:, 1], p[:, 0])
    G, kap = mat.shear_modulus, mat.kolosov
    ux = A * r**lam / (2 * G) * ((kap - Q * (lam + 1)) * np.cos(lam * t) - lam * np.cos((lam - 2) * t))
    uy = A * r**lam / (2 * G) * ((kap + Q * (lam + 1)) * np.sin(lam * t) + lam * np.sin((lam - 2) * t))
    with np.errstate(divide="ignore", invalid="ignore"):
        f = A * lam * r ** (lam - 1)
    sx = f * ((2 - Q * (lam + 1)) * np.cos((lam - 1) * t) - (lam - 1) * np.cos((lam - 3) * t))
    sy = f * ((2 + Q * (lam + 1)) * np.cos((lam - 1) * t) + (lam - 1) * np.cos((lam - 3) * t))
    txy = f * ((lam - 1) * np.sin((lam - 3) * t) + Q * (lam + 1) * np.sin((lam - 1) * t))
    u = np.column_stack([ux, uy]) @ R.T
    # rotate the stress tensor back to global axes
    S = np.empty((len(r), 2, 2))
    S[:, 0, 0], S[:, 1, 1], S[:, 0, 1], S[:, 1, 0] = sx, sy, txy, txy
    Sg = R[None] @ S @ R.T[None]
    stress = np.column_stack([Sg[:, 0, 0], Sg[:, 1, 1], Sg[:, 0, 1]])
    return _from_stress(u, stress, mat)


# ---------------------------------------------------------------------------
# 3D cantilever with end shear (Saint-Venant flexure of a rectangular bar)
# ---------------------------------------------------------------------------

BEAM3D_DEFAULTS = dict(a=1.0, b=1.0, L=5.0, E=1.0, nu=0.3, F=1.0, terms=50)


def beam3d_field(points, a=1.0, b=1.0, L=5.0, E=1.0, nu=0.3, F=1.0, terms=50) -> FieldSample:
    """Bar [-a, a] x [-b, b] x [0, L]; sigma_zz = F y z / I, shear resultant F."""
    mat = Material(E, nu, "solid")
    I = 4.0 * a * b**3 / 3.0
    x, y, z = np.asarray(points, float).T
    n = np.arange(1, terms + 1)[:, None]
    sign = (-1.0) ** n
    k = n * np.pi / a
    # cosh ratios computed as exponentials to stay finite for many terms
    ch = np.exp(k * (np.abs(y)[None] - b)) * (1 + np.exp(-2 * k * np.abs(y)[None])) / (1 + np.exp(-2 * k * b))
    sh = np.sign(y)[None] * np.exp(k * (np.abs(y)[None] - b)) * (1 - np.exp(-2 * k * np.abs(y)[None])) / (1 + np.exp(-2 * k * b))
    s_xz = 2 * a**2 * nu * F / (np.pi**2 * I * (1 + nu)) * np.sum(sign / n**2 * np.sin(k * x[None]) * sh, axis=0)
    s_yz = (b**2 - y**2) * F / (2 * I) + nu * F / (I * (1 + nu)) * (
        (3 * x**2 - a**2) / 6.0 - 2 * a**2 / np.pi**2 * np.sum(sign / n**2 * np.cos(k * x[None]) * ch, axis=0)
    )
    s_zz = F * y * z / I
    zero = np.zeros_like(x)
    stress = np.column_stack([zero, zero, s_zz, zero, s_yz, s_xz])
    u = -nu * F / (E * I) * x * y * z
    v = F / (E * I) * (nu * (x**2 - y**2) * z / 2.0 - z**3 / 6.0)
    w = F / (E * I) * (
        y * (nu * x**2 + z**2) / 2.0
        + nu * y**3 / 6.0
        + (1 + nu) * (b**2 * y - y**3 / 3.0)
        - nu * a**2 * y / 3.0
        - 4 * nu * a**3 / np.pi**3 * np.sum(sign / n**3 * np.cos(k * x[None]) * sh, axis=0)
    )
    return _from_stress(np.column_stack([u, v, w]), stress, mat)


# ---------------------------------------------------------------------------
# Linear patch fields
# ---------------------------------------------------------------------------

PATCH3D_GRADIENT = 0.5e-3 * np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]])
PATCH2D_GRADIENT = 1e-3 * np.array([[1.0, 0.4], [0.6, -0.5]])
PATCH2D_OFFSET = 1e-3 * np.array([0.2, -0.3])


def _linear_field(points, grad, offset, material):
    p = np.asarray(points, float)
    u = p @ grad.T + offset
    if grad.shape[0] == 2:
        e = np.array([grad[0, 0], grad[1, 1], grad[0, 1] + grad[1, 0]])
    else:
        e = np.array([grad[0, 0], grad[1, 1], grad[2, 2], grad[0, 1] + grad[1, 0],
                      grad[1, 2] + grad[2, 1], grad[2, 0] + grad[0, 2]])
    return _from_strain(u, np.tile(e, (len(p), 1)), material)


def patch3d_field(points, E=1.0, nu=0.3) -> FieldSample:
    return _linear_field(points, PATCH3D_GRADIENT, np.zeros(3), Material(E, nu, "solid"))


def patch2d_field(points, E=1.0, nu=0.3, mode="plane_stress") -> FieldSample:
    return _linear_field(points, PATCH2D_GRADIENT, PATCH2D_OFFSET, Material(E, nu, mode))


FIELDS = {
    "cantilever": (cantilever_field, CANTILEVER_DEFAULTS),
    "kirsch": (kirsch_field, KIRSCH_DEFAULTS),
    "l_shape": (l_shape_field, L_SHAPE_DEFAULTS),
    "beam3d": (beam3d_field, BEAM3D_DEFAULTS),
    "patch3d": (patch3d_field, dict(E=1.0, nu=0.3)),
    "patch2d": (patch2d_field, dict(E=1.0, nu=0.3, mode="plane_stress")),
}


def analytical_field(name: str, params: dict | None, points) -> FieldSample:
    """Evaluate a named exact field at ``points`` (shape (N, dim))."""
    try:
        fn, defaults = FIELDS[name]
    except KeyError:
        raise ValueError(f"unknown analytical field {name!r}; known: {sorted(FIELDS)}") from None
    kw = dict(defaults)
    kw.update(params or {})
    unknown = set(kw) - set(defaults)
    if unknown:
        raise ValueError(f"unknown parameters for {name}: {sorted(unknown)}")
    return fn(np.atleast_2d(np.asarray(points, float)), **kw)


def field_material(name: str, params: dict | None = None) -> Material:
    _, defaults = FIELDS[name]
    kw = dict(defaults)
    kw.update(params or {})
    mode = kw.get("mode", "solid" if name in ("beam3d", "patch3d") else "plane_stress")
    return Material(kw["E"], kw["nu"], mode)


# ---------------------------------------------------------------------------
# Reference stress intensity factors
# ---------------------------------------------------------------------------


def edge_crack_correction(a_over_b: float) -> float:
    """Double-edge-crack finite-width factor, valid for a/b > 0.4 (b = half width)."""
    if not a_over_b > 0.4 or a_over_b >= 1.0:
        raise FormulaRangeError(f"correction factor valid for 0.4 < a/b < 1, got {a_over_b}")
    r = a_over_b
    return 1.12 + 0.203 * r - 1.197 * r**2 + 1.930 * r**3


def reference_sif(benchmark: str, params: dict | None = None) -> tuple:
    """(K_I, K_II) for ``edge_crack`` (a, H, sigma) or ``inclined_crack`` (beta_deg, a, sigma1, sigma2)."""
    p = dict(params or {})
    if benchmark == "edge_crack":
        a, H, sigma = p.get("a", 0.25), p.get("H", 1.0), p.get("sigma", 1.0)
        C = edge_crack_correction(a / (0.5 * H))
        return C * sigma * np.sqrt(np.pi * a), 0.0
    if benchmark == "inclined_crack":
        beta = np.deg2rad(p.get("beta_deg", 0.0))
        a, s1, s2 = p.get("a", 1.0), p.get("sigma1", 1.0), p.get("sigma2", 2.0)
        root = np.sqrt(np.pi * a)
        KI = (s2 * np.sin(beta) ** 2 + s1 * np.cos(beta) ** 2) * root
        KII = (s2 - s1) * np.sin(beta) * np.cos(beta) * root
        return float(KI), float(KII)
    raise ValueError(f"unknown SIF benchmark {benchmark!r}")
