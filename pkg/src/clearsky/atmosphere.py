"""Shared physical parameterization of the spherical-shell atmosphere.

Geometry works in meters internally (parameters expose km), wavelengths in
nm. Molecules scatter without absorbing; aerosols follow an Angstrom optical
depth law beta * lambda_um^-alpha spread over an exponential profile with a
fixed single scattering albedo.
"""

import functools
import hashlib
import json
import os
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import InputError
from .spectral import Spectrum, WavelengthGrid, canonical_grid, default_solar

_DATA_DIR = os.path.join(os.path.dirname(__file__), "data")

# Penndorf-style air constants (15 C, 101325 Pa)
_N_S = 2.54743e25           # molecules / m^3
_DEPOLARIZATION = 0.035


def air_refractive_index(lam_nm):
    """Standard-air refractive index, 1953 Edlen dispersion."""
    sigma2 = (1e3 / np.asarray(lam_nm, dtype=float)) ** 2
    n_minus_1 = (6432.8 + 2949810.0 / (146.0 - sigma2)
                 + 25540.0 / (41.0 - sigma2)) * 1e-8
    return 1.0 + n_minus_1


def rayleigh_beta(lam_nm):
    """Sea-level Rayleigh scattering coefficient in m^-1 at 15 C.

    Proportional to lambda^-4 modulo the refractive-index dispersion;
    molecules do not absorb, so this is also the extinction coefficient.
    """
    lam = np.asarray(lam_nm, dtype=float)
    if np.any(lam < 200.0) or np.any(lam > 2500.0):
        raise InputError("wavelength outside the supported 200-2500 nm range")
    lam_m = lam * 1e-9
    n = air_refractive_index(lam)
    king = (6.0 + 3.0 * _DEPOLARIZATION) / (6.0 - 7.0 * _DEPOLARIZATION)
    return (8.0 * np.pi ** 3 * (n ** 2 - 1.0) ** 2) / (3.0 * _N_S * lam_m ** 4) * king


def _load_two_column(path):
    rows = np.loadtxt(path)
    return rows[:, 0], rows[:, 1]


@dataclass
class AtmosphereParams:
    """Planet geometry plus molecular/aerosol scattering inputs.

    Immutable in spirit: derived per-wavelength coefficient arrays are frozen
    at construction; use :func:`dataclasses.replace`-style ``with_aerosols``
    to vary fit parameters.
    """

    grid: WavelengthGrid = field(default_factory=canonical_grid)
    planet_radius_km: float = 6360.0
    top_altitude_km: float = 60.0
    rayleigh_scale_height_km: float = 8.0
    aerosol_alpha: float = 0.8
    aerosol_beta: float = 0.04
    aerosol_scale_height_km: float = 1.2
    aerosol_ssa: float = 0.8
    mie_asymmetry_g: float = 0.7
    solar_angular_radius_rad: float = 0.004675
    rayleigh_scattering: Spectrum | None = None   # sea level, m^-1
    ground_albedo: Spectrum | None = None
    solar_spectrum: Spectrum | None = None

    def __post_init__(self):
        if not 0.0 < self.rayleigh_scale_height_km:
            raise InputError("rayleigh scale height must be positive")
        if not 0.0 < self.aerosol_scale_height_km:
            raise InputError("aerosol scale height must be positive")
        if not 0.0 <= self.aerosol_ssa <= 1.0:
            raise InputError("single scattering albedo must lie in [0, 1]")
        if not -1.0 < self.mie_asymmetry_g < 1.0:
            raise InputError("asymmetry parameter g must lie in (-1, 1)")
        if not self.aerosol_beta > 0.0:
            raise InputError("aerosol beta must be positive")
        if self.rayleigh_scattering is None:
            lam, beta = _load_two_column(os.path.join(_DATA_DIR, "penndorf_rayleigh.txt"))
            self.rayleigh_scattering = Spectrum(WavelengthGrid(lam), beta, kind="dimensionless")
        if self.ground_albedo is None:
            lam, alb = _load_two_column(os.path.join(_DATA_DIR, "grass_albedo.txt"))
            self.ground_albedo = Spectrum(WavelengthGrid(lam), alb, kind="albedo")
        if self.solar_spectrum is None:
            self.solar_spectrum = default_solar()
        if np.any(self.ground_albedo.values < 0) or np.any(self.ground_albedo.values > 1):
            raise InputError("ground albedo must lie in [0, 1] per wavelength")

        lam = self.grid.wavelengths
        self.beta_rayleigh = self.rayleigh_scattering.resample(self.grid).values
        self.beta_aerosol_ext = aerosol_extinction(lam, self)
        self.beta_aerosol_sca = self.aerosol_ssa * self.beta_aerosol_ext
        self.albedo = self.ground_albedo.resample(self.grid).values
        self.solar = self.solar_spectrum.resample(self.grid).values
        for arr in (self.beta_rayleigh, self.beta_aerosol_ext,
                    self.beta_aerosol_sca, self.albedo, self.solar):
            arr.flags.writeable = False

    # geometry in meters
    @property
    def r_ground(self):
        return self.planet_radius_km * 1e3

    @property
    def r_top(self):
        return (self.planet_radius_km + self.top_altitude_km) * 1e3

    @property
    def h_rayleigh(self):
        return self.rayleigh_scale_height_km * 1e3

    @property
    def h_aerosol(self):
        return self.aerosol_scale_height_km * 1e3

    def scale_height(self, component):
        return {"rayleigh": self.h_rayleigh, "aerosol": self.h_aerosol}[component]

    def beta_ext(self, component):
        return {"rayleigh": self.beta_rayleigh, "aerosol": self.beta_aerosol_ext}[component]

    def beta_sca(self, component):
        return {"rayleigh": self.beta_rayleigh, "aerosol": self.beta_aerosol_sca}[component]

    def with_aerosols(self, alpha, beta, g):
        return replace(self, aerosol_alpha=alpha, aerosol_beta=beta, mie_asymmetry_g=g)

    def cache_key(self):
        h = (tuple(np.round(self.grid.wavelengths, 6)),
             self.planet_radius_km, self.top_altitude_km,
             self.rayleigh_scale_height_km, self.aerosol_alpha, self.aerosol_beta,
             self.aerosol_scale_height_km, self.aerosol_ssa, self.mie_asymmetry_g,
             self.beta_rayleigh.tobytes(), self.albedo.tobytes(), self.solar.tobytes())
        return hashlib.sha256(repr(h).encode()).hexdigest()[:16]


def aerosol_extinction(lam_nm, params: AtmosphereParams):
    """Sea-level aerosol extinction coefficient in m^-1.

    The Angstrom law gives the vertical column optical depth
    beta * lambda_um^-alpha; dividing by the integrated exponential column
    H * (1 - exp(-top/H)) yields the sea-level coefficient.
    """
    lam_um = np.asarray(lam_nm, dtype=float) * 1e-3
    tau = params.aerosol_beta * lam_um ** (-params.aerosol_alpha)
    h = params.h_aerosol
    column = h * -np.expm1(-params.top_altitude_km * 1e3 / h)
    return tau / column


# ----------------------------------------------------------------------
# Ray geometry (vectorized over leading dimensions)

def distance_to_top(params, r, mu):
    r = np.asarray(r, dtype=float)
    mu = np.asarray(mu, dtype=float)
    disc = r * r * (mu * mu - 1.0) + params.r_top ** 2
    return np.maximum(-r * mu + np.sqrt(np.maximum(disc, 0.0)), 0.0)


def distance_to_ground(params, r, mu):
    """Distance to the planet surface; +inf where the ray misses it."""
    r = np.asarray(r, dtype=float)
    mu = np.asarray(mu, dtype=float)
    disc = r * r * (mu * mu - 1.0) + params.r_ground ** 2
    hits = (mu < 0.0) & (disc > 0.0)  # tangent rays count as sky
    d = np.where(hits, -r * mu - np.sqrt(np.where(hits, disc, 1.0)), np.inf)
    return np.where(hits, np.maximum(d, 0.0), np.inf)


def hits_ground(params, r, mu):
    return np.isfinite(distance_to_ground(params, r, mu))


def ray_length(params, r, mu):
    """Free path length until the atmosphere boundary or the ground."""
    return np.minimum(distance_to_top(params, r, mu), distance_to_ground(params, r, mu))


@dataclass(frozen=True)
class RayPath:
    """A straight segment inside the shell, from a point at ``origin_altitude_km``
    with direction zenith cosine ``mu``, of physical length ``length_km``."""

    origin_altitude_km: float
    mu: float
    length_km: float
    ground_hit: bool = False

    @property
    def r0(self):
        return self.origin_altitude_km * 1e3

    @property
    def length_m(self):
        return self.length_km * 1e3


def trace_ray(params: AtmosphereParams, altitude_km: float, mu: float,
              length_km: float | None = None) -> RayPath:
    """Build a RayPath clipped to the atmosphere boundary or ground."""
    if not -1.0 <= mu <= 1.0:
        raise InputError("direction cosine must lie in [-1, 1]")
    if not 0.0 <= altitude_km <= params.top_altitude_km:
        raise InputError("origin altitude outside the atmosphere shell")
    r = params.r_ground + altitude_km * 1e3
    free = float(ray_length(params, r, mu))
    ground = bool(hits_ground(params, r, mu))
    if length_km is None:
        length_m = free
    else:
        length_m = length_km * 1e3
        if length_m < 0:
            raise InputError("path length must be nonnegative")
        if length_m > free * (1.0 + 1e-9) + 1.0:
            raise InputError("path extends beyond the atmosphere shell or below ground")
        ground = ground and length_m >= free * (1.0 - 1e-12)
    return RayPath(altitude_km, mu, length_m / 1e3, ground)


def _altitude_along(params, r0, mu, t):
    r = np.sqrt(np.maximum(r0 * r0 + 2.0 * r0 * mu * t + t * t, 0.0))
    return r - params.r_ground, r


def _column_monotone(params, r0, mu, length, scale_h, n):
    """Column of exp(-h/scale_h) along an ascending segment (mu >= 0).

    Steep rays substitute the planar column for the path variable, making the
    integrand the smooth curved/planar density ratio (exact for vertical
    rays); near-horizontal rays use quadratically spaced samples.
    """
    shape = np.broadcast(r0, mu, length).shape
    r0, mu, length = (np.broadcast_to(np.asarray(a, dtype=float), shape)
                      for a in (r0, mu, length))
    h0 = np.maximum(r0 - params.r_ground, 0.0)
    phi = np.linspace(0.0, 1.0, n).reshape((1,) * len(shape) + (n,))
    r0e, mue, le, h0e = (a[..., None] for a in (r0, mu, length, h0))

    steep = mue >= 0.05
    mu_s = np.where(steep, mue, 1.0)
    e0 = np.exp(-h0e / scale_h)
    e1 = np.exp(-(h0e + mu_s * le) / scale_h)
    planar_col = scale_h / mu_s * (e0 - e1)
    interp = e0 - phi * (e0 - e1)
    t_exp = (-scale_h * np.log(np.maximum(interp, 1e-300)) - h0e) / mu_s
    t_quad = le * phi * phi
    t = np.where(steep, np.clip(t_exp, 0.0, le), t_quad)
    t[..., 0] = 0.0
    t[..., -1] = length

    h, _ = _altitude_along(params, r0e, mue, t)
    h = np.maximum(h, 0.0)
    # steep branch: integral = planar_col * mean of exp(-(h - h_planar)/H)
    h_planar = h0e + mu_s * t
    ratio = np.exp(-(h - h_planar) / scale_h)
    col_steep = planar_col[..., 0] * np.trapezoid(ratio, phi, axis=-1)
    col_flat = np.trapezoid(np.exp(-h / scale_h), t, axis=-1)
    return np.where(steep[..., 0], col_steep, col_flat)


def density_column(params, r0, mu, scale_h, length=None, samples=64):
    """Sea-level-equivalent path length (meters) of an exponential profile
    along a ray, in spherical geometry; vectorized over r0/mu."""
    if samples < 2:
        raise InputError("need at least 2 samples")
    r0 = np.asarray(r0, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if length is None:
        length = ray_length(params, r0, mu)
    length = np.broadcast_to(np.asarray(length, dtype=float), np.broadcast(r0, mu).shape)

    # split descending rays at the tangent point, integrate each half upward
    t_tan = np.where(mu < 0.0, -r0 * mu, 0.0)
    t_tan = np.minimum(t_tan, length)
    h_tan, r_tan = _altitude_along(params, r0, mu, t_tan)
    mu_tan = np.where(r_tan > 0, (r0 * mu + t_tan) / np.where(r_tan > 0, r_tan, 1.0), 0.0)

    col_up = _column_monotone(params, r_tan, np.abs(mu_tan), length - t_tan, scale_h, samples)
    col_down = _column_monotone(params, r_tan, np.abs(mu_tan), t_tan, scale_h, samples)
    # col_down integrates the reversed (ascending) segment, same column
    return col_up + col_down


def _check_path(params, path: RayPath):
    r0 = params.r_ground + path.r0
    t = np.linspace(0.0, path.length_m, 65)
    h, _ = _altitude_along(params, r0, path.mu, t)
    if np.any(h < -1.0):
        raise InputError("path passes below the planet surface")
    return r0


def optical_depth(path: RayPath, params: AtmosphereParams, component: str,
                  samples: int = 64):
    """Per-wavelength extinction optical depth along a path (dimensionless)."""
    if component not in ("rayleigh", "aerosol"):
        raise InputError(f"unknown component {component!r}")
    r0 = _check_path(params, path)
    if path.length_m == 0.0:
        return np.zeros(len(params.grid))
    col = density_column(params, np.asarray(r0), np.asarray(path.mu),
                         params.scale_height(component),
                         length=np.asarray(path.length_m), samples=samples)
    return params.beta_ext(component) * float(col)


def transmittance(path: RayPath, params: AtmosphereParams, samples: int = 64):
    """exp(-tau_rayleigh - tau_aerosol) per wavelength, in (0, 1]."""
    tau = (optical_depth(path, params, "rayleigh", samples)
           + optical_depth(path, params, "aerosol", samples))
    return np.exp(-tau)


# ----------------------------------------------------------------------
# Chapman-style closed-form transmittance (no inner quadrature)

@functools.lru_cache(maxsize=1)
def _chapman_constants():
    path = os.path.join(_DATA_DIR, "chapman_fit.json")
    if os.path.exists(path):
        with open(path) as f:
            return json.load(f)
    return {"rayleigh": 1.0, "aerosol": 1.0}


def chapman_column(params, r, mu, scale_h, fit=1.0):
    """Closed-form sea-level-equivalent column (meters) from (r, mu) to the
    shell boundary: the grazing-incidence (Chapman) function evaluated with
    the scaled complementary error function; ``fit`` rescales the result to
    absorb shell truncation."""
    from scipy.special import erfcx
    r = np.asarray(r, dtype=float)
    mu = np.asarray(mu, dtype=float)
    x = r / scale_h
    h = np.maximum(r - params.r_ground, 0.0)
    ch = np.sqrt(0.5 * np.pi * x) * erfcx(np.sqrt(0.5 * x) * np.abs(mu))
    up = fit * scale_h * np.exp(-h / scale_h) * ch
    # below-horizon direction: go down to the tangent point and back up
    r_tan = np.maximum(r * np.sqrt(np.maximum(1.0 - mu * mu, 0.0)), 1.0)
    h_tan = np.maximum(r_tan - params.r_ground, 0.0)
    grazing = fit * scale_h * np.exp(-h_tan / scale_h) * np.sqrt(0.5 * np.pi * r_tan / scale_h)
    down = 2.0 * grazing - up
    return np.where(mu >= 0.0, up, down)


def analytic_transmittance(path: RayPath, params: AtmosphereParams):
    """Closed-form transmittance along a path (both components).

    Columns between two points on the same ray are differences of
    boundary-directed Chapman columns evaluated at each endpoint.
    """
    r0 = _check_path(params, path)
    if path.length_m == 0.0:
        return np.ones(len(params.grid))
    h1, r1 = _altitude_along(params, np.asarray(r0), np.asarray(path.mu),
                             np.asarray(path.length_m))
    mu1 = (r0 * path.mu + path.length_m) / r1
    consts = _chapman_constants()
    tau = np.zeros(len(params.grid))
    for component in ("rayleigh", "aerosol"):
        sh = params.scale_height(component)
        fit = consts[component]
        col = (chapman_column(params, r0, path.mu, sh, fit)
               - chapman_column(params, r1, mu1, sh, fit))
        tau = tau + params.beta_ext(component) * np.maximum(col, 0.0)
    return np.minimum(np.exp(-tau), 1.0)


def sun_transmittance(params, r, mu_s, samples=64):
    """Transmittance toward the sun from points (r, mu_s); zero in the
    planet's shadow. Vectorized: result shape = points shape + (n_lambda,)."""
    r = np.asarray(r, dtype=float)
    mu_s = np.asarray(mu_s, dtype=float)
    shadow = hits_ground(params, r, mu_s)
    col_r = density_column(params, r, mu_s, params.h_rayleigh, samples=samples)
    col_m = density_column(params, r, mu_s, params.h_aerosol, samples=samples)
    tau = (np.asarray(col_r)[..., None] * params.beta_rayleigh
           + np.asarray(col_m)[..., None] * params.beta_aerosol_ext)
    out = np.exp(-tau)
    out[shadow] = 0.0
    return out


def equal_column_altitudes(params, n):
    """n altitudes from 0 to the shell top such that each slab holds an equal
    share of the combined (molecular + aerosol) vertical column."""
    if n < 2:
        raise InputError("need at least 2 shells")
    top = params.top_altitude_km * 1e3
    h_dense = np.linspace(0.0, top, 20001)
    col = (params.h_rayleigh * (1.0 - np.exp(-h_dense / params.h_rayleigh))
           + params.h_aerosol * (1.0 - np.exp(-h_dense / params.h_aerosol)))
    targets = np.linspace(0.0, col[-1], n)
    h = np.interp(targets, col, h_dense)
    h[0], h[-1] = 0.0, top
    return h


# ----------------------------------------------------------------------
# Phase functions

@dataclass(frozen=True)
class PhaseFunction:
    """One of rayleigh, cornette_shanks(g), isotropic, or tabulated."""

    kind: str
    g: float = 0.0
    angles_rad: np.ndarray | None = None
    table: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("rayleigh", "cornette_shanks", "isotropic", "tabulated"):
            raise InputError(f"unknown phase function kind {self.kind!r}")
        if self.kind == "cornette_shanks" and not -1.0 < self.g < 1.0:
            raise InputError("asymmetry g must lie in (-1, 1)")
        if self.kind == "tabulated":
            ang = np.asarray(self.angles_rad, dtype=float)
            val = np.asarray(self.table, dtype=float)
            if ang.ndim != 1 or ang.shape != val.shape or ang.size < 4:
                raise InputError("tabulated phase needs matching angle/value arrays")
            if not np.all(np.diff(ang) > 0):
                raise InputError("tabulated phase angles must be increasing")
            object.__setattr__(self, "angles_rad", ang)
            object.__setattr__(self, "table", val)
            norm = self._integral()
            if abs(norm - 1.0) > 1e-3:
                raise InputError(f"tabulated phase integrates to {norm:.5f}, not 1")

    def _integral(self):
        theta = np.linspace(0.0, np.pi, 4096)
        p = phase_eval(self, np.cos(theta))
        return float(2.0 * np.pi * np.trapezoid(p * np.sin(theta), theta))


def rayleigh_phase(cos_theta):
    cos_theta = np.asarray(cos_theta, dtype=float)
    return 3.0 / (16.0 * np.pi) * (1.0 + cos_theta * cos_theta)


def cornette_shanks_phase(cos_theta, g):
    cos_theta = np.asarray(cos_theta, dtype=float)
    g2 = g * g
    num = 3.0 * (1.0 - g2) * (1.0 + cos_theta * cos_theta)
    den = 8.0 * np.pi * (2.0 + g2) * (1.0 + g2 - 2.0 * g * cos_theta) ** 1.5
    return num / den


def phase_eval(pf: PhaseFunction, cos_theta):
    """Normalized phase value in sr^-1; cos_theta = 1 is forward scattering."""
    cos_theta = np.clip(np.asarray(cos_theta, dtype=float), -1.0, 1.0)
    if pf.kind == "rayleigh":
        return rayleigh_phase(cos_theta)
    if pf.kind == "isotropic":
        return np.full_like(cos_theta, 1.0 / (4.0 * np.pi))
    if pf.kind == "cornette_shanks":
        return cornette_shanks_phase(cos_theta, pf.g)
    theta = np.arccos(cos_theta)
    interp = PchipInterpolator(pf.angles_rad, pf.table, extrapolate=False)
    out = interp(np.clip(theta, pf.angles_rad[0], pf.angles_rad[-1]))
    return np.asarray(out, dtype=float)


# ----------------------------------------------------------------------
# Direction helpers (east-north-up, azimuth clockwise from north)

def unit_from_zenith_azimuth(zenith_deg, azimuth_deg):
    zen = np.radians(np.asarray(zenith_deg, dtype=float))
    az = np.radians(np.asarray(azimuth_deg, dtype=float))
    sz = np.sin(zen)
    return np.stack([sz * np.sin(az), sz * np.cos(az), np.cos(zen)], axis=-1)


def zenith_azimuth_from_unit(v):
    v = np.asarray(v, dtype=float)
    zen = np.degrees(np.arccos(np.clip(v[..., 2], -1.0, 1.0)))
    az = np.degrees(np.arctan2(v[..., 0], v[..., 1])) % 360.0
    return zen, az
