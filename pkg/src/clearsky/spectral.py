"""Wavelength grids, spectra, CIE color conversion and tone mapping.

All radiometric quantities are per-nanometre: radiance in W m^-2 sr^-1 nm^-1,
irradiance in W m^-2 nm^-1. Quadrature is trapezoidal on the stored grid.
"""

import functools
import os
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

_DATA_DIR = os.path.join(os.path.dirname(__file__), "data")

#: XYZ -> linear sRGB (IEC 61966-2-1, D65 white)
SRGB_FROM_XYZ = np.array([
    [3.2406, -1.5372, -0.4986],
    [-0.9689, 1.8758, 0.0415],
    [0.0557, -0.2040, 1.0570],
])
XYZ_FROM_SRGB = np.linalg.inv(SRGB_FROM_XYZ)

#: luminous efficacy of the ybar-weighted integral, lm/W
LUMINOUS_EFFICACY = 683.0


@dataclass(frozen=True)
class WavelengthGrid:
    """Strictly increasing wavelength samples in nm, within [350, 2500]."""

    wavelengths: np.ndarray

    def __post_init__(self):
        lam = np.atleast_1d(np.asarray(self.wavelengths, dtype=float))
        if lam.ndim != 1 or lam.size < 1:
            raise InputError("wavelength grid must be a 1-D sequence")
        if lam.size > 1 and not np.all(np.diff(lam) > 0):
            raise InputError("wavelengths must be strictly increasing")
        if lam[0] < 350.0 or lam[-1] > 2500.0:
            raise InputError("wavelengths must lie within [350, 2500] nm")
        lam.flags.writeable = False
        object.__setattr__(self, "wavelengths", lam)

    def __len__(self):
        return self.wavelengths.size

    def __eq__(self, other):
        return (isinstance(other, WavelengthGrid)
                and self.wavelengths.shape == other.wavelengths.shape
                and bool(np.all(self.wavelengths == other.wavelengths)))

    def __hash__(self):
        return hash(self.wavelengths.tobytes())

    @property
    def lam_min(self):
        return float(self.wavelengths[0])

    @property
    def lam_max(self):
        return float(self.wavelengths[-1])


@functools.lru_cache(maxsize=1)
def canonical_grid():
    """The 40 uniform wavelengths spanning 360-830 nm."""
    return WavelengthGrid(np.linspace(360.0, 830.0, 40))


@dataclass
class Spectrum:
    """Per-wavelength magnitudes on a grid.

    ``kind`` carries the units: 'radiance' (W m^-2 sr^-1 nm^-1), 'irradiance'
    or 'solar' (W m^-2 nm^-1), 'albedo' (dimensionless in [0, 1]), or
    'dimensionless'.
    """

    grid: WavelengthGrid
    values: np.ndarray
    kind: str = "radiance"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (len(self.grid),):
            raise InputError(
                f"spectrum has {v.size} values for {len(self.grid)} wavelengths")
        if self.kind in ("radiance", "irradiance", "solar", "albedo") and np.any(v < 0):
            raise InputError(f"negative values in {self.kind} spectrum")
        if self.kind == "albedo" and np.any(v > 1.0):
            raise InputError("albedo values must be <= 1")
        self.values = v

    @property
    def lam(self):
        return self.grid.wavelengths

    def resample(self, grid: WavelengthGrid) -> "Spectrum":
        """Linear resampling; clamps to the endpoint values outside the support."""
        if grid == self.grid:
            return Spectrum(grid, self.values.copy(), self.kind)
        v = np.interp(grid.wavelengths, self.lam, self.values)
        return Spectrum(grid, v, self.kind)

    def scaled(self, s: float) -> "Spectrum":
        return Spectrum(self.grid, self.values * s, self.kind)

    def band_integral(self, lam_lo: float, lam_hi: float) -> float:
        """Trapezoidal integral over [lam_lo, lam_hi] with interpolated endpoints."""
        return band_integral(self.lam, self.values, lam_lo, lam_hi)


def band_integral(lam, values, lam_lo, lam_hi):
    lam = np.asarray(lam, dtype=float)
    values = np.asarray(values, dtype=float)
    lo = max(lam_lo, lam[0])
    hi = min(lam_hi, lam[-1])
    if hi <= lo:
        return 0.0 * values[..., 0]
    inside = (lam > lo) & (lam < hi)
    xs = np.concatenate([[lo], lam[inside], [hi]])
    v_lo = np.asarray(_interp_last_axis(lo, lam, values))
    v_hi = np.asarray(_interp_last_axis(hi, lam, values))
    ys = np.concatenate([v_lo[..., None], values[..., inside], v_hi[..., None]], axis=-1)
    return _trapz(ys, xs)


def _interp_last_axis(x, lam, values):
    i = np.searchsorted(lam, x)
    i = min(max(i, 1), lam.size - 1)
    w = (x - lam[i - 1]) / (lam[i] - lam[i - 1])
    return values[..., i - 1] * (1.0 - w) + values[..., i] * w


def _trapz(y, x):
    f = np.trapezoid if hasattr(np, "trapezoid") else np.trapz
    return f(y, x, axis=-1)


@functools.lru_cache(maxsize=16)
def _linear_resample_matrix(src: WavelengthGrid, dst: WavelengthGrid):
    """Matrix W with (W @ values) == np.interp(dst, src, values)."""
    n = len(src)
    w = np.zeros((len(dst), n))
    for k, lam in enumerate(dst.wavelengths):
        i = np.searchsorted(src.wavelengths, lam)
        if i <= 0:
            w[k, 0] = 1.0
        elif i >= n:
            w[k, -1] = 1.0
        else:
            f = ((lam - src.wavelengths[i - 1])
                 / (src.wavelengths[i] - src.wavelengths[i - 1]))
            w[k, i - 1] = 1.0 - f
            w[k, i] = f
    return w


@dataclass(frozen=True)
class ColorTriple:
    """Three color components in a named space."""

    space: str  # 'XYZ', 'linear-sRGB', 'rg-chromaticity', 'xyY'
    components: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        c = np.asarray(self.components, dtype=float).reshape(3)
        object.__setattr__(self, "components", c)


class ColorMatchingTable:
    """CIE 1931 matching functions plus the derived sRGB matching functions.

    The sRGB functions are rows of ``SRGB_FROM_XYZ @ [xbar, ybar, zbar]`` at
    every wavelength.
    """

    def __init__(self, grid: WavelengthGrid, xbar, ybar, zbar):
        self.grid = grid
        self.xbar = np.asarray(xbar, dtype=float)
        self.ybar = np.asarray(ybar, dtype=float)
        self.zbar = np.asarray(zbar, dtype=float)
        for arr in (self.xbar, self.ybar, self.zbar):
            if arr.shape != (len(grid),):
                raise InputError("matching function length does not match grid")
        if np.any(self.ybar < 0):
            raise InputError("ybar must be nonnegative")
        rgb = SRGB_FROM_XYZ @ np.vstack([self.xbar, self.ybar, self.zbar])
        self.rtilde, self.gtilde, self.btilde = rgb

    @property
    def xyz_rows(self):
        return np.vstack([self.xbar, self.ybar, self.zbar])

    @property
    def rgb_rows(self):
        return np.vstack([self.rtilde, self.gtilde, self.btilde])

    def resample(self, grid: WavelengthGrid) -> "ColorMatchingTable":
        lam = self.grid.wavelengths
        out = [np.interp(grid.wavelengths, lam, f, left=0.0, right=0.0)
               for f in (self.xbar, self.ybar, self.zbar)]
        return ColorMatchingTable(grid, *out)

    @classmethod
    def from_file(cls, path) -> "ColorMatchingTable":
        rows = np.loadtxt(path)
        if rows.ndim != 2 or rows.shape[1] != 4:
            raise InputError(f"{path}: expected four columns (lambda xbar ybar zbar)")
        grid = WavelengthGrid(rows[:, 0])
        return cls(grid, rows[:, 1], rows[:, 2], rows[:, 3])


@functools.lru_cache(maxsize=4)
def default_cmf(grid: WavelengthGrid | None = None) -> ColorMatchingTable:
    """The shipped 5 nm CIE table, optionally resampled to ``grid``."""
    table = ColorMatchingTable.from_file(os.path.join(_DATA_DIR, "cie_cmf_2deg_5nm.txt"))
    return table.resample(grid) if grid is not None else table


@functools.lru_cache(maxsize=1)
def default_solar() -> Spectrum:
    rows = np.loadtxt(os.path.join(_DATA_DIR, "solar_spectrum.txt"))
    keep = rows[:, 0] <= 2500.0
    return Spectrum(WavelengthGrid(rows[keep, 0]), rows[keep, 1], kind="solar")


def _overlapped(spectrum: Spectrum, cmf: ColorMatchingTable):
    lo = max(spectrum.grid.lam_min, cmf.grid.lam_min)
    hi = min(spectrum.grid.lam_max, cmf.grid.lam_max)
    if hi <= lo:
        raise InputError("spectrum and color matching table grids do not overlap")
    keep = (spectrum.lam >= lo) & (spectrum.lam <= hi)
    lam = spectrum.lam[keep]
    if lam.size < 2:
        raise InputError("fewer than two wavelengths in the overlapping range")
    cmf_r = cmf.resample(WavelengthGrid(lam))
    return lam, spectrum.values[keep], cmf_r


def spectrum_to_xyz(spectrum: Spectrum, cmf: ColorMatchingTable | None = None) -> ColorTriple:
    cmf = cmf if cmf is not None else default_cmf()
    lam, values, cmf_r = _overlapped(spectrum, cmf)
    xyz = _trapz(cmf_r.xyz_rows * values, lam)
    return ColorTriple("XYZ", xyz)


def spectrum_to_srgb(spectrum: Spectrum, cmf: ColorMatchingTable | None = None) -> ColorTriple:
    """Linear sRGB components of a radiance spectrum (may be negative for
    saturated spectral colors; physical sky spectra stay nonnegative)."""
    cmf = cmf if cmf is not None else default_cmf()
    lam, values, cmf_r = _overlapped(spectrum, cmf)
    rgb = _trapz(cmf_r.rgb_rows * values, lam)
    return ColorTriple("linear-sRGB", rgb)


def spectra_to_srgb(values, grid: WavelengthGrid, cmf: ColorMatchingTable | None = None):
    """Vectorized variant: ``values`` has shape (..., n_lambda); returns (..., 3)."""
    cmf = cmf if cmf is not None else default_cmf()
    cmf_r = cmf.resample(grid)
    lam = grid.wavelengths
    return np.stack([_trapz(values * f, lam) for f in cmf_r.rgb_rows], axis=-1)


def spectra_to_luminance(values, grid: WavelengthGrid, cmf: ColorMatchingTable | None = None):
    cmf = cmf if cmf is not None else default_cmf()
    ybar = cmf.resample(grid).ybar
    return LUMINOUS_EFFICACY * _trapz(values * ybar, grid.wavelengths)


def luminance(spectrum: Spectrum, cmf: ColorMatchingTable | None = None) -> float:
    """Photopic luminance 683 * integral(ybar * L), in cd/m^2 for radiance input."""
    return float(spectra_to_luminance(spectrum.values, spectrum.grid, cmf))


def chromaticity_rg(color: ColorTriple) -> ColorTriple:
    """Components divided by the maximum component; black maps to (0,0,0)."""
    c = color.components
    if np.any(c < 0):
        raise InputError("rg-chromaticity needs nonnegative components")
    m = c.max()
    if m == 0.0:
        return ColorTriple("rg-chromaticity", np.zeros(3))
    return ColorTriple("rg-chromaticity", c / m)


def srgb_encode(linear):
    """The sRGB transfer function, applied per component."""
    linear = np.clip(np.asarray(linear, dtype=float), 0.0, 1.0)
    return np.where(linear <= 0.0031308,
                    12.92 * linear,
                    1.055 * np.power(linear, 1.0 / 2.4) - 0.055)


def tone_map(color: ColorTriple, k: float, encode: bool = False) -> ColorTriple:
    """Per-component 1 - exp(-k c); with ``encode`` the sRGB gamma follows."""
    if k <= 0:
        raise InputError("tone map constant k must be positive")
    out = tone_map_values(color.components, k, encode=encode)
    return ColorTriple(color.space, out)


def tone_map_values(values, k, encode=False):
    out = -np.expm1(-k * np.asarray(values, dtype=float))
    return srgb_encode(out) if encode else out


def xyz_to_xyy(xyz: ColorTriple) -> ColorTriple:
    X, Y, Z = xyz.components
    s = X + Y + Z
    if s <= 0:
        return ColorTriple("xyY", np.array([0.0, 0.0, 0.0]))
    return ColorTriple("xyY", np.array([X / s, Y / s, Y]))


# ----------------------------------------------------------------------
# Three-sample color and spectrum approximations

THREE_SAMPLE_LAMBDAS = (680.0, 550.0, 440.0)
THREE_SAMPLE_ALPHA = 3.0


@functools.lru_cache(maxsize=16)
def _three_sample_constants_cached(solar_key, cmf_key, alpha, lambdas):
    solar, cmf = _CONST_CACHE[solar_key], _CONST_CACHE[cmf_key]
    lam = np.arange(max(360.0, solar.grid.lam_min, cmf.grid.lam_min),
                    min(830.0, solar.grid.lam_max, cmf.grid.lam_max) + 0.5, 1.0)
    grid = WavelengthGrid(lam)
    s = solar.resample(grid).values
    rgbbar = cmf.resample(grid).rgb_rows
    ks = []
    for lam_c, cbar in zip(lambdas, rgbbar):
        s_c = np.interp(lam_c, lam, s)
        if s_c <= 0:
            raise InputError(f"solar spectrum vanishes at {lam_c} nm")
        profile = s * lam ** (-alpha) / (s_c * lam_c ** (-alpha))
        ks.append(_trapz(cbar * profile, lam))
    return tuple(float(k) for k in ks)


_CONST_CACHE: dict = {}


def three_sample_constants(solar: Spectrum | None = None,
                           cmf: ColorMatchingTable | None = None,
                           alpha: float = THREE_SAMPLE_ALPHA,
                           lambdas=THREE_SAMPLE_LAMBDAS):
    """The three per-channel constants mapping radiance samples at
    (680, 550, 440) nm to linear sRGB; computed once per (solar, alpha)."""
    solar = solar if solar is not None else default_solar()
    cmf = cmf if cmf is not None else default_cmf()
    skey, ckey = id(solar), id(cmf)
    _CONST_CACHE[skey], _CONST_CACHE[ckey] = solar, cmf
    order = np.argsort(-np.asarray(lambdas))  # r, g, b by construction
    if not np.all(order == np.arange(3)):
        raise InputError("sample wavelengths must be ordered r, g, b")
    return _three_sample_constants_cached(skey, ckey, float(alpha), tuple(lambdas))


def rgb_from_three_samples(l_r: float, l_g: float, l_b: float,
                           solar: Spectrum | None = None,
                           cmf: ColorMatchingTable | None = None,
                           alpha: float = THREE_SAMPLE_ALPHA) -> ColorTriple:
    k_r, k_g, k_b = three_sample_constants(solar, cmf, alpha)
    return ColorTriple("linear-sRGB", np.array([k_r * l_r, k_g * l_g, k_b * l_b]))


class DaylightBasis:
    """Three-component daylight spectrum basis for xyY -> spectrum.

    Reconstruction solves for the two component weights that reproduce the
    requested chromaticity exactly (a 2x2 linear system in the basis/CMF
    integrals), then scales to the requested luminance channel.
    """

    M_RANGE = (-4.0, 6.0)  # representable component weights

    def __init__(self, grid: WavelengthGrid, s0, s1, s2):
        self.grid = grid
        self.s0 = np.asarray(s0, dtype=float)
        self.s1 = np.asarray(s1, dtype=float)
        self.s2 = np.asarray(s2, dtype=float)

    @classmethod
    def from_file(cls, path) -> "DaylightBasis":
        rows = np.loadtxt(path)
        if rows.ndim != 2 or rows.shape[1] != 4:
            raise InputError(f"{path}: expected four columns (lambda s0 s1 s2)")
        return cls(WavelengthGrid(rows[:, 0]), rows[:, 1], rows[:, 2], rows[:, 3])

    def _tristimulus(self, cmf: "ColorMatchingTable"):
        cmf_r = cmf.resample(self.grid)
        lam = self.grid.wavelengths
        V = np.array([[_trapz(f * s, lam) for s in (self.s0, self.s1, self.s2)]
                      for f in (cmf_r.xbar, cmf_r.ybar, cmf_r.zbar)])  # 3x3
        return V, cmf_r

    def spectra_for_xyy(self, x, y, Y,
                        cmf: ColorMatchingTable | None = None,
                        out_grid: WavelengthGrid | None = None):
        """Vectorized reconstruction: x, y, Y arrays (n,) -> values (n, n_out).

        Solves the two component weights reproducing each chromaticity
        exactly, clamps out-of-gamut weights with a warning, and scales to the
        luminance channel Y (radiometric, i.e. integral of ybar * L).
        """
        cmf = cmf if cmf is not None else default_cmf()
        out_grid = out_grid if out_grid is not None else canonical_grid()
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        Y = np.atleast_1d(np.asarray(Y, dtype=float))
        V, cmf_r = self._tristimulus(cmf)
        vsum = V.sum(axis=0)
        # chromaticity constraints: x*(X+Y+Z) - X = 0 and y*(X+Y+Z) - Y = 0
        cx = x[:, None] * vsum - V[0]
        cy = y[:, None] * vsum - V[1]
        det = cx[:, 1] * cy[:, 2] - cx[:, 2] * cy[:, 1]
        safe = np.abs(det) > 1e-12
        det = np.where(safe, det, 1.0)
        m1 = np.where(safe, (cx[:, 2] * cy[:, 0] - cx[:, 0] * cy[:, 2]) / det, 0.0)
        m2 = np.where(safe, (cx[:, 0] * cy[:, 1] - cx[:, 1] * cy[:, 0]) / det, 0.0)
        lo, hi = self.M_RANGE
        clipped = (m1 < lo) | (m1 > hi) | (m2 < lo) | (m2 > hi)
        if np.any(clipped & (Y > 0)):
            bad = int(np.count_nonzero(clipped & (Y > 0)))
            warnings.warn(f"{bad} chromaticities outside the reconstruction "
                          "gamut; component weights clamped", stacklevel=2)
            m1 = np.clip(m1, lo, hi)
            m2 = np.clip(m2, lo, hi)
        shape = np.maximum(self.s0 + m1[:, None] * self.s1 + m2[:, None] * self.s2, 0.0)
        y_shape = _trapz(cmf_r.ybar * shape, self.grid.wavelengths)
        scale = np.where((y_shape > 0) & (Y > 0), Y / np.where(y_shape > 0, y_shape, 1.0), 0.0)
        values = shape * scale[:, None]
        resample = _linear_resample_matrix(self.grid, out_grid)
        return np.maximum(values @ resample.T, 0.0)

    def spectrum_for_xyy(self, x: float, y: float, Y: float,
                         cmf: ColorMatchingTable | None = None,
                         out_grid: WavelengthGrid | None = None) -> Spectrum:
        out_grid = out_grid if out_grid is not None else canonical_grid()
        values = self.spectra_for_xyy([x], [y], [Y], cmf, out_grid)[0]
        return Spectrum(out_grid, values, kind="radiance")


@functools.lru_cache(maxsize=1)
def default_daylight_basis() -> DaylightBasis:
    return DaylightBasis.from_file(os.path.join(_DATA_DIR, "daylight_basis.txt"))


def reconstruct_spectrum(l_r: float, l_g: float, l_b: float,
                         solar: Spectrum | None = None,
                         cmf: ColorMatchingTable | None = None,
                         basis: DaylightBasis | None = None,
                         out_grid: WavelengthGrid | None = None) -> Spectrum:
    """Full-spectrum reconstruction from radiance samples at 680/550/440 nm:
    three-sample sRGB, then XYZ/xyY, then the daylight-basis spectrum."""
    cmf = cmf if cmf is not None else default_cmf()
    basis = basis if basis is not None else default_daylight_basis()
    out_grid = out_grid if out_grid is not None else canonical_grid()
    rgb = rgb_from_three_samples(l_r, l_g, l_b, solar, cmf)
    xyz = XYZ_FROM_SRGB @ rgb.components
    if np.all(xyz == 0.0):
        return Spectrum(out_grid, np.zeros(len(out_grid)), kind="radiance")
    x, y, Y = xyz_to_xyy(ColorTriple("XYZ", xyz)).components
    return basis.spectrum_for_xyy(float(x), float(y), float(Y), cmf, out_grid)
