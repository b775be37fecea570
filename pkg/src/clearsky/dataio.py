"""Loading and saving of sky datasets, spectra, ephemerides and configs.

All formats are plain text, UTF-8, with '#' comments; see FORMATS.md at the
repository root. Loaders are total: they either return a validated object or
raise :class:`InputError` naming the offending row.
"""

import os
import warnings
from dataclasses import dataclass

import numpy as np

from .atmosphere import AtmosphereParams, unit_from_zenith_azimuth
from .errors import InputError
from .spectral import Spectrum, WavelengthGrid, canonical_grid

DIRECTIONS_PER_RECORD = 81

#: ring layout assumed when generating synthetic datasets: zenith angle of
#: each ring and the number of equally spaced azimuths on it (sums to 81)
STANDARD_RINGS = (
    (0.0, 1), (10.0, 4), (20.0, 8), (30.0, 8), (40.0, 10),
    (50.0, 10), (60.0, 12), (70.0, 12), (80.0, 16),
)


def standard_view_directions():
    """(zenith_deg, azimuth_deg) arrays of the canonical 81-direction layout."""
    zen, az = [], []
    for ring_zen, count in STANDARD_RINGS:
        for j in range(count):
            zen.append(ring_zen)
            az.append(360.0 * j / count)
    return np.array(zen), np.array(az)


@dataclass
class SkyRecord:
    """One sky capture: sun position plus 81 sampled radiance spectra."""

    time_label: str
    sun_zenith_deg: float
    sun_azimuth_deg: float
    view_zenith_deg: np.ndarray
    view_azimuth_deg: np.ndarray
    values: np.ndarray  # (81, n_lambda) W m^-2 sr^-1 nm^-1
    grid: WavelengthGrid

    @property
    def sun_direction(self):
        return unit_from_zenith_azimuth(self.sun_zenith_deg, self.sun_azimuth_deg)

    @property
    def view_directions(self):
        return unit_from_zenith_azimuth(self.view_zenith_deg, self.view_azimuth_deg)


@dataclass
class SkyDataset:
    grid: WavelengthGrid
    records: list

    def __post_init__(self):
        for rec in self.records:
            if rec.values.shape != (rec.view_zenith_deg.size, len(self.grid)):
                raise InputError(f"record {rec.time_label}: value block shape mismatch")

    def record(self, time_label: str) -> SkyRecord:
        for rec in self.records:
            if rec.time_label == time_label:
                return rec
        raise InputError(f"no record with time label {time_label!r}")


@dataclass
class SunEphemeris:
    """Time labels with sun zenith/azimuth in degrees (zenith up to 108)."""

    times: list
    zenith_deg: np.ndarray
    azimuth_deg: np.ndarray

    def __post_init__(self):
        if len(set(self.times)) != len(self.times):
            raise InputError("ephemeris time labels must be unique")
        if np.any(self.zenith_deg < 0) or np.any(self.zenith_deg > 108.0):
            raise InputError("ephemeris sun zenith must lie in [0, 108] degrees")

    def entry(self, time_label: str):
        try:
            i = self.times.index(time_label)
        except ValueError:
            raise InputError(f"no ephemeris entry for {time_label!r}") from None
        return float(self.zenith_deg[i]), float(self.azimuth_deg[i])


def _data_lines(path):
    try:
        with open(path, encoding="utf-8") as f:
            raw = f.readlines()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    out = []
    for ln, line in enumerate(raw, start=1):
        stripped = line.split("#", 1)[0].strip()
        if stripped:
            out.append((ln, stripped))
    return out


def load_spectrum(path, kind="radiance") -> Spectrum:
    """Two-column (wavelength nm, value) file."""
    rows = []
    for ln, line in _data_lines(path):
        parts = line.split()
        if len(parts) != 2:
            raise InputError(f"{path}:{ln}: expected two columns, got {len(parts)}")
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise InputError(f"{path}:{ln}: non-numeric value") from None
    if len(rows) < 2:
        raise InputError(f"{path}: need at least two samples")
    arr = np.array(rows)
    if not np.all(np.diff(arr[:, 0]) > 0):
        raise InputError(f"{path}: wavelengths must be strictly increasing")
    try:
        return Spectrum(WavelengthGrid(arr[:, 0]), arr[:, 1], kind=kind)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def load_ephemeris(path) -> SunEphemeris:
    """Rows of (time label, sun zenith deg, sun azimuth deg)."""
    times, zens, azs = [], [], []
    for ln, line in _data_lines(path):
        parts = line.split()
        if len(parts) != 3:
            raise InputError(f"{path}:{ln}: expected 'time zenith azimuth'")
        try:
            zen, az = float(parts[1]), float(parts[2])
        except ValueError:
            raise InputError(f"{path}:{ln}: non-numeric angle") from None
        times.append(parts[0])
        zens.append(zen)
        azs.append(az)
    if not times:
        raise InputError(f"{path}: empty ephemeris")
    try:
        return SunEphemeris(times, np.array(zens), np.array(azs))
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def default_ephemeris() -> SunEphemeris:
    return load_ephemeris(os.path.join(os.path.dirname(__file__), "data",
                                       "sun_ephemeris.txt"))


# ----------------------------------------------------------------------
# Config files

_CONFIG_FLOAT_KEYS = {
    "planet_radius_km", "top_altitude_km", "rayleigh_scale_height_km",
    "aerosol_alpha", "aerosol_beta", "aerosol_scale_height_km",
    "aerosol_ssa", "mie_asymmetry_g", "solar_angular_radius_rad", "turbidity",
}
_CONFIG_FILE_KEYS = {"rayleigh_file", "albedo_file", "solar_file"}

#: fitted reference values used for unstated keys
CONFIG_DEFAULTS = {
    "planet_radius_km": 6360.0,
    "top_altitude_km": 60.0,
    "rayleigh_scale_height_km": 8.0,
    "aerosol_scale_height_km": 1.2,
    "aerosol_ssa": 0.8,
    "aerosol_alpha": 0.8,
    "aerosol_beta": 0.04,
    "mie_asymmetry_g": 0.7,
    "turbidity": 2.53,
}


def parse_config(path) -> dict:
    """Key-value config file -> dict with defaults filled in."""
    values = dict(CONFIG_DEFAULTS)
    base = os.path.dirname(os.path.abspath(path))
    for ln, line in _data_lines(path):
        parts = line.split(None, 1)
        if len(parts) != 2:
            raise InputError(f"{path}:{ln}: expected 'key value'")
        key, val = parts[0], parts[1].strip()
        if key in _CONFIG_FLOAT_KEYS:
            try:
                values[key] = float(val)
            except ValueError:
                raise InputError(f"{path}:{ln}: non-numeric value for {key}") from None
        elif key in _CONFIG_FILE_KEYS:
            values[key] = os.path.join(base, val)
        else:
            raise InputError(f"{path}:{ln}: unknown key {key!r}")
    return values


def load_config(path, grid: WavelengthGrid | None = None) -> AtmosphereParams:
    """Build AtmosphereParams from a config file (missing file -> defaults
    only if path is None)."""
    values = parse_config(path) if path is not None else dict(CONFIG_DEFAULTS)
    grid = grid if grid is not None else canonical_grid()
    kwargs = {k: v for k, v in values.items()
              if k in _CONFIG_FLOAT_KEYS and k != "turbidity"}
    if "rayleigh_file" in values:
        kwargs["rayleigh_scattering"] = load_spectrum(values["rayleigh_file"],
                                                      kind="dimensionless")
    if "albedo_file" in values:
        kwargs["ground_albedo"] = load_spectrum(values["albedo_file"], kind="albedo")
    if "solar_file" in values:
        kwargs["solar_spectrum"] = load_spectrum(values["solar_file"], kind="solar")
    return AtmosphereParams(grid=grid, **kwargs)


# ----------------------------------------------------------------------
# Sky datasets

def load_dataset(path, grid: WavelengthGrid | None = None) -> SkyDataset:
    """Delimited dataset file; spectra resampled to the canonical grid.

    Header line '# wavelengths: ...' carries the file's grid; data rows are
    'time sun_zen sun_az view_zen view_az v1 ... vn', grouped in consecutive
    blocks of exactly 81 directions per time.
    """
    target = grid if grid is not None else canonical_grid()
    file_lam = None
    try:
        with open(path, encoding="utf-8") as f:
            raw = f.readlines()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    rows = []
    for ln, line in enumerate(raw, start=1):
        if line.lstrip().startswith("#"):
            body = line.lstrip()[1:].strip()
            if body.startswith("wavelengths:"):
                try:
                    file_lam = np.array([float(x) for x in body.split(":", 1)[1].split()])
                except ValueError:
                    raise InputError(f"{path}:{ln}: bad wavelength header") from None
            continue
        stripped = line.strip()
        if stripped:
            rows.append((ln, stripped))
    if file_lam is None:
        raise InputError(f"{path}: missing '# wavelengths:' header")
    if file_lam.size < 2 or not np.all(np.diff(file_lam) > 0):
        raise InputError(f"{path}: non-monotone wavelength header")
    keep = (file_lam >= 350.0) & (file_lam <= 830.0)
    if not np.all(keep):
        warnings.warn(f"{path}: wavelengths outside 350-830 nm dropped at load")
    lam = file_lam[keep]
    if lam.size < 2:
        raise InputError(f"{path}: fewer than 2 wavelengths in 350-830 nm")

    records = []
    block = []
    block_key = None

    def finish_block():
        key, entries = block_key, block
        if len(entries) != DIRECTIONS_PER_RECORD:
            raise InputError(
                f"{path}: record {key[0]!r} has {len(entries)} directions, "
                f"expected {DIRECTIONS_PER_RECORD}")
        vz = np.array([e[1] for e in entries])
        va = np.array([e[2] for e in entries])
        vals = np.vstack([e[3] for e in entries])
        resampled = np.vstack([np.interp(target.wavelengths, lam, row) for row in vals])
        records.append(SkyRecord(key[0], key[1], key[2], vz, va, resampled, target))

    for ln, line in rows:
        parts = line.split()
        if len(parts) != 5 + file_lam.size:
            raise InputError(f"{path}:{ln}: expected {5 + file_lam.size} columns, "
                             f"got {len(parts)}")
        try:
            sz, sa, vz, va = (float(x) for x in parts[1:5])
            all_vals = np.array([float(x) for x in parts[5:]])
        except ValueError:
            raise InputError(f"{path}:{ln}: non-numeric value") from None
        if np.any(all_vals < 0):
            col = 6 + int(np.argmax(all_vals < 0))
            raise InputError(f"{path}:{ln}: negative radiance in column {col}")
        vals = all_vals[keep]
        key = (parts[0], sz, sa)
        if block_key is None:
            block_key = key
        elif key[0] != block_key[0]:
            finish_block()
            block, block_key = [], key
        elif key != block_key:
            raise InputError(f"{path}:{ln}: sun position changed within record "
                             f"{key[0]!r}")
        block.append((parts[0], vz, va, vals))
    if block_key is None:
        raise InputError(f"{path}: no data rows")
    finish_block()
    return SkyDataset(target, records)


def save_dataset(dataset: SkyDataset, path):
    lam = " ".join(f"{x:.17g}" for x in dataset.grid.wavelengths)
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as f:
        f.write("# clearsky dataset v1\n")
        f.write(f"# wavelengths: {lam}\n")
        f.write("# time sun_zenith sun_azimuth view_zenith view_azimuth values...\n")
        for rec in dataset.records:
            for i in range(rec.view_zenith_deg.size):
                vals = " ".join(f"{v:.17g}" for v in rec.values[i])
                f.write(f"{rec.time_label} {rec.sun_zenith_deg:.17g} "
                        f"{rec.sun_azimuth_deg:.17g} {rec.view_zenith_deg[i]:.17g} "
                        f"{rec.view_azimuth_deg[i]:.17g} {vals}\n")
    os.replace(tmp, path)


# ----------------------------------------------------------------------
# Spherical interpolation of a sampled sky

def _hermite(x0, x1, y0, y1, m0, m1, x):
    h = x1 - x0
    t = (x - x0) / h
    t2, t3 = t * t, t * t * t
    return ((2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * m0
            + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * m1)


def _catmull_rom(xs, ys, x):
    """Local cubic (Catmull-Rom tangents) interpolation, vectorized over the
    trailing axes of ys; clamped outside the knot range."""
    n = xs.size
    if n == 1:
        return ys[0]
    x = float(np.clip(x, xs[0], xs[-1]))
    i = int(np.clip(np.searchsorted(xs, x) - 1, 0, n - 2))
    m = np.zeros((n,) + ys.shape[1:])
    m[1:-1] = ((ys[2:] - ys[:-2]).T / (xs[2:] - xs[:-2]).T).T
    m[0] = (ys[1] - ys[0]) / (xs[1] - xs[0])
    m[-1] = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
    return _hermite(xs[i], xs[i + 1], ys[i], ys[i + 1], m[i], m[i + 1], x)


def _ring_interp(az_deg, values, query_az):
    """Periodic Catmull-Rom around one ring."""
    n = az_deg.size
    if n == 1:
        return values[0]
    order = np.argsort(az_deg)
    az = az_deg[order]
    vals = values[order]
    # periodic padding: two knots on each side
    az_ext = np.concatenate([az[-2:] - 360.0, az, az[:2] + 360.0])
    vals_ext = np.concatenate([vals[-2:], vals, vals[:2]], axis=0)
    q = query_az % 360.0
    if q < az[0]:
        q += 360.0
    return _catmull_rom(az_ext, vals_ext, q)


def interpolate_sky(record: SkyRecord, direction) -> Spectrum:
    """Smooth spherical interpolation of the 81 samples at ``direction``.

    Regular ring layouts use periodic cubic interpolation in azimuth then
    cubic across ring zenith angles; irregular layouts fall back to a
    thin-plate radial basis on the unit sphere. Exact at the sample nodes.
    """
    direction = np.asarray(direction, dtype=float)
    if direction[2] < -1e-9:
        raise InputError("interpolation direction must lie in the upper hemisphere")
    zen = np.degrees(np.arccos(np.clip(direction[2], -1.0, 1.0)))
    az = np.degrees(np.arctan2(direction[0], direction[1])) % 360.0

    # exact node short-circuit
    d_nodes = record.view_directions
    dots = d_nodes @ direction / max(np.linalg.norm(direction), 1e-300)
    nearest = int(np.argmax(dots))
    if dots[nearest] > 1.0 - 1e-12:
        return Spectrum(record.grid, record.values[nearest].copy())

    ring_zen = np.unique(np.round(record.view_zenith_deg, 6))
    rings = [np.nonzero(np.round(record.view_zenith_deg, 6) == rz)[0]
             for rz in ring_zen]
    regular = ring_zen.size >= 4 and all(
        idx.size >= 4 or (rz < 1e-6 and idx.size == 1)
        for rz, idx in zip(ring_zen, rings))
    if regular:
        per_ring = np.stack([
            _ring_interp(record.view_azimuth_deg[idx], record.values[idx], az)
            for idx in rings])
        out = _catmull_rom(ring_zen, per_ring, zen)
    else:
        from scipy.interpolate import RBFInterpolator
        rbf = RBFInterpolator(d_nodes, record.values, kernel="thin_plate_spline")
        out = rbf(direction[None, :] / np.linalg.norm(direction))[0]
    return Spectrum(record.grid, np.maximum(out, 0.0))
