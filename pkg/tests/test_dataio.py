import numpy as np
import pytest

from clearsky.dataio import (
    SkyDataset,
    SkyRecord,
    default_ephemeris,
    interpolate_sky,
    load_config,
    load_dataset,
    load_ephemeris,
    load_spectrum,
    parse_config,
    save_dataset,
    standard_view_directions,
)
from clearsky.errors import InputError
from clearsky.spectral import WavelengthGrid, band_integral, canonical_grid
from clearsky.atmosphere import unit_from_zenith_azimuth


def smooth_sky(zen_deg, az_deg, lam):
    """Synthetic smooth sky: per-direction scale times a smooth spectrum."""
    zen = np.radians(np.asarray(zen_deg))
    az = np.radians(np.asarray(az_deg))
    scale = 1.0 + 0.5 * np.cos(zen) + 0.2 * np.sin(zen) * np.cos(az)
    base = 0.02 * (lam / 550.0) ** -2.5
    return scale[..., None] * base[None, :]


def make_record(grid=None, time="10h15"):
    grid = grid or canonical_grid()
    zen, az = standard_view_directions()
    values = smooth_sky(zen, az, grid.wavelengths)
    return SkyRecord(time, 40.0, 170.0, zen, az, values, grid)


def make_dataset(grid=None, times=("10h15",)):
    grid = grid or canonical_grid()
    return SkyDataset(grid, [make_record(grid, t) for t in times])


class TestDatasetRoundTrip:
    def test_save_load_identity(self, tmp_path):
        ds = make_dataset(times=("10h15", "11h15"))
        path = tmp_path / "ds.txt"
        save_dataset(ds, path)
        back = load_dataset(path)
        assert len(back.records) == 2
        for a, b in zip(ds.records, back.records):
            assert a.time_label == b.time_label
            assert np.array_equal(a.values, b.values)
            assert np.array_equal(a.view_zenith_deg, b.view_zenith_deg)
            assert a.sun_zenith_deg == b.sun_zenith_deg

    def test_wrong_direction_count_cites_record(self, tmp_path):
        ds = make_dataset()
        path = tmp_path / "bad.txt"
        save_dataset(ds, path)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:-1]) + "\n")  # drop one direction
        with pytest.raises(InputError, match="10h15.*80"):
            load_dataset(path)

    def test_negative_radiance_located(self, tmp_path):
        ds = make_dataset()
        path = tmp_path / "neg.txt"
        save_dataset(ds, path)
        lines = path.read_text().splitlines()
        parts = lines[10].split()
        parts[7] = "-1.0"
        lines[10] = " ".join(parts)
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(InputError, match="negative radiance"):
            load_dataset(path)

    def test_resampling_preserves_band_integral(self, tmp_path):
        # 1 nm source grid resampled to the 40-sample canonical grid
        lam1 = np.arange(360.0, 831.0, 1.0)
        fine = WavelengthGrid(lam1)
        zen, az = standard_view_directions()
        values = smooth_sky(zen, az, lam1)
        ds = SkyDataset(fine, [SkyRecord("t0", 40.0, 170.0, zen, az, values, fine)])
        path = tmp_path / "fine.txt"
        save_dataset(ds, path)
        back = load_dataset(path)  # canonical grid
        for i in (0, 40, 80):
            ref = band_integral(lam1, values[i], 360.0, 720.0)
            got = band_integral(back.grid.wavelengths, back.records[0].values[i],
                                360.0, 720.0)
            assert got == pytest.approx(ref, rel=0.01)


class TestInterpolation:
    def test_exact_at_nodes(self):
        rec = make_record()
        for k in (0, 17, 80):
            d = rec.view_directions[k]
            out = interpolate_sky(rec, d)
            assert np.allclose(out.values, rec.values[k], rtol=1e-12)

    def test_constant_dataset_reproduced(self):
        grid = canonical_grid()
        zen, az = standard_view_directions()
        values = np.tile(np.full(40, 0.013), (81, 1))
        rec = SkyRecord("t", 30.0, 90.0, zen, az, values, grid)
        for zq, aq in ((7.0, 13.0), (44.0, 200.0), (79.0, 359.0)):
            out = interpolate_sky(rec, unit_from_zenith_azimuth(zq, aq))
            assert np.allclose(out.values, 0.013, atol=1e-12)

    def test_bounded_overshoot(self):
        rec = make_record()
        rng = np.random.default_rng(7)
        for _ in range(50):
            zq = rng.uniform(0.0, 80.0)
            aq = rng.uniform(0.0, 360.0)
            d = unit_from_zenith_azimuth(zq, aq)
            out = interpolate_sky(rec, d)
            got = band_integral(rec.grid.wavelengths, out.values, 380.0, 700.0)
            dots = rec.view_directions @ d
            near = np.argsort(-dots)[:4]
            neighbors = [band_integral(rec.grid.wavelengths, rec.values[i],
                                       380.0, 700.0) for i in near]
            assert 0.5 * min(neighbors) <= got <= 1.5 * max(neighbors)

    def test_rotation_consistency(self):
        grid = canonical_grid()
        zen, az = standard_view_directions()
        values = smooth_sky(zen, az, grid.wavelengths)
        rot = 40.0
        rec = SkyRecord("t", 30.0, 90.0, zen, az, values, grid)
        rec_rot = SkyRecord("t", 30.0, 130.0, zen, (az + rot) % 360.0, values, grid)
        q_zen, q_az = 33.0, 120.0
        a = interpolate_sky(rec, unit_from_zenith_azimuth(q_zen, q_az))
        b = interpolate_sky(rec_rot, unit_from_zenith_azimuth(q_zen, q_az + rot))
        assert np.allclose(a.values, b.values, rtol=1e-9, atol=1e-15)

    def test_below_horizon_rejected(self):
        rec = make_record()
        with pytest.raises(InputError):
            interpolate_sky(rec, np.array([0.0, 0.3, -0.5]))

    def test_irregular_layout_falls_back(self):
        grid = canonical_grid()
        rng = np.random.default_rng(3)
        zen = np.sort(rng.uniform(0.0, 85.0, 81))
        az = rng.uniform(0.0, 360.0, 81)
        values = smooth_sky(zen, az, grid.wavelengths)
        rec = SkyRecord("t", 30.0, 90.0, zen, az, values, grid)
        out = interpolate_sky(rec, rec.view_directions[40])
        assert np.allclose(out.values, values[40], rtol=1e-6)


class TestSpectrumLoader:
    def test_round_trip(self, tmp_path):
        p = tmp_path / "s.txt"
        p.write_text("# comment\n400 1.5\n500 2.0\n600 1.0\n")
        s = load_spectrum(p)
        assert np.allclose(s.values, [1.5, 2.0, 1.0])

    def test_descending_rejected(self, tmp_path):
        p = tmp_path / "s.txt"
        p.write_text("500 1.0\n400 2.0\n")
        with pytest.raises(InputError, match="increasing"):
            load_spectrum(p)

    def test_missing_file(self):
        with pytest.raises(InputError):
            load_spectrum("/nonexistent/file.txt")


class TestConfig:
    def test_empty_config_gives_defaults(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_text("# nothing here\n")
        params = load_config(p)
        assert params.rayleigh_scale_height_km == 8.0
        assert params.aerosol_scale_height_km == 1.2
        assert params.aerosol_ssa == 0.8
        assert params.aerosol_alpha == 0.8
        assert params.aerosol_beta == 0.04
        assert params.mie_asymmetry_g == 0.7
        assert parse_config(p)["turbidity"] == 2.53

    def test_out_of_range_value(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_text("mie_asymmetry_g 1.5\n")
        with pytest.raises(InputError):
            load_config(p)

    def test_unknown_key(self, tmp_path):
        p = tmp_path / "c.txt"
        p.write_text("frobnication 3\n")
        with pytest.raises(InputError, match="unknown key"):
            load_config(p)


class TestEphemeris:
    def test_default_file(self):
        eph = default_ephemeris()
        assert len(eph.times) == 20  # 17 measurement times + 3 render-only
        zen, az = eph.entry("10h15")
        assert 0.0 < zen < 90.0

    def test_zenith_range_enforced(self, tmp_path):
        p = tmp_path / "e.txt"
        p.write_text("06h00 120.0 80.0\n")
        with pytest.raises(InputError):
            load_ephemeris(p)

    def test_duplicate_labels(self, tmp_path):
        p = tmp_path / "e.txt"
        p.write_text("06h00 80.0 80.0\n06h00 70.0 80.0\n")
        with pytest.raises(InputError):
            load_ephemeris(p)
