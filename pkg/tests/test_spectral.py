import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clearsky.errors import InputError
from clearsky.spectral import (
    ColorMatchingTable,
    ColorTriple,
    DaylightBasis,
    Spectrum,
    WavelengthGrid,
    XYZ_FROM_SRGB,
    band_integral,
    canonical_grid,
    chromaticity_rg,
    default_cmf,
    default_daylight_basis,
    default_solar,
    luminance,
    reconstruct_spectrum,
    rgb_from_three_samples,
    spectrum_to_srgb,
    spectrum_to_xyz,
    three_sample_constants,
    tone_map,
)

# Frozen 1 nm trapezoid oracle values, computed directly from the shipped
# 5 nm table (linear resample) and the IEC sRGB matrix:
#   integral of rtilde(lambda)^2 over 360-830
ORACLE_INT_RTILDE_SQ = 338.68901889646077
#   integral of ybar(lambda) over 360-830
ORACLE_INT_YBAR = 106.94706214208938


def flat_spectrum(value=1.0, grid=None):
    grid = grid or canonical_grid()
    return Spectrum(grid, np.full(len(grid), value))


class TestWavelengthGrid:
    def test_canonical_grid(self):
        g = canonical_grid()
        assert len(g) == 40
        assert g.lam_min == 360.0 and g.lam_max == 830.0

    def test_rejects_descending(self):
        with pytest.raises(InputError):
            WavelengthGrid(np.array([500.0, 400.0]))

    def test_rejects_out_of_range(self):
        with pytest.raises(InputError):
            WavelengthGrid(np.array([100.0, 400.0]))


class TestSpectrumValidation:
    def test_length_mismatch(self):
        with pytest.raises(InputError):
            Spectrum(canonical_grid(), np.zeros(41))

    def test_negative_radiance(self):
        v = np.zeros(40)
        v[3] = -1.0
        with pytest.raises(InputError):
            Spectrum(canonical_grid(), v)

    def test_albedo_above_one(self):
        with pytest.raises(InputError):
            Spectrum(canonical_grid(), np.full(40, 1.2), kind="albedo")


class TestSpectrumToSrgb:
    def test_zero_spectrum(self):
        rgb = spectrum_to_srgb(flat_spectrum(0.0))
        assert np.allclose(rgb.components, 0.0)

    def test_rtilde_self_integral(self):
        # spectrum equal to rtilde itself: r component is the integral of
        # rtilde^2 (checked against the 1 nm brute-force oracle)
        cmf = default_cmf()
        spec = Spectrum(cmf.grid, cmf.rtilde, kind="dimensionless")
        r = spectrum_to_srgb(spec, cmf).components[0]
        assert r == pytest.approx(ORACLE_INT_RTILDE_SQ, rel=5e-3)

    def test_flat_spectrum_luminance_integral(self):
        xyz = spectrum_to_xyz(flat_spectrum(1.0))
        assert xyz.components[1] == pytest.approx(ORACLE_INT_YBAR, rel=5e-3)

    def test_disjoint_grids_error(self):
        cmf = default_cmf()
        ir_grid = WavelengthGrid(np.linspace(900.0, 1000.0, 5))
        with pytest.raises(InputError):
            spectrum_to_srgb(Spectrum(ir_grid, np.ones(5)), cmf)

    def test_40_point_quadrature_close_to_1nm(self):
        # smooth spectra: canonical-grid quadrature within 1% of 1 nm reference
        cmf = default_cmf(canonical_grid())
        y40 = np.trapezoid(cmf.ybar, cmf.grid.wavelengths)
        assert y40 == pytest.approx(ORACLE_INT_YBAR, rel=1e-2)


class TestLuminance:
    def test_zero(self):
        assert luminance(flat_spectrum(0.0)) == 0.0

    def test_monochromatic_555(self):
        # unit-area spike at 555 nm -> ~683 cd/m^2 (ybar(555) ~ 1)
        lam = np.array([553.0, 555.0, 557.0])
        spike = Spectrum(WavelengthGrid(lam), np.array([0.0, 0.5, 0.0]))
        assert luminance(spike) == pytest.approx(683.0, rel=0.02)

    @given(st.floats(0.1, 50.0))
    @settings(max_examples=20, deadline=None)
    def test_linearity(self, s):
        base = flat_spectrum(0.01)
        assert luminance(base.scaled(s)) == pytest.approx(s * luminance(base), rel=1e-12)


class TestChromaticity:
    def test_example_triple(self):
        c = chromaticity_rg(ColorTriple("linear-sRGB", np.array([0.2, 0.4, 0.8])))
        assert np.allclose(c.components, [0.25, 0.5, 1.0])

    def test_gray_invariance(self):
        for k in (0.1, 1.0, 7.3):
            c = chromaticity_rg(ColorTriple("linear-sRGB", np.full(3, k)))
            assert np.allclose(c.components, 1.0)

    def test_black(self):
        c = chromaticity_rg(ColorTriple("linear-sRGB", np.zeros(3)))
        assert np.allclose(c.components, 0.0)

    @given(st.floats(0.01, 100.0))
    @settings(max_examples=20, deadline=None)
    def test_scale_invariance(self, s):
        spec = Spectrum(canonical_grid(), np.linspace(0.1, 1.0, 40))
        a = chromaticity_rg(spectrum_to_srgb(spec))
        b = chromaticity_rg(spectrum_to_srgb(spec.scaled(s)))
        assert np.allclose(a.components, b.components, atol=1e-12)


class TestToneMap:
    def test_black_fixed_point(self):
        out = tone_map(ColorTriple("linear-sRGB", np.zeros(3)), k=1.0)
        assert np.allclose(out.components, 0.0)

    def test_half_at_ln2_over_k(self):
        k = 3.7
        c = np.full(3, np.log(2.0) / k)
        out = tone_map(ColorTriple("linear-sRGB", c), k=k)
        assert np.allclose(out.components, 0.5)

    @given(st.floats(0.0, 10.0), st.floats(0.0, 10.0))
    @settings(max_examples=30, deadline=None)
    def test_monotone(self, a, b):
        lo, hi = sorted([a, b])
        out = tone_map(ColorTriple("linear-sRGB", np.array([lo, hi, 0.0])), k=0.9)
        assert out.components[0] <= out.components[1]


class TestThreeSampleRgb:
    def test_zero(self):
        rgb = rgb_from_three_samples(0.0, 0.0, 0.0)
        assert np.allclose(rgb.components, 0.0)

    def test_constants_positive(self):
        ks = three_sample_constants()
        assert all(k > 0 for k in ks)

    def test_constant_solar_alpha_zero(self):
        # with S constant and alpha=0 the constants reduce to the plain
        # integrals of the sRGB matching functions
        grid = WavelengthGrid(np.arange(360.0, 831.0, 1.0))
        solar = Spectrum(grid, np.ones(len(grid)), kind="solar")
        cmf = default_cmf()
        ks = three_sample_constants(solar, cmf, alpha=0.0)
        cmf_r = cmf.resample(grid)
        lam = grid.wavelengths
        expect = [np.trapezoid(f, lam) for f in cmf_r.rgb_rows]
        assert np.allclose(ks, expect, rtol=1e-6)

    def test_matches_full_conversion_on_model_form_spectrum(self):
        # L(lambda) = c S(lambda) lambda^-alpha: the three-sample color equals
        # the full spectral conversion up to quadrature error
        solar = default_solar()
        cmf = default_cmf()
        alpha = 3.0
        grid = WavelengthGrid(np.arange(360.0, 831.0, 1.0))
        s = solar.resample(grid).values
        lam = grid.wavelengths
        c = 2.5e-3
        values = c * s * lam ** (-alpha) * 1e8
        spec = Spectrum(grid, values)
        full = spectrum_to_srgb(spec, cmf).components
        samples = [float(np.interp(l, lam, values)) for l in (680.0, 550.0, 440.0)]
        approx = rgb_from_three_samples(*samples, solar=solar, cmf=cmf, alpha=alpha).components
        assert np.allclose(approx, full, rtol=5e-3)


class TestReconstructSpectrum:
    def test_zero(self):
        spec = reconstruct_spectrum(0.0, 0.0, 0.0)
        assert np.allclose(spec.values, 0.0)

    def test_round_trip_color_consistency(self):
        # reconstructing then converting reproduces the three-sample color
        # within 2% per component
        samples = (0.012, 0.024, 0.035)  # reddish-blue sky-like radiances
        target = rgb_from_three_samples(*samples).components
        spec = reconstruct_spectrum(*samples)
        got = spectrum_to_srgb(spec).components
        assert np.all(np.abs(got - target) <= 0.02 * np.abs(target) + 1e-12)

    @pytest.mark.filterwarnings("ignore::UserWarning")
    def test_nonnegative_output(self):
        spec = reconstruct_spectrum(0.001, 0.02, 0.09)
        assert np.all(spec.values >= 0.0)

    def test_out_of_gamut_warns(self):
        basis = default_daylight_basis()
        with pytest.warns(UserWarning):
            basis.spectrum_for_xyy(0.05, 0.9, 1.0)


class TestBandIntegral:
    def test_flat(self):
        lam = np.linspace(360.0, 830.0, 40)
        assert band_integral(lam, np.ones(40), 360.0, 720.0) == pytest.approx(360.0)

    def test_partial_cell_endpoints(self):
        lam = np.array([400.0, 500.0, 600.0])
        v = np.array([1.0, 1.0, 1.0])
        assert band_integral(lam, v, 450.0, 550.0) == pytest.approx(100.0)


class TestColorMatchingTable:
    def test_rgb_rows_are_matrix_transform(self):
        cmf = default_cmf()
        import clearsky.spectral as sp
        expect = sp.SRGB_FROM_XYZ @ cmf.xyz_rows
        assert np.allclose(cmf.rgb_rows, expect)

    def test_resample_zero_outside(self):
        cmf = default_cmf()
        g = WavelengthGrid(np.array([900.0, 1000.0]))
        r = cmf.resample(g)
        assert np.allclose(r.ybar, 0.0)
