"""Analytic daylight model: Perez-form luminance and chromaticity
distributions driven by a single turbidity, with the daylight-components
spectrum synthesis.

Atmospheric parameters other than turbidity are baked into the published
fit and are deliberately ignored here.
"""

import numpy as np

from ..errors import CapabilityError, InputError
from ..spectral import default_daylight_basis
from .base import SkyModel

# Perez coefficients A..E as linear functions of turbidity, for the
# luminance Y (kcd/m^2) and the chromaticities x, y
_PEREZ_Y = np.array([
    [0.1787, -1.4630],
    [-0.3554, 0.4275],
    [-0.0227, 5.3251],
    [0.1206, -2.5771],
    [-0.0670, 0.3703],
])
_PEREZ_X = np.array([
    [-0.0193, -0.2592],
    [-0.0665, 0.0008],
    [-0.0004, 0.2125],
    [-0.0641, -0.8989],
    [-0.0033, 0.0452],
])
_PEREZ_Y_CHROMA = np.array([
    [-0.0167, -0.2608],
    [-0.0950, 0.0092],
    [-0.0079, 0.2102],
    [-0.0441, -1.6537],
    [-0.0109, 0.0529],
])

# zenith chromaticity: [T^2 T 1] . M . [th^3 th^2 th 1]
_ZENITH_X = np.array([
    [0.00166, -0.00375, 0.00209, 0.0],
    [-0.02903, 0.06377, -0.03202, 0.00394],
    [0.11693, -0.21196, 0.06052, 0.25886],
])
_ZENITH_Y = np.array([
    [0.00275, -0.00610, 0.00317, 0.0],
    [-0.04214, 0.08970, -0.04153, 0.00516],
    [0.15346, -0.26756, 0.06670, 0.26688],
])


def _perez(theta, gamma, coeff):
    a, b, c, d, e = coeff
    cos_t = np.maximum(np.cos(theta), 1e-4)
    return ((1.0 + a * np.exp(b / cos_t))
            * (1.0 + c * np.exp(d * gamma) + e * np.cos(gamma) ** 2))


class PreethamModel(SkyModel):
    name = "preetham"

    def __init__(self, params, turbidity=2.53):
        super().__init__(params)
        if not 1.9 <= turbidity <= 10.0:
            raise InputError("turbidity must lie in [1.9, 10]")
        self.turbidity = turbidity
        t = turbidity
        self._coeff_y = _PEREZ_Y @ np.array([t, 1.0])
        self._coeff_x = _PEREZ_X @ np.array([t, 1.0])
        self._coeff_yc = _PEREZ_Y_CHROMA @ np.array([t, 1.0])
        self._tvec = np.array([t * t, t, 1.0])
        self._basis = default_daylight_basis()

    def _zenith_values(self, theta_s):
        chi = (4.0 / 9.0 - self.turbidity / 120.0) * (np.pi - 2.0 * theta_s)
        yz = ((4.0453 * self.turbidity - 4.9710) * np.tan(chi)
              - 0.2155 * self.turbidity + 2.4192)  # kcd/m^2
        th = np.array([theta_s ** 3, theta_s ** 2, theta_s, 1.0])
        xz = self._tvec @ _ZENITH_X @ th
        yz_c = self._tvec @ _ZENITH_Y @ th
        return max(yz, 1e-6) * 1000.0, xz, yz_c

    def _radiance_block(self, view, sun):
        mu_s = float(np.clip(sun[2], -1.0, 1.0))
        theta_s = float(np.arccos(mu_s))
        yz_cd, xz, yz_c = self._zenith_values(theta_s)

        mu = np.clip(view[:, 2], -1.0, 1.0)
        theta = np.arccos(mu)
        gamma = np.arccos(np.clip(view @ sun, -1.0, 1.0))
        above = mu > 0.0

        def ratio(coeff):
            return _perez(theta, gamma, coeff) / _perez(0.0, theta_s, coeff)

        Y = yz_cd * ratio(self._coeff_y)
        x = xz * ratio(self._coeff_x)
        y = yz_c * ratio(self._coeff_yc)
        Y = np.where(above, np.maximum(Y, 0.0), 0.0)
        # radiometric luminance channel for the basis synthesis
        values = self._basis.spectra_for_xyy(x, y, Y / 683.0,
                                             out_grid=self.grid)
        return values


def build_preetham(params, turbidity=2.53) -> PreethamModel:
    return PreethamModel(params, turbidity)
