"""Single scattering with closed-form transmittance and very few samples.

No precomputation: both the view and sun transmittance use the closed-form
grazing-incidence column, so a pixel costs O(samples). The original scheme's
shared scale height and optional isotropic molecular phase are not used:
molecules and aerosols keep separate scale heights, Rayleigh and
Cornette-Shanks phases apply, and the integral uses midpoint sampling.
"""

import numpy as np

from ..atmosphere import (
    chapman_column,
    cornette_shanks_phase,
    hits_ground,
    ray_length,
    rayleigh_phase,
    _chapman_constants,
)
from ..errors import InputError
from .base import SkyModel


class OnealModel(SkyModel):
    name = "oneal"

    def __init__(self, params, samples=4, altitude_km=0.0):
        super().__init__(params)
        if samples < 2:
            raise InputError("need at least 2 samples")
        self.samples = samples
        self.altitude_km = altitude_km
        self.r_obs = params.r_ground + altitude_km * 1e3
        self._fit = _chapman_constants()

    def _column_to_boundary(self, r, mu, component):
        return chapman_column(self.params, r, mu, self.params.scale_height(component),
                              self._fit[component])

    def _radiance_block(self, view, sun):
        p = self.params
        r0 = self.r_obs
        n = self.samples
        mu = view[:, 2]
        mu_s = sun[2]
        cos_vs = view @ sun

        length = ray_length(p, np.full_like(mu, r0), mu)
        length = np.where(np.isfinite(length), length, 0.0)
        if self.altitude_km == 0.0:
            length = np.where(mu < 0.0, 0.0, length)  # ground rays: no sky term

        frac = (np.arange(n) + 0.5) / n
        t = length[:, None] * frac[None, :]
        r = np.sqrt(np.maximum(r0 * r0 + 2.0 * r0 * mu[:, None] * t + t * t, 0.0))
        h = np.maximum(r - p.r_ground, 0.0)
        mu_local = (r0 * mu[:, None] + t) / np.maximum(r, 1.0)
        rho_r = np.exp(-h / p.h_rayleigh)
        rho_m = np.exp(-h / p.h_aerosol)

        # view transmittance: difference of boundary columns along the ray
        mu_sun_local = (r0 * mu_s + t * cos_vs[:, None]) / np.maximum(r, 1.0)
        shadow = hits_ground(p, r, mu_sun_local)
        cols = {}
        for comp, rho in (("rayleigh", rho_r), ("aerosol", rho_m)):
            c_view = (self._column_to_boundary(np.full_like(t, r0), mu[:, None], comp)
                      - self._column_to_boundary(r, mu_local, comp))
            c_sun = self._column_to_boundary(r, mu_sun_local, comp)
            cols[comp] = np.maximum(c_view, 0.0) + c_sun

        tau = (cols["rayleigh"][..., None] * p.beta_rayleigh
               + cols["aerosol"][..., None] * p.beta_aerosol_ext)
        trans = np.exp(-np.minimum(tau, 700.0))
        trans[shadow] = 0.0

        dt = (length / n)[:, None]
        integ_r = np.sum((rho_r * dt)[..., None] * trans, axis=1)
        integ_m = np.sum((rho_m * dt)[..., None] * trans, axis=1)
        ph_r = rayleigh_phase(cos_vs)[:, None]
        ph_m = cornette_shanks_phase(cos_vs, p.mie_asymmetry_g)[:, None]
        return p.solar * (ph_r * p.beta_rayleigh * integ_r
                          + ph_m * p.beta_aerosol_sca * integ_m)
