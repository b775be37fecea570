"""Single scattering with a precomputed sun-transmittance table.

The atmosphere is sliced into concentric spheres spaced for equal combined
column increments; cylinders around the sun axis sample the sun-facing and
shadow-side branches. The table stores wavelength-independent density
columns toward the sun at every sphere/cylinder intersection, one per
component, so that sun transmittance at render time is two bilinear lookups
and one exp. View transmittance accumulates incrementally along the ray.
"""

import numpy as np

from ..atmosphere import (
    cornette_shanks_phase,
    density_column,
    equal_column_altitudes,
    rayleigh_phase,
)
from ..errors import InputError
from .base import SkyModel


class Nishita93Model(SkyModel):
    name = "nishita93"

    def __init__(self, params, n_spheres=64, n_cylinders=64, altitude_km=0.0,
                 sun_table_samples=128, segment_subdivisions=4):
        super().__init__(params)
        if n_spheres < 2 or n_cylinders < 2:
            raise InputError("need at least 2 spheres and 2 cylinders")
        self.n_spheres = n_spheres
        self.n_cylinders = n_cylinders
        self.altitude_km = altitude_km
        self.subdiv = max(int(segment_subdivisions), 1)
        self.r_obs = params.r_ground + altitude_km * 1e3

        self.sphere_r = params.r_ground + equal_column_altitudes(params, n_spheres)
        # cylinder radii: uniform below the planet radius (sun-side geometry),
        # column-spaced above it where the grazing column varies fastest
        lower = np.linspace(0.0, params.r_ground, n_cylinders // 2, endpoint=False)
        upper = params.r_ground + equal_column_altitudes(
            params, n_cylinders - n_cylinders // 2)
        self.cyl_r = np.concatenate([lower, upper])

        r = self.sphere_r[:, None]
        c = self.cyl_r[None, :]
        along = np.sqrt(np.maximum(r * r - c * c, 0.0))  # |x . s| at intersection
        safe_r = np.maximum(r, 1.0)
        self.sun_col = {}
        for branch, sign in (("front", 1.0), ("back", -1.0)):
            mu = sign * along / safe_r
            cols = {}
            for comp, sh in (("rayleigh", params.h_rayleigh),
                             ("aerosol", params.h_aerosol)):
                col = density_column(params, np.broadcast_to(r, mu.shape), mu, sh,
                                     samples=sun_table_samples)
                cols[comp] = col
            # shadow: back-side points whose sun ray passes below the surface
            if branch == "back":
                shadow = (c < params.r_ground) & np.broadcast_to(c <= r, mu.shape)
                for comp in cols:
                    cols[comp] = np.where(shadow, np.inf, cols[comp])
            self.sun_col[branch] = cols

    def _lookup_sun_columns(self, r, axis_dist, along_sun):
        """Bilinear lookup of the two density columns toward the sun;
        shadowed corners are +inf and win any interpolation they touch."""
        u = np.interp(r, self.sphere_r, np.arange(self.n_spheres))
        w = np.interp(axis_dist, self.cyl_r, np.arange(self.n_cylinders))
        i0 = np.clip(u.astype(int), 0, self.n_spheres - 2)
        j0 = np.clip(w.astype(int), 0, self.n_cylinders - 2)
        fu = np.clip(u - i0, 0.0, 1.0)
        fw = np.clip(w - j0, 0.0, 1.0)
        front = along_sun >= 0.0
        out = []
        for comp in ("rayleigh", "aerosol"):
            tf, tb = self.sun_col["front"][comp], self.sun_col["back"][comp]
            c00 = _gather(tf, tb, front, i0, j0)
            c01 = _gather(tf, tb, front, i0, j0 + 1)
            c10 = _gather(tf, tb, front, i0 + 1, j0)
            c11 = _gather(tf, tb, front, i0 + 1, j0 + 1)
            col = ((1 - fu) * (1 - fw) * c00 + (1 - fu) * fw * c01
                   + fu * (1 - fw) * c10 + fu * fw * c11)
            out.append(col)
        return out

    def _radiance_block(self, view, sun):
        p = self.params
        r0 = self.r_obs
        mu = view[:, 2]
        n = view.shape[0]
        mu_s = sun[2]
        cos_vs = view @ sun

        # integration nodes: crossings with the spheres above the viewer,
        # each layer segment subdivided to resolve the integrand decay
        valid_sphere = self.sphere_r >= r0 * (1.0 - 1e-12)
        rr = self.sphere_r[valid_sphere]
        disc = r0 * r0 * (mu[:, None] ** 2 - 1.0) + rr[None, :] ** 2
        t = -r0 * mu[:, None] + np.sqrt(np.maximum(disc, 0.0))
        t = np.maximum(t, 0.0)  # (n, ns)
        if self.subdiv > 1:
            frac = np.arange(self.subdiv) / self.subdiv
            seg = t[:, :-1, None] + np.diff(t, axis=1)[:, :, None] * frac
            t = np.concatenate([seg.reshape(n, -1), t[:, -1:]], axis=1)
        below = mu < 0.0
        if np.any(below):
            # ground-directed rays from the ground viewer carry no sky term
            t[below] = 0.0

        r_node = np.sqrt(np.maximum(r0 * r0 + 2.0 * r0 * mu[:, None] * t + t * t, 0.0))
        h_node = np.maximum(r_node - p.r_ground, 0.0)
        rho_r = np.exp(-h_node / p.h_rayleigh)
        rho_m = np.exp(-h_node / p.h_aerosol)

        # incremental view columns (trapezoid between crossings)
        dt = np.diff(t, axis=1)
        col_view_r = np.concatenate(
            [np.zeros((n, 1)), np.cumsum(0.5 * (rho_r[:, 1:] + rho_r[:, :-1]) * dt, axis=1)],
            axis=1)
        col_view_m = np.concatenate(
            [np.zeros((n, 1)), np.cumsum(0.5 * (rho_m[:, 1:] + rho_m[:, :-1]) * dt, axis=1)],
            axis=1)

        # sun columns from the table
        along_sun = r0 * mu_s + t * (cos_vs[:, None])
        axis_dist = np.sqrt(np.maximum(r_node ** 2 - along_sun ** 2, 0.0))
        col_sun_r, col_sun_m = self._lookup_sun_columns(r_node, axis_dist, along_sun)

        tau = ((col_view_r + col_sun_r)[..., None] * p.beta_rayleigh
               + (col_view_m + col_sun_m)[..., None] * p.beta_aerosol_ext)
        with np.errstate(invalid="ignore"):
            trans = np.where(np.isfinite(tau), np.exp(-np.minimum(tau, 700.0)), 0.0)

        w = np.zeros_like(t)
        w[:, :-1] += 0.5 * dt
        w[:, 1:] += 0.5 * dt
        integ_r = np.sum((w * rho_r)[..., None] * trans, axis=1)
        integ_m = np.sum((w * rho_m)[..., None] * trans, axis=1)

        ph_r = rayleigh_phase(cos_vs)[:, None]
        ph_m = cornette_shanks_phase(cos_vs, p.mie_asymmetry_g)[:, None]
        return p.solar * (ph_r * p.beta_rayleigh * integ_r
                          + ph_m * p.beta_aerosol_sca * integ_m)


def _gather(tf, tb, front, i, j):
    """Gather table corners choosing the front or back branch per point."""
    return np.where(front, tf[i, j], tb[i, j])
