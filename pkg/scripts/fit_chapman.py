#!/usr/bin/env python3
"""Fit the grazing-incidence factor of the closed-form transmittance.

The closed form approximates the slant column of an exponential profile with
C(r, mu) = H rho(h) c / ((c - 1)|mu| + 1), c = fit * sqrt(pi r / 2H). The one
scale factor per component is fitted against the numeric column integral over
altitudes 0-30 km and zenith angles 0-88 degrees, minimizing the worst
relative error, and written to src/clearsky/data/chapman_fit.json.
"""

import json
import os
import sys

import numpy as np
from scipy.optimize import minimize_scalar

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "src"))

from clearsky.atmosphere import (  # noqa: E402
    AtmosphereParams,
    chapman_column,
    density_column,
)

OUT = os.path.join(os.path.dirname(__file__), os.pardir,
                   "src", "clearsky", "data", "chapman_fit.json")


def fit_component(params, scale_h):
    alt = np.linspace(0.0, 50e3, 51)
    zen = np.radians(np.linspace(0.0, 88.0, 45))
    r = params.r_ground + alt[:, None]
    mu = np.broadcast_to(np.cos(zen)[None, :], (alt.size, zen.size))
    r = np.broadcast_to(r, mu.shape)
    exact = density_column(params, r, mu, scale_h, samples=512)

    def cost(fit):
        # minimize the worst absolute column error weighted by the ground
        # value, i.e. the worst optical-depth error per unit sea-level beta
        approx = chapman_column(params, r, mu, scale_h, fit)
        return float(np.max(np.abs(approx - exact)) / scale_h)

    res = minimize_scalar(cost, bounds=(0.8, 1.2), method="bounded",
                          options={"xatol": 1e-6})
    fit = float(res.x)
    rel = np.abs(chapman_column(params, r, mu, scale_h, fit) / exact - 1.0)
    return fit, float(np.max(rel))


def main():
    params = AtmosphereParams()
    out = {}
    for component, sh in (("rayleigh", params.h_rayleigh),
                          ("aerosol", params.h_aerosol)):
        fit, err = fit_component(params, sh)
        out[component] = fit
        print(f"{component}: fit={fit:.6f} max rel err={err:.4%}")
    with open(OUT, "w") as f:
        json.dump(out, f, indent=2)
    print("wrote", os.path.abspath(OUT))


if __name__ == "__main__":
    main()
