#!/usr/bin/env python3
"""Regenerate the static data files shipped in src/clearsky/data.

Everything here comes from closed forms or standard constants so the files
are reproducible without network access:

* cie_cmf_2deg_5nm.txt   - CIE 1931 2-degree color matching functions,
                           tabulated at 5 nm from the Wyman/Sloan/Shirley
                           multi-lobe piecewise-Gaussian fit (max error vs.
                           the official table is below ~2% locally).
* penndorf_rayleigh.txt  - sea-level Rayleigh scattering coefficient at
                           15 C, Penndorf-style: 1953 Edlen air dispersion,
                           N_s = 2.54743e25 m^-3, depolarization 0.035,
                           tabulated at the 40 canonical wavelengths.
* solar_spectrum.txt     - extraterrestrial solar spectral irradiance,
                           5772 K Planck disc normalized to a total solar
                           irradiance of 1361.1 W/m^2 (stand-in for a
                           measured table; swappable via the config file).
* grass_albedo.txt       - parametric green-vegetation spectral albedo
                           (chlorophyll trough, 550 nm bump, red edge).
* daylight_basis.txt     - mean + two characteristic components of daylight
                           spectra (CIE S0/S1/S2 shape) used by the
                           three-sample spectrum reconstruction.
* sun_ephemeris.txt      - sun positions for the canonical measurement
                           schedule (9h30-13h30 every 15 min plus three
                           early-morning render-only rows), computed for
                           42.45 N and a late-May declination.
"""

import os

import numpy as np

DATA_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "src", "clearsky", "data")

CANONICAL_NM = np.linspace(360.0, 830.0, 40)


# ----------------------------------------------------------------------
# CIE 1931 color matching functions (multi-lobe piecewise Gaussian fit)

def _lobe(lam, mean, tau_lo, tau_hi, scale):
    tau = np.where(lam < mean, tau_lo, tau_hi)
    t = (lam - mean) * tau
    return scale * np.exp(-0.5 * t * t)


def cmf_xyz(lam):
    x = (_lobe(lam, 442.0, 0.0624, 0.0374, 0.362)
         + _lobe(lam, 599.8, 0.0264, 0.0323, 1.056)
         - _lobe(lam, 501.1, 0.0490, 0.0382, 0.065))
    y = (_lobe(lam, 568.8, 0.0213, 0.0247, 0.821)
         + _lobe(lam, 530.9, 0.0613, 0.0322, 0.286))
    z = (_lobe(lam, 437.0, 0.0845, 0.0278, 1.217)
         + _lobe(lam, 459.0, 0.0385, 0.0725, 0.681))
    return x, y, z


def write_cmf(path):
    lam = np.arange(360.0, 830.0 + 0.1, 5.0)
    x, y, z = cmf_xyz(lam)
    rows = np.column_stack([lam, x, y, z])
    header = ("CIE 1931 2-degree observer, 5 nm steps\n"
              "multi-lobe piecewise-Gaussian analytic fit (Wyman, Sloan, Shirley 2013)\n"
              "wavelength_nm xbar ybar zbar")
    np.savetxt(path, rows, fmt="%.6e", header=header)


# ----------------------------------------------------------------------
# Penndorf-style Rayleigh scattering coefficient at sea level, 15 C

N_S = 2.54743e25          # molecules / m^3 at 15 C, 101325 Pa
DEPOLARIZATION = 0.035


def air_refractive_index(lam_nm):
    # 1953 Edlen dispersion for standard air (15 C, 760 mmHg)
    sigma2 = (1e3 / lam_nm) ** 2  # (1/um)^2
    n_minus_1 = (6432.8 + 2949810.0 / (146.0 - sigma2) + 25540.0 / (41.0 - sigma2)) * 1e-8
    return 1.0 + n_minus_1


def rayleigh_beta_formula(lam_nm):
    """Sea-level Rayleigh volume scattering coefficient in m^-1."""
    lam_m = np.asarray(lam_nm, dtype=float) * 1e-9
    n = air_refractive_index(lam_nm)
    king = (6.0 + 3.0 * DEPOLARIZATION) / (6.0 - 7.0 * DEPOLARIZATION)
    return (8.0 * np.pi ** 3 * (n ** 2 - 1.0) ** 2) / (3.0 * N_S * lam_m ** 4) * king


def write_penndorf(path):
    beta = rayleigh_beta_formula(CANONICAL_NM)
    rows = np.column_stack([CANONICAL_NM, beta])
    header = ("sea-level Rayleigh scattering coefficient, 15 C (Penndorf 1957 style)\n"
              "wavelength_nm beta_m^-1")
    np.savetxt(path, rows, fmt="%.8e", header=header)


# ----------------------------------------------------------------------
# Solar spectrum: Planck 5772 K normalized to TSI = 1361.1 W/m^2

H_PLANCK = 6.62607015e-34
C_LIGHT = 2.99792458e8
K_BOLTZ = 1.380649e-23
T_SUN = 5772.0
TSI = 1361.1  # W/m^2


def planck_lambda(lam_m, T):
    a = 2.0 * H_PLANCK * C_LIGHT ** 2 / lam_m ** 5
    return a / np.expm1(H_PLANCK * C_LIGHT / (lam_m * K_BOLTZ * T))


def write_solar(path):
    lam = np.arange(350.0, 2500.0 + 0.1, 5.0)
    b = planck_lambda(lam * 1e-9, T_SUN)  # W / (m^3 sr)
    # normalize so the full Planck curve integrates to the solar constant
    sigma = 2.0 * np.pi ** 5 * K_BOLTZ ** 4 / (15.0 * H_PLANCK ** 3 * C_LIGHT ** 2)
    total = sigma * T_SUN ** 4 / np.pi  # integral of planck_lambda over lambda, W/(m^2 sr)
    irr = b * (TSI / total) * 1e-9  # W / (m^2 nm)
    rows = np.column_stack([lam, irr])
    header = ("extraterrestrial solar spectral irradiance\n"
              "5772 K Planck disc scaled to TSI = 1361.1 W/m^2 (stand-in for a measured table)\n"
              "wavelength_nm irradiance_W_m^-2_nm^-1")
    np.savetxt(path, rows, fmt="%.6e", header=header)


# ----------------------------------------------------------------------
# Grass albedo: parametric green-vegetation curve

def grass_albedo(lam):
    lam = np.asarray(lam, dtype=float)
    base = 0.05
    green_bump = 0.065 * np.exp(-0.5 * ((lam - 550.0) / 28.0) ** 2)
    chlorophyll = -0.025 * np.exp(-0.5 * ((lam - 675.0) / 16.0) ** 2)
    red_edge = 0.42 / (1.0 + np.exp(-(lam - 718.0) / 11.0))
    return np.clip(base + green_bump + chlorophyll + red_edge, 0.0, 1.0)


def write_grass(path):
    lam = np.arange(350.0, 2500.0 + 0.1, 10.0)
    rows = np.column_stack([lam, grass_albedo(lam)])
    header = ("green-grass spectral albedo, parametric reproduction\n"
              "wavelength_nm albedo")
    np.savetxt(path, rows, fmt="%.5f", header=header)


# ----------------------------------------------------------------------
# Daylight basis for three-sample spectrum reconstruction
#
# Shape reproduction of the CIE daylight components S0 (mean), S1
# (yellow-blue), S2 (pink-green), 10 nm steps, 360-830 nm.

DAYLIGHT_10NM = {
    360: (61.5, 38.0, 5.3), 370: (68.8, 42.4, 6.1), 380: (63.4, 38.5, 3.0),
    390: (65.8, 35.0, 1.2), 400: (94.8, 43.4, -1.1), 410: (104.8, 46.3, -0.5),
    420: (105.9, 43.9, -0.7), 430: (96.8, 37.1, -1.2), 440: (113.9, 36.7, -2.6),
    450: (125.6, 35.9, -2.9), 460: (125.5, 32.6, -2.8), 470: (121.3, 27.9, -2.6),
    480: (121.3, 24.3, -2.6), 490: (113.5, 20.1, -1.8), 500: (113.1, 16.2, -1.5),
    510: (110.8, 13.2, -1.3), 520: (106.5, 8.6, -1.2), 530: (108.8, 6.1, -1.0),
    540: (105.3, 4.2, -0.5), 550: (104.4, 1.9, -0.3), 560: (100.0, 0.0, 0.0),
    570: (96.0, -1.6, 0.2), 580: (95.1, -3.5, 0.5), 590: (89.1, -3.5, 2.1),
    600: (90.5, -5.8, 3.2), 610: (90.3, -7.2, 4.1), 620: (88.4, -8.6, 4.7),
    630: (84.0, -9.5, 5.1), 640: (85.1, -10.9, 6.7), 650: (81.9, -10.7, 7.3),
    660: (82.6, -12.0, 8.6), 670: (84.9, -14.0, 9.8), 680: (81.3, -13.6, 10.2),
    690: (71.9, -12.0, 8.3), 700: (74.3, -13.3, 9.6), 710: (76.4, -12.9, 8.5),
    720: (63.3, -10.6, 7.0), 730: (71.7, -11.6, 7.6), 740: (77.0, -12.2, 8.0),
    750: (65.2, -10.2, 6.7), 760: (47.7, -7.8, 5.2), 770: (68.6, -11.2, 7.4),
    780: (65.0, -10.4, 6.8), 790: (66.0, -10.6, 7.0), 800: (61.0, -9.7, 6.4),
    810: (53.3, -8.3, 5.5), 820: (58.9, -9.3, 6.1), 830: (61.9, -9.8, 6.5),
}


def write_daylight(path):
    lam = np.array(sorted(DAYLIGHT_10NM))
    s = np.array([DAYLIGHT_10NM[int(l)] for l in lam])
    rows = np.column_stack([lam.astype(float), s])
    header = ("daylight spectrum basis: mean component and two characteristic components\n"
              "(CIE S0/S1/S2 shape), used for xyY -> spectrum reconstruction\n"
              "wavelength_nm s0 s1 s2")
    np.savetxt(path, rows, fmt="%.2f", header=header)


# ----------------------------------------------------------------------
# Sun ephemeris for the canonical schedule

LATITUDE_DEG = 42.45        # Ithaca, NY
DECLINATION_DEG = 21.4      # late May
SOLAR_NOON_H = 13.0         # clock time of solar noon (DST)


def sun_position(hour):
    phi = np.radians(LATITUDE_DEG)
    dec = np.radians(DECLINATION_DEG)
    ha = np.radians(15.0 * (hour - SOLAR_NOON_H))
    east = -np.cos(dec) * np.sin(ha)
    north = np.cos(phi) * np.sin(dec) - np.sin(phi) * np.cos(dec) * np.cos(ha)
    up = np.sin(phi) * np.sin(dec) + np.cos(phi) * np.cos(dec) * np.cos(ha)
    zenith = np.degrees(np.arccos(np.clip(up, -1.0, 1.0)))
    azimuth = np.degrees(np.arctan2(east, north)) % 360.0
    return zenith, azimuth


def write_ephemeris(path):
    hours = [6.0, 7.0, 8.0] + [9.5 + 0.25 * k for k in range(17)]
    lines = ["# sun ephemeris: time label, sun zenith (deg), sun azimuth (deg from N, cw)",
             "# computed for latitude 42.45 N, declination 21.4 deg, solar noon 13h00"]
    for h in hours:
        hh = int(h)
        mm = int(round((h - hh) * 60))
        zen, az = sun_position(h)
        lines.append(f"{hh:02d}h{mm:02d} {zen:.3f} {az:.3f}")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def main():
    os.makedirs(DATA_DIR, exist_ok=True)
    write_cmf(os.path.join(DATA_DIR, "cie_cmf_2deg_5nm.txt"))
    write_penndorf(os.path.join(DATA_DIR, "penndorf_rayleigh.txt"))
    write_solar(os.path.join(DATA_DIR, "solar_spectrum.txt"))
    write_grass(os.path.join(DATA_DIR, "grass_albedo.txt"))
    write_daylight(os.path.join(DATA_DIR, "daylight_basis.txt"))
    write_ephemeris(os.path.join(DATA_DIR, "sun_ephemeris.txt"))
    print("wrote data files to", os.path.abspath(DATA_DIR))


if __name__ == "__main__":
    main()
