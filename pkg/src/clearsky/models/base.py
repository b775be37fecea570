"""Common sky-model interface and the per-model capability metadata."""

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from ..atmosphere import AtmosphereParams
from ..errors import CapabilityError, InputError
from ..spectral import Spectrum

MODEL_NAMES = ("nishita93", "nishita96", "preetham", "oneal",
               "haber", "bruneton", "elek", "hosek")


@dataclass(frozen=True)
class ModelCapabilities:
    """Scope and complexity summary of one model."""

    supported_viewpoints: str   # 'all' | 'in atmosphere' | 'ground only'
    aerial_perspective: bool
    sun_below_horizon: bool
    scattering_orders: str      # '1' | '2' | 'all'
    precompute_time: str
    precompute_memory: str
    render_time: str


CAPABILITIES = {
    "nishita93": ModelCapabilities("all", True, True, "1", "O(n^3)", "O(n^2)", "O(n)"),
    "nishita96": ModelCapabilities("in atmosphere", True, True, "2", "O(n^3)", "O(n^3)", "O(n)"),
    "preetham": ModelCapabilities("ground only", True, False, "2", "0", "0", "O(1)"),
    "oneal": ModelCapabilities("all", True, True, "1", "0", "0", "O(n)"),
    "haber": ModelCapabilities("ground only", True, True, "all", "O(n^6)", "O(n^3)", "O(n^2)"),
    "bruneton": ModelCapabilities("all", True, True, "all", "O(n^6)", "O(n^4)", "O(1)"),
    "elek": ModelCapabilities("all", True, True, "all", "O(n^6)", "O(n^4)", "O(1)"),
    "hosek": ModelCapabilities("ground only", False, False, "all", "0", "0", "O(1)"),
}


def _as_unit(v, what):
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != 3:
        raise InputError(f"{what} must have 3 components")
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(n == 0):
        raise InputError(f"{what} must be nonzero")
    return v / n


class SkyModel(ABC):
    """A built model: spectral sky radiance for (view, sun) directions.

    Immutable after construction; ``radiance`` is deterministic, side-effect
    free, and returns nonnegative W m^-2 sr^-1 nm^-1 on ``params.grid``.
    """

    name = "?"
    #: evaluation chunk to bound peak memory on large pixel batches
    _block = 4096

    def __init__(self, params: AtmosphereParams):
        self.params = params

    @property
    def grid(self):
        return self.params.grid

    @property
    def capabilities(self) -> ModelCapabilities:
        return CAPABILITIES[self.name]

    def _check_sun(self, sun_dir):
        if sun_dir[2] < 0.0 and not self.capabilities.sun_below_horizon:
            raise CapabilityError(
                f"{self.name} does not support sun directions below the horizon")

    def radiance(self, view_dir, sun_dir):
        """Spectral radiance; view_dir (..., 3), sun_dir (3,) -> (..., n_lambda)."""
        view = _as_unit(view_dir, "view direction")
        sun = _as_unit(sun_dir, "sun direction").reshape(3)
        self._check_sun(sun)
        flat = view.reshape(-1, 3)
        blocks = [self._radiance_block(flat[i:i + self._block], sun)
                  for i in range(0, flat.shape[0], self._block)]
        out = np.concatenate(blocks, axis=0) if len(blocks) > 1 else blocks[0]
        out = np.maximum(out, 0.0)
        if not np.all(np.isfinite(out)):
            raise InputError(f"{self.name}: non-finite radiance produced")
        return out.reshape(view.shape[:-1] + (len(self.grid),))

    def spectrum(self, view_dir, sun_dir) -> Spectrum:
        return Spectrum(self.grid, self.radiance(view_dir, sun_dir))

    @abstractmethod
    def _radiance_block(self, view, sun):
        """view (n, 3) unit rows, sun (3,) unit -> (n, n_lambda)."""
