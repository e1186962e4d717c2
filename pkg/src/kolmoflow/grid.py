"""Periodic 2D grids and their Fourier-space bookkeeping.

The domain is the (0, 2*pi)^2 torus, so physical wavenumbers coincide with
the integer FFT frequencies. Arrays are indexed [x, y]; real FFTs reduce the
trailing (y) axis.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

TWO_PI = 2.0 * np.pi


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid2D:
    """Uniform periodic grid on (0, 2*pi)^2 with power-of-two resolution."""

    nx: int
    ny: int
    lx: float = TWO_PI
    ly: float = TWO_PI
    kx: np.ndarray = field(init=False, repr=False, compare=False)
    ky: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name, n in (("nx", self.nx), ("ny", self.ny)):
            if n < 8 or not _is_pow2(n):
                raise ConfigError(f"{name}={n} must be a power of two >= 8")
        # integer wavenumbers in FFT ordering: 0, 1, ..., n/2-1, -n/2, ..., -1
        object.__setattr__(self, "kx", np.fft.fftfreq(self.nx, 1.0 / self.nx).astype(np.int64))
        object.__setattr__(self, "ky", np.fft.fftfreq(self.ny, 1.0 / self.ny).astype(np.int64))

    @property
    def dx(self) -> float:
        return self.lx / self.nx

    @property
    def dy(self) -> float:
        return self.ly / self.ny

    def coords(self):
        """Return meshgrid (x, y) with shape (nx, ny)."""
        x = np.arange(self.nx) * self.dx
        y = np.arange(self.ny) * self.dy
        return np.meshgrid(x, y, indexing="ij")

    def wavenumbers_rfft(self):
        """Return (kx, kyr) broadcastable over the rfft2 layout (nx, ny//2 + 1)."""
        kx = self.kx[:, None].astype(np.float64)
        kyr = np.arange(self.ny // 2 + 1, dtype=np.float64)[None, :]
        return kx, kyr

    def ksq_rfft(self) -> np.ndarray:
        """|k|^2 on the rfft2 layout."""
        kx, kyr = self.wavenumbers_rfft()
        return kx**2 + kyr**2

    def dealias_mask_rfft(self) -> np.ndarray:
        """2/3-rule mask on the rfft2 layout (True = keep)."""
        kx, kyr = self.wavenumbers_rfft()
        cut_x = self.nx // 3
        cut_y = self.ny // 3
        return (np.abs(kx) <= cut_x) & (kyr <= cut_y)
