"""Trajectory dataset generation and the DSET binary container.

DSET layout (little-endian):
    magic "SPSG" | version u32 = 1 | n_trajectories u32 | n_snapshots u32 |
    nx u32 | ny u32 | dtype u8 = 0 (float32) | record_interval f64 | nu f64 |
    chi f64 | 32 reserved bytes | payload: trajectories concatenated, each
    snapshot row-major float32.

Snapshot i of a trajectory is at time i * record_interval.
"""

import os
import struct
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError
from .grid import Grid2D
from .solver import GRFSpec, SolverConfig, _simulate_stack, downsample_field, sample_initial_vorticity

_MAGIC = b"SPSG"
_VERSION = 1
_HEADER = struct.Struct("<4sIIIIIBddd32x")

# trajectories advanced together per solver batch; bounds peak memory
_BATCH = 64


@dataclass(frozen=True)
class DsetMeta:
    n_trajectories: int
    n_snapshots: int
    nx: int
    ny: int
    record_interval: float
    nu: float
    chi: float


def write_dset(path, fields: np.ndarray, record_interval: float, nu: float, chi: float):
    """Write (n_traj, n_snap, nx, ny) float32 fields to a DSET file."""
    if fields.ndim != 4:
        raise DataError(f"expected 4D (traj, snap, nx, ny) array, got shape {fields.shape}")
    n_traj, n_snap, nx, ny = fields.shape
    header = _HEADER.pack(_MAGIC, _VERSION, n_traj, n_snap, nx, ny, 0,
                          record_interval, nu, chi)
    payload = np.ascontiguousarray(fields, dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes())


def read_dset(path):
    """Read a DSET file; returns (fields float32 array, DsetMeta)."""
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise DataError(f"{path}: truncated header")
        magic, version, n_traj, n_snap, nx, ny, dtype_tag, rec, nu, chi = _HEADER.unpack(header)
        if magic != _MAGIC:
            raise DataError(f"{path}: bad magic {magic!r}")
        if version != _VERSION:
            raise DataError(f"{path}: unsupported version {version}")
        if dtype_tag != 0:
            raise DataError(f"{path}: unsupported dtype tag {dtype_tag}")
        count = n_traj * n_snap * nx * ny
        payload = np.frombuffer(fh.read(count * 4), dtype="<f4")
        if payload.size != count:
            raise DataError(f"{path}: truncated payload")
    fields = payload.reshape(n_traj, n_snap, nx, ny).astype(np.float32)
    return fields, DsetMeta(n_traj, n_snap, nx, ny, rec, nu, chi)


def split_counts(n: int, split) -> tuple:
    """80:10:10-style split: floor for val and test, remainder to train."""
    ratios = tuple(float(r) for r in split)
    if len(ratios) != 3 or any(r < 0 for r in ratios):
        raise ConfigError(f"split must be three nonnegative ratios, got {split}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ConfigError(f"split ratios must sum to 1, got {sum(ratios):g}")
    n_val = int(np.floor(n * ratios[1]))
    n_test = int(np.floor(n * ratios[2]))
    return n - n_val - n_test, n_val, n_test


def generate_trajectories(n_trajectories: int, config: SolverConfig, grid: Grid2D,
                          base_seed: int, grf: GRFSpec = GRFSpec(),
                          store_factor: int = 1) -> np.ndarray:
    """Simulate n trajectories (trajectory i seeded base_seed + i) and return
    fields (n_traj, n_snap, nx/f, ny/f) float32, spectrally truncated by
    store_factor. Trajectories are advanced in batches to share transforms."""
    out = []
    for start in range(0, n_trajectories, _BATCH):
        stop = min(start + _BATCH, n_trajectories)
        omega0 = np.stack([
            sample_initial_vorticity(grf, grid, base_seed + i).omega
            for i in range(start, stop)
        ])
        fields = _simulate_stack(omega0, grid, config)  # (n_rec, b, nx, ny)
        fields = np.moveaxis(fields, 0, 1)
        if store_factor != 1:
            fields = downsample_field(fields, store_factor)
        out.append(fields.astype(np.float32))
    return np.concatenate(out, axis=0)


def generate_dataset(n_trajectories: int, config: SolverConfig, grid: Grid2D,
                     base_seed: int, split, out_dir: str,
                     grf: GRFSpec = GRFSpec(), split_seed: int = 0,
                     store_factor: int = 1) -> dict:
    """Generate trajectories, shuffle-split them, and write train/val/test
    DSET files into out_dir. Returns {split_name: path}."""
    n_train, n_val, n_test = split_counts(n_trajectories, split)
    fields = generate_trajectories(n_trajectories, config, grid, base_seed,
                                   grf=grf, store_factor=store_factor)
    perm = np.random.Generator(np.random.PCG64(split_seed)).permutation(n_trajectories)
    parts = {
        "train": perm[:n_train],
        "val": perm[n_train:n_train + n_val],
        "test": perm[n_train + n_val:],
    }
    os.makedirs(out_dir, exist_ok=True)
    paths = {}
    for name, idx in parts.items():
        path = os.path.join(out_dir, f"{name}.dset")
        write_dset(path, fields[np.sort(idx)], config.record_interval, config.nu, config.chi)
        paths[name] = path
    return paths


def load_windows(path, in_frames: int, out_frames: int):
    """Load a DSET file and build (inputs, targets) training windows.

    The window is anchored at the end of each trajectory: the last out_frames
    snapshots are the target, the in_frames before them the input history.
    """
    fields, meta = read_dset(path)
    need = in_frames + out_frames
    if meta.n_snapshots < need:
        raise DataError(
            f"{path}: {meta.n_snapshots} snapshots < in_frames+out_frames = {need}"
        )
    inputs = fields[:, -need:-out_frames]
    targets = fields[:, -out_frames:]
    return np.ascontiguousarray(inputs), np.ascontiguousarray(targets), meta
