"""Far-field radiation pattern of the prepared ensemble.

Two views of the emitted field: the retarded spherical-wave intensity of
a single decaying emitter, and the Monte-Carlo structure factor of the
whole cloud, i.e. the normalized squared coherent sum of the per-atom
phases ``(z_hat - n_hat) . r_j + phi(r_j)`` over sampled atom positions.
The structure factor measures directionality: it is 1 in the
phase-matched forward direction for a uniform stored phase and falls off
with the Gaussian form factor of the density.

Far-field linearization is used throughout the ensemble part (phase
``n_hat . r_j``, common ``1/r`` amplitude); the single-emitter intensity
keeps the exact retardation.  The envelope is evaluated at the common
retarded time: the cloud transit time is negligible against the decay
time for the cloud sizes of interest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensemble_model import CloudGeometry, PhaseProfile, phase_at_points, sample_positions
from .emission_dynamics import AmplitudeTrajectory

__all__ = [
    "DirectionGrid",
    "direction_grid",
    "single_atom_intensity",
    "structure_factor",
]


@dataclass(frozen=True)
class DirectionGrid:
    """Angular grid with per-direction intensity (and its MC standard error).

    ``intensity[i, j]`` belongs to ``(theta_values[i], phi_values[j])``.
    When the grid contains the forward direction ``theta = 0``, the
    matrix is normalized to the (nonzero) forward value, which is kept
    in ``forward_value``.
    """

    theta_values: np.ndarray
    phi_values: np.ndarray
    intensity: np.ndarray | None = None
    stderr: np.ndarray | None = None
    forward_value: float | None = None

    def __post_init__(self):
        th = np.asarray(self.theta_values, dtype=float)
        ph = np.asarray(self.phi_values, dtype=float)
        if th.ndim != 1 or ph.ndim != 1 or th.size == 0 or ph.size == 0:
            raise ValueError("direction axes must be non-empty 1-d arrays")
        th.setflags(write=False)
        ph.setflags(write=False)
        object.__setattr__(self, "theta_values", th)
        object.__setattr__(self, "phi_values", ph)
        if self.intensity is not None:
            inten = np.asarray(self.intensity, dtype=float)
            if inten.shape != (th.size, ph.size):
                raise ValueError("intensity matrix must be (n_theta, n_phi)")
            if np.any(inten < 0.0):
                raise ValueError("intensity must be non-negative")
            inten.setflags(write=False)
            object.__setattr__(self, "intensity", inten)


def direction_grid(theta_values, phi_values) -> DirectionGrid:
    """Template grid (no intensity yet) for :func:`structure_factor`."""
    return DirectionGrid(theta_values, phi_values)


def single_atom_intensity(r_bar: float, t, trajectory: AmplitudeTrajectory):
    """Spherical-wave intensity of one emitter, in photon-energy x decay-rate units.

    ``I = (1 / 4 pi r^2) * (1/2) * |b(t - r)|^2`` with the retarded time
    in the natural units where the propagation speed is 1; causally zero
    before the wavefront arrives.  ``t`` may be an array.
    """
    if r_bar <= 0.0:
        raise ValueError(f"r_bar must be positive, got {r_bar!r}")
    t = np.asarray(t, dtype=float)
    t_ret = t - r_bar
    b_sq = np.interp(t_ret, trajectory.times, np.abs(trajectory.b_values) ** 2)
    out = np.where(t_ret < 0.0, 0.0, b_sq / (8.0 * np.pi * r_bar * r_bar))
    return out if out.ndim else float(out)


def structure_factor(
    cloud: CloudGeometry,
    profile: PhaseProfile,
    count: int,
    seed: int,
    directions: DirectionGrid,
) -> DirectionGrid:
    """Monte-Carlo coherent emission pattern over a direction grid.

    ``S(n_hat) = |mean_j exp(i [(z_hat - n_hat) . r_j + phi(r_j)])|^2``
    over ``count`` atoms sampled from the cloud density.  Determinstic
    for a fixed seed.  The per-direction standard error of ``S`` is
    estimated from the sample variances of the phasor components
    (delta method) and returned alongside.
    """
    positions = sample_positions(cloud, count, seed)
    spin_phase = phase_at_points(profile, positions)

    thetas = directions.theta_values
    phis = directions.phi_values
    n_th, n_ph = thetas.size, phis.size
    intensity = np.empty((n_th, n_ph))
    stderr = np.empty((n_th, n_ph))

    # q = z_hat - n_hat for every direction
    sin_t, cos_t = np.sin(thetas), np.cos(thetas)
    q = np.empty((n_th, n_ph, 3))
    q[..., 0] = -sin_t[:, None] * np.cos(phis)[None, :]
    q[..., 1] = -sin_t[:, None] * np.sin(phis)[None, :]
    q[..., 2] = (1.0 - cos_t)[:, None]
    q_flat = q.reshape(-1, 3)

    m = float(count)
    chunk = max(1, int(2_000_000 // max(count, 1)))
    for start in range(0, q_flat.shape[0], chunk):
        block = q_flat[start:start + chunk]
        phases = positions @ block.T + spin_phase[:, None]
        cos_p = np.cos(phases)
        sin_p = np.sin(phases)
        mr = cos_p.mean(axis=0)
        mi = sin_p.mean(axis=0)
        s_val = mr * mr + mi * mi
        var_r = cos_p.var(axis=0) / m
        var_i = sin_p.var(axis=0) / m
        cov = ((cos_p * sin_p).mean(axis=0) - mr * mi) / m
        var_s = 4.0 * (mr * mr * var_r + 2.0 * mr * mi * cov + mi * mi * var_i)
        idx = np.arange(start, start + block.shape[0])
        intensity.flat[idx] = s_val
        stderr.flat[idx] = np.sqrt(np.maximum(var_s, 0.0))

    forward = None
    forward_rows = np.nonzero(thetas == 0.0)[0]
    if forward_rows.size:
        forward = float(intensity[forward_rows[0], 0])
        if forward > 0.0:
            intensity = intensity / forward
            stderr = stderr / forward

    return DirectionGrid(
        theta_values=thetas,
        phi_values=phis,
        intensity=intensity,
        stderr=stderr,
        forward_value=forward,
    )
