"""Link budget: path loss, linear power gains, RSRP, and per-PRB noise.

The channel is deterministic given positions: the budget consists of the
distance-based path loss 148.1 + 37.6*log10(d_km) and a flat antenna gain
applied once per link on the transmit side.  No shadowing or fast fading.
Noise is computed over the per-PRB bandwidth B/R since scheduling and SINR
are per-PRB.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .topology import MIN_LINK_DISTANCE_M, Topology

PATH_LOSS_INTERCEPT_DB = 148.1
PATH_LOSS_SLOPE_DB = 37.6


@dataclass(frozen=True)
class ChannelState:
    """Immutable per-drop channel:  gain and RSRP are [n_bs, n_users]."""

    gain: np.ndarray  # linear power gain, dimensionless
    rsrp: np.ndarray  # received power in watts at max transmit power
    noise_power: float  # watts per PRB
    bandwidth_hz: float
    n_prb: int

    @property
    def n_bs(self) -> int:
        return self.gain.shape[0]

    @property
    def n_users(self) -> int:
        return self.gain.shape[1]


def path_loss_db(d):
    """Path loss in dB for a link distance d in meters (d >= 1 m)."""
    d = np.asarray(d, dtype=float)
    if np.any(d < MIN_LINK_DISTANCE_M):
        raise ValueError(f"link distance must be >= {MIN_LINK_DISTANCE_M} m, got {d}")
    return PATH_LOSS_INTERCEPT_DB + PATH_LOSS_SLOPE_DB * np.log10(d / 1000.0)


def noise_power_w(bandwidth_hz: float, n_prb: int, noise_psd_dbm_hz: float = -174.0) -> float:
    """Thermal noise in watts over one PRB of width bandwidth_hz / n_prb."""
    noise_dbm = noise_psd_dbm_hz + 10.0 * np.log10(bandwidth_hz / n_prb)
    return float(10.0 ** (noise_dbm / 10.0) / 1000.0)


def compute_channel(
    topology: Topology,
    antenna_gain_db: float = 5.0,
    bandwidth_hz: float = 3e6,
    n_prb: int = 15,
    noise_psd_dbm_hz: float = -174.0,
) -> ChannelState:
    """Linear gains and RSRP for every BS-user link of the topology."""
    bs_pos = topology.bs_positions()
    user_pos = topology.user_positions()
    diff = bs_pos[:, None, :] - user_pos[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=2))
    dist = np.maximum(dist, MIN_LINK_DISTANCE_M)

    gain_db = -path_loss_db(dist) + antenna_gain_db
    gain = 10.0 ** (gain_db / 10.0)
    rsrp = topology.bs_max_power()[:, None] * gain
    return ChannelState(
        gain=gain,
        rsrp=rsrp,
        noise_power=noise_power_w(bandwidth_hz, n_prb, noise_psd_dbm_hz),
        bandwidth_hz=float(bandwidth_hz),
        n_prb=int(n_prb),
    )
