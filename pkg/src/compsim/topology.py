"""Cell layouts and user drops.

Cells form a flat-top hexagonal grid built in full rings around a center
cell (19 cells = 2 rings).  An SA layout places one macro BS at each cell
center; an NSA layout adds a ring of small BSs at a fixed distance from
the macro.  Users are dropped uniformly at random inside each cell's
hexagon.  Construction is deterministic given the seed and the resulting
Topology is immutable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ConfigurationError, ScenarioConfig

SQRT3 = np.sqrt(3.0)

# Distances below this floor are clamped before the path-loss formula,
# which is singular at d = 0.
MIN_LINK_DISTANCE_M = 1.0


@dataclass(frozen=True)
class BaseStation:
    bs_id: int
    kind: str  # "macro" | "small"
    position: tuple[float, float]
    max_power_w: float


@dataclass(frozen=True)
class CellSite:
    id: int
    position: tuple[float, float]
    bs_list: tuple[BaseStation, ...]


@dataclass(frozen=True)
class UserSite:
    id: int
    position: tuple[float, float]
    home_cell: int


@dataclass(frozen=True)
class Topology:
    cells: tuple[CellSite, ...]
    users: tuple[UserSite, ...]
    cell_radius: float
    seed: int

    @property
    def base_stations(self) -> tuple[BaseStation, ...]:
        return tuple(bs for cell in self.cells for bs in cell.bs_list)

    @property
    def n_bs(self) -> int:
        return sum(len(cell.bs_list) for cell in self.cells)

    @property
    def n_users(self) -> int:
        return len(self.users)

    def bs_positions(self) -> np.ndarray:
        """[n_bs, 2] array ordered by bs_id."""
        return np.array([bs.position for bs in self.base_stations])

    def bs_max_power(self) -> np.ndarray:
        return np.array([bs.max_power_w for bs in self.base_stations])

    def user_positions(self) -> np.ndarray:
        """[n_users, 2] array ordered by user id."""
        return np.array([u.position for u in self.users])

    def user_home_cells(self) -> np.ndarray:
        return np.array([u.home_cell for u in self.users], dtype=int)


def hex_centers(n_rings: int, cell_radius: float) -> np.ndarray:
    """Centers of a flat-top hex grid with `n_rings` full rings around the origin.

    Adjacent centers are sqrt(3) * cell_radius apart (cell_radius is the
    hexagon circumradius).  Cells are ordered by ring, then by axial
    coordinates within the ring, so ids are stable across runs.
    """
    coords = []
    for q in range(-n_rings, n_rings + 1):
        for r in range(-n_rings, n_rings + 1):
            s = -q - r
            ring = max(abs(q), abs(r), abs(s))
            if ring <= n_rings:
                coords.append((ring, q, r))
    coords.sort()
    centers = np.empty((len(coords), 2))
    for i, (_, q, r) in enumerate(coords):
        centers[i, 0] = cell_radius * 1.5 * q
        centers[i, 1] = cell_radius * SQRT3 * (r + q / 2.0)
    return centers


def point_in_hexagon(x: float, y: float, radius: float) -> bool:
    """True if (x, y) lies inside a flat-top hexagon of circumradius `radius`
    centered at the origin (boundary counts as inside)."""
    ax, ay = abs(x), abs(y)
    return ay <= SQRT3 / 2.0 * radius + 1e-12 and SQRT3 * ax + ay <= SQRT3 * radius + 1e-12


def _sample_in_hexagon(rng: np.random.Generator, radius: float) -> tuple[float, float]:
    # rejection from the bounding box; acceptance rate 3*sqrt(3)/8 ~ 0.65
    while True:
        x = rng.uniform(-radius, radius)
        y = rng.uniform(-SQRT3 / 2.0 * radius, SQRT3 / 2.0 * radius)
        if SQRT3 * abs(x) + abs(y) <= SQRT3 * radius:
            return x, y


def build_topology(config: ScenarioConfig) -> Topology:
    """Build a seeded cell layout with BSs and uniformly dropped users."""
    if not 50.0 <= config.cell_radius_m <= 500.0:
        raise ConfigurationError(
            f"cell_radius_m must lie in [50, 500], got {config.cell_radius_m}"
        )
    if config.users_per_cell < 1:
        raise ConfigurationError(
            f"users_per_cell must be >= 1, got {config.users_per_cell}"
        )

    radius = float(config.cell_radius_m)
    centers = hex_centers(config.n_rings, radius)
    p_max = config.max_power_w

    cells = []
    bs_id = 0
    for cell_id, (cx, cy) in enumerate(centers):
        bs_list = [BaseStation(bs_id, "macro", (float(cx), float(cy)), p_max)]
        bs_id += 1
        if config.deployment == "nsa":
            k = config.small_bs_per_cell
            for i in range(k):
                angle = 2.0 * np.pi * i / k
                sx = cx + config.macro_small_distance_m * np.cos(angle)
                sy = cy + config.macro_small_distance_m * np.sin(angle)
                bs_list.append(BaseStation(bs_id, "small", (float(sx), float(sy)), p_max))
                bs_id += 1
        cells.append(CellSite(cell_id, (float(cx), float(cy)), tuple(bs_list)))

    rng = np.random.default_rng(config.seed)
    users = []
    user_id = 0
    for cell in cells:
        cx, cy = cell.position
        for _ in range(config.users_per_cell):
            x, y = _sample_in_hexagon(rng, radius)
            users.append(UserSite(user_id, (float(cx + x), float(cy + y)), cell.id))
            user_id += 1

    return Topology(tuple(cells), tuple(users), radius, int(config.seed))
