import numpy as np

from compsim.topology import BaseStation, CellSite, Topology, UserSite

P_MAX_43_DBM = 10 ** (43.0 / 10.0) / 1000.0


def synthetic_topology(bs_positions, user_positions, cell_radius=100.0,
                       p_max=P_MAX_43_DBM):
    """Hand-placed BSs and users for unit tests; one synthetic cell per BS,
    users homed to the nearest BS's cell."""
    cells = []
    for i, (x, y) in enumerate(bs_positions):
        bs = BaseStation(i, "macro", (float(x), float(y)), p_max)
        cells.append(CellSite(i, (float(x), float(y)), (bs,)))
    bs_arr = np.asarray(bs_positions, dtype=float)
    users = []
    for j, (x, y) in enumerate(user_positions):
        home = int(np.argmin(np.hypot(bs_arr[:, 0] - x, bs_arr[:, 1] - y)))
        users.append(UserSite(j, (float(x), float(y)), home))
    return Topology(tuple(cells), tuple(users), float(cell_radius), seed=0)
