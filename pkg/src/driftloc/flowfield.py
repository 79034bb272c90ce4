"""Per-cell current velocities and the deterministic Euler flow-line cell map.

Velocities are expressed in cell units per unit time (u eastward along
columns, v northward along rows).  A single Euler step of length ``dt``
advects a cell center to a continuous endpoint; the deterministic image of
the cell is the nearest admissible cell to that endpoint, where admissible
means the cell itself or one of its in-grid water Moore neighbors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LandCellError
from .gridworld import Workspace


@dataclass(frozen=True, eq=False)
class VectorField:
    """Horizontal velocity samples at every cell center of a workspace.

    Land-cell entries are forced to zero; water-cell entries must be finite.
    """

    workspace: Workspace
    u: np.ndarray  # (rows, cols) eastward, cell-widths per unit time
    v: np.ndarray  # (rows, cols) northward, cell-heights per unit time

    def __post_init__(self):
        w = self.workspace
        u = np.asarray(self.u, dtype=np.float64)
        v = np.asarray(self.v, dtype=np.float64)
        if u.shape != (w.rows, w.cols) or v.shape != (w.rows, w.cols):
            raise ValueError(
                f"field shape {u.shape}/{v.shape} does not match grid "
                f"{w.rows}x{w.cols}"
            )
        water = ~w.land_mask
        if not (np.isfinite(u[water]).all() and np.isfinite(v[water]).all()):
            raise ValueError("non-finite velocity on a water cell")
        u = np.where(water, u, 0.0)
        v = np.where(water, v, 0.0)
        u.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    def speed(self) -> np.ndarray:
        return np.hypot(self.u, self.v)

    def max_speed(self) -> float:
        water = ~self.workspace.land_mask
        if not water.any():
            return 0.0
        return float(self.speed()[water].max())


def default_dt(field: VectorField) -> float:
    """Time for the fastest current in the field to traverse one cell.

    With this step no Euler endpoint lies more than one cell away from its
    origin.  Falls back to 1.0 for an everywhere-zero field.
    """
    vmax = field.max_speed()
    return 1.0 / vmax if vmax > 0.0 else 1.0


def euler_endpoint(field: VectorField, z: int, dt: float) -> tuple[float, float]:
    """Continuous endpoint (x, y) = center(z) + dt * F(z), grid coordinates."""
    w = field.workspace
    row, col = w.rowcol(z)
    if w.land_mask[row, col]:
        raise LandCellError(f"cell {z} is land; the field is undefined there")
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    return (col + dt * float(field.u[row, col]), row + dt * float(field.v[row, col]))


def _admissible(w: Workspace, z: int) -> list[int]:
    """{z} union water Moore neighbors, ascending cell index."""
    return sorted(w.neighbors(z) | {z})


def _nearest_admissible(w: Workspace, z: int, endpoint: tuple[float, float]) -> int:
    """Nearest admissible cell to the endpoint; ties break to smallest index."""
    ex, ey = endpoint
    best = None
    best_d = None
    for cand in _admissible(w, z):
        r, c = w.rowcol(cand)
        d = (c - ex) ** 2 + (r - ey) ** 2
        if best_d is None or d < best_d:
            best, best_d = cand, d
    return best


def mapped_cell(field: VectorField, z: int, dt: float) -> int:
    """Deterministic image of z: nearest admissible cell to the Euler endpoint."""
    return _nearest_admissible(field.workspace, z, euler_endpoint(field, z, dt))


@dataclass(frozen=True, eq=False)
class CellMap:
    """Deterministic Euler image of every water cell, plus the raw endpoints.

    ``images[s]`` is the image cell index of the water cell with state index
    s; ``endpoints[s]`` is the continuous Euler endpoint (x, y) it was
    derived from.  The endpoints are retained because the stochastic mapping
    spreads probability around them.
    """

    workspace: Workspace
    dt: float
    images: np.ndarray  # (n_free,) int64, cell indices
    endpoints: np.ndarray  # (n_free, 2) float64, (x, y)

    def image_of(self, z: int) -> int:
        return int(self.images[self.workspace.state_of(z)])


def build_cell_map(field: VectorField, dt: float | None = None) -> CellMap:
    """Euler-map every water cell; dt defaults to one cell at peak speed."""
    w = field.workspace
    if dt is None:
        dt = default_dt(field)
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")

    free = w.free_cells
    rows = (free - 1) // w.cols
    cols = (free - 1) % w.cols
    ex = cols + dt * field.u[rows, cols]
    ey = rows + dt * field.v[rows, cols]
    endpoints = np.column_stack([ex, ey])

    images = np.empty(len(free), dtype=np.int64)
    for s, z in enumerate(free):
        images[s] = _nearest_admissible(w, int(z), (ex[s], ey[s]))

    images.setflags(write=False)
    endpoints.setflags(write=False)
    return CellMap(workspace=w, dt=float(dt), images=images, endpoints=endpoints)
