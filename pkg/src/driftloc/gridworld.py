"""Discretized 2-D cell workspace: indexing, land mask, neighborhoods, compass geometry.

Cells are numbered 1..N in row-major order starting from the south-west
corner (row 0 = southernmost, col 0 = westernmost).  Row index increases
northward, column index increases eastward; compass N therefore means
"+1 row".  All distances are measured in cell units (index space), not
degrees or meters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import NonAdjacentCellsError


class Direction(IntEnum):
    """Compass observation alphabet: eight headings plus IDLE (no move)."""

    N = 0
    NE = 1
    E = 2
    SE = 3
    S = 4
    SW = 5
    W = 6
    NW = 7
    IDLE = 8

    @property
    def symbol(self) -> str:
        return "I" if self is Direction.IDLE else self.name

    @property
    def step(self) -> tuple[int, int]:
        """(drow, dcol) displacement of one move in this direction."""
        return _DIRECTION_STEPS[self]


_DIRECTION_STEPS = {
    Direction.N: (1, 0),
    Direction.NE: (1, 1),
    Direction.E: (0, 1),
    Direction.SE: (-1, 1),
    Direction.S: (-1, 0),
    Direction.SW: (-1, -1),
    Direction.W: (0, -1),
    Direction.NW: (1, -1),
    Direction.IDLE: (0, 0),
}
_STEP_TO_DIRECTION = {step: d for d, step in _DIRECTION_STEPS.items()}
_SYMBOL_TO_DIRECTION = {d.symbol: d for d in Direction}

N_DIRECTIONS = len(Direction)

# Moore offsets in ascending cell-index order (row-major): used wherever a
# deterministic scan order over a neighborhood is required.
MOORE_OFFSETS = tuple(
    (dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1) if (dr, dc) != (0, 0)
)


def parse_directions(text: str) -> list[Direction]:
    """Parse a whitespace/comma-separated observation string like "N NE I SW".

    Raises ValueError naming the offending token.
    """
    symbols = text.replace(",", " ").split()
    out = []
    for tok in symbols:
        d = _SYMBOL_TO_DIRECTION.get(tok.upper())
        if d is None:
            raise ValueError(f"unknown direction symbol {tok!r}")
        out.append(d)
    return out


def format_directions(directions) -> str:
    """Serialize an observation history as a single space-separated line."""
    return " ".join(Direction(d).symbol for d in directions)


@dataclass(frozen=True, eq=False)
class Workspace:
    """Rectangular cell grid with a land mask.

    ``origin`` is the geographic (lon, lat) of the center of cell (0, 0);
    ``cell_size`` is (dlon, dlat) per cell.  ``land_mask[row, col]`` is True
    for inaccessible (land/littoral) cells.  Immutable after construction.
    """

    rows: int
    cols: int
    origin: tuple[float, float] = (0.0, 0.0)
    cell_size: tuple[float, float] = (1.0, 1.0)
    land_mask: np.ndarray = None  # (rows, cols) bool; default all water

    def __post_init__(self):
        if self.rows < 2 or self.cols < 2:
            raise ValueError(f"grid must be at least 2x2, got {self.rows}x{self.cols}")
        if self.land_mask is None:
            mask = np.zeros((self.rows, self.cols), dtype=bool)
        else:
            mask = np.asarray(self.land_mask, dtype=bool)
            if mask.shape != (self.rows, self.cols):
                raise ValueError(
                    f"land_mask shape {mask.shape} does not match grid "
                    f"{self.rows}x{self.cols}"
                )
        mask = mask.copy()
        mask.setflags(write=False)
        object.__setattr__(self, "land_mask", mask)

        # Free-cell enumeration: water cells in ascending index order get
        # contiguous state indices 0..n_free-1; land cells map to -1.
        water = ~mask.reshape(-1)
        free = np.flatnonzero(water) + 1
        if free.size < 1:
            raise ValueError("workspace has no water cells")
        state_of = np.full(self.rows * self.cols + 1, -1, dtype=np.int64)
        state_of[free] = np.arange(free.size)
        free.setflags(write=False)
        state_of.setflags(write=False)
        object.__setattr__(self, "free_cells", free)
        object.__setattr__(self, "_state_of", state_of)

    # -- indexing -----------------------------------------------------------

    @property
    def n_cells(self) -> int:
        return self.rows * self.cols

    @property
    def n_free(self) -> int:
        return len(self.free_cells)

    def _check(self, z: int) -> int:
        z = int(z)
        if not 1 <= z <= self.n_cells:
            raise IndexError(f"cell index {z} out of range 1..{self.n_cells}")
        return z

    def index(self, row: int, col: int) -> int:
        """Cell index of (row, col), 1-based row-major."""
        if not (0 <= row < self.rows and 0 <= col < self.cols):
            raise IndexError(f"(row, col) = ({row}, {col}) outside grid")
        return row * self.cols + col + 1

    def rowcol(self, z: int) -> tuple[int, int]:
        z = self._check(z)
        return divmod(z - 1, self.cols)

    def center(self, z: int) -> tuple[float, float]:
        """Cell center in continuous grid coordinates (x = col, y = row)."""
        row, col = self.rowcol(z)
        return (float(col), float(row))

    def geographic(self, z: int) -> tuple[float, float]:
        """(lon, lat) of the cell center."""
        row, col = self.rowcol(z)
        return (
            self.origin[0] + col * self.cell_size[0],
            self.origin[1] + row * self.cell_size[1],
        )

    def is_land(self, z: int) -> bool:
        row, col = self.rowcol(z)
        return bool(self.land_mask[row, col])

    def state_of(self, z: int) -> int:
        """Free-cell state index of a water cell (raises on land)."""
        s = int(self._state_of[self._check(z)])
        if s < 0:
            raise ValueError(f"cell {z} is land and has no state index")
        return s

    # -- geometry -----------------------------------------------------------

    def neighbors(self, z: int) -> set[int]:
        """Moore neighborhood of z: in-grid water cells, z itself excluded."""
        row, col = self.rowcol(z)
        out = set()
        for dr, dc in MOORE_OFFSETS:
            r, c = row + dr, col + dc
            if 0 <= r < self.rows and 0 <= c < self.cols and not self.land_mask[r, c]:
                out.add(r * self.cols + c + 1)
        return out


def neighbors(w: Workspace, z: int) -> set[int]:
    return w.neighbors(z)


def direction_between(w: Workspace, z: int, z2: int) -> Direction:
    """Compass direction of the displacement z -> z2 (IDLE iff z2 == z)."""
    r1, c1 = w.rowcol(z)
    r2, c2 = w.rowcol(z2)
    step = (r2 - r1, c2 - c1)
    d = _STEP_TO_DIRECTION.get(step)
    if d is None:
        raise NonAdjacentCellsError(
            f"cells {z} and {z2} are neither equal nor Moore-adjacent"
        )
    return d


def cell_distance(w: Workspace, z: int, z2: int) -> float:
    """Euclidean distance between cell centers, in cell units."""
    r1, c1 = w.rowcol(z)
    r2, c2 = w.rowcol(z2)
    return math.hypot(r2 - r1, c2 - c1)
