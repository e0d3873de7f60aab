"""Finite truncations of random projective systems of simplices.

A tower records a dimension trajectory d_0, d_1, ... (steps of +-1) together
with one affine map per step, pointing *down* the tower: when the dimension
drops the map is the base-face inclusion, and when it rises the map is a
collapse that fixes the base and sends the new top vertex to a stored point
of the base.  Collapse points are drawn from one of three measures:

* ``BARYCENTER_POINT_MASS`` -- the point mass at the barycentre of the base;
* ``UNIFORM_VERTICES``      -- uniform over the base's vertices;
* ``LEBESGUE_FACES``        -- Lebesgue measure on a face of the base, the
  face cycling through base >= next face >= ... >= first vertex on
  successive collapses into the same dimension (see `draw_collapse`).

Distances between barycentric vectors use the halved l1 metric, so two
vertices are at distance exactly 1.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .rng import stream
from .walk import Trajectory

BARYCENTRIC_TOL = 1e-12


class InvalidTrajectoryError(ValueError):
    """The dimension sequence cannot drive a tower (non +-1 steps)."""


class DimensionMismatchError(ValueError):
    """A point or level index does not fit the tower's dimensions."""


class MeasureScheme(enum.Enum):
    BARYCENTER_POINT_MASS = "barycenter"
    UNIFORM_VERTICES = "vertices"
    LEBESGUE_FACES = "faces"


def is_barycentric(vec: np.ndarray, tol: float = BARYCENTRIC_TOL) -> bool:
    vec = np.asarray(vec, dtype=float)
    return vec.ndim == 1 and vec.size >= 1 and bool(
        np.all(vec >= -tol) and abs(float(vec.sum()) - 1.0) <= tol)


def _uniform_on_face(top_vertex: int, length: int, rng: np.random.Generator) -> np.ndarray:
    """Lebesgue-uniform point of conv{e_0, ..., e_top_vertex} inside R^length.

    Sorted-uniform spacings: the gaps of top_vertex sorted uniforms in [0,1]
    are exactly Dirichlet(1, ..., 1), i.e. uniform on the face.
    """
    out = np.zeros(length)
    if top_vertex == 0:
        out[0] = 1.0
        return out
    cuts = np.sort(rng.random(top_vertex))
    out[: top_vertex + 1] = np.diff(np.concatenate(([0.0], cuts, [1.0])))
    return out


def face_top_vertex(n: int, visit_index: int) -> int:
    """Top vertex of the face sampled on the visit_index-th collapse into dimension n.

    The base of that collapse has vertices e_0 .. e_{n-1}; successive visits
    cycle through the faces with top vertex n-1, n-2, ..., 0 and wrap.
    """
    if n < 1:
        raise ValueError("collapses exist only into dimension >= 1")
    if visit_index < 0:
        raise ValueError("visit index must be nonnegative")
    return (n - 1) - (visit_index % n)


def draw_collapse(scheme: MeasureScheme, n: int, visit_index: int,
                  rng: np.random.Generator) -> np.ndarray:
    """Draw the image of the new top vertex for a collapse into dimension n.

    The result is a barycentric point of the base (length n).  For n = 1 the
    base is a single point and every scheme returns (1.0,).  `visit_index`
    only matters for the Lebesgue-faces scheme, which selects the target
    face per `face_top_vertex`; the other schemes still consume their draws
    so streams stay aligned across schemes of the same shape.
    """
    if n < 1:
        raise ValueError("collapses exist only into dimension >= 1")
    if scheme is MeasureScheme.BARYCENTER_POINT_MASS:
        return np.full(n, 1.0 / n)
    if scheme is MeasureScheme.UNIFORM_VERTICES:
        out = np.zeros(n)
        out[int(rng.integers(n))] = 1.0
        return out
    if scheme is MeasureScheme.LEBESGUE_FACES:
        return _uniform_on_face(face_top_vertex(n, visit_index), n, rng)
    raise ValueError(f"unknown scheme {scheme!r}")


@dataclass(frozen=True)
class TowerMap:
    """One step's map, pointing from level i+1 down to level i."""

    kind: str  # "inclusion" | "collapse"
    vector: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("inclusion", "collapse"):
            raise ValueError(f"unknown map kind {self.kind!r}")
        if (self.kind == "collapse") != (self.vector is not None):
            raise ValueError("collapse maps carry a vector, inclusions do not")
        if self.vector is not None and not is_barycentric(np.array(self.vector)):
            raise ValueError("collapse vector must be barycentric")


@dataclass(frozen=True)
class SimplexTower:
    """A truncated projective system: dims[i] is the simplex dimension at level i.

    maps[i] sends level i+1 to level i; it is an inclusion exactly when the
    dimension drops by one and a collapse exactly when it rises by one.
    """

    dims: tuple[int, ...]
    maps: tuple[TowerMap, ...]
    scheme: MeasureScheme | None = None
    seed: int | None = None

    def __post_init__(self):
        if not self.dims:
            raise InvalidTrajectoryError("a tower needs at least one level")
        if len(self.maps) != len(self.dims) - 1:
            raise InvalidTrajectoryError("need exactly one map per step")
        for i, m in enumerate(self.maps):
            lo, hi = self.dims[i], self.dims[i + 1]
            if hi == lo - 1:
                expected = "inclusion"
            elif hi == lo + 1:
                expected = "collapse"
            else:
                raise InvalidTrajectoryError(f"dimension step {lo} -> {hi} is not +-1")
            if m.kind != expected:
                raise InvalidTrajectoryError(f"map {i} should be a {expected}")
            if m.kind == "collapse" and len(m.vector) != lo + 1:
                raise InvalidTrajectoryError(
                    f"collapse vector at step {i} must have length {lo + 1}")

    def __len__(self) -> int:
        return len(self.dims)

    @property
    def top_level(self) -> int:
        return len(self.dims) - 1

    def truncate(self, last_level: int) -> "SimplexTower":
        last_level = min(last_level, self.top_level)
        return SimplexTower(self.dims[: last_level + 1], self.maps[:last_level],
                            self.scheme, self.seed)

    def to_json(self) -> str:
        doc = {
            "dims": list(self.dims),
            "maps": [
                {"kind": m.kind} if m.vector is None
                else {"kind": m.kind, "vector": list(m.vector)}
                for m in self.maps
            ],
            "scheme": self.scheme.value if self.scheme else None,
            "seed": self.seed,
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SimplexTower":
        doc = json.loads(text)
        maps = tuple(
            TowerMap(m["kind"], tuple(m["vector"]) if "vector" in m else None)
            for m in doc["maps"]
        )
        scheme = MeasureScheme(doc["scheme"]) if doc.get("scheme") else None
        return cls(tuple(int(d) for d in doc["dims"]), maps, scheme, doc.get("seed"))


def build_tower(trajectory: Trajectory | Sequence[int], scheme: MeasureScheme,
                seed: int) -> SimplexTower:
    """Assemble the tower driven by a +-1 dimension trajectory.

    Collapse draws come from the stream keyed by (seed, 0), consumed in
    trajectory order; each dimension keeps its own visit counter for the
    faces schedule, so the tower is a pure function of its arguments.
    """
    dims = tuple(trajectory.states) if isinstance(trajectory, Trajectory) else tuple(trajectory)
    if not dims:
        raise InvalidTrajectoryError("empty trajectory")
    for a, b in zip(dims, dims[1:]):
        if abs(a - b) != 1:
            raise InvalidTrajectoryError(f"dimension step {a} -> {b} is not +-1")
    rng = stream(seed)
    visits: dict[int, int] = {}
    maps = []
    for a, b in zip(dims, dims[1:]):
        if b == a - 1:
            maps.append(TowerMap("inclusion"))
        else:
            c = visits.get(b, 0)
            visits[b] = c + 1
            vec = draw_collapse(scheme, b, c, rng)
            maps.append(TowerMap("collapse", tuple(float(x) for x in vec)))
    return SimplexTower(dims, tuple(maps), scheme, seed)


def _apply_map(m: TowerMap, points: np.ndarray) -> np.ndarray:
    """Apply a tower map to a batch of barycentric row vectors."""
    if m.kind == "inclusion":
        return np.hstack([points, np.zeros((points.shape[0], 1))])
    vec = np.asarray(m.vector)
    return points[:, :-1] + np.outer(points[:, -1], vec)


def pushdown(tower: SimplexTower, level_j: int, point: np.ndarray, level_m: int) -> np.ndarray:
    """Image of a level-j point at level m <= j under the composed tower maps."""
    if not (0 <= level_m <= level_j <= tower.top_level):
        raise DimensionMismatchError(
            f"need 0 <= m <= j <= {tower.top_level}, got m={level_m}, j={level_j}")
    point = np.asarray(point, dtype=float)
    if point.shape != (tower.dims[level_j] + 1,):
        raise DimensionMismatchError(
            f"point has {point.shape} coordinates, level {level_j} needs "
            f"{tower.dims[level_j] + 1}")
    if not is_barycentric(point, tol=1e-9):
        raise DimensionMismatchError("point is not barycentric")
    rows = point[None, :]
    for lev in range(level_j, level_m, -1):
        rows = _apply_map(tower.maps[lev - 1], rows)
    return rows[0]


def barycentric_distance(x: np.ndarray, y: np.ndarray) -> float:
    """Halved l1 distance; vertex-to-vertex distance is 1."""
    return 0.5 * float(np.abs(np.asarray(x) - np.asarray(y)).sum())


def barycentric_grid(dim: int, resolution: int = 8) -> np.ndarray:
    """All barycentric vectors on Delta_dim with coordinates in multiples of 1/resolution."""
    count = _grid_size(dim, resolution)
    if count > 500_000:
        raise ValueError(f"grid with {count} points is too large; use a lower level")
    pts = []
    # compositions of `resolution` into dim+1 parts via stars and bars
    for bars in combinations(range(resolution + dim), dim):
        prev = -1
        comp = []
        for b in bars:
            comp.append(b - prev - 1)
            prev = b
        comp.append(resolution + dim - prev - 1)
        pts.append(comp)
    return np.array(pts, dtype=float) / resolution


def _grid_size(dim: int, resolution: int) -> int:
    from math import comb

    return comb(resolution + dim, dim)


def top_vertex_images(tower: SimplexTower, level_m: int) -> np.ndarray:
    """Images at level m of the top vertices of every level above m.

    Processed incrementally from the top of the tower down, so the whole
    sweep is one map application per level on a growing batch.
    """
    if not (0 <= level_m <= tower.top_level):
        raise DimensionMismatchError(f"level {level_m} outside the tower")
    batch = np.zeros((0, tower.dims[tower.top_level] + 1))
    for lev in range(tower.top_level, level_m, -1):
        top = np.zeros((1, tower.dims[lev] + 1))
        top[0, -1] = 1.0
        batch = np.vstack([batch, top])
        batch = _apply_map(tower.maps[lev - 1], batch)
    return batch


def covering_radius(tower: SimplexTower, level_m: int, *, resolution: int = 8) -> float:
    """How far the 1/8-grid of the level-m simplex can be from the pushed-down set.

    The point set is the top-vertex images of all levels above m; when there
    are none (m is the top level) the vertex set of the level-m simplex is
    used instead, making the value the covering radius of the bare simplex.
    """
    dim = tower.dims[level_m]
    pts = top_vertex_images(tower, level_m)
    if pts.shape[0] == 0:
        pts = np.eye(dim + 1)
    grid = barycentric_grid(dim, resolution)
    radius = 0.0
    chunk = 4096
    for lo in range(0, grid.shape[0], chunk):
        block = grid[lo: lo + chunk]
        dists = 0.5 * np.abs(block[:, None, :] - pts[None, :, :]).sum(axis=2)
        radius = max(radius, float(dists.min(axis=1).max()))
    return radius
