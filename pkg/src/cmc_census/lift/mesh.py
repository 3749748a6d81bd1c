import abc
import cmath
import logging
import math
import time
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, cast

import h5py
import numpy as np
from tqdm import tqdm

import cmc_census
from cmc_census.lift.core import (
    LiftData,
    PathError,
    Tolerances,
    immerse,
    integrate_lift,
)
from cmc_census.lift.paths import Arc, Line, PathSegment

LOGGER = logging.getLogger(__name__)


class Domain(abc.ABC):
    """A parametrized region of the complex plane with a grid on it."""

    @abc.abstractmethod
    def grid(self, resolution: int) -> np.ndarray:
        """Grid points, shape `(rows, columns)`; row 0 is the spine of the tree."""
        pass

    @abc.abstractmethod
    def column_edge(self, a: complex, b: complex) -> PathSegment:
        """The path between consecutive points of a column."""
        pass

    @abc.abstractmethod
    def contains(self, p: complex) -> bool:
        """Whether `p` lies in the closed domain."""
        pass

    def spine_edge(self, a: complex, b: complex) -> PathSegment:
        """The path between consecutive points of row 0."""
        return Line(a, b)


@dataclass(frozen=True)
class Rectangle(Domain):
    """The rectangle `[x0, x1] x [y0, y1]`."""

    x0: float = -1.0
    x1: float = 1.0
    y0: float = -1.0
    y1: float = 1.0

    def __post_init__(self) -> None:
        """Validate the corners.

        :raises ValueError: When the rectangle is empty.
        """
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError(f"Empty rectangle {self}.")

    def grid(self, resolution: int) -> np.ndarray:
        """Grid points `x + iy`, rows along `y`."""
        x = np.linspace(self.x0, self.x1, resolution + 1)
        y = np.linspace(self.y0, self.y1, resolution + 1)
        return x[None, :] + 1j * y[:, None]

    def column_edge(self, a: complex, b: complex) -> PathSegment:
        """Vertical segment."""
        return Line(a, b)

    def contains(self, p: complex) -> bool:
        """Whether `p` lies in the closed rectangle."""
        return self.x0 <= p.real <= self.x1 and self.y0 <= p.imag <= self.y1


@dataclass(frozen=True)
class Annulus(Domain):
    """The annulus `r_inner <= |z - center| <= r_outer`, cut along one ray.

    The grid runs from the cut at `cut_angle` counterclockwise to the cut again,
    so the first and the last column lie on the two sides of the cut.
    """

    center: complex = 0j
    r_inner: float = 0.5
    r_outer: float = 1.0
    cut_angle: float | None = 0.0

    def __post_init__(self) -> None:
        """Validate the radii and the cut.

        :raises ValueError: When the radii are not `0 < r_inner < r_outer` or the
            annulus has no cut.
        """
        if not 0 < self.r_inner < self.r_outer:
            raise ValueError(f"Expected 0 < r_inner < r_outer, got {self}.")
        if self.cut_angle is None:
            raise ValueError("An annulus is not simply connected; give a cut angle.")

    def grid(self, resolution: int) -> np.ndarray:
        """Grid points, rows along the angle, columns along the radius."""
        assert self.cut_angle is not None
        radii = np.linspace(self.r_inner, self.r_outer, resolution + 1)
        angles = self.cut_angle + np.linspace(0, 2 * math.pi, 4 * resolution + 1)
        return self.center + radii[None, :] * np.exp(1j * angles)[:, None]

    def column_edge(self, a: complex, b: complex) -> PathSegment:
        """Arc of the circle through `a`."""
        radius = abs(a - self.center)
        start = cmath.phase(a - self.center)
        sweep = (cmath.phase(b - self.center) - start) % (2 * math.pi)
        return Arc(self.center, radius, start, sweep)

    def spine_edge(self, a: complex, b: complex) -> PathSegment:
        """Radial segment."""
        return Line(a, b)

    def contains(self, p: complex) -> bool:
        """Whether `p` lies in the closed annulus."""
        return self.r_inner <= abs(p - self.center) <= self.r_outer


@dataclass
class Mesh:
    """A triangulated surface in the Poincare ball."""

    vertices: np.ndarray
    faces: np.ndarray
    attributes: dict[str, np.ndarray] = field(default_factory=dict)
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        """Check the shapes.

        :raises ValueError: When a vertex is not inside the unit ball.
        """
        assert self.vertices.ndim == 2 and self.vertices.shape[1] == 3
        assert self.faces.ndim == 2 and self.faces.shape[1] == 3
        if len(self.vertices) and np.max(np.linalg.norm(self.vertices, axis=1)) >= 1:
            raise ValueError("Mesh vertices must lie in the open unit ball.")

    def to_obj(self) -> str:
        """Wavefront OBJ text (1-based face indices)."""
        lines = [f"# cmc_census {cmc_census.__version__}"]
        lines += [f"v {x:.17g} {y:.17g} {z:.17g}" for x, y, z in self.vertices]
        lines += [f"f {i + 1} {j + 1} {k + 1}" for i, j, k in self.faces]
        return "\n".join(lines) + "\n"

    def save(self, path: Path) -> None:
        """Write an OBJ file or an HDF5 archive, chosen by the suffix.

        :param path: A `.obj`, `.h5` or `.hdf5` file.
        :raises ValueError: When the suffix is not supported.
        """
        suffix = path.suffix.lower()
        if suffix == ".obj":
            path.write_text(self.to_obj(), encoding="utf-8")
        elif suffix in (".h5", ".hdf5"):
            with h5py.File(path, "w") as fp:
                fp.attrs["cmc_census_version"] = cmc_census.__version__
                fp.create_dataset("vertices", data=self.vertices)
                fp.create_dataset("faces", data=self.faces)
                group = fp.create_group("attributes")
                for name, values in self.attributes.items():
                    group.create_dataset(name, data=values)
                fp.create_group("metadata").attrs.update(
                    {k: v for k, v in self.metadata.items() if v is not None}
                )
        else:
            raise ValueError(f"Unsupported mesh format {suffix!r}.")
        LOGGER.info("saved mesh with %s vertices to %s", len(self.vertices), path)

    @classmethod
    def load(cls, path: Path) -> "Mesh":
        """Read an HDF5 archive written by `save`.

        :param path: The archive.
        :raises ValueError: When the file is not an HDF5 archive.
        :return: The mesh.
        """
        if path.suffix.lower() not in (".h5", ".hdf5"):
            raise ValueError(f"Only HDF5 meshes can be loaded, got {path}.")
        with h5py.File(path, "r") as fp:
            vertices = np.asarray(fp["vertices"])
            faces = np.asarray(fp["faces"])
            group = cast(h5py.Group, fp["attributes"])
            attributes = {name: np.asarray(group[name]) for name in group}
            metadata = dict(fp["metadata"].attrs) if "metadata" in fp else {}
            LOGGER.debug(
                "loaded mesh written by version %s", fp.attrs.get("cmc_census_version")
            )
        return cls(vertices, faces, attributes, metadata)


def _faces(rows: int, columns: int) -> np.ndarray:
    """Two counterclockwise triangles per grid cell."""
    faces = []
    for i in range(rows - 1):
        for j in range(columns - 1):
            a, b = i * columns + j, i * columns + j + 1
            c, d = (i + 1) * columns + j + 1, (i + 1) * columns + j
            faces += [(a, b, c), (a, c, d)]
    return np.array(faces, dtype=np.int64)


def _check_domain(data: LiftData, domain: Domain) -> None:
    for p in data.singular_points:
        if domain.contains(p):
            raise PathError(f"The domain contains the singular point {p}.")


def lift_grid(
    G: Any,
    Q_density: Any,
    domain: Domain,
    resolution: int = 16,
    F0: np.ndarray | None = None,
    ends: Any = (),
    tolerances: Tolerances = Tolerances(),
    threads: int = 1,
    show_progress: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate the lift over a comb spanning tree of the domain grid.

    The lift is continued along row 0 (the spine) from `F0` at its first point, and
    from every spine point along its column.

    :param G: The hyperbolic Gauss map, or `LiftData`.
    :param Q_density: The density of `Q`.
    :param domain: The domain.
    :param resolution: Number of grid cells along the short side.
    :param F0: The lift at the first grid point (identity by default).
    :param ends: The ends of the surface.
    :param tolerances: Numerical tolerances.
    :param threads: Number of columns integrated concurrently.
    :param show_progress: Show a progress bar over the columns.
    :raises ValueError: When the resolution is not positive.
    :raises PathError: When the domain contains or nearly touches a singular point.
    :return: The grid points and the lift there, shape `(rows, columns, 2, 2)`.
    """
    if resolution < 1:
        raise ValueError(f"Resolution must be positive, got {resolution}.")
    data = LiftData.coerce(G, Q_density, ends)
    points = domain.grid(resolution)
    _check_domain(data, domain)
    rows, columns = points.shape
    F = np.empty((rows, columns, 2, 2), dtype=complex)
    F[0, 0] = np.eye(2) if F0 is None else np.asarray(F0, dtype=complex)

    def step(segment: PathSegment, start: np.ndarray) -> np.ndarray:
        return integrate_lift(data, path=segment, F0=start, tolerances=tolerances).F

    for j in range(1, columns):
        F[0, j] = step(domain.spine_edge(points[0, j - 1], points[0, j]), F[0, j - 1])

    def column(j: int) -> np.ndarray:
        values = [F[0, j]]
        for i in range(1, rows):
            edge = domain.column_edge(points[i - 1, j], points[i, j])
            values.append(step(edge, values[-1]))
        return np.array(values)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        results = executor.map(column, range(columns))
        for j, values in enumerate(
            tqdm(results, total=columns, disable=not show_progress)
        ):
            F[:, j] = values
    return points, F


def seam_mismatch(F: np.ndarray) -> float:
    """Largest distance between the lift on both sides of an annulus cut.

    The sign of `F` does not change the immersion, so `min(|A - B|, |A + B|)` is
    taken per grid point.
    """
    first, last = F[0], F[-1]
    plus = np.linalg.norm(last - first, axis=(1, 2))
    minus = np.linalg.norm(last + first, axis=(1, 2))
    return float(np.max(np.minimum(plus, minus)))


def _build(
    G: Any,
    Q_density: Any,
    domain: Domain,
    resolution: int,
    F0: np.ndarray | None,
    ends: Any,
    tolerances: Tolerances,
    dual: bool,
    threads: int,
    show_progress: bool,
) -> Mesh:
    t0 = time.perf_counter()
    data = LiftData.coerce(G, Q_density, ends)
    points, F = lift_grid(
        data, None, domain, resolution, F0, ends, tolerances, threads, show_progress
    )
    rows, columns = points.shape
    flat = F.reshape(-1, 2, 2)
    if dual:
        flat = np.linalg.inv(flat)
    vertices = np.array([immerse(m) for m in flat])
    z = points.ravel()
    attributes = {
        "abs_G": np.abs(np.array([data.G_value(complex(p)) for p in z])),
        "domain_x": z.real,
        "domain_y": z.imag,
    }
    metadata: dict[str, Any] = {
        "domain": repr(domain),
        "resolution": resolution,
        "dual": dual,
        "seam_mismatch": seam_mismatch(F) if isinstance(domain, Annulus) else None,
    }
    LOGGER.info(
        "meshed %s vertices in %s seconds", len(vertices), time.perf_counter() - t0
    )
    return Mesh(vertices, _faces(rows, columns), attributes, metadata)


def mesh(
    G: Any,
    Q_density: Any = None,
    domain: Domain = Rectangle(),
    resolution: int = 16,
    F0: np.ndarray | None = None,
    ends: Any = (),
    tolerances: Tolerances = Tolerances(),
    threads: int = 1,
    show_progress: bool = False,
) -> Mesh:
    """Mesh the surface `f = F F*` over a domain.

    On an annulus the metadata records the seam mismatch across the cut, which
    vanishes (up to sign) when the lift is single-valued around the annulus.

    :param G: The hyperbolic Gauss map, or `LiftData`.
    :param Q_density: The density of `Q`.
    :param domain: A `Rectangle` or a cut `Annulus`.
    :param resolution: Number of grid cells along the short side.
    :param F0: The lift at the first grid point.
    :param ends: The ends of the surface.
    :param tolerances: Numerical tolerances.
    :param threads: Number of columns integrated concurrently.
    :param show_progress: Show a progress bar.
    :raises PathError: When the domain contains or nearly touches a singular point.
    :return: The mesh.
    """
    return _build(
        G,
        Q_density,
        domain,
        resolution,
        F0,
        ends,
        tolerances,
        dual=False,
        threads=threads,
        show_progress=show_progress,
    )


def dual_mesh(
    G: Any,
    Q_density: Any = None,
    domain: Domain = Rectangle(),
    resolution: int = 16,
    F0: np.ndarray | None = None,
    ends: Any = (),
    tolerances: Tolerances = Tolerances(),
    threads: int = 1,
    show_progress: bool = False,
) -> Mesh:
    """Mesh the dual surface `f# = F^-1 (F^-1)*`; see `mesh` for the arguments."""
    return _build(
        G,
        Q_density,
        domain,
        resolution,
        F0,
        ends,
        tolerances,
        dual=True,
        threads=threads,
        show_progress=show_progress,
    )


def domain_from_json(data: Mapping[str, Any]) -> Domain:
    """Read `{"rectangle": [x0, x1, y0, y1]}` or `{"annulus": [cx, cy, r0, r1, cut]}`.

    :param data: The JSON object.
    :raises ValueError: When neither key is present.
    :return: The domain.
    """
    if "rectangle" in data:
        return Rectangle(*map(float, data["rectangle"]))
    if "annulus" in data:
        cx, cy, r0, r1, *cut = data["annulus"]
        angle = float(cut[0]) if cut else 0.0
        return Annulus(complex(cx, cy), float(r0), float(r1), angle)
    raise ValueError(f"Unknown domain {dict(data)}.")
