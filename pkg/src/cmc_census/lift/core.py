import itertools
import logging
import math
import time
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
import sympy
from scipy.integrate import solve_ivp

from cmc_census.lift.paths import PathSegment, as_segments, total_length
from cmc_census.symcore import RationalFunction, SpherePoint, Z

LOGGER = logging.getLogger(__name__)

# step control tolerance relative to the requested local error
STEP_TOLERANCE_RATIO = 1e-2
MIN_STEP_TOLERANCE = 1e-13


class PathError(ValueError):
    """Raised when a path comes too close to a singular point."""


class IntegrationError(RuntimeError):
    """Raised when the integrator fails or the determinant drifts."""


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances of the lift.

    `clearance_factor` scales the smallest distance between singular points to
    give the minimal distance of a path from them.
    """

    integration: float = 1e-10
    monodromy: float = 1e-6
    clearance_factor: float = 0.05
    det_drift: float = 1e-9

    def __post_init__(self) -> None:
        """Validate the tolerances.

        :raises ValueError: When a tolerance is not positive.
        """
        for name in ("integration", "monodromy", "clearance_factor", "det_drift"):
            if not getattr(self, name) > 0:
                raise ValueError(f"Tolerance {name} must be positive.")


def _finite_roots(poly_expr: sympy.Expr) -> list[complex]:
    if Z not in poly_expr.free_symbols:
        return []
    # roots of the squarefree part are simple
    poly = sympy.Poly(poly_expr, Z)
    return [complex(r) for r in sympy.Poly(sympy.sqf_part(poly), Z).nroots(n=30)]


def _polynomial(expr: sympy.Expr) -> Any:
    return RationalFunction(expr).lambdify()


class LiftData:
    """Numeric evaluators of a surface `(G, Q)` for the lift.

    `dF F^-1 = ((G, -G^2), (1, -G)) Q/dG` is evaluated in the homogeneous form
    `((N D, -N^2), (D^2, -N D)) Q / (N' D - N D')` with `G = N/D`, which stays
    finite at the poles of `G`. Its singular points are the ends and the poles of
    `W = Q / (N' D - N D')`.
    """

    def __init__(self, G: Any, Q_density: Any, ends: Sequence[Any] = ()) -> None:
        """Create the evaluators.

        :param G: The hyperbolic Gauss map, non-constant without free parameters.
        :param Q_density: The density of the Hopf differential.
        :param ends: The ends of the surface.
        :raises ValueError: When `G` is constant or parameters are unbound.
        """
        self.G = RationalFunction.coerce(G)
        self.Q = RationalFunction.coerce(Q_density)
        if self.G.is_constant:
            raise ValueError("G must not be constant.")
        if self.G.parameters or self.Q.parameters:
            raise ValueError("G and Q must not contain free parameters.")
        n, d = self.G.num, self.G.den
        ram = sympy.expand(sympy.diff(n, Z) * d - n * sympy.diff(d, Z))
        self.W = RationalFunction(self.Q.num, sympy.expand(self.Q.den * ram))
        self._n, self._d = _polynomial(n), _polynomial(d)
        self._w = self.W.lambdify()
        self.ends = tuple(SpherePoint.coerce(e) for e in ends)
        finite_ends = [complex(e) for e in self.ends if not e.is_infinite]
        self.singular_points = tuple(
            _dedupe(finite_ends + _finite_roots(self.W.den))
        )
        self.poles_of_G = tuple(_finite_roots(d))

    @classmethod
    def coerce(
        cls, data: Any, Q_density: Any = None, ends: Sequence[Any] = ()
    ) -> "LiftData":
        """Pass `LiftData` through, or build it from `(G, Q, ends)`."""
        if isinstance(data, LiftData):
            return data
        if Q_density is None:
            raise ValueError("Q is required to build lift data.")
        return cls(data, Q_density, ends)

    def G_value(self, z: complex) -> complex:
        """`G(z)`, infinite at poles."""
        d = complex(self._d(z))
        return complex(self._n(z)) / d if d != 0 else complex("inf")

    def matrix(self, z: complex, gauge: np.ndarray | None = None) -> np.ndarray:
        """`M(z)` for `a * G`, with `a` the gauge (identity when omitted)."""
        n, d, w = complex(self._n(z)), complex(self._d(z)), complex(self._w(z))
        if gauge is not None:
            n, d = gauge[0, 0] * n + gauge[0, 1] * d, gauge[1, 0] * n + gauge[1, 1] * d
        m = np.array([[n * d, -n * n], [d * d, -n * d]], dtype=complex) * w
        if not np.all(np.isfinite(m)):
            raise PathError(f"M is singular at {z}.")
        return m

    def min_separation(self) -> float:
        """Smallest distance between two singular points (1 if there is one)."""
        pts = list(self.singular_points)
        if len(pts) < 2:
            return 1.0
        return min(abs(a - b) for a, b in itertools.combinations(pts, 2))

    def clearance(self, tolerances: "Tolerances") -> float:
        """Minimal distance of a path from the singular points."""
        return tolerances.clearance_factor * self.min_separation()


def _dedupe(points: Sequence[complex], eps: float = 1e-12) -> list[complex]:
    out: list[complex] = []
    for p in points:
        if all(abs(p - q) > eps for q in out):
            out.append(p)
    return out


def coefficient_matrix(G: Any, Q_density: Any, z: complex) -> np.ndarray:
    """The trace-free matrix `M(z)` with `dF = M F dz`.

    :param G: The hyperbolic Gauss map (or `LiftData`).
    :param Q_density: The density of `Q` (ignored for `LiftData`).
    :param z: The point.
    :raises PathError: When `z` is a singular point.
    :return: `((G, -G^2), (1, -G)) Q/G'` at `z`.
    """
    return LiftData.coerce(G, Q_density).matrix(complex(z))


@dataclass(frozen=True)
class LiftState:
    """The lift `F` at the end of a path."""

    F: np.ndarray
    z: complex
    path_arclength: float

    @property
    def det_drift(self) -> float:
        """`|det F - 1|`."""
        return float(abs(np.linalg.det(self.F) - 1))


def chordal_distance(u: complex, v: complex) -> float:
    """Chordal distance on the Riemann sphere (infinity allowed)."""
    if is_infinite(u) and is_infinite(v):
        return 0.0
    if is_infinite(u):
        return 2 / math.sqrt(1 + abs(v) ** 2)
    if is_infinite(v):
        return 2 / math.sqrt(1 + abs(u) ** 2)
    return 2 * abs(u - v) / math.sqrt((1 + abs(u) ** 2) * (1 + abs(v) ** 2))


def is_infinite(u: complex) -> bool:
    """Whether `u` is the point at infinity."""
    return not np.isfinite(u)


def _fibonacci_sphere(n: int) -> list[complex]:
    """Stereographic images of `n` nearly uniform points of the sphere."""
    points: list[complex] = []
    golden = math.pi * (3 - math.sqrt(5))
    for k in range(n):
        h = 1 - 2 * (k + 0.5) / n
        r = math.sqrt(1 - h * h)
        x, y = r * math.cos(golden * k), r * math.sin(golden * k)
        points.append(complex(x, y) / (1 - h))
    return points


def su2_pole_gauge(w: complex) -> np.ndarray:
    """The SU(2) matrix `a` for which `a * G` has its poles where `G = w`."""
    if is_infinite(w):
        return np.eye(2, dtype=complex)
    c = 1 / math.sqrt(1 + abs(w) ** 2)
    alpha, beta = w.conjugate() * c, c
    return np.array([[alpha, beta], [-beta, alpha.conjugate()]], dtype=complex)


def gauge_for_path(
    G: Any, samples: Sequence[complex], candidates: int = 200, min_distance: float = 0.2
) -> np.ndarray:
    """A rigid motion `a` in SU(2) such that `a * G` has no poles near a path.

    The poles of `a * G` are the points where `G` takes one value `w`; `w` is chosen
    on the sphere as far as possible from the values of `G` along the samples.

    :param G: The hyperbolic Gauss map (or `LiftData`).
    :param samples: Points of the path.
    :param candidates: Number of candidate values `w`.
    :param min_distance: Required chordal distance between `w` and the values.
    :raises PathError: When no candidate is far enough from the values.
    :return: The matrix `a`.
    """
    data = G if isinstance(G, LiftData) else None
    g = data.G_value if data is not None else _evaluator(G)
    values = [g(complex(z)) for z in samples]
    options = [complex("inf"), *_fibonacci_sphere(candidates)]
    best, best_distance = options[0], -1.0
    for w in options:
        distance = min(chordal_distance(w, v) for v in values)
        if distance > best_distance:
            best, best_distance = w, distance
    if best_distance < min_distance:
        raise PathError(
            f"G covers the sphere too densely along the path ({best_distance})."
        )
    LOGGER.debug("gauge pole value %s at chordal distance %s", best, best_distance)
    return su2_pole_gauge(best)


def _evaluator(G: Any) -> Any:
    G = RationalFunction.coerce(G)
    n, d = _polynomial(G.num), _polynomial(G.den)

    def g(z: complex) -> complex:
        den = complex(d(z))
        return complex(n(z)) / den if den != 0 else complex("inf")

    return g


def _integrate_segment(
    data: LiftData,
    segment: PathSegment,
    F: np.ndarray,
    tol: float,
    gauge: np.ndarray | None,
) -> np.ndarray:
    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        m = data.matrix(segment.point(t), gauge) * segment.velocity(t)
        return (m @ y.reshape(2, 2)).ravel()

    step_tol = max(tol * STEP_TOLERANCE_RATIO, MIN_STEP_TOLERANCE)
    result = solve_ivp(
        rhs, (0.0, 1.0), F.ravel(), method="DOP853", rtol=step_tol, atol=step_tol
    )
    if not result.success:
        raise IntegrationError(f"Integration failed on {segment}: {result.message}")
    return result.y[:, -1].reshape(2, 2)


def _check_clearance(
    data: LiftData, segments: Sequence[PathSegment], clearance: float
) -> None:
    for segment in segments:
        for p in data.singular_points:
            if segment.distance_to(p) < clearance:
                raise PathError(
                    f"Path segment {segment} passes {p} within {clearance}."
                )


def integrate_lift(
    G: Any,
    Q_density: Any = None,
    path: Any = (),
    F0: np.ndarray | None = None,
    tol: float | None = None,
    ends: Sequence[Any] = (),
    tolerances: Tolerances = Tolerances(),
) -> LiftState:
    """Integrate `dF = M(z) F dz` along a path.

    When the path comes close to a pole of `G`, the system is integrated for
    `a * G` with the rigid motion `a` of `gauge_for_path` and the result is
    moved back; the lift is the same.

    :param G: The hyperbolic Gauss map, or `LiftData`.
    :param Q_density: The density of `Q` (ignored for `LiftData`).
    :param path: Vertices of a polyline, or path segments.
    :param F0: Initial value with `det F0 = 1` (identity by default).
    :param tol: Local error tolerance, by default `tolerances.integration`.
    :param ends: The ends of the surface.
    :param tolerances: Numerical tolerances.
    :raises PathError: When the path violates the clearance.
    :raises ValueError: When `det F0 != 1`.
    :raises IntegrationError: When the integrator fails or `det F` drifts.
    :return: The final state.
    """
    t0 = time.perf_counter()
    data = LiftData.coerce(G, Q_density, ends)
    segments = as_segments(path)
    tol = tolerances.integration if tol is None else tol
    F = np.eye(2, dtype=complex) if F0 is None else np.asarray(F0, dtype=complex)
    det0 = np.linalg.det(F)
    if abs(det0 - 1) > 1e-6:
        raise ValueError(f"The initial value has determinant {det0}, not 1.")
    clearance = data.clearance(tolerances)
    _check_clearance(data, segments, clearance)

    gauge = None
    if any(s.distance_to(p) < clearance for s in segments for p in data.poles_of_G):
        samples = [s.point(t) for s in segments for t in np.linspace(0, 1, 33)]
        gauge = gauge_for_path(data, samples)
        F = gauge @ F
    for segment in segments:
        F = _integrate_segment(data, segment, F, tol, gauge)
    if gauge is not None:
        F = gauge.conj().T @ F

    length = total_length(segments)
    state = LiftState(F, segments[-1].end, length)
    drift = abs(np.linalg.det(F) - det0)
    if drift > tolerances.det_drift * (1 + length):
        raise IntegrationError(f"det F drifted by {drift} over length {length}.")
    LOGGER.debug(
        "integrated %s segments in %s seconds", len(segments), time.perf_counter() - t0
    )
    return state


def immerse(F: np.ndarray) -> np.ndarray:
    """Map `F` to the Poincare ball via `X = F F*`.

    `X = ((x0 + x3, x1 + i x2), (x1 - i x2, x0 - x3))` is sent to
    `(x1, x2, x3) / (1 + x0)`.

    :param F: A matrix with `det F = 1`.
    :raises ValueError: When `F` is not finite or `det F` is far from 1.
    :return: A point of the open unit ball.
    """
    F = np.asarray(F, dtype=complex)
    if not np.all(np.isfinite(F)):
        raise ValueError("F has non-finite entries.")
    if abs(np.linalg.det(F) - 1) > 1e-6:
        raise ValueError(f"det F = {np.linalg.det(F)} is not 1.")
    X = F @ F.conj().T
    x0 = (X[0, 0] + X[1, 1]).real / 2
    x3 = (X[0, 0] - X[1, 1]).real / 2
    x1, x2 = X[0, 1].real, X[0, 1].imag
    return np.array([x1, x2, x3]) / (1 + x0)


def sample_lift(
    G: Any,
    Q_density: Any = None,
    path: Any = (),
    n_samples: int = 50,
    F0: np.ndarray | None = None,
    ends: Sequence[Any] = (),
    tolerances: Tolerances = Tolerances(),
) -> tuple[np.ndarray, np.ndarray]:
    """The lift at equally spaced parameters of each path segment.

    :return: The sample points and the matrices `F` there.
    """
    data = LiftData.coerce(G, Q_density, ends)
    segments = as_segments(path)
    _check_clearance(data, segments, data.clearance(tolerances))
    F = np.eye(2, dtype=complex) if F0 is None else np.asarray(F0, dtype=complex)
    points, matrices = [segments[0].start], [F]
    for segment in segments:
        for k in range(n_samples):
            piece = _SubSegment(segment, k / n_samples, (k + 1) / n_samples)
            F = _integrate_segment(data, piece, F, tolerances.integration, None)
            points.append(piece.end)
            matrices.append(F)
    return np.array(points), np.array(matrices)


def secondary_gauss(
    G: Any,
    Q_density: Any = None,
    points: Any = (),
    matrices: Any = (),
    ends: Sequence[Any] = (),
) -> np.ndarray:
    """`g` at sampled lift values, without differencing.

    `F^-1 M F = ((g, -g^2), (1, -g)) w` is nilpotent, so `g` is the ratio of its
    first column. Like `secondary_gauss_numeric` the result depends on the initial
    value of the lift only through a Moebius transformation.

    :param G: The hyperbolic Gauss map, or `LiftData`.
    :param Q_density: The density of `Q` (ignored for `LiftData`).
    :param points: Sample points.
    :param matrices: The lift at the samples.
    :param ends: The ends of the surface.
    :raises ValueError: When points and matrices differ in number.
    :return: `g` at the samples (infinite where the column ratio has a pole).
    """
    data = LiftData.coerce(G, Q_density, ends)
    points = np.asarray(points, dtype=complex)
    matrices = np.asarray(matrices, dtype=complex)
    if len(points) != len(matrices):
        raise ValueError(f"Got {len(points)} points but {len(matrices)} matrices.")
    g = np.empty(len(points), dtype=complex)
    for k, (z, F) in enumerate(zip(points, matrices)):
        n = np.linalg.solve(F, data.matrix(complex(z)) @ F)
        g[k] = n[0, 0] / n[1, 0] if n[1, 0] != 0 else complex("inf")
    return g


@dataclass(frozen=True)
class _SubSegment(PathSegment):
    parent: PathSegment
    t0: float
    t1: float

    def point(self, t: float) -> complex:
        return self.parent.point(self.t0 + t * (self.t1 - self.t0))

    def velocity(self, t: float) -> complex:
        return self.parent.velocity(self.t0 + t * (self.t1 - self.t0)) * (
            self.t1 - self.t0
        )

    @property
    def length(self) -> float:
        return self.parent.length * (self.t1 - self.t0)


def secondary_gauss_numeric(
    points: np.ndarray, matrices: np.ndarray, eps: float = 1e-12
) -> tuple[np.ndarray, np.ndarray]:
    """`g = -dF12/dF11` by central differences along sampled lift values.

    :param points: Sample points.
    :param matrices: The lift at the samples.
    :param eps: Threshold below which `dF11` counts as zero.
    :raises ValueError: When fewer than three samples are given.
    :return: `g` at the interior samples (NaN where flagged) and the flags.
    """
    matrices = np.asarray(matrices, dtype=complex)
    if len(matrices) < 3:
        raise ValueError("At least three samples are needed.")
    d11 = matrices[2:, 0, 0] - matrices[:-2, 0, 0]
    d12 = matrices[2:, 0, 1] - matrices[:-2, 0, 1]
    flags = np.abs(d11) < eps
    g = np.full(d11.shape, np.nan + 0j)
    g[~flags] = -d12[~flags] / d11[~flags]
    if flags.any():
        LOGGER.warning("dF11 vanishes at %s samples", int(flags.sum()))
    return g, flags
