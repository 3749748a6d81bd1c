import logging
import math
import time
from typing import Any

import numpy as np

from cmc_census.lift.core import IntegrationError
from cmc_census.symcore import RationalFunction, Z

LOGGER = logging.getLogger(__name__)


def _density(G: RationalFunction) -> Any:
    g, dg = G.lambdify(), G.derivative().lambdify()

    def f(z: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            value = 4 * np.abs(dg(z)) ** 2 / (1 + np.abs(g(z)) ** 2) ** 2
        # the pulled back metric is bounded; non-finite values only occur at poles
        return np.nan_to_num(value, nan=0.0, posinf=0.0)

    return f


def _disk_integral(f: Any, panels: int, order: int, n_angles: int) -> float:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, 1.0, panels + 1)
    phi = 2 * math.pi * np.arange(n_angles) / n_angles
    ring = np.exp(1j * phi)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        r = (b - a) / 2 * nodes + (a + b) / 2
        w = (b - a) / 2 * weights
        values = f(r[:, None] * ring[None, :])
        total += float(np.sum(values.mean(axis=1) * 2 * math.pi * r * w))
    return total


def numeric_TA(
    G: Any,
    tol: float = 1e-8,
    panels: int = 4,
    order: int = 16,
    n_angles: int = 64,
    max_refinements: int = 5,
) -> float:
    """Area of the image of `G`, which is `TA(f#) = 4 pi deg G`.

    The pulled back spherical metric `4|G'|^2/(1+|G|^2)^2 |dz|^2` is integrated
    over the unit disk in `z` and in `w = 1/z`. Each disk uses composite
    Gauss-Legendre panels in the radius and the trapezoidal rule in the angle;
    both are doubled until two consecutive values agree.

    :param G: A non-constant rational function without parameters.
    :param tol: Relative tolerance between consecutive refinements.
    :param panels: Initial number of radial panels.
    :param order: Gauss-Legendre order per panel.
    :param n_angles: Initial number of angles.
    :param max_refinements: Number of doublings before giving up.
    :raises ValueError: When `G` is constant.
    :raises IntegrationError: When the refinement does not converge.
    :return: The total curvature.
    """
    G = RationalFunction.coerce(G)
    if G.is_constant:
        raise ValueError("G must not be constant.")
    t0 = time.perf_counter()
    charts = [_density(G), _density(RationalFunction(G.expr.subs(Z, 1 / Z)))]

    def value(level: int) -> float:
        scale = 2**level
        return sum(
            _disk_integral(f, panels * scale, order, n_angles * scale) for f in charts
        )

    previous = value(0)
    for level in range(1, max_refinements + 1):
        current = value(level)
        if abs(current - previous) <= tol * abs(current):
            LOGGER.debug(
                "numeric TA %s after %s refinements in %s seconds",
                current,
                level,
                time.perf_counter() - t0,
            )
            return current
        previous = current
    raise IntegrationError(f"Curvature quadrature did not converge for G = {G}.")
