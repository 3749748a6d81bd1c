import logging
import math
from collections.abc import Sequence
from typing import Any

import numpy as np

from cmc_census.census.base import (
    CaseRecord,
    ConstraintViolation,
    Reducibility,
    Status,
    Verdict,
    exact_param,
    verdict_from,
)
from cmc_census.census.checks import geometry_checks
from cmc_census.flatlab import (
    ConvergenceError,
    EllipticLattice,
    cg_jacobian_exact,
    cg_solve,
    i11_density,
)
from cmc_census.moduli import GenusOneDescriptor, SurfaceSpec

LOGGER = logging.getLogger(__name__)

SAMPLE_POINTS = (0.13 + 0.21j, 0.37 + 0.08j, 0.61 + 0.44j, 0.29 + 0.73j)
PROBE = 1e-4


def _genus_one_spec(
    label: str,
    end_orders: tuple[tuple[int, int], ...],
    umbilic_orders: tuple[int, ...],
    lattice: tuple[complex, complex] = (1, 1j),
    theta: complex = 1,
    end_labels: tuple[str, ...] = (),
    model: str = "",
) -> SurfaceSpec:
    descriptor = GenusOneDescriptor(
        v1=complex(lattice[0]),
        v2=complex(lattice[1]),
        theta=complex(theta),
        degree=2,
        end_orders=end_orders,
        umbilic_orders=umbilic_orders,
        end_labels=end_labels,
        model=model,
    )
    return SurfaceSpec(1, (), label=label, descriptor=descriptor)


def _periodicity_residual(lattice: EllipticLattice, theta: complex) -> float:
    worst = 0.0
    for z in SAMPLE_POINTS:
        value = i11_density(z, lattice, theta)
        for v in (lattice.v1, lattice.v2):
            shifted = i11_density(z + v, lattice, theta)
            worst = max(worst, abs(shifted - value) / max(1.0, abs(value)))
    return worst


def _order_ratio(lattice: EllipticLattice, theta: complex, point: complex) -> float:
    """`|Q(p + 2e)| / |Q(p + e)|`: about 2 at a simple zero, 1/2 at a simple pole."""
    near = i11_density(point + PROBE, lattice, theta)
    far = i11_density(point + 2 * PROBE, lattice, theta)
    return abs(far) / abs(near)


def i11_candidate(
    lattice: Sequence[Any] = (1, 1j), theta: Any = 1
) -> CaseRecord:
    """Type I(-1,-1): `G = wp`, `Q` with simple poles at `0` and `(v1+v2)/2`.

    The data is checked numerically on the torus: the density of `Q` is doubly
    periodic, has simple zeros at `v1/2` and `v2/2` and simple poles at the ends,
    and `G = wp` is branched at the half periods. The period problem is open, so
    the verdict stays `unknown`.

    :param lattice: The periods `(v1, v2)`.
    :param theta: The nonzero scale of `Q`.
    :raises ValueError: When the periods do not span a lattice.
    :raises ConstraintViolation: When `theta = 0`.
    :return: The record.
    """
    v1, v2 = (complex(v) for v in lattice)
    theta_c = complex(exact_param(theta)) if isinstance(theta, str) else complex(theta)
    if theta_c == 0:
        raise ConstraintViolation("theta must not be zero.")
    ell = EllipticLattice(v1, v2)
    h1, h2, h3 = ell.half_periods
    spec = _genus_one_spec(
        "I(-1,-1)",
        ((-1, 1), (-1, 1)),
        (1, 1),
        (v1, v2),
        theta_c,
        ("0", "(v1+v2)/2"),
        "G = wp",
    )
    checks, meta = geometry_checks(spec)
    periodicity = _periodicity_residual(ell, theta_c)
    zero_values = [abs(i11_density(h, ell, theta_c)) for h in (h1, h2)]
    zero_ratios = [_order_ratio(ell, theta_c, h) for h in (h1, h2)]
    pole_ratios = [_order_ratio(ell, theta_c, p) for p in (0, h3)]
    branching = [abs(ell.wp_prime(h)) for h in (h1, h2, h3)]
    checks.update(
        {
            "doubly_periodic": periodicity < 1e-6,
            "zeros_at_half_periods": max(zero_values) < 1e-8,
            "simple_zeros": all(abs(r - 2) < 1e-2 for r in zero_ratios),
            "simple_poles": all(abs(r - 0.5) < 1e-2 for r in pole_ratios),
            "G_branched_at_half_periods": max(branching) < 1e-7,
        }
    )
    meta.update(
        {
            "lattice": ell.to_json(),
            "periodicity_residual": periodicity,
            "zero_ratios": zero_ratios,
            "pole_ratios": pole_ratios,
        }
    )
    failed = [k for k, v in checks.items() if not v]
    if failed:
        LOGGER.warning("i11 candidate fails %s", failed)
    return CaseRecord(
        tag="i11",
        type_tag="I(-1,-1)",
        TA="8pi",
        reducibility=Reducibility.NONE,
        verdict=Verdict.UNKNOWN,
        status=Status.UNKNOWN_PLUS,
        params={"theta": repr(theta_c)},
        spec=spec,
        checks=checks,
        notes="G and Q are determined; the period problem is unsolved.",
        metadata=meta,
    )


def i3() -> CaseRecord:
    """Type I(-3): nothing is known beyond the curvature bookkeeping."""
    spec = _genus_one_spec("I(-3)", ((-3, 1),), (1, 1, 1), end_labels=("p1",))
    checks, meta = geometry_checks(spec)
    return CaseRecord(
        tag="i3",
        type_tag="I(-3)",
        TA="8pi",
        reducibility=Reducibility.NONE,
        verdict=Verdict.UNKNOWN,
        status=Status.UNKNOWN,
        spec=spec,
        checks=checks,
        notes="Existence is open.",
        metadata=meta,
    )


def i4(tol: float = 1e-11) -> CaseRecord:
    """Type I(-4), deformed from the Chen-Gackstatter surface.

    The deformation needs the period map to vanish at `(1, sqrt(B))` with a
    nondegenerate Jacobian; Newton's method locates the zero and the Jacobian is
    compared with the differentiated period integrals.

    :param tol: Newton tolerance.
    :return: The record; `verified` when every hypothesis holds numerically.
    """
    spec = _genus_one_spec(
        "I(-4)", ((-4, 0),), (1, 1, 1, 1), end_labels=("p1",), model="Chen-Gackstatter"
    )
    checks, meta = geometry_checks(spec)
    try:
        report = cg_solve(tol=tol)
    except ConvergenceError as e:
        LOGGER.error("period solve failed: %s", e)
        checks["periods_solved"] = False
        meta["error"] = str(e)
        return CaseRecord(
            tag="i4",
            type_tag="I(-4)",
            TA="8pi",
            reducibility=Reducibility.NONE,
            verdict=Verdict.UNKNOWN,
            status=Status.EXISTENCE,
            spec=spec,
            checks=checks,
            metadata=meta,
        )
    exact = cg_jacobian_exact()
    b = report.metadata["B"]
    expected = np.array(
        [
            [exact["dPer1_dnu1"], exact["dPer_dnu2"]],
            [exact["dPer2_dnu1"], exact["dPer_dnu2"]],
        ]
    )
    nu1, nu2 = report.solved_at
    checks.update(
        {
            "periods_solved": report.residual < 1e-9,
            "solution_at_symmetric_point": abs(nu1 - 1) < 1e-6
            and abs(nu2 - math.sqrt(b)) < 1e-6,
            "jacobian_matches_integrals": bool(
                np.allclose(report.jacobian, expected, atol=1e-5)
            ),
            "jacobian_nondegenerate": abs(report.determinant) > 1e-6,
        }
    )
    meta.update({"periods": report.to_json(), "jacobian_integrals": exact})
    return CaseRecord(
        tag="i4",
        type_tag="I(-4)",
        TA="8pi",
        reducibility=Reducibility.NONE,
        verdict=verdict_from(checks, "i4"),
        status=Status.EXISTENCE,
        spec=spec,
        checks=checks,
        notes="Exists by deformation of a minimal surface with one end.",
        metadata=meta,
    )


def i22() -> CaseRecord:
    """Type I(-2,-2): genus-one catenoid cousins, constructed externally."""
    spec = _genus_one_spec(
        "I(-2,-2)", ((-2, 0), (-2, 0)), (1, 1, 1, 1), end_labels=("p1", "p2")
    )
    checks, meta = geometry_checks(spec)
    return CaseRecord(
        tag="i22",
        type_tag="I(-2,-2)",
        TA="8pi",
        reducibility=Reducibility.NONE,
        verdict=Verdict.EXTERNAL,
        status=Status.EXISTENCE,
        spec=spec,
        checks=checks,
        notes="Genus-one catenoid cousins exist by an external construction.",
        metadata=meta,
    )


def genus_one_records() -> list[CaseRecord]:
    """Records of every genus-one type with `TA = 8 pi`, in census order."""
    return [i3(), i4(), i11_candidate(), i22()]
