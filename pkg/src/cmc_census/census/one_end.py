import logging
from typing import Any

from cmc_census.census.base import (
    CaseRecord,
    ConstraintViolation,
    Reducibility,
    Status,
    exact_param,
    record_params,
    verdict_from,
)
from cmc_census.census.checks import geometry_checks, plane_domain
from cmc_census.moduli import SurfaceSpec
from cmc_census.symcore import THETA, Z, is_zero

LOGGER = logging.getLogger(__name__)


def _one_ended(tag: str, type_tag: str, G: Any, Q: Any, theta: Any) -> CaseRecord:
    theta = exact_param(theta)
    if is_zero(theta):
        raise ConstraintViolation("theta must not be zero.")
    spec = SurfaceSpec.genus_zero(G, Q, ["inf"], type_tag, {"theta": theta})
    checks, meta = geometry_checks(spec)
    checks["plane_domain"] = plane_domain(spec)
    return CaseRecord(
        tag=tag,
        type_tag=type_tag,
        TA="8pi",
        reducibility=Reducibility.H3,
        verdict=verdict_from(checks, tag),
        status=Status.CLASSIFIED,
        params=record_params({"theta": theta}),
        spec=spec,
        checks=checks,
        notes="One end on the plane; H3-reducible with no period problem.",
        metadata=meta,
    )


def o5(theta: Any = 1) -> CaseRecord:
    """Type O(-5): `G = z^2`, `Q = theta z dz^2`, end at infinity.

    :param theta: Nonzero scale of `Q`.
    :raises ConstraintViolation: When `theta = 0`.
    :return: The record.
    """
    return _one_ended("o5", "O(-5)", Z**2, THETA * Z, theta)


def o6(theta: Any = 1) -> CaseRecord:
    """Type O(-6): `G = ((z-1)/z)^2`, `Q = theta z (z-1) dz^2`, end at infinity.

    :param theta: Nonzero scale of `Q`.
    :raises ConstraintViolation: When `theta = 0`.
    :return: The record.
    """
    return _one_ended("o6", "O(-6)", ((Z - 1) / Z) ** 2, THETA * Z * (Z - 1), theta)
