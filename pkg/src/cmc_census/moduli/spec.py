import hashlib
import json
import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from cmc_census.symcore.rational import RationalFunction, SpherePoint
from cmc_census.symcore.scalar import scalar_from_str, scalar_to_str

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class GenusOneDescriptor:
    """Symbolic data of a genus-one surface on `C / (Z v1 + Z v2)`.

    Exact function-field arithmetic is not available in genus one, so the
    descriptor carries the combinatorial data (orders at ends and umbilics) that
    the curvature identities need, and the lattice and `theta` that numeric
    evaluators consume.
    """

    v1: complex
    v2: complex
    theta: complex
    degree: int
    end_orders: tuple[tuple[int, int], ...]
    umbilic_orders: tuple[int, ...]
    end_labels: tuple[str, ...] = ()
    model: str = ""

    def to_json(self) -> dict[str, Any]:
        """JSON form."""
        return {
            "lattice": [[self.v1.real, self.v1.imag], [self.v2.real, self.v2.imag]],
            "theta": [complex(self.theta).real, complex(self.theta).imag],
            "degree": self.degree,
            "end_orders": [list(x) for x in self.end_orders],
            "umbilic_orders": list(self.umbilic_orders),
            "end_labels": list(self.end_labels),
            "model": self.model,
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "GenusOneDescriptor":
        """Read the JSON form.

        :param data: The JSON object.
        :raises ValueError: When fields are missing.
        :return: The descriptor.
        """
        try:
            (a, b), (c, d) = data["lattice"]
            theta = data.get("theta", [1.0, 0.0])
            return cls(
                v1=complex(a, b),
                v2=complex(c, d),
                theta=complex(*theta),
                degree=int(data["degree"]),
                end_orders=tuple((int(x), int(y)) for x, y in data["end_orders"]),
                umbilic_orders=tuple(int(x) for x in data.get("umbilic_orders", [])),
                end_labels=tuple(data.get("end_labels", [])),
                model=str(data.get("model", "")),
            )
        except (KeyError, TypeError) as e:
            raise ValueError(f"Malformed genus-one descriptor: {e}") from e


@dataclass(frozen=True)
class SurfaceSpec:
    """The data `(G, Q)` of a surface together with its ends.

    In genus zero `G` and the density of `Q` are exact rational functions of the
    coordinate of the Riemann sphere. In genus one they are described by a
    `GenusOneDescriptor`.
    """

    genus: int
    ends: tuple[SpherePoint, ...]
    G: RationalFunction | None = None
    Q: RationalFunction | None = None
    label: str = ""
    params: Mapping[str, str] = field(default_factory=dict)
    descriptor: GenusOneDescriptor | None = None

    def __post_init__(self) -> None:
        """Validate the spec.

        :raises ValueError: When the genus is unsupported, the ends are empty or
            repeated, or the data does not match the genus.
        """
        if self.genus not in (0, 1):
            raise ValueError(f"Unsupported genus {self.genus}.")
        if self.genus == 0:
            if not self.ends:
                raise ValueError("A surface needs at least one end.")
            keys = [p.to_json() for p in self.ends]
            if len(set(keys)) != len(keys):
                raise ValueError(f"Ends must be distinct, got {keys}.")
            if self.G is None or self.Q is None:
                raise ValueError("Genus-zero specs need G and Q.")
            if self.G.is_constant:
                raise ValueError("G must not be constant.")
        elif self.descriptor is None:
            raise ValueError("Genus-one specs need a descriptor.")

    @classmethod
    def genus_zero(
        cls,
        G: Any,
        Q: Any,
        ends: Sequence[Any],
        label: str = "",
        params: Mapping[str, Any] | None = None,
    ) -> "SurfaceSpec":
        """Create a genus-zero spec.

        :param G: The hyperbolic Gauss map.
        :param Q: The density of the Hopf differential.
        :param ends: The ends (`"inf"` for infinity).
        :param label: The type tag.
        :param params: Parameter values to record (and substitute).
        :return: The spec.
        """
        G = RationalFunction.coerce(G)
        Q = RationalFunction.coerce(Q)
        recorded = {k: scalar_to_str(v) for k, v in (params or {}).items()}
        if recorded:
            values = {k: scalar_from_str(v) for k, v in recorded.items()}
            G, Q = G.subs(values), Q.subs(values)
        points = []
        for e in ends:
            p = SpherePoint.coerce(e)
            if recorded and p.value is not None:
                p = SpherePoint.finite(
                    p.value.subs({k: scalar_from_str(v) for k, v in recorded.items()})
                )
            points.append(p)
        return cls(0, tuple(points), G, Q, label, recorded)

    @property
    def n_ends(self) -> int:
        """Number of ends."""
        if self.descriptor is not None:
            return len(self.descriptor.end_orders)
        return len(self.ends)

    @property
    def degree(self) -> int:
        """Degree of `G`."""
        if self.descriptor is not None:
            return self.descriptor.degree
        assert self.G is not None
        return self.G.degree

    def to_json(self) -> dict[str, Any]:
        """Canonical JSON form."""
        out: dict[str, Any] = {
            "genus": self.genus,
            "label": self.label,
            "params": dict(sorted(self.params.items())),
        }
        if self.descriptor is not None:
            out["descriptor"] = self.descriptor.to_json()
            out["ends"] = list(self.descriptor.end_labels)
            return out
        assert self.G is not None and self.Q is not None
        out["ends"] = [p.to_json() for p in self.ends]
        out["G"] = self.G.to_json()
        out["Q"] = self.Q.to_json()
        return out

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "SurfaceSpec":
        """Read a spec file object.

        :param data: `{genus, ends, G: {num, den}, Q: {num, den}, params}`.
        :raises ValueError: When the object is malformed.
        :return: The spec.
        """
        genus = int(data.get("genus", 0))
        params = {k: str(v) for k, v in data.get("params", {}).items()}
        if genus == 1:
            return cls(
                1,
                (),
                label=str(data.get("label", "")),
                params=params,
                descriptor=GenusOneDescriptor.from_json(data["descriptor"]),
            )
        for key in ("ends", "G", "Q"):
            if key not in data:
                raise ValueError(f"Spec is missing the field {key!r}.")
        return cls.genus_zero(
            RationalFunction.from_json(data["G"]),
            RationalFunction.from_json(data["Q"]),
            data["ends"],
            label=str(data.get("label", "")),
            params=params,
        )

    @classmethod
    def load(cls, path: Path) -> "SurfaceSpec":
        """Read a spec file.

        :param path: Path to a JSON file.
        :raises ValueError: When the file is not valid JSON or not a valid spec.
        :return: The spec.
        """
        try:
            with path.open(encoding="utf-8") as fp:
                data = json.load(fp)
        except json.JSONDecodeError as e:
            raise ValueError(f"{path} is not valid JSON: {e}") from e
        LOGGER.debug("loaded spec from %s", path)
        return cls.from_json(data)

    def spec_hash(self) -> str:
        """SHA-256 of the canonical JSON form."""
        text = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()
