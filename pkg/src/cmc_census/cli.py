"""The `cmc-census` command line.

Every subcommand writes one JSON document (or an OBJ mesh) to `--out` or to
standard output. Exit codes: 0 on success, 2 when a case verifies that a surface
does not exist, 1 on errors.
"""

import argparse
import json
import logging
import math
import sys
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

import cmc_census
from cmc_census.census import Verdict, run_all, run_case, table1
from cmc_census.census.table import THREADS_ENV
from cmc_census.flatlab import cg_solve, o33_report
from cmc_census.frobenius import equivalence_report, frobenius_report
from cmc_census.frobenius.ode import FORMS, build_form
from cmc_census.lift import (
    Annulus,
    Domain,
    Rectangle,
    Tolerances,
    dual_mesh,
    mesh,
    monodromy,
    numeric_TA,
)
from cmc_census.moduli import SurfaceSpec, analyze, curvature_report

LOGGER = logging.getLogger(__name__)

EXIT_OK, EXIT_ERROR, EXIT_NONEXISTENT = 0, 1, 2
SUBCOMMANDS = (
    "analyze",
    "census",
    "frobenius",
    "monodromy",
    "mesh",
    "periods",
    "table1",
)


@dataclass(frozen=True)
class RunConfig:
    """Options shared by all subcommands."""

    subcommand: str
    specs: tuple[Path, ...] = ()
    out: Path | None = None
    tol_int: float = 1e-10
    tol_mono: float = 1e-6
    tol_quad: float = 1e-8
    budget: str = "8pi"
    seed: int = 0
    output_format: str = "json"
    verbosity: int = 0
    options: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        """Validate the configuration.

        :raises ValueError: When the subcommand is unknown or a tolerance is not
            positive.
        """
        if self.subcommand not in SUBCOMMANDS:
            raise ValueError(f"Unknown subcommand {self.subcommand!r}.")
        for name in ("tol_int", "tol_mono", "tol_quad"):
            if not getattr(self, name) > 0:
                raise ValueError(f"--{name.replace('_', '-')} must be positive.")

    @property
    def tolerances(self) -> Tolerances:
        """Lift tolerances."""
        return Tolerances(integration=self.tol_int, monodromy=self.tol_mono)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        """Collect the parsed flags."""
        shared = {
            "subcommand",
            "spec",
            "out",
            "tol_int",
            "tol_mono",
            "tol_quad",
            "budget",
            "seed",
            "format",
            "verbose",
        }
        spec = getattr(args, "spec", None)
        return cls(
            subcommand=args.subcommand,
            specs=tuple(spec) if isinstance(spec, list) else (spec,) if spec else (),
            out=args.out,
            tol_int=args.tol_int,
            tol_mono=args.tol_mono,
            tol_quad=args.tol_quad,
            budget=args.budget,
            seed=args.seed,
            output_format=args.format,
            verbosity=args.verbose,
            options={k: v for k, v in vars(args).items() if k not in shared},
        )


def _plain(value: Any) -> Any:
    """Turn numpy and complex values into JSON values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        return _plain(value.item())
    if isinstance(value, complex):
        return [_plain(value.real), _plain(value.imag)]
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        return float(f"{value:.17g}")
    return value


def dumps(document: dict[str, Any]) -> str:
    """Deterministic JSON: sorted keys and floats with 17 significant digits."""
    return json.dumps(_plain(document), sort_keys=True, indent=2) + "\n"


def _write(config: RunConfig, text: str) -> None:
    if config.out is None:
        sys.stdout.write(text)
    else:
        config.out.write_text(text, encoding="utf-8")
        LOGGER.info("wrote %s", config.out)


def _document(config: RunConfig, body: dict[str, Any], spec: Any = None) -> str:
    document = {
        "cmc_census_version": cmc_census.__version__,
        "subcommand": config.subcommand,
        "seed": config.seed,
        **body,
    }
    if spec is not None:
        document["spec_hash"] = spec.spec_hash()
    return dumps(document)


def _load_spec(config: RunConfig) -> SurfaceSpec:
    if not config.specs:
        raise ValueError("A spec file is required.")
    return SurfaceSpec.load(config.specs[0])


def _genus_zero(spec: SurfaceSpec) -> tuple[Any, Any]:
    if spec.G is None or spec.Q is None:
        raise ValueError("This subcommand needs genus-zero data.")
    return spec.G, spec.Q


def run_analyze(config: RunConfig) -> int:
    """Orders at ends and umbilics, curvature identities and optionally `TA`."""
    spec = _load_spec(config)
    ends, umbilics = analyze(spec)
    body: dict[str, Any] = {
        "spec": spec.to_json(),
        "ends": [e.to_json() for e in ends],
        "umbilics": [u.to_json() for u in umbilics],
        "curvature": curvature_report(spec).to_json(),
    }
    if config.options.get("numeric") and spec.G is not None:
        value = numeric_TA(spec.G, tol=config.tol_quad)
        expected = 4 * math.pi * spec.degree
        body["numeric_TA"] = {
            "value": value,
            "expected": expected,
            "relative_error": abs(value - expected) / expected,
        }
    _write(config, _document(config, body, spec))
    return EXIT_OK


def _parse_params(pairs: Sequence[str]) -> dict[str, str]:
    params = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise ValueError(f"Expected key=value, got {pair!r}.")
        params[key] = value
    return params


def run_census(config: RunConfig) -> int:
    """Run one case (or all of them with `all`)."""
    tag = config.options["case"]
    if tag == "all":
        records = run_all(config.budget, show_progress=config.verbosity > 0)
    else:
        records = run_case(tag, **_parse_params(config.options.get("param") or []))
    body = {"records": [r.to_json() for r in records]}
    _write(config, _document(config, body))
    if tag != "all" and all(r.verdict == Verdict.NONEXISTENT for r in records):
        return EXIT_NONEXISTENT
    return EXIT_OK


def run_frobenius(config: RunConfig) -> int:
    """Frobenius reports of one equation form at every end (or the given one)."""
    spec = _load_spec(config)
    G, Q = _genus_zero(spec)
    form = config.options["form"]
    ends = [config.options["end"]] if config.options.get("end") else list(spec.ends)
    reports = []
    for end in ends:
        ode = build_form(form, G, Q, end)
        entry = frobenius_report(ode, config.options.get("terms")).to_json()
        entry["equivalence"] = equivalence_report(G, Q, end).to_json()
        reports.append(entry)
    _write(config, _document(config, {"form": form, "reports": reports}, spec))
    return EXIT_OK


def _complex(text: str) -> complex:
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 2:
        raise ValueError(f"Expected re,im, got {text!r}.")
    return complex(*parts)


def run_monodromy(config: RunConfig) -> int:
    """Loop matrices around every end."""
    spec = _load_spec(config)
    G, Q = _genus_zero(spec)
    base = config.options.get("base")
    report = monodromy(
        G,
        Q,
        _complex(base) if base else None,
        spec.ends,
        tolerances=config.tolerances,
    )
    _write(config, _document(config, report.to_json(), spec))
    return EXIT_OK


def parse_domain(text: str, cut: float | None = None) -> Domain:
    """Read `rect:x0,x1,y0,y1` or `annulus:cx,cy,r_inner,r_outer`.

    :param text: The domain description.
    :param cut: The cut angle of an annulus.
    :raises ValueError: When the description is malformed.
    :return: The domain.
    """
    kind, _, values = text.partition(":")
    numbers = [float(x) for x in values.split(",")] if values else []
    if kind == "rect" and len(numbers) == 4:
        return Rectangle(*numbers)
    if kind == "annulus" and len(numbers) == 4:
        cx, cy, r0, r1 = numbers
        return Annulus(complex(cx, cy), r0, r1, 0.0 if cut is None else cut)
    raise ValueError(f"Malformed domain {text!r}.")


def run_mesh(config: RunConfig) -> int:
    """Mesh the surface (or its dual) over a domain."""
    spec = _load_spec(config)
    G, Q = _genus_zero(spec)
    domain = parse_domain(config.options["domain"], config.options.get("cut"))
    build = dual_mesh if config.options.get("dual") else mesh
    result = build(
        G,
        Q,
        domain,
        config.options["res"],
        ends=spec.ends,
        tolerances=config.tolerances,
        show_progress=config.verbosity > 0,
    )
    if config.out is not None and config.out.suffix.lower() in (".h5", ".hdf5"):
        result.save(config.out)
    elif config.output_format == "obj":
        _write(config, result.to_obj())
    else:
        body = {
            "vertices": result.vertices,
            "faces": result.faces,
            "metadata": result.metadata,
        }
        _write(config, _document(config, body, spec))
    return EXIT_OK


def run_periods(config: RunConfig) -> int:
    """Solve the Chen-Gackstatter periods or evaluate the O(-3,-3) period."""
    problem = config.options["problem"]
    if problem == "cg":
        report = cg_solve()
    else:
        report = o33_report(config.options.get("a", "0"), config.options.get("nu", "0"))
    _write(config, _document(config, {"problem": problem, **report.to_json()}))
    return EXIT_OK


def run_table1(config: RunConfig) -> int:
    """The census table with a row-by-row comparison."""
    frame = table1(budget=config.budget, show_progress=config.verbosity > 0)
    for row in frame.itertuples(index=False):
        LOGGER.info("%s %s: %s", row.type, row.TA, "ok" if row.matches else "MISMATCH")
    body = {
        "rows": frame.to_dict(orient="records"),
        "matches": bool(frame["matches"].all()),
    }
    _write(config, _document(config, body))
    return EXIT_OK if body["matches"] else EXIT_ERROR


HANDLERS = {
    "analyze": run_analyze,
    "census": run_census,
    "frobenius": run_frobenius,
    "monodromy": run_monodromy,
    "mesh": run_mesh,
    "periods": run_periods,
    "table1": run_table1,
}


def build_parser() -> argparse.ArgumentParser:
    """The argument parser."""
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--out", type=Path, help="Output file (default: stdout).")
    shared.add_argument("--tol-int", type=float, default=1e-10, help="Path tolerance.")
    shared.add_argument(
        "--tol-mono", type=float, default=1e-6, help="Monodromy threshold."
    )
    shared.add_argument(
        "--tol-quad", type=float, default=1e-8, help="Quadrature tolerance."
    )
    shared.add_argument("--budget", choices=("4pi", "8pi"), default="8pi")
    shared.add_argument("--seed", type=int, default=0, help="Recorded in outputs.")
    shared.add_argument("--format", choices=("json", "obj"), default="json")
    shared.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(
        prog="cmc-census",
        description="Classify CMC-1 surfaces in hyperbolic space of low total "
        f"curvature. The thread cap is read from {THREADS_ENV}.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("analyze", parents=[shared], help="Orders and curvature.")
    p.add_argument("spec", type=Path)
    p.add_argument("--numeric", action="store_true", help="Also integrate TA.")

    p = sub.add_parser("census", parents=[shared], help="Run census cases.")
    p.add_argument("case", help="Case tag, or 'all'.")
    p.add_argument("--param", action="append", help="key=value, repeatable.")

    p = sub.add_parser("frobenius", parents=[shared], help="Frobenius reports.")
    p.add_argument("spec", type=Path)
    p.add_argument("--form", choices=sorted(FORMS), default="E0")
    p.add_argument("--end", help="A single end (default: all).")
    p.add_argument("--terms", type=int, help="Number of series coefficients.")

    p = sub.add_parser("monodromy", parents=[shared], help="Loop matrices.")
    p.add_argument("spec", type=Path)
    p.add_argument("--base", help="Base point re,im.")

    p = sub.add_parser("mesh", parents=[shared], help="Mesh export.")
    p.add_argument("spec", type=Path)
    p.add_argument("--domain", default="rect:-1,1,-1,1")
    p.add_argument("--res", type=int, default=16)
    p.add_argument("--cut", type=float, help="Cut angle of an annulus.")
    p.add_argument("--dual", action="store_true", help="Mesh the dual surface.")

    p = sub.add_parser("periods", parents=[shared], help="Period problems.")
    p.add_argument("problem", choices=("cg", "o33"))
    p.add_argument("--a", default="0")
    p.add_argument("--nu", default="0")

    sub.add_parser("table1", parents=[shared], help="The census table.")
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    """Parse the arguments and run a subcommand.

    :param argv: The arguments (default: `sys.argv[1:]`).
    :return: The exit code.
    """
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        config = RunConfig.from_args(args)
        return HANDLERS[config.subcommand](config)
    except (ValueError, RuntimeError, ArithmeticError, OSError) as e:
        # domain errors subclass these
        LOGGER.error("%s: %s", type(e).__name__, e)
        return EXIT_ERROR


def main() -> None:
    """Console script entry point."""
    sys.exit(run())
