"""Command line front end: ``verify``, ``scan`` and ``lattice-check``.

Exit codes: 0 success, 1 computation or tolerance failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, fields
from fractions import Fraction

from .errors import CoulqedError
from .kinematics import E_CHARGE, M_E, M_MU, compton_sqrt_s
from .observables import GEV2_TO_NB, CrossSectionPoint, PROCESSES, dsigma_domega, total_sigma, write_csv

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2
LATTICE_RANGE = (2, 6)
FORMATS = ("csv", "json")
UNITS = {"gev": (1.0, "GeV^-2"), "nb": (GEV2_TO_NB, "nb")}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    process: str = "eemumu"
    sqrt_s: float | None = None
    angles: int = 19
    mc_samples: int = 0
    seed: int = 0
    m_e: float = M_E
    m_mu: float = M_MU
    coupling: float = E_CHARGE
    format: str = "csv"
    units: str = "gev"
    out: str | None = None
    lattice_n: int = 4
    lattice_coupling: float = 0.3

    @classmethod
    def from_mapping(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**data)

    def merged(self, overrides: dict) -> "RunConfig":
        data = asdict(self)
        data.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig.from_mapping(data)

    def resolved_sqrt_s(self) -> float:
        if self.sqrt_s is not None:
            return float(self.sqrt_s)
        if self.process == "compton":
            return compton_sqrt_s(1e-3 * self.m_e, self.m_e)
        return 3 * self.m_mu

    def validate(self) -> "RunConfig":
        def number(name, integer=False):
            value = getattr(self, name)
            ok = isinstance(value, int) if integer else isinstance(value, (int, float))
            if not ok or isinstance(value, bool):
                raise UsageError(f"{name} must be {'an integer' if integer else 'a number'}, got {value!r}")

        if self.process not in PROCESSES:
            raise UsageError(f"process must be one of {', '.join(PROCESSES)}")
        if self.units not in UNITS:
            raise UsageError(f"units must be one of {', '.join(UNITS)}")
        if self.format not in FORMATS:
            raise UsageError(f"format must be one of {', '.join(FORMATS)}")
        for name in ("angles", "mc_samples", "seed", "lattice_n"):
            number(name, integer=True)
        for name in ("m_e", "m_mu", "coupling", "lattice_coupling"):
            number(name)
        if self.sqrt_s is not None:
            number("sqrt_s")
            if self.sqrt_s <= 0:
                raise UsageError("sqrt_s must be positive")
        if self.angles < 2:
            raise UsageError("angles must be at least 2")
        if self.mc_samples and self.mc_samples < 10_000:
            raise UsageError("mc_samples must be 0 (angle scan) or at least 10000")
        if self.mc_samples < 0 or self.seed < 0:
            raise UsageError("mc_samples and seed must be nonnegative")
        if self.m_e <= 0 or self.m_mu <= 0:
            raise UsageError("masses must be positive")
        return self


def cos_grid(count: int) -> list:
    """Evenly spaced cos(theta) in [-1, 1], exactly symmetric about zero."""
    return [float(Fraction(2 * k - (count - 1), count - 1)) for k in range(count)]


def scan_points(cfg: RunConfig) -> list:
    sqrt_s = cfg.resolved_sqrt_s()
    common = dict(e=cfg.coupling, m_e=cfg.m_e, m_mu=cfg.m_mu)
    if cfg.mc_samples:
        sigma, err = total_sigma(cfg.process, sqrt_s, n_samples=cfg.mc_samples, seed=cfg.seed, **common)
        return [CrossSectionPoint(sqrt_s, "total", sigma, err, cfg.process)]
    return [dsigma_domega(cfg.process, sqrt_s, c, **common) for c in cos_grid(cfg.angles)]


def render_scan(cfg: RunConfig, points: list) -> str:
    scale, units = UNITS[cfg.units]
    if not cfg.mc_samples:
        units += "/sr"
    if cfg.format == "csv":
        return write_csv(points, units=units, scale=scale)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "kind": "total_cross_section" if cfg.mc_samples else "angular_scan",
        "config": asdict(cfg) | {"sqrt_s": cfg.resolved_sqrt_s()},
        "units": units,
        "points": [
            {"process": p.process, "sqrt_s": p.sqrt_s, "cos_theta": p.cos_theta,
             "value": p.dsigma_domega * scale, "mc_error": p.mc_error * scale}
            for p in points
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(payload: dict) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, **payload}, indent=2, default=str) + "\n"


def cmd_verify(suite: str, cfg: RunConfig) -> int:
    from .suites import run_suite

    report = run_suite(suite, seed=cfg.seed, n=cfg.lattice_n, e=cfg.lattice_coupling)
    _emit(_json({"command": "verify", **report}), cfg.out)
    for check in report["checks"]:
        if not check["passed"]:
            print(f"FAIL {check['name']}: residual {check['max_residual']:.3e} > {check['tolerance']:.1e}",
                  file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_FAILURE


def cmd_scan(cfg: RunConfig) -> int:
    try:
        points = scan_points(cfg)
    except CoulqedError as exc:
        print(f"scan failed: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    _emit(render_scan(cfg, points), cfg.out)
    return EXIT_OK


def cmd_lattice_check(cfg: RunConfig, samples: int) -> int:
    from .lattice_checks import lattice_report

    lo, hi = LATTICE_RANGE
    if not lo <= cfg.lattice_n <= hi:
        raise UsageError(f"--n must lie in [{lo}, {hi}], got {cfg.lattice_n}")
    report = lattice_report(cfg.lattice_n, cfg.lattice_coupling, samples=samples, seed=cfg.seed)
    report.pop("schema_version")
    _emit(_json({"command": "lattice-check", **report}), cfg.out)
    for label, tower in report["constraints"].items():
        if not tower["passed"]:
            reason = tower["failure"] or f"found {tower['secondary']}, expected {tower['expected']['secondary']}"
            print(f"FAIL constraint tower {label} (e = {tower['coupling']}): {reason}", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_FAILURE


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    from .suites import SUITES

    parser = _Parser(prog="coulqed", description="Coulomb-gauge QED verification and cross-section tool")
    common = _Parser(add_help=False)
    common.add_argument("--config", help="flat JSON file of RunConfig keys; flags override it")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="write the report here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    verify = sub.add_parser("verify", parents=[common], help="run invariant suites")
    verify.add_argument("--suite", choices=SUITES, default="all")
    verify.add_argument("--n", dest="lattice_n", type=int, help="lattice sites per axis for the bracket suite")
    verify.add_argument("--lattice-coupling", dest="lattice_coupling", type=float)

    scan = sub.add_parser("scan", parents=[common], help="angular scan or Monte Carlo total cross section")
    scan.add_argument("--process", choices=PROCESSES)
    scan.add_argument("--sqrt-s", dest="sqrt_s", type=float, help="centre-of-mass energy in GeV")
    scan.add_argument("--angles", type=int, help="number of cos(theta) grid points")
    scan.add_argument("--mc-samples", dest="mc_samples", type=int, help="Monte Carlo samples (total cross section)")
    scan.add_argument("--format", choices=FORMATS)
    scan.add_argument("--units", choices=tuple(UNITS), help="gev (natural units, default) or nb")
    scan.add_argument("--m-e", dest="m_e", type=float)
    scan.add_argument("--m-mu", dest="m_mu", type=float)
    scan.add_argument("--coupling", type=float)

    lattice = sub.add_parser("lattice-check", parents=[common], help="constraint tower and bracket residuals")
    lattice.add_argument("--n", dest="lattice_n", type=int)
    lattice.add_argument("--coupling", dest="lattice_coupling", type=float)
    lattice.add_argument("--samples", type=int, default=5, help="random polynomials per constraint family")
    return parser


_OVERRIDE_KEYS = ("seed", "out", "process", "sqrt_s", "angles", "mc_samples", "format", "units", "m_e", "m_mu",
                  "coupling", "lattice_n", "lattice_coupling")


def load_config(path: str | None) -> RunConfig:
    if not path:
        return RunConfig()
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config must be a flat JSON object")
    return RunConfig.from_mapping(data)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        overrides = {k: getattr(args, k) for k in _OVERRIDE_KEYS if hasattr(args, k)}
        try:
            cfg = load_config(args.config).merged(overrides).validate()
        except TypeError as exc:
            raise UsageError(str(exc)) from exc
        if args.command == "verify":
            return cmd_verify(args.suite, cfg)
        if args.command == "scan":
            return cmd_scan(cfg)
        return cmd_lattice_check(cfg, args.samples)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CoulqedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
