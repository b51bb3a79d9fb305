"""Batch driver: solves, scans and theorem verifications as subcommands.

Every command reads an optional TOML or JSON config file, applies flag
overrides (flags win), and writes CSV + JSON artifacts plus a rendered
figure into the output directory.  Exit codes: 0 verification passed,
1 verification failed, 2 configuration or solver error.  CSV output uses
'.' decimals and 17 significant digits so identical configs reproduce
byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict
from pathlib import Path

try:
    import tomllib
except ImportError:  # python < 3.11
    import tomli as tomllib

from . import __version__
from .characterization import (
    FFamily,
    InvarianceReport,
    ScanConfig,
    invariance_scan,
    verify_theorem1,
    verify_theorem2,
)
from .core import (
    ScenarioSet,
    is_degenerate,
    moment_summary,
    run_axiom_suite,
)
from .distribution import (
    EQUALITY_THRESHOLD,
    FAMILIES,
    SublinearDistribution,
    canonical_family,
)
from .errors import GNormalError
from .gheat import GFunction1D, Grid, default_grid, dp_oracle, solve_gheat

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

PHI_CATALOG = {
    "x": lambda x: x,
    "x2": lambda x: x * x,
    "neg_x2": lambda x: -x * x,
    "abs": abs,
    "bump": lambda x: max(0.0, 1.0 - abs(x)),
    "tanh": math.tanh,
}

F_OVERRIDES = {
    "sqrt": None,  # the correct family, the default
    "1-abs": lambda lam: 1.0 - abs(lam),
    "const": lambda lam: 1.0,
}


def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    data = p.read_bytes()
    if p.suffix == ".json":
        return json.loads(data)
    if p.suffix == ".toml":
        return tomllib.loads(data.decode())
    try:
        return json.loads(data)
    except json.JSONDecodeError:
        return tomllib.loads(data.decode())


def _merged(args: argparse.Namespace, keys: dict[str, object]) -> dict:
    """Config values overridden by any flag that was explicitly set."""
    cfg = dict(keys)
    cfg.update(_load_config(args.config))
    for key in keys:
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = flag
    return cfg


def _parse_lambda_grid(value) -> tuple[float, ...]:
    if isinstance(value, str):
        parts = [p for p in value.split(",") if p.strip()]
        return tuple(float(p) for p in parts)
    return tuple(float(v) for v in value)


def _out_dir(args) -> Path:
    out = Path(args.out or "out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_scan_csv(path: Path, report: InvarianceReport) -> None:
    lines = ["lambda,deviation,h_bar,h_low"]
    for lam, dev, hb, hl in report.rows():
        lines.append(f"{_fmt(lam)},{_fmt(dev)},{_fmt(hb)},{_fmt(hl)}")
    path.write_text("\n".join(lines) + "\n")


def _scan_payload(report: InvarianceReport, threshold: float, passed: bool) -> dict:
    return {
        "passed": passed,
        "threshold": threshold,
        "reference": report.reference,
        "lambdas": list(report.lambdas),
        "deviations": list(report.deviations),
        "skipped_lambdas": list(report.skipped),
        "max_deviation": report.max_deviation,
        "h_bar": list(report.h_bar),
        "h_low": list(report.h_low),
    }


def _dist_from_cfg(cfg: dict, key: str, default_sigmas=None) -> SublinearDistribution:
    sub = cfg.get(key)
    if sub is not None:
        return SublinearDistribution.from_config(sub)
    if default_sigmas is None:
        raise GNormalError(f"missing distribution config '{key}'")
    lo, hi = default_sigmas
    return SublinearDistribution.gnormal(lo, hi)


# -- subcommands --------------------------------------------------------


def cmd_gheat(args) -> int:
    cfg = _merged(
        args,
        {
            "sigma_low": 0.5,
            "sigma_bar": 1.0,
            "phi": "x2",
            "n_points": 401,
            "t_final": 1.0,
            "cfl_fraction": 0.4,
            "x_min": None,
            "x_max": None,
            "oracle_steps": None,
        },
    )
    g = GFunction1D(float(cfg["sigma_low"]), float(cfg["sigma_bar"]))
    phi_name = cfg["phi"]
    if phi_name not in PHI_CATALOG:
        raise GNormalError(f"unknown phi '{phi_name}', have {sorted(PHI_CATALOG)}")
    if cfg["x_min"] is not None and cfg["x_max"] is not None:
        grid = Grid(
            float(cfg["x_min"]),
            float(cfg["x_max"]),
            int(cfg["n_points"]),
            float(cfg["t_final"]),
            float(cfg["cfl_fraction"]),
        )
    else:
        grid = default_grid(
            g.sigma_bar,
            float(cfg["t_final"]),
            int(cfg["n_points"]),
            cfl_fraction=float(cfg["cfl_fraction"]),
        )
    start = time.perf_counter()
    u = solve_gheat(g, PHI_CATALOG[phi_name], grid)
    runtime = time.perf_counter() - start
    oracle_value = None
    if cfg["oracle_steps"] is not None:
        oracle_value = dp_oracle(
            g, PHI_CATALOG[phi_name], grid.t_final, int(cfg["oracle_steps"])
        )

    out = _out_dir(args)
    (out / "gheat_profile.csv").write_text(u.to_csv())
    _write_json(
        out / "gheat_summary.json",
        {
            "value_at_zero": u.at_zero(),
            "oracle_value": oracle_value,
            "phi": phi_name,
            "sigma_low": g.sigma_low,
            "sigma_bar": g.sigma_bar,
            "grid": {
                "x_min": grid.x_min,
                "x_max": grid.x_max,
                "n_points": grid.n_points,
                "t_final": grid.t_final,
                "cfl_fraction": grid.cfl_fraction,
            },
            "runtime_seconds": runtime,
        },
    )
    from .plots import plot_profile

    plot_profile(
        grid.xs,
        u.values,
        out / "gheat_profile.png",
        f"G-heat solution, phi={phi_name}, band=({g.sigma_low:g}, {g.sigma_bar:g})",
    )
    print(f"gheat: u(t={grid.t_final:g}, 0) = {u.at_zero():.10g}")
    return EXIT_PASS


def cmd_moments(args) -> int:
    cfg = _merged(args, {"sigma_low": 0.5, "sigma_bar": 1.0, "distribution": None})
    if cfg.get("distribution"):
        dist = SublinearDistribution.from_config(cfg["distribution"])
    else:
        dist = SublinearDistribution.gnormal(
            float(cfg["sigma_low"]), float(cfg["sigma_bar"])
        )
    ms = moment_summary(dist)
    degenerate = is_degenerate(dist)
    out = _out_dir(args)
    _write_json(
        out / "moments.json", {**asdict(ms), "degenerate": degenerate}
    )
    (out / "moments.csv").write_text(
        "mu_bar,mu_low,var_bar,var_low,degenerate\n"
        f"{_fmt(ms.mu_bar)},{_fmt(ms.mu_low)},{_fmt(ms.var_bar)},"
        f"{_fmt(ms.var_low)},{int(degenerate)}\n"
    )
    print(
        f"moments: mu=[{ms.mu_low:.6g}, {ms.mu_bar:.6g}] "
        f"var=[{ms.var_low:.6g}, {ms.var_bar:.6g}] degenerate={degenerate}"
    )
    return EXIT_PASS


def cmd_axioms(args) -> int:
    cfg = _merged(args, {"seed": 0, "cases": 1000})
    violations = run_axiom_suite(int(cfg["seed"]), int(cfg["cases"]))
    out = _out_dir(args)
    _write_json(
        out / "axioms.json",
        {
            "seed": int(cfg["seed"]),
            "cases": int(cfg["cases"]),
            "violations": [asdict(v) for v in violations],
            "passed": not violations,
        },
    )
    print(f"axioms: {int(cfg['cases'])} cases, {len(violations)} violations")
    return EXIT_PASS if not violations else EXIT_FAIL


def _scan_like(args):
    cfg = _merged(
        args,
        {
            "sigma_low": 0.5,
            "sigma_bar": 1.0,
            "a": 1.0,
            "b": 1.0,
            "lambda_grid": "0,0.25,-0.25,0.5,-0.5,0.75,-0.75,0.9,-0.9",
            "threshold": EQUALITY_THRESHOLD,
            "f_override": "sqrt",
            "phi_family": "canonical",
            "dist_x": None,
            "dist_y": None,
        },
    )
    if cfg["phi_family"] not in FAMILIES:
        raise GNormalError(
            f"unknown phi family '{cfg['phi_family']}', have {sorted(FAMILIES)}"
        )
    return cfg


def cmd_scan(args) -> int:
    cfg = _scan_like(args)
    lambdas = _parse_lambda_grid(cfg["lambda_grid"])
    if not lambdas:
        raise GNormalError("empty lambda grid")
    sig = (float(cfg["sigma_low"]), float(cfg["sigma_bar"]))
    x = _dist_from_cfg(cfg, "dist_x", sig)
    y = _dist_from_cfg(cfg, "dist_y", sig)
    fam = FFamily(float(cfg["a"]), float(cfg["b"]))
    f_name = cfg["f_override"]
    if f_name not in F_OVERRIDES:
        raise GNormalError(f"unknown f_override '{f_name}', have {sorted(F_OVERRIDES)}")
    f = F_OVERRIDES[f_name] or fam
    phi_family = canonical_family(x.effective_sigma)
    threshold = float(cfg["threshold"])
    report = invariance_scan(x, y, f, lambdas, phi_family, x, "law(X)")
    passed = report.max_deviation <= threshold

    out = _out_dir(args)
    _write_scan_csv(out / "scan.csv", report)
    _write_json(out / "scan_report.json", _scan_payload(report, threshold, passed))
    from .plots import plot_scan

    plot_scan(report, threshold, out / "scan.png", "invariance scan")
    print(f"scan: max deviation {report.max_deviation:.3e} vs {threshold:g}")
    return EXIT_PASS if passed else EXIT_FAIL


def _emit_verification(args, name: str, report, extra: dict | None = None) -> int:
    out = _out_dir(args)
    payload = _scan_payload(report.scan, report.threshold, report.passed)
    payload["checks"] = {
        k: (list(v) if isinstance(v, tuple) else v) for k, v in report.checks.items()
    }
    if extra:
        payload.update(extra)
    _write_scan_csv(out / f"{name}_scan.csv", report.scan)
    _write_json(out / f"{name}_report.json", payload)
    from .plots import plot_scan

    plot_scan(report.scan, report.threshold, out / f"{name}_scan.png", name)
    verdict = "PASS" if report.passed else "FAIL"
    print(f"{name}: {verdict}, max deviation {report.scan.max_deviation:.3e}")
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_thm1(args) -> int:
    cfg = _scan_like(args)
    g = GFunction1D(float(cfg["sigma_low"]), float(cfg["sigma_bar"]))
    f_name = cfg["f_override"]
    if f_name not in F_OVERRIDES:
        raise GNormalError(f"unknown f_override '{f_name}'")
    dist_x = (
        SublinearDistribution.from_config(cfg["dist_x"]) if cfg.get("dist_x") else None
    )
    scan_cfg = ScanConfig(
        lambda_fractions=_parse_lambda_grid(cfg["lambda_grid"]),
        threshold=float(cfg["threshold"]),
    )
    report = verify_theorem1(
        g, scan_cfg, f_override=F_OVERRIDES[f_name], dist_x=dist_x
    )
    return _emit_verification(args, "thm1", report)


def cmd_thm2(args) -> int:
    cfg = _scan_like(args)
    g = GFunction1D(float(cfg["sigma_low"]), float(cfg["sigma_bar"]))
    scan_cfg = ScanConfig(
        lambda_fractions=_parse_lambda_grid(cfg["lambda_grid"]),
        threshold=float(cfg["threshold"]),
    )
    report = verify_theorem2(g, float(cfg["a"]), float(cfg["b"]), scan_cfg)
    return _emit_verification(args, "thm2", report)


def cmd_control(args) -> int:
    """Negative controls: wrong coefficient families and a non-G-normal
    input must all FAIL the scan; the command passes when they do."""
    cfg = _scan_like(args)
    g = GFunction1D(float(cfg["sigma_low"]), float(cfg["sigma_bar"]))
    scan_cfg = ScanConfig(
        lambda_fractions=_parse_lambda_grid(cfg["lambda_grid"]),
        threshold=float(cfg["threshold"]),
    )
    results = {}
    for name in ("1-abs", "const"):
        rep = verify_theorem1(g, scan_cfg, f_override=F_OVERRIDES[name])
        results[f"f={name}"] = rep
    two_point = SublinearDistribution.from_scenarios(
        ScenarioSet.symmetric_two_point([g.sigma_bar, g.sigma_low]),
        label="two-point",
    )
    results["two-point"] = verify_theorem1(g, scan_cfg, dist_x=two_point)

    out = _out_dir(args)
    payload, all_failed = {}, True
    for name, rep in results.items():
        payload[name] = _scan_payload(rep.scan, rep.threshold, rep.passed)
        all_failed = all_failed and not rep.passed
        print(
            f"control {name}: {'FAIL (expected)' if not rep.passed else 'PASS (unexpected)'}"
            f", max deviation {rep.scan.max_deviation:.3e}"
        )
    payload["all_controls_failed"] = all_failed
    _write_json(out / "control_report.json", payload)
    lines = ["control,max_deviation,failed_as_expected"]
    for name, rep in results.items():
        lines.append(f"{name},{_fmt(rep.scan.max_deviation)},{int(not rep.passed)}")
    (out / "control_report.csv").write_text("\n".join(lines) + "\n")
    return EXIT_PASS if all_failed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gnormal",
        description="Numerical toolkit for sublinear expectations and "
        "G-normal distribution checks.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="TOML or JSON config file")
        p.add_argument("--out", help="output directory (default: out)")
        p.add_argument("--sigma-low", dest="sigma_low", type=float)
        p.add_argument("--sigma-bar", dest="sigma_bar", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--oracle-steps", dest="oracle_steps", type=int)

    def scanlike(p):
        common(p)
        p.add_argument("--lambda-grid", dest="lambda_grid")
        p.add_argument("--phi-family", dest="phi_family")
        p.add_argument("--a", type=float)
        p.add_argument("--b", type=float)
        p.add_argument("--threshold", type=float)
        p.add_argument("--f-override", dest="f_override")

    p = sub.add_parser("gheat", help="solve the G-heat equation")
    common(p)
    p.add_argument("--phi", choices=sorted(PHI_CATALOG))
    p.add_argument("--n-points", dest="n_points", type=int)
    p.add_argument("--t-final", dest="t_final", type=float)
    p.set_defaults(func=cmd_gheat)

    p = sub.add_parser("moments", help="four-moment summary of a law")
    common(p)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("axioms", help="randomized sublinearity axiom suite")
    common(p)
    p.add_argument("--cases", type=int)
    p.set_defaults(func=cmd_axioms)

    for name, fn, help_ in (
        ("scan", cmd_scan, "lambda-invariance scan against law(X)"),
        ("thm1", cmd_thm1, "verify the identical-copy characterization"),
        ("thm2", cmd_thm2, "verify the two-law characterization"),
        ("control", cmd_control, "negative controls (must all fail)"),
    ):
        p = sub.add_parser(name, help=help_)
        scanlike(p)
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GNormalError, FileNotFoundError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
