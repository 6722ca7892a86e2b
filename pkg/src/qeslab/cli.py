"""Config-driven command line: verify | spectrum | classify | boundary-plot.

Configs are JSON with exact rationals written as "p/q" strings and
polynomials in the text format; unknown keys are rejected.  Reports are
JSON with sorted keys, exact quantities as strings, and floats printed
with 17 significant digits, so identical configs produce byte-identical
reports.  Exit codes: 0 all checks pass, 1 a check failed, 2 config
error, 3 inconclusive analysis.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction

from .poly import MultiPoly, rat, rat_str
from . import geometry
from .families import (FamilyInstance, InvalidParams, DegenerateParams,
                       build_h2, coefficient_functions, expected_det,
                       exponents_of, prefactor_of, random_instance,
                       assemble_plane_hamiltonian)
from .domains import (DomainSpec, InvalidDomainError, UnmatchedBoundaryError,
                      curve_samples, region_label_points)
from .classify import classify, quadrature_crosscheck
from .spaces import (space_fmn, space_rect, space_1d, matrix_of, char_poly,
                     eigenvalues, rational_eigenvalues, eigenpolynomials,
                     is_invariant, NotInvariantError, RootFindingFailure)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_INCONCLUSIVE = 3


class ConfigError(ValueError):
    pass


def _fmt_float(value: float) -> float:
    return float(format(value, ".17g"))


def _require_keys(data: dict, allowed: set, context: str) -> None:
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {context}: {sorted(unknown)}")


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    return data


def _instance_from(config: dict) -> FamilyInstance:
    if "instance" not in config:
        raise ConfigError("config requires an 'instance' object")
    try:
        return FamilyInstance.from_json_dict(config["instance"])
    except (InvalidParams, ValueError) as exc:
        raise ConfigError(str(exc))


def _write_report(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out is None:
        sys.stdout.write(text)
        return
    tmp = out + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, out)


# -- verify -------------------------------------------------------------------


def _space_for(inst: FamilyInstance, n: int):
    if inst.variant == "HexExample":
        nx, ny = 2 * inst.j, 2 * inst.jt
        if nx.denominator != 1 or ny.denominator != 1:
            raise ConfigError("module requires integral 2j and 2jt")
        return space_rect(int(nx), int(ny))
    return space_fmn(inst.m, n)


def _verify_one(inst: FamilyInstance, n_values: list, overrides: dict) -> dict:
    checks = []
    if inst.variant == "HexExample" or not overrides:
        op = build_h2(inst)
    else:
        fns = coefficient_functions(inst)
        qm_extra = overrides.get("Qm_add")
        q1_extra = overrides.get("Q1y_add")
        if qm_extra is not None:
            fns["Qm"] = fns["Qm"] + qm_extra
        if q1_extra is not None:
            fns["Q1y"] = fns["Q1y"] + q1_extra
        op = assemble_plane_hamiltonian(inst.p0, inst.q0, fns["Pm"], fns["P2m"],
                                        fns["metric_xy"], fns["P2y"],
                                        fns["Qm"], fns["Q1y"])
    for n in n_values:
        report = is_invariant(op, _space_for(inst, n))
        checks.append({
            "name": f"invariance n={n}", "pass": report.ok,
            "witness": None if report.ok else report.witness.to_text(),
        })
    g = geometry.extract_metric(op)
    det = geometry.det_metric(g)
    gauge = geometry.gauge_field(op, g)
    checks.append({"name": "closure", "pass": geometry.closure_check(gauge)})
    const = det.proportional_to(expected_det(inst))
    checks.append({"name": "determinant", "pass": const is not None,
                   "constant": None if const is None else rat_str(const)})
    if inst.variant != "HexExample":
        pre = prefactor_of(inst)
        ok = geometry.gauge_factor_check(gauge, pre.log_grad())
        checks.append({"name": "gauge_factor", "pass": ok})
    return {"instance": inst.to_json_dict(), "checks": checks,
            "pass": all(c["pass"] for c in checks)}


def cmd_verify(config: dict, args) -> tuple:
    _require_keys(config, {"instance", "sweep", "invariance_n", "overrides"},
                  "verify config")
    n_values = config.get("invariance_n", [1, 2])
    if (not isinstance(n_values, list) or not n_values
            or any(not isinstance(n, int) or n < 1 for n in n_values)):
        raise ConfigError("invariance_n must be a list of positive integers")
    overrides = {}
    if "overrides" in config:
        _require_keys(config["overrides"], {"Qm_add", "Q1y_add"}, "overrides")
        if "Qm_add" in config["overrides"]:
            poly = MultiPoly.parse(str(config["overrides"]["Qm_add"]))
            overrides["Qm_add"] = poly.on_vars(("y",)) if poly.vars != ("y",) else poly
        if "Q1y_add" in config["overrides"]:
            poly = MultiPoly.parse(str(config["overrides"]["Q1y_add"]))
            overrides["Q1y_add"] = poly.on_vars(("y",)) if poly.vars != ("y",) else poly
    if "sweep" in config:
        sweep = config["sweep"]
        _require_keys(sweep, {"variant", "m", "draws"}, "sweep")
        rng = random.Random(args.seed)
        draws = []
        for _ in range(int(sweep.get("draws", 5))):
            inst = random_instance(sweep["variant"], rng, sweep.get("m"))
            draws.append(_verify_one(inst, n_values, {}))
        ok = all(d["pass"] for d in draws)
        report = {"command": "verify", "sweep": sweep, "seed": args.seed,
                  "draws": draws, "pass": ok}
        return report, EXIT_OK if ok else EXIT_CHECK_FAILED
    inst = _instance_from(config)
    result = _verify_one(inst, n_values, overrides)
    report = {"command": "verify", **result}
    return report, EXIT_OK if result["pass"] else EXIT_CHECK_FAILED


# -- spectrum -----------------------------------------------------------------


def cmd_spectrum(config: dict, args) -> tuple:
    _require_keys(config, {"instance", "space"}, "spectrum config")
    inst = _instance_from(config)
    space_cfg = config.get("space", {})
    _require_keys(space_cfg, {"kind", "m", "n", "nx", "ny"}, "space")
    kind = space_cfg.get("kind", "fmn")
    if kind == "fmn":
        space = space_fmn(int(space_cfg.get("m", inst.m)), int(space_cfg.get("n", 1)))
    elif kind == "rect":
        space = space_rect(int(space_cfg["nx"]), int(space_cfg["ny"]))
    elif kind == "1d":
        space = space_1d(int(space_cfg["n"]))
    else:
        raise ConfigError(f"unknown space kind {kind!r}")
    op = build_h2(inst)
    try:
        mat = matrix_of(op, space)
    except NotInvariantError as exc:
        return ({"command": "spectrum", "instance": inst.to_json_dict(),
                 "error": str(exc)}, EXIT_CHECK_FAILED)
    cp = char_poly(mat)
    try:
        pattern = eigenvalues(mat, args.tol)
    except RootFindingFailure as exc:
        return ({"command": "spectrum", "instance": inst.to_json_dict(),
                 "error": str(exc)}, EXIT_CHECK_FAILED)
    rational = rational_eigenvalues(mat)
    eigs = {}
    for val in rational:
        polys = eigenpolynomials(mat, val)
        eigs[rat_str(val)] = [p.to_text() for p in polys]
    report = {
        "command": "spectrum",
        "instance": inst.to_json_dict(),
        "space": space.describe(),
        "dim": mat.dim(),
        "matrix_csv": mat.to_csv(),
        "char_poly": cp.to_text(),
        "eigenvalues": {
            "real": [_fmt_float(v) for v in pattern.real_eigs],
            "pairs": [[_fmt_float(p[0].real), _fmt_float(abs(p[0].imag))]
                      for p in pattern.pair_eigs],
            "residual_max": _fmt_float(max(pattern.residuals, default=0.0)),
        },
        "rational_eigenvalues": eigs,
        "pattern": {"dim": pattern.dim(),
                    "real": len(pattern.real_eigs),
                    "pairs": len(pattern.pair_eigs)},
    }
    return report, EXIT_OK


# -- classify -----------------------------------------------------------------


def _boundary_json(check) -> dict:
    return {
        "boundary": check.name,
        "explicit_exponent": rat_str(check.explicit_exponent),
        "effective_exponent": rat_str(check.effective_exponent()),
        "det_order": check.det_order,
        "hermitian": check.hermitian_ok,
        "integrable": check.integrable_ok,
    }


def cmd_classify(config: dict, args) -> tuple:
    _require_keys(config, {"instance", "domain", "n", "pol_degree", "quadrature"},
                  "classify config")
    inst = _instance_from(config)
    if "domain" not in config:
        raise ConfigError("classify config requires a 'domain' object")
    try:
        domain = DomainSpec.from_json_dict(config["domain"])
    except (InvalidDomainError, ValueError) as exc:
        raise ConfigError(str(exc))
    n = int(config.get("n", 1))
    pol_degree = int(config.get("pol_degree", 0))
    with_quadrature = bool(config.get("quadrature", True))
    try:
        verdict = classify(inst, domain, n=n, pol_degree=pol_degree,
                           with_quadrature=with_quadrature, tol=args.tol)
    except (UnmatchedBoundaryError, InvalidDomainError, DegenerateParams) as exc:
        raise ConfigError(str(exc))
    norm = verdict.norm_report
    report = {
        "command": "classify",
        "instance": inst.to_json_dict(),
        "domain": domain.to_json_dict(),
        "outcome": verdict.outcome,
        "closure": verdict.closure_ok,
        "hermiticity": [_boundary_json(b) for b in verdict.hermiticity],
        "normalizability": {
            "verdict": norm.verdict,
            "boundary": [_boundary_json(b) for b in norm.boundary_conditions],
            "directions": [{
                "direction": d.direction,
                "method": d.method,
                "exponent": None if d.exponent is None else rat_str(d.exponent),
                "degree_growth": d.degree_growth,
                "exp_sign": d.exp_sign,
                "status": d.status,
            } for d in norm.asymptotic_conditions],
            "max_pol_degree": norm.max_pol_degree,
        },
        "spectral": None if verdict.spectral is None else {
            "real": [_fmt_float(v) for v in verdict.spectral.real_eigs],
            "pairs": [[_fmt_float(p[0].real), _fmt_float(abs(p[0].imag))]
                      for p in verdict.spectral.pair_eigs],
        },
        "quadrature": None if verdict.quadrature is None else {
            "trend": verdict.quadrature.trend,
            "values": [_fmt_float(v) for v in verdict.quadrature.values],
            "ratios": [_fmt_float(r) for r in verdict.quadrature.ratios],
            "failure": verdict.quadrature.failure,
        },
    }
    if verdict.outcome == "Inconclusive":
        return report, EXIT_INCONCLUSIVE
    if not verdict.closure_ok:
        return report, EXIT_CHECK_FAILED
    if verdict.quadrature is not None and verdict.quadrature.trend != "inconclusive":
        analytic = norm.verdict
        numeric = verdict.quadrature.trend
        agree = ((analytic == "Normalizable" and numeric == "converging")
                 or (analytic == "Divergent" and numeric == "diverging"))
        if not agree:
            report["disagreement"] = f"analytic {analytic} vs numeric {numeric}"
            return report, EXIT_CHECK_FAILED
    return report, EXIT_OK


# -- boundary plot --------------------------------------------------------------


def cmd_boundary_plot(config: dict, args) -> tuple:
    _require_keys(config, {"instance", "y_min", "y_max", "samples"},
                  "boundary-plot config")
    inst = _instance_from(config)
    if "y_min" not in config or "y_max" not in config:
        raise ConfigError("boundary-plot requires y_min and y_max")
    y_min, y_max = rat(config["y_min"]), rat(config["y_max"])
    samples = int(config.get("samples", 41))
    if y_max <= y_min:
        raise ConfigError("empty y range")
    if samples < 2:
        raise ConfigError("need at least 2 samples")
    out_dir = args.out or "boundary_plot"
    os.makedirs(out_dir, exist_ok=True)

    op = build_h2(inst)
    det = geometry.det_metric(geometry.extract_metric(op))
    curves = []
    if inst.variant != "HexExample":
        if inst.variant == "P1y_Sol3":
            curves = []  # determinant vanishes only on the axis line
        else:
            curves = [inst.xi1, inst.xi2_effective()]
    else:
        curves = [MultiPoly.zero(("y",))]

    files = []
    for i, xi in enumerate(curves, start=1):
        rows = curve_samples(xi, y_min, y_max, samples)
        path = os.path.join(out_dir, f"curve_{i}.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("y,xi\n")
            for yv, xv in rows:
                fh.write(f"{rat_str(yv)},{rat_str(xv)}\n")
        files.append(path)
    if not curves:
        # boundary is the horizontal axis: emit it as a marker line
        path = os.path.join(out_dir, "curve_1.csv")
        step = (y_max - y_min) / (samples - 1)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("y,xi\n")
            for k in range(samples):
                fh.write(f"0,{rat_str(y_min + step * k)}\n")
        files.append(path)

    labels = region_label_points(det, curves, y_min, y_max)
    path = os.path.join(out_dir, "regions.csv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("label,x,y,det_positive\n")
        for entry in labels:
            fh.write(f"{entry['label']},{rat_str(entry['x'])},"
                     f"{rat_str(entry['y'])},{int(entry['det_positive'])}\n")
    files.append(path)
    report = {"command": "boundary-plot", "instance": inst.to_json_dict(),
              "files": files,
              "labels": [{**e, "x": rat_str(e["x"]), "y": rat_str(e["y"])}
                         for e in labels]}
    return report, EXIT_OK


# -- entry point -----------------------------------------------------------------


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qeslab",
        description="Exact verification and classification of the "
                    "catalogued Hamiltonian families")
    parser.add_argument("command",
                        choices=["verify", "spectrum", "classify", "boundary-plot"])
    parser.add_argument("--config", required=True, help="JSON config path")
    parser.add_argument("--out", default=None,
                        help="report file (or output directory for boundary-plot)")
    parser.add_argument("--tol", type=float, default=1e-9,
                        help="eigenvalue tolerance")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for random-instance sweeps")
    args = parser.parse_args(argv)

    handlers = {
        "verify": cmd_verify,
        "spectrum": cmd_spectrum,
        "classify": cmd_classify,
        "boundary-plot": cmd_boundary_plot,
    }
    try:
        config = _load_config(args.config)
        report, code = handlers[args.command](config, args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG_ERROR
    if args.command == "boundary-plot":
        _write_report(report, None if args.out is None
                      else os.path.join(args.out, "report.json"))
    else:
        _write_report(report, args.out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
