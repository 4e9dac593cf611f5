"""Command-line driver: ``scarmps <command> [--config file] [--set key=value ...]``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage,
config or parameter-domain errors.
"""

from __future__ import annotations

import argparse
import copy
import datetime as _dt
import json
import math
import sys
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from . import __version__
from .core import open_chain, ring, spin_operators, torus
from .ed import ObcSetup, assemble, eigenvalue_csv, momentum_filter, obc_scar_check, zero_space
from .models import (
    ParameterDomainError,
    model1_density,
    model1_tensors,
    model2_density,
    model2_tensors,
    params_from_dict,
    params_to_dict,
    spin2_2d_model,
    xyz_dm_2d_model,
)
from .mps1d import build_pbc, correlation_length, correlator_csv, correlator_scan, transfer_spectrum
from .multiplet import collinearity, expand_multiplet, momentum_residual, rydberg_projector, vn_formula
from .peps2d import build_torus_state
from .solver import SolveOptions, result_to_json, solve_dehp_1d
from .verifier import check_link_1d, convention_search, global_zero_check, solve_E_given_A

COMMANDS = ("verify", "spectrum", "multiplet", "correlate", "obc", "solve")
MODELS_1D = ("model1", "model2")
MODELS_2D = ("spin2_2d", "xyz_dm_2d")

CONFIG_SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "scarmps run config",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "command": {"enum": list(COMMANDS)},
        "model": {"enum": list(MODELS_1D + MODELS_2D)},
        "params": {"type": "object"},
        "lattice": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_sites": {"type": "integer", "minimum": 2},
                "lx": {"type": "integer", "minimum": 2},
                "ly": {"type": "integer", "minimum": 2},
            },
        },
        "tolerance": {"type": "number", "exclusiveMinimum": 0},
        "seed": {"type": "integer"},
        "out": {"type": ["string", "null"]},
        "format": {"enum": ["json", "csv"]},
        "options": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_max": {"type": "integer", "minimum": 0},
                "observable": {"enum": ["sx", "sy", "sz"]},
                "r_max": {"type": "integer", "minimum": 1},
                "hz1": {"type": "number"},
                "hxN": {"type": "number"},
                "chi": {"type": "integer", "minimum": 1},
                "multistarts": {"type": "integer", "minimum": 1},
                "max_iterations": {"type": "integer", "minimum": 0},
                "residual_target": {"type": "number", "exclusiveMinimum": 0},
                "record_trace": {"type": "boolean"},
            },
        },
    },
}

DEFAULT_PARAMS = {
    "model1": {"two_s": 1, "D": [1.0, 1.0, 1.0], "a": 2.0},
    "model2": {"jy": 1.0, "jz": 1.0, "hy": 1.0},
    "spin2_2d": {"a": 1.0, "b": 1.0, "lambda": [1.0] * 5, "hz": 0.0},
    "xyz_dm_2d": {"jx": 1.0, "jy": 2.0, "jz": 3.0, "dxy": 0.5, "hz_sign": 1},
}

CONVENTIONS = {
    "basis": "local states ordered by descending m; site 0 is the slowest index",
    "torus_sites": "site index y * lx + x",
    "tensor_legs_2d": "A[s, a_x, b_x, a_y, b_y]; upper indices are the b legs",
    "correlation_length": "C(r) ~ exp(-r / xi), xi = 1 / ln|l1 / l2|",
    "model2_onsite_split": "onsite terms split symmetrically over the two bond sites",
    "rydberg": "no two neighbouring sites both below m = S",
}


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# config handling


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _set_path(cfg: dict, dotted: str, value: Any) -> None:
    keys = dotted.split(".")
    node = cfg
    for k in keys[:-1]:
        node = node.setdefault(k, {})
        if not isinstance(node, dict):
            raise ConfigError(f"--set {dotted}: '{k}' is not a block")
    node[keys[-1]] = value


def resolve_config(args: argparse.Namespace) -> dict:
    """Defaults < config file < --set < explicit flags, then schema validation."""
    cfg: dict = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("config file must hold a JSON object")
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, val = item.split("=", 1)
        _set_path(cfg, key.strip(), _parse_value(val))
    if args.model is not None:
        cfg["model"] = args.model
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.out is not None:
        cfg["out"] = args.out
    if args.format is not None:
        cfg["format"] = args.format
    if "command" in cfg and cfg["command"] != args.command:
        raise ConfigError(f"config command {cfg['command']!r} does not match {args.command!r}")
    cfg["command"] = args.command

    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {exc.message}") from exc

    cfg.setdefault("model", "model1")
    params = copy.deepcopy(DEFAULT_PARAMS[cfg["model"]])
    params.update(cfg.get("params", {}))
    cfg["params"] = params
    lat = dict(cfg.get("lattice", {}))
    if cfg["model"] in MODELS_2D:
        if "n_sites" in lat:
            raise ConfigError("2D models take lattice.lx and lattice.ly")
        lat.setdefault("lx", 2)
        lat.setdefault("ly", 2)
    else:
        if "lx" in lat or "ly" in lat:
            raise ConfigError("1D models take lattice.n_sites")
        lat.setdefault("n_sites", 8)
    cfg["lattice"] = lat
    cfg.setdefault("tolerance", 1e-9)
    cfg.setdefault("seed", 0)
    cfg.setdefault("out", None)
    cfg.setdefault("format", "csv" if args.command == "correlate" else "json")
    cfg.setdefault("options", {})
    return cfg


def _params(cfg: dict):
    try:
        return params_from_dict(cfg["model"], cfg["params"])
    except KeyError as exc:
        raise ConfigError(str(exc.args[0]) if exc.args else str(exc)) from exc
    except TypeError as exc:
        raise ConfigError(f"bad parameter block: {exc}") from exc


def _model_1d(cfg: dict):
    p = _params(cfg)
    if cfg["model"] == "model1":
        h = model1_density(p)
        A, E = model1_tensors(p)
        if E is None:
            E, _ = solve_E_given_A(h, A)
        return p, h, A, E
    if cfg["model"] == "model2":
        A, E = model2_tensors(p)
        return p, model2_density(p), A, E
    raise ConfigError(f"{cfg['model']} is not a 1D model")


def _model_2d(cfg: dict):
    p = _params(cfg)
    build = {"spin2_2d": spin2_2d_model, "xyz_dm_2d": xyz_dm_2d_model}.get(cfg["model"])
    if build is None:
        raise ConfigError(f"{cfg['model']} is not a 2D model")
    h, A, E = build(p)
    return p, h, A, E


# ---------------------------------------------------------------------------
# commands; each returns (passed, report dict, optional text payload)


def _check(model: str, lattice: str, abs_: float, rel: float, tol: float, convention=None) -> dict:
    return {
        "model": model,
        "lattice": lattice,
        "residual_abs": abs_,
        "residual_rel": rel,
        "convention": convention,
        "pass": bool(rel <= tol),
    }


def cmd_verify(cfg: dict):
    tol = cfg["tolerance"]
    model = cfg["model"]
    checks = []
    if model in MODELS_1D:
        _, h, A, E = _model_1d(cfg)
        n = cfg["lattice"]["n_sites"]
        link = check_link_1d(h, A, E)
        checks.append(_check(model, "link", link.absolute, link.relative, tol))
        # one error slot, so node cancellation is the telescoping E - E = 0
        checks.append(_check(model, "node", 0.0, 0.0, tol))
        g = global_zero_check(h, ring(n), build_pbc(A, n))
        checks.append(_check(model, f"ring {n}", g.zero_residual * g.norm, g.zero_residual, tol))
        conv = None
    else:
        _, h, A, E = _model_2d(cfg)
        lx, ly = cfg["lattice"]["lx"], cfg["lattice"]["ly"]
        search = convention_search(h, A, E, tol=min(tol, 1e-10))
        conv = search.convention.as_dict()
        for dr, r in search.link.items():
            checks.append(_check(model, f"link {dr}", r.absolute, r.relative, tol, conv))
        checks.append(_check(model, "node", search.node.absolute, search.node.relative, tol, conv))
        lat = torus(lx, ly)
        g = global_zero_check(h, lat, build_torus_state(A, lx, ly))
        name = f"torus {lx}x{ly}" + (" (doubled edges)" if lat.has_duplicate_edges else "")
        checks.append(_check(model, name, g.zero_residual * g.norm, g.zero_residual, tol, conv))
    passed = all(c["pass"] for c in checks)
    return passed, {"checks": checks, "convention_search": conv}, None


def cmd_spectrum(cfg: dict):
    model = cfg["model"]
    if model in MODELS_1D:
        _, h, _, _ = _model_1d(cfg)
        n = cfg["lattice"]["n_sites"]
        lat = ring(n)
    else:
        _, h, _, _ = _model_2d(cfg)
        lat = torus(cfg["lattice"]["lx"], cfg["lattice"]["ly"])
    H = assemble(h, lat, dense=True)
    rep = zero_space(H)
    out = rep.as_dict()
    out["lattice"] = lat.describe()
    if model in MODELS_1D and rep.zero_count:
        counts = momentum_filter(list(rep.zero_vectors.T), lat.n_sites, h.d)
        out["momentum_counts"] = {str(k): v for k, v in counts.items() if v}
    text = eigenvalue_csv(rep.eigenvalues) if cfg["format"] == "csv" else None
    return rep.certified, out, text


def cmd_multiplet(cfg: dict):
    if cfg["model"] != "model1":
        raise ConfigError("multiplet is defined for model1 only")
    p = _params(cfg)
    n = cfg["lattice"]["n_sites"]
    n_max = cfg["options"].get("n_max", n // 2)
    try:
        basis = expand_multiplet(p.two_s, p.D, n, n_max)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    h = model1_density(p)
    proj = rydberg_projector(n, p.two_s)
    tol = cfg["tolerance"]
    rows = []
    ok = basis.rank == n_max + 1
    for k, (v, raw) in enumerate(zip(basis.vectors, basis.raw_norms)):
        g = global_zero_check(h, ring(n), v)
        row = {
            "n": k,
            "norm": raw,
            "h_residual": g.zero_residual,
            "momentum_residual": momentum_residual(v, p.two_s + 1, n),
            "rydberg_leakage": proj.leakage(v),
            "collinearity": None,
        }
        if p.two_s == 1 and 1 <= k <= 5 and n >= 2 * k:
            row["collinearity"] = collinearity(v, vn_formula(n, p.delta, k))
        ok &= row["h_residual"] <= max(tol, 1e-8)
        ok &= row["momentum_residual"] <= 1e-10 and row["rydberg_leakage"] <= 1e-10
        if row["collinearity"] is not None:
            ok &= row["collinearity"] >= 1 - 1e-9
        rows.append(row)
    return bool(ok), {"rank": basis.rank, "expected_rank": n_max + 1, "states": rows}, None


def cmd_correlate(cfg: dict):
    p, h, A, _ = _model_1d(cfg)
    n = cfg["lattice"]["n_sites"]
    ops = spin_operators(h.d - 1)
    name = cfg["options"].get("observable", "sz")
    O = getattr(ops, name)
    r_max = cfg["options"].get("r_max", n // 2)
    if r_max >= n:
        raise ConfigError(f"r_max must be below n_sites={n}")
    rows = correlator_scan(A, O, O, n, r_max)
    cl = correlation_length(A)
    out = {
        "observable": name,
        "transfer_spectrum": [[z.real, z.imag] for z in transfer_spectrum(A)],
        "xi": cl.xi,
        "ratio": cl.ratio,
        "phase": cl.phase,
        "xi_log_convention": cl.xi_log_convention,
        "rows": [{"r": r, "full": [f.real, f.imag], "connected": [c.real, c.imag]} for r, f, c in rows],
    }
    text = correlator_csv(rows) if cfg["format"] == "csv" else None
    return True, out, text


def cmd_obc(cfg: dict):
    if cfg["model"] != "model1":
        raise ConfigError("obc is defined for model1 only")
    D = cfg["params"].get("D", DEFAULT_PARAMS["model1"]["D"])
    opts = cfg["options"]
    setup = ObcSetup(tuple(D), opts.get("hz1", 0.0), opts.get("hxN", 0.0))
    n = cfg["lattice"]["n_sites"]
    res = obc_scar_check(setup, n)
    res["h1"] = list(setup.h1)
    res["hN"] = list(setup.hN)
    ok = res["residual"] <= cfg["tolerance"] and res.get("multiplicity", 1) == 1
    return bool(ok), res, None


def cmd_solve(cfg: dict):
    _, h, _, _ = _model_1d(cfg)
    o = cfg["options"]
    opts = SolveOptions(
        chi=o.get("chi", 2),
        multistarts=o.get("multistarts", 10),
        max_iterations=o.get("max_iterations", 500),
        residual_target=o.get("residual_target", 1e-12),
        seed=cfg["seed"],
        record_trace=o.get("record_trace", False),
    )
    results = solve_dehp_1d(h, opts)
    doc = json.loads(result_to_json(results, opts, include_trace=opts.record_trace))
    best = results[0]
    doc["best_residual"] = best.residual
    ok = best.residual <= max(cfg["tolerance"], opts.residual_target)
    return bool(ok), doc, None


HANDLERS = {
    "verify": cmd_verify,
    "spectrum": cmd_spectrum,
    "multiplet": cmd_multiplet,
    "correlate": cmd_correlate,
    "obc": cmd_obc,
    "solve": cmd_solve,
}


# ---------------------------------------------------------------------------
# reports


def _jsonable(x: Any) -> Any:
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [_jsonable(float(x.real)), _jsonable(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return x
    return x


def build_report(cfg: dict, passed: bool, body: dict, timestamp: bool) -> str:
    echo = dict(cfg)
    if cfg["model"] in ("model1", "model2", "spin2_2d", "xyz_dm_2d"):
        try:
            echo["params"] = params_to_dict(_params(cfg))
        except ConfigError:
            pass
    doc = {
        "command": cfg["command"],
        "version": __version__,
        "config": echo,
        "seed": cfg["seed"],
        "conventions": CONVENTIONS,
        "pass": passed,
        "result": body,
    }
    if timestamp:
        doc["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="scarmps", description="Exact scar MPS/PEPS checks.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--model", choices=MODELS_1D + MODELS_2D)
        sp.add_argument("--set", action="append", metavar="KEY=VALUE", help="dotted key, JSON value")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="report path (default stdout)")
        sp.add_argument("--format", choices=["json", "csv"])
        sp.add_argument("--no-timestamp", action="store_true")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        cfg = resolve_config(args)
        passed, body, text = HANDLERS[args.command](cfg)
    except (ConfigError, ParameterDomainError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    payload = text if text is not None else build_report(cfg, passed, body, not args.no_timestamp)
    if cfg["out"]:
        Path(cfg["out"]).write_text(payload, encoding="utf-8")
    else:
        sys.stdout.write(payload)
    return 0 if passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
