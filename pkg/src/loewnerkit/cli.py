"""Batch front-end: ``loewnerkit <command> --config run.json``.

Commands: solve, signature, grunsky, faber, tau, bridge, verify.  Outputs
go to ``--out``, else ``$LOEWNERKIT_OUT``, else ``output.dir`` from the
config, else ``./out``.  Exit status: 0 success, 1 a verify identity failed,
2 bad configuration.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from . import grassmann, solver, witt, words
from .drivers import DriverPath, DriverSet, herglotz_to_drivers, make_polynomial_driver, random_polynomial_drivers
from .series import TruncatedTaylor

REPORT_VERSION = "1.0"
OUT_ENV = "LOEWNERKIT_OUT"
COMMANDS = ("solve", "signature", "grunsky", "faber", "tau", "bridge", "verify")

_complex = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}
_poly = {"type": "array", "items": _complex, "minItems": 1}
_real_poly = {"type": "array", "items": {"type": "number"}, "minItems": 1}
_pos_int = {"type": "integer", "minimum": 1}
# a driver is a bare coefficient list, {"poly": [...]}, or {"samples": [...]} (one per node)
_driver = {
    "oneOf": [
        _poly,
        {"type": "null"},
        {"type": "object", "additionalProperties": False, "required": ["poly"],
         "properties": {"poly": _poly}},
        {"type": "object", "additionalProperties": False, "required": ["samples"],
         "properties": {"samples": _poly}},
    ]
}
_real_driver = {
    "oneOf": [
        _real_poly,
        {"type": "object", "additionalProperties": False, "required": ["poly"],
         "properties": {"poly": _real_poly}},
        {"type": "object", "additionalProperties": False, "required": ["samples"],
         "properties": {"samples": _real_poly}},
    ]
}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "T": {"type": "number", "exclusiveMinimum": 0},
        "grid": _pos_int,
        "refine": _pos_int,
        "seed": {"type": "integer", "minimum": 0},
        "N": _pos_int,
        "M": _pos_int,
        "W": _pos_int,
        "N_tau": _pos_int,
        "drivers": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "x0": _real_driver,
                "x": {"type": "array", "items": _driver},
                "random": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "K": _pos_int,
                        "degree": _pos_int,
                        "scale": {"type": "number", "exclusiveMinimum": 0},
                    },
                    "required": ["K"],
                },
            },
        },
        "herglotz": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "a0": _real_poly,
                "a": {"type": "array", "items": _real_poly},
                "b": {"type": "array", "items": _real_poly},
            },
            "required": ["a0", "a", "b"],
        },
        "tvec": {"type": "array", "items": _complex},
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"dir": {"type": "string"}},
        },
        "tolerances": {
            "type": "object",
            "additionalProperties": {"type": "number", "exclusiveMinimum": 0},
        },
    },
}

DEFAULT_TOLERANCES = {
    "taylor_two_route": 1e-6,
    "C_equals_exp_x0": 1e-8,
    "sol_by_witt": 1e-6,
    "grunsky_triple_route": 1e-6,
    "grunsky_symmetry": 1e-8,
    "chen_shuffle": 1e-7,
    "faber_two_route": 1e-6,
    "faber_characterisations": 1e-6,
    "tau_by_witt": 1e-6,
    "tau_normalisation": 1e-12,
    "oracle_agreement": 1e-6,
    "right_action": 1e-12,
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    T: float = 1.0
    grid: int = 800
    refine: int = 8
    seed: int = 0
    N: int = 8
    M: int = 3
    W: int = 6
    N_tau: int = 4
    drivers: dict = field(default_factory=dict)
    herglotz: dict | None = None
    tvec: list = field(default_factory=lambda: [0.1])
    out_dir: str = "out"
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        try:
            jsonschema.validate(raw, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise ConfigError(f"config: {exc.message} at {'/'.join(map(str, exc.path)) or '<root>'}")
        cfg = cls()
        for key in ("T", "grid", "refine", "seed", "N", "M", "W", "N_tau"):
            if key in raw:
                setattr(cfg, key, raw[key])
        cfg.drivers = raw.get("drivers", {})
        cfg.herglotz = raw.get("herglotz")
        if "tvec" in raw:
            cfg.tvec = [_to_complex(v) for v in raw["tvec"]]
        cfg.out_dir = raw.get("output", {}).get("dir", cfg.out_dir)
        cfg.tolerances.update(raw.get("tolerances", {}))
        if cfg.W < 2 * cfg.M:
            raise ConfigError(f"config: W={cfg.W} must be at least 2M={2 * cfg.M}")
        if cfg.N_tau < cfg.M + 1:
            raise ConfigError(f"config: N_tau={cfg.N_tau} must be at least M+1={cfg.M + 1}")
        if len(cfg.tvec) > cfg.N_tau:
            raise ConfigError("config: tvec longer than N_tau")
        return cfg

    def driver_set(self) -> DriverSet:
        if self.herglotz is not None:
            return bridge_drivers(self)
        drv = self.drivers
        if "random" in drv:
            r = drv["random"]
            rng = np.random.default_rng(self.seed)
            return random_polynomial_drivers(rng, r["K"], self.grid, self.T,
                                             r.get("degree", 3), r.get("scale", 0.3))
        times = np.linspace(0.0, self.T, self.grid + 1)
        x0 = self._path(drv.get("x0", [0.0]), times, real=True)
        xs = tuple(self._path(c, times, real=False) for c in drv.get("x", []))
        return DriverSet(x0, xs)

    def _path(self, entry, times, real: bool) -> DriverPath:
        if entry is None:
            entry = [0.0]
        if isinstance(entry, dict) and "samples" in entry:
            vals = [_to_complex(v) for v in entry["samples"]]
            if len(vals) != times.size:
                raise ConfigError(f"config: samples need {times.size} values (grid + 1)")
            return DriverPath(times, np.array(vals), real=real)
        coeffs = entry["poly"] if isinstance(entry, dict) else entry
        return make_polynomial_driver([_to_complex(v) for v in coeffs], self.grid, self.T, real=real)


def _to_complex(v) -> complex:
    return complex(v[0], v[1]) if isinstance(v, list) else complex(v)


def bridge_drivers(cfg: RunConfig) -> DriverSet:
    h = cfg.herglotz
    if len(h["a"]) != len(h["b"]):
        raise ConfigError("config: herglotz.a and herglotz.b must have the same length")
    a0 = make_polynomial_driver(h["a0"], cfg.grid, cfg.T, real=True)
    a = [make_polynomial_driver(c, cfg.grid, cfg.T, real=True) for c in h["a"]]
    b = [make_polynomial_driver(c, cfg.grid, cfg.T, real=True) for c in h["b"]]
    return herglotz_to_drivers(a0, a, b)


# -- output ------------------------------------------------------------------

def _split(values) -> list:
    out = []
    for v in values:
        v = complex(v)
        out += [repr(v.real), repr(v.imag)]
    return out


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(path: Path, header: list, rows) -> Path:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _atomic_write(path, buf.getvalue())
    return path


def _complex_header(names) -> list:
    out = []
    for n in names:
        out += [f"re_{n}", f"im_{n}"]
    return out


# -- commands ----------------------------------------------------------------

def cmd_solve(cfg: RunConfig, ds: DriverSet, out: Path) -> list:
    traj = solver.solve_taylor_ode(ds, cfg.N, cfg.refine)
    nodes = np.arange(0, traj.times.size, cfg.refine)
    header = ["t"] + _complex_header(["C"] + [f"c{n}" for n in range(1, cfg.N + 1)])
    rows = ([repr(float(traj.times[j]))] + _split([traj.C[j], *traj.c[j]]) for j in nodes)
    return [_write_csv(out / "solve.csv", header, rows)]


def cmd_signature(cfg: RunConfig, ds: DriverSet, out: Path) -> list:
    engine = words.IteratedIntegrals(ds, 0.0, ds.T, cfg.refine)
    rows = []
    for n in range(1, cfg.W + 1):
        for comp in words.compositions(n):
            rows.append([n, words.word_str(comp)] + _split([engine.value(comp)]))
    return [_write_csv(out / "signature.csv", ["degree", "word", "re", "im"], rows)]


def _grunsky_routes(cfg: RunConfig, ds: DriverSet) -> dict:
    M = cfg.M
    ode = solver.grunsky_ode(ds, M, cfg.refine).final().b
    explicit = solver.grunsky_explicit(ds, ds.T, M, cfg.W, cfg.refine).b
    f = solver.solve_taylor_ode(ds, 2 * M, cfg.refine).series(ds.T)
    logroute = grassmann.grunsky_from_f(f, M).b
    return {"ode": ode, "explicit": explicit, "bivariate_log": logroute}


def cmd_grunsky(cfg: RunConfig, ds: DriverSet, out: Path) -> list:
    routes = _grunsky_routes(cfg, ds)
    paths = []
    for name, b in routes.items():
        rows = ([m, n] + _split([b[m - 1, n - 1]])
                for m in range(1, cfg.M + 1) for n in range(1, cfg.M + 1))
        paths.append(_write_csv(out / f"grunsky_{name}.csv", ["m", "n", "re", "im"], rows))
    names = list(routes)
    diffs = {f"{p}-{q}": float(np.max(np.abs(routes[p] - routes[q])))
             for i, p in enumerate(names) for q in names[i + 1:]}
    paths.append(out / "grunsky_diff.json")
    _atomic_write(paths[-1], json.dumps({"version": REPORT_VERSION, "max_abs_diff": diffs},
                                        indent=2, sort_keys=True) + "\n")
    return paths


def cmd_faber(cfg: RunConfig, ds: DriverSet, out: Path) -> list:
    n_max = cfg.M
    traj = solver.faber_ode(ds, n_max, cfg.refine)
    f = solver.solve_taylor_ode(ds, n_max + 1, cfg.refine).series(ds.T)
    rows = []
    for n in range(1, n_max + 1):
        ode = traj.polynomial(-1, n)
        ref = grassmann.faber_from_f(f, n)
        for k in range(n + 1):
            rows.append(["ode", n, k] + _split([ode[-k]]))
            rows.append(["definition", n, k] + _split([ref[-k]]))
    return [_write_csv(out / "faber.csv", ["route", "n", "power_w_inv", "re", "im"], rows)]


def cmd_tau(cfg: RunConfig, ds: DriverSet, out: Path) -> list:
    M = cfg.M
    traj = solver.solve_taylor_ode(ds, 2 * M, cfg.refine)
    series = traj.series_array()
    rows = []
    for j in range(0, traj.times.size, cfg.refine):
        gr = grassmann.grunsky_from_f(TruncatedTaylor(series[j]), M)
        tau = grassmann.tau_function(grassmann.af_operator(gr), cfg.tvec, cfg.N_tau)
        rows.append([repr(float(traj.times[j]))] + _split([tau]))
    return [_write_csv(out / "tau.csv", ["t", "re_tau", "im_tau"], rows)]


def cmd_bridge(cfg: RunConfig, ds: DriverSet, out: Path) -> list:
    if cfg.herglotz is None:
        raise ConfigError("config: the bridge command needs a 'herglotz' section")
    header = ["t", "x0"] + _complex_header([f"x{k}" for k in range(1, ds.K + 1)])
    rows = ([repr(float(t)), repr(float(ds.x0.values[j].real))]
            + _split([p.values[j] for p in ds.xs]) for j, t in enumerate(ds.times))
    return [_write_csv(out / "drivers.csv", header, rows)]


# -- verify ------------------------------------------------------------------

def _check_taylor(cfg, ds):
    traj = solver.solve_taylor_ode(ds, cfg.N, cfg.refine)
    ex = solver.taylor_explicit(ds, ds.T, cfg.N, cfg.refine)
    ode = traj.c[-1]
    scale = np.maximum(np.abs(ode), 1e-300)
    rel = np.where(np.abs(ode) > 1e-14, np.abs(ode - ex) / scale, np.abs(ode - ex))
    C_err = float(np.max(np.abs(traj.C - np.exp(ds.x0(traj.times).real))))
    return {"taylor_two_route": float(np.max(rel, initial=0.0)), "C_equals_exp_x0": C_err}


def _check_sol_by_witt(cfg, ds):
    f = witt.sol_by_witt(ds, ds.T, cfg.N + 1, cfg.refine)
    ref = solver.solve_taylor_ode(ds, cfg.N, cfg.refine).series(ds.T)
    return {"sol_by_witt": float(np.max(np.abs(f.coeffs - ref.coeffs)))}


def _check_grunsky(cfg, ds):
    routes = _grunsky_routes(cfg, ds)
    names = list(routes)
    diff = max(float(np.max(np.abs(routes[p] - routes[q])))
               for i, p in enumerate(names) for q in names[i + 1:])
    sym = max(float(np.max(np.abs(b - b.T))) for b in routes.values())
    return {"grunsky_triple_route": diff, "grunsky_symmetry": sym}


def _check_chen(cfg, ds):
    engine = words.IteratedIntegrals(ds, 0.0, ds.T, cfg.refine)
    worst = 0.0
    all_words = [c for n in range(1, 4) for c in words.compositions(n)]
    for u in all_words:
        for v in all_words:
            if sum(u) + sum(v) > 4:
                continue
            lhs = engine.value(u) * engine.value(v)
            rhs = engine.apply(words.shuffle(u, v))[-1]
            worst = max(worst, abs(lhs - rhs))
    return {"chen_shuffle": worst}


def _check_faber(cfg, ds):
    n_max = 4
    M = 4
    traj = solver.faber_ode(ds, n_max, cfg.refine)
    f = solver.solve_taylor_ode(ds, 2 * max(n_max, M), cfg.refine).series(ds.T)
    two = max(float(np.max(np.abs(traj.polynomial(-1, n).coeffs
                                  - grassmann.faber_from_f(f, n).coeffs)))
              for n in range(1, n_max + 1))
    res = grassmann.faber_checks(f, n_max, M)
    return {"faber_two_route": two, "faber_characterisations": max(res.values())}


def _check_tau_by_witt(cfg, ds):
    M = min(cfg.M, 3)
    f = solver.solve_taylor_ode(ds, 2 * M, cfg.refine).series(ds.T)
    A = grassmann.af_operator(grassmann.grunsky_from_f(f, M))
    engine = words.IteratedIntegrals(ds, 0.0, ds.T, cfg.refine)
    worst = max(float(np.max(np.abs(witt.afh_by_signature(ds, ds.T, n, M, engine=engine)
                                    - A[:, n]))) for n in range(1, M + 1))
    return {"tau_by_witt": worst}


def _check_tau_norm(cfg, ds):
    rng = np.random.default_rng(cfg.seed)
    N = cfg.N_tau
    A = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
    tv = rng.normal(size=N)
    errs = [abs(grassmann.tau_function(np.zeros((N, N)), tv, N) - 1),
            abs(grassmann.tau_function(A, np.zeros(N), N) - 1),
            abs(grassmann.tau_function([[0.7]], [0.3], 1) - (1 - 0.3 * 0.7))]
    return {"tau_normalisation": float(max(errs))}


def _check_oracle(cfg, ds):
    engine = words.IteratedIntegrals(ds, 0.0, ds.T, cfg.refine)
    worst = 0.0
    for n in range(1, 7):
        for comp in words.compositions(n):
            if len(comp) <= 3:
                worst = max(worst, abs(engine.value(comp) - words.brute_force_oracle(comp, ds)))
    return {"oracle_agreement": worst}


def _check_right_action(cfg, ds):
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for _ in range(20):
        u = tuple(int(i) for i in rng.integers(1, 3, size=rng.integers(0, 3)))
        v = tuple(int(i) for i in rng.integers(1, 3, size=rng.integers(0, 3)))
        f = witt.LaurentWordSeries.monomial(-1, -12, 0)
        lhs = witt.word_action(witt.word_action(f, u), v)
        rhs = witt.word_action(f, u + v)
        for m in set(lhs.coeffs) | set(rhs.coeffs):
            for w in set(lhs[m]) | set(rhs[m]):
                worst = max(worst, abs(lhs[m][w] - rhs[m][w]))
    return {"right_action": worst}


def _check_inverse(cfg, ds):
    vals = []
    for r in (cfg.refine, 2 * cfg.refine, 4 * cfg.refine):
        traj = solver.solve_taylor_ode(ds, min(cfg.N, 6), r)
        vals.append(solver.inverse_ode_residual(ds, traj, r))
    if vals[0] < 1e-12:
        order = 2.0
    else:
        order = float(np.log2(vals[0] / vals[1]) + np.log2(vals[1] / vals[2])) / 2
    return {"inverse_residual_order": order, "_residuals": vals}


CHECKS = (
    _check_taylor, _check_sol_by_witt, _check_grunsky, _check_chen, _check_faber,
    _check_tau_by_witt, _check_tau_norm, _check_oracle, _check_right_action, _check_inverse,
)


def verify_report(cfg: RunConfig, ds: DriverSet) -> dict:
    with ThreadPoolExecutor() as pool:
        results = list(pool.map(lambda chk: chk(cfg, ds), CHECKS))
    entries = []
    for res in results:
        extra = res.pop("_residuals", None)
        for name, value in res.items():
            if name == "inverse_residual_order":
                passed = bool(1.8 <= value <= 2.2)
                entry = {"name": name, "value": value, "bounds": [1.8, 2.2], "passed": passed,
                         "residuals": [float(v) for v in extra]}
            else:
                tol = cfg.tolerances[name]
                entry = {"name": name, "value": value, "tolerance": tol, "passed": bool(value < tol)}
            entries.append(entry)
    return {
        "version": REPORT_VERSION,
        "seed": cfg.seed,
        "refine": cfg.refine,
        "all_passed": all(e["passed"] for e in entries),
        "checks": entries,
    }


def cmd_verify(cfg: RunConfig, ds: DriverSet, out: Path) -> list:
    report = verify_report(cfg, ds)
    path = out / "verify.json"
    _atomic_write(path, json.dumps(report, indent=2, sort_keys=True) + "\n")
    for e in report["checks"]:
        if not e["passed"]:
            print(f"FAILED {e['name']}: {e['value']:.3e}", file=sys.stderr)
    return [path]


HANDLERS = {
    "solve": cmd_solve, "signature": cmd_signature, "grunsky": cmd_grunsky, "faber": cmd_faber,
    "tau": cmd_tau, "bridge": cmd_bridge, "verify": cmd_verify,
}


def run(command: str, cfg: RunConfig, out: Path | None = None) -> int:
    """Execute one command; returns the process exit status."""
    if command not in HANDLERS:
        raise ConfigError(f"unknown command {command!r}")
    out = Path(out or cfg.out_dir)
    try:
        ds = cfg.driver_set()
    except ValueError as exc:
        raise ConfigError(str(exc) if isinstance(exc, ConfigError) else f"config: {exc}")
    paths = HANDLERS[command](cfg, ds, out)
    for p in paths:
        print(p)
    if command == "verify":
        report = json.loads(paths[0].read_text())
        return 0 if report["all_passed"] else 1
    return 0


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="loewnerkit", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON run configuration")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--seed", type=int, help="seed for random drivers and checks")
    parser.add_argument("--refine", type=int, help="sub-steps per driver segment")
    args = parser.parse_args(argv)
    try:
        raw = load_config(args.config)
        if args.seed is not None:
            raw["seed"] = args.seed
        if args.refine is not None:
            raw["refine"] = args.refine
        cfg = RunConfig.from_dict(raw)
        out = args.out or os.environ.get(OUT_ENV) or cfg.out_dir
        return run(args.command, cfg, Path(out))
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return 2
