"""Command-line front end: sweeps, region maps, thresholds and oracle verification.

CSV outputs start with a ``#``-prefixed manifest block followed by a header
row. Floats are written with ``repr`` (shortest round-trip form), so
identical invocations give identical bytes.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import shlex
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .channels import DEFAULT_ALPHA_DB_PER_KM
from .crosscheck import verify_equivalence
from .errors import SteerSwapError
from .gauss_core import Direction, SqueezedResource, epr_state, steerability
from .swap_protocol import (
    CROSSOVER_TOL,
    L_SEARCH_TOL,
    R_SEARCH_TOL,
    GainSetting,
    Scheme,
    SwapConfig,
    distance_config,
    dual_config,
    find_crossover,
    find_distance_threshold,
    find_squeezing_threshold,
    output_covariance,
    swap_steering,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2

DEFAULTS = {
    "r": 1.15,
    "eta": 0.95,
    "t1": 1.0,
    "t2": 1.0,
    "w1": 0.0,
    "w2": 0.0,
    "alpha": DEFAULT_ALPHA_DB_PER_KM,
    "gain_mode": "opt-ad",
    "scheme": "single",
}

PRESETS = {
    "fig2b-unit": {"r": 1.15, "eta": 0.95, "t1": 1.0, "t2": 1.0, "w1": 0.0, "w2": 0.0, "gain_mode": "unit"},
    "fig2b-opt": {"r": 1.15, "eta": 0.95, "t1": 1.0, "t2": 1.0, "w1": 0.0, "w2": 0.0, "gain_mode": "opt-ad"},
    "fig3a": {"r": 1.15, "eta": 0.95, "t1": 1.0, "t2": 1.0, "w1": 0.0, "w2": 0.0, "gain_mode": "opt-ad"},
    "fig3b": {"r": 1.15, "eta": 0.995, "t1": 1.0, "t2": 1.0, "w1": 0.0, "w2": 0.0, "gain_mode": "opt-ad"},
}


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return repr(float(x))


@dataclass(frozen=True)
class RunManifest:
    command: str
    params: dict
    version: str = __version__
    checksum: str = ""

    def to_dict(self) -> dict:
        return {"command": self.command, "params": self.params, "version": self.version, "sha256": self.checksum}

    def header(self) -> str:
        return "".join(
            [
                f"# command: {self.command}\n",
                f"# version: {self.version}\n",
                f"# params: {json.dumps(self.params, sort_keys=True)}\n",
                f"# sha256: {self.checksum}\n",
            ]
        )


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def render_csv(command: str, params: dict, columns: Sequence[str], rows) -> str:
    body = ",".join(columns) + "\n" + "".join(",".join(fmt(v) for v in row) + "\n" for row in rows)
    manifest = RunManifest(command, params, checksum=_sha256(body))
    return manifest.header() + body


def parse_csv(text: str) -> tuple[dict, list[str], list[list[str]]]:
    """Split CLI CSV output into (manifest fields, header, rows)."""
    meta, lines = {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            meta[key] = json.loads(value) if key == "params" else value
        elif line:
            lines.append(line)
    header = lines[0].split(",")
    return meta, header, [ln.split(",") for ln in lines[1:]]


# ---------------------------------------------------------------- commands


def _template(p: dict) -> SwapConfig:
    return SwapConfig.from_params(p["r"], p["eta"], p["t1"], p["t2"], p["w1"], p["w2"], GainSetting.parse(p["gain_mode"]))


def _require(cond: bool, message: str):
    if not cond:
        raise UsageError(message)


def _check_range(lo, hi, steps, what):
    _require(math.isfinite(lo) and math.isfinite(hi) and lo < hi, f"{what}: need min < max, got {lo} and {hi}")
    _require(steps >= 2, f"--steps must be >= 2, got {steps}")


def cmd_sweep_gain(p: dict) -> str:
    _check_range(p["g_min"], p["g_max"], p["steps"], "gain range")
    _require(p["g_min"] >= 0, "--g-min must be >= 0")
    cfg = _template({**p, "gain_mode": "unit"})
    rows = []
    for g in np.linspace(p["g_min"], p["g_max"], p["steps"]):
        cm = output_covariance(cfg, gain=float(g))
        rows.append((g, steerability(cm, Direction.A_TO_B), steerability(cm, Direction.B_TO_A)))
    params = {k: p[k] for k in ("r", "eta", "t1", "t2", "w1", "w2", "g_min", "g_max", "steps")}
    return render_csv("sweep-gain", params, ["g", "G_AtoD", "G_DtoA"], rows)


def cmd_sweep_squeezing(p: dict) -> str:
    _check_range(p["r_min"], p["r_max"], p["steps"], "squeezing range")
    _require(p["r_min"] >= 0, "--r-min must be >= 0")
    cfg = _template({**p, "r": 0.0})
    rows = []
    for r in np.linspace(p["r_min"], p["r_max"], p["steps"]):
        res = swap_steering(cfg.with_r(float(r)))
        resource = steerability(epr_state(SqueezedResource(float(r))), Direction.A_TO_B)
        rows.append((r, res.g_ab, res.g_ba, resource))
    params = {k: p[k] for k in ("gain_mode", "eta", "t1", "t2", "w1", "w2", "r_min", "r_max", "steps")}
    return render_csv("sweep-squeezing", params, ["r", "G_AtoD", "G_DtoA", "G_resource"], rows)


def cmd_region_map(p: dict) -> str:
    _check_range(0.0, p["l_max"], p["steps"], "distance range")
    cfg = _template(p)
    grid = np.linspace(0.0, p["l_max"], p["steps"])
    rows = []
    for l1 in grid:
        for l2 in grid:
            region = swap_steering(dual_config(cfg, float(l1), float(l2), p["alpha"])).region
            rows.append((l1, l2, region.value))
    params = {k: p[k] for k in ("r", "eta", "w1", "w2", "alpha", "gain_mode", "l_max", "steps")}
    return render_csv("region-map", params, ["l1_km", "l2_km", "region"], rows)


def _parse_w_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--w-list must be comma-separated numbers, got {text!r}") from None
    _require(bool(values), "--w-list is empty")
    _require(all(math.isfinite(v) and v >= 0 for v in values), "--w-list values must be >= 0")
    return values


def cmd_sweep_distance(p: dict) -> str:
    _check_range(0.0, p["l_max"], p["steps"], "distance range")
    w_list = _parse_w_list(p["w_list"])
    scheme = Scheme(p["scheme"])
    base = _template(p)
    rows = []
    for w in w_list:
        cfg = replace(base, channel1=replace(base.channel1, w=w), channel2=replace(base.channel2, w=w))
        for length in np.linspace(0.0, p["l_max"], p["steps"]):
            res = swap_steering(distance_config(cfg, float(length), scheme, p["alpha"]))
            rows.append((length, w, res.g_ab, res.g_ba))
    params = {k: p[k] for k in ("scheme", "r", "eta", "alpha", "gain_mode", "w_list", "l_max", "steps")}
    return render_csv("sweep-distance", params, ["l_km", "w", "G_AtoD", "G_DtoA"], rows)


def thresholds(p: dict) -> dict:
    """Every scalar finder result for one parameter set, with its search tolerance."""
    cfg = _template(p)
    scheme, alpha = p["scheme"], p["alpha"]
    crossover = find_crossover(cfg, alpha)
    return {
        "r_threshold_AtoD": {"value": find_squeezing_threshold(cfg, Direction.A_TO_B), "tolerance": R_SEARCH_TOL},
        "r_threshold_DtoA": {"value": find_squeezing_threshold(cfg, Direction.B_TO_A), "tolerance": R_SEARCH_TOL},
        "L_max_AtoD_km": {
            "value": find_distance_threshold(cfg, Direction.A_TO_B, scheme, alpha),
            "tolerance": L_SEARCH_TOL,
        },
        "L_max_DtoA_km": {
            "value": find_distance_threshold(cfg, Direction.B_TO_A, scheme, alpha),
            "tolerance": L_SEARCH_TOL,
        },
        "crossover_L1_km": {
            "value": None if crossover is None else crossover.l1_km,
            "tolerance": CROSSOVER_TOL,
        },
    }


def cmd_thresholds(p: dict) -> str:
    results = thresholds(p)
    params = {k: p[k] for k in ("preset", "r", "eta", "t1", "t2", "w1", "w2", "alpha", "gain_mode", "scheme")}
    checksum = _sha256(json.dumps(results, sort_keys=True))
    out = {"manifest": RunManifest("thresholds", params, checksum=checksum).to_dict(), **results}
    return json.dumps(out, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------- parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    phys = common.add_argument_group("scenario")
    phys.add_argument("--r", type=float, help="squeezing parameter (default 1.15)")
    phys.add_argument("--eta", type=float, help="homodyne detection efficiency (default 0.95)")
    phys.add_argument("--t1", type=float, help="channel-1 transmittance (default 1)")
    phys.add_argument("--t2", type=float, help="channel-2 transmittance (default 1)")
    phys.add_argument("--w1", type=float, help="channel-1 excess noise, shot-noise units (default 0)")
    phys.add_argument("--w2", type=float, help="channel-2 excess noise, shot-noise units (default 0)")
    phys.add_argument("--alpha", type=float, help="fibre attenuation in dB/km (default 0.2)")
    phys.add_argument("--gain-mode", help="unit, opt-ad, opt-da or fixed:<g> (default opt-ad)")
    phys.add_argument("--scheme", choices=[s.value for s in Scheme], help="single or symmetric (default single)")
    run = common.add_argument_group("run")
    run.add_argument("--steps", type=int, help="number of grid points per axis")
    run.add_argument("--out", type=Path, help="write output here instead of stdout")
    run.add_argument("--config", type=Path, help="flat key = value file; flags override it")
    run.add_argument("--seed", type=int, default=42, help="random seed for verify")

    parser = argparse.ArgumentParser(prog="steerswap", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep-gain", parents=[common], help="steerability versus feedforward gain")
    p.add_argument("--g-min", type=float, default=0.0)
    p.add_argument("--g-max", type=float, default=2.0)

    p = sub.add_parser("sweep-squeezing", parents=[common], help="steerability versus squeezing")
    p.add_argument("--r-min", type=float, default=0.0)
    p.add_argument("--r-max", type=float, default=2.0)

    p = sub.add_parser("region-map", parents=[common], help="steering regions over (L1, L2)")
    p.add_argument("--l-max", type=float, default=15.0, help="km, both axes")

    p = sub.add_parser("sweep-distance", parents=[common], help="steerability versus fibre length")
    p.add_argument("--w-list", default="0,0.2,5", help="comma-separated excess noise values")
    p.add_argument("--l-max", type=float, default=100.0, help="km")

    p = sub.add_parser("thresholds", parents=[common], help="squeezing/distance thresholds and crossover as JSON")
    p.add_argument("--preset", help=f"one of: {', '.join(PRESETS)}")

    p = sub.add_parser("verify", parents=[common], help="closed form versus Heisenberg oracle on random configs")
    p.add_argument("--n-cases", type=int, default=1000)
    return parser


_DEFAULT_STEPS = {
    "sweep-gain": 201,
    "sweep-squeezing": 201,
    "region-map": 61,
    "sweep-distance": 201,
}


def read_config_file(path: Path) -> list[str]:
    """Turn ``key = value`` lines into ``--key value`` tokens."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    tokens = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else ":" if ":" in line else None
        if sep is None:
            raise UsageError(f"{path}:{n}: expected 'key = value'")
        key, value = (s.strip() for s in line.split(sep, 1))
        key = key.lstrip("-").replace("_", "-")
        if key == "config":
            raise UsageError(f"{path}:{n}: config files cannot include other config files")
        tokens += [f"--{key}", *shlex.split(value)]
    return tokens


def _expand_config(argv: list[str]) -> list[str]:
    for i, tok in enumerate(argv):
        path = None
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
        if path is not None:
            # file values go first so explicit flags, parsed later, win
            return argv[:1] + read_config_file(Path(path)) + argv[1:]
    return argv


def resolve_params(args: argparse.Namespace) -> dict:
    p = dict(DEFAULTS)
    preset = getattr(args, "preset", None)
    if preset is not None:
        if preset not in PRESETS:
            known = ", ".join(PRESETS)
            raise UsageError(f"unknown preset {preset!r}; choose one of: {known}")
        p.update(PRESETS[preset])
    for key, value in vars(args).items():
        if value is not None and key not in ("command", "out", "config"):
            p[key] = value
    p["preset"] = preset
    if p.get("steps") is None:
        p["steps"] = _DEFAULT_STEPS.get(args.command)
    try:
        GainSetting.parse(p["gain_mode"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return p


_COMMANDS = {
    "sweep-gain": cmd_sweep_gain,
    "sweep-squeezing": cmd_sweep_squeezing,
    "region-map": cmd_region_map,
    "sweep-distance": cmd_sweep_distance,
    "thresholds": cmd_thresholds,
}


def _run_verify(p: dict) -> int:
    _require(p["n_cases"] >= 0, "--n-cases must be >= 0")
    report = verify_equivalence(p["seed"], p["n_cases"])
    if report.ok:
        print(
            f"verify: {report.n_checked} configs agree, max |closed form - oracle| = "
            f"{report.max_error:.3e} < {report.tolerance:g}"
        )
        return EXIT_OK
    manifest = {"seed": p["seed"], "case": report.n_checked, "config": report.first_failure.to_dict()}
    print(f"verify: FAILED at case {report.n_checked}, |closed form - oracle| > {report.tolerance:g}", file=sys.stderr)
    print(json.dumps(manifest, sort_keys=True), file=sys.stderr)
    return EXIT_VERIFY_FAILED


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _expand_config(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"steerswap: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        p = resolve_params(args)
        if args.command == "verify":
            return _run_verify(p)
        text = _COMMANDS[args.command](p)
    except (UsageError, SteerSwapError, ValueError) as exc:
        print(f"steerswap {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
