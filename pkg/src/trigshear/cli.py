"""``trigshear`` command-line driver.

Exit codes: 0 success, 1 numeric tolerance failure, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import analysis, oracle, storage
from .admissible import AdmissibleProfile
from .cartoon import CartoonFunction, chi_cartoon, fig1_cartoon, periodize_sample, single_order_cartoon
from .shearlets import shears
from .transform import analysis_all, required_kmax, resolution_for, spectrum_from_function

log = logging.getLogger("trigshear")

CONFIG_VERSION = 1
EXIT_OK, EXIT_TOLERANCE, EXIT_USAGE = 0, 1, 2

PRESETS = {
    "fig1": fig1_cartoon,
    "chi": chi_cartoon,
    "order0": lambda: single_order_cartoon(0),
    "order1": lambda: single_order_cartoon(1),
    "order2": lambda: single_order_cartoon(2),
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    cartoon: str = "fig1"
    scales: list[int] = field(default_factory=lambda: [10])
    cones: list[str] = field(default_factory=lambda: ["h", "v"])
    shears: str | list[int] = "all"
    eps0: float = 0.5
    oversample: int = 8
    out: str = "trigshear-out"
    threads: int = 0
    generator: str = "exp"
    grid: int = 512
    directed: str = "none"
    degrees: list[int] = field(default_factory=lambda: list(range(oracle.MAX_DEGREE + 1)))
    tol: float = 1e-8

    def validate(self) -> "RunConfig":
        if not self.scales:
            raise UsageError("at least one scale is required")
        if any(j < 0 or j % 2 for j in self.scales):
            raise UsageError(f"scales must be even and non-negative, got {self.scales}")
        self.scales = sorted(set(self.scales))
        if not self.cones or any(c not in ("h", "v") for c in self.cones):
            raise UsageError(f"cones must be a subset of h,v, got {self.cones}")
        if not 0 < self.eps0 <= 1:
            raise UsageError("eps0 must lie in (0, 1]")
        if self.oversample < 2 or self.oversample & (self.oversample - 1):
            raise UsageError("oversample must be a power of two >= 2")
        if self.directed not in ("none", "both"):
            raise UsageError("directed must be 'none' or 'both'")
        bad = [u for u in self.degrees if not 0 <= u <= oracle.MAX_DEGREE]
        if bad:
            raise UsageError(f"polynomial degree must lie in 0..{oracle.MAX_DEGREE}, got {bad}")
        try:
            AdmissibleProfile.from_name(self.generator)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        return self

    @property
    def profile(self) -> AdmissibleProfile:
        return AdmissibleProfile.from_name(self.generator)

    def shear_list(self, j: int) -> list[int]:
        if self.shears == "all":
            return shears(j)
        m = 2 ** (j // 2)
        out = [l for l in self.shears if abs(l) < m]
        if not out:
            raise UsageError(f"no requested shear is valid at j={j}")
        return out


def _parse_list(text: str, conv=int) -> list:
    try:
        return [conv(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse list {text!r}") from exc


def parse_shears(text: str):
    """``all``, ``a:b`` (inclusive) or a comma list."""
    if text == "all":
        return "all"
    if ":" in text:
        try:
            a, b = (int(t) for t in text.split(":"))
        except ValueError as exc:
            raise UsageError(f"bad shear range {text!r}") from exc
        return list(range(a, b + 1))
    return _parse_list(text)


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            d = json.load(fh)
    except FileNotFoundError as exc:
        raise UsageError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid config JSON: {exc}") from exc
    if d.pop("version", CONFIG_VERSION) != CONFIG_VERSION:
        raise UsageError(f"unsupported config version (expected {CONFIG_VERSION})")
    known = set(RunConfig.__dataclass_fields__)
    extra = set(d) - known
    if extra:
        raise UsageError(f"unknown config keys: {sorted(extra)}")
    return d


def resolve_config(args) -> RunConfig:
    base = load_config(args.config) if args.config else {}
    cfg = RunConfig(**base)
    over = {}
    if args.cartoon is not None:
        over["cartoon"] = args.cartoon
    if args.j is not None:
        over["scales"] = _parse_list(args.j)
    if args.cones is not None:
        over["cones"] = _parse_list(args.cones, str.strip)
    if args.all_shears:
        over["shears"] = "all"
    elif args.l is not None:
        over["shears"] = parse_shears(args.l)
    for name in ("eps0", "oversample", "out", "threads", "generator", "grid", "directed", "tol"):
        val = getattr(args, name, None)
        if val is not None:
            over[name] = val
    if getattr(args, "degrees", None) is not None:
        over["degrees"] = _parse_list(args.degrees)
    cfg = replace(cfg, **over)
    if not cfg.threads:
        cfg.threads = int(os.environ.get("TRIGSHEAR_THREADS", "0") or 0) or (os.cpu_count() or 1)
    return cfg.validate()


def resolve_cartoon(name: str) -> CartoonFunction:
    if name in PRESETS:
        return PRESETS[name]()
    path = Path(name)
    if not path.is_file():
        raise UsageError(f"cartoon is neither a preset ({', '.join(PRESETS)}) nor a file: {name}")
    try:
        return storage.load_cartoon(path)
    except ValueError as exc:
        raise UsageError(f"invalid cartoon spec {name}: {exc}") from exc


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _echo(cfg: RunConfig, f: CartoonFunction, out: Path, command: str) -> None:
    storage.write_json({"version": CONFIG_VERSION, "command": command, "config": asdict(cfg),
                        "cartoon": f.to_dict()}, out / f"{command}-run.json")


# -- commands ------------------------------------------------------------------

def cmd_synth(cfg: RunConfig) -> int:
    f = resolve_cartoon(cfg.cartoon)
    out = _outdir(cfg)
    samples = periodize_sample(f, cfg.grid)
    np.save(out / "cartoon.npy", samples)
    storage.write_pgm(samples, out / "cartoon.pgm")
    storage.save_cartoon(f, out / "cartoon.json")
    _echo(cfg, f, out, "synth")
    print(f"wrote {cfg.grid}x{cfg.grid} samples to {out}")
    return EXIT_OK


def grid_path(out: Path, cone: str, j: int, l: int, ext: str) -> Path:
    return out / "coeffs" / f"{cone}_j{j:02d}_l{l:+04d}.{ext}"


def compute_coeffs(cfg: RunConfig, f: CartoonFunction, out: Path, scales=None) -> int:
    """Write every missing ``(cone, j, l)`` grid; returns the number computed."""
    (out / "coeffs").mkdir(parents=True, exist_ok=True)
    done = 0
    for j in scales or cfg.scales:
        todo = [(c, l) for c in cfg.cones for l in cfg.shear_list(j)
                if not (grid_path(out, c, j, l, "csv").exists() and grid_path(out, c, j, l, "bin").exists())]
        if not todo:
            log.info("j=%d: all grids present, skipping", j)
            continue
        N = resolution_for(j, cfg.oversample)
        lmax = max(abs(l) for _, l in todo)
        spec = spectrum_from_function(f, N, kmax=min(N // 2, required_kmax(j, lmax)), workers=cfg.threads)
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            # results are consumed in submission order; this thread is the only writer
            for (c, l), g in zip(todo, pool.map(lambda t: analysis_all(spec, t[0], j, t[1], cfg.profile), todo)):
                storage.write_grid_binary(g, grid_path(out, c, j, l, "bin"))
                storage.write_grid_csv(g, grid_path(out, c, j, l, "csv"))
                done += 1
        del spec
    return done


def cmd_coeffs(cfg: RunConfig) -> int:
    f = resolve_cartoon(cfg.cartoon)
    out = _outdir(cfg)
    n = compute_coeffs(cfg, f, out)
    _echo(cfg, f, out, "coeffs")
    print(f"computed {n} coefficient grids in {out / 'coeffs'}")
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    f = resolve_cartoon(cfg.cartoon)
    out = _outdir(cfg)
    j = cfg.scales[-1]
    compute_coeffs(cfg, f, out, [j])
    grids = {(c, l): storage.read_grid_binary(grid_path(out, c, j, l, "bin"))
             for c in cfg.cones for l in cfg.shear_list(j)}
    directed = (None,) if cfg.directed == "none" else ("+", "-")
    sets = analysis.orientation_sets(f.star, j, cfg.eps0, cfg.cones, cfg.shear_list(j), directed)
    rows = analysis.sweep(grids, sets)
    storage.write_sweep_csv(rows, out / f"sweep_j{j:02d}.csv")
    storage.write_sweep_dat(rows, out / f"sweep_j{j:02d}.dat")
    medians = analysis.band_medians(f, rows, sets)
    storage.write_json({"j": j, "eps0": cfg.eps0, "rows": len(rows),
                        "skipped": sum(r.skipped for r in rows),
                        "band_median_L_max": {str(k): v for k, v in medians.items()}},
                       out / f"sweep_j{j:02d}.json")
    _echo(cfg, f, out, "sweep")
    for n, v in medians.items():
        print(f"order {n}: median L_max {v:.4e}")
    return EXIT_OK


def cmd_decay(cfg: RunConfig) -> int:
    if len(cfg.scales) < 3:
        raise UsageError("decay needs at least three scales (e.g. --j 6,8,10)")
    f = resolve_cartoon(cfg.cartoon)
    out = _outdir(cfg)
    reports = analysis.run_decay(f, cfg.scales, eps0=cfg.eps0, oversample=cfg.oversample, workers=cfg.threads)
    storage.write_json({"scales": cfg.scales, "reports": [r.to_dict() for r in reports]}, out / "decay.json")
    lines = ["tag,kind,expected,slope,order,margin,label"]
    for r, p in zip(reports, analysis.default_probes(f)):
        exp = "" if p.order is None else str(p.order)
        lines.append(f"{r.tag},{r.kind},{exp},{r.fit.slope:.6f},{r.order},{r.margin:.4f},{r.label}")
    (out / "decay.csv").write_text("\n".join(lines) + "\n")
    _echo(cfg, f, out, "decay")
    print("\n".join(lines))
    return EXIT_OK


def cmd_oracle_check(cfg: RunConfig) -> int:
    cases = oracle.default_cases(cfg.degrees)
    results = oracle.run_cross_checks(cases, tol=cfg.tol)
    failed = [r for r in results if not r.ok]
    worst = max(r.error for r in results)
    out = _outdir(cfg)
    storage.write_json({"tol": cfg.tol, "cases": len(results), "failed": len(failed), "max_error": worst,
                        "failures": [{"star": r.case.star, "degree": r.case.degree, "rho": r.case.rho,
                                      "theta": r.case.theta, "error": r.error} for r in failed]},
                       out / "oracle-check.json")
    print(f"{len(results) - len(failed)}/{len(results)} checks within {cfg.tol:g} (max error {worst:.3e})")
    return EXIT_TOLERANCE if failed else EXIT_OK


COMMANDS = {
    "synth": cmd_synth,
    "coeffs": cmd_coeffs,
    "sweep": cmd_sweep,
    "decay": cmd_decay,
    "oracle-check": cmd_oracle_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration; flags override its values")
    common.add_argument("--cartoon", "--preset", dest="cartoon",
                        help=f"preset ({', '.join(PRESETS)}) or path to a cartoon JSON spec")
    common.add_argument("--j", help="comma-separated even scales, e.g. 6,8,10")
    common.add_argument("--cones", help="h, v or h,v")
    common.add_argument("--l", help="shears: all, a:b or a comma list")
    common.add_argument("--all-shears", action="store_true", help="every |l| < 2^(j/2)")
    common.add_argument("--eps0", type=float)
    common.add_argument("--oversample", type=int, help="grid size N = oversample * 2^j")
    common.add_argument("--out", help="output directory")
    common.add_argument("--threads", type=int, help="worker threads (default: TRIGSHEAR_THREADS or CPU count)")
    common.add_argument("--generator", help="window transition: exp or poly:q")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="trigshear", description="Trigonometric shearlet edge analysis.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("synth", parents=[common], help="sample a cartoon function")
    s.add_argument("--grid", type=int, help="samples per axis (default 512)")
    sub.add_parser("coeffs", parents=[common], help="compute and store coefficient grids")
    s = sub.add_parser("sweep", parents=[common], help="L_max / L_min per orientation at the largest scale")
    s.add_argument("--directed", choices=["none", "both"])
    sub.add_parser("decay", parents=[common], help="decay slopes and order classification")
    s = sub.add_parser("oracle-check", parents=[common], help="boundary-integral vs area quadrature")
    s.add_argument("--degrees", help="polynomial degrees to check, e.g. 0,1,2,3")
    s.add_argument("--tol", type=float, help="absolute tolerance (default 1e-8)")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
