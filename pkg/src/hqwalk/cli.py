"""Command line: ``hqwalk <command> --config <file> [--out <dir>]``.

Commands: simulate, spectrum, limit, cocycle, monodromy, verify. Every run
writes ``manifest.json`` (the fully resolved config) next to its artifacts.
The worker count for grid sweeps is read from ``HQWALK_WORKERS``.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path


from . import acceptance
from .config import RunConfig, build_initial, parse_config
from .exceptions import AliasingError, ConfigError, MonodromyError, ShapeMismatchError, WalkError
from .io import (write_convergence_csv, write_distribution_csv, write_field_csv, write_json,
                 write_measure_csv)
from .lattice import evolve, scaled_distribution
from .limit import compare, fourier_state, limit_measure
from .spectral import (convergence_report, eigendecompose, exotic_paths, group_velocity_field,
                       h_operator_field, line_path, monodromy_probe)
from .symbol import commutator_norm

COMMANDS = ("simulate", "spectrum", "limit", "cocycle", "monodromy", "verify")


def _simulate(cfg: RunConfig, out: Path):
    symbol, state, now = cfg.symbol, build_initial(cfg), 0
    dists = []
    for t in cfg.t_list:
        state = evolve(symbol, state, t - now)
        now = t
        dists.append(scaled_distribution(state, t))
    write_distribution_csv(dists, out / "pt.csv")


def _spectrum(cfg: RunConfig, out: Path):
    symbol, grid = cfg.symbol, cfg.torus_grid
    spec = eigendecompose(symbol, grid, cfg.tolerances["gap"])
    vel = group_velocity_field(spec, symbol)
    entries = {f"lambda{j + 1}": spec.eigenvalues[:, j] for j in range(symbol.n)}
    for i in cfg.axes:
        for j in range(symbol.n):
            entries[f"h{j + 1}_{i}"] = vel.velocities[:, j, i - 1].astype(complex)
    for i in cfg.axes:
        hf = h_operator_field(spec, vel, i)
        for r in range(symbol.n):
            for c in range(symbol.n):
                entries[f"H{i}_{r + 1}{c + 1}"] = hf[:, r, c]
    write_field_csv(spec.points, entries, out / "spectrum.csv")
    write_json({
        "flagged_points": int(spec.flagged.sum()),
        "flagged_fraction": spec.flagged_fraction,
        "max_discarded_imag": vel.max_imag,
        "commutator_norm": {str(i): commutator_norm(symbol, i, grid) for i in cfg.axes},
    }, out / "spectrum_summary.json")


def _limit(cfg: RunConfig, out: Path):
    symbol, grid = cfg.symbol, cfg.torus_grid
    xi = build_initial(cfg)
    spec = eigendecompose(symbol, grid, cfg.tolerances["gap"])
    vel = group_velocity_field(spec, symbol)
    mu = limit_measure(spec, vel, fourier_state(xi, grid))
    write_measure_csv(mu, out / "measure.csv")
    p = scaled_distribution(evolve(symbol, xi, cfg.t), cfg.t)
    report = compare(p, mu, cfg.probes["w"], cfg.probes["moments"]).to_dict()
    report["t"] = cfg.t
    report["unresolved_mass"] = mu.unresolved_mass
    write_json(report, out / "compare.json")


def _cocycle(cfg: RunConfig, out: Path):
    symbol, grid = cfg.symbol, cfg.torus_grid
    spec = eigendecompose(symbol, grid, cfg.tolerances["gap"])
    vel = group_velocity_field(spec, symbol)
    for i in cfg.axes:
        rep = convergence_report(symbol, i, cfg.t_list, grid,
                                 reference=h_operator_field(spec, vel, i),
                                 exclusion_radius=cfg.exclusion_radius,
                                 singular_points=cfg.singular_points, method=cfg.method)
        name = "conv.csv" if len(cfg.axes) == 1 else f"conv_axis{i}.csv"
        write_convergence_csv(rep, out / name)


def _monodromy(cfg: RunConfig, out: Path):
    mono = cfg.monodromy
    if isinstance(mono["path"], str):
        r1, r2 = exotic_paths(mono["eps"])
        path = r1 if mono["path"] == "r1" else r2
    else:
        path = line_path(*mono["path"]["line"])
    res = monodromy_probe(cfg.symbol, path, steps=mono["steps"],
                          start_branch=complex(*mono["start_branch"]))
    write_json(res.to_dict(), out / "monodromy.json")


def _verify(out: Path) -> int:
    results = acceptance.run_all(echo=print)
    write_json([{"criterion": r.number, "title": r.title, "passed": r.passed, "detail": r.detail}
                for r in results], out / "verify.json")
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


HANDLERS = {"simulate": _simulate, "spectrum": _spectrum, "limit": _limit,
            "cocycle": _cocycle, "monodromy": _monodromy}


def execute(command: str, config: RunConfig | None, out=None) -> int:
    """Run one command, writing artifacts under ``out`` (default: ``config.out``)."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; expected one of {COMMANDS}")
    if config is None:
        if command != "verify":
            raise ConfigError(f"command {command!r} needs a config")
        config = parse_config({"walk": {"name": "exotic2d"}})
    out = Path(out if out is not None else config.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.json").write_text(config.manifest(), encoding="utf-8")
    if command == "verify":
        return _verify(out)
    HANDLERS[command](config, out)
    return 0


_MODULE_OF = {WalkError: "walk-symbol", ShapeMismatchError: "lattice-sim",
              AliasingError: "limit-dist", MonodromyError: "spectral-engine",
              ConfigError: "cli-harness"}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="hqwalk", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON run configuration (optional for verify)")
    parser.add_argument("--out", help="output directory (overrides the config's 'out')")
    args = parser.parse_args(argv)
    try:
        cfg = None
        if args.config:
            cfg = parse_config(Path(args.config).read_text(encoding="utf-8"))
        elif args.command != "verify":
            parser.error(f"{args.command} requires --config")
        return execute(args.command, cfg, args.out)
    except tuple(_MODULE_OF) as exc:
        module = next(m for cls, m in _MODULE_OF.items() if isinstance(exc, cls))
        print(f"hqwalk {args.command}: error in {module}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"hqwalk {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
