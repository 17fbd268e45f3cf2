"""
Command-line driver for the hybrid aeroacoustic coupling pipeline.

    python app.py intersect --config run.yaml --workers 4
    python app.py integrate-check
    python app.py project-sweep --output-dir outputs/sweep
    python app.py vortex-pair --log-level DEBUG
    python app.py mesh gen --config mesh.yaml
    python app.py mesh validate path/to/mesh.txt

Exit codes: 0 success, 1 usage or configuration error, 2 geometry error,
3 solver failure.
"""

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import pandas as pd
import yaml

from src.config.settings import load_config, write_config_echo
from src.graph.vortex_pair_graph import VortexPairOrchestrator, fluid_disk, normalised
from src.intersect.engine import compute_intersection
from src.intersect.export import write_cutmesh
from src.intersect.report import intersection_report
from src.mesh.factory import build_mesh
from src.mesh.io import read_mesh, write_mesh
from src.mesh.validation import validate_mesh
from src.models.config import RunConfig
from src.models.errors import GeometryError, HybridCaaError, InvalidArgumentError, MeshParseError, SolverError
from src.projection.sweep import run_projection_sweep
from src.quadfree.check import integration_check
from src.sources.snapshots import SnapshotSeries
from src.sources.vortex import farfield_at_points
from src.utils.logging_setup import configure_logging
from src.utils.tables import write_csv, write_yaml

logger = logging.getLogger("hybrid_caa")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_GEOMETRY = 2
EXIT_SOLVER = 3


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors mapped onto exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _output_dir(config: RunConfig) -> Path:
    out = Path(config.run.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _in_output(out: Path, name: str) -> Path:
    path = Path(name)
    return path if path.is_absolute() else out / path


def cmd_intersect(config: RunConfig, args: argparse.Namespace) -> Dict[str, Any]:
    cfg = config.intersect
    seed = config.run.seed
    acoustic = build_mesh(cfg.acoustic, seed)
    fluid = build_mesh(cfg.fluid, seed + 1)
    keep = cfg.keep_polytopes or cfg.dump_polytopes
    cut = compute_intersection(
        acoustic,
        fluid,
        workers=config.run.workers,
        brute_force=cfg.brute_force or args.brute_force,
        keep_polytopes=keep,
    )
    out = _output_dir(config)
    write_cutmesh(cut, out / "cutmesh.txt", dump_polytopes=cfg.dump_polytopes)
    report = intersection_report(cut)
    write_yaml(report.counts(), out / "census.yaml")
    print(
        f"{report.records} records ({report.contained} contained, {report.clipped} clipped) "
        f"from {report.candidates} candidate pairs"
    )
    return {
        "workers": report.workers,
        "max_acoustic_residual": report.max_acoustic_residual,
        "max_fluid_residual": report.max_fluid_residual,
    }


def cmd_integrate_check(config: RunConfig, args: argparse.Namespace) -> Dict[str, Any]:
    cfg = config.integrate_check
    seed = config.run.seed
    acoustic = build_mesh(cfg.acoustic, seed)
    fluid = build_mesh(cfg.fluid, seed + 1)
    cut = compute_intersection(acoustic, fluid, workers=config.run.workers, keep_polytopes=True)
    table = integration_check(acoustic, fluid, cut, cfg.monomials, tessellation=cfg.tessellation_check)
    write_csv(table, _output_dir(config) / "integrate_check.csv")
    print(table.to_string(index=False))
    return {"worst_E_rel": float(table["E_rel"].max())}


def cmd_projection_sweep(config: RunConfig, args: argparse.Namespace) -> Dict[str, Any]:
    result = run_projection_sweep(config.project_sweep, workers=config.run.workers, seed=config.run.seed)
    out = _output_dir(config)
    write_csv(result.table, out / "projection_sweep.csv")
    write_csv(result.slopes, out / "slopes.csv")
    write_yaml(result.theorem, out / "theorem.yaml")
    print(result.slopes.to_string(index=False))
    print(f"fitted constant C = {result.theorem['C']:.4g}")
    return dict(result.timings)


def cmd_vortex_pair(config: RunConfig, args: argparse.Namespace) -> Dict[str, Any]:
    cfg = config.vortex_pair
    out = _output_dir(config)
    result = VortexPairOrchestrator().run(cfg, workers=config.run.workers, output_dir=str(out))
    if not result["success"]:
        logger.error("vortex pair failed: %s (partial results: %s)", result["error"], result["partial_results"])
        exc = result.get("exception")
        if isinstance(exc, BaseException):
            raise exc
        raise HybridCaaError(result["error"])

    history, report = result["history"], result["report"]
    line = history["line"]
    p_num = cfg.vortex.c0**2 * history["line_rho"]
    p_ana = farfield_at_points(cfg.vortex, line, history["final_time"], cfg.phase)
    probe = pd.DataFrame(
        {
            "r": np.hypot(line[:, 0], line[:, 1]),
            "p_normalized": normalised(p_num),
            "p_analytic_normalized": normalised(p_ana),
        }
    )
    write_csv(probe, out / "probe.csv")
    write_csv(pd.DataFrame({"t": history["trace_times"], "rho": history["trace"]}), out / "trace.csv")
    write_yaml(report.model_dump(), out / "report.yaml")
    if args.snapshots:
        SnapshotSeries(cfg.vortex, fluid_disk(cfg), cfg.snapshot_dt).write_snapshots(out / "snapshots", args.snapshots)
    print(
        f"waveform RMS {report.rms_deviation:.4f}, symmetry {report.symmetry_deviation:.4f}, "
        f"period {report.period:.3f} (T_a {report.acoustic_period:.3f})"
    )
    return result["timings"]


def cmd_mesh_gen(config: RunConfig, args: argparse.Namespace) -> Dict[str, Any]:
    cfg = config.mesh_gen
    mesh = build_mesh(cfg.mesh, config.run.seed)
    path = write_mesh(mesh, _in_output(_output_dir(config), args.output or cfg.output))
    print(f"wrote {mesh.n_cells} cells to {path}")
    return {}


def cmd_mesh_validate(config: RunConfig, args: argparse.Namespace) -> Dict[str, Any]:
    mesh = read_mesh(args.path, validate=False)
    report = validate_mesh(mesh, strict=False)
    print(yaml.safe_dump(report.model_dump(), sort_keys=False), end="")
    if not report.valid:
        raise GeometryError(report.first_error or "mesh is invalid")
    return {}


COMMANDS: Dict[str, Callable[[RunConfig, argparse.Namespace], Dict[str, Any]]] = {
    "intersect": cmd_intersect,
    "integrate-check": cmd_integrate_check,
    "project-sweep": cmd_projection_sweep,
    "vortex-pair": cmd_vortex_pair,
    "mesh gen": cmd_mesh_gen,
    "mesh validate": cmd_mesh_validate,
}


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML run configuration merged over the defaults")
    common.add_argument("--workers", type=int, help="worker processes; 0 means one per CPU")
    common.add_argument("--output-dir", help="directory for every output file")
    common.add_argument("--seed", type=int, help="seed for distorted meshes")
    common.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])

    parser = ArgumentParser(prog="hybrid-caa", description="Hybrid aeroacoustic coupling pipeline")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    p = sub.add_parser("intersect", parents=[common], help="intersect two meshes and export the cut mesh")
    p.add_argument("--brute-force", action="store_true", help="test every cell pair in the broad phase")
    sub.add_parser("integrate-check", parents=[common], help="monomial integration exactness table")
    sub.add_parser("project-sweep", parents=[common], help="projection convergence sweep")
    p = sub.add_parser("vortex-pair", parents=[common], help="corotating vortex-pair acoustic run")
    p.add_argument("--snapshots", type=int, default=0, help="also write this many fluid snapshots")

    mesh = sub.add_parser("mesh", help="mesh generation and validation")
    mesh_sub = mesh.add_subparsers(dest="mesh_command", required=True, parser_class=ArgumentParser)
    p = mesh_sub.add_parser("gen", parents=[common], help="write a generated mesh")
    p.add_argument("--output", help="mesh file name, relative to the output directory")
    p = mesh_sub.add_parser("validate", parents=[common], help="check every mesh invariant")
    p.add_argument("path", help="mesh file")
    return parser


def cli_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    run = {
        key: value
        for key, value in (
            ("workers", args.workers),
            ("output_dir", args.output_dir),
            ("seed", args.seed),
            ("log_level", args.log_level),
        )
        if value is not None
    }
    return {"run": run} if run else {}


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, SolverError):
        return EXIT_SOLVER
    if isinstance(exc, (GeometryError, MeshParseError)):
        return EXIT_GEOMETRY
    return EXIT_USAGE


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.command if args.command != "mesh" else f"mesh {args.mesh_command}"
    try:
        config = load_config(args.config, cli_overrides(args))
    except InvalidArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    configure_logging(config.run.log_level)

    started = time.perf_counter()
    try:
        out = _output_dir(config)
        write_config_echo(config, out)
        details = COMMANDS[command](config, args)
    except (HybridCaaError, OSError) as exc:
        logger.error("%s failed: %s", command, exc)
        print(f"error: {exc}", file=sys.stderr)
        return exit_code(exc)
    write_yaml(
        {
            "command": command,
            "workers": config.run.workers,
            "seconds": time.perf_counter() - started,
            "details": details,
        },
        out / "timing.yaml",
    )
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
