"""Command-line front end.

Usage::

    fracneumann <solve|eigs|heat|extend|perimeter|verify> --config run.ini [--seed N] [--out DIR]

Exit codes: 0 success, 1 failed verification, 2 configuration error,
3 incompatible data, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .assembly import assemble_load
from .config import COMMANDS, RunConfig, emit_config, function_preset, parse_config
from .elliptic import solve
from .errors import (CompatibilityError, ConfigError, FinitenessError, MeasureError, MeshError,
                     SingularityError, TailError)
from .extension import extend, probe_csv
from .heat import evolve, trace_csv
from .kernel import KernelContext
from .mesh import mesh_csv
from .output import csv_table, gnuplot_script, to_json, write_text
from .perimeter import perimeter_json_dict, superposed_perimeter
from .spectral import eigenpairs
from .verify import build_system, run_verify

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_COMPAT, EXIT_NUMERIC = 0, 1, 2, 3, 4


def _field_csv(sys, u) -> str:
    mesh = sys.mesh
    return csv_table(["node", "x", "class", "value"],
                     [[str(i) for i in range(mesh.n_nodes)], mesh.nodes, mesh.dof_class(), u])


def cmd_solve(cfg: RunConfig, out: str, seed: int):
    sys_ = build_system(cfg)
    f = function_preset(cfg.f, cfg.a, cfg.b, seed)
    g = function_preset(cfg.g, cfg.a, cfg.b, seed)
    F = assemble_load(sys_.mesh, cfg.alpha, f, g, cfg.h)
    rep = solve(sys_, F)
    write_text(os.path.join(out, "solution.csv"), _field_csv(sys_, rep.solution))
    write_text(os.path.join(out, "mesh.csv"), mesh_csv(sys_.mesh))
    write_text(os.path.join(out, "report.json"), to_json({
        "compatibility_defect": rep.compatibility_defect,
        "constraint": rep.constraint,
        "residual_norm": rep.residual_norm,
        "n_nodes": sys_.n,
    }))
    return [("solution.csv", 2, [4], "solution")]


def cmd_eigs(cfg: RunConfig, out: str, seed: int):
    sys_ = build_system(cfg)
    k = min(cfg.eigs_k, len(sys_.mesh.interior))
    dec = eigenpairs(sys_, k)
    modes = dec.full_modes(sys_)
    write_text(os.path.join(out, "eigenvalues.json"),
               to_json({"k": k, "lambdas": dec.lambdas.tolist()}))
    header = ["node", "x"] + [f"mode{j + 1}" for j in range(k)]
    cols = [[str(i) for i in range(sys_.n)], sys_.mesh.nodes] + [modes[:, j] for j in range(k)]
    write_text(os.path.join(out, "modes.csv"), csv_table(header, cols))
    return [("modes.csv", 2, list(range(3, 3 + k)), "eigenmodes")]


def cmd_heat(cfg: RunConfig, out: str, seed: int):
    sys_ = build_system(cfg)
    u0f = function_preset(cfg.heat_u0, cfg.a, cfg.b, seed)
    x = sys_.mesh.nodes[sys_.mesh.interior]
    u0 = u0f(x) if u0f is not None else np.zeros_like(x)
    tr = evolve(sys_, u0, cfg.heat_dt, cfg.heat_T_end, cfg.heat_scheme)
    write_text(os.path.join(out, "trace.csv"), trace_csv(tr))
    write_text(os.path.join(out, "final.csv"), _field_csv(sys_, tr.final))
    return [("trace.csv", 1, [3, 4], "energy and deviation", True)]


def cmd_extend(cfg: RunConfig, out: str, seed: int):
    if cfg.measure.is_zero:
        raise MeasureError("extend needs a nontrivial measure")
    u = function_preset(cfg.extend_u0, cfg.a, cfg.b, seed) or (lambda z: np.zeros_like(z))
    probe = extend(u, cfg.extend_points, KernelContext(cfg.a, cfg.b), cfg.measure)
    write_text(os.path.join(out, "probe.csv"), probe_csv(probe))
    write_text(os.path.join(out, "probe.json"), to_json({
        "far_limit": probe.far_limit, "far_limit_error": probe.far_limit_error,
        "interior_mean": probe.interior_mean}))
    return [("probe.csv", 1, [2], "extension")]


def cmd_perimeter(cfg: RunConfig, out: str, seed: int):
    rep = superposed_perimeter(cfg.a, cfg.b, cfg.measure, cfg.perimeter_method)
    write_text(os.path.join(out, "perimeter.json"), to_json(perimeter_json_dict(rep)))
    return []


def cmd_verify(cfg: RunConfig, out: str, seed: int):
    res = run_verify(cfg, seed)
    write_text(os.path.join(out, "verify.json"), to_json(res))
    return [] if res["all_passed"] else None


HANDLERS = {"solve": cmd_solve, "eigs": cmd_eigs, "heat": cmd_heat, "extend": cmd_extend,
            "perimeter": cmd_perimeter, "verify": cmd_verify}


def _write_plots(out, command, plots, formats):
    if "gnuplot" not in formats or not plots:
        return
    parts = []
    for plot in plots:
        name, xcol, ycols, title = plot[:4]
        logy = plot[4] if len(plot) > 4 else False
        parts.append(gnuplot_script(name, xcol, ycols, title, logy))
    write_text(os.path.join(out, f"{command}.gp"), "pause -1\n".join(parts))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fracneumann",
                                description="Superposed fractional Neumann problems on an interval")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="path of the run configuration")
    p.add_argument("--seed", type=int, default=0, help="seed for random inputs (default 0)")
    p.add_argument("--out", default=None, help="output directory (overrides [output] dir)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = parse_config(fh.read())
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out or cfg.out_dir
    try:
        plots = HANDLERS[args.command](cfg, out, args.seed)
    except CompatibilityError as exc:
        print(f"incompatible data: {exc}", file=sys.stderr)
        return EXIT_COMPAT
    except (MeasureError, MeshError, FinitenessError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SingularityError, TailError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    write_text(os.path.join(out, "config.ini"), emit_config(cfg))
    if plots is None:
        print("verification failed; see verify.json", file=sys.stderr)
        return EXIT_VERIFY
    _write_plots(out, args.command, plots, cfg.formats)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
