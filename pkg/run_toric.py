# -*- coding: utf-8 -*-
"""
CLI runner for the toric stability toolkit.

Usage:
    python run_toric.py certify --config cp1_round_config.json
    python run_toric.py stability-scan --config destabilized_interval_config.json --directions 72
    python run_toric.py solve-ak --config cp2_config.json --degree 4

Outputs (in output.dir):
    - <command>_report.json
    - <command>_<table>.csv   (plot-ready grids: profiles, scan samples, eigenvalue grids)

Exit status: 0 on success, 2 on NOT_STABLE verdicts, 1 on errors.
"""
import argparse
import json
import os
import sys
import time
import warnings
from typing import Any, Callable, Dict, List, Optional, Tuple

import pandas as pd

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), 'src'))

from config import RunConfig, load_config  # noqa: E402
from errors import ConfigError, ToricError  # noqa: E402
from fibration import BASE_VOLUME, FibrationScenario, calabi_dream_check, total_volume_factor  # noqa: E402
from geometry import LabelledPolytope, barycenter, check_delzant  # noqa: E402
from numbers_util import jsonable  # noqa: E402
from polynomials import PolynomialFunc  # noqa: E402
from potentials import SymplecticPotential, mabuchi_energy, mabuchi_profile  # noqa: E402
from solvers import EXISTS, NOT_STABLE, UNDECIDED, certify, solve_1d, solve_ak  # noqa: E402
from stability import futaki, l1_norm, normalize, stability_scan  # noqa: E402
from weights import (  # noqa: E402
    WeightSystem, affine_residuals, build_weight_system, explicit_weight_system, extremal_split,
)

NOT_DELZANT = 'NOT_DELZANT'

COMMANDS = ('check-delzant', 'extremal', 'futaki', 'stability-scan', 'solve-1d', 'solve-ak', 'certify',
            'mabuchi', 'scenario')

Result = Tuple[str, Dict[str, Any], Dict[str, Any], Dict[str, List[Dict[str, Any]]]]


def ensure_dir(path: str):
    os.makedirs(path, exist_ok=True)


# -----------------------
# Builders
# -----------------------

def build_polytope_from(cfg: RunConfig) -> LabelledPolytope:
    return cfg.require_polytope().build()


def build_weights_from(cfg: RunConfig, P: LabelledPolytope) -> WeightSystem:
    cfg.require_weights()
    sign = cfg.solver.futaki_sign
    if cfg.weights is not None:
        v, w = cfg.weights.build(P.dim)
        return explicit_weight_system(P, v, w, sign)
    return build_weight_system(P, cfg.fibration.build(), sign)


def build_potential_from(cfg: RunConfig, P: LabelledPolytope) -> SymplecticPotential:
    if cfg.potential.type == 'guillemin':
        return SymplecticPotential(P)
    corr = PolynomialFunc.from_table(cfg.potential.coeffs, P.dim)
    return SymplecticPotential(P, None if corr.is_zero else corr)


# -----------------------
# Commands: each returns (verdict, evidence, residuals, csv tables)
# -----------------------

def cmd_check_delzant(cfg: RunConfig) -> Result:
    P = build_polytope_from(cfg)
    report = check_delzant(P)
    evidence = dict(report.to_dict(), polytope=P.to_dict(), vertices=jsonable(P.vertices))
    if not report.passed:
        print(f"❌ not Delzant: {report.reason}")
        return NOT_DELZANT, evidence, {}, {}
    return 'DELZANT', evidence, {}, {}


def cmd_extremal(cfg: RunConfig) -> Result:
    P = build_polytope_from(cfg)
    ws = build_weights_from(cfg, P)
    residuals = {'affine': affine_residuals(P, ws)}
    evidence: Dict[str, Any] = {'weights': ws.to_dict()}
    if ws.ell_ext is not None:
        xi, c, constant = extremal_split(ws.ell_ext)
        evidence.update(xi_ext=list(xi), c_ext=c, cscK_on_total_space=constant)
    evidence['volume_factor'] = total_volume_factor(P, ws.v)
    evidence['volume'] = f"{jsonable(evidence['volume_factor'])} {BASE_VOLUME}"
    return 'OK', evidence, residuals, {}


def cmd_futaki(cfg: RunConfig) -> Result:
    P = build_polytope_from(cfg)
    ws = build_weights_from(cfg, P)
    if cfg.test_function is None:
        raise ConfigError('test_function', 'is required for futaki')
    f = cfg.test_function.build(P.dim)
    x0 = tuple(cfg.test_function.x0) if cfg.test_function.x0 else barycenter(P)
    value = futaki(P, ws, f)
    norm = l1_norm(P, normalize(P, f, x0))
    ratio = (value / norm) if norm != 0 else None
    evidence = {'test_function': f.to_dict() if hasattr(f, 'to_dict') else f.to_table(),
                'futaki': value, 'l1_norm': norm, 'ratio': ratio, 'x0': list(x0)}
    verdict = NOT_STABLE if float(value) < 0 else 'OK'
    return verdict, evidence, {}, {}


def cmd_stability_scan(cfg: RunConfig) -> Result:
    P = build_polytope_from(cfg)
    ws = build_weights_from(cfg, P)
    report = stability_scan(P, ws, directions=cfg.scan.directions, offsets=cfg.scan.offsets,
                            refine=cfg.scan.refine)
    verdict = NOT_STABLE if report.has_destabilizer else 'NO_DESTABILIZER'
    return verdict, report.to_dict(), {}, {'samples': report.table}


def cmd_solve_1d(cfg: RunConfig) -> Result:
    P = build_polytope_from(cfg)
    ws = build_weights_from(cfg, P)
    report = solve_1d(P, ws, grid_points=cfg.solver.grid_for(1), affine_tol=cfg.solver.affine_tol)
    verdict = EXISTS if report.positive else NOT_STABLE
    evidence = report.to_dict()
    return verdict, evidence, evidence['residuals'], {'profile': report.profile()}


def cmd_solve_ak(cfg: RunConfig) -> Result:
    P = build_polytope_from(cfg)
    ws = build_weights_from(cfg, P)
    cert = solve_ak(P, ws, degree=cfg.solver.degree, degree_slack=cfg.solver.degree_slack, tol=cfg.solver.tol,
                    ascent_iterations=cfg.solver.ascent_iterations, grid_points=cfg.solver.eig_grid)
    residuals = {'pde': cert.pde_residual, 'bc': cert.bc_residual, 'verify': cert.verify_residual}
    return cert.verdict.upper(), cert.to_dict(), residuals, {'eigenvalues': cert.eig_table}


def cmd_certify(cfg: RunConfig) -> Result:
    P = build_polytope_from(cfg)
    ws = build_weights_from(cfg, P)
    s = cfg.solver
    report = certify(P, ws, directions=cfg.scan.directions, offsets=cfg.scan.offsets, refine=cfg.scan.refine,
                     grid_points=s.grid_points if P.dim == 1 else s.eig_grid, degree=s.degree,
                     degree_slack=s.degree_slack, tol=s.tol, affine_tol=s.affine_tol,
                     ascent_iterations=s.ascent_iterations)
    evidence = report.to_dict()
    tables: Dict[str, List[Dict[str, Any]]] = {}
    residuals: Dict[str, Any] = {}
    if report.scan is not None:
        tables['samples'] = report.scan.table
    if report.solve is not None and P.dim == 1:
        tables['profile'] = report.solve.profile()
        residuals = dict(report.solve.residuals)
    elif report.solve is not None:
        tables['eigenvalues'] = report.solve.eig_table
        residuals = {'pde': report.solve.pde_residual, 'bc': report.solve.bc_residual}
    return report.verdict, evidence, residuals, tables


def cmd_mabuchi(cfg: RunConfig) -> Result:
    P = build_polytope_from(cfg)
    ws = build_weights_from(cfg, P)
    u = build_potential_from(cfg, P)
    evidence: Dict[str, Any] = {'potential': u.to_dict(), 'mabuchi': mabuchi_energy(P, ws, u)}
    tables = {}
    if cfg.potential.direction:
        f = PolynomialFunc.from_table(cfg.potential.direction, P.dim)
        ts = cfg.potential.ts or [0, 0.5, 1, 1.5, 2]
        profile = mabuchi_profile(P, ws, u, f, ts)
        evidence['profile'] = [{'t': t, 'mabuchi': m} for t, m in profile]
        tables['profile'] = evidence['profile']
    return 'OK', evidence, {}, tables


def cmd_scenario(cfg: RunConfig) -> Result:
    if cfg.scenario is None:
        raise ConfigError('scenario', 'is required for scenario')
    sc = cfg.scenario
    fiber = sc.fiber.build()
    scenario = FibrationScenario(fiber, sc.fibration(), [tuple(c) for c in sc.sweep], sc.genus, sc.area, cfg.name)
    s = cfg.solver
    report = calabi_dream_check(scenario, directions=cfg.scan.directions, offsets=cfg.scan.offsets,
                                refine=cfg.scan.refine, grid_points=s.grid_points if fiber.dim == 1 else s.eig_grid,
                                degree=s.degree, degree_slack=s.degree_slack, tol=s.tol, affine_tol=s.affine_tol,
                                ascent_iterations=s.ascent_iterations)
    verdict = NOT_STABLE if report.has_not_stable else (EXISTS if report.all_exist else UNDECIDED)
    table = [{'c': ' '.join(str(x) for x in jsonable(row['c'])), 'verdict': row['verdict'],
              'lambda_hat': jsonable(row['lambda_hat'])} for row in report.classes]
    return verdict, report.to_dict(), {}, {'classes': table}


HANDLERS: Dict[str, Callable[[RunConfig], Result]] = {
    'check-delzant': cmd_check_delzant,
    'extremal': cmd_extremal,
    'futaki': cmd_futaki,
    'stability-scan': cmd_stability_scan,
    'solve-1d': cmd_solve_1d,
    'solve-ak': cmd_solve_ak,
    'certify': cmd_certify,
    'mabuchi': cmd_mabuchi,
    'scenario': cmd_scenario,
}


# -----------------------
# Output
# -----------------------

def write_outputs(cfg: RunConfig, command: str, report: Dict[str, Any], tables: Dict[str, List[Dict[str, Any]]]):
    ensure_dir(cfg.output.dir)
    stem = command.replace('-', '_')
    path = os.path.join(cfg.output.dir, f'{stem}_report.json')
    with open(path, 'w') as f:
        json.dump(jsonable(report), f, indent=2)
    print(f"📄 Report saved to {path}")
    if not cfg.output.csv:
        return
    for name, rows in tables.items():
        if not rows:
            continue
        csv_path = os.path.join(cfg.output.dir, f'{stem}_{name}.csv')
        pd.DataFrame(jsonable(rows)).to_csv(csv_path, index=False)
        print(f"📊 {name} grid saved to {csv_path}")


def apply_overrides(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    if args.directions is not None:
        cfg.scan.directions = args.directions
    if args.offsets is not None:
        cfg.scan.offsets = args.offsets
    if args.refine is not None:
        cfg.scan.refine = args.refine
    if args.degree is not None:
        cfg.solver.degree = args.degree
    if args.grid_points is not None:
        cfg.solver.grid_points = args.grid_points
    if args.output_dir is not None:
        cfg.output.dir = args.output_dir
    cfg.solver.validate()
    return cfg


def _fail(cfg: RunConfig, command: str, report: Dict[str, Any], start: float, error: Exception,
          kind: Optional[str] = None) -> int:
    label = f"{kind}: " if kind else ""
    print(f"❌ {command} failed: {label}{error}")
    evidence = {'error': str(error)}
    if kind:
        evidence['type'] = kind
    report.update(verdict='ERROR', evidence=evidence, residuals={},
                  timing={'seconds': time.perf_counter() - start})
    write_outputs(cfg, command, report, {})
    return 1


def run(command: str, cfg: RunConfig) -> int:
    """Execute one command; returns the exit status."""
    start = time.perf_counter()
    report: Dict[str, Any] = {'command': command, 'name': cfg.name}
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always')
        try:
            verdict, evidence, residuals, tables = HANDLERS[command](cfg)
        except ToricError as e:
            return _fail(cfg, command, report, start, e)
        except Exception as e:
            return _fail(cfg, command, report, start, e, kind=type(e).__name__)
    for w in caught:
        print(f"⚠️  {w.message}")
    report.update(verdict=verdict, evidence=evidence, residuals=residuals,
                  timing={'seconds': time.perf_counter() - start})
    write_outputs(cfg, command, report, tables)
    glyph = {NOT_STABLE: '🎯', NOT_DELZANT: '❌'}.get(verdict, '✅')
    print(f"{glyph} {command}: {verdict} ({report['timing']['seconds']:.2f}s)")
    if verdict == NOT_DELZANT:
        return 1
    return 2 if verdict == NOT_STABLE else 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(description='Weighted K-stability of labelled Delzant polytopes')
    parser.add_argument('command', choices=COMMANDS, help='Operation to run')
    parser.add_argument('--config', required=True, help='Path to the JSON run config')
    parser.add_argument('--directions', type=int, default=None, help='Crease directions for the scan')
    parser.add_argument('--offsets', type=int, default=None, help='Crease offsets per direction')
    refine = parser.add_mutually_exclusive_group()
    refine.add_argument('--refine', dest='refine', action='store_const', const=True, default=None,
                        help='Refine the scan minimum with a bounded search')
    refine.add_argument('--no-refine', dest='refine', action='store_const', const=False,
                        help='Skip bounded refinement of the scan minimum')
    parser.add_argument('--degree', type=int, default=None, help='Starting degree D for solve-ak')
    parser.add_argument('--grid-points', type=int, default=None, help='Grid size for potential recovery')
    parser.add_argument('--output-dir', default=None, help='Directory to save outputs')
    args = parser.parse_args(argv)

    try:
        cfg = apply_overrides(load_config(args.config), args)
    except (ToricError, OSError) as e:
        print(f"❌ Invalid config: {e}")
        return 1
    print(f"🚀 {args.command} on {cfg.name}")
    return run(args.command, cfg)


if __name__ == '__main__':
    sys.exit(main())
