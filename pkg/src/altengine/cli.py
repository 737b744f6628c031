"""Command-line front end.

Every subcommand reads a JSON config, runs the corresponding library routines,
and writes ``report.json`` plus mode-specific data files into the output
directory. Report and data files are byte-identical across reruns with the
same config and seed; wall-clock timings go to a separate ``timings.json`` so
they cannot break that guarantee.

Exit codes: 0 on success, 2 for config errors, 3 for numeric or validation
failures.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import athermality, coherence, mutual, qubit_control
from .errors import EngineError
from .matrices import NAMED_MATRICES, format_matrix_text, parse_matrix_text, qubit_engine_unitary


class ConfigError(Exception):
    """Configuration failed schema validation."""


# ---------------------------------------------------------------------------
# config plumbing


def _load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"config {path!r} must be a JSON object")
    return cfg


def _check_schema(cfg: dict, mode: str, required: dict, optional: dict) -> None:
    allowed = set(required) | set(optional) | {"mode", "seed"}
    unknown = sorted(set(cfg) - allowed)
    if unknown:
        raise ConfigError(f"{mode}: unknown config keys {unknown}; allowed: {sorted(allowed)}")
    if "mode" in cfg and cfg["mode"] != mode:
        raise ConfigError(f"config mode {cfg['mode']!r} does not match subcommand {mode!r}")
    for key in required:
        if key not in cfg:
            raise ConfigError(f"{mode}: missing required config key {key!r}")
    for key, types in {**required, **optional}.items():
        if key not in cfg:
            continue
        type_tuple = types if isinstance(types, tuple) else (types,)
        if not isinstance(cfg[key], type_tuple) or (
                isinstance(cfg[key], bool) and bool not in type_tuple):
            raise ConfigError(
                f"{mode}: key {key!r} has type {type(cfg[key]).__name__}, "
                f"expected {types}")


def _number(cfg: dict, key: str, mode: str) -> float:
    value = cfg[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{mode}: key {key!r} must be a number")
    return float(value)


def _number_list(cfg: dict, key: str, mode: str) -> list[float]:
    value = cfg[key]
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{mode}: key {key!r} must be a non-empty list of numbers")
    out = []
    for item in value:
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise ConfigError(f"{mode}: key {key!r} must contain only numbers")
        out.append(float(item))
    return out


def _parse_complex_entry(value, where: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, str):
        try:
            return complex(value.replace("i", "j"))
        except ValueError as exc:
            raise ConfigError(f"{where}: cannot parse complex entry {value!r}") from exc
    raise ConfigError(f"{where}: entries must be numbers or 'a+bi' strings")


_MATRIX_KINDS = ("file", "named", "fourier", "identity", "qubit_engine")


def _matrix_spec(spec, mode: str) -> dict:
    if isinstance(spec, dict):
        return spec
    if isinstance(spec, str):
        tokens = spec.split()
        if not tokens:
            raise ConfigError(f"{mode}: empty matrix spec")
        if len(tokens) == 1 and tokens[0] in NAMED_MATRICES:
            return {"kind": "named", "name": tokens[0]}
        out: dict = {"kind": tokens[0]}
        for token in tokens[1:]:
            if "=" not in token:
                raise ConfigError(f"{mode}: matrix spec token {token!r} is not key=value")
            key, raw = token.split("=", 1)
            try:
                value: object = int(raw)
            except ValueError:
                try:
                    value = float(raw)
                except ValueError:
                    value = raw
            out[key] = value
        return out
    raise ConfigError(f"{mode}: matrix spec must be a string or an object")


def resolve_matrix(spec, mode: str, base_dir: Path) -> np.ndarray:
    """Build the input matrix from a config spec: a file of 'a+bi' rows, a
    named example, or one of the generators (fourier, identity, qubit_engine).
    Compact string specs like "fourier d=5 alpha=0.3" are also accepted."""
    parsed = _matrix_spec(spec, mode)
    kind = parsed.get("kind")
    if kind not in _MATRIX_KINDS:
        raise ConfigError(f"{mode}: matrix kind {kind!r} not one of {_MATRIX_KINDS}")
    fields = {k: v for k, v in parsed.items() if k != "kind"}

    def take(name, *, default=None, required=False):
        if required and name not in fields:
            raise ConfigError(f"{mode}: matrix kind {kind!r} needs field {name!r}")
        return fields.pop(name, default)

    if kind == "file":
        path = take("path", required=True)
        candidate = Path(path)
        if not candidate.is_absolute():
            candidate = base_dir / candidate
        try:
            text = candidate.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"{mode}: cannot read matrix file {str(candidate)!r}: {exc}") from exc
        try:
            result = parse_matrix_text(text)
        except ValueError as exc:
            raise ConfigError(f"{mode}: matrix file {str(candidate)!r}: {exc}") from exc
    elif kind == "named":
        name = take("name", required=True)
        if name not in NAMED_MATRICES:
            raise ConfigError(
                f"{mode}: unknown named matrix {name!r}; available: {sorted(NAMED_MATRICES)}")
        result = NAMED_MATRICES[name].copy()
    elif kind == "fourier":
        d = take("d", required=True)
        alpha = take("alpha", default=1.0)
        if not isinstance(d, int) or d < 2:
            raise ConfigError(f"{mode}: fourier needs integer d >= 2, got {d!r}")
        result = coherence.fractional_fourier(d, float(alpha))
    elif kind == "identity":
        d = take("d", required=True)
        if not isinstance(d, int) or d < 1:
            raise ConfigError(f"{mode}: identity needs integer d >= 1, got {d!r}")
        result = np.eye(d, dtype=complex)
    else:
        phi = take("phi", required=True)
        phase0 = take("phase0", default=0.0)
        phase1 = take("phase1", default=0.0)
        result = qubit_engine_unitary(float(phi), float(phase0), float(phase1))
    if fields:
        raise ConfigError(f"{mode}: matrix kind {kind!r} got unknown fields {sorted(fields)}")
    return result


# ---------------------------------------------------------------------------
# serialization


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return _jsonable(obj.astype(complex).tolist())
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return x
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        if z.imag == 0.0:
            return _jsonable(z.real)
        return f"{z.real!r}{'+' if z.imag >= 0 else '-'}{abs(z.imag)!r}i"
    return obj


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_vertices_csv(path: Path, history, dim: int) -> None:
    rows = []
    for snap in history:
        for v in snap.vertices:
            rows.append((snap.stroke, *[float(x) for x in v]))
    rows.sort()
    lines = ["stroke," + ",".join(f"p{i}" for i in range(1, dim + 1))]
    lines += [",".join([str(r[0])] + [_fmt(x) for x in r[1:]]) for r in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _rotation_payload(rot: qubit_control.Rotation) -> dict:
    return {"axis": [float(c) for c in rot.axis], "angle": float(rot.angle)}


def _plan_payload(plan: qubit_control.StrokePlan) -> dict:
    return {
        "kind": plan.kind,
        "alpha_axis": plan.alpha_axis,
        "rotations": [_rotation_payload(r) for r in plan.rotations],
        "length": len(plan),
        "guaranteed_bound": plan.guaranteed_bound,
        "meets_reference_bound": plan.meets_reference_bound,
    }


def _state_payload(psi: np.ndarray) -> list:
    return _jsonable(np.asarray(psi, dtype=complex))


# ---------------------------------------------------------------------------
# subcommand runners (each returns the results dict and may write data files)


def _run_athermality(cfg: dict, out_dir: Path, seed: int, args) -> dict:
    _check_schema(cfg, "athermality",
                  required={"levels": list, "alpha": (int, float), "beta": (int, float)},
                  optional={"start": (str, list), "max_strokes": int,
                            "first_bath": str, "conv_tol": (int, float)})
    levels = _number_list(cfg, "levels", "athermality")
    alpha = _number(cfg, "alpha", "athermality")
    beta = _number(cfg, "beta", "athermality")
    start = cfg.get("start", "cold")
    if isinstance(start, list):
        start = _number_list(cfg, "start", "athermality")
    elif start not in ("cold", "hot"):
        raise ConfigError(
            f"athermality: start must be 'cold', 'hot', or a probability vector, got {start!r}")
    max_strokes = args.max_strokes if args.max_strokes is not None else cfg.get("max_strokes", 20)
    conv_tol = args.tol if args.tol is not None else float(cfg.get("conv_tol", athermality.CONV_TOL))
    first_bath = cfg.get("first_bath")
    if first_bath is not None and first_bath not in ("cold", "hot"):
        raise ConfigError(f"athermality: first_bath must be 'cold' or 'hot', got {first_bath!r}")
    if max_strokes < 0:
        raise ConfigError(f"athermality: max_strokes must be >= 0, got {max_strokes}")

    params = athermality.EngineParams(levels=tuple(levels), cold_beta=alpha, hot_beta=beta)
    history = athermality.simulate(params, start=start, max_strokes=max(1, max_strokes),
                                   conv_tol=conv_tol, first_bath=first_bath)
    final = history[-1]
    d = params.dim

    results: dict = {
        "dim": d,
        "cold_gibbs": params.cold_gibbs,
        "hot_gibbs": params.hot_gibbs,
        "top_bound_threshold": athermality.top_bound_threshold(params),
        "respects_top_bound": athermality.respects_top_bound(final.vertices, params),
        "ground_state_criterion": athermality.ground_state_criterion(params),
        "degenerate": params.is_degenerate,
        "n_strokes_run": final.stroke,
        "converged": final.converged,
        "strokes": [
            {"stroke": s.stroke, "bath": s.bath, "n_vertices": int(s.vertices.shape[0]),
             "hausdorff_delta": s.hausdorff_delta, "converged": s.converged}
            for s in history
        ],
        "final_vertices": final.vertices,
    }
    polytope = None
    if not params.is_degenerate:
        att = athermality.attractor_states(params)
        results["attractors"] = {"ground": att.ground, "excited": att.excited}
        polytope = athermality.inner_polytope(params)
        results["inner_polytope"] = polytope
    else:
        results["attractors"] = None
        results["inner_polytope"] = None
    if d == 2 and not params.is_degenerate:
        limit = athermality.qubit_reachable_interval(history[0].vertices[0], params)
        results["qubit_asymptotic"] = {"lo": limit.lo, "hi": limit.hi, "kind": limit.kind}

    _write_vertices_csv(out_dir / "vertices.csv", history, d)
    if d == 3:
        from .plots import render_simplex_figure

        render_simplex_figure(str(out_dir / "simplex.svg"), final.vertices, polytope,
                              results["top_bound_threshold"])
    return results


def _near_zero_entries(U: np.ndarray) -> int:
    mags = np.abs(U)
    return int(np.count_nonzero((mags > coherence.TOL_ZERO) & (mags < 1e-6)))


def _run_coherence(cfg: dict, out_dir: Path, seed: int, args) -> dict:
    _check_schema(cfg, "coherence",
                  required={"matrix": (str, dict)},
                  optional={"n_fourier": int, "search": bool, "search_budget": int,
                            "dense_witness": bool, "dense_power": int})
    U = resolve_matrix(cfg["matrix"], "coherence", Path(args.config).resolve().parent)
    tol_dense = args.tol if args.tol is not None else coherence.TOL_DENSE
    U = coherence.check_unitary(U)
    d = U.shape[0]

    verdict = coherence.pattern_primitivity(U)
    diag = coherence.graph_diagnosis(coherence.overlap_pattern(U))
    results: dict = {
        "dim": d,
        "unitarity_defect": coherence.unitarity_defect(U),
        "near_zero_entries": _near_zero_entries(U),
        "pattern": coherence.pattern_matrix(U).astype(int),
        "overlap_pattern": coherence.overlap_pattern(U).astype(int),
        "primitivity": {"satisfied": verdict.satisfied,
                        "minimal_power": verdict.minimal_power,
                        "horizon": verdict.horizon},
        "graph": {"irreducible": diag.irreducible, "aperiodic": diag.aperiodic,
                  "power_upper_bound": diag.power_upper_bound},
        "column_overlap": coherence.column_overlap(U) if d >= 3 else None,
        "stroke_lower_bound": coherence.lower_bound_strokes(U) if d >= 3 else None,
        "blockers": {
            "dominant_entry": mutual.dominant_entry_blocker(U),
            "permutation_proximity": vars(mutual.permutation_proximity_blocker(U)),
        },
        "flat_column_necessary": vars(mutual.flat_column_necessary(U)),
    }
    n_fourier = cfg.get("n_fourier")
    if n_fourier is not None and d >= 4 and d % 2 == 0:
        results["stroke_upper_bound"] = coherence.upper_bound_strokes(d, n_fourier)
    else:
        results["stroke_upper_bound"] = None

    if verdict.satisfied and cfg.get("dense_witness", True):
        power = cfg.get("dense_power", verdict.minimal_power)
        witness = coherence.synthesize_dense_product(U, power, seed=seed, tol_dense=tol_dense)
        results["dense_witness"] = {
            "power": power,
            "attempts": witness.attempts,
            "min_abs_entry": float(np.abs(witness.product).min()),
            "phases": witness.phases,
        }
    else:
        results["dense_witness"] = None

    if cfg.get("search", True):
        solution = mutual.search_flat_column(U, budget=cfg.get("search_budget"), seed=seed)
        if solution is None:
            results["flat_search"] = {"found": False}
        else:
            results["flat_search"] = {
                "found": True, "column": solution.column,
                "convention": solution.convention, "phases": solution.phases,
                "residual": solution.residual,
            }
    else:
        results["flat_search"] = None
    return results


def _run_sweep(cfg: dict, out_dir: Path, seed: int, args) -> dict:
    _check_schema(cfg, "sweep", required={"d_list": list, "alpha_grid": list}, optional={})
    d_list = cfg["d_list"]
    for d in d_list:
        if isinstance(d, bool) or not isinstance(d, int) or d < 3:
            raise ConfigError(f"sweep: d_list entries must be integers >= 3, got {d!r}")
    alphas = _number_list(cfg, "alpha_grid", "sweep")
    for a in alphas:
        if not 0.0 < a <= 1.0:
            raise ConfigError(f"sweep: alpha values must lie in (0, 1], got {a!r}")
    alphas = sorted(alphas)

    rows = []
    monotone = {}
    worst = {}
    for d in sorted(set(d_list)):
        bounds = [coherence.lower_bound_strokes(coherence.fractional_fourier(d, a))
                  for a in alphas]
        # The bound is non-increasing for d <= 5 but genuinely wiggles at the
        # 1e-3 scale in the mid-range for larger even d, so the verdict is
        # reported per dimension instead of aborting the run.
        increase = max((cur - prev for prev, cur in zip(bounds, bounds[1:])
                        if math.isfinite(prev)), default=0.0)
        monotone[d] = bool(increase <= 1e-9)
        worst[d] = max(increase, 0.0)
        rows.extend((d, a, b) for a, b in zip(alphas, bounds))

    lines = ["d,alpha,bound"]
    lines += [f"{d},{_fmt(a)},{'inf' if math.isinf(b) else _fmt(b)}" for d, a, b in rows]
    (out_dir / "sweep.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    from .plots import render_sweep_figure

    render_sweep_figure(str(out_dir / "sweep.svg"), rows)
    return {"rows": [{"d": d, "alpha": a, "bound": b} for d, a, b in rows],
            "monotone_non_increasing": {str(d): monotone[d] for d in sorted(monotone)},
            "max_increase": {str(d): worst[d] for d in sorted(worst)}}


def _run_qubit_synth(cfg: dict, out_dir: Path, seed: int, args) -> dict:
    _check_schema(cfg, "qubit_synth",
                  required={"alpha_axis": (int, float), "goal": str},
                  optional={"matrix": (str, dict), "state": list})
    alpha_axis = _number(cfg, "alpha_axis", "qubit_synth")
    goal = cfg["goal"]
    if goal == "unitary":
        if "matrix" not in cfg:
            raise ConfigError("qubit_synth: goal 'unitary' needs a 'matrix' spec")
        V = resolve_matrix(cfg["matrix"], "qubit_synth", Path(args.config).resolve().parent)
        if V.shape != (2, 2):
            raise ConfigError(f"qubit_synth: matrix must be 2x2, got {V.shape}")
        plan = qubit_control.synthesize_unitary(V, alpha_axis)
        e = qubit_control.euler_zxz(V)
        return {
            "goal": "unitary",
            "euler": {"z_after": e.z_after, "x_tilt": e.x_tilt,
                      "z_before": e.z_before, "phase": e.phase},
            "plan": _plan_payload(plan),
            "operator_error": qubit_control.operator_distance(
                qubit_control.plan_matrix(plan), V),
        }
    if goal == "state":
        if "state" not in cfg or len(cfg["state"]) != 2:
            raise ConfigError("qubit_synth: goal 'state' needs a 2-entry 'state' list")
        target = np.array([_parse_complex_entry(v, "qubit_synth state") for v in cfg["state"]])
        norm = np.linalg.norm(target)
        if norm == 0.0:
            raise ConfigError("qubit_synth: state must be nonzero")
        target = target / norm
        plan = qubit_control.synthesize_state(target, alpha_axis)
        reached = qubit_control.apply_plan(plan)
        return {
            "goal": "state",
            "target": _state_payload(target),
            "start_state": _state_payload(plan.start_state),
            "plan": _plan_payload(plan),
            "fidelity": float(abs(np.vdot(target, reached)) ** 2),
        }
    raise ConfigError(f"qubit_synth: goal must be 'unitary' or 'state', got {goal!r}")


def _run_mutual_search(cfg: dict, out_dir: Path, seed: int, args) -> dict:
    _check_schema(cfg, "mutual",
                  required={"matrix": (str, dict)},
                  optional={"budget": int, "tol_flat": (int, float)})
    U = resolve_matrix(cfg["matrix"], "mutual", Path(args.config).resolve().parent)
    tol_flat = args.tol if args.tol is not None else float(cfg.get("tol_flat", mutual.TOL_FLAT))
    U = coherence.check_unitary(U)

    necessity = mutual.flat_column_necessary(U)
    results: dict = {
        "dim": U.shape[0],
        "flat_column_necessary": vars(necessity),
        "blockers": {
            "dominant_entry": mutual.dominant_entry_blocker(U),
            "permutation_proximity": vars(mutual.permutation_proximity_blocker(U)),
        },
    }
    solution = mutual.search_flat_column(U, budget=cfg.get("budget"), seed=seed,
                                         tol_flat=tol_flat)
    if solution is None:
        results["search"] = {"found": False}
        results["realized"] = None
        return results
    results["search"] = {
        "found": True, "column": solution.column, "convention": solution.convention,
        "phases": solution.phases, "residual": solution.residual,
    }
    realized = mutual.realize_state(U, solution, seed=seed, budget=cfg.get("budget"))
    if realized is None:
        results["realized"] = None
    else:
        results["realized"] = {
            "psi": _state_payload(realized.psi),
            "second_phases": realized.second_phases,
            "verified": mutual.verify_mutually_coherent(U, realized.psi, tol=10 * tol_flat),
        }
    return results


_RUNNERS = {
    "athermality": _run_athermality,
    "coherence": _run_coherence,
    "sweep": _run_sweep,
    "qubit-synth": _run_qubit_synth,
    "mutual-search": _run_mutual_search,
}

_MODE_NAMES = {
    "athermality": "athermality",
    "coherence": "coherence",
    "sweep": "sweep",
    "qubit-synth": "qubit_synth",
    "mutual-search": "mutual",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="altengine",
        description="Two-bath engine reachability and coherence-control toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "athermality": "simulate reachable occupation sets for a two-bath machine",
        "coherence": "analyze a unitary's stroke structure and density bounds",
        "sweep": "tabulate stroke lower bounds over fractional basis changes",
        "qubit-synth": "compile a single-qubit unitary or state into engine strokes",
        "mutual-search": "search for mutually coherent states reachable in few strokes",
    }
    for name in _RUNNERS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--config", required=True, help="path to the JSON config file")
        p.add_argument("--seed", type=int, default=None,
                       help="seed override (default: config value, else 0)")
        p.add_argument("--out", default=".", help="output directory (default: current)")
        p.add_argument("--max-strokes", type=int, default=None, dest="max_strokes",
                       help="stroke cap override (athermality)")
        p.add_argument("--tol", type=float, default=None,
                       help="tolerance override for the mode's main numeric check")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        cfg = _load_config(args.config)
        seed = args.seed if args.seed is not None else cfg.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise ConfigError(f"seed must be an integer, got {seed!r}")
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        results = _RUNNERS[args.command](cfg, out_dir, seed, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (EngineError, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 3

    report = {
        "command": args.command,
        "mode": _MODE_NAMES[args.command],
        "config": cfg,
        "seed": seed,
        "version": __version__,
        "results": results,
    }
    _write_json(out_dir / "report.json", report)
    _write_json(out_dir / "timings.json",
                {"total_seconds": time.perf_counter() - t0})
    print(f"wrote {out_dir / 'report.json'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
