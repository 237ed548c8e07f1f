"""Command-line interface.

Every command reads JSON inputs (or built-in names), writes JSON or CSV to
``--out`` (stdout if omitted) and exits with 0 on success, 2 on usage
errors and 3 on validation or numerical errors. Errors are reported on
stderr as ``{"error": kind, "message": ...}``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import operators as ops
from .errors import ShadowError
from .norms import average_squared_norm, projection_norms, sphere_grid, squared_shadow_norm
from .optimize import AnnealConfig, anneal_factorized, anneal_single_qubit
from .povm import (
    SOLIDS,
    Povm,
    inverted,
    is_informationally_complete,
    named_povm,
    platonic,
    povm_from_json,
    povm_to_json,
    vertex_projections,
)
from .sampling import EstimatorConfig, simulate
from .shadows import classical_shadows, shadows_by_method

EXIT_OK, EXIT_USAGE, EXIT_ERROR = 0, 2, 3

# Table of (a, b) for the closed form a E_k + b 1 on the unit-vertex solids.
SOLID_COEFFICIENTS = {
    "tetrahedron": (6, -1),
    "octahedron": (9, -1),
    "cube": (12, -1),
    "cuboctahedron": (18, -1),
    "icosahedron": (18, -1),
    "dodecahedron": (30, -1),
    "icosidodecahedron": (45, -1),
}


class UsageError(Exception):
    kind = "UsageError"


class IoError(Exception):
    kind = "IoError"


class BenchmarkMismatch(Exception):
    kind = "BenchmarkMismatch"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---- input ----------------------------------------------------------------


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise IoError(f"{path} is not valid JSON: {exc}") from exc


def _is_path(arg: str) -> bool:
    return os.path.exists(arg) or arg.endswith(".json") or os.sep in arg


def load_povm(spec: str) -> Povm:
    """A built-in name or a POVM JSON file."""
    if _is_path(spec):
        return povm_from_json(_read_json(spec))
    return named_povm(spec)


def builtin_observables(name: str, seed: int | None = None) -> np.ndarray:
    """``pauli-eigenprojections``, ``paulis``, ``<solid>-projections`` or ``haar-<m>``."""
    if name == "pauli-eigenprojections":
        return vertex_projections("octahedron")
    if name == "paulis":
        return np.array([ops.SIGMA_X, ops.SIGMA_Y, ops.SIGMA_Z])
    if name.endswith("-projections") and name[: -len("-projections")] in SOLIDS + ("sic",):
        return vertex_projections(name[: -len("-projections")])
    if name.startswith("haar-"):
        try:
            m = int(name[len("haar-"):])
        except ValueError:
            raise UsageError(f"bad Haar target count in {name!r}") from None
        if seed is None:
            raise UsageError("Haar-random targets need --seed")
        return ops.haar_random_projections(ops.make_rng(seed), 2, m)
    raise UsageError(f"unknown built-in observable set {name!r}")


def _parse_observable_list(obj) -> list:
    """Observables as a list of operators or of ``{"factors": [...]}`` products."""
    if isinstance(obj, dict):
        obj = obj.get("observables", [obj])
    if not isinstance(obj, list) or not obj:
        raise IoError("observable file must hold a nonempty list")
    out = []
    for item in obj:
        if "factors" in item:
            out.append([ops.operator_from_json(f) for f in item["factors"]])
        else:
            out.append(ops.operator_from_json(item))
    return out


def load_observables(spec: str, seed: int | None = None) -> list:
    if _is_path(spec):
        return _parse_observable_list(_read_json(spec))
    return list(builtin_observables(spec, seed))


def _as_factors(obj) -> list[np.ndarray]:
    """A single operator, or a product given as ``{"factors": [...]}``."""
    if isinstance(obj, dict) and "factors" in obj:
        return [ops.operator_from_json(f) for f in obj["factors"]]
    return [ops.operator_from_json(obj)]


# ---- output ---------------------------------------------------------------


def write_atomic(path: str | None, text: str):
    """Write ``text`` to ``path`` via a temporary file and rename, or to stdout."""
    if path is None:
        sys.stdout.write(text)
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        os.unlink(tmp)
        raise


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(x) -> str:
    return repr(float(x))


def _resolve_seed(seed: int | None) -> int:
    return int(np.random.SeedSequence().entropy % 2**63) if seed is None else seed


# ---- commands -------------------------------------------------------------


def cmd_povm(args):
    if args.action != "validate":
        raise UsageError(f"unknown povm action {args.action!r}")
    povm = load_povm(args.target)
    report = {
        "valid": True,
        "dim": povm.dim,
        "n_outcomes": povm.n_outcomes,
        "informationally_complete": is_informationally_complete(povm),
        "uniform_trace": povm.is_uniform_trace,
    }
    write_atomic(args.out, _json_text(report))


def cmd_shadows(args):
    povm = load_povm(_required(args.povm, "--povm"))
    s = shadows_by_method(povm, args.method)
    out = {"method": args.method, "shadows": [ops.operator_to_json(x) for x in s.shadows]}
    if povm.labels is not None:
        out["labels"] = list(povm.labels)
    if s.coefficients is not None:
        out["a"], out["b"] = s.coefficients.a, s.coefficients.b
    write_atomic(args.out, _json_text(out))


def cmd_shadow_norm(args):
    povm = load_povm(_required(args.povm, "--povm"))
    header = ["observable_id", "squared_norm", "worst_state_bloch_x", "worst_state_bloch_y", "worst_state_bloch_z"]
    if args.average:
        header.append("average_squared_norm")
    rows = []
    if args.observables is not None:
        for i, x in enumerate(load_observables(args.observables, args.seed)):
            if isinstance(x, list):
                raise UsageError("shadow-norm takes single-site observables")
            rep = squared_shadow_norm(povm, x)
            b = rep.worst_state_bloch
            row = [i, _fmt(rep.squared_norm)] + ([_fmt(c) for c in b] if b is not None else ["", "", ""])
            if args.average:
                row.append(_fmt(average_squared_norm(povm, x)))
            rows.append(row)
    if args.grid is not None:
        dirs = sphere_grid(args.grid)
        norms = projection_norms(povm, dirs)
        k = int(np.argmax(norms))
        row = [f"grid_max_{args.grid}", _fmt(norms[k])] + [_fmt(c) for c in dirs[k]]
        rows.append(row + [""] * args.average)
    if not rows:
        raise UsageError("shadow-norm needs --observables or --grid")
    write_atomic(args.out, _csv_text(header, rows))


def cmd_simulate(args):
    povm = load_povm(_required(args.povm, "--povm"))
    states = _as_factors(_read_json(_required(args.state, "--state")))
    factors = _as_factors(_read_json(_required(args.observable, "--observable")))
    if len(states) != len(factors):
        raise UsageError("state and observable must have the same number of sites")
    if args.shots is None:
        raise UsageError("--shots is required")
    seed = _resolve_seed(args.seed)
    cfg = EstimatorConfig(args.shots, args.median_of_means, seed)
    result = simulate([povm] * len(states), states, factors, cfg)
    write_atomic(args.out, _json_text(result))


def cmd_optimize(args):
    seed = _resolve_seed(args.seed)
    targets = load_observables(_required(args.observables, "--observables"), seed)
    cfg = AnnealConfig(
        outcomes=args.outcomes,
        iterations=args.iterations,
        restarts=args.restarts,
        seed=seed,
    )
    if args.factorized:
        n = args.qubits
        if n is None:
            raise UsageError("--factorized needs --qubits")
        site_factors = [x if isinstance(x, list) else [x] * n for x in targets]
        result = anneal_factorized(n, site_factors, cfg)
    else:
        if any(isinstance(x, list) for x in targets):
            raise UsageError("product observables need --factorized")
        result = anneal_single_qubit(targets, cfg)
    trace_csv = _csv_text(["iteration", "objective"], [[i, _fmt(f)] for i, f in result.objective_trace])
    out = {
        "best_objective": result.best_objective,
        "restarts_summary": result.restarts_summary,
        "seed": seed,
        "config": {
            "outcomes": cfg.outcomes,
            "iterations": cfg.iterations,
            "restarts": cfg.restarts,
            "cooling_ratio": cfg.cooling_ratio,
            "move_scale": cfg.move_scale,
        },
        "best_povm": povm_to_json(result.best_povm, bloch=True),
        "objective_trace_csv": trace_csv,
    }
    if args.out is not None:
        base = Path(args.out)
        write_atomic(str(base.with_name(base.stem + "_trace.csv")), trace_csv)
    write_atomic(args.out, _json_text(out))


def bench_rows() -> list[tuple[str, float, float, float]]:
    """(quantity, expected, computed, tolerance) for the reference values."""
    rows = []
    tet, octa = platonic("tetrahedron"), platonic("octahedron")
    cases = [
        ("norm tetrahedron / tetrahedron projections", tet, "tetrahedron", 2.0),
        ("norm octahedron / Pauli eigenprojections", octa, "octahedron", 1.5),
        ("norm inverted tetrahedron / tetrahedron projections", inverted(tet), "tetrahedron", 1.0),
    ]
    for label, povm, targets, expected in cases:
        value = max(squared_shadow_norm(povm, P).squared_norm for P in vertex_projections(targets))
        rows.append((label, expected, value, 1e-9))
    for name, (a, b) in SOLID_COEFFICIENTS.items():
        povm = platonic(name)
        s = shadows_by_method(povm, "symmetric")
        ref = classical_shadows(povm).shadows
        agree = float(np.max(np.abs(s.shadows - ref)))
        rows.append((f"a {name}", a, s.coefficients.a, 1e-9))
        rows.append((f"b {name}", b, s.coefficients.b, 1e-9))
        rows.append((f"closed form vs frame inversion {name}", 0.0, agree, 1e-9))
    return rows


def cmd_bench(args):
    if args.suite != "paper":
        raise UsageError(f"unknown benchmark {args.suite!r}")
    rows = bench_rows()
    table = [[q, _fmt(e), _fmt(c), "pass" if abs(c - e) <= tol else "FAIL"] for q, e, c, tol in rows]
    write_atomic(args.out, _csv_text(["quantity", "expected", "computed", "status"], table))
    failed = [r[0] for r in table if r[3] != "pass"]
    if failed:
        raise BenchmarkMismatch(f"{len(failed)} reference values out of tolerance: {', '.join(failed)}")


def _required(value, flag):
    if value is None:
        raise UsageError(f"{flag} is required")
    return value


# ---- entry point ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--povm")
    common.add_argument("--observables")
    common.add_argument("--seed", type=int)
    common.add_argument("--out")

    p = _Parser(prog="povm-shadows", description="Classical shadows with generalized measurements.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("povm", parents=[common], help="validate a POVM file or built-in name")
    q.add_argument("action", choices=["validate"])
    q.add_argument("target")
    q.set_defaults(func=cmd_povm)

    q = sub.add_parser("shadows", parents=[common], help="classical shadows of a POVM")
    q.add_argument("--method", choices=["general", "symmetric", "bloch"], default="general")
    q.set_defaults(func=cmd_shadows)

    q = sub.add_parser("shadow-norm", parents=[common], help="squared shadow norms as CSV")
    q.add_argument("--grid", type=int)
    q.add_argument("--average", action="store_true")
    q.set_defaults(func=cmd_shadow_norm)

    q = sub.add_parser("simulate", parents=[common], help="Monte-Carlo estimate of an observable")
    q.add_argument("--state")
    q.add_argument("--observable")
    q.add_argument("--shots", type=int)
    q.add_argument("--median-of-means", type=int, default=1)
    q.set_defaults(func=cmd_simulate)

    q = sub.add_parser("optimize", parents=[common], help="anneal a qubit POVM for target observables")
    q.add_argument("--outcomes", type=int, default=6)
    q.add_argument("--qubits", type=int)
    q.add_argument("--factorized", action="store_true")
    q.add_argument("--iterations", type=int, default=20000)
    q.add_argument("--restarts", type=int, default=8)
    q.set_defaults(func=cmd_optimize)

    q = sub.add_parser("bench", parents=[common], help="check reference values")
    q.add_argument("suite", choices=["paper"])
    q.set_defaults(func=cmd_bench)
    return p


def _report(exc: Exception, code: int) -> int:
    kind = getattr(exc, "kind", type(exc).__name__)
    sys.stderr.write(json.dumps({"error": kind, "message": str(exc)}) + "\n")
    return code


def run(argv: list[str] | None = None) -> int:
    """Run one command; returns the process exit code."""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _report(exc, EXIT_USAGE)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        args.func(args)
    except UsageError as exc:
        return _report(exc, EXIT_USAGE)
    except (ShadowError, IoError, BenchmarkMismatch) as exc:
        return _report(exc, EXIT_ERROR)
    except (KeyError, TypeError, ValueError) as exc:
        # malformed JSON documents
        return _report(IoError(f"malformed input: {exc!r}"), EXIT_ERROR)
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
