"""Command-line interface: JSON problem files in, JSON reports or CSV scans out.

Exit codes: 0 success, 1 usage or input error, 2 hypothesis violation,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import ast
import csv
import dataclasses
import enum
import io
import json
import math
import operator
import re
import sys
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import numkit, polyoracle
from .errors import HypothesisViolation, InputError, NumericalFailure
from .numkit import INF, Infinity
from .reduction import (NormalForm, SupersymmetricForm, direct_normal_form, normal_form,
                        normal_form_from_supersymmetric, regauge)
from .semigroup import (DEFAULT_BISECT_TOL, GridSpec, Verdict, classify, delta0,
                        eigenvalue_lattice, region_scan, return_bound, return_rates,
                        small_time_order, transition_times)
from .symbol import QuadraticSymbol, spectrum_is_C_flag
from .weight import decompose, delta_ceiling, global_index, k1_coefficient

MODES = ("symbol", "supersymmetric", "normal-form")
PAYLOAD_KEY = {"symbol": "symbol", "supersymmetric": "supersymmetric", "normal-form": "normal_form"}
PAYLOAD_FIELDS = {
    "symbol": ("qxx", "qxxi", "qxixi"),
    "supersymmetric": ("aPlus", "aMinus", "b"),
    "normal-form": ("m", "weight_hessian"),
}
SYMMETRIC_FIELDS = {"qxx", "qxixi", "aPlus", "aMinus", "weight_hessian"}
GRID_FIELDS = ("re_min", "re_max", "re_count", "im_min", "im_max", "im_count")

EXIT_OK, EXIT_USAGE, EXIT_HYPOTHESIS, EXIT_NUMERICAL = 0, 1, 2, 3


class SpecError(InputError):
    """Invalid problem file; ``errors`` holds every (json path, message) found."""

    def __init__(self, errors: list[tuple[str, str]]):
        self.errors = errors
        super().__init__("; ".join(f"{p}: {m}" for p, m in errors))


@dataclass
class Options:
    psd_tol: float = numkit.DEFAULT_PSD_TOL
    cluster_tol: float = numkit.DEFAULT_CLUSTER_TOL
    bisect_tol: float = DEFAULT_BISECT_TOL
    gauge: np.ndarray | None = None
    grid: GridSpec | None = None
    degrees: int | None = None
    seed: int | None = None

    def __eq__(self, other):
        if not isinstance(other, Options):
            return NotImplemented
        same_gauge = (self.gauge is None and other.gauge is None) or (
            self.gauge is not None and other.gauge is not None
            and np.array_equal(self.gauge, other.gauge))
        return (same_gauge and self.grid == other.grid
                and (self.psd_tol, self.cluster_tol, self.bisect_tol, self.degrees, self.seed)
                == (other.psd_tol, other.cluster_tol, other.bisect_tol, other.degrees, other.seed))

    def tolerances(self) -> dict[str, float]:
        return {"psd_tol": self.psd_tol, "cluster_tol": self.cluster_tol,
                "bisect_tol": self.bisect_tol}


@dataclass
class ProblemSpec:
    n: int
    mode: str
    payload: dict[str, np.ndarray]
    options: Options = field(default_factory=Options)

    def __eq__(self, other):
        if not isinstance(other, ProblemSpec):
            return NotImplemented
        return (self.n == other.n and self.mode == other.mode and self.options == other.options
                and self.payload.keys() == other.payload.keys()
                and all(np.array_equal(self.payload[k], other.payload[k]) for k in self.payload))


# ---------------------------------------------------------------------------
# parsing


def _number(x, path: str, errors: list, real: bool) -> complex | None:
    if isinstance(x, bool):
        errors.append((path, "expected a number"))
        return None
    if isinstance(x, (int, float)):
        val = complex(x)
    elif (isinstance(x, list) and len(x) == 2
          and all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in x)):
        if real:
            errors.append((path, "expected a real number"))
            return None
        val = complex(x[0], x[1])
    else:
        errors.append((path, "expected a number or a [re, im] pair"))
        return None
    if not (math.isfinite(val.real) and math.isfinite(val.imag)):
        errors.append((path, "non-finite number"))
        return None
    return val


def _matrix(raw, path: str, shape: tuple[int, int], errors: list, real: bool = False):
    if not isinstance(raw, list) or not all(isinstance(r, list) for r in raw):
        errors.append((path, "expected a matrix (list of rows)"))
        return None
    if len(raw) != shape[0] or any(len(r) != shape[1] for r in raw):
        got = f"{len(raw)}x{len(raw[0]) if raw and isinstance(raw[0], list) else 0}"
        errors.append((path, f"expected shape {shape[0]}x{shape[1]}, got {got}"))
        return None
    before = len(errors)
    out = np.zeros(shape, dtype=float if real else complex)
    for i, row in enumerate(raw):
        for j, x in enumerate(row):
            v = _number(x, f"{path}[{i}][{j}]", errors, real)
            if v is not None:
                out[i, j] = v.real if real else v
    return out if len(errors) == before else None


def _positive_float(raw, path, errors):
    if isinstance(raw, bool) or not isinstance(raw, (int, float)) or not raw > 0:
        errors.append((path, "expected a positive number"))
        return None
    return float(raw)


def _int(raw, path, errors, minimum=0):
    if isinstance(raw, bool) or not isinstance(raw, int) or raw < minimum:
        errors.append((path, f"expected an integer >= {minimum}"))
        return None
    return raw


def _parse_options(raw, n: int | None, errors: list) -> Options:
    opts = Options()
    if raw is None:
        return opts
    if not isinstance(raw, dict):
        errors.append(("$.options", "expected an object"))
        return opts
    known = {"psd_tol", "cluster_tol", "bisect_tol", "gauge", "grid", "degrees", "seed"}
    for key in sorted(set(raw) - known):
        errors.append((f"$.options.{key}", "unknown option"))
    for key in ("psd_tol", "cluster_tol", "bisect_tol"):
        if key in raw:
            val = _positive_float(raw[key], f"$.options.{key}", errors)
            if val is not None:
                setattr(opts, key, val)
    if "gauge" in raw and n is not None:
        opts.gauge = _matrix(raw["gauge"], "$.options.gauge", (n, n), errors)
    if "grid" in raw:
        g = raw["grid"]
        if not isinstance(g, dict):
            errors.append(("$.options.grid", "expected an object"))
        else:
            vals = {}
            for key in GRID_FIELDS:
                p = f"$.options.grid.{key}"
                if key not in g:
                    errors.append((p, "missing"))
                elif key.endswith("count"):
                    vals[key] = _int(g[key], p, errors, 1)
                else:
                    x = g[key]
                    if isinstance(x, bool) or not isinstance(x, (int, float)):
                        errors.append((p, "expected a number"))
                    else:
                        vals[key] = float(x)
            if len(vals) == len(GRID_FIELDS) and None not in vals.values():
                opts.grid = GridSpec(**vals)
    if "degrees" in raw:
        opts.degrees = _int(raw["degrees"], "$.options.degrees", errors, 0)
    if "seed" in raw:
        opts.seed = _int(raw["seed"], "$.options.seed", errors, 0)
    return opts


def parse(text: str) -> ProblemSpec:
    """Validate a problem file, collecting every error before raising ``SpecError``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError([("$", f"invalid JSON: {exc}")])
    if not isinstance(doc, dict):
        raise SpecError([("$", "expected a JSON object")])
    errors: list[tuple[str, str]] = []
    n = doc.get("n")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        errors.append(("$.n", "expected a positive integer"))
        n = None
    mode = doc.get("mode")
    if mode not in MODES:
        errors.append(("$.mode", f"expected one of {', '.join(MODES)}"))
        mode = None
    present = [m for m in MODES if PAYLOAD_KEY[m] in doc]
    if mode is not None:
        for other in present:
            if other != mode:
                errors.append((f"$.{PAYLOAD_KEY[other]}", f"payload for mode {other!r} given with mode {mode!r}"))
    payload: dict[str, np.ndarray] = {}
    if mode is not None and n is not None:
        key = PAYLOAD_KEY[mode]
        block = doc.get(key)
        if not isinstance(block, dict):
            errors.append((f"$.{key}", "missing or not an object"))
        else:
            for name in PAYLOAD_FIELDS[mode]:
                path = f"$.{key}.{name}"
                if name not in block:
                    errors.append((path, "missing"))
                    continue
                real = name == "weight_hessian"
                shape = (2 * n, 2 * n) if real else (n, n)
                mat = _matrix(block[name], path, shape, errors, real)
                if mat is None:
                    continue
                if name in SYMMETRIC_FIELDS and np.abs(mat - mat.T).max() > 1e-12 * max(1.0, np.abs(mat).max()):
                    errors.append((path, "matrix is not symmetric"))
                    continue
                payload[name] = mat
            for extra in sorted(set(block) - set(PAYLOAD_FIELDS[mode])):
                errors.append((f"$.{key}.{extra}", "unknown field"))
    options = _parse_options(doc.get("options"), n, errors)
    for extra in sorted(set(doc) - {"n", "mode", "options"} - set(PAYLOAD_KEY.values())):
        errors.append((f"$.{extra}", "unknown field"))
    if errors:
        raise SpecError(errors)
    return ProblemSpec(n, mode, payload, options)


def _encode_matrix(a: np.ndarray, real: bool) -> list:
    if real:
        return [[float(x) for x in row] for row in a]
    return [[[float(x.real), float(x.imag)] for x in row] for row in a]


def serialize(spec: ProblemSpec) -> str:
    key = PAYLOAD_KEY[spec.mode]
    doc: dict[str, Any] = {
        "n": spec.n,
        "mode": spec.mode,
        key: {name: _encode_matrix(spec.payload[name], name == "weight_hessian")
              for name in PAYLOAD_FIELDS[spec.mode]},
    }
    o = spec.options
    opts: dict[str, Any] = o.tolerances()
    if o.gauge is not None:
        opts["gauge"] = _encode_matrix(o.gauge, False)
    if o.grid is not None:
        opts["grid"] = dataclasses.asdict(o.grid)
    if o.degrees is not None:
        opts["degrees"] = o.degrees
    if o.seed is not None:
        opts["seed"] = o.seed
    doc["options"] = opts
    return json.dumps(doc, indent=2)


# ---------------------------------------------------------------------------
# building objects from a spec


def build_symbol(spec: ProblemSpec) -> QuadraticSymbol | None:
    p = spec.payload
    if spec.mode == "symbol":
        return QuadraticSymbol(p["qxx"], p["qxxi"], p["qxixi"])
    if spec.mode == "supersymmetric":
        return _supersymmetric(spec).to_symbol()
    return None


def _supersymmetric(spec: ProblemSpec) -> SupersymmetricForm:
    p = spec.payload
    return SupersymmetricForm(p["aPlus"], p["aMinus"], p["b"])


def build_normal_form(spec: ProblemSpec) -> NormalForm:
    o = spec.options
    if spec.mode == "symbol":
        return normal_form(build_symbol(spec), o.gauge, o.cluster_tol)
    if spec.mode == "supersymmetric":
        return normal_form_from_supersymmetric(_supersymmetric(spec), o.gauge)
    nf = direct_normal_form(spec.payload["m"], spec.payload["weight_hessian"])
    return nf if o.gauge is None else regauge(nf, o.gauge)


# ---------------------------------------------------------------------------
# JSON output


def to_jsonable(obj):
    if isinstance(obj, Infinity):
        return obj.value
    if isinstance(obj, enum.Enum):
        return obj.value
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return to_jsonable(np.stack([obj.real, obj.imag], axis=-1).tolist())
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_jsonable(float(obj.real)), to_jsonable(float(obj.imag))]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    return obj


def _fmt(x) -> str:
    if isinstance(x, Infinity):
        return x.value
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


# ---------------------------------------------------------------------------
# argument helpers

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}
_NAMES = {"pi": math.pi, "e": math.e}


def _eval_node(node):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
        return node.value
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_node(node.left), _eval_node(node.right))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        return _UNARY[type(node.op)](_eval_node(node.operand))
    raise ValueError("unsupported expression")


def number_arg(text: str) -> complex:
    """Arithmetic in numbers, pi, e and the imaginary unit i (e.g. '-3.2', 'pi/2', '-1+2i')."""
    src = re.sub(r"(\d|\.)[ij]\b", r"\1j", text.strip())
    src = re.sub(r"\b[ij]\b", "1j", src)
    try:
        return complex(_eval_node(ast.parse(src, mode="eval")))
    except (SyntaxError, ValueError, TypeError, ZeroDivisionError, OverflowError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def real_arg(text: str) -> float:
    val = number_arg(text)
    if val.imag != 0:
        raise argparse.ArgumentTypeError(f"expected a real number: {text!r}")
    return val.real


def grid_arg(text: str) -> GridSpec:
    parts = text.split(",")
    if len(parts) != 6:
        raise argparse.ArgumentTypeError("grid is re_min,re_max,re_count,im_min,im_max,im_count")
    try:
        return GridSpec(real_arg(parts[0]), real_arg(parts[1]), int(parts[2]),
                        real_arg(parts[3]), real_arg(parts[4]), int(parts[5]))
    except (ValueError, InputError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(json.dumps({"error": "usage", "message": message}) + "\n")
        sys.exit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fockflow", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", nargs="?", default="-", help="problem JSON file ('-' for stdin)")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--psd-tol", type=float, help="relative tolerance of PSD tests")
    common.add_argument("--cluster-tol", type=float, help="eigenvalue clustering tolerance")
    common.add_argument("--bisect-tol", type=float, help="absolute tolerance of bisections")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text)

    add("analyze", "reduction, spectrum, small-time and return-rate summary")
    add("reduce", "normal form (M, Phi) with diagnostics")
    for name, text in (("classify", "bounded/compact/unbounded verdict at tau"),
                       ("delta0", "regularization exponent at tau")):
        p = add(name, text)
        p.add_argument("--tau", type=number_arg, required=True)
    p = add("scan", "verdict grid over complex tau (CSV)")
    p.add_argument("--grid", type=grid_arg, help="re_min,re_max,re_count,im_min,im_max,im_count")
    p.add_argument("--workers", type=int, default=4)
    p.add_argument("--no-delta0", action="store_true", help="leave the delta0 column empty")
    p = add("spectrum", "eigenvalues of M, the eigenvalue lattice, and the whole-plane check")
    p.add_argument("--degrees", type=int)
    p.add_argument("--seed", type=int)
    p = add("return-rate", "rates of return to equilibrium")
    p.add_argument("--t", type=real_arg, help="also evaluate the rate bounds at this time")
    p.add_argument("--n-trunc", type=int, default=0)
    add("subell", "global index and small-time regularization order")
    p = add("oracle-check", "compare the classifier with truncated polynomial norms")
    p.add_argument("--tau", type=number_arg, required=True)
    p.add_argument("--degrees", type=int)
    p.add_argument("--seed", type=int)
    p = add("transitions", "verdict changes along a ray tau = t e^{i angle}")
    p.add_argument("--ray-angle", type=real_arg, default=math.pi)
    p.add_argument("--t-max", type=real_arg, required=True)
    p.add_argument("--step", type=real_arg, default=2e-3)
    return parser


# ---------------------------------------------------------------------------
# commands


def _cmd_reduce(spec, nf, args):
    dec = decompose(nf.weight)
    out = {"m": nf.m, "weight_hessian": nf.weight.hess, "g": dec.g, "hpp": dec.hpp,
           "big_h": dec.big_h, "delta_ceiling": delta_ceiling(nf.weight),
           "eigenvalues_m": np.linalg.eigvals(nf.m), "diagnostics": nf.diagnostics}
    if nf.gauge is not None:
        out["gauge"] = nf.gauge
    return out


def _classification(nf, tau, o):
    rep = classify(nf, tau, o.psd_tol, bisect_tol=o.bisect_tol)
    return {"tau": rep.tau, "verdict": rep.verdict, "delta0": rep.delta0,
            "norm_bound": rep.norm_bound, "margin": rep.margin, "witness": rep.witness}


def _cmd_classify(spec, nf, args):
    return _classification(nf, args.tau, spec.options)


def _cmd_delta0(spec, nf, args):
    o = spec.options
    return {"tau": args.tau, "delta0": delta0(nf, args.tau, o.psd_tol, o.bisect_tol),
            "delta_ceiling": delta_ceiling(nf.weight)}


def _cmd_subell(spec, nf, args):
    i0, dims = global_index(nf)
    out: dict[str, Any] = {"global_index": i0, "kernel_dims": dims}
    if i0 is not INF:
        out["k1"] = k1_coefficient(nf)
    out["small_time"] = small_time_order(nf)
    return out


def _spectrum(spec, nf, degrees, seed):
    o = spec.options
    probe = numkit.jordan_probe(nf.m, o.cluster_tol)
    out: dict[str, Any] = {"clusters": probe.eigenvalues, "warnings": list(probe.warnings)}
    lattice = eigenvalue_lattice(nf, degrees, o.cluster_tol)
    out["lattice"] = [{"alpha": p.alpha, "value": p.value, "order": p.order} for p in lattice]
    q = build_symbol(spec)
    if q is not None:
        flag = spectrum_is_C_flag(q, seed=seed)
        out["whole_plane"] = {"raised": flag.raised, "witness": flag.witness,
                              "q_value": flag.q_value, "bracket": flag.bracket, "note": flag.note}
    return out


def _cmd_spectrum(spec, nf, args):
    degrees = args.degrees if args.degrees is not None else (spec.options.degrees or 4)
    seed = args.seed if args.seed is not None else (spec.options.seed or 0)
    return _spectrum(spec, nf, degrees, seed)


def _cmd_return_rate(spec, nf, args):
    out: dict[str, Any] = {"rates": return_rates(nf, spec.options.cluster_tol)}
    if args.t is not None:
        out["bound"] = return_bound(nf, args.t, args.n_trunc)
        out["t"] = args.t
        out["n_trunc"] = args.n_trunc
    return out


def _cmd_oracle_check(spec, nf, args):
    o = spec.options
    degrees = args.degrees if args.degrees is not None else (o.degrees or 8)
    seed = args.seed if args.seed is not None else (o.seed or 0)
    rep = classify(nf, args.tau, o.psd_tol, with_delta0=False)
    table = polyoracle.gram(nf.weight, degrees)
    norms = [polyoracle.truncated_norm(nf, args.tau, d, table) for d in range(degrees + 1)]
    consistent = (max(norms) <= rep.norm_bound + 1e-6) if rep.verdict.bounded else True
    return {"tau": args.tau, "verdict": rep.verdict, "norm_bound": rep.norm_bound,
            "truncated_norms": norms, "consistent": consistent,
            "change_of_vars_error": polyoracle.change_of_vars_identity_check(
                nf, args.tau, min(degrees, 6), seed=seed)}


def _cmd_transitions(spec, nf, args):
    times = transition_times(nf, args.ray_angle, args.t_max, args.step, spec.options.psd_tol,
                             tol=min(spec.options.bisect_tol * 1e4, 1e-6))
    return {"ray_angle": args.ray_angle, "t_max": args.t_max, "times": times}


def _cmd_analyze(spec, nf, args):
    out: dict[str, Any] = {"reduction": _cmd_reduce(spec, nf, args)}
    out["spectrum"] = _spectrum(spec, nf, spec.options.degrees or 2, spec.options.seed or 0)
    try:
        out["subell"] = _cmd_subell(spec, nf, args)
    except HypothesisViolation as exc:
        out["subell"] = {"error": str(exc)}
    out["return_rates"] = return_rates(nf, spec.options.cluster_tol)
    return out


def scan_csv(spec: ProblemSpec, nf: NormalForm, grid: GridSpec, workers: int = 4,
             with_delta0: bool = True) -> str:
    o = spec.options
    result = region_scan(nf, grid, o.psd_tol, o.bisect_tol, with_delta0, workers)
    buf = io.StringIO()
    for key, val in o.tolerances().items():
        buf.write(f"# {key}={_fmt(val)}\n")
    buf.write("# grid=" + ",".join(_fmt(getattr(grid, k)) if not k.endswith("count")
                                   else str(getattr(grid, k)) for k in GRID_FIELDS) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["re_tau", "im_tau", "verdict", "delta0", "norm_bound"])
    for tau, verdict, d0, bound in result.cells():
        writer.writerow([_fmt(tau.real), _fmt(tau.imag), verdict.value,
                         _fmt(d0) if with_delta0 else "", _fmt(bound)])
    return buf.getvalue()


COMMANDS = {
    "analyze": _cmd_analyze, "reduce": _cmd_reduce, "classify": _cmd_classify,
    "delta0": _cmd_delta0, "spectrum": _cmd_spectrum, "return-rate": _cmd_return_rate,
    "subell": _cmd_subell, "oracle-check": _cmd_oracle_check, "transitions": _cmd_transitions,
}


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fail(code: int, kind: str, message: str, details=None) -> int:
    payload = {"error": kind, "message": message}
    if details:
        payload["details"] = details
    sys.stderr.write(json.dumps(payload) + "\n")
    return code


def run(args: argparse.Namespace) -> int:
    try:
        if args.input == "-":
            text = sys.stdin.read()
        else:
            with open(args.input, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        return _fail(EXIT_USAGE, "usage", f"cannot read input: {exc}")
    try:
        spec = parse(text)
    except SpecError as exc:
        return _fail(EXIT_USAGE, "invalid_input", "problem file failed validation",
                     [{"path": p, "message": m} for p, m in exc.errors])
    o = spec.options
    for key in ("psd_tol", "cluster_tol", "bisect_tol"):
        val = getattr(args, key)
        if val is not None:
            if not val > 0:
                return _fail(EXIT_USAGE, "usage", f"--{key.replace('_', '-')} must be positive")
            setattr(o, key, val)
    try:
        nf = build_normal_form(spec)
        if args.command == "scan":
            grid = args.grid or o.grid
            if grid is None:
                return _fail(EXIT_USAGE, "usage", "scan needs --grid or options.grid")
            _emit(scan_csv(spec, nf, grid, args.workers, not args.no_delta0), args.out)
            return EXIT_OK
        body = COMMANDS[args.command](spec, nf, args)
    except HypothesisViolation as exc:
        return _fail(EXIT_HYPOTHESIS, "hypothesis_violation", str(exc))
    except NumericalFailure as exc:
        return _fail(EXIT_NUMERICAL, "numerical_failure", str(exc))
    except InputError as exc:
        return _fail(EXIT_USAGE, "invalid_input", str(exc))
    report = {"command": args.command, "n": spec.n, "mode": spec.mode,
              "tolerances": o.tolerances(), "result": body}
    _emit(json.dumps(to_jsonable(report), indent=2) + "\n", args.out)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
