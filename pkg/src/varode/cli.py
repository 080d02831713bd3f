"""Command line entry point ``varode``.

Subcommands::

    varode table   --id {1,2,3}   --out PATH
    varode figure  --id {1,2,3,4} --out PATH
    varode solve   --config PATH  --out PATH
    varode check   --matrix PATH
    varode quantum --config PATH  --out PATH

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import eigenproblem, exact, quantum, spectral
from .expr import ExprSyntaxError, UnknownIdentifierError, parameters, parse
from .linalg import DefectiveMatrixError, NonHermitianError
from .matform import ScalarODE, to_companion
from .oracle import DEFAULT_REL_TOL, solve_at
from .polymat import PolyMatrix, taylor_solve
from .quadrature import DEFAULT_PANELS_PER_UNIT

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

DEFAULT_GRID_NUM = 61
DEFAULT_TROTTER_N = 4096
DEFAULT_CONVERGENCE_N = [256, 512, 1024, 2048, 4096]
FIGURE_REL_TOL = 1e-12


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# config schema

_COMPLEX = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}
_GRID = {
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "start": {"type": "number"},
                "stop": {"type": "number"},
                "num": {"type": "integer", "minimum": 1},
            },
            "required": ["start", "stop"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"times": {"type": "array", "items": {"type": "number"}, "minItems": 1}},
            "required": ["times"],
            "additionalProperties": False,
        },
    ]
}
_PARAMS = {"type": "object", "additionalProperties": _COMPLEX}
_COMMON = {
    "rel_tol": {"type": "number", "exclusiveMinimum": 0},
    "quad_tol": {"type": "number", "exclusiveMinimum": 0},
    "panels_per_unit": {"type": "integer", "minimum": 4},
    "oracle": {"type": "boolean"},
}

SCHEMAS = {
    "scalar-ode": {
        "type": "object",
        "properties": {
            "kind": {"const": "scalar-ode"},
            "f": {"type": "string"},
            "coefficients": {"type": "array", "items": {"type": ["string", "number"]}, "minItems": 1, "maxItems": 8},
            "initial": {"type": "array", "items": _COMPLEX, "minItems": 1, "maxItems": 8},
            "params": _PARAMS,
            "grid": _GRID,
            "anchor": {"type": "number"},
            "methods": {
                "type": "array",
                "items": {"enum": ["first-order", "corrected", "wkb", "wkb-form"]},
                "uniqueItems": True,
            },
            **_COMMON,
        },
        "required": ["kind", "initial", "grid"],
        "oneOf": [{"required": ["f"]}, {"required": ["coefficients"]}],
        "additionalProperties": False,
    },
    "system": {
        "type": "object",
        "properties": {
            "kind": {"const": "system"},
            "matrix": {
                "type": "object",
                "properties": {
                    "n": {"type": "integer", "minimum": 1, "maximum": 8},
                    "orientation": {"enum": ["row", "column"]},
                    "entries": {"type": "array"},
                },
                "required": ["n", "entries"],
            },
            "initial": {"type": "array", "items": _COMPLEX, "minItems": 1, "maxItems": 8},
            "grid": _GRID,
            "methods": {
                "type": "array",
                "items": {"enum": ["exact-class", "taylor", "first-order"]},
                "uniqueItems": True,
            },
            **_COMMON,
        },
        "required": ["kind", "matrix", "initial", "grid"],
        "additionalProperties": False,
    },
    "eigen": {
        "type": "object",
        "properties": {
            "kind": {"const": "eigen"},
            "family": {"enum": list(eigenproblem.FAMILIES)},
            "range": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
            "step": {"type": "number", "exclusiveMinimum": 0},
            "tol": {"type": "number", "exclusiveMinimum": 0},
            "methods": {"type": "array", "items": {"enum": ["exact", "approx", "wkb"]}, "uniqueItems": True},
            "rel_tol": {"type": "number", "exclusiveMinimum": 0},
        },
        "required": ["kind", "family", "range"],
        "additionalProperties": False,
    },
    "quantum": {
        "type": "object",
        "properties": {
            "kind": {"const": "quantum"},
            "hamiltonian": {
                "oneOf": [
                    {
                        "type": "object",
                        "properties": {"name": {"enum": sorted(quantum.CATALOG)}, "params": {"type": "object"}},
                        "required": ["name"],
                        "additionalProperties": False,
                    },
                    {
                        "type": "object",
                        "properties": {
                            "entries": {"type": "array", "items": {"type": "array", "items": {"type": ["string", "number"]}}},
                            "params": _PARAMS,
                        },
                        "required": ["entries"],
                        "additionalProperties": False,
                    },
                ]
            },
            "psi0": {"type": "array", "items": _COMPLEX, "minItems": 1, "maxItems": 8},
            "grid": _GRID,
            "methods": {
                "type": "array",
                "items": {"enum": ["trotter", "adiabatic", "first-order", "corrected"]},
                "uniqueItems": True,
            },
            "trotter_N": {"type": "integer", "minimum": 1},
            "convergence_N": {"type": "array", "items": {"type": "integer", "minimum": 1}},
            "gauge": {"enum": list(quantum.GAUGES)},
            **_COMMON,
        },
        "required": ["kind", "hamiltonian", "psi0", "grid"],
        "additionalProperties": False,
    },
}


def _complex(v) -> complex:
    return complex(v[0], v[1]) if isinstance(v, list) else complex(v)


def _grid(g) -> np.ndarray:
    if "times" in g:
        t = np.array(sorted(set(g["times"])), dtype=float)
    else:
        num = g.get("num", DEFAULT_GRID_NUM)
        t = np.linspace(g["start"], g["stop"], num)
    return t


def load_config(path, kind: str | None = None) -> dict:
    """Read and validate a JSON config; raises :class:`ConfigError` with the field path."""
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    if kind is not None:
        data.setdefault("kind", kind)
    k = data.get("kind")
    if k not in SCHEMAS:
        raise ConfigError(f"kind: must be one of {sorted(SCHEMAS)}")
    if kind is not None and k != kind:
        raise ConfigError(f"kind: expected {kind!r}, got {k!r}")
    err = jsonschema.exceptions.best_match(jsonschema.Draft202012Validator(SCHEMAS[k]).iter_errors(data))
    if err is not None:
        where = "/".join(str(p) for p in err.absolute_path) or "(root)"
        raise ConfigError(f"{where}: {err.message}")
    return data


# ---------------------------------------------------------------------------
# CSV


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    x = float(v)
    if not math.isfinite(x):
        return ""
    return format(x, ".17g")


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])


def _complex_columns(name, values):
    """Header names and per-row cells for a (m, n) complex array."""
    values = np.asarray(values)
    names, cols = [], []
    for i in range(values.shape[1]):
        names += [f"{name}_re{i}", f"{name}_im{i}"]
        cols += [values[:, i].real, values[:, i].imag]
    return names, cols


# ---------------------------------------------------------------------------
# tables and figures


def run_table(table_id: int):
    rows = eigenproblem.build_table(table_id)
    header = ["n", "lambda_exact", "lambda_approx", "rel_error_percent"]
    if table_id == 1:
        header += ["lambda_wkb", "wkb_error_percent"]
    out = []
    for r in rows:
        row = [r.n, r.lambda_exact, r.lambda_approx, 100.0 * r.rel_error]
        if table_id == 1:
            row += [r.lambda_wkb, 100.0 * r.wkb_rel_error]
        out.append(row)
    return header, out


FIGURES = {
    1: ("-sqrt(t+1)", (0.0, 6.0, 601)),
    2: ("-sqrt(t+1)", (0.0, 6.0, 601)),
    3: ("cos(t)^2", (-4.0, 4.0, 801)),
    4: ("cos(t)^2", (-4.0, 4.0, 801)),
}


def figure_grid(fig_id: int) -> np.ndarray:
    _, (lo, hi, num) = FIGURES[fig_id]
    t = np.linspace(lo, hi, num)
    if fig_id in (3, 4):
        # place the turning points exactly on the grid
        t = np.union1d(t, [-np.pi / 2, np.pi / 2])
    return t


def run_figure(fig_id: int, rel_tol: float = FIGURE_REL_TOL, quad_tol=spectral.DEFAULT_QUAD_TOL):
    if fig_id not in FIGURES:
        raise ConfigError(f"figure id must be one of {sorted(FIGURES)}")
    f, _ = FIGURES[fig_id]
    t = figure_grid(fig_id)
    system = to_companion(ScalarODE.second_order(f, 1.0, 0.0))
    oracle = solve_at(system, [1.0, 0.0], t, rel_tol=rel_tol)[:, 0].real
    if fig_id in (1, 2):
        first, corr = spectral.corrected_first_order(f, 1.0, 0.0, t, quad_tol=quad_tol)
        header = ["t", "y_oracle", "y_first_order", "y_corrected"]
        cols = [t, oracle, first.y.real, corr.y.real]
    else:
        first = spectral.approx_first_order(f, 1.0, 0.0, t, quad_tol=quad_tol)
        w = spectral.wkb(f, t, quad_tol=quad_tol)
        header = ["t", "y_oracle", "y_first_order", "y_wkb"]
        cols = [t, oracle, first.y.real, np.where(w.divergent, np.nan, w.y.real)]
    return header, list(zip(*cols))


# ---------------------------------------------------------------------------
# solve


def _check_params(exprs, params, where):
    missing = set().union(*(parameters(e) for e in exprs)) - set(params)
    if missing:
        raise ConfigError(f"{where}: unbound parameters {sorted(missing)}")


def _build_scalar(cfg):
    params = {k: _complex(v) for k, v in cfg.get("params", {}).items()}
    init = [_complex(v) for v in cfg["initial"]]
    if "f" in cfg:
        if len(init) != 2:
            raise ConfigError("initial: y'' = f y needs two initial values")
        f = parse(cfg["f"])
        _check_params([f], params, "f")
        return f, ScalarODE.second_order(f, init[0], init[1], params), params
    ode = ScalarODE(tuple(cfg["coefficients"]), tuple(init), params)
    _check_params(ode.coefficients, params, "coefficients")
    return None, ode, params


def _solve_scalar(cfg):
    try:
        f, ode, params = _build_scalar(cfg)
    except (ExprSyntaxError, UnknownIdentifierError) as exc:
        raise ConfigError(f"expression: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    t = _grid(cfg["grid"])
    t0 = float(cfg.get("anchor", 0.0))
    methods = cfg.get("methods", ["first-order"])
    rel_tol = cfg.get("rel_tol", DEFAULT_REL_TOL)
    qt = cfg.get("quad_tol", spectral.DEFAULT_QUAD_TOL)
    ppu = cfg.get("panels_per_unit")
    system = to_companion(ode)
    header, cols = ["t"], [t]
    if cfg.get("oracle", True):
        header.append("y_oracle")
        cols.append(solve_at(system, np.array(ode.initial), t, t0=t0, rel_tol=rel_tol)[:, 0].real)
    if f is None:
        bad = set(methods) - {"first-order", "corrected"}
        if bad:
            raise ConfigError(f"methods: {sorted(bad)} need the y'' = f y form ('f')")
        for m in methods:
            sol = spectral.general_first_order(
                system, ode.initial, t, t0=t0, correction=m == "corrected", panels_per_unit=ppu, quad_tol=qt
            )
            header.append("y_" + m.replace("-", "_"))
            cols.append(sol.y.real)
        return header, list(zip(*cols))
    a, b = ode.initial
    kw = dict(params=params, t0=t0, panels_per_unit=ppu, quad_tol=qt)
    for m in methods:
        if m == "first-order":
            sol = spectral.approx_first_order(f, a, b, t, **kw)
        elif m == "corrected":
            sol = spectral.corrected_first_order(f, a, b, t, **kw)[1]
        elif m == "wkb":
            sol = spectral.wkb(f, t, a, b, **kw)
        else:
            sol = spectral.approx_wkb_form(f, a, b, t, **kw)
        header.append("y_" + m.replace("-", "_"))
        cols.append(sol.y.real)
        if sol.imag_residual > 1e-8:
            print(f"warning: {m} imaginary residual {sol.imag_residual:.3e}", file=sys.stderr)
    return header, list(zip(*cols))


def _poly_batch(P: PolyMatrix):
    def ev(z):
        z = np.asarray(z, dtype=float)
        out = np.zeros(z.shape + (P.n, P.n), dtype=complex)
        for c in P.coeffs[::-1]:
            out = out * z[..., None, None] + c
        return out

    return ev


def _solve_system(cfg):
    try:
        M = PolyMatrix.from_json(cfg["matrix"])
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"matrix: {exc}") from exc
    Y0 = np.array([_complex(v) for v in cfg["initial"]])
    if len(Y0) != M.n:
        raise ConfigError(f"initial: need {M.n} values, got {len(Y0)}")
    z = _grid(cfg["grid"])
    methods = cfg.get("methods", ["exact-class"])
    header, cols = ["z"], [z]
    if cfg.get("oracle", True):
        Y = solve_at(lambda s: M(s), Y0, z, rel_tol=cfg.get("rel_tol", DEFAULT_REL_TOL), orientation=M.orientation)
        names, c = _complex_columns("oracle", Y)
        header += names
        cols += c
    for m in methods:
        if m == "exact-class":
            Y = np.array([exact.solve_exact(M, Y0, float(zi)) for zi in z])
        elif m == "taylor":
            Y = np.array([taylor_solve(M, Y0, float(zi)).y for zi in z])
        else:
            row = M.orientation == "row"
            sol = spectral.general_first_order(
                _poly_batch(M),
                Y0,
                z,
                dsystem=_poly_batch(M.derivative()),
                orientation="row" if row else "column",
                panels_per_unit=cfg.get("panels_per_unit"),
                quad_tol=cfg.get("quad_tol", spectral.DEFAULT_QUAD_TOL),
            )
            Y = sol.values
        names, c = _complex_columns(m.replace("-", "_"), Y)
        header += names
        cols += c
    return header, list(zip(*cols))


def _solve_eigen(cfg):
    spec = eigenproblem.BoundarySpec(cfg["family"])
    lo, hi = cfg["range"]
    if not 0 < lo < hi:
        raise ConfigError("range: need 0 < lo < hi")
    step = cfg.get("step", eigenproblem.DEFAULT_STEP)
    tol = cfg.get("tol", eigenproblem.DEFAULT_TOL)
    methods = cfg.get("methods", ["exact", "approx"])
    if "wkb" in methods and spec.family != "dirichlet":
        raise ConfigError("methods: wkb eigenvalues exist only for the dirichlet family")
    header, cols = ["n"], []
    if "exact" in methods:
        header.append("lambda_exact")
        cols.append(eigenproblem.shoot_exact(spec, (lo, hi), tol, step, cfg.get("rel_tol", eigenproblem.SHOOT_REL_TOL)))
    if "approx" in methods:
        header.append("lambda_approx")
        cols.append(eigenproblem.find_roots(spec.characteristic, (lo, hi), step, tol))
    if "wkb" in methods:
        header.append("lambda_wkb")
        nmax = int(math.floor(math.sqrt(hi / 16.0)))
        cols.append([eigenproblem.wkb_eigen(n) for n in range(1, nmax + 1) if 16 * n * n >= lo])
    count = max((len(c) for c in cols), default=0)
    rows = [[i + 1] + [c[i] if i < len(c) else None for c in cols] for i in range(count)]
    return header, rows


def _hamiltonian(cfg) -> quantum.HamiltonianFamily:
    h = cfg["hamiltonian"]
    try:
        if "name" in h:
            return quantum.from_catalog(h["name"], **h.get("params", {}))
        params = {k: _complex(v) for k, v in h.get("params", {}).items()}
        entries = [[str(e) for e in row] for row in h["entries"]]
        _check_params([parse(e) for row in entries for e in row], params, "hamiltonian")
        return quantum.from_entries(entries, params)
    except (TypeError, ExprSyntaxError, UnknownIdentifierError) as exc:
        raise ConfigError(f"hamiltonian: {exc}") from exc


def run_quantum(cfg):
    """Amplitude table vs t and the Trotter convergence table vs N."""
    H = _hamiltonian(cfg)
    psi0 = np.array([_complex(v) for v in cfg["psi0"]])
    if len(psi0) != H.n:
        raise ConfigError(f"psi0: need {H.n} amplitudes, got {len(psi0)}")
    t = _grid(cfg["grid"])
    if t[0] < 0:
        raise ConfigError("grid: quantum times must be non-negative")
    rel_tol = cfg.get("rel_tol", DEFAULT_REL_TOL)
    methods = cfg.get("methods", ["trotter", "adiabatic", "first-order", "corrected"])
    header, cols = ["t"], [t]
    if cfg.get("oracle", True):
        Y = solve_at(lambda s: -1j * H(s), psi0, t, rel_tol=rel_tol)
        names, c = _complex_columns("oracle", Y)
        header += names
        cols += c
    if "trotter" in methods:
        N = cfg.get("trotter_N", DEFAULT_TROTTER_N)
        Y = np.array([quantum.trotter_propagate(H, psi0, float(ti), N).amplitudes for ti in t])
        names, c = _complex_columns("trotter", Y)
        header += names
        cols += c
    eig = [m for m in methods if m != "trotter"]
    if eig:
        res = quantum.adiabatic_analysis(
            H, psi0, t, gauge=cfg.get("gauge", "first-nonzero"),
            panels_per_unit=cfg.get("panels_per_unit"),
            quad_tol=cfg.get("quad_tol", spectral.DEFAULT_QUAD_TOL),
        )
        table = {
            "adiabatic": res.adiabatic,
            "first-order": res.first_order,
            "corrected": res.first_order + res.correction,
        }
        for m in eig:
            names, c = _complex_columns(m.replace("-", "_"), table[m])
            header += names
            cols += c
        header.append("validity_ratio")
        cols.append(res.validity_ratio)
    amplitudes = (header, list(zip(*cols)))

    t_end = float(t[-1])
    ref = quantum.oracle_propagate(H, psi0, t_end, rel_tol=min(rel_tol, 1e-12)).amplitudes
    conv = []
    prev = None
    for N in cfg.get("convergence_N", DEFAULT_CONVERGENCE_N):
        st = quantum.trotter_propagate(H, psi0, t_end, N)
        err = float(np.linalg.norm(st.amplitudes - ref))
        conv.append([N, err, None if prev is None or err == 0 else prev / err, abs(st.norm - np.linalg.norm(psi0))])
        prev = err
    convergence = (["N", "error", "ratio", "norm_deviation"], conv)
    return amplitudes, convergence


def run_solve(cfg):
    kind = cfg["kind"]
    if kind == "scalar-ode":
        return _solve_scalar(cfg)
    if kind == "system":
        return _solve_system(cfg)
    if kind == "eigen":
        return _solve_eigen(cfg)
    return run_quantum(cfg)[0]


def run_check(path, tol: float = exact.DEFAULT_TOL) -> dict:
    try:
        data = json.loads(Path(path).read_text())
        M = PolyMatrix.from_json(data)
    except OSError as exc:
        raise ConfigError(f"cannot read matrix: {exc}") from exc
    except (json.JSONDecodeError, ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"invalid matrix file: {exc}") from exc
    return exact.classify(M, tol).to_json()


# ---------------------------------------------------------------------------
# entry point

_NUMERIC_ERRORS = (
    ArithmeticError,
    np.linalg.LinAlgError,
    spectral.TurningPointError,
    exact.ClassificationError,
    DefectiveMatrixError,
    NonHermitianError,
    RuntimeError,
)

_EPILOG = f"""\
defaults:
  oracle rel_tol            {DEFAULT_REL_TOL:g} (figures use {FIGURE_REL_TOL:g})
  quadrature tolerance      {spectral.DEFAULT_QUAD_TOL:g} (fine vs half-density grid, relative to max(1, |y|))
  quadrature panels / unit  {DEFAULT_PANELS_PER_UNIT} (environment variable VARODE_PANELS overrides)
  grid points (start/stop)  {DEFAULT_GRID_NUM}
  eigen scan step / tol     {eigenproblem.DEFAULT_STEP:g} / {eigenproblem.DEFAULT_TOL:g}
  shooting rel_tol          {eigenproblem.SHOOT_REL_TOL:g}
  trotter_N                 {DEFAULT_TROTTER_N}
  convergence_N             {DEFAULT_CONVERGENCE_N}
  classification tol        {exact.DEFAULT_TOL:g}

exit codes: 0 success, 2 invalid input, 3 numerical failure
"""


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="varode",
        description="Spectral, exact-class and reference solvers for linear ODEs with variable coefficients.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("table", help="eigenvalue comparison table (CSV)")
    t.add_argument("--id", type=int, required=True, choices=sorted(eigenproblem.TABLES))
    t.add_argument("--out", required=True)

    f = sub.add_parser("figure", help="figure data (CSV)")
    f.add_argument("--id", type=int, required=True, choices=sorted(FIGURES))
    f.add_argument("--out", required=True)
    f.add_argument("--rel-tol", type=float, default=FIGURE_REL_TOL)
    f.add_argument("--quad-tol", type=float, default=spectral.DEFAULT_QUAD_TOL)

    s = sub.add_parser("solve", help="solve a problem described by a JSON config")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--rel-tol", type=float, default=None, help="override the config's oracle rel_tol")
    s.add_argument("--quad-tol", type=float, default=None, help="override the config's quad_tol")

    c = sub.add_parser("check", help="classify a polynomial matrix (JSON) and print the report")
    c.add_argument("--matrix", required=True)
    c.add_argument("--tol", type=float, default=exact.DEFAULT_TOL)

    q = sub.add_parser("quantum", help="propagate a Hamiltonian family (JSON config)")
    q.add_argument("--config", required=True)
    q.add_argument("--out", required=True, help="amplitude CSV; the convergence table goes to <stem>_convergence.csv")
    q.add_argument("--rel-tol", type=float, default=None)
    q.add_argument("--quad-tol", type=float, default=None)
    return p


def _overrides(cfg, args):
    if getattr(args, "rel_tol", None) is not None:
        cfg["rel_tol"] = args.rel_tol
    if getattr(args, "quad_tol", None) is not None and cfg["kind"] != "eigen":
        cfg["quad_tol"] = args.quad_tol
    return cfg


def _dispatch(args) -> int:
    if args.command == "table":
        write_csv(args.out, *run_table(args.id))
    elif args.command == "figure":
        write_csv(args.out, *run_figure(args.id, args.rel_tol, args.quad_tol))
    elif args.command == "solve":
        cfg = _overrides(load_config(args.config), args)
        write_csv(args.out, *run_solve(cfg))
    elif args.command == "check":
        print(json.dumps(run_check(args.matrix, args.tol), indent=2))
    elif args.command == "quantum":
        cfg = _overrides(load_config(args.config, "quantum"), args)
        amplitudes, convergence = run_quantum(cfg)
        write_csv(args.out, *amplitudes)
        out = Path(args.out)
        write_csv(out.with_name(out.stem + "_convergence.csv"), *convergence)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERIC_ERRORS as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
