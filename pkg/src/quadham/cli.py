"""Command-line front end: analyze, sweep, evolve, jordan.

All documents are plain text, deterministic byte-for-byte for identical
invocations: floats are printed with 17 significant digits (round-trip exact
for doubles), complex values always appear as separate `re`/`im` fields, and
every ordering is fixed.  Reports are JSON, tables are comma-delimited with a
header row.  `--out PATH` redirects any document to a file.

Exit codes: 0 success, 2 usage error, 3 input/parse error, 4 numerical
degeneracy.

Model file schema (JSON), accepted wherever a model name is accepted::

    {
      "K": 2,                       # degrees of freedom
      "gamma_re": [[...], ...],     # 2K x 2K real part, row-major
      "gamma_im": [[...], ...],     # 2K x 2K imaginary part, row-major
      "offset_re": 0.0,             # optional additive constant
      "offset_im": 0.0
    }

gamma_re / gamma_im may also be flat row-major lists of length (2K)^2.
`analyze --dump-gamma PATH` writes this format (canonicalized), and the file
re-parses to an operationally identical Hamiltonian.

Built-in models and their parameters::

    pu                omega1 omega2          Hermitian fourth-order oscillator
    pu-pt             omega1 omega2          PT-symmetric variant
    pu-general        a_re a_im b_re b_im omega1 omega2
    coupled-masses    omega1 omega2          two masses, three springs
    single-oscillator omega                  K=1 smoke test

Sweep tables have one row per grid point, row-major over the declared axes:
the axis values, the K squared frequencies mu sorted descending by (Re, Im)
as xi1..xiK (re/im pairs), the spectrum classification, min_j |sigma_j| (0 at
an exceptional point), and the exceptional flag.  Evolution tables list the
sample time and re/im of each basis coefficient; the ODE residual summary is
appended as '#'-prefixed trailer lines.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .algebra import (
    OperatorBasis,
    QuadraticHamiltonian,
    ToleranceConfig,
    adjoint_matrix,
    antiunitary_invariant,
    canonicalize,
    check_structure,
    is_pseudo_hermitian,
    max_abs,
)
from .dynamics import evolve_observable, ode_check
from .jordan import (
    NumericalDegeneracyError,
    jordan_form,
    multiplicities,
)
from .models import (
    PUParams,
    coupled_masses,
    pais_uhlenbeck,
    pais_uhlenbeck_general,
    pais_uhlenbeck_pt,
    single_oscillator,
)
from .spectral import (
    DEGENERATE,
    DefectiveMatrixError,
    DegenerateSpectrumError,
    ExceptionalPointError,
    characteristic_polynomial,
    is_bounded_below,
    ladder_operators,
    natural_frequencies,
    _even_roots,
)

__all__ = ["main", "run"]

SCHEMA_VERSION = 1


class InputError(Exception):
    """Unreadable or invalid input (exit code 3)."""


# ── deterministic serialization ──────────────────────────────────────────


def _fmt_float(x: float) -> str:
    if not np.isfinite(x):
        raise ValueError(f"non-finite value {x!r} in output document")
    return format(float(x), ".17g")


def _to_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            f"{pad}  {json.dumps(k)}: {_to_json(v, indent + 1)}" for k, v in obj.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        flat = all(not isinstance(v, (dict, list, tuple)) for v in obj)
        if flat:
            return "[" + ", ".join(_to_json(v) for v in obj) + "]"
        items = ",\n".join(f"{pad}  {_to_json(v, indent + 1)}" for v in obj)
        return "[\n" + items + "\n" + pad + "]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _c(z: complex) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _cvec(v) -> list:
    return [_c(z) for z in np.asarray(v).reshape(-1)]


def _cmat(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {
        "re": [[float(x) for x in row] for row in m.real],
        "im": [[float(x) for x in row] for row in m.imag],
    }


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


# ── models and parameters ────────────────────────────────────────────────


@dataclass(frozen=True)
class _Model:
    name: str
    params: tuple[str, ...]
    build: Callable[[dict], QuadraticHamiltonian]


def _build_pu_general(p: dict) -> QuadraticHamiltonian:
    return pais_uhlenbeck_general(
        PUParams(
            a=complex(p["a_re"], p["a_im"]),
            b=complex(p["b_re"], p["b_im"]),
            omega1=p["omega1"],
            omega2=p["omega2"],
        )
    )


_MODELS = {
    m.name: m
    for m in (
        _Model("pu", ("omega1", "omega2"), lambda p: pais_uhlenbeck(p["omega1"], p["omega2"])),
        _Model("pu-pt", ("omega1", "omega2"), lambda p: pais_uhlenbeck_pt(p["omega1"], p["omega2"])),
        _Model(
            "pu-general",
            ("a_re", "a_im", "b_re", "b_im", "omega1", "omega2"),
            _build_pu_general,
        ),
        _Model(
            "coupled-masses",
            ("omega1", "omega2"),
            lambda p: coupled_masses(p["omega1"], p["omega2"]),
        ),
        _Model("single-oscillator", ("omega",), lambda p: single_oscillator(p["omega"])),
    )
}

_PARAM_DEFAULTS = {
    "omega": 1.0,
    "omega1": 1.0,
    "omega2": 1.0,
    "a_re": 1.0,
    "a_im": 0.0,
    "b_re": -1.0,
    "b_im": 0.0,
}
_ALL_PARAM_FLAGS = tuple(_PARAM_DEFAULTS)


def _resolve_params(parser, model: _Model, args) -> dict:
    params = {}
    for flag in _ALL_PARAM_FLAGS:
        given = getattr(args, flag)
        if flag in model.params:
            params[flag] = _PARAM_DEFAULTS[flag] if given is None else given
        elif given is not None:
            parser.error(f"model {model.name!r} does not take --{flag.replace('_', '-')}")
    return params


def _load_gamma_file(path: Path) -> QuadraticHamiltonian:
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read model file {path}: {e}") from e
    if not isinstance(doc, dict):
        raise InputError(f"model file {path} must hold a JSON object")
    try:
        K = int(doc["K"])
    except (KeyError, TypeError, ValueError):
        raise InputError(f"model file {path} needs an integer field 'K'") from None
    if K < 1:
        raise InputError(f"model file {path}: K must be positive, got {K}")
    n = 2 * K

    def grab(key, required):
        if key not in doc:
            if required:
                raise InputError(f"model file {path} is missing field {key!r}")
            return np.zeros((n, n))
        arr = np.asarray(doc[key], dtype=float)
        if arr.shape == (n * n,):
            arr = arr.reshape(n, n)
        if arr.shape != (n, n):
            raise InputError(
                f"model file {path}: {key} must be {n}x{n} (or flat {n * n}), got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise InputError(f"model file {path}: {key} contains non-finite entries")
        return arr

    try:
        gamma = grab("gamma_re", True) + 1j * grab("gamma_im", True)
    except (TypeError, ValueError) as e:
        raise InputError(f"model file {path}: malformed gamma arrays: {e}") from e
    offset = complex(float(doc.get("offset_re", 0.0)), float(doc.get("offset_im", 0.0)))
    Q = QuadraticHamiltonian(OperatorBasis.default(K), gamma, offset)
    if not check_structure(Q):
        raise InputError(f"model file {path}: adjoint matrix fails the structure check")
    return Q


def _resolve_target(parser, args) -> tuple[QuadraticHamiltonian, dict]:
    """Model name or gamma-file path -> (Hamiltonian, report descriptor)."""
    target = args.model
    if target in _MODELS:
        model = _MODELS[target]
        params = _resolve_params(parser, model, args)
        try:
            Q = model.build(params)
        except ValueError as e:
            raise InputError(str(e)) from e
        return Q, {"name": model.name, "params": {k: float(params[k]) for k in model.params}}
    path = Path(target)
    if path.exists():
        return _load_gamma_file(path), {"file": str(target)}
    raise InputError(
        f"unknown model {target!r} (and no such file); available: {', '.join(sorted(_MODELS))}"
    )


def _tolerances(args) -> ToleranceConfig:
    base = ToleranceConfig()
    return ToleranceConfig(
        eq_tol=args.eq_tol if args.eq_tol is not None else base.eq_tol,
        rank_tol=args.rank_tol if args.rank_tol is not None else base.rank_tol,
        coalesce_tol=args.coalesce_tol if args.coalesce_tol is not None else base.coalesce_tol,
    )


# ── analyze ──────────────────────────────────────────────────────────────


def _antiunitary_flags(Q: QuadraticHamiltonian, tol: ToleranceConfig) -> dict:
    K = Q.basis.K
    flip_x = np.concatenate([-np.ones(K), np.ones(K)])
    flip_p = np.concatenate([np.ones(K), -np.ones(K)])
    return {
        "negate_coordinates": antiunitary_invariant(Q, flip_x, tol),
        "negate_momenta": antiunitary_invariant(Q, flip_p, tol),
    }


def _ladder_section(Q, spectrum, tol) -> dict:
    try:
        dec = ladder_operators(Q, spectrum, tol)
    except (DegenerateSpectrumError, ExceptionalPointError, DefectiveMatrixError) as e:
        return {"available": False, "reason": str(e)}
    return {
        "available": True,
        "operators": [
            {"eigenvalue": _c(ld.eigenvalue), "coeffs": _cvec(ld.form.coeffs)}
            for ld in dec.ladders
        ],
        "sigmas": _cvec(dec.sigmas),
        "ground_energy": _c(dec.ground_energy),
        "bounded_below": is_bounded_below(Q, dec, tol),
    }


def _analysis_document(Q: QuadraticHamiltonian, descriptor: dict, tol: ToleranceConfig) -> dict:
    H = adjoint_matrix(Q)
    cp = characteristic_polynomial(H, tol)
    spectrum = natural_frequencies(H, tol)
    defect = multiplicities(H, tol)
    jd = jordan_form(H, tol)
    qc = canonicalize(Q)
    return {
        "schema_version": SCHEMA_VERSION,
        "model": descriptor,
        "K": Q.basis.K,
        "basis": list(Q.basis.labels),
        "gamma": _cmat(qc.gamma),
        "offset": _c(qc.offset),
        "adjoint_matrix": _cmat(H),
        "char_poly": {"coeffs": _cvec(cp.coeffs), "even_part": _cvec(cp.even_part)},
        "spectrum": {
            "classification": spectrum.classification,
            "lambdas": _cvec(spectrum.lambdas),
            "pairing": [[int(a), int(b)] for a, b in spectrum.pairing],
        },
        "pseudo_hermitian": is_pseudo_hermitian(Q, tol),
        "structure_ok": check_structure(Q, tol),
        "antiunitary": _antiunitary_flags(Q, tol),
        "ladder": _ladder_section(Q, spectrum, tol),
        "defect": {
            "is_defective": defect.is_defective,
            "clusters": [
                {"eigenvalue": _c(lam), "algebraic": int(alg), "geometric": int(geo)}
                for lam, alg, geo in defect.eigenvalue_clusters
            ],
        },
        "jordan_blocks": [{"eigenvalue": _c(lam), "size": int(sz)} for lam, sz in jd.blocks],
    }


def _cmd_analyze(parser, args) -> int:
    tol = _tolerances(args)
    Q, descriptor = _resolve_target(parser, args)
    doc = _analysis_document(Q, descriptor, tol)
    _emit(_to_json(doc) + "\n", args.out)
    if args.dump_gamma:
        qc = canonicalize(Q)
        gdoc = {
            "K": Q.basis.K,
            "gamma_re": [[float(x) for x in row] for row in qc.gamma.real],
            "gamma_im": [[float(x) for x in row] for row in qc.gamma.imag],
            "offset_re": float(qc.offset.real),
            "offset_im": float(qc.offset.imag),
        }
        Path(args.dump_gamma).write_text(_to_json(gdoc) + "\n", encoding="utf-8")
    return 0


# ── sweep ────────────────────────────────────────────────────────────────


def _parse_axis(spec: str) -> tuple[str, np.ndarray]:
    try:
        name, rng = spec.split("=", 1)
        start, stop, count = rng.split(":")
        start, stop, count = float(start), float(stop), int(count)
    except ValueError:
        raise InputError(
            f"bad axis spec {spec!r}; expected name=start:stop:count"
        ) from None
    if count < 1:
        raise InputError(f"axis {name!r} needs at least one point, got {count}")
    return name, np.linspace(start, stop, count)


def _sweep_point(model: _Model, params: dict, tol: ToleranceConfig) -> dict:
    Q = model.build(params)
    H = adjoint_matrix(Q)
    cp = characteristic_polynomial(H, tol)
    mu = _even_roots(cp.even_part)
    mu = sorted((complex(z) for z in mu), key=lambda z: (-z.real, -z.imag))
    spectrum = natural_frequencies(H, tol)
    defect = multiplicities(H, tol)
    if spectrum.classification == DEGENERATE:
        min_sigma = 0.0
    else:
        try:
            dec = ladder_operators(Q, spectrum, tol)
            min_sigma = float(np.min(np.abs(dec.sigmas)))
        except (ExceptionalPointError, DefectiveMatrixError):
            min_sigma = 0.0
    return {
        "mu": mu,
        "class": spectrum.classification,
        "min_abs_sigma": min_sigma,
        "is_exceptional": defect.is_defective,
    }


def _cmd_sweep(parser, args) -> int:
    tol = _tolerances(args)
    if args.model not in _MODELS:
        raise InputError(
            f"unknown model {args.model!r}; available: {', '.join(sorted(_MODELS))}"
        )
    model = _MODELS[args.model]
    base = _resolve_params(parser, model, args)
    if not args.axis:
        parser.error("sweep needs at least one --axis name=start:stop:count")
    axes = [_parse_axis(s) for s in args.axis]
    for name, _ in axes:
        if name not in model.params:
            raise InputError(
                f"axis {name!r} is not a parameter of model {model.name!r} "
                f"(has: {', '.join(model.params)})"
            )

    grids = [vals for _, vals in axes]
    names = [name for name, _ in axes]
    shape = [len(g) for g in grids]
    points = []
    for flat in range(int(np.prod(shape))):
        idx = np.unravel_index(flat, shape)
        p = dict(base)
        for ax, i in enumerate(idx):
            p[names[ax]] = float(grids[ax][i])
        points.append(p)
    if not points:
        raise InputError("sweep grid is empty")

    K = model.build(points[0]).basis.K
    work = lambda p: _sweep_point(model, p, tol)
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(work, points))
    else:
        rows = [work(p) for p in points]

    header = list(names)
    for i in range(K):
        header += [f"xi{i + 1}_re", f"xi{i + 1}_im"]
    header += ["class", "min_abs_sigma", "is_exceptional"]
    lines = [",".join(header)]
    for p, row in zip(points, rows):
        cells = [_fmt_float(p[name]) for name in names]
        for z in row["mu"]:
            cells += [_fmt_float(z.real), _fmt_float(z.imag)]
        cells.append(row["class"])
        cells.append(_fmt_float(row["min_abs_sigma"]))
        cells.append("true" if row["is_exceptional"] else "false")
        lines.append(",".join(cells))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


# ── evolve ───────────────────────────────────────────────────────────────


def _resolve_observable(parser, Q: QuadraticHamiltonian, selector: str, tol):
    from .algebra import LinearForm

    if selector in Q.basis.labels:
        return LinearForm.unit(Q.basis, selector)
    if selector.startswith("Z") and selector[1:].isdigit():
        idx = int(selector[1:])
        if not 1 <= idx <= Q.basis.dim:
            parser.error(
                f"ladder index out of range: {selector} (have Z1..Z{Q.basis.dim})"
            )
        dec = ladder_operators(Q, None, tol)
        return dec.ladders[idx - 1].form
    parser.error(
        f"unknown observable {selector!r}; use a basis label "
        f"({', '.join(Q.basis.labels)}) or Z1..Z{Q.basis.dim}"
    )


def _cmd_evolve(parser, args) -> int:
    tol = _tolerances(args)
    Q, _ = _resolve_target(parser, args)
    if args.samples < 1:
        parser.error(f"--samples must be positive, got {args.samples}")
    if args.t_max < args.t_min:
        parser.error("--t-max must be >= --t-min")
    L = _resolve_observable(parser, Q, args.obs, tol)
    times = np.linspace(args.t_min, args.t_max, args.samples)
    H = adjoint_matrix(Q)
    trace = evolve_observable(L, H, times)

    header = ["t"]
    for label in Q.basis.labels:
        header += [f"{label}_re", f"{label}_im"]
    lines = [",".join(header)]
    for k, t in enumerate(trace.times):
        cells = [_fmt_float(t)]
        for z in trace.coeff_samples[k]:
            cells += [_fmt_float(z.real), _fmt_float(z.imag)]
        lines.append(",".join(cells))

    order = Q.basis.dim
    if args.samples >= order + 1 and args.samples > 1:
        report = ode_check(Q, L, times, tol)
        lines += [
            f"# ode_order={report.order}",
            f"# cayley_hamilton_residual={_fmt_float(report.cayley_hamilton_residual)}",
            f"# stencil_residual={_fmt_float(report.stencil_residual)}",
            f"# max_abs_coeff={_fmt_float(max_abs(trace.coeff_samples))}",
        ]
    else:
        lines.append(f"# ode_check=skipped (need at least {order + 1} samples)")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


# ── jordan ───────────────────────────────────────────────────────────────


def _cmd_jordan(parser, args) -> int:
    tol = _tolerances(args)
    Q, descriptor = _resolve_target(parser, args)
    H = adjoint_matrix(Q)
    defect = multiplicities(H, tol)
    jd = jordan_form(H, tol)
    J = jd.jordan_matrix()
    P = jd.transform
    residual = max_abs(np.linalg.solve(P, H @ P) - J)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "model": descriptor,
        "K": Q.basis.K,
        "defect": {
            "is_defective": defect.is_defective,
            "clusters": [
                {"eigenvalue": _c(lam), "algebraic": int(alg), "geometric": int(geo)}
                for lam, alg, geo in defect.eigenvalue_clusters
            ],
        },
        "blocks": [{"eigenvalue": _c(lam), "size": int(sz)} for lam, sz in jd.blocks],
        "transform": _cmat(P),
        "similarity_residual": float(residual),
    }
    _emit(_to_json(doc) + "\n", args.out)
    return 0


# ── entry point ──────────────────────────────────────────────────────────


def _add_common(sub):
    sub.add_argument("model", metavar="model-or-file", help="built-in model name or gamma file path")
    for flag in _ALL_PARAM_FLAGS:
        sub.add_argument(f"--{flag.replace('_', '-')}", type=float, default=None)
    sub.add_argument("--eq-tol", type=float, default=None)
    sub.add_argument("--rank-tol", type=float, default=None)
    sub.add_argument("--coalesce-tol", type=float, default=None)
    sub.add_argument("--out", default=None, help="write the document here instead of stdout")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quadham",
        description="Algebraic analysis of quadratic Hamiltonians via the adjoint matrix",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_an = subs.add_parser("analyze", help="full spectral/symmetry report for one model")
    _add_common(p_an)
    p_an.add_argument("--dump-gamma", default=None, metavar="PATH",
                      help="also write the canonical gamma file here")
    p_an.set_defaults(func=_cmd_analyze)

    p_sw = subs.add_parser("sweep", help="classification table over a parameter grid")
    _add_common(p_sw)
    p_sw.add_argument("--axis", action="append", default=[], metavar="NAME=START:STOP:COUNT",
                      help="sweep axis (repeatable; row-major grid order)")
    p_sw.add_argument("--jobs", type=int, default=1,
                      help="evaluate grid points with this many threads (output order is fixed)")
    p_sw.set_defaults(func=_cmd_sweep)

    p_ev = subs.add_parser("evolve", help="Heisenberg trace of one observable")
    _add_common(p_ev)
    p_ev.add_argument("--obs", required=True, help="basis label or ladder index Z1..Z2K")
    p_ev.add_argument("--t-min", type=float, default=0.0)
    p_ev.add_argument("--t-max", type=float, default=10.0)
    p_ev.add_argument("--samples", type=int, default=1001)
    p_ev.set_defaults(func=_cmd_evolve)

    p_jo = subs.add_parser("jordan", help="defect report and canonical Jordan form")
    _add_common(p_jo)
    p_jo.set_defaults(func=_cmd_jordan)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(parser, args)
    except SystemExit as e:  # parser.error inside a command
        return int(e.code or 0)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (
        DegenerateSpectrumError,
        ExceptionalPointError,
        DefectiveMatrixError,
        NumericalDegeneracyError,
    ) as e:
        print(f"numerical degeneracy: {e}", file=sys.stderr)
        return 4


def run() -> None:
    sys.exit(main())
