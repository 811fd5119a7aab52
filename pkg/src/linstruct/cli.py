"""Command-line front end.

Exit codes: 0 on success, 1 when the mathematics refuses the request
(e.g. a radius past theta), 2 for unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import boundary, curves, dirichlet, resolvent, spherical
from .errors import DomainError, InputError
from .reports import dumps_csv, dumps_json, parse_instance
from .spectral import eigendecompose

CURVE_COLUMNS = ["r", "gamma", "gamma_prime", "g_inverse", "fd_gamma_prime", "euler_residual"]
DIRICHLET_COLUMNS = ["r", "eta", "eta_prime", "mu", "euler_residual"]


class Report:
    """Holds a JSON payload and, optionally, a CSV table for the same result."""

    def __init__(self, payload, columns=None, rows=None, default="json"):
        self.payload = payload
        self.columns = columns
        self.rows = rows
        self.default = default

    def render(self, fmt: str | None) -> str:
        fmt = fmt or self.default
        if fmt == "csv":
            if self.columns is None:
                raise InputError("this command has no CSV form; use --format json")
            return dumps_csv(self.columns, self.rows)
        return dumps_json(self.payload)


def _need_input(args):
    if args.input is None:
        raise InputError("--input is required for this command")
    return parse_instance(args.input)


def _grid_args(args, what: str):
    missing = [flag for flag, v in (("--from", args.r_from), ("--to", args.r_to), ("--steps", args.steps)) if v is None]
    if missing:
        raise InputError(f"{what} requires {', '.join(missing)}")
    return args.r_from, args.r_to, args.steps


def cmd_eig(args) -> Report:
    inst = _need_input(args)
    spec = eigendecompose(inst.T)
    ortho, recon = spec.residuals(inst.T)
    return Report(
        {
            "eigenvalues": spec.eigenvalues,
            "eigenvectors": spec.eigenvectors.T,
            "op_norm": inst.op_norm,
            "sweeps": spec.sweeps,
            "orthogonality_residual": ortho,
            "reconstruction_residual": recon,
        }
    )


def cmd_resolve(args) -> Report:
    inst = _need_input(args)
    if args.lam is None:
        raise InputError("resolve requires --lambda")
    if args.backend == "contraction":
        sol = resolvent.contraction_resolvent(inst, args.lam, args.tol)
    else:
        sol = resolvent.spectral_resolvent(inst, args.lam)
    payload = {
        "lambda": sol.lam,
        "v_hat": sol.v_hat,
        "residual": sol.residual,
        "iterations": sol.iterations,
        "g": float(sol.v_hat @ sol.v_hat),
    }
    return Report(payload)


def cmd_g_curve(args) -> Report:
    inst = _need_input(args)
    lo, hi, steps = _grid_args(args, "g-curve")
    pts = resolvent.g_curve(inst, lo, hi, steps)
    return Report([{"lambda": a, "g": b} for a, b in pts], ["lambda", "g"], pts, default="csv")


def cmd_diagnose(args) -> Report:
    inst = _need_input(args)
    diag = boundary.diagnose_boundary(inst)
    cls = boundary.classify_global_max(inst)
    payload = dict(vars_of(diag))
    payload["op_norm"] = inst.op_norm
    payload["global_max"] = vars_of(cls)
    return Report(payload)


def vars_of(obj) -> dict:
    return {f.name: getattr(obj, f.name) for f in dataclasses.fields(obj)}


def cmd_max(args) -> Report:
    inst = _need_input(args)
    if args.r is None:
        raise InputError("max requires --r")
    return Report(spherical.maximize_on_sphere(inst, args.r))


def cmd_wellposed(args) -> Report:
    inst = _need_input(args)
    if args.r is None:
        raise InputError("wellposed requires --r")
    rep = spherical.wellposedness_check(inst, args.r, args.samples, args.seed)
    payload = vars_of(rep)
    payload["ok"] = rep.ok
    return Report(payload)


def _curve_rows(samples):
    return [[getattr(s, c) for c in CURVE_COLUMNS] for s in samples]


def cmd_curve(args) -> Report:
    inst = _need_input(args)
    samples = curves.sample_curve(inst, *_grid_args(args, "curve"))
    return Report(samples, CURVE_COLUMNS, _curve_rows(samples), default="csv")


def cmd_audit(args) -> Report:
    inst = _need_input(args)
    samples = curves.sample_curve(inst, *_grid_args(args, "audit"))
    rep = curves.audit_curve(samples)
    payload = vars_of(rep)
    payload["all_true"] = rep.all_true
    return Report(payload, CURVE_COLUMNS, _curve_rows(samples))


def cmd_counterexample(args) -> Report:
    if args.which == "r2":
        rows = curves.counterexample_r2(restarts=args.restarts, seed=args.seed)
        table = [[r.r, r.gamma, r.gamma_closed, r.fd_gamma_prime, *r.euler_residual] for r in rows]
        cols = ["r", "gamma", "gamma_closed", "fd_gamma_prime", "euler_residual_0", "euler_residual_1"]
        return Report({"example": "r2", "rows": rows}, cols, table)
    rep = curves.counterexample_l2(args.n or 8, args.z_index, restarts=args.restarts, seed=args.seed)
    payload = vars_of(rep)
    payload["truncation_gap_n_2n"] = curves.l2_truncation_gap(rep.n, rep.z_index)
    table = list(zip(rep.radii, rep.gamma, rep.closed_form))
    return Report(payload, ["r", "gamma", "closed_form"], table)


def _load_phi(spec: str, n: int) -> np.ndarray:
    path = Path(spec)
    if path.exists():
        text = path.read_text()
        try:
            values = json.loads(text)
        except json.JSONDecodeError:
            values = [float(tok) for tok in text.replace(",", " ").split()]
        phi = np.asarray(values, dtype=float)
        if phi.shape != (n,):
            raise InputError(f"phi file must hold {n} samples, got shape {phi.shape}")
        return phi
    return dirichlet.phi_preset(spec, n)


def cmd_dirichlet(args) -> Report:
    n = args.n or 49
    p = dirichlet.build_problem(n, _load_phi(args.phi, n))
    if args.r_from is None and args.r_to is None:
        grid = dirichlet.default_r_grid(p, args.steps or 20)
    else:
        lo, hi, steps = _grid_args(args, "dirichlet")
        if not 0.0 < lo < hi:
            raise InputError("need 0 < --from < --to")
        grid = np.geomspace(lo, hi, steps)
    rep = dirichlet.eta_curve(p, grid)
    a = rep.audit
    payload = {
        "n": n,
        "lambda1": rep.lambda1,
        "lambda1_closed_form": dirichlet.lambda1_closed_form(n),
        "delta": rep.delta,
        "monotone_eta": a.monotone_gamma,
        "strictly_concave": a.strictly_concave,
        "monotone_psi_inverse": a.monotone_g,
        "derivative_match": a.derivative_match,
        "max_euler_residual": rep.max_euler_residual,
        "max_w_u_gap": rep.max_w_u_gap,
        "max_product_gap": rep.max_product_gap,
        "rows": rep.rows,
    }
    table = [[row.r, row.eta, row.eta_prime, row.mu, row.euler_residual] for row in rep.rows]
    return Report(payload, DIRICHLET_COLUMNS, table, default="csv")


COMMANDS = {
    "eig": cmd_eig,
    "resolve": cmd_resolve,
    "g-curve": cmd_g_curve,
    "diagnose": cmd_diagnose,
    "max": cmd_max,
    "wellposed": cmd_wellposed,
    "curve": cmd_curve,
    "audit": cmd_audit,
    "counterexample": cmd_counterexample,
    "dirichlet": cmd_dirichlet,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="instance JSON file {dim, T, z}")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"])
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--r", type=float)
    common.add_argument("--lambda", dest="lam", type=float)
    common.add_argument("--from", dest="r_from", type=float)
    common.add_argument("--to", dest="r_to", type=float)
    common.add_argument("--steps", type=int)
    common.add_argument("--samples", type=int, default=1000)
    common.add_argument("--n", type=int)

    parser = argparse.ArgumentParser(prog="linstruct", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in COMMANDS:
        sp = sub.add_parser(verb, parents=[common])
        if verb == "resolve":
            sp.add_argument("--backend", choices=["spectral", "contraction"], default="spectral")
            sp.add_argument("--tol", type=float, default=1e-12)
        elif verb == "counterexample":
            sp.add_argument("which", choices=["r2", "l2"])
            sp.add_argument("--z-index", type=int, choices=[1, 2], default=1)
            sp.add_argument("--restarts", type=int, default=8)
        elif verb == "dirichlet":
            sp.add_argument("--phi", default="one", help="one | eig1 | eig2 | path to samples")
    return parser


def _error_payload(exc: Exception) -> str:
    body = {"error": type(exc).__name__, "message": str(exc)}
    details = getattr(exc, "details", None)
    if callable(details):
        body.update(details())
    return dumps_json(body)


def run(args) -> int:
    try:
        report = COMMANDS[args.verb](args)
        text = report.render(args.format)
    except DomainError as exc:
        sys.stdout.write(_error_payload(exc))
        return 1
    except (InputError, OSError) as exc:
        sys.stdout.write(_error_payload(exc))
        return 2
    if args.output:
        try:
            Path(args.output).write_text(text)
        except OSError as exc:
            sys.stdout.write(_error_payload(exc))
            return 2
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    return run(build_parser().parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
