"""Command-line front end.

A thin client over the service layer: every subcommand builds a request
model, dispatches it (in-process by default, or to a running server via
``--server``) and formats the response as CSV or JSON with a provenance
header.  Data rows are byte-identical across reruns with the same flags.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from pydantic import ValidationError

from . import __version__
from .errors import SuperradianceError
from .model import load_ensemble
from .service import handlers, schemas

OUTDIR_ENV = "SUPERRADIANCE_OUTDIR"

_ENDPOINTS = {
    "solve": ("/solve", handlers.solve, schemas.SolveResponse),
    "balance": ("/balance", handlers.balance, schemas.BalanceResponse),
    "classify": ("/classify", handlers.classify, schemas.ClassifyResponse),
    "sample": ("/sample", handlers.sample, schemas.EnsembleModel),
    "fig1": ("/fig1", handlers.fig1, schemas.Fig1Response),
    "fig2a": ("/fig2a", handlers.fig2a, schemas.Fig2aResponse),
    "fig2b": ("/fig2b", handlers.fig2b, schemas.Fig2bResponse),
    "boundary": ("/boundary", handlers.boundary, schemas.BoundaryResponse),
    "oracle": ("/oracle", handlers.oracle_report, schemas.OracleResponse),
}


def _dispatch(subcommand: str, request, server: str | None):
    path, handler, response_model = _ENDPOINTS[subcommand]
    if server is None:
        return handler(request)
    import httpx

    resp = httpx.post(server.rstrip("/") + path,
                      json=request.model_dump(mode="json"), timeout=600.0)
    if resp.status_code >= 400:
        detail = resp.text
        try:
            detail = resp.json().get("detail", detail)
        except ValueError:
            pass
        raise SuperradianceError(f"server returned {resp.status_code}: {detail}")
    return response_model.model_validate(resp.json())


def _fmt(value) -> str:
    if value is None:
        return ""
    return repr(float(value))


def _provenance(subcommand: str, request, ensemble_ref: str | None = None) -> dict:
    params = request.model_dump(mode="json")
    # Execution knobs do not affect the data and stay out of provenance.
    params.pop("threads", None)
    if "ensemble" in params:
        # Provenance records where the ensemble came from, not its full body.
        ens = params["ensemble"]
        params["ensemble"] = {
            "source": ensemble_ref or "inline",
            "omega": ens["omega"],
            "n": len(ens["qubits"]),
        }
    return {
        "tool": "superradiance",
        "version": __version__,
        "subcommand": subcommand,
        "params": params,
    }


def _csv_text(subcommand, request, header, rows, ensemble_ref=None) -> str:
    meta = _provenance(subcommand, request, ensemble_ref)
    lines = [
        f"# {meta['tool']} {meta['version']}",
        f"# subcommand: {meta['subcommand']}",
        f"# params: {json.dumps(meta['params'], sort_keys=True)}",
        ",".join(header),
    ]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _json_text(subcommand, request, response, ensemble_ref=None) -> str:
    payload = {"meta": _provenance(subcommand, request, ensemble_ref)}
    payload.update(response.model_dump(mode="json"))
    return json.dumps(payload, indent=2) + "\n"


def _write(text: str, output: str | None) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
        return
    outdir = os.environ.get(OUTDIR_ENV)
    if outdir and not os.path.isabs(output):
        output = os.path.join(outdir, output)
    parent = os.path.dirname(output)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(output, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _parse_uniform(spec: str) -> schemas.EnsembleModel:
    """Parse 'N=100,omega=1,delta=1,g=0.1[,epsilon=0]' into an ensemble."""
    fields = {}
    for part in spec.split(","):
        if "=" not in part:
            raise ValueError(f"--uniform entries must be key=value, got {part!r}")
        key, _, value = part.partition("=")
        fields[key.strip().lower()] = value.strip()
    try:
        n = int(fields.pop("n"))
        omega = float(fields.pop("omega"))
        delta = float(fields.pop("delta"))
        g = float(fields.pop("g"))
        epsilon = float(fields.pop("epsilon", "0"))
    except KeyError as exc:
        raise ValueError(f"--uniform is missing required key {exc.args[0]!r} "
                         "(need n, omega, delta, g)") from exc
    if fields:
        raise ValueError(f"--uniform has unknown keys: {sorted(fields)}")
    qubit = schemas.QubitModel(delta=delta, epsilon=epsilon, g=g)
    return schemas.EnsembleModel(omega=omega, qubits=[qubit] * n)


def _load_ensemble_arg(args) -> schemas.EnsembleModel:
    if getattr(args, "uniform", None):
        return _parse_uniform(args.uniform)
    return schemas.EnsembleModel.from_ensemble(load_ensemble(args.ensemble))


def _add_ensemble_flags(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--ensemble", metavar="FILE", help="ensemble document (JSON)")
    group.add_argument("--uniform", metavar="SPEC",
                       help="identical qubits, e.g. N=100,omega=1,delta=1,g=0.1[,epsilon=0]")


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("-o", "--output", metavar="FILE",
                   help=f"output file ('-' or omitted: stdout; relative paths go under ${OUTDIR_ENV} if set)")
    p.add_argument("--server", metavar="URL",
                   help="POST to a running service instead of computing in-process")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="superradiance",
        description="Phase-transition solvers for disordered qubit ensembles in a cavity.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("solve", help="mean-field self-consistent solution (JSON)")
    _add_ensemble_flags(p)
    p.add_argument("--kt", type=float, default=0.0, help="temperature as k_B T (energy units)")
    p.add_argument("--angles", dest="angles", action="store_true", default=None,
                   help="force per-qubit angles in the report")
    p.add_argument("--no-angles", dest="angles", action="store_false",
                   help="suppress per-qubit angles (default above N=1000)")
    _add_common_flags(p)

    p = sub.add_parser("balance", help="global bias shift making x = 0 stationary (JSON)")
    _add_ensemble_flags(p)
    p.add_argument("--kt", type=float, default=0.0)
    p.add_argument("--ensemble-out", metavar="FILE",
                   help="also write the balanced ensemble as a loadable document")
    _add_common_flags(p)

    p = sub.add_parser("classify", help="normal/superradiant/critical classification (JSON)")
    _add_ensemble_flags(p)
    p.add_argument("--kt", type=float, default=0.0)
    p.add_argument("--no-balance", dest="auto_balance", action="store_false",
                   help="classify as-is without auto bias balancing")
    _add_common_flags(p)

    p = sub.add_parser("sample", help="draw a disordered ensemble (writes the ensemble document)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--mean-delta", type=float, required=True)
    p.add_argument("--mean-epsilon", type=float, default=0.0)
    p.add_argument("--mean-g", type=float, default=0.0)
    p.add_argument("--sigma-delta", type=float, default=0.0)
    p.add_argument("--sigma-epsilon", type=float, default=0.0)
    p.add_argument("--sigma-g", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    _add_common_flags(p)

    p = sub.add_parser("fig1", help="disorder functions f1, f2 vs sigma/delta (CSV)")
    p.add_argument("--rmin", type=float, default=0.0)
    p.add_argument("--rmax", type=float, default=10.0)
    p.add_argument("--points", type=int, default=500)
    _add_common_flags(p)

    p = sub.add_parser("fig2a", help="thermal suppression S(alpha, sigma/delta) grid (CSV)")
    p.add_argument("--alphamin", type=float, default=0.25)
    p.add_argument("--alphamax", type=float, default=20.0)
    p.add_argument("--alphapoints", type=int, default=None, help="defaults to --points")
    p.add_argument("--sigmamin", type=float, default=0.0)
    p.add_argument("--sigmamax", type=float, default=10.0)
    p.add_argument("--sigmapoints", type=int, default=None, help="defaults to --points")
    p.add_argument("--points", type=int, default=80, help="points per axis")
    p.add_argument("--threads", type=int, default=None, help="cap sweep parallelism")
    _add_common_flags(p)

    p = sub.add_parser("fig2b", help="critical temperature kT_c/delta surface (CSV)")
    p.add_argument("--g2min", type=float, default=0.0)
    p.add_argument("--g2max", type=float, default=4.0)
    p.add_argument("--g2points", type=int, default=None, help="defaults to --points")
    p.add_argument("--sigmamin", type=float, default=0.0)
    p.add_argument("--sigmamax", type=float, default=3.0)
    p.add_argument("--sigmapoints", type=int, default=None, help="defaults to --points")
    p.add_argument("--points", type=int, default=80, help="points per axis")
    p.add_argument("--threads", type=int, default=None, help="cap sweep parallelism")
    _add_common_flags(p)

    p = sub.add_parser("boundary", help="critical (g/g0)^2 vs sigma/delta (CSV)")
    p.add_argument("--sigmamin", type=float, default=0.0)
    p.add_argument("--sigmamax", type=float, default=3.0)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--kt-over-delta", type=float, default=0.0)
    _add_common_flags(p)

    p = sub.add_parser("oracle", help="exact-diagonalization report for small N (JSON)")
    _add_ensemble_flags(p)
    p.add_argument("--cutoff", type=int, default=40, help="highest oscillator level")
    p.add_argument("--k", type=int, default=4, help="number of eigenvalues")
    p.add_argument("--no-ansatz", dest="ansatz", action="store_false")
    p.add_argument("--eta", type=float, default=0.0,
                   help="symmetry-breaking field eta * sum_i sigma_z^i")
    p.add_argument("--no-convergence-check", dest="check_convergence", action="store_false")
    _add_common_flags(p)

    return parser


def _build_request(args):
    sub = args.subcommand
    if sub == "solve":
        return schemas.SolveRequest(ensemble=_load_ensemble_arg(args), kt=args.kt,
                                    include_angles=args.angles)
    if sub == "balance":
        return schemas.BalanceRequest(ensemble=_load_ensemble_arg(args), kt=args.kt)
    if sub == "classify":
        return schemas.ClassifyRequest(ensemble=_load_ensemble_arg(args), kt=args.kt,
                                       auto_balance=args.auto_balance)
    if sub == "sample":
        return schemas.SampleRequest(
            n=args.n, omega=args.omega, mean_delta=args.mean_delta,
            mean_epsilon=args.mean_epsilon, mean_g=args.mean_g,
            sigma_delta=args.sigma_delta, sigma_epsilon=args.sigma_epsilon,
            sigma_g=args.sigma_g, seed=args.seed)
    if sub == "fig1":
        return schemas.Fig1Request(
            r=schemas.GridAxis(min=args.rmin, max=args.rmax, points=args.points))
    if sub == "fig2a":
        return schemas.Fig2aRequest(
            alpha=schemas.GridAxis(min=args.alphamin, max=args.alphamax,
                                   points=args.alphapoints or args.points),
            sigma=schemas.GridAxis(min=args.sigmamin, max=args.sigmamax,
                                   points=args.sigmapoints or args.points),
            threads=args.threads)
    if sub == "fig2b":
        return schemas.Fig2bRequest(
            g2=schemas.GridAxis(min=args.g2min, max=args.g2max,
                                points=args.g2points or args.points),
            sigma=schemas.GridAxis(min=args.sigmamin, max=args.sigmamax,
                                   points=args.sigmapoints or args.points),
            threads=args.threads)
    if sub == "boundary":
        return schemas.BoundaryRequest(
            sigma=schemas.GridAxis(min=args.sigmamin, max=args.sigmamax, points=args.points),
            kt_over_delta=args.kt_over_delta)
    if sub == "oracle":
        return schemas.OracleRequest(
            ensemble=_load_ensemble_arg(args), fock_cutoff=args.cutoff, k=args.k,
            ansatz=args.ansatz, sz_field=args.eta,
            check_convergence=args.check_convergence)
    raise AssertionError(f"unhandled subcommand {sub}")


def _render(args, request, response) -> str:
    sub = args.subcommand
    ref = getattr(args, "uniform", None) or getattr(args, "ensemble", None)
    if sub == "fig1":
        rows = zip(response.sigma_over_delta, response.f1, response.f2)
        return _csv_text(sub, request, ("sigma_over_delta", "f1", "f2"), rows)
    if sub == "fig2a":
        rows = [
            (a, s, response.s[i][j])
            for i, a in enumerate(response.alpha)
            for j, s in enumerate(response.sigma_over_delta)
        ]
        return _csv_text(sub, request, ("alpha", "sigma_over_delta", "s"), rows)
    if sub == "fig2b":
        rows = [
            (g2, s, response.kt_c_over_delta[i][j])
            for i, g2 in enumerate(response.g_over_g0_sq)
            for j, s in enumerate(response.sigma_over_delta)
        ]
        return _csv_text(sub, request, ("g_over_g0_sq", "sigma_over_delta", "kt_c_over_delta"), rows)
    if sub == "boundary":
        rows = zip(response.sigma_over_delta, response.g2_crit)
        return _csv_text(sub, request, ("sigma_over_delta", "g2_crit"), rows)
    if sub == "sample":
        # The sample output *is* the ensemble document, loadable as-is.
        return json.dumps(response.model_dump(mode="json"), indent=2) + "\n"
    return _json_text(sub, request, response, ref)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        request = _build_request(args)
        response = _dispatch(args.subcommand, request, args.server)
        if args.subcommand == "balance" and getattr(args, "ensemble_out", None):
            doc = json.dumps(response.ensemble.model_dump(mode="json"), indent=2) + "\n"
            _write(doc, args.ensemble_out)
        _write(_render(args, request, response), args.output)
    except SuperradianceError as exc:
        # bad ensemble documents, solver guards, server-side failures
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValidationError, ValueError) as exc:
        # malformed flag values (grid bounds, --uniform spec, ...)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
