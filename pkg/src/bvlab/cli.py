"""Command-line interface for the verification workbench.

Commands: constants, verify, bv, psi, chars, report, serve.  By default
every command calls the service handlers in-process; with --server URL the
same requests go over HTTP to a running service, and the output bytes are
identical either way.

Exit codes: 0 success, 1 an inequality or identity check found a
violation, 2 usage/domain error, 3 capacity exceeded.
"""

from __future__ import annotations

import argparse
import sys
from typing import Any, Dict, List, Optional

from .config import RunConfig, parse_config_file, resolve_config
from .errors import CapacityError, ConsistencyError, DomainError
from .reports import (
    bv_dict_to_csv,
    format_real,
    report_dicts_to_csv,
    rows_to_csv,
    to_canonical_json,
)
from .service import handlers, schemas

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_CAPACITY = 3


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems on stderr and exits 2."""

    def error(self, message: str):  # noqa: D102
        self.print_usage(sys.stderr)
        raise SystemExit2(message)


class SystemExit2(Exception):
    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


def _build_parser() -> _Parser:
    parser = _Parser(prog="bvlab", description=__doc__.split("\n\n")[0])
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument("--workers", type=int, default=None,
                        help="worker count (results never depend on it)")
    parser.add_argument("--seed", type=int, default=None,
                        help="seed for randomized checks")
    parser.add_argument("--format", choices=("json", "csv"), default=None,
                        help="output format (default json)")
    parser.add_argument("--limit", type=int, default=None,
                        help="arithmetic tables limit (capacity ceiling)")
    parser.add_argument("--cache-dir", default=None,
                        help="directory for cached arithmetic tables")
    parser.add_argument("--server", default=None,
                        help="base URL of a running service; default runs "
                             "in-process")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants",
                       help="recompute catalog constants with enclosures")
    p.add_argument("ids", nargs="*", default=[],
                   help="constant ids (default: all)")
    p.add_argument("--cutoff", type=int, default=10 ** 6,
                   help="Euler-factor cutoff for recomputed products")

    p = sub.add_parser("verify", help="run inequality/identity checks")
    p.add_argument("checks", nargs="*", default=[],
                   help="check ids (default: suite); one of "
                        + ", ".join(handlers.VERIFY_CHECK_IDS) + ", suite")
    p.add_argument("--N", type=int, default=None,
                   help="sweep limit (default min(1e5, tables limit))")
    p.add_argument("--Q0", type=int, default=None,
                   help="moduli threshold for the threshold-gated checks")
    p.add_argument("--X", type=int, default=1024,
                   help="first range length for the partition check")
    p.add_argument("--Y", type=int, default=1024,
                   help="second range length for the partition check")
    p.add_argument("--K", type=int, default=8,
                   help="subdivision depth for the partition check")
    p.add_argument("--Q", type=int, default=30,
                   help="modulus bound for the large-sieve check")
    p.add_argument("--trials", type=int, default=20,
                   help="random trials for the large-sieve check")
    p.add_argument("--coeff-len", type=int, default=2000,
                   help="coefficient vector length for the large sieve")
    p.add_argument("--R", type=int, default=3,
                   help="conductor cut for convolution/truncation checks")
    p.add_argument("--l", type=int, default=None,
                   help="run the remainder check for this single modulus")
    p.add_argument("--x1", type=float, default=None,
                   help="lower edge for the single remainder check")
    p.add_argument("--x", type=float, default=None,
                   help="upper edge for the single remainder check")

    p = sub.add_parser("bv", help="modulus-summed discrepancy evaluation")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--Q", type=int, required=True, help="modulus bound")
    p.add_argument("--squarefree", action="store_true",
                   help="restrict the outer sum to squarefree moduli")
    p.add_argument("--exclude-q0", type=int, default=None,
                   help="drop moduli divisible by this value")
    p.add_argument("--y-mode", choices=("fixed", "grid"), default="fixed",
                   help="fixed: discrepancy at y = x; grid: sup over a "
                        "geometric y grid in [sqrt(x), x]")
    p.add_argument("--A", type=int, default=2,
                   help="log-power parameter used in the normalization")

    p = sub.add_parser("psi", help="progression sums and discrepancies")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--R", type=int, default=None,
                   help="also evaluate the conductor-truncated sum")
    p.add_argument("--weight", choices=("vonMangoldt", "gLog"),
                   default="vonMangoldt")

    p = sub.add_parser("chars", help="character table for a modulus")
    p.add_argument("--q", type=int, required=True)

    p = sub.add_parser("report", help="trend tables and exploratory probes")
    rsub = p.add_subparsers(dest="report_kind", required=True)
    rt = rsub.add_parser("trend", help="normalized discrepancy trend rows")
    rt.add_argument("--x-list", required=True,
                    help="comma-separated x values, e.g. 1e4,1e5")
    rt.add_argument("--A", type=int, default=2)
    rt.add_argument("--q-override", default=None,
                    help="comma-separated modulus bounds replacing the "
                         "degenerate formula values")
    rt.add_argument("--all-moduli", action="store_true",
                    help="sum over all moduli instead of squarefree only")
    rp = rsub.add_parser("probe", help="bilinear-form probe (observational)")
    rp.add_argument("--Q", type=int, default=20)
    rp.add_argument("--R", type=int, default=3)
    rp.add_argument("--M", type=int, default=64)
    rp.add_argument("--Nlen", type=int, default=64)
    rp.add_argument("--probe-seed", type=int, default=None,
                    help="random coefficients; default uses unit vectors")
    rp.add_argument("--A", type=int, default=2)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


def _resolve(args: argparse.Namespace) -> RunConfig:
    file_values = parse_config_file(args.config) if args.config else {}
    flag_values = {
        "worker_count": args.workers,
        "seed": args.seed,
        "output_format": args.format,
        "tables_limit": args.limit,
        "cache_dir": args.cache_dir,
    }
    cfg = resolve_config(file_values, flag_values)
    cfg.apply_environment()
    return cfg


# -- request construction -------------------------------------------------


def _constants_request(args, cfg: RunConfig) -> schemas.ConstantsRequest:
    return schemas.ConstantsRequest(
        ids=list(args.ids) or ["all"],
        cutoff=args.cutoff,
        precision_target=cfg.precision_target,
    )


def _verify_request(args, cfg: RunConfig) -> schemas.VerifyRequest:
    n = args.N if args.N is not None else min(10 ** 5, cfg.tables_limit)
    if n > cfg.tables_limit:
        raise CapacityError(
            f"N={n} exceeds the tables limit {cfg.tables_limit}; "
            "raise --limit to allocate larger tables")
    return schemas.VerifyRequest(
        checks=list(args.checks) or ["suite"],
        n=n,
        q0=args.Q0,
        seed=cfg.seed,
        workers=cfg.worker_count,
        trials=args.trials,
        q_max=args.Q,
        coeff_len=getattr(args, "coeff_len"),
        x_len=args.X,
        y_len=args.Y,
        k_max=args.K,
        r_cut=args.R,
        modulus=args.l,
        x1=args.x1,
        x=args.x,
    )


def _bv_request(args, cfg: RunConfig) -> schemas.BVRequest:
    if args.x > cfg.tables_limit:
        raise CapacityError(
            f"x={args.x:g} exceeds the tables limit {cfg.tables_limit}; "
            "raise --limit to allocate larger tables")
    return schemas.BVRequest(
        x=args.x, q_max=args.Q,
        squarefree_only=args.squarefree,
        exclude_q0=args.exclude_q0,
        y_mode=args.y_mode,
        a_param=args.A,
        workers=cfg.worker_count,
    )


def _psi_request(args, cfg: RunConfig) -> schemas.PsiRequest:
    if args.x > cfg.tables_limit:
        raise CapacityError(
            f"x={args.x:g} exceeds the tables limit {cfg.tables_limit}; "
            "raise --limit to allocate larger tables")
    return schemas.PsiRequest(x=args.x, q=args.q, a=args.a,
                              r_cut=args.R, weight=args.weight)


def _chars_request(args, cfg: RunConfig) -> schemas.CharsRequest:
    return schemas.CharsRequest(q=args.q, character_cap=cfg.character_cap)


def _parse_float_list(raw: str, flag: str) -> List[float]:
    try:
        return [float(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError as exc:
        raise DomainError(f"bad value for {flag}: {raw!r}") from exc


def _trend_request(args, cfg: RunConfig) -> schemas.TrendRequest:
    xs = _parse_float_list(args.x_list, "--x-list")
    if not xs:
        raise DomainError("--x-list must name at least one x value")
    if max(xs) > cfg.tables_limit:
        raise CapacityError(
            f"x={max(xs):g} exceeds the tables limit {cfg.tables_limit}; "
            "raise --limit to allocate larger tables")
    q_override = None
    if args.q_override is not None:
        q_override = [int(v) for v in
                      _parse_float_list(args.q_override, "--q-override")]
        if len(q_override) != len(xs):
            raise DomainError(
                "--q-override must list one modulus bound per x value")
    return schemas.TrendRequest(
        x_list=xs, a_param=args.A, q_override=q_override,
        squarefree_only=not args.all_moduli,
        workers=cfg.worker_count,
    )


def _probe_request(args, cfg: RunConfig) -> schemas.ProbeRequest:
    return schemas.ProbeRequest(
        q_max=args.Q, r_min=args.R, m_len=args.M, n_len=args.Nlen,
        seed=args.probe_seed, a_param=args.A)


_ROUTES = {
    "constants": ("/constants", _constants_request,
                  handlers.constants_handler, schemas.ConstantsResponse),
    "verify": ("/verify", _verify_request,
               handlers.verify_handler, schemas.VerifyResponse),
    "bv": ("/bv", _bv_request, handlers.bv_handler, schemas.BVResponse),
    "psi": ("/psi", _psi_request, handlers.psi_handler, schemas.PsiResponse),
    "chars": ("/chars", _chars_request,
              handlers.chars_handler, schemas.CharsResponse),
    "report/trend": ("/report/trend", _trend_request,
                     handlers.trend_handler, schemas.TrendResponse),
    "report/probe": ("/report/probe", _probe_request,
                     handlers.probe_handler, schemas.ProbeResponse),
}


def _call(route_key: str, args, cfg: RunConfig,
          server: Optional[str]) -> Dict[str, Any]:
    path, build, handler, resp_model = _ROUTES[route_key]
    request = build(args, cfg)
    if server is None:
        return handler(request).model_dump()
    import httpx

    url = server.rstrip("/") + path
    resp = httpx.post(url, json=request.model_dump(), timeout=600.0)
    if resp.status_code != 200:
        try:
            body = resp.json()
        except ValueError:
            body = {"kind": "transport", "error": resp.text}
        kind = body.get("kind", "transport")
        message = body.get("error", resp.text)
        if kind == "domain":
            raise DomainError(message)
        if kind == "capacity":
            raise CapacityError(message)
        if kind == "consistency":
            raise ConsistencyError(message)
        raise RuntimeError(f"service error {resp.status_code}: {message}")
    return resp_model(**resp.json()).model_dump()


# -- csv rendering ---------------------------------------------------------


def _constants_csv(payload: Dict[str, Any]) -> str:
    header = ["id", "lo", "hi", "mid", "width", "cutoff",
              "meets_precision_target", "note"]
    rows = []
    for e in payload["entries"]:
        v = e["value"]
        rows.append([e["id"], repr(float(v["lo"])), repr(float(v["hi"])),
                     format_real(v["mid"]), format_real(v["width"]),
                     e["cutoff"], e["meets_precision_target"], e["note"]])
    return rows_to_csv(header, rows)


def _psi_csv(payload: Dict[str, Any]) -> str:
    header = ["x", "q", "a", "phi_q", "psi", "expected", "discrepancy",
              "f_R", "R"]
    rows = [[payload["x"], payload["q"], payload["a"], payload["phi_q"],
             payload["psi"], payload["expected"], payload["discrepancy"],
             payload["f_R"], payload["r_cut"]]]
    return rows_to_csv(header, rows)


def _chars_csv(payload: Dict[str, Any]) -> str:
    header = ["q", "index", "exponents", "conductor", "order",
              "is_principal", "is_primitive", "is_real"]
    rows = [[payload["q"], c["index"], c["exponents"], c["conductor"],
             c["order"], c["is_principal"], c["is_primitive"], c["is_real"]]
            for c in payload["characters"]]
    return rows_to_csv(header, rows)


def _trend_csv(payload: Dict[str, Any]) -> str:
    header = ["x", "Q", "total", "normalized", "degenerate", "overridden"]
    rows = [[r["x"], r["Q"], r["total"], r["normalized"], r["degenerate"],
             r["overridden"]] for r in payload["rows"]]
    return rows_to_csv(header, rows)


def _to_csv(command: str, payload: Dict[str, Any]) -> str:
    if command == "constants":
        return _constants_csv(payload)
    if command == "verify":
        return report_dicts_to_csv(payload["reports"])
    if command == "bv":
        return bv_dict_to_csv(payload)
    if command == "psi":
        return _psi_csv(payload)
    if command == "chars":
        return _chars_csv(payload)
    if command == "report/trend":
        return _trend_csv(payload)
    if command == "report/probe":
        return report_dicts_to_csv([payload["report"]])
    raise DomainError(f"no csv rendering for {command}")


def _emit(command: str, payload: Dict[str, Any], cfg: RunConfig) -> None:
    if cfg.output_format == "csv":
        sys.stdout.write(_to_csv(command, payload))
    else:
        sys.stdout.write(to_canonical_json(payload))


def _exit_code(command: str, payload: Dict[str, Any]) -> int:
    if command == "verify" and not payload["ok"]:
        return EXIT_VIOLATION
    if command == "report/probe":
        report = payload["report"]
        if not report["passed"]:
            return EXIT_VIOLATION
    return EXIT_OK


def _serve(args, cfg: RunConfig) -> int:
    try:
        import uvicorn
    except ImportError:
        raise DomainError(
            "the serve command needs uvicorn; install the [server] extra")
    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _resolve(args)
        if args.command == "serve":
            return _serve(args, cfg)
        route_key = args.command
        if route_key == "report":
            route_key = f"report/{args.report_kind}"
        payload = _call(route_key, args, cfg, args.server)
        _emit(route_key, payload, cfg)
        return _exit_code(route_key, payload)
    except SystemExit2 as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ConsistencyError as exc:
        print(f"consistency violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
