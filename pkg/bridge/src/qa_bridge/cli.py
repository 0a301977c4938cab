"""Console entry point: one request on stdin, one document on stdout."""

from __future__ import annotations

import argparse
import sys

from qa_bridge.service import BridgeConfig, serve_once


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qa-bridge",
        description="serve one QUBO sampler request from stdin on stdout",
    )
    parser.add_argument(
        "--offline",
        action="store_true",
        help="answer from the local samplers instead of the device",
    )
    parser.add_argument(
        "--backend",
        choices=("exact", "sa"),
        default="sa",
        help="offline solver (default sa)",
    )
    parser.add_argument("--seed", type=int, default=0, help="offline sampler seed")
    parser.add_argument("--sweeps", type=int, default=100, help="offline sa sweeps")
    parser.add_argument("--beta0", type=float, default=0.1)
    parser.add_argument("--beta1", type=float, default=10.0)
    parser.add_argument(
        "--keep",
        type=int,
        default=32,
        help="offline exact backend: samples kept, 0 keeps all",
    )
    parser.add_argument(
        "--solver",
        default="",
        help="device solver name; the SDK default is used when empty",
    )
    parser.add_argument(
        "--auth-env",
        default="DWAVE_API_TOKEN",
        help="environment variable holding the device credential",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = BridgeConfig(
        solver_name=args.solver,
        auth_env=args.auth_env,
        offline=args.offline,
        backend=args.backend,
        seed=args.seed,
        sweeps=args.sweeps,
        beta_range=(args.beta0, args.beta1),
        keep=args.keep if args.keep > 0 else None,
    )
    # error documents are answers too, so the exit stays zero for them;
    # a non-zero exit is reserved for failures to produce a document at all
    print(serve_once(sys.stdin.read(), cfg))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
