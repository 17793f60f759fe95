"""``chanfold`` command-line interface.

Every command prints a JSON report carrying the tool version, the echoed
configuration and a ``generated_at`` timestamp; everything except the
timestamp is deterministic. Exit status: 0 success, 2 invalid input,
3 I/O failure, 4 numerical failure.
"""

import argparse
import json
import sys
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .channels import ChoiState, choi_to_kraus, kraus_to_choi, random_channel
from .circuits import audit_topology, parse_topology
from .decomposition import DecompositionDeadlock, decompose_extreme
from .errors import ChanfoldError, InputError, NumericalError
from .extremality import is_extreme
from .geometry import numeric_choi_manifold_dim
from .io import decode_channel, dump_json, encode_channel, encode_decomposition, load_json

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    tol_rank: float = 1e-10
    tol_psd: float = 1e-10
    seed: int = 0
    input: str = None
    output: str = None
    options: dict = None

    def echo(self):
        return {
            "subcommand": self.subcommand,
            "tol_rank": self.tol_rank,
            "tol_psd": self.tol_psd,
            "seed": self.seed,
            "input": self.input,
            "output": self.output,
            **(self.options or {}),
        }


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _global_flags(defaults):
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    kw = (lambda v: {"default": v}) if defaults else (lambda v: {"default": argparse.SUPPRESS})
    common.add_argument("--seed", type=int, **kw(0))
    common.add_argument("--tol-rank", type=_positive_float, **kw(1e-10))
    common.add_argument("--tol-psd", type=_positive_float, **kw(1e-10))
    return common


def build_parser():
    # globals may appear before or after the subcommand; the subcommand copy
    # must not overwrite values given before it
    parser = argparse.ArgumentParser(prog="chanfold", parents=[_global_flags(True)], allow_abbrev=False)
    common = _global_flags(False)
    parser.add_argument("--version", action="version", version=f"chanfold {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("convert", parents=[common], allow_abbrev=False, help="convert between Kraus and Choi form")
    p.add_argument("--to", choices=["kraus", "choi"], required=True)
    p.add_argument("input")
    p.add_argument("output")

    p = sub.add_parser("check-extreme", parents=[common], allow_abbrev=False, help="test extremality of a channel")
    p.add_argument("input")
    p.add_argument("--minimize", action="store_true", help="reduce to a minimal Kraus list first")

    p = sub.add_parser("random", parents=[common], allow_abbrev=False, help="sample a channel of given Kraus rank")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("output", nargs="?")

    p = sub.add_parser("decompose", parents=[common], allow_abbrev=False, help="decompose into extreme channels")
    p.add_argument("input")
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--out", dest="output", default=None, help="also write the result to this file")

    p = sub.add_parser("dim-check", parents=[common], allow_abbrev=False, help="verify the Choi manifold dimension")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--seeds", type=int, default=1)

    p = sub.add_parser("audit", parents=[common], allow_abbrev=False, help="audit a circuit topology")
    p.add_argument("input")
    p.add_argument("--points", type=int, default=8)
    p.add_argument("--fd-step", type=_positive_float, default=1e-5)
    return parser


def config_from_args(args):
    skip = {"subcommand", "seed", "tol_rank", "tol_psd", "input", "output"}
    options = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    return RunConfig(
        subcommand=args.subcommand,
        tol_rank=args.tol_rank,
        tol_psd=args.tol_psd,
        seed=args.seed,
        input=getattr(args, "input", None),
        output=getattr(args, "output", None),
        options=options,
    )


def _load_channel(config):
    return decode_channel(load_json(config.input), config.tol_psd)


def _as_kraus(chan, config):
    if isinstance(chan, ChoiState):
        return choi_to_kraus(chan, config.tol_rank)
    return chan


def _cmd_convert(config):
    chan = _load_channel(config)
    if config.options["to"] == "choi":
        out = chan if isinstance(chan, ChoiState) else kraus_to_choi(chan)
    else:
        out = choi_to_kraus(chan if isinstance(chan, ChoiState) else kraus_to_choi(chan), config.tol_rank)
    doc = encode_channel(out)
    dump_json(doc, config.output)
    return {"type": doc["type"], "s": out.s, "t": out.t, "kraus_rank": _as_kraus(out, config).r}


def _cmd_check_extreme(config):
    K = _as_kraus(_load_channel(config), config)
    if config.options.get("minimize"):
        K = choi_to_kraus(kraus_to_choi(K), config.tol_rank)
    return {"s": K.s, "t": K.t, "r": K.r, **is_extreme(K, config.tol_rank).to_dict()}


def _cmd_random(config):
    o = config.options
    K = random_channel(o["s"], o["t"], o["r"], config.seed)
    doc = encode_channel(K)
    if config.output:
        dump_json(doc, config.output)
    return {"channel": doc}


def _cmd_decompose(config):
    chan = _load_channel(config)
    C = chan if isinstance(chan, ChoiState) else kraus_to_choi(chan)
    res = decompose_extreme(C, config.tol_rank, max_depth=config.options.get("max_depth"))
    doc = encode_decomposition(res)
    if config.output:
        dump_json(doc, config.output)
    return doc


def _cmd_dim_check(config):
    o = config.options
    return [
        numeric_choi_manifold_dim(o["s"], o["t"], o["r"], config.seed + k, config.tol_rank).to_dict()
        for k in range(o["seeds"])
    ]


def _cmd_audit(config):
    Z = parse_topology(load_json(config.input))
    o = config.options
    return audit_topology(Z, o["points"], o["fd_step"], config.tol_rank, config.seed).to_dict()


COMMANDS = {
    "convert": _cmd_convert,
    "check-extreme": _cmd_check_extreme,
    "random": _cmd_random,
    "decompose": _cmd_decompose,
    "dim-check": _cmd_dim_check,
    "audit": _cmd_audit,
}


def _report(config, result=None, error=None):
    report = {
        "tool": "chanfold",
        "version": __version__,
        "config": config.echo(),
        "seed": config.seed,
        "generated_at": datetime.now(timezone.utc).isoformat(),
    }
    if error is not None:
        report["error"] = error
    else:
        report["result"] = result
    return report


def run(config, stream=None):
    """Execute one command; returns the exit status."""
    stream = stream or sys.stdout
    try:
        result = COMMANDS[config.subcommand](config)
        status, payload = EXIT_OK, _report(config, result)
    except (InputError, json.JSONDecodeError) as exc:
        err = exc.to_dict() if isinstance(exc, ChanfoldError) else {
            "code": "malformed_json", "path": config.input, "message": str(exc)}
        status, payload = EXIT_INVALID, _report(config, error=err)
    except OSError as exc:
        err = {"code": "io_error", "path": getattr(exc, "filename", None), "message": str(exc)}
        status, payload = EXIT_IO, _report(config, error=err)
    except (DecompositionDeadlock, NumericalError) as exc:
        status, payload = EXIT_NUMERICAL, _report(config, error=exc.to_dict())
    stream.write(json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n")
    return status


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def main(argv=None):
    args = build_parser().parse_args(argv)
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
