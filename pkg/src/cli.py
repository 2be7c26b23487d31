"""Command-line entry point.

Key and parameter files are JSON with hex-encoded fields; transactions and
ledgers are binary files in their wire formats.
"""

import argparse
import hashlib
import itertools
import json
import logging
import logging.config
import sys
from contextlib import ExitStack
from enum import IntEnum
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

from bench import DEFAULT_AMOUNT, BenchRunner
from config import Settings, get_settings, require_bound
from crypto.pairing import PointG1, PointG2, PublicParams, setup
from crypto.randomness import seeded
from errors import (
    AmountNotFoundError,
    EncodingError,
    ImbalanceError,
    LedgerFileError,
    SilentLedgerError,
)
from ledger import (
    AuditorPublicKeys,
    LedgerState,
    ManagementKeys,
    Transaction,
    UserSecret,
    load_ledger,
    mint,
    mk_gen,
    register,
    trace,
    trans,
    uk_gen,
    verf_tx,
)
from silent_ledger import SilentLedger

logger = logging.getLogger(__name__)


class ExitCode(IntEnum):
    OK = 0
    ERROR = 1
    MISSING_FILE = 3
    MALFORMED = 4
    REJECTED = 5
    TRACE_FAILED = 6


class CommandFailed(Exception):
    """Command ran but its outcome is a failure with a reason code."""

    def __init__(self, code: ExitCode, reason: str, payload: Optional[Dict[str, Any]] = None):
        super().__init__(reason)
        self.code = code
        self.reason = reason
        self.payload = payload or {}


def configure_logging(level: str) -> None:
    """Route package loggers to stderr at ``level``."""
    handler = {"class": "logging.StreamHandler", "formatter": "default", "stream": "ext://sys.stderr"}
    logging_config: Dict[str, Any] = {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {"default": {"format": "%(asctime)s %(levelname)s %(name)s: %(message)s"}},
        "handlers": {"default": handler},
        "loggers": {},
    }
    for logger_name in ("crypto", "ledger", "silent_ledger", "bench", "cli"):
        logging_config["loggers"][logger_name] = {
            "handlers": ["default"],
            "level": level,
            "propagate": False,
        }
    logging.config.dictConfig(logging_config)


def _hex_int(value: int) -> str:
    return value.to_bytes(32, "big").hex()


def _read_json(path: Path) -> Dict[str, Any]:
    data = json.loads(path.read_text())
    if not isinstance(data, dict):
        raise EncodingError(f"{path} does not hold a JSON object")
    return data


def _write_json(path: Path, data: Dict[str, Any]) -> None:
    path.write_text(json.dumps(data, indent=2) + "\n")


def _g1(hex_text: str) -> PointG1:
    return PointG1.from_bytes(bytes.fromhex(hex_text))


def _g2(hex_text: str) -> PointG2:
    return PointG2.from_bytes(bytes.fromhex(hex_text))


def _scalar(hex_text: str) -> int:
    return int(hex_text, 16)


def load_params(path: Path) -> PublicParams:
    """Read a parameter file and check it against the configured curve."""
    data = _read_json(path)
    pp = setup(int(data["security_level"]))
    if (
        data["curve_id"] != pp.curve_id
        or data["G1"] != pp.G1.to_bytes().hex()
        or data["G2"] != pp.G2.to_bytes().hex()
    ):
        raise EncodingError(f"{path} does not match the {pp.curve_id} parameters")
    return pp


def load_keys(path: Path) -> ManagementKeys:
    data = _read_json(path)
    keys = ManagementKeys(mk=_scalar(data["mk"]), T=_g1(data["T"]), x=_scalar(data["x"]), X=_g2(data["X"]))
    if PointG1.generator() * keys.mk != keys.T or PointG2.generator() * keys.x != keys.X:
        raise EncodingError(f"{path} holds inconsistent management keys")
    return keys


def load_auditor(path: Path) -> AuditorPublicKeys:
    data = _read_json(path)
    return AuditorPublicKeys(T=_g1(data["T"]), X=_g2(data["X"]))


def load_user(path: Path) -> UserSecret:
    data = _read_json(path)
    return UserSecret(
        sk=_scalar(data["sk"]),
        vk=_scalar(data["vk"]),
        S=_g1(data["S"]),
        V=_g1(data["V"]),
        label=str(data["label"]),
    )


def _auditor_from(args: argparse.Namespace) -> AuditorPublicKeys:
    if getattr(args, "keys", None):
        return load_keys(Path(args.keys)).public()
    return load_auditor(Path(args.auditor))


def _open_ledger(
    pp: PublicParams, keys_public: Optional[AuditorPublicKeys], path: Path, settings: Settings
) -> LedgerState:
    state = load_ledger(pp, keys_public, path)
    require_bound(state.range_bits, settings.bsgs_bound)
    return state


def cmd_setup(args: argparse.Namespace, settings: Settings) -> Dict[str, Any]:
    pp = setup(args.security_level)
    data = {
        "curve_id": pp.curve_id,
        "security_level": args.security_level,
        "G1": pp.G1.to_bytes().hex(),
        "G2": pp.G2.to_bytes().hex(),
        "q": hex(pp.q),
    }
    _write_json(Path(args.out), data)
    return {"params": args.out, "curve_id": pp.curve_id}


def cmd_auditor_keygen(args: argparse.Namespace, settings: Settings) -> Dict[str, Any]:
    pp = load_params(Path(args.pp))
    keys = mk_gen(pp)
    public = {"T": keys.T.to_bytes().hex(), "X": keys.X.to_bytes().hex()}
    _write_json(Path(args.keys), {"mk": _hex_int(keys.mk), "x": _hex_int(keys.x), **public})
    _write_json(Path(args.public), public)
    return {"keys": args.keys, "public": args.public, "T": public["T"]}


def cmd_register(args: argparse.Namespace, settings: Settings) -> Dict[str, Any]:
    pp = load_params(Path(args.pp))
    keys = load_keys(Path(args.keys))
    ledger_path = Path(args.ledger)
    if ledger_path.exists():
        state = _open_ledger(pp, keys.public(), ledger_path, settings)
    else:
        state = LedgerState(settings.range_bits, keys.public())
    secret, request = uk_gen(pp, args.label)
    account = register(pp, keys, request, state)
    state.save(ledger_path)
    _write_json(
        Path(args.out),
        {
            "label": secret.label,
            "sk": _hex_int(secret.sk),
            "vk": _hex_int(secret.vk),
            "S": secret.S.to_bytes().hex(),
            "V": secret.V.to_bytes().hex(),
        },
    )
    return {"label": account.label, "S": account.S.to_bytes().hex(), "user": args.out}


def cmd_mint(args: argparse.Namespace, settings: Settings) -> Dict[str, Any]:
    pp = load_params(Path(args.pp))
    keys = load_keys(Path(args.keys))
    state = _open_ledger(pp, keys.public(), Path(args.ledger), settings)
    payee = state.lookup_label(args.to)
    if payee is None:
        raise CommandFailed(ExitCode.ERROR, "unknown-payee", {"label": args.to})
    record = mint(pp, keys, payee, args.amount, state)
    state.save(Path(args.ledger))
    return {"payee": args.to, "amount": record.amount, "Q": record.account.Q.to_bytes().hex()}


def _parse_payment(text: str) -> Tuple[str, int]:
    label, sep, amount = text.rpartition(":")
    if not sep or not label:
        raise ValueError(f"expected LABEL:AMOUNT, got {text!r}")
    return label, int(amount)


def cmd_pay(args: argparse.Namespace, settings: Settings) -> Dict[str, Any]:
    pp = load_params(Path(args.pp))
    keys_public = _auditor_from(args)
    state = _open_ledger(pp, keys_public, Path(args.ledger), settings)
    secret = load_user(Path(args.user))
    payments = [_parse_payment(text) for text in args.to]
    if len(payments) != 2:
        raise ValueError("pay needs exactly two --to LABEL:AMOUNT recipients")

    payees = []
    for label, _ in payments:
        payee = state.lookup_label(label)
        if payee is None:
            raise CommandFailed(ExitCode.ERROR, "unknown-payee", {"label": label})
        payees.append(payee)
    amounts = [amount for _, amount in payments]

    ledger = SilentLedger(pp, keys_public, state, settings)
    owned = ledger.scan(secret)
    inputs = next(
        (pair for pair in itertools.combinations(owned, 2) if sum(o.amount for o in pair) == sum(amounts)),
        None,
    )
    if inputs is None:
        raise ImbalanceError(f"no two unspent outputs of {secret.label!r} add up to {sum(amounts)}")
    tx = trans(
        pp,
        keys_public,
        list(inputs),
        payees,
        amounts,
        args.message.encode("utf-8"),
        range_bits=state.range_bits,
    )
    Path(args.out).write_bytes(tx.to_bytes())
    return {"tx": args.out, "tx_id": tx.tx_id, "bytes": len(tx.to_bytes())}


def cmd_verify(args: argparse.Namespace, settings: Settings) -> Dict[str, Any]:
    pp = load_params(Path(args.pp))
    keys_public = _auditor_from(args)
    state = _open_ledger(pp, keys_public, Path(args.ledger), settings)
    tx = Transaction.from_bytes(Path(args.tx).read_bytes())
    result = verf_tx(pp, keys_public, tx, state, commit=not args.dry_run)
    if not result:
        raise CommandFailed(ExitCode.REJECTED, result.reason, {"tx_id": tx.tx_id})
    if not args.dry_run:
        state.save(Path(args.ledger))
    return {"tx_id": tx.tx_id, "result": result.reason}


def cmd_trace(args: argparse.Namespace, settings: Settings) -> Dict[str, Any]:
    pp = load_params(Path(args.pp))
    keys = load_keys(Path(args.keys))
    # The ledger is checked under the keys it was created with; mk only decrypts.
    state = _open_ledger(pp, None, Path(args.ledger), settings)
    tx = Transaction.from_bytes(Path(args.tx).read_bytes())
    try:
        result = trace(pp, keys.mk, tx, args.index - 1, state=state, bound=settings.bsgs_bound)
    except AmountNotFoundError as exc:
        raise CommandFailed(ExitCode.TRACE_FAILED, "amount-not-found", {"detail": str(exc)}) from exc
    payload = {"S": result.S.to_bytes().hex(), "amount": result.amount, "label": result.label}
    if not result.registered:
        raise CommandFailed(ExitCode.TRACE_FAILED, "unknown-address", payload)
    return payload


def cmd_scan(args: argparse.Namespace, settings: Settings) -> Dict[str, Any]:
    pp = load_params(Path(args.pp))
    keys_public = _auditor_from(args)
    state = _open_ledger(pp, keys_public, Path(args.ledger), settings)
    secret = load_user(Path(args.user))
    owned = SilentLedger(pp, keys_public, state, settings).scan(secret)
    return {
        "label": secret.label,
        "outputs": [{"Q": o.Q.to_bytes().hex(), "amount": o.amount} for o in owned],
        "balance": sum(o.amount for o in owned),
    }


def cmd_bench(args: argparse.Namespace, settings: Settings) -> Dict[str, Any]:
    runner = BenchRunner(
        settings,
        iterations=args.iters or settings.bench_iterations,
        payee_counts=[int(p) for p in args.payees.split(",") if p.strip()],
        amount=args.amount,
        workers=args.workers or settings.bench_workers,
    )
    report = runner.run()
    if args.csv_out:
        with open(args.csv_out, "w", newline="") as f:
            report.write_csv(f)
    if not args.json:
        print(report.format_table())
    return {"csv": args.csv_out, **report.to_dict()}


COMMANDS: Dict[str, Callable[[argparse.Namespace, Settings], Dict[str, Any]]] = {
    "setup": cmd_setup,
    "auditor-keygen": cmd_auditor_keygen,
    "register": cmd_register,
    "mint": cmd_mint,
    "pay": cmd_pay,
    "verify": cmd_verify,
    "trace": cmd_trace,
    "scan": cmd_scan,
    "bench": cmd_bench,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="silentledger", description="Auditable anonymous payments")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("--log-level", default=None, help="override SL_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("setup", help="write public parameters")
    p.add_argument("--out", default="pp.json")
    p.add_argument("--security-level", type=int, default=128)

    p = sub.add_parser("auditor-keygen", help="generate auditor management keys")
    p.add_argument("--pp", required=True)
    p.add_argument("--keys", default="auditor-keys.json", help="secret key file")
    p.add_argument("--public", default="auditor.json", help="public key file")

    p = sub.add_parser("register", help="create and certify a long-term account")
    p.add_argument("--pp", required=True)
    p.add_argument("--keys", required=True)
    p.add_argument("--ledger", required=True)
    p.add_argument("--label", required=True)
    p.add_argument("--out", required=True, help="user secret file")

    p = sub.add_parser("mint", help="issue a genesis output to a registered label")
    p.add_argument("--pp", required=True)
    p.add_argument("--keys", required=True)
    p.add_argument("--ledger", required=True)
    p.add_argument("--to", required=True)
    p.add_argument("--amount", type=int, required=True)

    for name, help_text in (("pay", "build a 2-2 transaction"), ("verify", "verify and append a transaction")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--pp", required=True)
        group = p.add_mutually_exclusive_group(required=True)
        group.add_argument("--auditor", help="auditor public key file")
        group.add_argument("--keys", help="auditor secret key file")
        p.add_argument("--ledger", required=True)
        if name == "pay":
            p.add_argument("--user", required=True)
            p.add_argument("--to", action="append", required=True, metavar="LABEL:AMOUNT")
            p.add_argument("--message", default="")
            p.add_argument("--out", default="tx.bin")
        else:
            p.add_argument("--tx", required=True)
            p.add_argument("--dry-run", action="store_true", help="check without appending")

    p = sub.add_parser("trace", help="recover payee and amount of an output")
    p.add_argument("--pp", required=True)
    p.add_argument("--keys", required=True)
    p.add_argument("--ledger", required=True)
    p.add_argument("--tx", required=True)
    p.add_argument("--index", type=int, choices=(1, 2), default=1)

    p = sub.add_parser("scan", help="list unspent outputs of a user")
    p.add_argument("--pp", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--auditor")
    group.add_argument("--keys")
    p.add_argument("--ledger", required=True)
    p.add_argument("--user", required=True)

    p = sub.add_parser("bench", help="time the protocol algorithms")
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--payees", default="2,4,8")
    p.add_argument("--amount", type=int, default=DEFAULT_AMOUNT)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--csv-out", default=None)
    return parser


def _emit(args: argparse.Namespace, ok: bool, payload: Dict[str, Any], reason: str) -> None:
    if args.json:
        print(json.dumps({"ok": ok, "command": args.command, "reason": reason, **payload}))
        return
    stream = sys.stdout if ok else sys.stderr
    print(f"[{'+' if ok else '!'}] {args.command}: {reason}", file=stream)
    for key, value in payload.items():
        if isinstance(value, (dict, list)) and args.command == "bench":
            continue
        print(f"    {key}: {value}", file=stream)


def main(argv: Optional[Sequence[str]] = None, *, seed: Optional[int] = None) -> int:
    """Run one command.

    Args:
        argv: Command-line arguments without the program name.
        seed: Makes key and proof randomness reproducible. Only tests pass it;
            the console entry point never does.

    Returns:
        int: Process exit code.
    """
    args = build_parser().parse_args(argv)
    try:
        settings = get_settings()
    except SilentLedgerError as exc:
        print(f"[!] configuration error: {exc}", file=sys.stderr)
        return ExitCode.MALFORMED
    configure_logging((args.log_level or settings.log_level).upper())

    arguments = list(argv if argv is not None else sys.argv[1:])
    code, reason, payload = _dispatch(args, settings, arguments, seed)
    _emit(args, code == ExitCode.OK, payload, reason)
    return int(code)


def invocation_seed(seed: int, argv: Sequence[str]) -> int:
    """Seed for one invocation; distinct argument lists get distinct streams."""
    digest = hashlib.sha256("\0".join([str(seed), *argv]).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _dispatch(
    args: argparse.Namespace, settings: Settings, argv: Sequence[str], seed: Optional[int]
) -> Tuple[ExitCode, str, Dict[str, Any]]:
    handler = COMMANDS[args.command]
    try:
        with ExitStack() as stack:
            if seed is not None:
                stack.enter_context(seeded(invocation_seed(seed, argv)))
            return ExitCode.OK, "ok", handler(args, settings)
    except CommandFailed as exc:
        return exc.code, exc.reason, exc.payload
    except FileNotFoundError as exc:
        return ExitCode.MISSING_FILE, "missing-file", {"path": str(exc.filename)}
    except (EncodingError, LedgerFileError) as exc:
        return ExitCode.MALFORMED, "malformed-input", {"detail": str(exc)}
    except SilentLedgerError as exc:
        logger.debug("Command failed", exc_info=True)
        return ExitCode.ERROR, type(exc).__name__, {"detail": str(exc)}
    except (KeyError, ValueError, TypeError) as exc:
        return ExitCode.MALFORMED, "malformed-input", {"detail": str(exc)}


if __name__ == "__main__":
    sys.exit(main())
