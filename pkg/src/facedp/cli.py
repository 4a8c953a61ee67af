"""Command-line entry point.

Exit statuses: 0 success / audit pass, 1 usage or parse error, 2 audit fail,
3 audit inconclusive.
"""

from __future__ import annotations

import argparse
import datetime as dt
import os
import sys
from pathlib import Path

from .accounting import ledger_of
from .attribute_db import AttributeDatabase, frequency, parse_celeba_attributes, parse_csv, write_csv
from .audit import DEFAULT_SLACK, FAIL, INCONCLUSIVE, audit
from .estimation import utility_csv, utility_report
from .manifest import emit_manifest, rfc3339
from .mechanism import PerturbationConfig, perturb_database
from .sweep import DEFAULT_PW, DEFAULT_TRIALS, run_sweep, sweep_csv

EXIT_OK, EXIT_ERROR, EXIT_AUDIT_FAIL, EXIT_INCONCLUSIVE = 0, 1, 2, 3

PERTURBED_NAME = "perturbed.csv"
LEDGER_NAME = "ledger.json"
MANIFEST_NAME = "manifest.jsonl"


class CommandError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc.strerror}") from None


def _load_db(path: str) -> AttributeDatabase:
    try:
        return parse_csv(_read(path))
    except ValueError as exc:
        raise CommandError(f"{path}: {exc}") from None


def _load_config(path: str) -> PerturbationConfig:
    try:
        return PerturbationConfig.from_json(_read(path))
    except (ValueError, TypeError) as exc:
        raise CommandError(f"{path}: {exc}") from None


def _message(exc: Exception) -> str:
    # KeyError.__str__ adds quotes around the message.
    return str(exc.args[0]) if isinstance(exc, KeyError) and exc.args else str(exc)


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def _name_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _u64(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed {value} outside the unsigned 64-bit range")
    return value


def _created_at(args, db_path: str) -> str:
    # Default is a function of the inputs so reruns are byte-identical.
    if args.created_at:
        return args.created_at
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch:
        stamp = int(epoch)
    else:
        stamp = int(Path(db_path).stat().st_mtime)
    return rfc3339(dt.datetime.fromtimestamp(stamp, dt.timezone.utc))


def cmd_ingest(args) -> int:
    text = _read(args.input)
    parser = parse_celeba_attributes if args.format == "celeba" else parse_csv
    try:
        db = parser(text)
    except ValueError as exc:
        raise CommandError(f"{args.input}: {exc}") from None
    _write(args.out, write_csv(db))
    # Summary goes to stderr so stdout can carry the CSV.
    print(f"records: {len(db)}  attributes: {len(db.names)}", file=sys.stderr)
    if len(db):
        for name in db.names:
            print(f"  {name}: {frequency(db, name):.4f}", file=sys.stderr)
    return EXIT_OK


def cmd_perturb(args) -> int:
    db = _load_db(args.db)
    config = _load_config(args.config)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    try:
        released = perturb_database(db, config)
    except KeyError as exc:
        raise CommandError(f"{args.config}: {_message(exc)}") from None
    ledger = ledger_of(config)
    manifest = emit_manifest(released, ledger, created_at=_created_at(args, args.db))

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / PERTURBED_NAME).write_text(write_csv(released), encoding="utf-8")
    (out / LEDGER_NAME).write_text(ledger.to_json(), encoding="utf-8")
    (out / MANIFEST_NAME).write_text(manifest.dumps(), encoding="utf-8")
    print(f"perturbed {len(config.per_attribute)} attribute(s) of {len(db)} records, seed {config.master_seed}")
    for name, eps in ledger.entries.items():
        print(f"  {name}: epsilon_w = {eps:.6f}")
    print(f"  total epsilon (sequential-composition upper bound) = {ledger.total:.6f}")
    return EXIT_OK


def _load_pair(args):
    original = _load_db(args.original)
    perturbed = _load_db(args.perturbed)
    config = _load_config(args.config)
    return original, perturbed, config


def cmd_estimate(args) -> int:
    original, perturbed, config = _load_pair(args)
    try:
        rows = utility_report(original, perturbed, config)
    except (KeyError, ValueError) as exc:
        raise CommandError(_message(exc)) from None
    _write(args.out, utility_csv(rows))
    return EXIT_OK


def cmd_audit(args) -> int:
    original, perturbed, config = _load_pair(args)
    try:
        report = audit(original, perturbed, config, slack=args.slack)
    except (KeyError, ValueError) as exc:
        raise CommandError(_message(exc)) from None
    _write(args.out, report.to_json())
    print(f"audit verdict: {report.verdict}", file=sys.stderr)
    return {FAIL: EXIT_AUDIT_FAIL, INCONCLUSIVE: EXIT_INCONCLUSIVE}.get(report.verdict, EXIT_OK)


def cmd_sweep(args) -> int:
    db = _load_db(args.db)
    try:
        rows = run_sweep(db, args.attributes, args.pw, args.trials, args.seed)
    except (KeyError, ValueError) as exc:
        raise CommandError(_message(exc)) from None
    _write(args.out, sweep_csv(rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="facedp", description="Randomized-response privacy for binary face-attribute databases.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse an annotation file into the normalized CSV database")
    p.add_argument("input")
    p.add_argument("--format", choices=("celeba", "csv"), default="celeba")
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("perturb", help="release a database through randomized response")
    p.add_argument("db", help="normalized CSV database")
    p.add_argument("--config", required=True, help="perturbation config JSON")
    p.add_argument("--seed", type=_u64, help="override the config's master_seed")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--created-at", help="manifest timestamp (RFC 3339); default derives from the input file")
    p.set_defaults(func=cmd_perturb)

    for name, func, helptext in (
        ("estimate", cmd_estimate, "debiased frequency / utility report (CSV)"),
        ("audit", cmd_audit, "empirical epsilon audit (JSON)"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--original", required=True)
        p.add_argument("--perturbed", required=True)
        p.add_argument("--config", required=True)
        p.add_argument("--out", help="report path (default: stdout)")
        if name == "audit":
            p.add_argument("--slack", type=float, default=DEFAULT_SLACK)
        p.set_defaults(func=func)

    p = sub.add_parser("sweep", help="keep-rate and estimation error across Warner p_w values")
    p.add_argument("db")
    p.add_argument("--attributes", type=_name_list, help="comma-separated attribute names")
    p.add_argument("--pw", type=_float_list, default=list(DEFAULT_PW))
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--out", help="sweep CSV path (default: stdout)")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        return args.func(args)
    except CommandError as exc:
        print(f"facedp {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
