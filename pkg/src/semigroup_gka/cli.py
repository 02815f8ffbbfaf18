"""
Semigroup GKA CLI
-----------------
Command-line interface for the semigroup-action group key agreement simulator.

Runs the GSAP protocol family over pluggable semigroup actions, rekeys the
resulting groups and plays the passive eavesdropper against the transcripts.

Usage:
    # Run a scenario file (protocol, backend, n, seed, rekey events, outputs)
    semigroup-gka run --config data/gsap2_toy.json --out transcript.jsonl

    # Quick run without a scenario file
    semigroup-gka run --protocol gsap3p --preset toy-23 --n 4 --seed 7

    # Run a scenario and append rekey events
    semigroup-gka rekey --config data/gsap2_toy.json --event refresh --event leave:2 --event join

    # Eavesdropper tools
    semigroup-gka attack-gsap4 --transcript gsap4.jsonl
    semigroup-gka label --transcript run.jsonl --keys keys.json
    semigroup-gka sap-brute --preset toy-23 --x 000104 --y 000108 --bound 100

    # ElGamal over a linear action
    semigroup-gka elgamal keygen --preset toy-23 --seed 3
    semigroup-gka elgamal encrypt --preset toy-23 --public 000112 --message 000109
    semigroup-gka elgamal decrypt --preset toy-23 --private 000103 --c 000110 --d 000112

Exit codes:
    0  success
    1  usage or other error
    2  the backend lacks a capability the protocol needs
    3  an invariant was violated (keys disagree, the key leaked, ...)
    4  file or transcript format error
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

try:
    from dotenv import load_dotenv
except ModuleNotFoundError:
    print("ERROR: The 'python-dotenv' library is not found in the current Python environment.")
    print("It is a required dependency of 'semigroup-gka' (it loads settings from .env files).")
    print("  pip install semigroup-gka  (or pip install python-dotenv)")
    sys.exit(1)
import dotenv  # For find_dotenv

from .adversary import attack_gsap4, label_transcript, solve_sap_bruteforce
from .backends import build_backend, preset_names
from .backends.base import ActionBackend
from .config import ScenarioConfig, load_settings
from .elgamal import ElGamalCiphertext, ElGamalKeyPair, eg_decrypt, eg_encrypt, eg_keygen
from .exceptions import (
    ConfigError,
    GkaError,
    InvariantViolation,
    TranscriptFormatError,
    UnsupportedCapabilityError,
)
from .main import run_scenario
from .protocols import PROTOCOLS
from .transcript_io import import_keys, import_transcript
from .utils.logger import setup_logging

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CAPABILITY = 2
EXIT_INVARIANT = 3
EXIT_IO = 4


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--config', help='Path to a scenario (or backend) JSON file')
    parser.add_argument('--seed', type=int, help='Seed (overrides the scenario and SGKA_DEFAULT_SEED)')
    parser.add_argument('--out', help='Output file')


def _backend_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--preset', choices=preset_names(), help='Named backend parameter set')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='Semigroup GKA - group key agreement over semigroup actions',
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument('--debug-env', action='store_true', help='Print .env loading details')
    parser.add_argument('--log-level', help='Override SGKA_LOG_LEVEL')
    subparsers = parser.add_subparsers(dest='command', required=True)

    for name, help_text in (('run', 'Run a protocol scenario'),
                            ('rekey', 'Run a scenario and apply rekey events')):
        sub = subparsers.add_parser(name, help=help_text)
        _common(sub)
        _backend_options(sub)
        sub.add_argument('--protocol', choices=sorted(PROTOCOLS), help='Protocol (without --config)')
        sub.add_argument('--n', type=int, help='Group size (without --config)')
        sub.add_argument('--j', type=int, help='GSAP-4 broadcaster index')
        sub.add_argument('--keys-out', help='Write the private elements (oracle key file)')
        sub.add_argument('--summary-out', help='Write the per-epoch summary JSON')
        sub.add_argument('--event', action='append', default=[],
                         help='refresh | leave:<index> | join (repeatable)')

    attack = subparsers.add_parser('attack-gsap4', help='Recover a GSAP-4 key from its transcript')
    _common(attack)
    attack.add_argument('--transcript', required=True, help='GSAP-4 transcript file')
    attack.add_argument('--order', type=int, help='Order of S, if known out of band')

    sap = subparsers.add_parser('sap-brute', help='Exhaustive SAP search on a tiny backend')
    _common(sap)
    _backend_options(sap)
    sap.add_argument('--x', required=True, help='Hex of the starting S element')
    sap.add_argument('--y', required=True, help='Hex of the target S element')
    sap.add_argument('--bound', type=int, default=10000, help='Number of G elements to try')

    elgamal = subparsers.add_parser('elgamal', help='ElGamal-type encryption over a linear action')
    elgamal.add_argument('action', choices=['keygen', 'encrypt', 'decrypt'])
    _common(elgamal)
    _backend_options(elgamal)
    elgamal.add_argument('--public', help='Hex public key (encrypt)')
    elgamal.add_argument('--private', help='Hex private key (decrypt)')
    elgamal.add_argument('--message', help='Hex S element to encrypt')
    elgamal.add_argument('--c', help='Hex first ciphertext component')
    elgamal.add_argument('--d', help='Hex second ciphertext component')

    label = subparsers.add_parser('label', help='Label transcript elements with subsets of users')
    _common(label)
    label.add_argument('--transcript', required=True, help='Transcript file')
    label.add_argument('--keys', required=True, help='Key file written by run --keys-out')
    label.add_argument('--epoch', type=int, default=0,
                       help='Epoch to label (only 0: the key file holds the setup elements)')
    return parser


def _load_env(debug_env: bool) -> None:
    env_file_path_found = dotenv.find_dotenv(usecwd=True)
    if debug_env:
        print(f"DEBUG: dotenv.find_dotenv(usecwd=True) result: '{env_file_path_found}'")
    loaded = load_dotenv(env_file_path_found, verbose=debug_env, override=True)
    if debug_env:
        print(f"DEBUG: load_dotenv(override=True) result: {loaded}")


def _emit(document: Any, out: Optional[str]) -> None:
    text = json.dumps(document, indent=2)
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n", encoding="utf-8")
        print(f"✅ Wrote {out}")
    else:
        print(text)


def _read_json(path: str) -> Dict[str, Any]:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON at line {e.lineno}: {e.msg}", path) from e


def _backend(args: argparse.Namespace) -> ActionBackend:
    if getattr(args, 'preset', None):
        return build_backend({"preset": args.preset})
    if not args.config:
        raise ConfigError("give --preset or --config", "backend")
    document = _read_json(args.config)
    return build_backend(document.get("backend", document) if "protocol" in document else document)


def _parse_event(text: str) -> Dict[str, Any]:
    kind, _, argument = text.partition(':')
    if kind == 'leave':
        if not argument.isdigit():
            raise ConfigError(f"'{text}': use leave:<index>", "--event")
        return {"event": "leave", "index": int(argument)}
    if kind in ('refresh', 'join') and not argument:
        return {"event": kind}
    raise ConfigError(f"unknown event '{text}'", "--event")


def _scenario(args: argparse.Namespace, default_seed: int) -> ScenarioConfig:
    if args.config:
        data = _read_json(args.config)
    else:
        if not (args.protocol and args.n and args.preset):
            raise ConfigError("give --config, or --protocol, --preset and --n", "config")
        data = {"protocol": args.protocol, "backend": {"preset": args.preset}, "n": args.n}
        if args.j is not None:
            data["j"] = args.j
    if args.seed is not None:
        data["seed"] = args.seed
    data["events"] = list(data.get("events", [])) + [_parse_event(e) for e in args.event]
    outputs = dict(data.get("outputs", {}))
    for key, value in (("transcript", args.out), ("keys", args.keys_out), ("summary", args.summary_out)):
        if value:
            outputs[key] = value
    data["outputs"] = outputs
    return ScenarioConfig.from_dict(data, default_seed)


def cmd_run(args: argparse.Namespace, default_seed: int) -> int:
    config = _scenario(args, default_seed)
    if args.command == 'rekey' and not config.events:
        print("❌ rekey needs at least one event (--event or the scenario's events list)")
        return EXIT_ERROR
    print(f"🔄 Running {config.protocol} with n={config.n}, seed={config.seed}")
    outcome = run_scenario(config)
    for epoch in outcome.summary["epochs"]:
        mark = "✅" if epoch["matches_oracle"] else "❌"
        print(f"{mark} epoch {epoch['epoch']} ({epoch['event']}): {len(epoch['members'])} members, "
              f"{epoch['messages']} messages, key {epoch['key']}")
    print(f"📄 transcript hash {outcome.summary['transcript_hash']}")
    if not config.outputs.get("summary"):
        print(json.dumps(outcome.summary, indent=2))
    return EXIT_OK


def cmd_attack(args: argparse.Namespace) -> int:
    transcript = import_transcript(args.transcript)
    print(f"📄 Loaded {len(transcript)} messages from {args.transcript}")
    result = attack_gsap4(transcript, order=args.order)
    if not result.feasible:
        print(f"❌ Attack infeasible: {result.reason}")
        _emit({"feasible": False, "reason": result.reason}, args.out)
        return EXIT_OK
    backend = build_backend(transcript.public_params)
    print("✅ Recovered the GSAP-4 group key")
    _emit({"feasible": True, "key": backend.s_hex(result.key)}, args.out)
    return EXIT_OK


def cmd_sap(args: argparse.Namespace) -> int:
    backend = _backend(args)
    x, y = backend.s_from_hex(args.x), backend.s_from_hex(args.y)
    g = solve_sap_bruteforce(backend, x, y, args.bound)
    if g is None:
        print(f"❌ No solution among the first {args.bound} elements")
        _emit({"found": False, "bound": args.bound}, args.out)
        return EXIT_OK
    print("✅ SAP solved")
    _emit({"found": True, "g": backend.g_hex(g)}, args.out)
    return EXIT_OK


def _need(args: argparse.Namespace, *names: str) -> None:
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise ConfigError(f"elgamal {args.action} needs {', '.join(missing)}", "elgamal")


def cmd_elgamal(args: argparse.Namespace, default_seed: int) -> int:
    backend = _backend(args)
    seed = default_seed if args.seed is None else args.seed
    if args.action == 'keygen':
        pair = eg_keygen(backend, seed)
        _emit({"private": backend.g_hex(pair.private), "public": backend.s_hex(pair.public)}, args.out)
    elif args.action == 'encrypt':
        _need(args, 'public', 'message')
        ct = eg_encrypt(backend, backend.s_from_hex(args.public), backend.s_from_hex(args.message), seed)
        _emit({"c": backend.s_hex(ct.c), "d": backend.s_hex(ct.d)}, args.out)
    else:
        _need(args, 'private', 'c', 'd')
        private = backend.g_from_hex(args.private)
        pair = ElGamalKeyPair(private, backend.act(private, backend.base()), backend.base())
        ct = ElGamalCiphertext(backend.s_from_hex(args.c), backend.s_from_hex(args.d))
        _emit({"message": backend.s_hex(eg_decrypt(backend, pair, ct))}, args.out)
    return EXIT_OK


def cmd_label(args: argparse.Namespace) -> int:
    if args.epoch != 0:
        raise ConfigError("only the setup epoch can be labeled; later epochs mix in fresh elements "
                          "the key file does not record", "--epoch")
    transcript = import_transcript(args.transcript).for_epoch(0)
    backend = build_backend(transcript.public_params)
    keys = import_keys(args.keys, backend)
    labels = label_transcript(transcript, backend, keys)
    print(f"✅ Labeled {len(labels)} elements; none carries the group key")
    _emit([
        {"seq": l.seq, "position": l.position, "form": l.form, "label": l.describe()}
        for l in labels
    ], args.out)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the CLI"""
    parser = build_parser()
    args = parser.parse_args(argv)
    _load_env(args.debug_env)

    try:
        settings = load_settings()
        setup_logging(args.log_level or settings.log_level)
        if args.command in ('run', 'rekey'):
            return cmd_run(args, settings.default_seed)
        if args.command == 'attack-gsap4':
            return cmd_attack(args)
        if args.command == 'sap-brute':
            return cmd_sap(args)
        if args.command == 'elgamal':
            return cmd_elgamal(args, settings.default_seed)
        if args.command == 'label':
            return cmd_label(args)
    except UnsupportedCapabilityError as e:
        print(f"❌ {e}")
        return EXIT_CAPABILITY
    except InvariantViolation as e:
        print(f"❌ Invariant violated: {e}")
        return EXIT_INVARIANT
    except (TranscriptFormatError, OSError) as e:
        print(f"❌ {e}")
        return EXIT_IO
    except (GkaError, ValueError) as e:
        print(f"❌ {e}")
        return EXIT_ERROR
    print(f"Unknown command: {args.command}")
    return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())
