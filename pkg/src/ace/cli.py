"""Command-line front end.

Exit codes: 0 success, 1 security-property failure (harness),
2 usage error, 3 decryption gave ⊥, 4 I/O or transport error.
"""

import argparse
import hashlib
import json
import logging
import os
import random
import sys
import time

from . import games, relay, wire
from .common import AceError, BackendMismatch, Role, UsageError, default_rng
from .dh import DhBackend
from .multi import AceScheme, Policy, bell_lapadula
from .paillier import PaillierBackend

EXIT_OK, EXIT_INSECURE, EXIT_USAGE, EXIT_BOTTOM, EXIT_IO = 0, 1, 2, 3, 4
SECURE_BITS = 2048

log = logging.getLogger("ace")


class CliError(Exception):
    def __init__(self, message, code=EXIT_USAGE):
        super().__init__(message)
        self.code = code


def _rng(args):
    return random.Random(args.seed) if args.seed is not None else default_rng()


def _read(path, as_hex=False):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_IO) from None
    if as_hex:
        return bytes.fromhex(data.decode().strip())
    return data


def _write(path, data, as_hex=False, mode=None):
    if as_hex:
        data = data.hex().encode() + b"\n"
    if path in (None, "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
        return
    try:
        with open(path, "wb") as fh:
            fh.write(data)
        if mode is not None:
            os.chmod(path, mode)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}", EXIT_IO) from None


def _load_pp(args):
    return wire.load_public_params(_read(args.pp))


def _message(args):
    if args.message is not None:
        return args.message.encode()
    if args.infile is not None:
        return _read(args.infile)
    return sys.stdin.buffer.read()


def _make_backend(name, bits, rng):
    if name == "dh":
        return DhBackend.generate(bits, rng)
    return PaillierBackend(bits)


def _policy_from_args(args):
    if getattr(args, "bell_lapadula", None):
        return bell_lapadula(args.bell_lapadula)
    if getattr(args, "policy", None):
        try:
            return Policy.from_text(_read(args.policy).decode())
        except ValueError as exc:
            raise CliError(f"{args.policy}: {exc}") from None
    raise CliError("give --policy FILE or --bell-lapadula LEVELS")


# ---------------------------------------------------------------------------
# commands


def cmd_setup(args):
    policy = _policy_from_args(args)
    if args.bits < SECURE_BITS:
        log.warning("%d-bit parameters are for testing only; use at least %d", args.bits, SECURE_BITS)
    rng = _rng(args)
    scheme = AceScheme(_make_backend(args.backend, args.bits, rng))
    pp, msk = scheme.setup(policy, rng)
    os.makedirs(args.out, exist_ok=True)
    _write(os.path.join(args.out, "pp.ace"), wire.dump_public_params(pp), args.hex)
    _write(os.path.join(args.out, "msk.ace"), wire.dump_master_key(msk), args.hex, mode=0o600)
    print(f"wrote {args.out}/pp.ace and {args.out}/msk.ace (n={policy.n}, backend={args.backend})")
    return EXIT_OK


def cmd_keygen(args):
    msk = wire.load_master_key(_read(args.msk, args.hex))
    scheme = AceScheme.for_params(msk.pp)
    key = scheme.gen(msk, args.identity, Role.parse(args.role))
    _write(args.out, wire.dump_key(msk.pp, key), args.hex, mode=0o600)
    return EXIT_OK


def cmd_encrypt(args):
    pp = _load_pp(args)
    key = _sender_key(args.key, pp)
    scheme = AceScheme.for_params(pp)
    c = scheme.encrypt(pp, key, _message(args), _rng(args))
    _write(args.out, scheme.ciphertext_to_bytes(pp, c), args.hex)
    return EXIT_OK


def _sender_key(path, pp):
    data = _read(path)
    role, _ = wire.key_role(data)
    if role is not wire.KeyRole.SENDER:
        raise CliError(f"{path} is not an encryption key")
    return wire.load_key(data, pp)


def cmd_sanitize(args):
    pp = _load_pp(args)
    rk_bytes = _read(args.rk)
    role, _ = wire.key_role(rk_bytes)
    if role is not wire.KeyRole.SANITIZER:
        raise CliError(f"{args.rk} is not the sanitizer key")
    rk = wire.load_key(rk_bytes, pp)
    scheme = AceScheme.for_params(pp)
    c = scheme.ciphertext_from_bytes(pp, _read(args.infile, args.hex))
    _write(args.out, scheme.sanitized_to_bytes(pp, scheme.sanitize(pp, rk, c, _rng(args))), args.hex)
    return EXIT_OK


def _decrypt_bytes(scheme, pp, dk, data):
    return scheme.decrypt(pp, dk, scheme.sanitized_from_bytes(pp, data))


def _receiver_key(path, pp):
    data = _read(path)
    role, identity = wire.key_role(data)
    if role is not wire.KeyRole.RECEIVER and not (role is wire.KeyRole.SENDER and identity == 0):
        raise CliError(f"{path} is not a decryption key")
    return wire.load_key(data, pp)


def cmd_decrypt(args):
    pp = _load_pp(args)
    dk = _receiver_key(args.key, pp)
    scheme = AceScheme.for_params(pp)
    m = _decrypt_bytes(scheme, pp, dk, _read(args.infile, args.hex))
    if m is None:
        print("⊥", file=sys.stderr)
        return EXIT_BOTTOM
    _write(args.out, m, args.hex)
    return EXIT_OK


def cmd_relay(args):
    config = relay.RelayConfig(listen=args.listen, pp_path=args.pp, rk_path=args.rk, log_path=args.log,
                               max_payload=args.max_payload, max_connections=args.max_connections)

    def ready(r):
        print(f"relay listening on {r.address} (log at sequence {r.log.last_sequence})", flush=True)

    relay.serve(config, ready)
    return EXIT_OK


def cmd_send(args):
    pp = _load_pp(args)
    key = _sender_key(args.key, pp)
    scheme = AceScheme.for_params(pp)
    c = scheme.encrypt(pp, key, _message(args), _rng(args))
    seq = relay.submit(args.relay, pp, scheme.ciphertext_to_bytes(pp, c))
    print(seq)
    return EXIT_OK


def cmd_listen(args):
    pp = _load_pp(args)
    dk = _receiver_key(args.key, pp)
    scheme = AceScheme.for_params(pp)
    next_seq, seen = args.from_sequence, 0
    deadline = None
    while args.count is None or seen < args.count:
        try:
            for seq, data in relay.subscribe(args.relay, next_seq):
                deadline = None
                m = _decrypt_bytes(scheme, pp, dk, data)
                record = {"seq": seq, "sha256": hashlib.sha256(data).hexdigest(),
                          "plaintext": None if m is None else m.hex()}
                print(json.dumps(record), flush=True)
                next_seq, seen = seq + 1, seen + 1
                if args.count is not None and seen >= args.count:
                    return EXIT_OK
        except (ConnectionError, OSError) as exc:
            if args.reconnect <= 0:
                raise CliError(f"relay connection lost: {exc}", EXIT_IO) from None
            if deadline is None:
                deadline = time.monotonic() + args.reconnect
            if time.monotonic() > deadline:
                raise CliError("relay did not come back", EXIT_IO) from None
            time.sleep(0.2)
    return EXIT_OK


def cmd_policy(args):
    if args.action == "bell-lapadula":
        sys.stdout.write(bell_lapadula(args.levels).to_text())
    else:
        try:
            policy = Policy.from_text(_read(args.file).decode())
        except ValueError as exc:
            raise CliError(f"{args.file}: {exc}") from None
        sys.stdout.write(policy.to_text())
    return EXIT_OK


NO_READ_ADVERSARIES = {
    "coin-flip": lambda: games.CoinFlipNoRead("payload"),
    "coin-flip-anonymity": lambda: games.CoinFlipNoRead("anonymity"),
    "san-key-abuser": games.SanitizerKeyAbuser,
    "legal-decryptor": games.LegalDecryptor,
}
NO_WRITE_ADVERSARIES = {
    "coin-flip": games.CoinFlipNoWrite,
    "embedding-colluder": games.EmbeddingColluder,
    "honest-replay": games.HonestReplay,
}
DEFAULT_ADVERSARIES = {
    "no-read": ["coin-flip", "coin-flip-anonymity", "san-key-abuser"],
    "no-write": ["coin-flip", "embedding-colluder", "honest-replay"],
    "alt-no-write": ["coin-flip", "embedding-colluder", "honest-replay"],
}
GAMES = {"no-read": games.run_no_read_game, "no-write": games.run_no_write_game,
         "alt-no-write": games.run_alt_no_write_game}


def flags_break(estimate):
    """Security failure: the legal trials show a non-negligible advantage."""
    legal = [t for t in estimate.transcripts if not t.violations]
    if not legal:
        return False
    sub = games.AdvantageEstimate(estimate.game, len(legal), sum(t.win for t in legal))
    return not sub.negligible


def cmd_harness(args):
    rng = _rng(args)
    policy = _policy_from_args(args) if (args.policy or args.bell_lapadula) else bell_lapadula(3)
    backend = _make_backend(args.backend, args.bits, rng)
    if args.insecure_noop_sanitizer:
        scheme, label = games.NoopSanitizerScheme(backend), "INSECURE no-op sanitizer"
    elif args.insecure_leaky_sanitizer_key:
        scheme, label = games.LeakySanitizerKeyScheme(backend), "INSECURE leaky sanitizer key"
    else:
        scheme, label = AceScheme(backend), "real scheme"
    names = list(GAMES) + ["correctness"] if args.game == "all" else [args.game]
    failed = False
    for name in names:
        if name == "correctness":
            failures = games.run_correctness(scheme, policy, args.trials, rng)
            rec = {"game": "correctness", "backend": args.backend, "trials": args.trials,
                   "failures": failures}
            print(json.dumps(rec), flush=True)
            print(f"correctness: {failures} failures", file=sys.stderr)
            failed |= failures > 0
            continue
        table = NO_READ_ADVERSARIES if name == "no-read" else NO_WRITE_ADVERSARIES
        advs = [args.adversary] if args.adversary else DEFAULT_ADVERSARIES[name]
        for adv in advs:
            if adv not in table:
                raise CliError(f"adversary {adv!r} does not play {name}; choose from {sorted(table)}")
            est = GAMES[name](scheme, policy, table[adv](), args.trials, rng)
            broken = flags_break(est)
            failed |= broken
            rec = est.record(args.backend, adv)
            rec["flagged"] = broken
            print(json.dumps(rec), flush=True)
            verdict = "ADVANTAGE DETECTED" if broken else "within noise"
            print(f"{name:13s} {adv:20s} adv={est.advantage:.4f} ±{est.radius:.4f} "
                  f"violations={est.violations} {verdict}", file=sys.stderr)
    if failed:
        print(f"FAILED: security property violated ({label})", file=sys.stderr)
        return EXIT_INSECURE
    print(f"ok ({label})", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser():
    p = argparse.ArgumentParser(prog="ace", description="Sanitized broadcast encryption with read and write policies.")
    p.add_argument("--seed", type=int, default=None, help="deterministic randomness (testing only)")
    p.add_argument("--hex", action="store_true", help="read/write binary files as hex text")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def policy_args(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--policy", help="policy file: n, then n rows of n bits")
        g.add_argument("--bell-lapadula", "--levels", dest="bell_lapadula", type=int, metavar="LEVELS",
                       help="use the Bell-LaPadula policy with this many levels")

    sp = sub.add_parser("setup", help="generate public parameters and the master key")
    policy_args(sp)
    sp.add_argument("--backend", choices=["dh", "paillier"], default="dh")
    sp.add_argument("--bits", type=int, default=SECURE_BITS)
    sp.add_argument("--out", required=True, help="output directory")
    sp.set_defaults(func=cmd_setup)

    sp = sub.add_parser("keygen", help="derive a key for an identity and role")
    sp.add_argument("--msk", required=True)
    sp.add_argument("--identity", type=int, required=True)
    sp.add_argument("--role", required=True, choices=["sender", "receiver", "sanitizer"])
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_keygen)

    def message_args(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--message", help="payload as text")
        g.add_argument("--in", dest="infile", help="payload file (default stdin)")

    sp = sub.add_parser("encrypt", help="encrypt a payload with a sender key")
    sp.add_argument("--pp", required=True)
    sp.add_argument("--key", required=True)
    message_args(sp)
    sp.add_argument("--out", default="-")
    sp.set_defaults(func=cmd_encrypt)

    sp = sub.add_parser("sanitize", help="sanitize a ciphertext offline")
    sp.add_argument("--pp", required=True)
    sp.add_argument("--rk", required=True)
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--out", default="-")
    sp.set_defaults(func=cmd_sanitize)

    sp = sub.add_parser("decrypt", help="decrypt a sanitized ciphertext")
    sp.add_argument("--pp", required=True)
    sp.add_argument("--key", required=True)
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--out", default="-")
    sp.set_defaults(func=cmd_decrypt)

    sp = sub.add_parser("relay", help="run the sanitizer relay")
    sp.add_argument("--listen", default="127.0.0.1:7446")
    sp.add_argument("--pp", required=True)
    sp.add_argument("--rk", required=True)
    sp.add_argument("--log", required=True, help="broadcast log file")
    sp.add_argument("--max-payload", type=int, default=relay.DEFAULT_MAX_PAYLOAD)
    sp.add_argument("--max-connections", type=int, default=64)
    sp.set_defaults(func=cmd_relay)

    sp = sub.add_parser("send", help="encrypt and submit to a relay")
    sp.add_argument("--relay", required=True, metavar="HOST:PORT")
    sp.add_argument("--pp", required=True)
    sp.add_argument("--key", required=True)
    message_args(sp)
    sp.set_defaults(func=cmd_send)

    sp = sub.add_parser("listen", help="subscribe to a relay and decrypt broadcasts")
    sp.add_argument("--relay", required=True, metavar="HOST:PORT")
    sp.add_argument("--pp", required=True)
    sp.add_argument("--key", required=True)
    sp.add_argument("--from", dest="from_sequence", type=int, default=1)
    sp.add_argument("--count", type=int, default=None, help="exit after this many broadcasts")
    sp.add_argument("--reconnect", type=float, default=0.0, metavar="SECONDS",
                    help="keep retrying a lost relay for this long")
    sp.set_defaults(func=cmd_listen)

    sp = sub.add_parser("policy", help="policy helpers")
    psub = sp.add_subparsers(dest="action", required=True)
    bl = psub.add_parser("bell-lapadula", help="print the Bell-LaPadula policy")
    bl.add_argument("--levels", type=int, required=True)
    show = psub.add_parser("show", help="validate and print a policy file")
    show.add_argument("file")
    sp.set_defaults(func=cmd_policy)

    sp = sub.add_parser("harness", help="run the security games")
    sp.add_argument("game", choices=["correctness", "no-read", "no-write", "alt-no-write", "all"])
    sp.add_argument("--backend", choices=["dh", "paillier"], default="dh")
    sp.add_argument("--bits", type=int, default=128)
    sp.add_argument("--trials", type=int, default=2000)
    sp.add_argument("--adversary", default=None)
    policy_args(sp)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--insecure-noop-sanitizer", action="store_true",
                   help="negative control: sanitizer without re-randomization")
    g.add_argument("--insecure-leaky-sanitizer-key", action="store_true",
                   help="negative control: sanitizer key equals the decryption key")
    sp.set_defaults(func=cmd_harness)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(levelname)s: %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"ace: error: {exc}", file=sys.stderr)
        return exc.code
    except BackendMismatch as exc:
        print(f"ace: backend mismatch: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, wire.FormatError, ValueError) as exc:
        print(f"ace: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except relay.RelayError as exc:
        print(f"ace: relay refused: {exc}", file=sys.stderr)
        return EXIT_IO
    except AceError as exc:
        print(f"ace: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"ace: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except KeyboardInterrupt:
        return EXIT_USAGE
