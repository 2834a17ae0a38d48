"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line (also collected into the
terminal summary) before asserting, so a run shows the status of every
criterion at a glance.
"""

import json
import random
import signal
import socket
import subprocess
import sys
import time

import pytest

from ace import arith, dh, games, paillier
from ace.common import Role
from ace.dh import DhBackend
from ace.multi import AceScheme, bell_lapadula
from ace.paillier import PaillierBackend

from conftest import ACCEPTANCE_LINES
import oracles


def report(number, title, ok, detail, elapsed=None, limit=None):
    timing = ""
    if elapsed is not None:
        timing = f" [{elapsed:.2f} s"
        if limit is not None:
            ok = ok and elapsed < limit
            timing += f", limit {limit} s"
        timing += "]"
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}: {detail}{timing}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


# 1 -------------------------------------------------------------------------


def test_criterion_01_dh_known_answers(tiny_group):
    t0 = time.perf_counter()
    want = oracles.dh_vectors(23, 11, 2, 3, 5, 4, 2, 3, 1, 0)
    pp = dh.DhPublicParams(tiny_group, tiny_group.exp(3))
    msk = dh.DhMasterKey(alpha=5, x=3)
    ek, dk, rk = (dh.gen(pp, msk, r) for r in Role)
    c = dh.encrypt(pp, ek, 4, coins=(2, 3))
    cs = dh.sanitize(pp, rk, c, coins=(1, 0))
    m = dh.decrypt(pp, dk, cs)
    got = (tuple(c), tuple(cs), m)
    ok = got == (want["enc"], want["san"], want["dec"]) == ((4, 1, 8, 1), (9, 18), 4)
    report(1, "DH known-answer vectors", ok, f"Enc={got[0]} San={got[1]} Dec={got[2]}",
           time.perf_counter() - t0, 1)


# 2 -------------------------------------------------------------------------


def test_criterion_02_paillier_known_answers():
    t0 = time.perf_counter()
    want = oracles.paillier_vectors(3, 5, 7, 2, 2, 4, 1, 1)
    mod = arith.PaillierModulus(15, 3, 5)
    pp = paillier.PaillierPublicParams(mod.public)
    msk = paillier.PaillierMasterKey(mod, 7)
    ek, dk, rk = (paillier.gen(pp, msk, r) for r in Role)
    c = paillier.encrypt(pp, ek, 2, coins=(2, 4))
    cs = paillier.sanitize(pp, rk, c, coins=(1, 1))
    m = paillier.decrypt(pp, dk, cs)
    got = ((c.c0, c.c1), cs.cp, m)
    ok = dk.lam == 4 and got == (want["enc"], want["san"], want["dec"]) == ((83, 94), 167, 2)
    report(2, "Paillier known-answer vectors", ok, f"lam={dk.lam} Enc={got[0]} San={got[1]} Dec={got[2]}",
           time.perf_counter() - t0, 1)


# 3 -------------------------------------------------------------------------


def test_criterion_03_exhaustive_dh_image(tiny_group):
    t0 = time.perf_counter()
    rng = random.Random(3)
    G = tiny_group
    bad_adv = bad_honest = 0
    adversarial = honest = 0
    while adversarial < 100 or honest < 100:
        pp, msk = dh.setup(G, rng)
        if adversarial < 100:
            e = [rng.randrange(G.q) for _ in range(4)]
            if (e[1] - msk.x * e[0] - msk.alpha) % G.q == 0:
                continue
            rep = games.exhaustive_sanitizer_image(pp, msk, dh.DhCiphertext(*map(G.exp, e)))
            adversarial += 1
            bad_adv += not (rep.verdict == "uniform" and rep.distinct == G.q ** 2 == 121)
        if honest < 100:
            m = G.random_element(rng)
            c = dh.encrypt(pp, dh.gen(pp, msk, Role.SENDER), m, rng)
            rep = games.exhaustive_sanitizer_image(pp, msk, c)
            honest += 1
            bad_honest += not (rep.plaintexts == {m} and sum(rep.counts.values()) == 121)
    report(3, "exhaustive no-write core, q = 11", bad_adv == 0 and bad_honest == 0,
           f"{adversarial} adversarial images bijective onto G^2 (exceptions {bad_adv}); "
           f"{honest} honest images all decrypt to m (exceptions {bad_honest})",
           time.perf_counter() - t0, 10)


# 4 -------------------------------------------------------------------------


def test_criterion_04_exhaustive_paillier_image():
    """Implemented as stated: uniform for every delta0 != alpha, survival at delta0 = alpha."""
    t0 = time.perf_counter()
    rng = random.Random(4)
    mod = arith.PaillierModulus(15, 3, 5)
    pp = paillier.PaillierPublicParams(mod.public)
    reference = games.uniform_paillier_reference(pp)
    failures = []
    cases = 0
    for alpha in range(15):
        msk = paillier.PaillierMasterKey(mod, alpha)
        for d0 in range(15):
            c0 = paillier.paillier_encrypt(pp, d0, mod.random_unit_mod_n(rng))
            m = rng.randrange(15)
            c1 = paillier.paillier_encrypt(pp, m, mod.random_unit_mod_n(rng))
            rep = games.exhaustive_paillier_image(pp, msk, paillier.PaillierCiphertext(c0, c1))
            cases += 1
            if d0 == alpha:
                ok = rep.plaintexts == {m}
            else:
                ok = rep.counts == reference
            if not ok:
                failures.append((alpha, d0))
    examples = ", ".join(f"(alpha={a}, delta0={d})" for a, d in failures[:4])
    report(4, "exhaustive Paillier image, N = 15", not failures,
           f"{cases - len(failures)}/{cases} cases as stated; exceptions {len(failures)}"
           + (f", all with gcd(delta0 - alpha, 15) > 1, e.g. {examples}" if failures else ""),
           time.perf_counter() - t0, 10)


# 5 -------------------------------------------------------------------------


def test_criterion_05_correctness_512_bits():
    t0 = time.perf_counter()
    rng = random.Random(5)
    policy = bell_lapadula(3)
    results = {}
    for name, backend in (("dh", DhBackend.generate(512, rng)), ("paillier", PaillierBackend(512))):
        results[name] = games.run_correctness(AceScheme(backend), policy, 100, rng)
    pairs = len(policy.pairs(True))
    report(5, "correctness, Bell-LaPadula n = 3, 512-bit", all(v == 0 for v in results.values()),
           f"{pairs} allowed pairs x 100 messages; failures {results}",
           time.perf_counter() - t0, 30)


# 6 -------------------------------------------------------------------------


def test_criterion_06_blocking():
    t0 = time.perf_counter()
    rng = random.Random(6)
    scheme = AceScheme(DhBackend.generate(128, rng))
    policy = bell_lapadula(3)
    pp, msk = scheme.setup(policy, rng)
    rk = scheme.gen(msk, 4, Role.SANITIZER)
    trials = 10_000
    rates = {}
    blocked = [(0, j) for j in range(1, 4)] + policy.pairs(False)
    for i, j in blocked:
        ek = scheme.gen(msk, i, Role.SENDER)
        dk = scheme.gen(msk, j, Role.RECEIVER)
        bottoms = 0
        for _ in range(trials):
            m = rng.randbytes(8)
            cs = scheme.sanitize(pp, rk, scheme.encrypt(pp, ek, m, rng), rng)
            bottoms += scheme.decrypt(pp, dk, cs) is None
        rates[f"{i}->{j}"] = bottoms / trials
    worst = min(rates.values())
    report(6, "blocking for P(i,j) = 0", worst >= 0.999,
           f"worst bottom rate {worst:.4f} over {len(blocked)} pairs x {trials} trials", time.perf_counter() - t0, 60)


# 7 -------------------------------------------------------------------------


@pytest.fixture(scope="module")
def harness_group():
    return arith.generate_group(128, random.Random(77))


def test_criterion_07_game_statistics(harness_group):
    t0 = time.perf_counter()
    rng = random.Random(7)
    policy = bell_lapadula(3)
    real = AceScheme(DhBackend(harness_group))
    noop = games.NoopSanitizerScheme(DhBackend(harness_group))
    trials = 2000
    coin = {
        "no-read/payload": games.run_no_read_game(real, policy, games.CoinFlipNoRead("payload"), trials, rng),
        "no-read/anonymity": games.run_no_read_game(real, policy, games.CoinFlipNoRead("anonymity"), trials, rng),
        "no-write": games.run_no_write_game(real, policy, games.CoinFlipNoWrite(), trials, rng),
        "alt-no-write": games.run_alt_no_write_game(real, policy, games.CoinFlipNoWrite(), trials, rng),
    }
    colluder_real = games.run_no_write_game(real, policy, games.EmbeddingColluder(), trials, rng)
    colluder_noop = games.run_no_write_game(noop, policy, games.EmbeddingColluder(), trials, rng)
    ok = (all(e.negligible and e.violations == 0 for e in coin.values())
          and colluder_real.negligible and colluder_real.violations == 0
          and colluder_noop.advantage >= 0.9)
    detail = "; ".join(f"coin {k} {e.advantage:.3f}<={e.radius:.3f}" for k, e in coin.items())
    detail += (f"; colluder real {colluder_real.advantage:.3f}<={colluder_real.radius:.3f}"
               f"; colluder no-op control {colluder_noop.advantage:.3f}>=0.9")
    report(7, "game harness statistics", ok, detail, time.perf_counter() - t0, 300)


# 8 -------------------------------------------------------------------------


def test_criterion_08_no_write_variants_agree(harness_group):
    t0 = time.perf_counter()
    rng = random.Random(8)
    policy = bell_lapadula(3)
    trials = 2000
    rows, ok = [], True
    settings = [("real", AceScheme(DhBackend(harness_group))),
                ("no-op control", games.NoopSanitizerScheme(DhBackend(harness_group)))]
    for label, scheme in settings:
        for adv in (games.CoinFlipNoWrite, games.EmbeddingColluder, games.HonestReplay):
            a = games.run_no_write_game(scheme, policy, adv(), trials, rng)
            b = games.run_alt_no_write_game(scheme, policy, adv(), trials, rng)
            gap, bound = abs(a.advantage - b.advantage), a.radius + b.radius
            ok &= gap < bound
            rows.append(f"{label}/{adv.name} |{a.advantage:.3f}-{b.advantage:.3f}|={gap:.3f}<{bound:.3f}")
    report(8, "no-write variants agree", ok, "; ".join(rows), time.perf_counter() - t0)


# 9 -------------------------------------------------------------------------


def _ace(*args):
    return [sys.executable, "-m", "ace", *args]


def _free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def _start_relay(d, port):
    proc = subprocess.Popen(_ace("relay", "--listen", f"127.0.0.1:{port}", "--pp", str(d / "pp.ace"),
                                 "--rk", str(d / "rk.ace"), "--log", str(d / "broadcast.log")),
                            stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True)
    line = proc.stdout.readline()
    assert "listening" in line, proc.stderr.read()
    return proc


def test_criterion_09_relay_end_to_end(tmp_path):
    t0 = time.perf_counter()
    d = tmp_path

    def run(*args):
        subprocess.run(_ace(*args), check=True, capture_output=True, timeout=30)

    run("--seed", "9", "setup", "--bell-lapadula", "3", "--bits", "256", "--out", str(d))
    keys = [("2", "sender", "s2"), ("1", "receiver", "r1"), ("2", "receiver", "r2"),
            ("3", "receiver", "r3"), ("4", "sanitizer", "rk")]
    for ident, role, name in keys:
        run("keygen", "--msk", str(d / "msk.ace"), "--identity", ident, "--role", role, "--out", str(d / f"{name}.ace"))
    port = _free_port()
    address = f"127.0.0.1:{port}"
    relay_proc = _start_relay(d, port)
    listeners = {j: subprocess.Popen(_ace("listen", "--relay", address, "--pp", str(d / "pp.ace"),
                                          "--key", str(d / f"r{j}.ace"), "--count", "2", "--reconnect", "20"),
                                     stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True)
                 for j in (1, 3)}
    try:
        time.sleep(0.5)

        def send(msg):
            out = subprocess.run(_ace("send", "--relay", address, "--pp", str(d / "pp.ace"),
                                      "--key", str(d / "s2.ace"), "--message", msg),
                                 check=True, capture_output=True, text=True, timeout=30)
            return int(out.stdout)

        seq1 = send("first")
        relay_proc.send_signal(signal.SIGTERM)
        relay_proc.wait(10)
        relay_proc = _start_relay(d, port)
        seq2 = send("second")
        outputs = {j: [json.loads(line) for line in p.communicate(timeout=30)[0].splitlines()]
                   for j, p in listeners.items()}
        j2 = subprocess.run(_ace("listen", "--relay", address, "--pp", str(d / "pp.ace"),
                                 "--key", str(d / "r2.ace"), "--count", "2"),
                            capture_output=True, text=True, timeout=30)
        outputs[2] = [json.loads(line) for line in j2.stdout.splitlines()]
    finally:
        relay_proc.send_signal(signal.SIGTERM)
        relay_proc.wait(10)
        for p in listeners.values():
            if p.poll() is None:
                p.kill()
    want = [b"first".hex(), b"second".hex()]
    hashes = {j: [r["sha256"] for r in out] for j, out in outputs.items()}
    ok = ((seq1, seq2) == (1, 2)
          and [r["seq"] for r in outputs[1]] == [r["seq"] for r in outputs[3]] == [1, 2]
          and [r["plaintext"] for r in outputs[1]] == want
          and [r["plaintext"] for r in outputs[2]] == want
          and [r["plaintext"] for r in outputs[3]] == [None, None]
          and hashes[1] == hashes[3] == hashes[2])
    report(9, "relay end to end with restart", ok,
           f"sequence numbers {seq1},{seq2} across restart; j=1 {[r['plaintext'] for r in outputs[1]]}, "
           f"j=2 {[r['plaintext'] for r in outputs[2]]}, j=3 {[r['plaintext'] for r in outputs[3]]}; "
           f"frames identical: {hashes[1] == hashes[3]}", time.perf_counter() - t0, 30)


# 10 ------------------------------------------------------------------------


def test_criterion_10_linear_size():
    rng = random.Random(10)
    backends = {"dh": DhBackend.generate(256, rng), "paillier": PaillierBackend(256)}
    rows, ok = [], True
    for name, be in backends.items():
        scheme = AceScheme(be)
        for n in (1, 2, 4, 8):
            pp, msk = scheme.setup(bell_lapadula(n), rng)
            c = scheme.encrypt(pp, scheme.gen(msk, n, Role.SENDER), b"size", rng)
            size = len(scheme.ciphertext_to_bytes(pp, c))
            single = be.ciphertext_size(pp.instances[0])
            framing = AceScheme.HEADER.size
            ok &= size == n * single + framing
            rows.append(f"{name} n={n}: {size} = {n}x{single}+{framing}")
    report(10, "linear ciphertext size", ok, "; ".join(rows))
