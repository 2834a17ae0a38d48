"""Executable security games and exhaustive sanitizer-image oracles.

The referees run the correctness experiment, the No-Read game, the
No-Write game and its chosen-message variant against any scheme object
with the :class:`~ace.multi.AceScheme` interface.  Every query an
adversary makes is logged in a :class:`GameTranscript` and the win flag
is computed from that log alone.

Two deliberately broken scheme variants (and one with mismatched
decryption keys) ship here as negative controls.  They are INSECURE and
exist only so that the harness can demonstrate it detects breakage.
"""

from collections import Counter
from dataclasses import dataclass, field
import math
import types

from . import arith
from .common import IDENTITY_ZERO, AceError, Role, UsageError, default_rng
from .dh import DhCiphertext, DhSanKey, DhSanitizedCiphertext, DhDecKey
from .multi import AceScheme, MultiCiphertext, MultiDecKey, MultiSanKey
from .paillier import PaillierCiphertext, PaillierSanKey, PaillierSanitizedCiphertext

Z_SCORE = 3.0
DEFAULT_MESSAGE_LENGTH = 8


# ---------------------------------------------------------------------------
# transcripts and estimates


@dataclass(frozen=True)
class Query:
    oracle: str  # "G", "E", "S" or "R"
    phase: str  # "pre" or "post"
    identity: int
    role: Role | None = None
    payload: bytes | None = None


@dataclass(frozen=True)
class NoReadChallenge:
    m0: bytes
    m1: bytes
    i0: int
    i1: int


@dataclass(frozen=True)
class NoWriteChallenge:
    c: object
    i_prime: int
    m: bytes | None = None


@dataclass
class GameTranscript:
    game: str
    queries: list = field(default_factory=list)
    challenge: object = None
    b: int | None = None
    guess: int | None = None
    win: bool = False
    violations: list = field(default_factory=list)

    def key_queries(self, oracles):
        return [q for q in self.queries if q.oracle in oracles]


def wilson_interval(wins, trials, z=Z_SCORE):
    if trials == 0:
        return 0.0, 1.0
    p = wins / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass
class AdvantageEstimate:
    """``advantage = 2 |wins/trials - 1/2|`` with a Wilson-based radius.

    Disqualified trials count as losses, so an adversary that always
    breaks the rules shows an advantage near 1 together with a full
    violation count; read the two together.
    """

    game: str
    trials: int
    wins: int
    violations: int = 0
    transcripts: list = field(default_factory=list, repr=False)

    @property
    def win_rate(self):
        return self.wins / self.trials if self.trials else 0.0

    @property
    def advantage(self):
        return 2 * abs(self.win_rate - 0.5)

    @property
    def radius(self):
        lo, hi = wilson_interval(self.wins, self.trials)
        return 2 * max(self.win_rate - lo, hi - self.win_rate)

    @property
    def negligible(self):
        """Advantage indistinguishable from 0 at the configured z-score."""
        return self.advantage <= self.radius

    def record(self, backend, adversary=None):
        return {
            "game": self.game, "backend": backend, "adversary": adversary,
            "trials": self.trials, "wins": self.wins,
            "advantage": round(self.advantage, 6), "ci_radius": round(self.radius, 6),
            "violations": self.violations,
        }


# ---------------------------------------------------------------------------
# oracles


class Oracles:
    """Key and encryption oracles handed to an adversary for one phase."""

    def __init__(self, transcript, scheme, pp, msk, phase, key_oracle, sanitize_encryptions, rng):
        self._t = transcript
        self._scheme = scheme
        self._pp = pp
        self._msk = msk
        self._phase = phase
        self._key_oracle = key_oracle
        self._sanitize = sanitize_encryptions
        self._rng = rng
        self.policy = msk.policy

    def keygen(self, identity, role):
        role = Role(role)
        key = self._scheme.gen(self._msk, identity, role)
        self._t.queries.append(Query(self._key_oracle, self._phase, identity, role))
        return key

    def encrypt(self, identity, payload):
        s, pp = self._scheme, self._pp
        c = s.encrypt(pp, s.gen(self._msk, identity, Role.SENDER), payload, self._rng)
        self._t.queries.append(Query("E", self._phase, identity, None, bytes(payload)))
        if self._sanitize:
            c = s.sanitize(pp, s.gen(self._msk, self.policy.n + 1, Role.SANITIZER), c, self._rng)
        return c


# ---------------------------------------------------------------------------
# referees


def run_correctness(scheme, policy, trials, rng=None, message_length=DEFAULT_MESSAGE_LENGTH):
    """Count ``(i, j, m)`` with ``P(i, j) = 1`` whose round trip fails.

    One setup; ``trials`` fresh random messages per sender, each checked
    at every receiver the sender may reach.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = default_rng(rng)
    pp, msk = scheme.setup(policy, rng)
    rk = scheme.gen(msk, policy.n + 1, Role.SANITIZER)
    dks = {j: scheme.gen(msk, j, Role.RECEIVER) for j in range(1, policy.n + 1)}
    length = min(message_length, scheme.capacity(pp))
    failures = 0
    for i in range(1, policy.n + 1):
        readers = sorted(policy.writable(i))
        if not readers:
            continue
        ek = scheme.gen(msk, i, Role.SENDER)
        for _ in range(trials):
            m = rng.randbytes(length)
            c = scheme.sanitize(pp, rk, scheme.encrypt(pp, ek, m, rng), rng)
            failures += sum(scheme.decrypt(pp, dks[j], c) != m for j in readers)
    return failures


def single_identity_correctness(backend, pp, msk, messages, rng=None):
    """Round-trip failures over explicit backend-level messages."""
    rng = default_rng(rng)
    ek, dk, rk = (backend.gen(pp, msk, r) for r in (Role.SENDER, Role.RECEIVER, Role.SANITIZER))
    failures = 0
    for m in messages:
        c = backend.sanitize(pp, rk, backend.encrypt(pp, ek, m, rng), rng)
        failures += backend.decrypt(pp, dk, c) != m
    return failures


def _estimate(game, transcripts):
    wins = sum(t.win for t in transcripts)
    bad = sum(bool(t.violations) for t in transcripts)
    return AdvantageEstimate(game, len(transcripts), wins, bad, transcripts)


def no_read_violations(policy, challenge, queries):
    """Rule breaches of a No-Read transcript (empty list = legal)."""
    out = []
    ch = challenge
    n = policy.n
    if len(ch.m0) != len(ch.m1):
        out.append("challenge messages differ in length")
    if not (0 <= ch.i0 <= n and 0 <= ch.i1 <= n):
        out.append("challenge identities outside 0..n")
        return out
    readers = [q.identity for q in queries if q.oracle == "G" and q.role is Role.RECEIVER]
    payload_privacy = all(not policy.allows(ch.i0, j) and not policy.allows(ch.i1, j) for j in readers)
    anonymity = ch.m0 == ch.m1 and all(policy.allows(ch.i0, j) == policy.allows(ch.i1, j) for j in readers)
    if not (payload_privacy or anonymity):
        out.append("receiver keys break both payload privacy and sender anonymity: "
                   + ",".join(map(str, sorted(set(readers)))))
    return out


def _no_read_trial(scheme, policy, adversary, rng):
    t = GameTranscript("no-read")
    pp, msk = scheme.setup(policy, rng)

    def oracles(phase):
        return Oracles(t, scheme, pp, msk, phase, "G", False, rng)

    try:
        ch = adversary.choose(pp, oracles("pre"), rng)
    except AceError as exc:
        t.violations.append(f"adversary error before challenge: {exc}")
        return t
    t.challenge = ch
    early = no_read_violations(policy, ch, [])
    if early:
        t.violations.extend(early)
        return t
    t.b = rng.randrange(2)
    i_b, m_b = (ch.i0, ch.m0) if t.b == 0 else (ch.i1, ch.m1)
    try:
        c = scheme.encrypt(pp, scheme.gen(msk, i_b, Role.SENDER), m_b, rng)
    except AceError as exc:
        t.violations.append(f"challenge cannot be encrypted: {exc}")
        return t
    try:
        t.guess = adversary.guess(c, oracles("post"), rng)
    except AceError as exc:
        t.violations.append(f"adversary error after challenge: {exc}")
        return t
    t.violations.extend(no_read_violations(policy, ch, t.queries))
    t.win = not t.violations and t.guess == t.b
    return t


def run_no_read_game(scheme, policy, adversary, trials, rng=None):
    rng = default_rng(rng)
    return _estimate("no-read", [_no_read_trial(scheme, policy, adversary, rng) for _ in range(trials)])


def no_write_violations(policy, i_prime, queries):
    """Conditions 1-3 of the No-Write game over the logged key queries."""
    n = policy.n
    out = []
    keyq = [q for q in queries if q.oracle in ("S", "R")]
    if any(q.identity == n + 1 and q.role is Role.SANITIZER for q in keyq):
        out.append("sanitizer key was requested")
    senders = {q.identity for q in keyq if q.oracle == "S" and q.role is Role.SENDER and 1 <= q.identity <= n}
    readers = {q.identity for q in keyq if q.role is Role.RECEIVER and 1 <= q.identity <= n}
    if i_prime != 0 and i_prime not in senders:
        out.append(f"i'={i_prime} is neither 0 nor a corrupted sender")
    leaks = sorted((i, j) for i in senders for j in readers if policy.allows(i, j))
    if leaks:
        out.append("corrupted sender may legitimately write to a corrupted receiver: "
                   + ",".join(f"{i}->{j}" for i, j in leaks))
    return out


def _no_write_trial(game, scheme, policy, adversary, rng, message_length, chosen_message):
    t = GameTranscript(game)
    pp, msk = scheme.setup(policy, rng)
    n = policy.n

    def oracles(phase, kind):
        return Oracles(t, scheme, pp, msk, phase, kind, True, rng)

    try:
        ch = adversary.choose(pp, oracles("pre", "S"), rng)
    except AceError as exc:
        t.violations.append(f"adversary error before challenge: {exc}")
        return t
    t.challenge = ch
    if not 0 <= ch.i_prime <= n + 1:
        t.violations.append(f"i'={ch.i_prime} is not an identity")
        return t
    if chosen_message:
        if ch.m is None:
            t.violations.append("chosen-message game requires a message")
            return t
        r = ch.m
    else:
        r = rng.randbytes(_fit(pp, message_length))
    ek = scheme.gen(msk, ch.i_prime, Role.SENDER)
    rk = scheme.gen(msk, n + 1, Role.SANITIZER)
    t.b = rng.randrange(2)
    try:
        if t.b == 0:
            c_prime = scheme.sanitize(pp, rk, scheme.encrypt(pp, ek, r, rng), rng)
        else:
            c_prime = scheme.sanitize(pp, rk, ch.c, rng)
    except (AceError, AttributeError, TypeError) as exc:
        t.violations.append(f"challenge rejected by the referee: {exc}")
        return t
    try:
        t.guess = adversary.guess(c_prime, oracles("post", "R"), rng)
    except AceError as exc:
        t.violations.append(f"adversary error after challenge: {exc}")
        return t
    t.violations.extend(no_write_violations(policy, ch.i_prime, t.queries))
    t.win = not t.violations and t.guess == t.b
    return t


def run_no_write_game(scheme, policy, adversary, trials, rng=None,
                      message_length=DEFAULT_MESSAGE_LENGTH):
    """The fallback branch sanitizes a fresh encryption of a uniform message."""
    rng = default_rng(rng)
    ts = [_no_write_trial("no-write", scheme, policy, adversary, rng, message_length, False)
          for _ in range(trials)]
    return _estimate("no-write", ts)


def run_alt_no_write_game(scheme, policy, adversary, trials, rng=None,
                          message_length=DEFAULT_MESSAGE_LENGTH):
    """As :func:`run_no_write_game` but the fallback encrypts the adversary's message."""
    rng = default_rng(rng)
    ts = [_no_write_trial("alt-no-write", scheme, policy, adversary, rng, message_length, True)
          for _ in range(trials)]
    return _estimate("alt-no-write", ts)


# ---------------------------------------------------------------------------
# adversaries


def _fit(pp, length):
    """Clamp a message length to what the parameters can carry."""
    return min(length, AceScheme.for_params(pp).capacity(pp))


def _random_guess(rng):
    return rng.randrange(2)


def _project(c):
    """Sanitization with zero randomness; needs no key at all."""
    if isinstance(c, DhCiphertext):
        return DhSanitizedCiphertext(c.c2, c.c3)
    if isinstance(c, PaillierCiphertext):
        return PaillierSanitizedCiphertext(c.c1)
    raise TypeError(type(c).__name__)


def _surviving_component(pp_j, element, rng):
    """A component that decrypts to ``element`` if the sanitizer does nothing.

    Its alpha-strand encrypts 0 instead of the unknown ``alpha``.
    """
    if hasattr(pp_j, "group"):
        G = pp_j.group
        t = G.random_scalar(rng)
        return DhCiphertext(1, 1, G.exp(t), element * arith.powmod(pp_j.h, t, G.p) % G.p)
    u = pp_j.modulus.random_unit_mod_n(rng)
    return PaillierCiphertext(1, (1 + element * pp_j.N) * arith.powmod(u, pp_j.N, pp_j.N2) % pp_j.N2)


class CoinFlipNoRead:
    """Legal challenge, random guess.  ``mode`` picks the win branch exercised."""

    name = "coin-flip"

    def __init__(self, mode="payload", length=DEFAULT_MESSAGE_LENGTH):
        if mode not in ("payload", "anonymity"):
            raise ValueError(mode)
        self.mode = mode
        self.length = length

    def choose(self, pp, oracles, rng):
        n = oracles.policy.n
        m0 = rng.randbytes(_fit(pp, self.length))
        if self.mode == "payload":
            m1 = bytes(b ^ 0xFF for b in m0)
            return NoReadChallenge(m0, m1, n, n)
        return NoReadChallenge(m0, m0, rng.randrange(n + 1), rng.randrange(n + 1))

    def guess(self, c, oracles, rng):
        return _random_guess(rng)


class LegalDecryptor:
    """Asks for a key that may read the challenge, then reads it.

    Always guesses right and is always disqualified.
    """

    name = "legal-decryptor"

    def __init__(self, length=DEFAULT_MESSAGE_LENGTH):
        self.length = length

    def choose(self, pp, oracles, rng):
        policy = oracles.policy
        self.i = next(i for i in range(1, policy.n + 1) if policy.writable(i))
        self.j = min(policy.writable(self.i))
        self.pp = pp
        self.dk = oracles.keygen(self.j, Role.RECEIVER)
        self.rk = oracles.keygen(policy.n + 1, Role.SANITIZER)
        self.m0 = rng.randbytes(_fit(pp, self.length))
        self.m1 = bytes(b ^ 0xFF for b in self.m0)
        return NoReadChallenge(self.m0, self.m1, self.i, self.i)

    def guess(self, c, oracles, rng):
        scheme = AceScheme.for_params(self.pp)
        m = scheme.decrypt(self.pp, self.dk, scheme.sanitize(self.pp, self.rk, c, rng))
        return 1 if m == self.m1 else 0


class SanitizerKeyAbuser:
    """Treats the sanitizer key as a decryption key on the raw challenge.

    Legal under payload privacy (the sanitizer key may be requested); it
    only succeeds when the sanitizer key really is a decryption key.
    """

    name = "san-key-abuser"

    def __init__(self, length=DEFAULT_MESSAGE_LENGTH):
        self.length = length

    def choose(self, pp, oracles, rng):
        policy = oracles.policy
        self.pp = pp
        self.rk = oracles.keygen(policy.n + 1, Role.SANITIZER)
        # a sender who writes somewhere; no receiver keys are requested
        self.i = next(i for i in range(1, policy.n + 1) if policy.writable(i))
        self.j = min(policy.writable(self.i))
        self.m0 = rng.randbytes(_fit(pp, self.length))
        self.m1 = bytes(b ^ 0xFF for b in self.m0)
        return NoReadChallenge(self.m0, self.m1, self.i, self.i)

    def guess(self, c, oracles, rng):
        scheme = AceScheme.for_params(self.pp)
        pp_j = self.pp.instances[self.j - 1]
        k = self.rk.keys[self.j - 1]
        if isinstance(k, DhSanKey):
            dk = DhDecKey(k.neg_alpha)
        elif isinstance(k, PaillierSanKey):
            dk = types.SimpleNamespace(lam=k.neg_alpha)
        else:
            return _random_guess(rng)
        try:
            m = scheme.backend.decode(pp_j, scheme.backend.decrypt(pp_j, dk, _project(c.components[self.j - 1])))
        except (ZeroDivisionError, ArithmeticError, AceError):
            m = None
        if m == self.m0:
            return 0
        if m == self.m1:
            return 1
        return _random_guess(rng)


class CoinFlipNoWrite:
    """Submits a rightless encryption as ``i' = 0`` and guesses at random."""

    name = "coin-flip"

    def __init__(self, length=DEFAULT_MESSAGE_LENGTH):
        self.length = length

    def choose(self, pp, oracles, rng):
        scheme = AceScheme.for_params(pp)
        m = rng.randbytes(_fit(pp, self.length))
        return NoWriteChallenge(scheme.encrypt(pp, IDENTITY_ZERO, m, rng), 0, m)

    def guess(self, c, oracles, rng):
        return _random_guess(rng)


def _colluding_pair(policy, sender, receiver):
    if receiver is None:
        receiver = 1
    if sender is None:
        blocked = [i for i in range(1, policy.n + 1) if not policy.allows(i, receiver)]
        sender = blocked[0] if blocked else 0
    elif sender and policy.allows(sender, receiver):
        raise UsageError(f"P({sender},{receiver}) = 1: not a colluding pair")
    return sender, receiver


class EmbeddingColluder:
    """Corrupt sender and receiver try to push a marker through the sanitizer.

    The receiver's position carries a ciphertext whose alpha-strand
    encrypts 0; the marker survives only if sanitization skips the
    ``s1`` blinding.  The receiver guesses ``b = 1`` iff it sees the marker.
    ``sender=0`` plays the rightless sender holding no encryption key.
    """

    name = "embedding-colluder"

    def __init__(self, sender=None, receiver=None, length=DEFAULT_MESSAGE_LENGTH):
        self.sender = sender
        self.receiver = receiver
        self.length = length

    def choose(self, pp, oracles, rng):
        policy = oracles.policy
        self.i, self.j = _colluding_pair(policy, self.sender, self.receiver)
        ek = oracles.keygen(self.i, Role.SENDER) if self.i else IDENTITY_ZERO
        self.dk = oracles.keygen(self.j, Role.RECEIVER)
        self.pp = pp
        scheme = AceScheme.for_params(pp)
        self.marker = rng.randbytes(_fit(pp, self.length))
        cover = scheme.encrypt(pp, ek, self.marker, rng)
        pp_j = pp.instances[self.j - 1]
        comps = list(cover.components)
        comps[self.j - 1] = _surviving_component(pp_j, scheme.backend.encode(pp_j, self.marker), rng)
        return NoWriteChallenge(MultiCiphertext(tuple(comps)), self.i, self.marker)

    def guess(self, c, oracles, rng):
        scheme = AceScheme.for_params(self.pp)
        return int(scheme.decrypt(self.pp, self.dk, c) == self.marker)


class HonestReplay:
    """Submits an honest encryption of its own message under a corrupted sender."""

    name = "honest-replay"

    def __init__(self, sender=None, receiver=None, length=DEFAULT_MESSAGE_LENGTH):
        self.sender = sender
        self.receiver = receiver
        self.length = length

    def choose(self, pp, oracles, rng):
        policy = oracles.policy
        self.i, self.j = _colluding_pair(policy, self.sender, self.receiver)
        ek = oracles.keygen(self.i, Role.SENDER) if self.i else IDENTITY_ZERO
        self.dk = oracles.keygen(self.j, Role.RECEIVER)
        self.pp = pp
        self.m = rng.randbytes(_fit(pp, self.length))
        c = AceScheme.for_params(pp).encrypt(pp, ek, self.m, rng)
        return NoWriteChallenge(c, self.i, self.m)

    def guess(self, c, oracles, rng):
        scheme = AceScheme.for_params(self.pp)
        return int(scheme.decrypt(self.pp, self.dk, c) == self.m)


# ---------------------------------------------------------------------------
# negative controls (INSECURE)


class NoopSanitizerScheme(AceScheme):
    """INSECURE: sanitizes with zero randomness, so the input passes through."""

    insecure = True

    def sanitize(self, pp, rk, c, rng=None, *, coins=None):
        return super().sanitize(pp, rk, c, rng, coins=[self.backend.zero_coins] * pp.n)


class LeakySanitizerKeyScheme(AceScheme):
    """INSECURE: the sanitizer key components are the decryption exponents."""

    insecure = True

    def gen(self, msk, identity, role):
        key = super().gen(msk, identity, role)
        if Role(role) is not Role.SANITIZER:
            return key
        leaked = []
        for _, dk, _ in msk.keys:
            if isinstance(dk, DhDecKey):
                leaked.append(DhSanKey(dk.neg_x))
            else:
                leaked.append(PaillierSanKey(dk.lam))
        return MultiSanKey(tuple(leaked))


class MismatchedDecryptionKeyScheme(AceScheme):
    """Broken on purpose: receiver ``j`` is handed the key of another instance."""

    insecure = True

    def gen(self, msk, identity, role):
        key = super().gen(msk, identity, role)
        if Role(role) is Role.RECEIVER and isinstance(key, MultiDecKey):
            n = msk.policy.n
            if n == 1:
                pp1, msk1 = self.backend.setup()
                return MultiDecKey(identity, self.backend.gen(pp1, msk1, Role.RECEIVER))
            return MultiDecKey(identity, msk.keys[identity % n][1])
        return key


# ---------------------------------------------------------------------------
# exhaustive sanitizer images


@dataclass(frozen=True)
class ImageReport:
    cases: int
    distinct: int
    verdict: str
    predicted: str
    plaintexts: frozenset
    counts: Counter = field(repr=False, compare=False)

    @property
    def consistent(self):
        return self.verdict == self.predicted


MAX_EXHAUSTIVE_Q = 64
MAX_EXHAUSTIVE_N = 35


def discrete_log(group, value):
    """Brute force; tiny groups only."""
    acc = 1
    for k in range(group.q):
        if acc == value:
            return k
        acc = acc * group.g % group.p
    raise ValueError("value is not in the subgroup")


def exhaustive_sanitizer_image(pp, msk, c):
    """Enumerate every ``(s1, s2)`` for one DH ciphertext.

    ``verdict`` is ``"uniform"`` when every pair of ``G x G`` is hit exactly
    once, ``"degenerate"`` when exactly ``q`` pairs are each hit ``q``
    times, otherwise ``"other"``.  ``predicted`` comes from the exponent
    relation ``delta1 - x delta0 == alpha``.
    """
    from . import dh

    G = pp.group
    if G.q > MAX_EXHAUSTIVE_Q:
        raise UsageError(f"q = {G.q} too large to enumerate (limit {MAX_EXHAUSTIVE_Q})")
    rk = dh.gen(pp, msk, Role.SANITIZER)
    dk = dh.gen(pp, msk, Role.RECEIVER)
    counts = Counter()
    plaintexts = set()
    for s1 in range(G.q):
        for s2 in range(G.q):
            out = dh.sanitize(pp, rk, c, coins=(s1, s2))
            counts[tuple(out)] += 1
            plaintexts.add(dh.decrypt(pp, dk, out))
    q = G.q
    if len(counts) == q * q and set(counts.values()) == {1}:
        verdict = "uniform"
    elif len(counts) == q and set(counts.values()) == {q}:
        verdict = "degenerate"
    else:
        verdict = "other"
    d0, d1 = discrete_log(G, c.c0), discrete_log(G, c.c1)
    predicted = "degenerate" if (d1 - msk.x * d0 - msk.alpha) % q == 0 else "uniform"
    return ImageReport(q * q, len(counts), verdict, predicted, frozenset(plaintexts), counts)


def uniform_paillier_reference(pp):
    """Multiset ``{(1 + gamma N) u^N}`` over ``Z_N x Z_N^*``."""
    from .paillier import paillier_encrypt

    return Counter(paillier_encrypt(pp, g, u) for g in range(pp.N) for u in pp.modulus.units_mod_n())


def exhaustive_paillier_image(pp, msk, c):
    """Enumerate every ``(beta, s)`` for one Paillier ciphertext.

    ``verdict``: ``"uniform"`` when the output multiset equals the uniform
    reference, ``"survives"`` when every output decrypts to the plaintext
    of ``c1``, otherwise ``"other"``.  ``predicted`` uses ``delta0 = alpha``
    for survival and invertibility of ``delta0 - alpha`` for uniformity.
    """
    from . import paillier

    N = pp.N
    if N > MAX_EXHAUSTIVE_N:
        raise UsageError(f"N = {N} too large to enumerate (limit {MAX_EXHAUSTIVE_N})")
    rk = paillier.gen(pp, msk, Role.SANITIZER)
    dk = paillier.gen(pp, msk, Role.RECEIVER)
    units = pp.modulus.units_mod_n()
    counts = Counter()
    plaintexts = set()
    for beta in range(N):
        for s in units:
            out = paillier.sanitize(pp, rk, c, coins=(beta, s))
            counts[out.cp] += 1
            plaintexts.add(paillier.decrypt(pp, dk, out))
    d0 = paillier.decrypt(pp, dk, PaillierSanitizedCiphertext(c.c0))
    d1 = paillier.decrypt(pp, dk, PaillierSanitizedCiphertext(c.c1))
    if counts == uniform_paillier_reference(pp):
        verdict = "uniform"
    elif plaintexts == {d1}:
        verdict = "survives"
    else:
        verdict = "other"
    if d0 == msk.alpha:
        predicted = "survives"
    elif math.gcd(d0 - msk.alpha, N) == 1:
        predicted = "uniform"
    else:
        predicted = "other"
    return ImageReport(N * len(units), len(counts), verdict, predicted, frozenset(plaintexts), counts)
