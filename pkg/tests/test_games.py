import random

from hypothesis import given, settings, strategies as st
import pytest

from ace import dh, games, paillier
from ace.arith import PaillierModulus
from ace.common import Role, UsageError
from ace.dh import DhBackend
from ace.multi import AceScheme, bell_lapadula
from ace.paillier import PaillierBackend


@pytest.fixture(scope="module")
def dh_scheme(group128):
    return AceScheme(DhBackend(group128))


def test_wilson_interval_bounds():
    lo, hi = games.wilson_interval(50, 100)
    assert lo < 0.5 < hi
    assert games.wilson_interval(0, 100)[0] == 0.0
    assert games.wilson_interval(100, 100)[1] == pytest.approx(1.0)
    assert games.wilson_interval(0, 0) == (0.0, 1.0)


def test_advantage_estimate():
    est = games.AdvantageEstimate("g", 1000, 500)
    assert est.advantage == 0 and est.negligible
    est = games.AdvantageEstimate("g", 1000, 950)
    assert est.advantage == pytest.approx(0.9) and not est.negligible
    rec = est.record("dh", "x")
    assert rec["wins"] == 950 and rec["adversary"] == "x"


def test_no_read_rules():
    P = bell_lapadula(3)
    q = lambda j: games.Query("G", "pre", j, Role.RECEIVER)
    ch = games.NoReadChallenge(b"aa", b"bb", 3, 3)
    # receiver 1 may read sender 3
    assert games.no_read_violations(P, ch, [q(1)])
    assert not games.no_read_violations(P, games.NoReadChallenge(b"aa", b"bb", 1, 1), [q(2), q(3)])
    # anonymity: same message, receiver 1 reads both senders
    assert not games.no_read_violations(P, games.NoReadChallenge(b"aa", b"aa", 2, 3), [q(1)])
    assert games.no_read_violations(P, games.NoReadChallenge(b"aa", b"aa", 1, 3), [q(2)])
    assert games.no_read_violations(P, games.NoReadChallenge(b"a", b"bb", 1, 1), [])


def test_no_write_rules():
    P = bell_lapadula(3)
    S = lambda i: games.Query("S", "pre", i, Role.SENDER)
    R = lambda j, o="R": games.Query(o, "post", j, Role.RECEIVER)
    assert not games.no_write_violations(P, 1, [S(1), R(2)])
    assert games.no_write_violations(P, 2, [S(2), R(1)])
    assert games.no_write_violations(P, 3, [S(1)])
    assert not games.no_write_violations(P, 0, [R(3)])
    assert games.no_write_violations(P, 0, [games.Query("S", "pre", 4, Role.SANITIZER)])


def test_queries_are_logged(dh_scheme):
    t = games.GameTranscript("x")
    pp, msk = dh_scheme.setup(bell_lapadula(2), random.Random(0))
    o = games.Oracles(t, dh_scheme, pp, msk, "pre", "G", False, random.Random(1))
    o.keygen(1, Role.RECEIVER)
    o.encrypt(2, b"hi")
    assert [(q.oracle, q.identity) for q in t.queries] == [("G", 1), ("E", 2)]


def test_correctness_real_and_broken(dh_scheme):
    P = bell_lapadula(3)
    assert games.run_correctness(dh_scheme, P, 20, random.Random(0)) == 0
    broken = games.MismatchedDecryptionKeyScheme(dh_scheme.backend)
    assert games.run_correctness(broken, P, 20, random.Random(0)) == 20 * 6


def test_single_identity_correctness(dh_instance):
    pp, msk = dh_instance
    be = DhBackend(pp.group)
    msgs = [pp.group.exp(k) for k in range(1, 30)]
    assert games.single_identity_correctness(be, pp, msk, msgs, random.Random(0)) == 0


def test_legal_decryptor_is_disqualified(dh_scheme):
    est = games.run_no_read_game(dh_scheme, bell_lapadula(3), games.LegalDecryptor(), 30, random.Random(0))
    assert est.violations == 30 and est.wins == 0


def test_leaky_sanitizer_key_is_caught(dh_scheme):
    leaky = games.LeakySanitizerKeyScheme(dh_scheme.backend)
    est = games.run_no_read_game(leaky, bell_lapadula(3), games.SanitizerKeyAbuser(), 100, random.Random(1))
    assert est.violations == 0 and est.advantage > 0.9


def test_leaky_sanitizer_key_caught_paillier():
    leaky = games.LeakySanitizerKeyScheme(PaillierBackend(128))
    est = games.run_no_read_game(leaky, bell_lapadula(2), games.SanitizerKeyAbuser(), 60, random.Random(2))
    assert est.advantage > 0.9


@pytest.mark.parametrize("runner", [games.run_no_write_game, games.run_alt_no_write_game])
def test_noop_sanitizer_is_caught(dh_scheme, runner):
    noop = games.NoopSanitizerScheme(dh_scheme.backend)
    est = runner(noop, bell_lapadula(3), games.EmbeddingColluder(), 100, random.Random(3))
    assert est.violations == 0 and est.advantage > 0.9


def test_noop_sanitizer_caught_paillier():
    noop = games.NoopSanitizerScheme(PaillierBackend(128))
    est = games.run_no_write_game(noop, bell_lapadula(2), games.EmbeddingColluder(), 60, random.Random(4))
    assert est.advantage > 0.9


def test_colluder_pairs():
    P = bell_lapadula(3)
    assert games._colluding_pair(P, None, None) == (0, 1)
    assert games._colluding_pair(P, None, 2) == (1, 2)
    with pytest.raises(UsageError):
        games._colluding_pair(P, 3, 1)


def test_explicit_colluder_is_legal(dh_scheme):
    est = games.run_no_write_game(dh_scheme, bell_lapadula(3), games.EmbeddingColluder(sender=1, receiver=3),
                                  50, random.Random(5))
    assert est.violations == 0


def test_exhaustive_dh_image(tiny_group):
    pp = dh.DhPublicParams(tiny_group, 8)
    msk = dh.DhMasterKey(alpha=5, x=3)
    honest = dh.encrypt(pp, dh.gen(pp, msk, Role.SENDER), 4, coins=(2, 3))
    rep = games.exhaustive_sanitizer_image(pp, msk, honest)
    assert rep.verdict == rep.predicted == "degenerate" and rep.plaintexts == {4}
    bogus = dh.DhCiphertext(4, 4, 8, 1)
    rep = games.exhaustive_sanitizer_image(pp, msk, bogus)
    assert rep.verdict == rep.predicted == "uniform" and rep.distinct == 121


def test_exhaustive_refuses_large_groups(dh_instance):
    pp, msk = dh_instance
    with pytest.raises(UsageError):
        games.exhaustive_sanitizer_image(pp, msk, dh.DhCiphertext(1, 1, 1, 1))


def test_paillier_uniform_reference_size():
    pp = paillier.PaillierPublicParams(PaillierModulus(15))
    ref = games.uniform_paillier_reference(pp)
    assert sum(ref.values()) == 15 * 8
    assert len(ref) == 15 * 8  # the map is a bijection onto units mod N^2


def test_paillier_image_matches_gcd_rule():
    """Uniform exactly when delta0 - alpha is a unit mod N."""
    mod = PaillierModulus(15, 3, 5)
    pp = paillier.PaillierPublicParams(mod.public)
    msk = paillier.PaillierMasterKey(mod, 7)
    for d0 in range(15):
        c = paillier.PaillierCiphertext(paillier.paillier_encrypt(pp, d0, 2), paillier.paillier_encrypt(pp, 3, 4))
        rep = games.exhaustive_paillier_image(pp, msk, c)
        assert rep.consistent, (d0, rep.verdict, rep.predicted)


def test_image_verdict_matches_predicate_random(tiny_group):
    rng = random.Random(12)
    seen = set()
    for _ in range(100):
        pp, msk = dh.setup(tiny_group, rng)
        if rng.random() < 0.3:
            c = dh.encrypt(pp, dh.gen(pp, msk, Role.SENDER), tiny_group.random_element(rng), rng)
        else:
            c = dh.DhCiphertext(*(tiny_group.random_element(rng) for _ in range(4)))
        rep = games.exhaustive_sanitizer_image(pp, msk, c)
        assert rep.consistent
        seen.add(rep.verdict)
    assert seen == {"uniform", "degenerate"}


def test_degenerate_counts_and_trivial_case(tiny_group):
    pp, msk = dh.setup(tiny_group, random.Random(13))
    c = dh.DhCiphertext(1, tiny_group.exp(msk.alpha), 1, tiny_group.exp(4))
    rep = games.exhaustive_sanitizer_image(pp, msk, c)
    assert rep.verdict == "degenerate"
    assert rep.distinct == 11 and set(rep.counts.values()) == {11}


def test_alt_branches_identical_in_tiny_group(tiny_group):
    """Sanitizing a fixed honest encryption matches sanitizing a fresh one."""
    from collections import Counter
    pp, msk = dh.setup(tiny_group, random.Random(14))
    ek, rk = dh.gen(pp, msk, Role.SENDER), dh.gen(pp, msk, Role.SANITIZER)
    q, m = tiny_group.q, tiny_group.exp(3)
    fixed = dh.encrypt(pp, ek, m, coins=(4, 7))
    one = Counter(tuple(dh.sanitize(pp, rk, fixed, coins=(s1, s2))) for s1 in range(q) for s2 in range(q))
    fresh = Counter()
    for r1 in range(q):
        for r2 in range(q):
            c = dh.encrypt(pp, ek, m, coins=(r1, r2))
            fresh.update(tuple(dh.sanitize(pp, rk, c, coins=(s1, s2))) for s1 in range(q) for s2 in range(q))
    assert {k: v * q * q for k, v in one.items()} == dict(fresh)


def test_paillier_case_count():
    mod = PaillierModulus(15, 3, 5)
    pp = paillier.PaillierPublicParams(mod.public)
    msk = paillier.PaillierMasterKey(mod, 7)
    c = paillier.encrypt(pp, paillier.gen(pp, msk, Role.SENDER), 2, coins=(2, 4))
    rep = games.exhaustive_paillier_image(pp, msk, c)
    assert rep.cases == 15 * 8 and rep.verdict == "survives" and rep.plaintexts == {2}


def test_paillier_exhaustive_correctness_via_harness():
    mod = PaillierModulus(15, 3, 5)
    pp = paillier.PaillierPublicParams(mod.public)
    msk = paillier.PaillierMasterKey(mod, 4)
    be = PaillierBackend(4, primes=(3, 5))
    assert games.single_identity_correctness(be, pp, msk, range(15), random.Random(0)) == 0


@settings(max_examples=200)
@given(st.sets(st.integers(1, 3)), st.sets(st.integers(1, 3)), st.integers(0, 3), st.booleans())
def test_no_write_referee_property(senders, readers, i_prime, asks_sanitizer):
    P = bell_lapadula(3)
    qs = [games.Query("S", "pre", i, Role.SENDER) for i in senders]
    qs += [games.Query("R", "post", j, Role.RECEIVER) for j in readers]
    if asks_sanitizer:
        qs.append(games.Query("S", "pre", 4, Role.SANITIZER))
    legal = (not asks_sanitizer and (i_prime == 0 or i_prime in senders)
             and all(i < j for i in senders for j in readers))
    assert (not games.no_write_violations(P, i_prime, qs)) == legal
