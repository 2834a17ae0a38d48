# ---
# jupyter:
#   jupytext:
#     text_representation:
#       extension: .py
#       format_name: light
# ---

# # Playing the security games
#
# Each game is refereed: the adversary's key queries are logged and a
# transcript that breaks the rules counts as a loss. We estimate the
# advantage 2|Pr[win] - 1/2| and call it negligible when it sits inside
# a 3-sigma Wilson interval around 0.

# +
import random

from ace import AceScheme, DhBackend, bell_lapadula, games

rng = random.Random(2)
backend = DhBackend.generate(128, rng)
policy = bell_lapadula(3)
real = AceScheme(backend)


def show(label, est):
    flag = "negligible" if est.negligible else "NOT negligible"
    print(f"{label:40s} adv={est.advantage:.3f} radius={est.radius:.3f} violations={est.violations:4d} {flag}")
# -

# Baseline: adversaries that guess at random.

show("no-read, coin flip", games.run_no_read_game(real, policy, games.CoinFlipNoRead(), 1000, rng))
show("no-write, coin flip", games.run_no_write_game(real, policy, games.CoinFlipNoWrite(), 1000, rng))

# A colluding sender and receiver try to push a marker past the
# sanitizer. Against the real scheme the marker is destroyed.

show("no-write, embedding colluder", games.run_no_write_game(real, policy, games.EmbeddingColluder(), 1000, rng))

# Swap in a sanitizer that skips re-randomization and the same adversary
# wins every time. This variant is INSECURE and exists only as a control.

noop = games.NoopSanitizerScheme(backend)
show("no-write, colluder vs no-op sanitizer", games.run_no_write_game(noop, policy, games.EmbeddingColluder(), 1000, rng))

# Likewise a sanitizer key that doubles as a decryption key breaks
# payload privacy.

leaky = games.LeakySanitizerKeyScheme(backend)
show("no-read, key abuser vs real", games.run_no_read_game(real, policy, games.SanitizerKeyAbuser(), 1000, rng))
show("no-read, key abuser vs leaky key", games.run_no_read_game(leaky, policy, games.SanitizerKeyAbuser(), 1000, rng))

# An adversary that simply asks for a key it is not allowed to hold
# always reads the challenge, and is always disqualified.

show("no-read, legal decryptor", games.run_no_read_game(real, policy, games.LegalDecryptor(), 200, rng))
