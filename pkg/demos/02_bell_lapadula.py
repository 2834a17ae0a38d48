# ---
# jupyter:
#   jupytext:
#     text_representation:
#       extension: .py
#       format_name: light
# ---

# # Three clearance levels
#
# Level 1 is the most trusted. Under Bell-LaPadula a sender at level i
# may write to receivers at levels j <= i (no write down, no read up),
# so P(i, j) = 1 iff i >= j.

# +
import random

from ace import AceScheme, DhBackend, PaillierBackend, Role, bell_lapadula

policy = bell_lapadula(3)
print(policy.to_text())
# -

rng = random.Random(1)
scheme = AceScheme(DhBackend.generate(256, rng))
pp, msk = scheme.setup(policy, rng)
rk = scheme.gen(msk, policy.n + 1, Role.SANITIZER)
receivers = {j: scheme.gen(msk, j, Role.RECEIVER) for j in range(1, 4)}

# Every sender broadcasts; every receiver tries to read. Identity 0 has
# no rights at all and can only produce noise.

for i in range(0, 4):
    c = scheme.sanitize(pp, rk, scheme.encrypt(pp, scheme.gen(msk, i, Role.SENDER), b"from %d" % i, rng), rng)
    row = [scheme.decrypt(pp, receivers[j], c) for j in range(1, 4)]
    print(f"sender {i}:", ["-" if m is None else m.decode() for m in row])

# Ciphertexts grow linearly: one single-identity ciphertext per receiver.

data = scheme.ciphertext_to_bytes(pp, scheme.encrypt(pp, scheme.gen(msk, 2, Role.SENDER), b"x", rng))
print(len(data), "bytes =", pp.n, "x", scheme.backend.ciphertext_size(pp.instances[0]), "+ 4 header")

# The Paillier instantiation works the same way; each receiver slot
# has its own modulus.

scheme = AceScheme(PaillierBackend(256))
pp, msk = scheme.setup(policy, rng)
rk = scheme.gen(msk, 4, Role.SANITIZER)
c = scheme.sanitize(pp, rk, scheme.encrypt(pp, scheme.gen(msk, 3, Role.SENDER), b"paillier", rng), rng)
print([scheme.decrypt(pp, scheme.gen(msk, j, Role.RECEIVER), c) for j in (1, 2, 3)])
