# ---
# jupyter:
#   jupytext:
#     text_representation:
#       extension: .py
#       format_name: light
# ---

# # One sender, one receiver, one sanitizer
#
# The smallest interesting case. We work in the order-11 subgroup of
# Z_23^* so every number below can be checked by hand.

# +
import random

from ace import GroupParams, Role, dh

G = GroupParams(p=23, q=11, g=2)
pp = dh.DhPublicParams(G, h=G.exp(3))
msk = dh.DhMasterKey(alpha=5, x=3)
ek, dk, rk = (dh.gen(pp, msk, role) for role in Role)
print("h =", pp.h, " ek =", ek, " dk =", dk, " rk =", rk)
# -

# A ciphertext is two ElGamal encryptions: one of g^alpha (the sender's
# credential) and one of the message.

c = dh.encrypt(pp, ek, 4, coins=(2, 3))
print("ciphertext:", tuple(c))

# The sanitizer folds the credential strand into the message strand.
# With the right alpha that strand encrypts 1 and the message survives;
# otherwise it multiplies the message by a random power.

cs = dh.sanitize(pp, rk, c, coins=(1, 0))
print("sanitized:", tuple(cs), "->", dh.decrypt(pp, dk, cs))

# Sanitizing the same ciphertext with every pair (s1, s2) gives 121
# outputs. For an honest ciphertext they all decrypt to 4.

from ace import games

rep = games.exhaustive_sanitizer_image(pp, msk, c)
print(rep.verdict, "| distinct outputs:", rep.distinct, "| plaintexts:", set(rep.plaintexts))

# A forged ciphertext (wrong alpha) is mapped onto all of G x G exactly
# once, so the receiver sees a uniformly random pair.

forged = dh.DhCiphertext(4, 4, 8, 1)
rep = games.exhaustive_sanitizer_image(pp, msk, forged)
print(rep.verdict, "| distinct outputs:", rep.distinct)

# The same picture at a realistic size, with byte payloads.

# +
rng = random.Random(0)
be = dh.DhBackend.generate(256, rng)
pp, msk = be.setup(rng)
ek, dk, rk = (be.gen(pp, msk, role) for role in Role)
c = be.encrypt(pp, ek, be.encode(pp, b"hello"), rng)
print(be.decode(pp, be.decrypt(pp, dk, be.sanitize(pp, rk, c, rng))))
print("capacity:", be.capacity(pp), "bytes per ciphertext")
# -
