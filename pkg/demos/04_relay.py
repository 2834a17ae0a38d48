# ---
# jupyter:
#   jupytext:
#     text_representation:
#       extension: .py
#       format_name: light
# ---

# # A sanitizing relay on localhost
#
# The relay holds only the sanitizer key. Senders submit ciphertexts,
# the relay sanitizes and appends them to a log, and every subscriber
# gets the same broadcast frames.

# +
import asyncio
import os
import random
import tempfile
import threading

from ace import AceScheme, DhBackend, Role, bell_lapadula, relay

rng = random.Random(3)
scheme = AceScheme(DhBackend.generate(256, rng))
pp, msk = scheme.setup(bell_lapadula(3), rng)
rk = scheme.gen(msk, 4, Role.SANITIZER)
# -

# Run the asyncio server on a background loop.

# +
loop = asyncio.new_event_loop()
threading.Thread(target=loop.run_forever, daemon=True).start()
logfile = tempfile.NamedTemporaryFile(suffix=".log", delete=False).name
server = relay.Relay(pp, rk, relay.BroadcastLog(logfile))
asyncio.run_coroutine_threadsafe(server.start("127.0.0.1", 0), loop).result()
print("relay at", server.address)
# -

for sender, text in [(2, b"status: green"), (3, b"orders for level 3"), (1, b"top secret")]:
    c = scheme.encrypt(pp, scheme.gen(msk, sender, Role.SENDER), text, rng)
    print("sender", sender, "-> sequence", relay.submit(server.address, pp, c))

# Replay the log as receiver 2. Level-2 recipients read what levels 2
# and 3 wrote; the level-1 message is noise to them.

# +
dk2 = scheme.gen(msk, 2, Role.RECEIVER)
for seq, data in relay.subscribe(server.address, 1):
    print(seq, scheme.decrypt(pp, dk2, scheme.sanitized_from_bytes(pp, data)))
    if seq == 3:
        break

asyncio.run_coroutine_threadsafe(server.stop(), loop).result()
loop.call_soon_threadsafe(loop.stop)
os.remove(logfile)
# -
