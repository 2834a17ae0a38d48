"""The sanitizer as a broadcast relay.

Clients speak length-prefixed frames over TCP::

    magic(2) = AC E0 | version(1) = 01 | type(1) | sequence(8, BE) | length(4, BE) | payload

A SUBMIT carries a serialized multi-identity ciphertext.  The relay
sanitizes it with the sanitizer key, appends the result to an
append-only log and pushes a BROADCAST frame with the same bytes to
every subscriber, then ACKs the submitter with the assigned sequence
number.  The relay keeps no sender identity: the log file is nothing but
BROADCAST frames.
"""

import asyncio
from dataclasses import dataclass
import enum
import logging
import os
import signal
import socket
import struct
import time

from . import wire
from .common import AceError
from .multi import AceScheme, MultiCiphertext

log = logging.getLogger(__name__)

MAGIC = b"\xac\xe0"
VERSION = 1
HEADER = struct.Struct(">2sBBQI")
DEFAULT_MAX_PAYLOAD = 1 << 20


class FrameType(enum.IntEnum):
    SUBMIT = 1
    BROADCAST = 2
    SUBSCRIBE = 3
    ACK = 4
    ERR = 5


class ErrorCode(enum.IntEnum):
    MALFORMED = 1
    TOO_LARGE = 2
    INVALID_CIPHERTEXT = 3
    BAD_REQUEST = 4
    BUSY = 5


class FrameError(Exception):
    def __init__(self, message, code=ErrorCode.MALFORMED, declared_length=0):
        super().__init__(message)
        self.code = code
        self.declared_length = declared_length


class RelayError(AceError):
    """The relay answered with an ERR frame."""

    def __init__(self, code, message):
        super().__init__(f"{code.name}: {message}")
        self.code = code


@dataclass(frozen=True)
class Frame:
    type: FrameType
    seq: int = 0
    payload: bytes = b""

    def to_bytes(self):
        return HEADER.pack(MAGIC, VERSION, self.type, self.seq, len(self.payload)) + self.payload

    @staticmethod
    def parse_header(data, max_payload=None):
        magic, version, ftype, seq, length = HEADER.unpack(data)
        if magic != MAGIC:
            raise FrameError("bad magic")
        if version != VERSION:
            raise FrameError(f"unsupported version {version}")
        try:
            ftype = FrameType(ftype)
        except ValueError:
            raise FrameError(f"unknown frame type {ftype}") from None
        if max_payload is not None and length > max_payload:
            raise FrameError(f"payload of {length} bytes exceeds limit {max_payload}",
                             ErrorCode.TOO_LARGE, length)
        return ftype, seq, length

    @classmethod
    def from_bytes(cls, data, max_payload=None):
        if len(data) < HEADER.size:
            raise FrameError("truncated header")
        ftype, seq, length = cls.parse_header(data[:HEADER.size], max_payload)
        payload = data[HEADER.size:]
        if len(payload) != length:
            raise FrameError("payload length mismatch")
        return cls(ftype, seq, bytes(payload))


def error_frame(code, message):
    return Frame(FrameType.ERR, 0, bytes([code]) + message.encode())


def parse_error(frame):
    code = ErrorCode(frame.payload[0]) if frame.payload else ErrorCode.MALFORMED
    return RelayError(code, frame.payload[1:].decode(errors="replace"))


def iter_frames(data):
    """Split a byte string of back-to-back frames; returns (frames, consumed bytes)."""
    frames, off = [], 0
    while off + HEADER.size <= len(data):
        ftype, seq, length = Frame.parse_header(data[off:off + HEADER.size])
        end = off + HEADER.size + length
        if end > len(data):
            break
        frames.append(Frame(ftype, seq, data[off + HEADER.size:end]))
        off = end
    return frames, off


# ---------------------------------------------------------------------------
# broadcast log


@dataclass(frozen=True)
class LogEntry:
    seq: int
    timestamp: float
    data: bytes

    def frame(self):
        return Frame(FrameType.BROADCAST, self.seq, self.data)


class BroadcastLog:
    """Append-only sequence of sanitized ciphertexts, optionally file-backed.

    Timestamps are kept in memory only; entries replayed from disk carry
    the replay time.
    """

    def __init__(self, path=None):
        self.path = path
        self.entries = []
        if path is not None and os.path.exists(path):
            self._replay()

    def _replay(self):
        with open(self.path, "rb") as fh:
            data = fh.read()
        frames, used = iter_frames(data)
        now = time.time()
        for expected, f in enumerate(frames, 1):
            if f.type is not FrameType.BROADCAST or f.seq != expected:
                raise FrameError(f"corrupt broadcast log at sequence {expected}")
            self.entries.append(LogEntry(f.seq, now, f.payload))
        if used != len(data):
            log.warning("dropping %d bytes of torn frame at end of %s", len(data) - used, self.path)
            with open(self.path, "r+b") as fh:
                fh.truncate(used)

    @property
    def last_sequence(self):
        return len(self.entries)

    def append(self, data):
        entry = LogEntry(len(self.entries) + 1, time.time(), bytes(data))
        if self.path is not None:
            with open(self.path, "ab") as fh:
                fh.write(entry.frame().to_bytes())
                fh.flush()
                os.fsync(fh.fileno())
        self.entries.append(entry)
        return entry

    def since(self, seq):
        return self.entries[max(seq, 1) - 1:]

    def __len__(self):
        return len(self.entries)


# ---------------------------------------------------------------------------
# server


@dataclass
class RelayConfig:
    listen: str = "127.0.0.1:7446"
    pp_path: str | None = None
    rk_path: str | None = None
    log_path: str | None = None
    max_payload: int = DEFAULT_MAX_PAYLOAD
    max_connections: int = 64
    subscriber_queue: int = 1024


def parse_address(address):
    host, _, port = address.rpartition(":")
    if not host or not port.isdigit():
        raise ValueError(f"expected HOST:PORT, got {address!r}")
    return host.strip("[]"), int(port)


def load_relay_keys(pp_path, rk_path):
    """Load pp and the sanitizer key, refusing mismatched files."""
    with open(pp_path, "rb") as fh:
        pp = wire.load_public_params(fh.read())
    with open(rk_path, "rb") as fh:
        data = fh.read()
    role, _ = wire.key_role(data)
    if role is not wire.KeyRole.SANITIZER:
        raise wire.FormatError(f"{rk_path} holds a {role.name.lower()} key, not the sanitizer key")
    return pp, wire.load_key(data, pp)


class _Subscriber:
    def __init__(self, limit):
        self.queue = asyncio.Queue()
        self.limit = limit
        self.dropped = False

    def push(self, frame_bytes):
        if self.dropped:
            return
        if self.queue.qsize() >= self.limit:
            self.dropped = True
            self.queue.put_nowait(None)
            return
        self.queue.put_nowait(frame_bytes)


class Relay:
    def __init__(self, pp, rk, broadcast_log=None, *, max_payload=DEFAULT_MAX_PAYLOAD,
                 max_connections=64, subscriber_queue=1024, rng=None):
        self.pp = pp
        self.rk = rk
        self.scheme = AceScheme.for_params(pp)
        self.log = broadcast_log if broadcast_log is not None else BroadcastLog()
        self.max_payload = max_payload
        self.max_connections = max_connections
        self.subscriber_queue = subscriber_queue
        self.rng = rng
        self._subscribers = set()
        self._connections = 0
        self._lock = None
        self._server = None

    @classmethod
    def from_config(cls, config):
        pp, rk = load_relay_keys(config.pp_path, config.rk_path)
        return cls(pp, rk, BroadcastLog(config.log_path), max_payload=config.max_payload,
                   max_connections=config.max_connections, subscriber_queue=config.subscriber_queue)

    @property
    def address(self):
        host, port = self._server.sockets[0].getsockname()[:2]
        return f"{host}:{port}"

    async def start(self, host="127.0.0.1", port=0):
        self._lock = asyncio.Lock()
        self._server = await asyncio.start_server(self._handle, host, port)
        log.info("relay listening on %s", self.address)
        return self._server

    async def stop(self):
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()

    def sanitize_bytes(self, data):
        """Deserialize, sanitize and re-serialize one submission (pure)."""
        c = self.scheme.ciphertext_from_bytes(self.pp, data)
        cs = self.scheme.sanitize(self.pp, self.rk, c, self.rng)
        return self.scheme.sanitized_to_bytes(self.pp, cs)

    async def _read_frame(self, reader):
        head = await reader.readexactly(HEADER.size)
        try:
            ftype, seq, length = Frame.parse_header(head, self.max_payload)
        except FrameError as exc:
            if exc.code is ErrorCode.TOO_LARGE:
                await self._discard(reader, exc.declared_length)
            raise
        return Frame(ftype, seq, await reader.readexactly(length))

    @staticmethod
    async def _discard(reader, length):
        while length:
            chunk = await reader.read(min(length, 1 << 16))
            if not chunk:
                return
            length -= len(chunk)

    async def _handle(self, reader, writer):
        if self._connections >= self.max_connections:
            writer.write(error_frame(ErrorCode.BUSY, "too many connections").to_bytes())
            await writer.drain()
            writer.close()
            return
        self._connections += 1
        try:
            while True:
                try:
                    frame = await self._read_frame(reader)
                except asyncio.IncompleteReadError:
                    return
                except FrameError as exc:
                    writer.write(error_frame(exc.code, str(exc)).to_bytes())
                    await writer.drain()
                    if exc.code is ErrorCode.TOO_LARGE:
                        continue
                    return
                if frame.type is FrameType.SUBMIT:
                    await self._submit(frame, writer)
                elif frame.type is FrameType.SUBSCRIBE:
                    await self._subscribe(frame, reader, writer)
                    return
                else:
                    writer.write(error_frame(ErrorCode.BAD_REQUEST, f"unexpected {frame.type.name}").to_bytes())
                    await writer.drain()
        except (ConnectionError, OSError):
            pass
        finally:
            self._connections -= 1
            writer.close()

    async def _submit(self, frame, writer):
        loop = asyncio.get_running_loop()
        try:
            sanitized = await loop.run_in_executor(None, self.sanitize_bytes, frame.payload)
        except AceError as exc:
            writer.write(error_frame(ErrorCode.INVALID_CIPHERTEXT, str(exc)).to_bytes())
            await writer.drain()
            return
        async with self._lock:
            entry = self.log.append(sanitized)
            out = entry.frame().to_bytes()
            for sub in list(self._subscribers):
                sub.push(out)
            writer.write(Frame(FrameType.ACK, entry.seq).to_bytes())
        await writer.drain()

    async def _subscribe(self, frame, reader, writer):
        if frame.seq < 1:
            writer.write(error_frame(ErrorCode.BAD_REQUEST, "from_sequence must be >= 1").to_bytes())
            await writer.drain()
            return
        sub = _Subscriber(self.subscriber_queue)
        async with self._lock:
            backlog = [e.frame().to_bytes() for e in self.log.since(frame.seq)]
            self._subscribers.add(sub)
        closed = asyncio.ensure_future(reader.read())
        getter = None
        try:
            for chunk in backlog:
                writer.write(chunk)
            await writer.drain()
            while True:
                getter = asyncio.ensure_future(sub.queue.get())
                done, _ = await asyncio.wait({getter, closed}, return_when=asyncio.FIRST_COMPLETED)
                if getter not in done:
                    return
                item = getter.result()
                if item is None:
                    log.info("disconnecting slow subscriber")
                    return
                writer.write(item)
                await writer.drain()
        finally:
            self._subscribers.discard(sub)
            for task in (closed, getter):
                if task is not None:
                    task.cancel()


async def _serve(config, ready=None):
    relay = Relay.from_config(config)
    host, port = parse_address(config.listen)
    await relay.start(host, port)
    if ready is not None:
        ready(relay)
    stop = asyncio.Event()
    loop = asyncio.get_running_loop()
    for sig in (signal.SIGINT, signal.SIGTERM):
        try:
            loop.add_signal_handler(sig, stop.set)
        except (NotImplementedError, RuntimeError):
            pass
    await stop.wait()
    await relay.stop()


def serve(config, ready=None):
    """Run the relay until SIGINT/SIGTERM."""
    asyncio.run(_serve(config, ready))


# ---------------------------------------------------------------------------
# blocking client


def _recv_exact(sock, n):
    buf = bytearray()
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise ConnectionError("relay closed the connection")
        buf += chunk
    return bytes(buf)


def recv_frame(sock):
    head = _recv_exact(sock, HEADER.size)
    ftype, seq, length = Frame.parse_header(head)
    return Frame(ftype, seq, _recv_exact(sock, length))


def submit(address, pp, ciphertext, timeout=30.0):
    """Send one ciphertext; returns the sequence number the relay assigned."""
    if isinstance(ciphertext, MultiCiphertext):
        ciphertext = AceScheme.for_params(pp).ciphertext_to_bytes(pp, ciphertext)
    with socket.create_connection(parse_address(address), timeout=timeout) as sock:
        sock.sendall(Frame(FrameType.SUBMIT, 0, ciphertext).to_bytes())
        reply = recv_frame(sock)
    if reply.type is FrameType.ACK:
        return reply.seq
    if reply.type is FrameType.ERR:
        raise parse_error(reply)
    raise RelayError(ErrorCode.MALFORMED, f"unexpected {reply.type.name} reply")


def subscribe(address, from_sequence=1, timeout=None):
    """Yield ``(sequence, sanitized ciphertext bytes)`` from the relay, replay first."""
    with socket.create_connection(parse_address(address), timeout=timeout) as sock:
        sock.sendall(Frame(FrameType.SUBSCRIBE, from_sequence).to_bytes())
        while True:
            frame = recv_frame(sock)
            if frame.type is FrameType.ERR:
                raise parse_error(frame)
            if frame.type is FrameType.BROADCAST:
                yield frame.seq, frame.payload
