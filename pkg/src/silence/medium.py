"""Virtual sample transport: the hardware boundary of the original link.

Three media carry the transmitter's clean drive samples to any number of
receivers (each receiver applies its own channel physics on its side):

  inproc  lossless in-order queues inside one process
  udp     datagrams over UDP; every chunk is self-describing and carries
          a sequence number, so a dropped chunk surfaces as an erasure
          (NaN samples) of known extent instead of silent loss
  file    capture to / replay from a file

Stream format (bit-exact, little-endian):

  header  "SLNC" | version u8 = 1 | sample_rate_hz u32
  payload IEEE-754 binary32 samples

A file is one header followed by samples.  A UDP datagram is
u32 sequence number | header | samples (at most CHUNK_SAMPLES of them).
"""

from __future__ import annotations

import queue
import socket
import struct
import threading

import numpy as np

from .errors import TransportError
from .waveform import IntensitySamples

MAGIC = b"SLNC"
VERSION = 1
HEADER = struct.Struct("<4sBI")
SEQ = struct.Struct("<I")
CHUNK_SAMPLES = 2048


def pack_header(sample_rate_hz: int) -> bytes:
    return HEADER.pack(MAGIC, VERSION, sample_rate_hz)


def unpack_header(buf: bytes) -> int:
    magic, version, rate = HEADER.unpack(buf[:HEADER.size])
    if magic != MAGIC:
        raise TransportError(f"bad stream magic {magic!r}")
    if version != VERSION:
        raise TransportError(f"unsupported stream version {version}")
    return rate


class Subscription:
    """Blocking handle over a per-subscriber queue of sample blocks.

    The queue is bounded so a flooding publisher is flow-controlled at
    the medium instead of ballooning memory; the stream stays lossless.
    """

    def __init__(self, maxsize: int = 64):
        self._q: queue.Queue = queue.Queue(maxsize=maxsize)

    def get(self, timeout: float | None = None) -> IntensitySamples | None:
        """Next block, or None once the publisher closed the stream."""
        try:
            item = self._q.get(timeout=timeout)
        except queue.Empty:
            raise TimeoutError("no sample block within timeout") from None
        return item

    def _push(self, item):
        self._q.put(item)


class InprocMedium:
    """One publisher, many subscribers, lossless and in order."""

    def __init__(self):
        self._subs: list[Subscription] = []
        self._lock = threading.Lock()
        self._closed = False

    def subscribe(self) -> Subscription:
        sub = Subscription()
        with self._lock:
            if self._closed:
                raise TransportError("medium already closed")
            self._subs.append(sub)
        return sub

    def publish(self, block: IntensitySamples):
        with self._lock:
            subs = list(self._subs)
        for sub in subs:
            sub._push(block)

    def close(self):
        with self._lock:
            self._closed = True
            subs = list(self._subs)
        for sub in subs:
            try:
                sub._q.put(None, timeout=5.0)
            except queue.Full:
                pass


class FilePublisher:
    """Writes the stream to a file; the sample rate is fixed at creation."""

    def __init__(self, path: str, sample_rate_hz: int):
        try:
            self._fh = open(path, "wb")
        except OSError as exc:
            raise TransportError(f"cannot open {path!r}: {exc}") from exc
        self._rate = sample_rate_hz
        self._fh.write(pack_header(sample_rate_hz))

    def publish(self, block: IntensitySamples):
        if block.sample_rate_hz != self._rate:
            raise TransportError("file medium cannot change sample rate mid-stream")
        self._fh.write(np.asarray(block.samples, dtype="<f4").tobytes())

    def close(self):
        self._fh.close()


def read_sample_file(path: str, chunk_samples: int = CHUNK_SAMPLES):
    """Yield IntensitySamples blocks from a captured stream file."""
    try:
        fh = open(path, "rb")
    except OSError as exc:
        raise TransportError(f"cannot open {path!r}: {exc}") from exc
    with fh:
        head = fh.read(HEADER.size)
        if len(head) < HEADER.size:
            raise TransportError(f"{path!r} is not a sample stream")
        rate = unpack_header(head)
        while True:
            raw = fh.read(4 * chunk_samples)
            if not raw:
                return
            samples = np.frombuffer(raw, dtype="<f4").astype(np.float64)
            yield IntensitySamples(rate, samples)


class UdpPublisher:
    """Chunks the stream into sequence-numbered datagrams."""

    def __init__(self, destinations: list[tuple[str, int]],
                 chunk_samples: int = CHUNK_SAMPLES, drop_filter=None):
        if not destinations:
            raise TransportError("UDP publisher needs at least one destination")
        self._dest = destinations
        self._chunk = chunk_samples
        self._seq = 0
        self._drop_filter = drop_filter      # test hook: seq -> bool
        try:
            self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        except OSError as exc:
            raise TransportError(f"cannot create UDP socket: {exc}") from exc

    def publish(self, block: IntensitySamples):
        data = np.asarray(block.samples, dtype="<f4")
        head = pack_header(block.sample_rate_hz)
        for start in range(0, data.size, self._chunk):
            payload = SEQ.pack(self._seq) + head + data[start:start + self._chunk].tobytes()
            if not (self._drop_filter and self._drop_filter(self._seq)):
                for dest in self._dest:
                    try:
                        self._sock.sendto(payload, dest)
                    except OSError as exc:
                        raise TransportError(f"UDP send to {dest} failed: {exc}") from exc
            self._seq += 1

    def close(self):
        self._sock.close()


class UdpSubscriber:
    """Receives datagrams; sequence gaps become NaN erasure blocks."""

    def __init__(self, bind: tuple[str, int], chunk_samples: int = CHUNK_SAMPLES):
        self._chunk = chunk_samples
        try:
            self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
            self._sock.bind(bind)
        except OSError as exc:
            raise TransportError(f"cannot bind UDP {bind}: {exc}") from exc
        self._next_seq: int | None = None
        self._pending: IntensitySamples | None = None

    @property
    def address(self) -> tuple[str, int]:
        return self._sock.getsockname()

    def get(self, timeout: float | None = None) -> IntensitySamples:
        """Next block; a gap yields one erasure block before the data.

        Raises TimeoutError when nothing arrives in time.
        """
        if self._pending is not None:
            block, self._pending = self._pending, None
            return block
        self._sock.settimeout(timeout)
        try:
            raw, _ = self._sock.recvfrom(65536)
        except socket.timeout:
            raise TimeoutError("no datagram within timeout") from None
        if len(raw) < SEQ.size + HEADER.size:
            raise TransportError("runt datagram")
        seq = SEQ.unpack(raw[:SEQ.size])[0]
        rate = unpack_header(raw[SEQ.size:])
        samples = np.frombuffer(raw[SEQ.size + HEADER.size:], dtype="<f4").astype(np.float64)
        block = IntensitySamples(rate, samples)
        if self._next_seq is not None and seq != self._next_seq:
            missing = seq - self._next_seq
            if missing < 0:
                # late duplicate from the past; drop it
                return IntensitySamples(rate, np.zeros(0))
            self._next_seq = seq + 1
            self._pending = block
            return IntensitySamples(rate, np.full(missing * self._chunk, np.nan))
        self._next_seq = seq + 1
        return block

    def close(self):
        self._sock.close()


def parse_udp_spec(spec: str) -> list[tuple[str, int]]:
    out = []
    for part in spec.split(","):
        host, _, port = part.rpartition(":")
        if not host or not port.isdigit():
            raise TransportError(f"bad UDP address {part!r} (want HOST:PORT)")
        out.append((host, int(port)))
    return out
