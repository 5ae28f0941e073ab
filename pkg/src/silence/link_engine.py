"""Link orchestration: TX/RX pipelines, live stats, apps, reconfiguration.

One LinkEngine owns up to three activities: a transmit thread (builds,
modulates, paces and publishes frames), a receive thread (propagates the
subscribed sample stream through its own channel physics and decodes it),
and a probe timer that keeps sequence numbers moving so packet loss is
measurable even on an idle link.  All mutable state is behind one lock;
snapshots are immutable copies.

`run_per_scan` is the offline measurement harness: no threads, no
pacing, frames pushed through the same pipeline in batches.
"""

from __future__ import annotations

import csv
import queue
import threading
import time
from collections import OrderedDict, deque
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.signal import fftconvolve

from .channel import ChannelParams, LinkStats, propagate
from .errors import BackpressureError, ConfigError, SizeError, TransportError
from .framing import MAX_PAYLOAD, FrameKind, build_mac_frame
from .medium import (FilePublisher, InprocMedium, UdpPublisher, UdpSubscriber,
                     parse_udp_spec, read_sample_file)
from .phy_modes import mode_by_id
from .pipeline import (GUARD_CHIPS, RxEvent, StreamReceiver, decode_frame_at,
                       frame_airtime_s, modulate_ppdu)
from .waveform import (DEFAULT_SYNC_THRESHOLD, IntensitySamples,
                       marker_confirmed, preamble_template)

VALID_SPS = (2, 4, 8, 16)
CLIP_FLAG_FRACTION = 0.05


@dataclass(frozen=True)
class LinkConfig:
    """Everything the operator can steer at runtime."""

    mode_id: int = 0
    sps: int = 8
    channel: ChannelParams = field(default_factory=ChannelParams)
    medium: str = "inproc"
    role: str = "both"                  # "tx" | "rx" | "both"
    lo: float = 0.0
    hi: float = 1.0
    sync_threshold: float = DEFAULT_SYNC_THRESHOLD
    probe_interval_s: float = 1.0
    stats_window_s: float = 5.0
    tx_queue_limit: int = 256
    pacing: bool = True
    guard_chips: int = GUARD_CHIPS
    loss_timeout_s: float = 1.0

    def __post_init__(self):
        mode_by_id(self.mode_id)
        if self.sps not in VALID_SPS:
            raise ConfigError(f"sps must be one of {VALID_SPS}, got {self.sps}")
        if self.role not in ("tx", "rx", "both"):
            raise ConfigError(f"role must be tx, rx or both, got {self.role!r}")
        if not 0.0 <= self.lo < self.hi <= 1.0:
            raise ConfigError("levels must satisfy 0 <= lo < hi <= 1")
        if not 0.0 < self.sync_threshold < 1.0:
            raise ConfigError("sync threshold must lie in (0, 1)")
        if self.stats_window_s <= 0 or self.probe_interval_s < 0:
            raise ConfigError("windows and intervals must be positive")
        if self.tx_queue_limit < 1:
            raise ConfigError("tx queue limit must be >= 1")

    @property
    def mode(self):
        return mode_by_id(self.mode_id)

    def patched(self, patch: dict) -> "LinkConfig":
        """New config with a dict patch applied; raises ConfigError."""
        values = dict(patch)
        chan_patch = values.pop("channel", None)
        if chan_patch is not None:
            if not isinstance(chan_patch, dict):
                raise ConfigError("channel patch must be a table of fields")
            try:
                values["channel"] = replace(self.channel, **chan_patch)
            except TypeError as exc:
                raise ConfigError(f"unknown channel field: {exc}") from exc
        try:
            return replace(self, **values)
        except TypeError as exc:
            raise ConfigError(f"unknown config field: {exc}") from exc

    def as_dict(self) -> dict:
        d = {
            "mode_id": self.mode_id, "sps": self.sps, "medium": self.medium,
            "role": self.role, "lo": self.lo, "hi": self.hi,
            "sync_threshold": self.sync_threshold,
            "probe_interval_s": self.probe_interval_s,
            "stats_window_s": self.stats_window_s,
            "tx_queue_limit": self.tx_queue_limit, "pacing": self.pacing,
            "guard_chips": self.guard_chips,
            "loss_timeout_s": self.loss_timeout_s,
            "channel": {k: getattr(self.channel, k) for k in (
                "distance_m", "half_power_angle_deg", "tx_angle_deg",
                "rx_angle_deg", "fov_deg", "pd_area_m2",
                "responsivity_a_per_w", "tx_power_w", "ambient_current_a",
                "noise_std_a", "saturation_current_a", "seed")},
        }
        return d


class _Stats:
    """Cumulative counters plus sliding-window events, lock owned by engine."""

    def __init__(self, window_s: float):
        self.window_s = window_s
        self.tx = 0
        self.ok = 0
        self.hdr = 0
        self.crc = 0
        self.lost = 0
        # seq -> (deadline, payload_bits, stream position of the frame end)
        self.outstanding: OrderedDict[int, tuple[float, int, int]] = OrderedDict()
        self.published_samples = 0
        self.consumed_samples = 0
        self.outcomes: deque = deque()      # (t, kind, payload_bits)
        self.clip: deque = deque()          # (t, clipped, seen)
        self.rx_only_expected = 0
        self._rx_last_seq: int | None = None

    def on_publish(self, seq: int, payload_bits: int, deadline: float,
                   n_samples: int):
        self.tx += 1
        self.published_samples += n_samples
        self.outstanding[seq] = (deadline, payload_bits, self.published_samples)

    def _settle(self, now: float, kind: str, bits: int):
        self.outcomes.append((now, kind, bits))

    def on_rx_ok(self, seq: int, payload_bits: int, now: float, tracked: bool):
        self.ok += 1
        if tracked:
            self.outstanding.pop(seq, None)
        else:
            if self._rx_last_seq is None:
                self.rx_only_expected += 1
            else:
                delta = (seq - self._rx_last_seq) % 0x10000
                self.rx_only_expected += delta
            self._rx_last_seq = seq
        self._settle(now, "ok", payload_bits)

    def on_rx_corrupt(self, kind: str, now: float, tracked: bool):
        if kind == "hdr_fail":
            self.hdr += 1
        else:
            self.crc += 1
        if tracked and self.outstanding:
            self.outstanding.popitem(last=False)
        elif not tracked:
            self.rx_only_expected += 1
        self._settle(now, kind, 0)

    def expire(self, now: float, force: bool = False):
        """Move timed-out frames to lost.

        A frame only counts lost once the receive side has consumed the
        stream past its position (so a backlogged pipeline is never
        mistaken for loss), or after a generous hard deadline when the
        stream itself went dead.
        """
        while self.outstanding:
            seq, (deadline, _, end_pos) = next(iter(self.outstanding.items()))
            if not force:
                if deadline > now:
                    break
                seen = self.consumed_samples >= end_pos
                if not seen and deadline + 5.0 > now:
                    break
            self.outstanding.popitem(last=False)
            self.lost += 1
            self._settle(now, "lost", 0)

    def on_clip(self, now: float, clipped: int, seen: int):
        self.clip.append((now, clipped, seen))

    def frames_tx_estimate(self, tracked: bool) -> int:
        if tracked:
            return self.tx
        return max(self.rx_only_expected,
                   self.ok + self.hdr + self.crc)

    def snapshot(self, now: float, tracked: bool) -> LinkStats:
        horizon = now - self.window_s
        while self.outcomes and self.outcomes[0][0] < horizon:
            self.outcomes.popleft()
        while self.clip and self.clip[0][0] < horizon:
            self.clip.popleft()
        w_ok = w_fail = 0
        w_bits = 0
        for _, kind, bits in self.outcomes:
            if kind == "ok":
                w_ok += 1
                w_bits += bits
            else:
                w_fail += 1
        frames_tx = self.frames_tx_estimate(tracked)
        lost = self.lost
        if not tracked:
            lost = max(self.rx_only_expected - self.ok - self.hdr - self.crc, 0)
        per = None
        if w_ok + w_fail > 0:
            per = w_fail / (w_ok + w_fail)
        elif frames_tx > 0:
            done = self.ok + self.hdr + self.crc + lost
            if done:
                per = (done - self.ok) / done
        clipped = sum(c for _, c, _ in self.clip)
        seen = sum(s for _, _, s in self.clip)
        return LinkStats(
            frames_tx=frames_tx, frames_ok=self.ok, frames_hdr_fail=self.hdr,
            frames_crc_fail=self.crc, frames_lost=lost, per=per,
            goodput_bps=w_bits / self.window_s, window_s=self.window_s,
            clipping=bool(seen and clipped / seen > CLIP_FLAG_FRACTION))


class LinkEngine:
    """Runs the TX and RX pipelines of one node over a configured medium."""

    def __init__(self, config: LinkConfig, stats_log: str | None = None):
        self._cfg = config
        self._lock = threading.RLock()
        self._stats = _Stats(config.stats_window_s)
        self._txq: queue.Queue = queue.Queue(maxsize=config.tx_queue_limit)
        self._rxq: queue.Queue = queue.Queue()
        self._next_seq = 0
        self._seen_seqs: deque = deque(maxlen=512)
        self._seen_set: set[int] = set()
        self._rx_listeners: list = []
        self._stats_log = stats_log
        self._threads: list[threading.Thread] = []
        self._tx_threads: list[threading.Thread] = []
        self._stop = threading.Event()
        self._tx_idle = threading.Event()
        self._tx_idle.set()
        self._publisher = None
        self._subscription = None
        self._inproc: InprocMedium | None = None
        self._udp_sub: UdpSubscriber | None = None
        self._file_path: str | None = None
        self._rx_rng = np.random.default_rng((config.channel.seed, 1))
        self._receiver: StreamReceiver | None = None
        self._rx_rate: int | None = None
        self._started = False

    # -- lifecycle -----------------------------------------------------------

    def start(self):
        cfg = self._cfg
        medium = cfg.medium
        if medium == "inproc":
            if cfg.role != "both":
                raise ConfigError("the inproc medium needs role=both")
            self._inproc = InprocMedium()
            self._publisher = self._inproc
            self._subscription = self._inproc.subscribe()
        elif medium.startswith("udp:"):
            addrs = parse_udp_spec(medium[4:])
            if cfg.role in ("tx", "both"):
                self._publisher = UdpPublisher(addrs)
            if cfg.role in ("rx", "both"):
                self._udp_sub = UdpSubscriber(addrs[0])
        elif medium.startswith("file:"):
            self._file_path = medium[5:]
            if cfg.role == "both":
                raise ConfigError("the file medium supports role tx or rx only")
            if cfg.role == "tx":
                rate = cfg.mode.optical_clock_hz * cfg.sps
                self._publisher = FilePublisher(self._file_path, rate)
        else:
            raise ConfigError(f"unknown medium {cfg.medium!r}")

        if cfg.role in ("tx", "both"):
            self._spawn(self._tx_loop, "silence-tx", tx_side=True)
            if cfg.probe_interval_s > 0:
                self._spawn(self._probe_loop, "silence-probe", tx_side=True)
        if cfg.role in ("rx", "both"):
            self._spawn(self._rx_loop, "silence-rx")
        if self._stats_log:
            self._spawn(self._stats_log_loop, "silence-statslog")
        self._started = True

    def _spawn(self, target, name, tx_side: bool = False):
        t = threading.Thread(target=target, name=name, daemon=True)
        t.start()
        self._threads.append(t)
        if tx_side:
            self._tx_threads.append(t)

    def stop(self, drain: bool = True, timeout: float = 10.0):
        if drain and self._started:
            self.drain(timeout=timeout)
        self._stop.set()
        # transmit threads go first so no sample block can be published
        # behind the medium's close sentinel and silently miss decoding
        for t in self._tx_threads:
            t.join(timeout=timeout)
        if self._inproc is not None:
            self._inproc.close()
        for t in self._threads:
            t.join(timeout=timeout)
        if self._udp_sub is not None:
            self._udp_sub.close()
        if self._publisher is not None and self._publisher is not self._inproc:
            self._publisher.close()
        with self._lock:
            self._stats.expire(time.monotonic(), force=True)

    def drain(self, timeout: float = 10.0):
        """Wait until queued frames are published and the RX side caught up."""
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            if self._txq.empty() and self._tx_idle.is_set():
                break
            time.sleep(0.01)
        if self._subscription is not None:
            while time.monotonic() < deadline:
                if self._subscription._q.empty():
                    break
                time.sleep(0.01)
        time.sleep(0.05)

    # -- operator surface ------------------------------------------------------

    @property
    def config(self) -> LinkConfig:
        with self._lock:
            return self._cfg

    def reconfigure(self, patch: dict) -> LinkConfig:
        """Validate and apply a config patch atomically at a frame boundary."""
        with self._lock:
            for frozen in ("medium", "role"):
                if frozen in patch and patch[frozen] != getattr(self._cfg, frozen):
                    raise ConfigError(f"{frozen} cannot change at runtime")
            new = self._cfg.patched(patch)
            self._cfg = new
            self._stats.window_s = new.stats_window_s
            return new

    def tx_submit(self, kind: FrameKind, payload: bytes) -> int:
        """Queue one frame (STREAM payloads larger than 1023 B are split).

        Returns the first assigned sequence number; raises
        BackpressureError when the bounded queue cannot take the frames.
        """
        cfg = self.config
        if cfg.role == "rx":
            raise ConfigError("engine is receive-only")
        kind = FrameKind(kind)
        if isinstance(payload, str):
            payload = payload.encode()
        if kind == FrameKind.STREAM:
            segments = [payload[i:i + MAX_PAYLOAD]
                        for i in range(0, max(len(payload), 1), MAX_PAYLOAD)]
        else:
            if len(payload) > MAX_PAYLOAD:
                raise SizeError(f"{kind.name} payload exceeds {MAX_PAYLOAD} bytes")
            segments = [payload]
        with self._lock:
            if self._txq.qsize() + len(segments) > cfg.tx_queue_limit:
                raise BackpressureError("transmit queue full")
            first_seq = self._next_seq
            for seg in segments:
                seq = self._next_seq
                self._next_seq = (self._next_seq + 1) & 0xFFFF
                frame_bytes = build_mac_frame(kind, seq, seg)
                self._txq.put((seq, kind, len(seg), frame_bytes))
        return first_seq

    def rx_poll(self) -> list[tuple[FrameKind, int, bytes]]:
        """Integrity-verified data frames, in order, duplicates dropped."""
        out = []
        while True:
            try:
                out.append(self._rxq.get_nowait())
            except queue.Empty:
                return out

    def add_rx_listener(self, fn):
        """fn(MacFrame) fires on every delivered data frame."""
        self._rx_listeners.append(fn)

    def stats_snapshot(self) -> LinkStats:
        now = time.monotonic()
        with self._lock:
            self._stats.expire(now)
            return self._stats.snapshot(now, tracked=self._cfg.role != "rx")

    # -- pipelines ---------------------------------------------------------------

    def _tx_loop(self):
        next_slot = time.monotonic()
        while not self._stop.is_set():
            try:
                seq, kind, payload_len, frame_bytes = self._txq.get(timeout=0.05)
            except queue.Empty:
                self._tx_idle.set()
                continue
            self._tx_idle.clear()
            cfg = self.config
            mode = cfg.mode
            block = modulate_ppdu(frame_bytes, mode, cfg.sps, cfg.lo, cfg.hi,
                                  cfg.guard_chips)
            airtime = frame_airtime_s(mode, len(frame_bytes), cfg.guard_chips)
            if cfg.pacing:
                now = time.monotonic()
                next_slot = max(next_slot, now)
                if next_slot > now:
                    time.sleep(next_slot - now)
                next_slot += airtime
            try:
                self._publisher.publish(block)
            except TransportError:
                self._tx_idle.set()
                continue
            now = time.monotonic()
            with self._lock:
                self._stats.on_publish(
                    seq, 8 * payload_len,
                    now + airtime + self._cfg.loss_timeout_s, len(block))
            self._tx_idle.set()

    def _probe_loop(self):
        while not self._stop.wait(self.config.probe_interval_s):
            try:
                self.tx_submit(FrameKind.PROBE, b"")
            except (BackpressureError, ConfigError):
                pass

    def _rx_blocks(self):
        """Yield sample blocks from whatever transport is configured."""
        if self._subscription is not None:
            # after stop is flagged, keep draining until the close sentinel
            # so frames already on the medium are still decoded
            while True:
                try:
                    block = self._subscription.get(timeout=0.1)
                except TimeoutError:
                    if self._stop.is_set():
                        return
                    continue
                if block is None:
                    return
                yield block
        elif self._udp_sub is not None:
            while not self._stop.is_set():
                try:
                    yield self._udp_sub.get(timeout=0.1)
                except TimeoutError:
                    continue
                except TransportError:
                    continue
        elif self._file_path is not None:
            for block in read_sample_file(self._file_path):
                if self._stop.is_set():
                    return
                yield block

    def _rx_loop(self):
        tracked = self.config.role != "rx"
        for block in self._rx_blocks():
            cfg = self.config
            family = cfg.mode.family
            sps = block.sample_rate_hz // cfg.mode.optical_clock_hz
            if sps * cfg.mode.optical_clock_hz != block.sample_rate_hz or sps < 2:
                continue            # stream from a foreign clock family
            if self._receiver is None or self._rx_rate != block.sample_rate_hz \
                    or self._receiver.family != family:
                if self._receiver is not None:
                    for ev in self._receiver.end_of_stream():
                        self._on_rx_event(ev, tracked)
                self._receiver = StreamReceiver(family, sps, cfg.sync_threshold)
                self._rx_rate = block.sample_rate_hz
            self._receiver.threshold = cfg.sync_threshold
            rx = propagate(block, cfg.channel, self._rx_rng)
            before_seen = self._receiver._seen
            before_clip = self._receiver._clipped
            events = self._receiver.process(rx)
            for ev in events:
                self._on_rx_event(ev, tracked)
            # consumed advances only after the block's events are applied,
            # so expiry can never race a decode that already succeeded
            now = time.monotonic()
            with self._lock:
                self._stats.consumed_samples += len(rx.samples)
                self._stats.on_clip(now, self._receiver._clipped - before_clip,
                                    self._receiver._seen - before_seen)
                self._stats.expire(now)
        if self._receiver is not None:
            for ev in self._receiver.end_of_stream():
                self._on_rx_event(ev, tracked)

    def _on_rx_event(self, ev: RxEvent, tracked: bool):
        now = time.monotonic()
        if ev.kind == "ok":
            frame = ev.frame
            with self._lock:
                self._stats.on_rx_ok(frame.seq, 8 * len(frame.payload), now,
                                     tracked)
                dup = frame.seq in self._seen_set
                if not dup:
                    if len(self._seen_seqs) == self._seen_seqs.maxlen:
                        self._seen_set.discard(self._seen_seqs[0])
                    self._seen_seqs.append(frame.seq)
                    self._seen_set.add(frame.seq)
            if not dup and frame.kind != FrameKind.PROBE:
                self._rxq.put((frame.kind, frame.seq, frame.payload))
                for fn in self._rx_listeners:
                    try:
                        fn(frame)
                    except Exception:
                        pass
        else:
            with self._lock:
                self._stats.on_rx_corrupt(ev.kind, now, tracked)

    def _stats_log_loop(self):
        with open(self._stats_log, "a", newline="") as fh:
            writer = csv.writer(fh)
            if fh.tell() == 0:
                writer.writerow(["time_s", "frames_tx", "frames_ok",
                                 "frames_hdr_fail", "frames_crc_fail",
                                 "frames_lost", "per", "goodput_bps",
                                 "clipping"])
            t0 = time.monotonic()
            while not self._stop.wait(1.0):
                s = self.stats_snapshot()
                writer.writerow([round(time.monotonic() - t0, 3), s.frames_tx,
                                 s.frames_ok, s.frames_hdr_fail,
                                 s.frames_crc_fail, s.frames_lost,
                                 "" if s.per is None else f"{s.per:.6g}",
                                 f"{s.goodput_bps:.1f}", int(s.clipping)])
                fh.flush()


# -- offline measurement harness ------------------------------------------------


def sync_batch(rows: np.ndarray, family: str, sps: int,
               threshold: float = DEFAULT_SYNC_THRESHOLD,
               search_windows: int | None = None) -> np.ndarray:
    """Best sync candidate per row; -1 where nothing clears the threshold.

    Rows are independent single-frame sample vectors of equal length; the
    returned values are post-preamble offsets.  When the caller knows the
    frame start lies in the first few windows (the scan harness places it
    there), search_windows bounds the correlation search.
    """
    template = preamble_template(family, sps)
    n = template.size
    p = template - template.mean()
    p_norm = float(np.sqrt(np.sum(p * p)))
    span = rows if search_windows is None else rows[:, :search_windows + n - 1]
    num = fftconvolve(span, p[::-1][None, :], mode="valid", axes=1)
    csum = np.cumsum(span, axis=1)
    csq = np.cumsum(span * span, axis=1)
    zeros = np.zeros((span.shape[0], 1))
    csum = np.concatenate([zeros, csum], axis=1)
    csq = np.concatenate([zeros, csq], axis=1)
    wsum = csum[:, n:] - csum[:, :-n]
    wsq = csq[:, n:] - csq[:, :-n]
    var = np.maximum(wsq - wsum * wsum / n, 0.0)
    denom = np.sqrt(var) * p_norm
    with np.errstate(invalid="ignore", divide="ignore"):
        rho = np.where(denom > 1e-30, num / np.maximum(denom, 1e-300), 0.0)
    best = np.argmax(rho, axis=1)
    out = np.full(rows.shape[0], -1, dtype=np.int64)
    for r in range(rows.shape[0]):
        w = int(best[r])
        if rho[r, w] >= threshold and marker_confirmed(rows[r], w, family, sps,
                                                       threshold):
            out[r] = w + n
    return out


def run_per_scan(channel: ChannelParams, mode_id: int, distances,
                 frames_per_point: int, payload_len: int = 64, sps: int = 2,
                 seed: int | None = None, batch_size: int = 256,
                 lo: float = 0.0, hi: float = 1.0,
                 threshold: float = DEFAULT_SYNC_THRESHOLD,
                 progress=None) -> list[dict]:
    """Measure PER and goodput of one mode across a list of distances.

    Every frame takes the full path: MAC framing, PPDU build, modulation,
    seeded channel, preamble sync, demodulation, FEC decode, MAC check.
    """
    distances = list(distances)
    if not distances:
        raise ConfigError("distance list is empty")
    if frames_per_point < 1:
        raise ConfigError("frames_per_point must be >= 1")
    mode = mode_by_id(mode_id)
    base_seed = channel.seed if seed is None else seed
    rows_out = []
    for pt, dist in enumerate(distances):
        params = channel.with_(distance_m=float(dist))
        rng = np.random.default_rng((base_seed, pt))
        ok = hdr = crc = lost = 0
        seq = 0
        done = 0
        airtime = frame_airtime_s(mode, payload_len + 8, GUARD_CHIPS)
        while done < frames_per_point:
            nb = min(batch_size, frames_per_point - done)
            payloads = rng.integers(0, 256, (nb, payload_len), dtype=np.uint8)
            pads = rng.integers(0, 10 * sps + 1, nb)
            blocks = []
            for i in range(nb):
                fb = build_mac_frame(FrameKind.STREAM, seq & 0xFFFF,
                                     payloads[i].tobytes())
                seq += 1
                blocks.append(modulate_ppdu(fb, mode, sps, lo, hi,
                                            GUARD_CHIPS).samples)
            flen = blocks[0].size
            width = flen + 10 * sps + 1
            rows = np.full((nb, width), lo, dtype=np.float64)
            for i in range(nb):
                rows[i, pads[i]:pads[i] + flen] = blocks[i]
            rate = mode.optical_clock_hz * sps
            rx = propagate(IntensitySamples(rate, rows), params, rng)
            offs = sync_batch(rx.samples, mode.family, sps, threshold,
                              search_windows=10 * sps + 2)
            for i in range(nb):
                if offs[i] < 0:
                    lost += 1
                    continue
                ev = decode_frame_at(rx.samples[i], int(offs[i]), mode.family,
                                     sps)
                if ev.kind == "ok" and ev.frame.payload == payloads[i].tobytes():
                    ok += 1
                elif ev.kind == "hdr_fail":
                    hdr += 1
                else:
                    crc += 1
            done += nb
            if progress:
                progress(pt, dist, done, frames_per_point)
        per = (frames_per_point - ok) / frames_per_point
        goodput = ok * payload_len * 8 / (frames_per_point * airtime)
        rows_out.append({
            "distance_m": float(dist), "frames": frames_per_point, "ok": ok,
            "hdr_fail": hdr, "crc_fail": crc, "lost": lost,
            "per": per, "goodput_bps": goodput,
        })
    return rows_out


def write_scan_csv(path: str, rows: list[dict]):
    fields = ["distance_m", "frames", "ok", "hdr_fail", "crc_fail", "lost",
              "per", "goodput_bps"]
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row[k] for k in fields})


def isotonic_fit(values, increasing: bool = True) -> list[float]:
    """Pool-adjacent-violators regression onto a monotone sequence."""
    merged: list[list[float]] = []
    for v in values:
        merged.append([float(v), 1.0])
        while len(merged) > 1 and (
                merged[-2][0] > merged[-1][0] if increasing
                else merged[-2][0] < merged[-1][0]):
            v2, w2 = merged.pop()
            v1, w1 = merged.pop()
            merged.append([(v1 * w1 + v2 * w2) / (w1 + w2), w1 + w2])
    out: list[float] = []
    for v, w in merged:
        out.extend([v] * int(w))
    return out
