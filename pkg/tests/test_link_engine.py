import time

import numpy as np
import pytest

from silence.channel import ChannelParams
from silence.errors import BackpressureError, ConfigError
from silence.framing import FrameKind
from silence.link_engine import (LinkConfig, LinkEngine, isotonic_fit,
                                 run_per_scan, sync_batch, write_scan_csv)

CLEAN = ChannelParams(distance_m=2.0, noise_std_a=0.0, seed=5)


def make_engine(**kw):
    defaults = dict(mode_id=4, sps=4, channel=CLEAN, pacing=False,
                    probe_interval_s=0.0, stats_window_s=60.0,
                    loss_timeout_s=0.5)
    defaults.update(kw)
    return LinkEngine(LinkConfig(**defaults))


class TestConfig:
    def test_validation(self):
        with pytest.raises(ConfigError):
            LinkConfig(mode_id=12)
        with pytest.raises(ConfigError):
            LinkConfig(sps=3)
        with pytest.raises(ConfigError):
            LinkConfig(role="relay")

    def test_patch_atomic(self):
        cfg = LinkConfig()
        new = cfg.patched({"mode_id": 5, "sps": 4,
                           "channel": {"distance_m": 3.0}})
        assert new.mode_id == 5 and new.channel.distance_m == 3.0
        with pytest.raises(ConfigError):
            cfg.patched({"mode_id": 12})
        with pytest.raises(ConfigError):
            cfg.patched({"no_such_field": 1})
        with pytest.raises(ConfigError):
            cfg.patched({"channel": {"warp_factor": 9}})


class TestEngineLoopback:
    def test_chat_end_to_end(self):
        eng = make_engine()
        eng.start()
        try:
            seq = eng.tx_submit(FrameKind.CHAT, b"hola")
            assert seq == 0
            eng.drain()
            got = eng.rx_poll()
            assert got == [(FrameKind.CHAT, 0, b"hola")]
        finally:
            eng.stop()

    def test_stream_segmentation(self):
        eng = make_engine()
        eng.start()
        try:
            first = eng.tx_submit(FrameKind.STREAM, bytes(2000))
            assert first == 0
            eng.drain()
            got = eng.rx_poll()
            assert [(k, s, len(p)) for k, s, p in got] == [
                (FrameKind.STREAM, 0, 1023), (FrameKind.STREAM, 1, 977)]
        finally:
            eng.stop()

    def test_poll_order_matches_seq_order(self):
        eng = make_engine()
        eng.start()
        try:
            for i in range(30):
                eng.tx_submit(FrameKind.STREAM, bytes([i]) * 10)
            eng.drain()
            seqs = [s for _, s, _ in eng.rx_poll()]
            assert seqs == list(range(30))
        finally:
            eng.stop()

    def test_stats_conservation_clean(self):
        eng = make_engine(probe_interval_s=0.2)
        eng.start()
        try:
            for i in range(20):
                eng.tx_submit(FrameKind.CHAT, f"line {i}".encode())
            time.sleep(0.5)
            eng.drain()
        finally:
            eng.stop()
        s = eng.stats_snapshot()
        assert s.frames_tx >= 20
        assert s.frames_tx == s.frames_ok + s.frames_hdr_fail + \
            s.frames_crc_fail + s.frames_lost
        assert s.frames_lost == 0 and s.per == 0.0

    def test_goodput_counts_payload_bits_only(self):
        eng = make_engine(stats_window_s=30.0)
        eng.start()
        try:
            for _ in range(10):
                eng.tx_submit(FrameKind.STREAM, bytes(64))
            eng.drain()
        finally:
            eng.stop()
        s = eng.stats_snapshot()
        assert s.frames_ok == 10
        assert s.goodput_bps == pytest.approx(10 * 64 * 8 / 30.0, rel=1e-6)

    def test_rx_only_engine_rejects_submit(self):
        cfg = LinkConfig(mode_id=4, role="rx", medium="udp:127.0.0.1:0")
        eng = LinkEngine(cfg)
        with pytest.raises(ConfigError):
            eng.tx_submit(FrameKind.CHAT, b"x")

    def test_backpressure_after_queue_fills(self):
        # slowest mode + pacing means the queue drains at ~0.75 s per frame
        eng = make_engine(mode_id=0, sps=2, pacing=True, tx_queue_limit=256)
        eng.start()
        accepted = 0
        try:
            with pytest.raises(BackpressureError):
                for _ in range(300):
                    eng.tx_submit(FrameKind.STREAM, bytes(1023))
                    accepted += 1
            assert 250 <= accepted <= 260
        finally:
            eng.stop(drain=False, timeout=2.0)

    def test_inproc_requires_both_role(self):
        with pytest.raises(ConfigError):
            LinkEngine(LinkConfig(role="tx", medium="inproc")).start()

    def test_pacing_never_exceeds_the_optical_clock(self):
        from silence.framing import frame_chip_count
        from silence.phy_modes import mode_by_id
        n = 30
        eng = make_engine(mode_id=8, sps=4, pacing=True)
        mode = mode_by_id(8)
        chips_per_frame = frame_chip_count(mode, 24 + 8) + 32   # plus guard
        eng.start()
        try:
            t0 = time.monotonic()
            for i in range(n):
                eng.tx_submit(FrameKind.STREAM, bytes(24))
            eng.drain()
            elapsed = time.monotonic() - t0
        finally:
            eng.stop()
        assert eng.stats_snapshot().frames_ok == n
        # long-run chip rate stays at or below the 400 kHz optical clock
        # (first frame goes out immediately, so n-1 full airtimes remain)
        assert elapsed >= (n - 1) * chips_per_frame / mode.optical_clock_hz


class TestReconfigure:
    def test_invalid_patch_keeps_config(self):
        eng = make_engine()
        before = eng.config
        with pytest.raises(ConfigError):
            eng.reconfigure({"mode_id": 12})
        assert eng.config == before

    def test_medium_and_role_frozen(self):
        eng = make_engine()
        with pytest.raises(ConfigError):
            eng.reconfigure({"medium": "udp:1.2.3.4:1"})
        with pytest.raises(ConfigError):
            eng.reconfigure({"role": "rx"})

    def test_mode_change_mid_stream_followed_via_header(self):
        eng = make_engine(mode_id=3)
        eng.start()
        try:
            for i in range(5):
                eng.tx_submit(FrameKind.STREAM, bytes([i]) * 8)
            eng.drain()
            eng.reconfigure({"mode_id": 4})      # same family, new rate
            for i in range(5, 10):
                eng.tx_submit(FrameKind.STREAM, bytes([i]) * 8)
            eng.drain()
        finally:
            eng.stop()
        s = eng.stats_snapshot()
        assert s.frames_ok == 10 and s.frames_lost == 0
        assert [x[1] for x in eng.rx_poll()] == list(range(10))

    def test_reconfigure_mid_traffic_corrupts_nothing(self):
        # patches land on frame boundaries: reconfiguring while the queue
        # is busy must never damage an in-flight frame
        eng = make_engine(mode_id=3)
        eng.start()
        try:
            for i in range(8):
                eng.tx_submit(FrameKind.STREAM, bytes([i]) * 200)
            eng.reconfigure({"mode_id": 4})          # no drain in between
            for i in range(8, 16):
                eng.tx_submit(FrameKind.STREAM, bytes([i]) * 200)
            eng.drain()
        finally:
            eng.stop()
        s = eng.stats_snapshot()
        assert s.frames_ok == 16
        assert s.frames_hdr_fail == s.frames_crc_fail == s.frames_lost == 0

    def test_distance_change_degrades_link(self):
        chan = ChannelParams(distance_m=2.0, noise_std_a=2.8e-7,
                             ambient_current_a=1e-4, seed=9)
        eng = make_engine(channel=chan, mode_id=4, sps=2, loss_timeout_s=0.3)
        eng.start()
        try:
            for _ in range(10):
                eng.tx_submit(FrameKind.CHAT, b"near")
            eng.drain()
            near = eng.stats_snapshot()
            eng.reconfigure({"channel": {"distance_m": 30.0}})
            for _ in range(10):
                eng.tx_submit(FrameKind.CHAT, b"far")
            eng.drain()
            time.sleep(0.6)              # let loss deadlines expire
        finally:
            eng.stop()
        far = eng.stats_snapshot()
        assert near.frames_ok == 10 and near.per == 0.0
        assert far.frames_ok == 10      # nothing new decoded at 30 m
        assert far.frames_lost == 10
        assert far.per is not None and far.per > 0.4


class TestUdpEngine:
    def test_loopback_over_udp(self):
        import socket
        s = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        s.bind(("127.0.0.1", 0))
        port = s.getsockname()[1]
        s.close()
        cfg = LinkConfig(mode_id=4, sps=4, channel=CLEAN, pacing=False,
                         probe_interval_s=0.0, medium=f"udp:127.0.0.1:{port}",
                         role="both", stats_window_s=60.0)
        eng = LinkEngine(cfg)
        eng.start()
        try:
            for i in range(5):
                eng.tx_submit(FrameKind.CHAT, f"udp {i}".encode())
            deadline = time.time() + 5.0
            got = []
            while len(got) < 5 and time.time() < deadline:
                got += eng.rx_poll()
                time.sleep(0.05)
            assert [p for _, _, p in got] == [f"udp {i}".encode()
                                              for i in range(5)]
        finally:
            eng.stop()

    def test_udp_chunk_drop_counts_in_stats(self):
        import socket
        s = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        s.bind(("127.0.0.1", 0))
        port = s.getsockname()[1]
        s.close()
        cfg = LinkConfig(mode_id=4, sps=4, channel=CLEAN, pacing=False,
                         probe_interval_s=0.0, medium=f"udp:127.0.0.1:{port}",
                         role="both", stats_window_s=60.0, loss_timeout_s=0.5)
        eng = LinkEngine(cfg)
        eng.start()
        # drop one chunk of roughly every second frame
        eng._publisher._drop_filter = lambda seq: seq % 9 == 4
        try:
            for i in range(20):
                eng.tx_submit(FrameKind.STREAM, bytes([i]) * 400)
            eng.drain()
            time.sleep(0.8)
        finally:
            eng.stop()
        s = eng.stats_snapshot()
        assert s.frames_tx == 20
        assert s.frames_ok < 20
        assert s.frames_ok + s.frames_hdr_fail + s.frames_crc_fail + \
            s.frames_lost == 20


class TestScan:
    def test_noiseless_scan_is_clean(self):
        rows = run_per_scan(CLEAN, 4, [2.0], 64, payload_len=32, sps=2)
        assert rows[0]["per"] == 0.0 and rows[0]["ok"] == 64

    def test_rows_and_csv(self, tmp_path):
        rows = run_per_scan(CLEAN, 8, [1.0, 2.0], 16, payload_len=16, sps=4)
        assert [r["distance_m"] for r in rows] == [1.0, 2.0]
        path = tmp_path / "scan.csv"
        write_scan_csv(str(path), rows)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == \
            "distance_m,frames,ok,hdr_fail,crc_fail,lost,per,goodput_bps"
        assert len(lines) == 3

    def test_empty_distances_rejected(self):
        with pytest.raises(ConfigError):
            run_per_scan(CLEAN, 4, [], 10)

    def test_goodput_bounded_by_data_rate(self):
        # clean channel, saturated 1023-byte frames: within (0.8, 1.0] of
        # the mode's net data rate (the rest is preamble/header/guard)
        from silence.phy_modes import data_rate, mode_by_id
        rows = run_per_scan(CLEAN, 8, [1.0], 32, payload_len=1023, sps=4)
        rate = data_rate(mode_by_id(8))
        assert 0.8 * rate <= rows[0]["goodput_bps"] <= rate


def test_stats_log_appends_csv_rows(tmp_path):
    path = tmp_path / "stats.csv"
    cfg = LinkConfig(mode_id=4, sps=4, channel=CLEAN, pacing=False,
                     probe_interval_s=0.3, stats_window_s=30.0)
    eng = LinkEngine(cfg, stats_log=str(path))
    eng.start()
    try:
        eng.tx_submit(FrameKind.CHAT, b"logged")
        time.sleep(2.3)
    finally:
        eng.stop()
    lines = path.read_text().strip().splitlines()
    assert lines[0].startswith("time_s,frames_tx,frames_ok")
    assert len(lines) >= 2
    assert lines[1].split(",")[1].isdigit()


def test_sync_batch_finds_offsets():
    from silence.framing import build_mac_frame, build_ppdu
    from silence.phy_modes import mode_by_id
    from silence.waveform import modulate_ook
    mode = mode_by_id(4)
    rng = np.random.default_rng(90)
    rows, expect = [], []
    wave = modulate_ook(build_ppdu(
        build_mac_frame(FrameKind.CHAT, 0, b"batch"), mode), 2).samples
    width = wave.size + 21
    for _ in range(8):
        pad = int(rng.integers(0, 21))
        row = np.zeros(width)
        row[pad:pad + wave.size] = wave
        rows.append(row)
        expect.append(pad + 96 * 2)
    offs = sync_batch(np.stack(rows), "OOK", 2)
    assert offs.tolist() == expect
    noise = 0.3 + 0.05 * np.random.default_rng(91).standard_normal((4, width))
    assert sync_batch(noise, "OOK", 2).tolist() == [-1] * 4


def test_isotonic_fit():
    assert isotonic_fit([0, 0, 0.1, 0.05, 0.5]) == \
        pytest.approx([0, 0, 0.075, 0.075, 0.5])
    assert isotonic_fit([3, 1, 2], increasing=False) == \
        pytest.approx([3, 1.5, 1.5])
    fit = isotonic_fit([0.5, 0.1, 0.2])
    assert all(a <= b for a, b in zip(fit, fit[1:]))
