import numpy as np
import pytest

from silence.errors import InvalidCodewordError, InvalidPairError, SizeError
from silence.line_codes import (FOURB6B_TABLE, fourb6b_decode, fourb6b_encode,
                                manchester_decode, manchester_encode)


class TestManchester:
    def test_empty(self):
        assert manchester_encode([]).size == 0
        assert manchester_decode([]).size == 0

    def test_convention(self):
        assert list(manchester_encode([0])) == [0, 1]
        assert list(manchester_encode([1])) == [1, 0]
        assert list(manchester_encode([1, 0, 1])) == [1, 0, 0, 1, 1, 0]
        assert list(manchester_decode([0, 1])) == [0]

    def test_inverted_convention(self):
        assert list(manchester_encode([0], inverted=True)) == [1, 0]
        bits = [0, 1, 1, 0]
        chips = manchester_encode(bits, inverted=True)
        assert list(manchester_decode(chips, inverted=True)) == bits

    def test_roundtrip_exhaustive_all_bytes(self):
        for value in range(256):
            bits = [(value >> s) & 1 for s in range(7, -1, -1)]
            assert list(manchester_decode(manchester_encode(bits))) == bits

    def test_rate_and_dc_balance(self):
        rng = np.random.default_rng(0)
        bits = rng.integers(0, 2, 999)
        chips = manchester_encode(bits)
        assert chips.size == 2 * bits.size
        assert int(chips.sum()) == bits.size     # half ones, whatever the data

    def test_invalid_pairs(self):
        with pytest.raises(InvalidPairError) as err:
            manchester_decode([1, 1])
        assert err.value.index == 0
        with pytest.raises(InvalidPairError) as err:
            manchester_decode([0, 1, 0, 0, 1, 0])
        assert err.value.index == 1

    def test_odd_length(self):
        with pytest.raises(SizeError):
            manchester_decode([0, 1, 1])


class TestFourB6B:
    def test_table_is_weight_3_and_distinct(self):
        weights = [bin(w).count("1") for w in FOURB6B_TABLE]
        assert weights == [3] * 16
        assert len(set(FOURB6B_TABLE)) == 16

    def test_roundtrip_exhaustive_all_nibbles(self):
        for nibble in range(16):
            bits = [(nibble >> s) & 1 for s in range(3, -1, -1)]
            chips = fourb6b_encode(bits)
            assert chips.size == 6
            assert int(chips.sum()) == 3
            assert list(fourb6b_decode(chips)) == bits

    def test_rate_and_dc_balance(self):
        rng = np.random.default_rng(1)
        bits = rng.integers(0, 2, 4 * 500)
        chips = fourb6b_encode(bits)
        assert chips.size * 2 == bits.size * 3
        assert int(chips.sum()) * 2 == chips.size   # exactly half ones

    def test_length_errors(self):
        with pytest.raises(SizeError):
            fourb6b_encode([1, 0, 1, 1, 0])
        with pytest.raises(SizeError):
            fourb6b_decode([0] * 7)

    def test_invalid_codewords(self):
        with pytest.raises(InvalidCodewordError) as err:
            fourb6b_decode([0, 0, 0, 0, 0, 0])
        assert err.value.index == 0
        # 111000 is not in the transcribed table even though its weight is 3
        assert 0b111000 not in FOURB6B_TABLE
        with pytest.raises(InvalidCodewordError):
            fourb6b_decode([1, 1, 1, 0, 0, 0])
        good = fourb6b_encode([0, 0, 0, 0])
        bad = np.concatenate([good, [1, 1, 1, 0, 0, 0]])
        with pytest.raises(InvalidCodewordError) as err:
            fourb6b_decode(bad)
        assert err.value.index == 1

    def test_long_roundtrip(self):
        rng = np.random.default_rng(2)
        bits = rng.integers(0, 2, 4 * 4096)
        assert np.array_equal(fourb6b_decode(fourb6b_encode(bits)), bits)
