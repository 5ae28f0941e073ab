"""Constraint-length-7 convolutional code with a hard-decision Viterbi decoder.

The rate-1/3 mother code uses the octal generators (133, 171, 165); the
MSB of each generator taps the current input bit.  Six zero tail bits
flush the encoder so every block starts and ends in state 0.

Derived rates:
  1/4  - the first generator's output is sent twice per input bit
         (slots g0 g1 g2 g0)
  2/3  - puncturing with period 2: slots g0 g1 for even input bits,
         slot g0 for odd ones

The decoder rebuilds per-step branch metrics with zeros in punctured
slots and summed contributions for repeated slots, then runs a single
add-compare-select kernel over the 64-state trellis.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numba import njit

from .errors import SizeError

CONSTRAINT_LENGTH = 7
GENERATORS = (0o133, 0o171, 0o165)
TAIL_BITS = CONSTRAINT_LENGTH - 1
N_STATES = 1 << TAIL_BITS

RATE_13 = Fraction(1, 3)
RATE_14 = Fraction(1, 4)
RATE_23 = Fraction(2, 3)

# slot pattern per input-bit period: generator indices emitted at each step
_SLOT_PATTERNS = {
    RATE_13: ((0, 1, 2),),
    RATE_14: ((0, 1, 2, 0),),
    RATE_23: ((0, 1), (0,)),
}


@dataclass(frozen=True)
class ConvCode:
    rate: Fraction

    def __post_init__(self):
        if self.rate not in _SLOT_PATTERNS:
            raise SizeError(f"unsupported convolutional rate {self.rate}")

    @property
    def constraint_length(self) -> int:
        return CONSTRAINT_LENGTH

    @property
    def generators(self) -> tuple[int, int, int]:
        return GENERATORS

    @property
    def slot_pattern(self):
        return _SLOT_PATTERNS[self.rate]


def _parity(x: int) -> int:
    return bin(x).count("1") & 1


@lru_cache(maxsize=1)
def _trellis():
    """(next_state, out_sym) int32 arrays of shape (64, 2)."""
    nxt = np.zeros((N_STATES, 2), dtype=np.int32)
    sym = np.zeros((N_STATES, 2), dtype=np.int32)
    for s in range(N_STATES):
        for b in (0, 1):
            window = (b << TAIL_BITS) | s
            out = 0
            for g in GENERATORS:
                out = (out << 1) | _parity(window & g)
            sym[s, b] = out
            nxt[s, b] = window >> 1
    return nxt, sym


@lru_cache(maxsize=None)
def _slot_indices(rate: Fraction, nsteps: int):
    """Flat (step, generator) indices of the transmitted slots."""
    pattern = _SLOT_PATTERNS[rate]
    steps, gens = [], []
    for t in range(nsteps):
        for g in pattern[t % len(pattern)]:
            steps.append(t)
            gens.append(g)
    steps = np.array(steps, dtype=np.int64)
    gens = np.array(gens, dtype=np.int64)
    flat = steps * 3 + gens
    return steps, gens, flat


def _coded_length(rate: Fraction, nsteps: int) -> int:
    pattern = _SLOT_PATTERNS[rate]
    full, rem = divmod(nsteps, len(pattern))
    n = full * sum(len(p) for p in pattern)
    n += sum(len(pattern[i]) for i in range(rem))
    return n


def _steps_for_length(rate: Fraction, nbits: int) -> int:
    pattern = _SLOT_PATTERNS[rate]
    per_period = sum(len(p) for p in pattern)
    period = len(pattern)
    full, rem = divmod(nbits, per_period)
    nsteps = full * period
    take = 0
    while rem > 0:
        rem -= len(pattern[take % period])
        take += 1
    if rem != 0:
        raise SizeError(f"coded length {nbits} inconsistent with rate {rate}")
    return nsteps + take


@njit(cache=True)
def _encode_kernel(padded, next_state, out_sym):
    T = padded.shape[0]
    out = np.empty((T, 3), np.uint8)
    s = np.int64(0)
    for t in range(T):
        b = np.int64(padded[t])
        o = np.int64(out_sym[s, b])
        out[t, 0] = np.uint8((o >> 2) & 1)
        out[t, 1] = np.uint8((o >> 1) & 1)
        out[t, 2] = np.uint8(o & 1)
        s = np.int64(next_state[s, b])
    return out


def conv_encode(bits, code: ConvCode) -> np.ndarray:
    """Encode bits plus 6 zero tail bits at the code's rate."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size == 0:
        return np.zeros(0, dtype=np.uint8)
    nxt, sym = _trellis()
    padded = np.concatenate([bits, np.zeros(TAIL_BITS, dtype=np.uint8)])
    mother = _encode_kernel(padded, nxt, sym)
    _, _, flat = _slot_indices(code.rate, padded.size)
    return mother.reshape(-1)[flat]


@njit(cache=True)
def _acs_kernel(metrics, next_state, out_sym):
    """Add-compare-select over the 64-state trellis, traceback from state 0.

    metrics: (T, 3, 2) int32 cost of deciding each generator bit 0/1.
    """
    T = metrics.shape[0]
    n = next_state.shape[0]
    INF = np.int32(1 << 28)
    pm = np.full(n, INF, np.int32)
    pm[0] = 0
    pm_next = np.empty(n, np.int32)
    bp = np.zeros((T, n), np.uint8)
    bm = np.empty(8, np.int32)
    for t in range(T):
        for o in range(8):
            bm[o] = (metrics[t, 0, (o >> 2) & 1]
                     + metrics[t, 1, (o >> 1) & 1]
                     + metrics[t, 2, o & 1])
        for i in range(n):
            pm_next[i] = INF
        for s in range(n):
            m = pm[s]
            if m >= INF:
                continue
            for b in range(2):
                ns = next_state[s, b]
                cand = m + bm[out_sym[s, b]]
                if cand < pm_next[ns]:
                    pm_next[ns] = cand
                    bp[t, ns] = np.uint8((s << 1) | b)
        for i in range(n):
            pm[i] = pm_next[i]
    bits = np.empty(T, np.uint8)
    st = np.int64(0)
    for t in range(T - 1, -1, -1):
        e = np.int64(bp[t, st])
        bits[t] = np.uint8(e & 1)
        st = e >> 1
    return bits


def viterbi_decode(bits, code: ConvCode) -> np.ndarray:
    """Maximum-likelihood decode (Hamming metric); strips the tail bits."""
    rx = np.asarray(bits, dtype=np.uint8)
    if rx.size == 0:
        return np.zeros(0, dtype=np.uint8)
    nsteps = _steps_for_length(code.rate, rx.size)
    if nsteps < TAIL_BITS:
        raise SizeError(f"{rx.size} coded bits are shorter than the tail")
    _, _, flat = _slot_indices(code.rate, nsteps)
    ncells = nsteps * 6
    m0 = np.bincount(2 * flat, weights=(rx != 0), minlength=ncells)
    m1 = np.bincount(2 * flat + 1, weights=(rx != 1), minlength=ncells)
    metrics = (m0 + m1).reshape(nsteps, 3, 2).astype(np.int32)
    nxt, sym = _trellis()
    decoded = _acs_kernel(metrics, nxt, sym)
    return decoded[: nsteps - TAIL_BITS]
