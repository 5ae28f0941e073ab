"""Systematic Reed-Solomon codes RS(15, k) over GF(16).

Codewords are symbol lists c[0..14] where c[i] is the coefficient of
x^(14-i); the k message symbols come first, the 15-k parity symbols last.
The generator polynomial has the consecutive roots alpha^1 .. alpha^(15-k)
(first consecutive root fcr = 1).  Decoding is the classic chain:
syndromes, Berlekamp-Massey, Chien search, Forney.

`rs_encode`/`rs_decode` work on one codeword; the `*_blocks` variants run
whole nibble streams with a vectorised all-blocks syndrome check so that
clean blocks (the overwhelmingly common case) never enter the scalar
error path.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import SizeError, UncorrectableError
from .gf16 import (ALPHA, GF_EXP_NP, GF_LOG_NP, ORDER, gf16_inv, gf16_mul,
                   gf16_pow, poly_add, poly_eval, poly_mul, poly_scale)

N = 15
FCR = 1
VALID_K = (2, 4, 7, 11)


@dataclass(frozen=True)
class RsCode:
    """RS(15, k) parameters; t = floor((15-k)/2) correctable symbols."""

    n: int
    k: int

    def __post_init__(self):
        if self.n != N or self.k not in VALID_K:
            raise SizeError(f"unsupported RS({self.n},{self.k})")

    @property
    def nsym(self) -> int:
        return self.n - self.k

    @property
    def t(self) -> int:
        return (self.n - self.k) // 2


@lru_cache(maxsize=None)
def _generator_poly(nsym: int):
    g = [1]
    for i in range(nsym):
        g = poly_mul(g, [1, gf16_pow(ALPHA, i + FCR)])
    return g


@lru_cache(maxsize=None)
def _parity_matrix(k: int):
    """(k, nsym) parity of each unit message, for vectorised encoding."""
    code = RsCode(N, k)
    rows = []
    for i in range(k):
        msg = [0] * k
        msg[i] = 1
        rows.append(rs_encode(msg, code)[k:])
    return np.array(rows, dtype=np.uint8)


@lru_cache(maxsize=None)
def _syndrome_exponents(nsym: int):
    """(nsym, 15) exponent of alpha for each (syndrome, position) term."""
    j = np.arange(1, nsym + 1).reshape(-1, 1)
    deg = (N - 1) - np.arange(N).reshape(1, -1)
    return (j * deg) % ORDER


def rs_encode(msg, code: RsCode) -> list[int]:
    """Systematic encode: message followed by 15-k parity symbols."""
    msg = list(msg)
    if len(msg) != code.k:
        raise SizeError(f"message length {len(msg)} != k={code.k}")
    gen = _generator_poly(code.nsym)
    rem = msg + [0] * code.nsym
    for i in range(len(msg)):
        coef = rem[i]
        if coef:
            for j in range(1, len(gen)):
                rem[i + j] ^= gf16_mul(gen[j], coef)
    return msg + rem[len(msg):]


def _calc_syndromes(word, nsym: int) -> list[int]:
    # leading 0 keeps the usual one-based syndrome indexing
    return [0] + [poly_eval(word, gf16_pow(ALPHA, i + FCR)) for i in range(nsym)]


def _find_error_locator(synd, nsym: int):
    """Berlekamp-Massey; returns the error locator polynomial."""
    err_loc = [1]
    old_loc = [1]
    shift = len(synd) - nsym
    for i in range(nsym):
        kk = i + shift
        delta = synd[kk]
        for j in range(1, len(err_loc)):
            delta ^= gf16_mul(err_loc[-(j + 1)], synd[kk - j])
        old_loc = old_loc + [0]
        if delta:
            if len(old_loc) > len(err_loc):
                new_loc = poly_scale(old_loc, delta)
                old_loc = poly_scale(err_loc, gf16_inv(delta))
                err_loc = new_loc
            err_loc = poly_add(err_loc, poly_scale(old_loc, delta))
    while err_loc and err_loc[0] == 0:
        err_loc = err_loc[1:]
    return err_loc


def _find_errors(err_loc, nmess: int):
    """Chien search: positions whose locators are roots of err_loc."""
    errs = len(err_loc) - 1
    pos = []
    for i in range(nmess):
        if poly_eval(err_loc, gf16_pow(ALPHA, i)) == 0:
            pos.append(nmess - 1 - i)
    if len(pos) != errs:
        raise UncorrectableError("error locator degree does not match its roots")
    return pos


def _correct_errata(word, synd, err_pos):
    """Forney: compute magnitudes at err_pos and repair the word in place."""
    coef_pos = [len(word) - 1 - p for p in err_pos]
    loc = [1]
    for i in coef_pos:
        loc = poly_mul(loc, poly_add([1], [gf16_pow(ALPHA, i), 0]))
    # evaluator = synd * loc mod x^(len(loc))
    prod = poly_mul(synd[::-1], loc)
    eval_poly = prod[len(prod) - len(loc):]

    x_vals = [gf16_pow(ALPHA, c) for c in coef_pos]
    for i, xi in enumerate(x_vals):
        xi_inv = gf16_inv(xi)
        denom = 1
        for j, xj in enumerate(x_vals):
            if j != i:
                denom = gf16_mul(denom, 1 ^ gf16_mul(xi_inv, xj))
        if denom == 0:
            raise UncorrectableError("Forney denominator vanished")
        y = poly_eval(eval_poly, xi_inv)
        y = gf16_mul(gf16_pow(xi, 1 - FCR), y)
        word[err_pos[i]] ^= gf16_mul(y, gf16_inv(denom))
    return word


def rs_decode(word, code: RsCode) -> tuple[list[int], int]:
    """Correct up to t symbol errors; returns (message, corrected_count).

    Raises UncorrectableError when the error pattern exceeds the code's
    correction radius (the caller drops the frame).
    """
    word = list(word)
    if len(word) != code.n:
        raise SizeError(f"word length {len(word)} != n={code.n}")
    synd = _calc_syndromes(word, code.nsym)
    if max(synd) == 0:
        return word[: code.k], 0
    err_loc = _find_error_locator(synd, code.nsym)
    errs = len(err_loc) - 1
    if errs > code.t:
        raise UncorrectableError(f"{errs} errors exceed t={code.t}")
    err_pos = _find_errors(err_loc[::-1], len(word))
    _correct_errata(word, synd, err_pos)
    if max(_calc_syndromes(word, code.nsym)) != 0:
        raise UncorrectableError("residual syndromes after correction")
    return word[: code.k], errs


# -- whole-stream helpers ----------------------------------------------------

def rs_encode_blocks(nibbles: np.ndarray, code: RsCode) -> np.ndarray:
    """Encode a nibble stream; the last block is zero-padded to k symbols."""
    nibbles = np.asarray(nibbles, dtype=np.uint8)
    k = code.k
    nblocks = max(1, -(-nibbles.size // k)) if nibbles.size else 0
    msg = np.zeros((nblocks, k), dtype=np.uint8)
    msg.reshape(-1)[: nibbles.size] = nibbles
    parity = np.zeros((nblocks, code.nsym), dtype=np.uint8)
    pmat = _parity_matrix(k)
    logs = GF_LOG_NP[msg]
    for i in range(k):
        row = pmat[i]
        nz_row = row != 0
        contrib = GF_EXP_NP[(logs[:, i:i + 1] + GF_LOG_NP[row]) % ORDER]
        contrib = np.where((msg[:, i:i + 1] != 0) & nz_row, contrib, 0)
        parity ^= contrib
    out = np.empty((nblocks, N), dtype=np.uint8)
    out[:, :k] = msg
    out[:, k:] = parity
    return out.reshape(-1)


def rs_decode_blocks(symbols: np.ndarray, code: RsCode,
                     n_msg_symbols: int) -> tuple[np.ndarray, int]:
    """Decode a stream of whole codewords back to n_msg_symbols nibbles.

    All-block syndromes are computed in one vectorised pass; only blocks
    with nonzero syndromes take the scalar correction path.
    """
    symbols = np.asarray(symbols, dtype=np.uint8)
    if symbols.size % N:
        raise SizeError(f"symbol count {symbols.size} not a multiple of {N}")
    words = symbols.reshape(-1, N)
    expo = _syndrome_exponents(code.nsym)
    logs = GF_LOG_NP[words]
    terms = GF_EXP_NP[(logs[:, None, :] + expo[None, :, :]) % ORDER]
    terms = np.where(words[:, None, :] != 0, terms, 0)
    synd = np.bitwise_xor.reduce(terms, axis=2)
    dirty = np.nonzero(synd.any(axis=1))[0]

    msg = words[:, : code.k].copy()
    corrected = 0
    for b in dirty:
        fixed, nerr = rs_decode(words[b].tolist(), code)
        msg[b] = fixed
        corrected += nerr
    out = msg.reshape(-1)[:n_msg_symbols]
    if out.size < n_msg_symbols:
        raise SizeError("stream shorter than the requested message length")
    return out, corrected
