"""Word-level bit primitives, one implementation per execution path.

Words are ``uint64`` with bit ``k`` of word ``w`` holding position ``64*w + k``.
Under numba the primitives are SWAR/shift code on ``uint64`` scalars; on the
fallback path they go through Python ints, which avoids numpy scalar overflow
warnings and is considerably faster than numpy scalar arithmetic.
"""
import numpy as np

from ._accel import JIT_ENABLED, jit

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_ONE = np.uint64(1)
_ZERO = np.uint64(0)
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1

if JIT_ENABLED:

    @jit
    def popcount64(x):
        x = x - ((x >> _ONE) & _M1)
        x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
        x = (x + (x >> np.uint64(4))) & _M4
        return np.int64((x * _H01) >> np.uint64(56))

    @jit
    def popcount_low(x, r):
        # ones among the lowest r bits, 0 <= r < 64
        if r == 0:
            return 0
        return popcount64(x & ((_ONE << np.uint64(r)) - _ONE))

    @jit
    def bit_at(words, p):
        return np.int64((words[p >> 6] >> np.uint64(p & 63)) & _ONE)

    @jit
    def select_in_word(x, k):
        # 0-based index of the k-th (1-based) set bit of x
        for b in range(64):
            if (x >> np.uint64(b)) & _ONE:
                k -= 1
                if k == 0:
                    return b
        return -1

    @jit
    def set_bit(words, p):
        p = int(p)
        words[p >> 6] |= _ONE << np.uint64(p & 63)

    @jit
    def clear_bit(words, p):
        p = int(p)
        words[p >> 6] &= ~(_ONE << np.uint64(p & 63))

    @jit
    def read_bits(words, pos, width):
        w = pos >> 6
        off = pos & 63
        v = words[w] >> np.uint64(off)
        if off + width > 64:
            v |= words[w + 1] << np.uint64(64 - off)
        if width < 64:
            v &= (_ONE << np.uint64(width)) - _ONE
        return np.int64(v)

    @jit
    def fnv1a64(data):
        h = np.uint64(_FNV_OFFSET)
        prime = np.uint64(_FNV_PRIME)
        for i in range(data.shape[0]):
            h = (h ^ np.uint64(data[i])) * prime
        return h

else:

    def popcount64(x):
        return int(x).bit_count()

    def popcount_low(x, r):
        return (int(x) & ((1 << int(r)) - 1)).bit_count()

    def bit_at(words, p):
        p = int(p)
        return (int(words[p >> 6]) >> (p & 63)) & 1

    def select_in_word(x, k):
        x = int(x)
        for _ in range(int(k) - 1):
            x &= x - 1
        if x == 0:
            return -1
        return (x & -x).bit_length() - 1

    def set_bit(words, p):
        p = int(p)
        words[p >> 6] = int(words[p >> 6]) | (1 << (p & 63))

    def clear_bit(words, p):
        p = int(p)
        words[p >> 6] = int(words[p >> 6]) & ~(1 << (p & 63)) & _MASK64

    def read_bits(words, pos, width):
        pos, width = int(pos), int(width)
        w = pos >> 6
        off = pos & 63
        v = int(words[w]) >> off
        if off + width > 64:
            v |= int(words[w + 1]) << (64 - off)
        return v & ((1 << width) - 1)

    def fnv1a64(data):
        h = _FNV_OFFSET
        for b in bytes(memoryview(np.ascontiguousarray(data)).cast("B")):
            h = ((h ^ b) * _FNV_PRIME) & _MASK64
        return h


def fnv1a64_bytes(buf) -> int:
    """FNV-1a over a bytes-like object."""
    return int(fnv1a64(np.frombuffer(buf, dtype=np.uint8)))


_POP8 = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)


def pack_bits(bits: np.ndarray, n_words: int) -> np.ndarray:
    """Pack a boolean array little-endian into ``n_words`` uint64 words."""
    raw = np.packbits(np.asarray(bits, dtype=bool), bitorder="little")
    buf = np.zeros(n_words * 8, dtype=np.uint8)
    buf[: raw.size] = raw
    return buf.view("<u8").astype(np.uint64)


def word_popcounts(words: np.ndarray) -> np.ndarray:
    return _POP8[words.view(np.uint8)].reshape(-1, 8).sum(axis=1)
