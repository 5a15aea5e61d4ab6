import hashlib
from functools import lru_cache

import numpy as np
from Crypto.Cipher import AES

###############
### Keyed counter-based generator
###############

# Changing this label changes every sampled configuration.
_KEY_LABEL = b"finitary_beta.keyed_sampler.v1"

_UINT64_MASK = (1 << 64) - 1
_MANTISSA_SCALE = 2.0 ** -53


@lru_cache(maxsize=1)
def _cipher():
    """AES-128 in ECB mode; each 16-byte counter block is encrypted independently."""
    key_bytes = hashlib.blake2b(_KEY_LABEL, digest_size=16).digest()
    return AES.new(key_bytes, AES.MODE_ECB)


@lru_cache(maxsize=65536)
def word_digest(token: str) -> int:
    """64-bit digest of a canonical word serialization."""
    return int.from_bytes(hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest(), "big")


def _as_seed_array(seeds) -> np.ndarray:
    if np.isscalar(seeds):
        return np.array([int(seeds) & _UINT64_MASK], dtype=np.uint64)
    arr = np.asarray(seeds)
    if arr.dtype == object:
        return np.array([int(s) & _UINT64_MASK for s in arr], dtype=np.uint64)
    # negative int64 seeds wrap modulo 2^64
    return arr.astype(np.int64).astype(np.uint64)


def counter_blocks(seeds, token: str) -> bytes:
    """Block i is seed_i (big-endian uint64) followed by the word digest."""
    seed_arr = _as_seed_array(seeds)
    blocks = np.empty((seed_arr.size, 2), dtype=">u8")
    blocks[:, 0] = seed_arr
    blocks[:, 1] = word_digest(token)
    return blocks.tobytes()


def uniforms(seeds, token: str) -> np.ndarray:
    """
    Uniform values in [0, 1) keyed on (seed, word), one per seed.

    Args:
        seeds: int or array of ints.
        token (str): canonical serialization of the group element.

    Returns:
        np.ndarray: float64 array with 53 random bits per entry.
    """
    encrypted = _cipher().encrypt(counter_blocks(seeds, token))
    words = np.frombuffer(encrypted, dtype=">u8").reshape(-1, 2)[:, 0]
    return (words >> np.uint64(11)).astype(np.float64) * _MANTISSA_SCALE


def uniform(seed: int, token: str) -> float:
    return float(uniforms(seed, token)[0])
