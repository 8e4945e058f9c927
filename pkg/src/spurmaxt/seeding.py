"""Labeled-hash seed derivation.

Every random stream in a run is derived from one 64-bit run seed as
``blake2b(run_seed / label_1 / label_2 / ...)`` truncated to 8 bytes, so a
single seed reproduces everything regardless of execution order.
"""

import hashlib
import secrets

import numpy as np

SEED_SCHEME = "blake2b-64(seed/label/...)"


def derive_seed(seed, *labels):
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(seed)).encode())
    for label in labels:
        h.update(b"/")
        h.update(str(label).encode())
    return int.from_bytes(h.digest(), "little")


def rng_for(seed, *labels):
    return np.random.default_rng(derive_seed(seed, *labels))


def fresh_seed():
    return secrets.randbits(64)
