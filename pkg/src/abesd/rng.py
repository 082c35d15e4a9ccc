"""Entropy sources.

Every randomized operation in the package takes an ``Rng``. Production code
uses :class:`SystemRng`; tests and the benchmark use :class:`SeededRng` so
that presentations and golden vectors are reproducible.
"""

from __future__ import annotations

import hashlib
import secrets
import threading
from typing import MutableSequence


class Rng:
    """Base class: subclasses only provide :meth:`bytes`."""

    def bytes(self, n: int) -> bytes:
        raise NotImplementedError

    def below(self, bound: int) -> int:
        """Uniform-ish integer in ``[0, bound)`` (64 extra bits, bias < 2^-64)."""
        nbytes = (bound.bit_length() + 7) // 8 + 8
        return int.from_bytes(self.bytes(nbytes), "big") % bound

    def nonzero_below(self, bound: int) -> int:
        while True:
            v = self.below(bound)
            if v:
                return v

    def shuffle(self, items: MutableSequence) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]


class SystemRng(Rng):
    def bytes(self, n: int) -> bytes:
        return secrets.token_bytes(n)


class SeededRng(Rng):
    """Deterministic SHAKE-256 stream keyed by an integer or bytes seed.

    Not for production keys: anyone who knows the seed knows the output.
    """

    def __init__(self, seed: int | bytes | str = 0):
        if isinstance(seed, int):
            seed = seed.to_bytes((seed.bit_length() + 8) // 8, "big", signed=True)
        elif isinstance(seed, str):
            seed = seed.encode()
        self._key = hashlib.sha256(b"abesd-seeded-rng" + seed).digest()
        self._counter = 0
        self._buf = b""
        self._lock = threading.Lock()

    def bytes(self, n: int) -> bytes:
        with self._lock:
            while len(self._buf) < n:
                block = hashlib.shake_256(self._key + self._counter.to_bytes(8, "big")).digest(136)
                self._counter += 1
                self._buf += block
            out, self._buf = self._buf[:n], self._buf[n:]
            return out

    def fork(self, label: str) -> "SeededRng":
        """Independent child stream, stable regardless of parent consumption."""
        return SeededRng(self._key + label.encode())


def default_rng() -> Rng:
    return SystemRng()
