"""BLS12-381 pairing groups with a native core and a pure-Python fallback.

The backend is picked once at import. ``ABESD_BACKEND=pure`` forces the
fallback, ``ABESD_BACKEND=native`` makes a missing extension an error;
anything else (the default) prefers native and falls back silently.
Both backends produce byte-identical encodings and pairing values.
"""

from __future__ import annotations

import hashlib
import os
from collections import Counter
from types import ModuleType

from . import _pure

CURVE_ID = "BLS12-381"
R = _pure.R
P = _pure.P

# effective cofactor for G1 (1 - x)
G1_H_EFF = 0xD201000000010001


def load_backend(name: str) -> ModuleType:
    """Return the backend module called ``name`` ("native" or "pure")."""
    if name == "pure":
        return _pure
    if name == "native":
        from .. import _native

        return _native
    raise ValueError(f"unknown pairing backend {name!r}")


def _select() -> tuple[str, ModuleType]:
    wanted = os.environ.get("ABESD_BACKEND", "auto").lower()
    if wanted == "pure":
        return "pure", _pure
    try:
        return "native", load_backend("native")
    except ImportError:
        if wanted == "native":
            raise
        return "pure", _pure


BACKEND, _impl = _select()

G1 = _impl.G1
G2 = _impl.G2
GT = _impl.GT

# Miller loops executed, for tests that assert no pairing work was done.
OP_COUNTS: Counter = Counter()


def reset_counters() -> None:
    OP_COUNTS.clear()


def pairing(p: G1, q: G2) -> GT:
    OP_COUNTS["pairings"] += 1
    return _impl.pairing(p, q)


def multi_pairing(pairs) -> GT:
    """Product of pairings sharing one final exponentiation."""
    pairs = list(pairs)
    OP_COUNTS["pairings"] += len(pairs)
    return _impl.multi_pairing(pairs)


def hash_to_g1(data: bytes, dst: bytes, backend: ModuleType | None = None) -> G1:
    """Hash bytes to a G1 point by try-and-increment plus cofactor clearing.

    Each attempt derives an x-coordinate and a sign bit from SHAKE-256 over
    ``len(dst) || dst || counter || data``; the first x on the curve is
    decompressed and multiplied by the effective cofactor.
    """
    mod = backend or _impl
    prefix = bytes([len(dst)]) + dst
    for ctr in range(256):
        h = hashlib.shake_256(prefix + bytes([ctr]) + data).digest(65)
        x = int.from_bytes(h[:64], "big") % P
        rhs = (x * x * x + 4) % P
        if rhs == 0 or pow(rhs, (P - 1) // 2, P) != 1:
            continue
        enc = bytearray(x.to_bytes(48, "big"))
        enc[0] |= 0x80 | (0x20 if h[64] & 1 else 0)
        point = mod.G1._from_bytes_unchecked(bytes(enc))._unchecked_mul(G1_H_EFF)
        if not point.is_identity():
            return point
    raise RuntimeError("hash_to_g1 exhausted its counter")  # probability ~2^-256


__all__ = [
    "BACKEND",
    "CURVE_ID",
    "G1",
    "G2",
    "GT",
    "OP_COUNTS",
    "R",
    "hash_to_g1",
    "load_backend",
    "multi_pairing",
    "pairing",
    "reset_counters",
]
