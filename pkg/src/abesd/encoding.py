"""base64url and compact-JSON helpers used by every wire format."""

from __future__ import annotations

import base64
import binascii
import json
import re
from typing import Any

_B64URL_RE = re.compile(r"[A-Za-z0-9_-]*")


def b64url_encode(data: bytes) -> str:
    return base64.urlsafe_b64encode(data).rstrip(b"=").decode("ascii")


def b64url_decode(text: str) -> bytes:
    """Strict unpadded base64url decode.

    Rejects padding, characters outside the url-safe alphabet, impossible
    lengths and non-zero trailing bits, so every byte string has exactly one
    accepted textual form.
    """
    if not isinstance(text, str) or not _B64URL_RE.fullmatch(text) or len(text) % 4 == 1:
        raise ValueError("invalid base64url text")
    try:
        raw = base64.urlsafe_b64decode(text + "=" * (-len(text) % 4))
    except binascii.Error as exc:
        raise ValueError("invalid base64url text") from exc
    if b64url_encode(raw) != text:
        raise ValueError("non-canonical base64url text")
    return raw


def dumps(obj: Any) -> str:
    """Compact JSON, UTF-8 preserved, NaN/Infinity rejected."""
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def _reject_constant(name: str):
    raise ValueError(f"non-standard JSON constant {name}")


def loads(text: str | bytes) -> Any:
    return json.loads(text, parse_constant=_reject_constant)
