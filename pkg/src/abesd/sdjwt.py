"""SD-JWT building blocks: Disclosures, digests, issuance, presentations."""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

from cryptography.hazmat.primitives.asymmetric import ec

from . import jose
from .encoding import b64url_decode, b64url_encode, dumps, loads
from .errors import (
    DuplicateClaimName,
    MalformedDisclosure,
    MalformedPresentation,
    NonSerializableValue,
)
from .rng import Rng, default_rng

SD_ALG = "sha-256"
ISSUER_TYP = "sd+jwt"
SALT_LEN = 16
SEPARATOR = "~"

# claim names the issuer payload uses for its own bookkeeping
RESERVED_CLAIMS = frozenset({"iss", "iat", "cnf", "_sd", "_sd_alg", "..."})


@dataclass(frozen=True)
class DisclosureEncoding:
    text: str

    def decode(self) -> "Disclosure":
        return decode_disclosure(self.text)


@dataclass(frozen=True)
class Disclosure:
    """Salted claim. The encoding is fixed when the object is created."""

    salt: bytes
    claim_name: str
    claim_value: Any
    encoding: DisclosureEncoding = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.encoding is None:
            object.__setattr__(self, "encoding", _encode(self))

    @property
    def digest(self) -> str:
        return digest_disclosure(self.encoding)


def _encode(d: Disclosure) -> DisclosureEncoding:
    try:
        text = dumps([b64url_encode(d.salt), d.claim_name, d.claim_value])
    except (TypeError, ValueError) as exc:
        raise NonSerializableValue(f"claim {d.claim_name!r} is not JSON-serializable: {exc}") from exc
    return DisclosureEncoding(b64url_encode(text.encode("utf-8")))


def encode_disclosure(d: Disclosure) -> DisclosureEncoding:
    return d.encoding


def decode_disclosure(text: str) -> Disclosure:
    try:
        arr = loads(b64url_decode(text).decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise MalformedDisclosure(f"undecodable disclosure: {exc}") from exc
    if not isinstance(arr, list) or len(arr) != 3 or not isinstance(arr[1], str) or not isinstance(arr[0], str):
        raise MalformedDisclosure("disclosure must be [salt, claim_name, claim_value]")
    try:
        salt = b64url_decode(arr[0])
    except ValueError as exc:
        raise MalformedDisclosure("salt is not base64url") from exc
    return Disclosure(salt, arr[1], arr[2], DisclosureEncoding(text))


def digest_disclosure(enc: DisclosureEncoding | str) -> str:
    text = enc.text if isinstance(enc, DisclosureEncoding) else enc
    return b64url_encode(hashlib.sha256(text.encode("utf-8")).digest())


def make_disclosure(name: str, value: Any, rng: Rng | None = None) -> Disclosure:
    rng = rng or default_rng()
    return Disclosure(rng.bytes(SALT_LEN), name, value)


@dataclass(frozen=True)
class IssuerSignedJwt:
    header: dict
    payload: dict
    signature: bytes
    compact_text: str

    @property
    def sd_digests(self) -> list:
        return list(self.payload.get("_sd", []))

    @classmethod
    def from_text(cls, text: str) -> "IssuerSignedJwt":
        jws = jose.parse_compact(text)
        return cls(jws.header, jws.payload, jws.signature, text)

    def __str__(self):
        return self.compact_text


def issue(
    claims: Mapping[str, Any],
    visible_claims: Mapping[str, Any] | None,
    holder_pub,
    issuer_key: ec.EllipticCurvePrivateKey,
    rng: Rng | None = None,
    *,
    iss: str = "https://issuer.example",
    clock: Callable[[], float] = time.time,
) -> tuple[IssuerSignedJwt, list[Disclosure]]:
    """Issue an SD-JWT: one Disclosure per entry of ``claims``.

    ``holder_pub`` (a P-256 key or public JWK dict) is placed in ``cnf``.
    The ``_sd`` digest array is shuffled so its order reveals nothing.
    """
    rng = rng or default_rng()
    visible_claims = dict(visible_claims or {})
    clash = (set(claims) & set(visible_claims)) | ((set(claims) | set(visible_claims)) & RESERVED_CLAIMS)
    if clash:
        raise DuplicateClaimName(f"claim names used twice or reserved: {sorted(clash)}")
    disclosures = [make_disclosure(name, value, rng) for name, value in claims.items()]
    digests = [d.digest for d in disclosures]
    rng.shuffle(digests)
    cnf_jwk = holder_pub if isinstance(holder_pub, Mapping) else jose.public_jwk(holder_pub)
    payload = {"iss": iss, "iat": int(clock()), **visible_claims, "cnf": {"jwk": dict(cnf_jwk)},
               "_sd": digests, "_sd_alg": SD_ALG}
    header = {"alg": jose.ALG, "typ": ISSUER_TYP}
    text = jose.sign_compact(header, payload, issuer_key)
    jws = jose.parse_compact(text)
    return IssuerSignedJwt(jws.header, jws.payload, jws.signature, text), disclosures


def parse_presentation(text: str) -> tuple[str, list[str], str]:
    """Split ``issuer~enc1~...~encN~kb`` into its parts, verbatim."""
    if not isinstance(text, str):
        raise MalformedPresentation("presentation must be text")
    parts = text.split(SEPARATOR)
    if len(parts) < 2:
        raise MalformedPresentation("a presentation needs at least an issuer JWT and a KB-JWT")
    if not parts[-1]:
        raise MalformedPresentation("empty Key Binding JWT segment")
    return parts[0], parts[1:-1], parts[-1]


def serialize_presentation(issuer_jwt: str, encrypted_disclosures: Sequence[str], kb_jwt: str) -> str:
    if not kb_jwt:
        raise MalformedPresentation("Key Binding JWT must be non-empty")
    return SEPARATOR.join([str(issuer_jwt), *map(str, encrypted_disclosures), str(kb_jwt)])


def presentation_prefix(issuer_jwt: str, encrypted_disclosures: Sequence[str]) -> str:
    """``issuer~enc1~...~encN~``: the bytes covered by ``sd_hash``."""
    return "".join(f"{s}{SEPARATOR}" for s in [str(issuer_jwt), *map(str, encrypted_disclosures)])


def sd_hash(issuer_jwt: str, encrypted_disclosures: Sequence[str]) -> str:
    # well-formed presentations are ASCII, for which UTF-8 is the identity
    prefix = presentation_prefix(issuer_jwt, encrypted_disclosures)
    return b64url_encode(hashlib.sha256(prefix.encode("utf-8")).digest())
