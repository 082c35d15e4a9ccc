"""Holder side: encrypt Disclosures under policies and bind the presentation."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from cryptography.hazmat.primitives.asymmetric import ec
from cryptography.hazmat.primitives.ciphers.aead import AESGCM

from . import jose
from .abe import AbeEncapsulation, AbeSystemParams, AttributeSecretKey, abe_decapsulate, abe_encapsulate
from .encoding import b64url_decode, b64url_encode, dumps, loads
from .errors import (
    LengthMismatch,
    MalformedCiphertext,
    MalformedSegment,
    PolicyError,
    UnknownDisclosure,
)
from .policy import Policy, as_policy, serialize_policy
from .rng import Rng, default_rng
from .sdjwt import (
    Disclosure,
    DisclosureEncoding,
    IssuerSignedJwt,
    digest_disclosure,
    sd_hash,
    serialize_presentation,
)

KB_TYP = "kb+abe+jwt"
NONCE_LEN = 12
_WIRE_KEYS = ("pcy", "kem", "iv", "ct")


@dataclass(frozen=True)
class EncryptedDisclosure:
    policy_text: str
    encapsulation: AbeEncapsulation
    aead_nonce: bytes
    aead_ct: bytes
    wire: str = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.wire is None:
            obj = {
                "pcy": self.policy_text,
                "kem": b64url_encode(self.encapsulation.to_bytes()),
                "iv": b64url_encode(self.aead_nonce),
                "ct": b64url_encode(self.aead_ct),
            }
            object.__setattr__(self, "wire", b64url_encode(dumps(obj).encode("utf-8")))

    def __str__(self):
        return self.wire

    @classmethod
    def from_wire(cls, text: str) -> "EncryptedDisclosure":
        """Strictly decode a wire segment; anything non-canonical is MalformedSegment."""
        try:
            obj = loads(b64url_decode(text).decode("utf-8"))
            if not isinstance(obj, dict) or tuple(obj) != _WIRE_KEYS:
                raise ValueError("expected object with keys pcy, kem, iv, ct")
            if not all(isinstance(obj[k], str) for k in _WIRE_KEYS):
                raise ValueError("wire members must be strings")
            enc = AbeEncapsulation.from_bytes(b64url_decode(obj["kem"]))
            nonce = b64url_decode(obj["iv"])
            ct = b64url_decode(obj["ct"])
        except (ValueError, UnicodeDecodeError, MalformedCiphertext, PolicyError) as exc:
            raise MalformedSegment(f"undecodable encrypted disclosure: {exc}") from exc
        if obj["pcy"] != enc.policy_text:
            raise MalformedSegment("pcy does not match the policy inside the encapsulation")
        if len(nonce) != NONCE_LEN or len(ct) < 16:
            raise MalformedSegment("bad AEAD nonce or ciphertext length")
        out = cls(obj["pcy"], enc, nonce, ct)
        if out.wire != text:
            raise MalformedSegment("non-canonical wire encoding")
        return out


def encrypt_disclosure(
    params: AbeSystemParams,
    enc: DisclosureEncoding | Disclosure,
    policy: Policy | str,
    rng: Rng | None = None,
) -> EncryptedDisclosure:
    """ABE-encapsulate a fresh AES-256-GCM key and seal the encoding text with it.

    The canonical policy text is the AEAD associated data.
    """
    rng = rng or default_rng()
    if isinstance(enc, Disclosure):
        enc = enc.encoding
    policy = as_policy(policy)
    key, kem = abe_encapsulate(params, policy, rng)
    nonce = rng.bytes(NONCE_LEN)
    text = serialize_policy(policy)
    ct = AESGCM(key).encrypt(nonce, enc.text.encode("utf-8"), text.encode("utf-8"))
    return EncryptedDisclosure(text, kem, nonce, ct)


def decrypt_disclosure(sk: AttributeSecretKey, params: AbeSystemParams, ed: EncryptedDisclosure) -> str:
    """Return the plaintext encoding text; PolicyNotSatisfied or InvalidTag on failure."""
    key = abe_decapsulate(sk, params, ed.encapsulation)
    return AESGCM(key).decrypt(ed.aead_nonce, ed.aead_ct, ed.policy_text.encode("utf-8")).decode("utf-8")


@dataclass(frozen=True)
class KeyBindingJwt:
    header: dict
    payload: dict
    signature: bytes
    compact_text: str

    def __str__(self):
        return self.compact_text


def build_kb_jwt(
    issuer_jwt_text: str,
    encrypted: Sequence[EncryptedDisclosure],
    plain_digests: Sequence[str],
    aud: str,
    nonce: str,
    iat: int,
    holder_key: ec.EllipticCurvePrivateKey,
) -> KeyBindingJwt:
    if len(encrypted) != len(plain_digests):
        raise LengthMismatch(f"{len(encrypted)} encrypted disclosures but {len(plain_digests)} digests")
    segments = [e.wire for e in encrypted]
    payload = {
        "iat": int(iat),
        "aud": aud,
        "nonce": nonce,
        "sd_hash": sd_hash(str(issuer_jwt_text), segments),
        "_sd": list(plain_digests),
        "abe_pcy": [e.policy_text for e in encrypted],
    }
    header = {"alg": jose.ALG, "typ": KB_TYP}
    text = jose.sign_compact(header, payload, holder_key)
    jws = jose.parse_compact(text)
    return KeyBindingJwt(jws.header, jws.payload, jws.signature, text)


@dataclass(frozen=True)
class CompactPresentation:
    text: str
    issuer_jwt: str
    encrypted: tuple
    kb_jwt: KeyBindingJwt

    def __str__(self):
        return self.text


def present(
    issuer_jwt: IssuerSignedJwt | str,
    disclosures: Iterable[tuple[Disclosure, Policy | str]],
    params: AbeSystemParams,
    holder_key: ec.EllipticCurvePrivateKey,
    aud: str,
    nonce: str,
    clock: Callable[[], float] = time.time,
    rng: Rng | None = None,
) -> CompactPresentation:
    """Encrypt the selected Disclosures and assemble ``issuer~enc...~kb``.

    Disclosures not passed in are left out of the presentation entirely.
    """
    rng = rng or default_rng()
    if not isinstance(issuer_jwt, IssuerSignedJwt):
        issuer_jwt = IssuerSignedJwt.from_text(issuer_jwt)
    known = set(issuer_jwt.sd_digests)
    selected = list(disclosures)
    digests = []
    for d, _ in selected:
        dg = digest_disclosure(d.encoding)
        if dg not in known:
            raise UnknownDisclosure(f"disclosure for {d.claim_name!r} is not part of this credential")
        digests.append(dg)
    encrypted = [encrypt_disclosure(params, d.encoding, pol, rng) for d, pol in selected]
    kb = build_kb_jwt(issuer_jwt.compact_text, encrypted, digests, aud, nonce, int(clock()), holder_key)
    text = serialize_presentation(issuer_jwt.compact_text, [e.wire for e in encrypted], kb.compact_text)
    return CompactPresentation(text, issuer_jwt.compact_text, tuple(encrypted), kb)


__all__ = [
    "CompactPresentation",
    "EncryptedDisclosure",
    "KB_TYP",
    "KeyBindingJwt",
    "build_kb_jwt",
    "decrypt_disclosure",
    "encrypt_disclosure",
    "present",
]
