"""Minimal ES256 JWS compact serialization and P-256 JWKs.

Signatures are deterministic (RFC 6979) so seeded runs are byte-stable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.asymmetric import ec
from cryptography.hazmat.primitives.asymmetric.utils import decode_dss_signature, encode_dss_signature

from .encoding import b64url_decode, b64url_encode, dumps, loads
from .errors import MalformedToken, SignatureInvalid, SigningFailure
from .rng import Rng, default_rng

ALG = "ES256"
_CURVE = ec.SECP256R1()
_ORDER = 0xFFFFFFFF00000000FFFFFFFFFFFFFFFFBCE6FAADA7179E84F3B9CAC2FC632551
_ECDSA = ec.ECDSA(hashes.SHA256(), deterministic_signing=True)


def generate_signing_key(rng: Rng | None = None) -> ec.EllipticCurvePrivateKey:
    rng = rng or default_rng()
    return ec.derive_private_key(1 + rng.below(_ORDER - 1), _CURVE)


def _int_b64(n: int) -> str:
    return b64url_encode(n.to_bytes(32, "big"))


def public_jwk(key: ec.EllipticCurvePublicKey | ec.EllipticCurvePrivateKey) -> dict:
    if isinstance(key, ec.EllipticCurvePrivateKey):
        key = key.public_key()
    nums = key.public_numbers()
    return {"kty": "EC", "crv": "P-256", "x": _int_b64(nums.x), "y": _int_b64(nums.y)}


def private_jwk(key: ec.EllipticCurvePrivateKey) -> dict:
    jwk = public_jwk(key)
    jwk["d"] = _int_b64(key.private_numbers().private_value)
    return jwk


def _coord(jwk: Mapping, name: str) -> int:
    raw = b64url_decode(jwk[name])
    if len(raw) != 32:
        raise ValueError(f"JWK member {name!r} must be 32 bytes")
    return int.from_bytes(raw, "big")


def key_from_jwk(jwk: Mapping) -> ec.EllipticCurvePublicKey | ec.EllipticCurvePrivateKey:
    """Load a P-256 JWK; returns a private key when ``d`` is present."""
    try:
        if jwk.get("kty") != "EC" or jwk.get("crv") != "P-256":
            raise ValueError("only EC P-256 keys are supported")
        pub = ec.EllipticCurvePublicNumbers(_coord(jwk, "x"), _coord(jwk, "y"), _CURVE)
        if "d" in jwk:
            return ec.EllipticCurvePrivateNumbers(_coord(jwk, "d"), pub).private_key()
        return pub.public_key()
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise MalformedToken(f"invalid JWK: {exc}") from exc


def public_key_of(key) -> ec.EllipticCurvePublicKey:
    return key.public_key() if isinstance(key, ec.EllipticCurvePrivateKey) else key


def sign_compact(header: Mapping[str, Any], payload: Mapping[str, Any], key: ec.EllipticCurvePrivateKey) -> str:
    try:
        signing_input = f"{b64url_encode(dumps(header).encode())}.{b64url_encode(dumps(payload).encode())}"
        der = key.sign(signing_input.encode("ascii"), _ECDSA)
    except (TypeError, ValueError, AttributeError) as exc:
        raise SigningFailure(str(exc)) from exc
    r, s = decode_dss_signature(der)
    return f"{signing_input}.{b64url_encode(r.to_bytes(32, 'big') + s.to_bytes(32, 'big'))}"


@dataclass(frozen=True)
class ParsedJws:
    header: dict
    payload: dict
    signing_input: bytes
    signature: bytes
    text: str


def parse_compact(text: str) -> ParsedJws:
    """Split and decode a compact JWS without checking its signature."""
    if not isinstance(text, str):
        raise MalformedToken("token must be text")
    parts = text.split(".")
    if len(parts) != 3:
        raise MalformedToken("expected three dot-separated segments")
    try:
        header = loads(b64url_decode(parts[0]))
        payload = loads(b64url_decode(parts[1]))
        signature = b64url_decode(parts[2])
    except (ValueError, UnicodeDecodeError) as exc:
        raise MalformedToken(f"undecodable JWS: {exc}") from exc
    if not isinstance(header, dict) or not isinstance(payload, dict):
        raise MalformedToken("header and payload must be JSON objects")
    return ParsedJws(header, payload, f"{parts[0]}.{parts[1]}".encode("ascii"), signature, text)


def verify_compact(text: str, key: ec.EllipticCurvePublicKey) -> ParsedJws:
    """Parse and verify an ES256 compact JWS; raises SignatureInvalid."""
    jws = parse_compact(text)
    if jws.header.get("alg") != ALG:
        raise SignatureInvalid(f"unsupported alg {jws.header.get('alg')!r}")
    if len(jws.signature) != 64:
        raise SignatureInvalid("ES256 signature must be 64 bytes")
    r = int.from_bytes(jws.signature[:32], "big")
    s = int.from_bytes(jws.signature[32:], "big")
    if not (0 < r < _ORDER and 0 < s < _ORDER):
        raise SignatureInvalid("signature scalar out of range")
    try:
        public_key_of(key).verify(encode_dss_signature(r, s), jws.signing_input, _ECDSA)
    except InvalidSignature as exc:
        raise SignatureInvalid("signature does not verify") from exc
    return jws
