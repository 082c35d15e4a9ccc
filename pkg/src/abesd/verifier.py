"""Verifier side: signatures, sd_hash, policy-filtered decryption, digest binding.

Checks run in a fixed order and the first three short-circuit:

1. Issuer-signed JWT signature
2. Key Binding JWT signature under the issuer's ``cnf`` key, plus typ/aud/nonce/iat
3. ``sd_hash`` over the received bytes
4. decryption of each encrypted Disclosure the key can open
5. binding of each plaintext to the issuer's ``_sd`` digests

Failing to decrypt a Disclosure is not a verification failure; it only
removes that Disclosure from the result.
"""

from __future__ import annotations

import hmac
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Mapping, Sequence

from cryptography.exceptions import InvalidTag

from . import jose
from .abe import AbeSystemParams, AttributeSecretKey
from .errors import (
    AbesdError,
    AudienceMismatch,
    DigestMismatch,
    LengthMismatch,
    MalformedDisclosure,
    MalformedPresentation,
    MalformedSegment,
    MalformedToken,
    MissingCnf,
    NonceMismatch,
    PolicyError,
    PolicyNotSatisfied,
    Stale,
    WrongType,
)
from .holder import KB_TYP, EncryptedDisclosure, decrypt_disclosure
from .policy import parse_policy, satisfies
from .sdjwt import SD_ALG, Disclosure, decode_disclosure, digest_disclosure, parse_presentation, sd_hash

CLOCK_SKEW = 60


@dataclass(frozen=True)
class VerificationPolicy:
    issuer_pub: Any
    expected_aud: str
    expected_nonce: str
    max_age: float = 300.0
    clock: Callable[[], float] = time.time

    def __post_init__(self):
        if not self.max_age > 0:
            raise ValueError("max_age must be positive")


# per-Disclosure outcomes

@dataclass(frozen=True)
class Disclosed:
    name: str
    value: Any
    status = "disclosed"


@dataclass(frozen=True)
class Skipped:
    policy: str
    status = "skipped"


@dataclass(frozen=True)
class Unauthorized:
    reason: str = ""
    status = "unauthorized"


@dataclass(frozen=True)
class DigestMismatchOutcome:
    reason: str = ""
    status = "digest_mismatch"


@dataclass(frozen=True)
class Decrypted:
    """Intermediate outcome of :func:`decrypt_disclosures`."""

    encoding: str
    status = "decrypted"


@dataclass
class VerificationReport:
    issuer_ok: bool = False
    kb_ok: bool = False
    sd_hash_ok: bool = False
    disclosures: list = field(default_factory=list)
    visible_claims: dict = field(default_factory=dict)
    error: str | None = None

    @property
    def accepted(self) -> bool:
        return (
            self.issuer_ok
            and self.kb_ok
            and self.sd_hash_ok
            and self.error is None
            and not any(isinstance(o, DigestMismatchOutcome) for o in self.disclosures)
        )

    @property
    def claims(self) -> dict:
        return {o.name: o.value for o in self.disclosures if isinstance(o, Disclosed)}

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "issuer_ok": self.issuer_ok,
            "kb_ok": self.kb_ok,
            "sd_hash_ok": self.sd_hash_ok,
            "error": self.error,
            "visible_claims": self.visible_claims,
            "disclosures": [{"index": i, "status": o.status, **asdict(o)} for i, o in enumerate(self.disclosures)],
        }


# --- individual steps ------------------------------------------------------------

def verify_issuer_jwt(jwt_text: str, issuer_pub) -> dict:
    if isinstance(issuer_pub, Mapping):
        issuer_pub = jose.key_from_jwk(issuer_pub)
    payload = jose.verify_compact(jwt_text, issuer_pub).payload
    cnf = payload.get("cnf")
    if not isinstance(cnf, dict) or not isinstance(cnf.get("jwk"), dict):
        raise MissingCnf("issuer payload has no cnf.jwk")
    sd = payload.get("_sd", [])
    if not isinstance(sd, list) or not all(isinstance(x, str) for x in sd):
        raise MalformedToken("_sd must be an array of strings")
    if payload.get("_sd_alg", SD_ALG) != SD_ALG:
        raise MalformedToken(f"unsupported _sd_alg {payload.get('_sd_alg')!r}")
    return payload


def verify_kb_jwt(kb_text: str, cnf_key, vp: VerificationPolicy) -> dict:
    if isinstance(cnf_key, Mapping):
        cnf_key = jose.key_from_jwk(cnf_key.get("jwk", cnf_key))
    jws = jose.verify_compact(kb_text, cnf_key)
    if jws.header.get("typ") != KB_TYP:
        raise WrongType(f"expected typ {KB_TYP!r}, got {jws.header.get('typ')!r}")
    p = jws.payload
    if p.get("aud") != vp.expected_aud:
        raise AudienceMismatch(f"audience {p.get('aud')!r} is not {vp.expected_aud!r}")
    if not isinstance(p.get("nonce"), str) or not hmac.compare_digest(p["nonce"], vp.expected_nonce):
        raise NonceMismatch("nonce does not match this session")
    iat = p.get("iat")
    if not isinstance(iat, int) or isinstance(iat, bool):
        raise MalformedToken("iat must be an integer")
    now = vp.clock()
    if not (now - vp.max_age <= iat <= now + CLOCK_SKEW):
        raise Stale(f"iat {iat} outside [{now - vp.max_age:.0f}, {now + CLOCK_SKEW:.0f}]")
    if not isinstance(p.get("sd_hash"), str):
        raise MalformedToken("sd_hash missing")
    for name in ("_sd", "abe_pcy"):
        if name in p and (not isinstance(p[name], list) or not all(isinstance(x, str) for x in p[name])):
            raise MalformedToken(f"{name} must be an array of strings")
    return p


def check_sd_hash(kb_payload: Mapping, issuer_jwt_text: str, encrypted_segments: Sequence[str]) -> bool:
    expected = kb_payload.get("sd_hash")
    if not isinstance(expected, str):
        return False
    actual = sd_hash(issuer_jwt_text, encrypted_segments)
    return hmac.compare_digest(actual.encode(), expected.encode("utf-8", "replace"))


def decrypt_disclosures(
    sk: AttributeSecretKey,
    params: AbeSystemParams,
    encrypted_segments: Sequence[str],
    kb_payload: Mapping,
) -> list:
    """Per segment: Skipped, Unauthorized or Decrypted(encoding).

    Segments whose ``abe_pcy`` hint the key cannot satisfy are skipped with
    no pairing work. The hint is never trusted beyond that: decapsulation
    always uses the policy embedded in the ciphertext.
    """
    hints = kb_payload.get("abe_pcy")
    if hints is not None and len(hints) != len(encrypted_segments):
        raise LengthMismatch("abe_pcy length differs from the number of encrypted disclosures")
    parsed = [EncryptedDisclosure.from_wire(seg) for seg in encrypted_segments]
    out = []
    for i, ed in enumerate(parsed):
        if hints is not None:
            try:
                hint = parse_policy(hints[i])
            except PolicyError:
                hint = None
            if hint is not None and not satisfies(hint, sk.attrs):
                out.append(Skipped(hints[i]))
                continue
        try:
            out.append(Decrypted(decrypt_disclosure(sk, params, ed)))
        except PolicyNotSatisfied:
            out.append(Unauthorized("key does not satisfy the ciphertext policy"))
        except (InvalidTag, UnicodeDecodeError):
            out.append(Unauthorized("authenticated decryption failed"))
    return out


def verify_disclosure_binding(plaintext_encoding: str, issuer_sd: Sequence[str]) -> Disclosure:
    if digest_disclosure(plaintext_encoding) not in set(issuer_sd):
        raise DigestMismatch("decrypted disclosure is not vouched for by the issuer")
    try:
        return decode_disclosure(plaintext_encoding)
    except MalformedDisclosure as exc:
        raise DigestMismatch(f"decrypted bytes are not a disclosure: {exc}") from exc


def verify_presentation(
    text: str | bytes,
    sk: AttributeSecretKey,
    params: AbeSystemParams,
    vp: VerificationPolicy,
) -> VerificationReport:
    """Run the whole pipeline; failures are reported, never raised."""
    report = VerificationReport()
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("ascii")
        except UnicodeDecodeError:
            report.error = "MalformedPresentation: presentation is not ASCII"
            return report
    try:
        issuer_text, segments, kb_text = parse_presentation(text)
    except MalformedPresentation as exc:
        report.error = f"MalformedPresentation: {exc}"
        return report

    try:
        issuer_payload = verify_issuer_jwt(issuer_text, vp.issuer_pub)
    except AbesdError as exc:
        report.error = f"{type(exc).__name__}: {exc}"
        return report
    report.issuer_ok = True
    report.visible_claims = {
        k: v for k, v in issuer_payload.items() if k not in {"_sd", "_sd_alg", "cnf"}
    }

    try:
        kb_payload = verify_kb_jwt(kb_text, issuer_payload["cnf"]["jwk"], vp)
    except AbesdError as exc:
        report.error = f"{type(exc).__name__}: {exc}"
        return report
    report.kb_ok = True

    if not check_sd_hash(kb_payload, issuer_text, segments):
        report.error = "sd_hash does not match the presented bytes"
        return report
    report.sd_hash_ok = True

    kb_sd = kb_payload.get("_sd")
    if kb_sd is not None and len(kb_sd) != len(segments):
        report.error = "LengthMismatch: _sd length differs from the number of encrypted disclosures"
        return report
    try:
        outcomes = decrypt_disclosures(sk, params, segments, kb_payload)
    except (MalformedSegment, LengthMismatch) as exc:
        report.error = f"{type(exc).__name__}: {exc}"
        return report

    issuer_sd = issuer_payload.get("_sd", [])
    for i, outcome in enumerate(outcomes):
        if not isinstance(outcome, Decrypted):
            report.disclosures.append(outcome)
            continue
        if kb_sd is not None and digest_disclosure(outcome.encoding) != kb_sd[i]:
            report.disclosures.append(DigestMismatchOutcome("plaintext digest differs from KB-JWT _sd entry"))
            continue
        try:
            d = verify_disclosure_binding(outcome.encoding, issuer_sd)
        except DigestMismatch as exc:
            report.disclosures.append(DigestMismatchOutcome(str(exc)))
            continue
        report.disclosures.append(Disclosed(d.claim_name, d.claim_value))
    return report
