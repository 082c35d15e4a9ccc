"""Ciphertext-policy ABE key encapsulation over BLS12-381.

Bethencourt-Sahai-Waters construction moved to an asymmetric pairing
``e: G1 x G2 -> GT``. Attributes hash into G1. AND gates are n-of-n
threshold gates (degree n-1 share polynomials), OR gates are 1-of-n.

Public params: ``h = g2^beta``, ``e(g1, g2)^alpha``.
Master secret: ``beta``, ``g1^alpha``.
Attribute key: ``D = g1^((alpha + r) / beta)`` and, per attribute j,
``D_j = g1^r * H(j)^r_j``, ``D'_j = g2^r_j``.
Encapsulation: ``C = h^s`` and, per leaf y with share q_y,
``C_y = g2^q_y``, ``C'_y = H(attr_y)^q_y``. The session group element is
``e(g1, g2)^(alpha s)``; its 576-byte encoding goes through HKDF-SHA256.
"""

from __future__ import annotations

import functools
import struct
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from . import pairing as grp
from .encoding import b64url_decode, b64url_encode
from .errors import (
    EmptyAttributeSet,
    MalformedCiphertext,
    MalformedKey,
    PolicyError,
    PolicyNotSatisfied,
    UnsupportedSecurityLevel,
)
from .policy import AND, Leaf, Policy, attribute_set, leaves, parse_policy, serialize_policy
from .rng import Rng, default_rng

SECURITY_LEVEL = 128
KDF_LABEL = b"abe-sd-jwt/v1/kem"
ATTR_DST = b"abe-sd-jwt/v1/attr"
SESSION_KEY_LEN = 32

R = grp.R
_CT_VERSION = 1
_G1_LEN, _G2_LEN, _GT_LEN = 48, 96, 576


@functools.lru_cache(maxsize=4096)
def hash_attribute(attr: str) -> grp.G1:
    return grp.hash_to_g1(attr.encode("utf-8"), ATTR_DST)


@functools.lru_cache(maxsize=None)
def _base_pairing() -> grp.GT:
    return grp.pairing(grp.G1.generator(), grp.G2.generator())


def derive_session_key(element: grp.GT) -> bytes:
    hkdf = HKDF(algorithm=hashes.SHA256(), length=SESSION_KEY_LEN, salt=None, info=KDF_LABEL)
    return hkdf.derive(element.to_bytes())


@dataclass(frozen=True)
class AbeSystemParams:
    h: grp.G2
    egg_alpha: grp.GT
    security_level: int = SECURITY_LEVEL
    curve_id: str = grp.CURVE_ID

    @property
    def public_params(self) -> bytes:
        return self.to_bytes()

    def to_bytes(self) -> bytes:
        return self.h.to_bytes() + self.egg_alpha.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "AbeSystemParams":
        if len(data) != _G2_LEN + _GT_LEN:
            raise MalformedKey("wrong length for ABE public params")
        try:
            return cls(grp.G2.from_bytes(data[:_G2_LEN]), grp.GT.from_bytes(data[_G2_LEN:]))
        except ValueError as exc:
            raise MalformedKey(f"invalid ABE public params: {exc}") from exc


@dataclass(frozen=True, repr=False)
class MasterSecretKey:
    beta: int
    g1_alpha: grp.G1

    def __repr__(self):
        return "MasterSecretKey(<redacted>)"

    def to_bytes(self) -> bytes:
        return self.beta.to_bytes(32, "big") + self.g1_alpha.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "MasterSecretKey":
        if len(data) != 32 + _G1_LEN:
            raise MalformedKey("wrong length for ABE master secret")
        beta = int.from_bytes(data[:32], "big")
        if not 0 < beta < R:
            raise MalformedKey("master secret exponent out of range")
        try:
            return cls(beta, grp.G1.from_bytes(data[32:]))
        except ValueError as exc:
            raise MalformedKey(f"invalid ABE master secret: {exc}") from exc


@dataclass(frozen=True, repr=False, eq=False)
class AttributeSecretKey:
    attrs: frozenset
    d: grp.G1
    components: Mapping[str, tuple] = field(compare=False)

    def __repr__(self):
        return f"AttributeSecretKey(attrs={sorted(self.attrs)!r})"

    def __eq__(self, other):
        if not isinstance(other, AttributeSecretKey):
            return NotImplemented
        return self.to_bytes() == other.to_bytes()

    @property
    def key_material(self) -> bytes:
        return self.to_bytes()

    def to_bytes(self) -> bytes:
        out = [self.d.to_bytes(), struct.pack(">H", len(self.attrs))]
        for name in sorted(self.attrs):
            raw = name.encode("utf-8")
            dj, dj2 = self.components[name]
            out += [struct.pack(">H", len(raw)), raw, dj.to_bytes(), dj2.to_bytes()]
        return b"".join(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "AttributeSecretKey":
        try:
            d = grp.G1.from_bytes(data[:_G1_LEN])
            (count,) = struct.unpack_from(">H", data, _G1_LEN)
            pos = _G1_LEN + 2
            comps = {}
            for _ in range(count):
                (n,) = struct.unpack_from(">H", data, pos)
                pos += 2
                name = data[pos:pos + n].decode("utf-8")
                pos += n
                dj = grp.G1.from_bytes(data[pos:pos + _G1_LEN])
                dj2 = grp.G2.from_bytes(data[pos + _G1_LEN:pos + _G1_LEN + _G2_LEN])
                pos += _G1_LEN + _G2_LEN
                if name in comps:
                    raise MalformedKey(f"duplicate attribute {name!r}")
                comps[name] = (dj, dj2)
            if pos != len(data):
                raise MalformedKey("trailing bytes after attribute key")
            return cls(attribute_set(comps), d, comps)
        except (ValueError, struct.error, UnicodeDecodeError, PolicyError) as exc:
            if isinstance(exc, MalformedKey):
                raise
            raise MalformedKey(f"invalid attribute key: {exc}") from exc


@dataclass(frozen=True)
class AbeEncapsulation:
    policy: Policy
    c: grp.G2
    leaf_components: tuple  # ((C_y: G2, C'_y: G1), ...) in left-to-right leaf order

    @property
    def policy_text(self) -> str:
        return serialize_policy(self.policy)

    @property
    def ct_material(self) -> bytes:
        parts = [self.c.to_bytes()]
        for cy, cy2 in self.leaf_components:
            parts += [cy.to_bytes(), cy2.to_bytes()]
        return b"".join(parts)

    def to_bytes(self) -> bytes:
        text = self.policy_text.encode("utf-8")
        return bytes([_CT_VERSION]) + struct.pack(">H", len(text)) + text + self.ct_material

    @classmethod
    def from_bytes(cls, data: bytes) -> "AbeEncapsulation":
        try:
            if len(data) < 3 or data[0] != _CT_VERSION:
                raise MalformedCiphertext("unknown encapsulation version")
            (n,) = struct.unpack_from(">H", data, 1)
            text = data[3:3 + n].decode("utf-8")
            policy = parse_policy(text)
            if serialize_policy(policy) != text:
                raise MalformedCiphertext("policy text is not canonical")
            body = data[3 + n:]
            nleaves = len(leaves(policy))
            if len(body) != _G2_LEN + nleaves * (_G2_LEN + _G1_LEN):
                raise MalformedCiphertext("ciphertext length does not match policy")
            c = grp.G2.from_bytes(body[:_G2_LEN])
            comps = []
            pos = _G2_LEN
            for _ in range(nleaves):
                cy = grp.G2.from_bytes(body[pos:pos + _G2_LEN])
                cy2 = grp.G1.from_bytes(body[pos + _G2_LEN:pos + _G2_LEN + _G1_LEN])
                comps.append((cy, cy2))
                pos += _G2_LEN + _G1_LEN
            return cls(policy, c, tuple(comps))
        except MalformedCiphertext:
            raise
        except (ValueError, struct.error, UnicodeDecodeError) as exc:
            raise MalformedCiphertext(str(exc)) from exc


# --- operations ----------------------------------------------------------------

def abe_setup(security_level: int = SECURITY_LEVEL, rng: Rng | None = None):
    """Create ``(AbeSystemParams, MasterSecretKey)`` for one attribute authority."""
    if security_level != SECURITY_LEVEL:
        raise UnsupportedSecurityLevel(f"only {SECURITY_LEVEL}-bit security is supported")
    rng = rng or default_rng()
    alpha = rng.nonzero_below(R)
    beta = rng.nonzero_below(R)
    params = AbeSystemParams(grp.G2.generator() * beta, _base_pairing() ** alpha)
    return params, MasterSecretKey(beta, grp.G1.generator() * alpha)


def abe_keygen(
    msk: MasterSecretKey,
    params: AbeSystemParams,
    attrs: Iterable[str],
    rng: Rng | None = None,
) -> AttributeSecretKey:
    attrs = attribute_set(attrs)
    if not attrs:
        raise EmptyAttributeSet("an attribute key needs at least one attribute")
    rng = rng or default_rng()
    g1, g2 = grp.G1.generator(), grp.G2.generator()
    r = rng.nonzero_below(R)
    g1_r = g1 * r
    d = (msk.g1_alpha + g1_r) * pow(msk.beta, -1, R)
    comps = {}
    for name in sorted(attrs):
        rj = rng.nonzero_below(R)
        comps[name] = (g1_r + hash_attribute(name) * rj, g2 * rj)
    return AttributeSecretKey(attrs, d, comps)


def _share(node: Policy, secret: int, rng: Rng, out: list) -> None:
    if isinstance(node, Leaf):
        out.append((node.attr, secret))
        return
    if node.kind == AND:
        coeffs = [secret] + [rng.below(R) for _ in range(len(node.children) - 1)]
        for i, child in enumerate(node.children, start=1):
            value = 0
            for c in reversed(coeffs):
                value = (value * i + c) % R
            _share(child, value, rng, out)
    else:
        for child in node.children:
            _share(child, secret, rng, out)


def abe_encapsulate(params: AbeSystemParams, policy: Policy | str, rng: Rng | None = None):
    """Return ``(session_key, AbeEncapsulation)`` for ``policy``."""
    if isinstance(policy, str):
        policy = parse_policy(policy)
    rng = rng or default_rng()
    s = rng.nonzero_below(R)
    shares: list = []
    _share(policy, s, rng, shares)
    g2 = grp.G2.generator()
    comps = tuple((g2 * q, hash_attribute(attr) * q) for attr, q in shares)
    enc = AbeEncapsulation(policy, params.h * s, comps)
    return derive_session_key(params.egg_alpha ** s), enc


def _lagrange_at_zero(i: int, n: int) -> int:
    num, den = 1, 1
    for j in range(1, n + 1):
        if j != i:
            num = num * j % R
            den = den * (j - i) % R
    return num * pow(den, -1, R) % R


def decryption_plan(policy: Policy, attrs) -> list[tuple[int, int]] | None:
    """Leaves to use and their exponent coefficients, or None if unsatisfied.

    Returns ``[(leaf_index, coefficient), ...]``; OR gates pick the
    satisfied child needing the fewest leaves.
    """
    plan, _ = _plan(policy, attrs, 0)
    return plan


def _plan(node: Policy, attrs, offset: int):
    if isinstance(node, Leaf):
        return ([(offset, 1)] if node.attr in attrs else None), 1
    sub = []
    pos = offset
    for child in node.children:
        p, n = _plan(child, attrs, pos)
        sub.append(p)
        pos += n
    width = pos - offset
    if node.kind == AND:
        if any(p is None for p in sub):
            return None, width
        n = len(sub)
        out = []
        for i, p in enumerate(sub, start=1):
            lam = _lagrange_at_zero(i, n)
            out.extend((idx, coef * lam % R) for idx, coef in p)
        return out, width
    options = [p for p in sub if p is not None]
    if not options:
        return None, width
    return min(options, key=len), width


def abe_decapsulate(
    sk: AttributeSecretKey,
    params: AbeSystemParams,
    ct: AbeEncapsulation | bytes,
) -> bytes:
    """Recover the session key, or raise PolicyNotSatisfied / MalformedCiphertext."""
    if not isinstance(ct, AbeEncapsulation):
        ct = AbeEncapsulation.from_bytes(bytes(ct))
    plan = decryption_plan(ct.policy, sk.attrs)
    if plan is None:
        raise PolicyNotSatisfied(f"key attributes do not satisfy {ct.policy_text!r}")
    names = leaves(ct.policy)
    if len(names) != len(ct.leaf_components):
        raise MalformedCiphertext("leaf count does not match policy")
    pairs = [(sk.d, ct.c)]
    for idx, coef in plan:
        dj, dj2 = sk.components[names[idx]]
        cy, cy2 = ct.leaf_components[idx]
        if coef != 1:
            dj, cy2 = dj * coef, cy2 * coef
        pairs.append((-dj, cy))
        pairs.append((cy2, dj2))
    # e(D, C) / prod e(D_j, C_y)^c * e(C'_y, D'_j)^c = e(g1, g2)^(alpha s)
    return derive_session_key(grp.multi_pairing(pairs))


# --- JSON key envelopes ---------------------------------------------------------

def to_envelope(obj) -> dict:
    if isinstance(obj, AbeSystemParams):
        kty, extra = "abe-params", {}
    elif isinstance(obj, MasterSecretKey):
        kty, extra = "abe-msk", {}
    elif isinstance(obj, AttributeSecretKey):
        kty, extra = "abe-sk", {"attrs": sorted(obj.attrs)}
    else:
        raise TypeError(f"cannot wrap {type(obj).__name__}")
    return {"kty": kty, "curve": grp.CURVE_ID, **extra, "data": b64url_encode(obj.to_bytes())}


_KTY = {"abe-params": AbeSystemParams, "abe-msk": MasterSecretKey, "abe-sk": AttributeSecretKey}


def from_envelope(env: Mapping, expect: str | None = None):
    kty = env.get("kty")
    if kty not in _KTY or (expect is not None and kty != expect):
        raise MalformedKey(f"unexpected key type {kty!r}")
    if env.get("curve") != grp.CURVE_ID:
        raise MalformedKey(f"unsupported curve {env.get('curve')!r}")
    try:
        raw = b64url_decode(env["data"])
    except (KeyError, ValueError) as exc:
        raise MalformedKey("missing or invalid key data") from exc
    obj = _KTY[kty].from_bytes(raw)
    if kty == "abe-sk" and sorted(env.get("attrs", [])) != sorted(obj.attrs):
        raise MalformedKey("envelope attrs disagree with key material")
    return obj
