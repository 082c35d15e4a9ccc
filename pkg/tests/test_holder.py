import json

import pytest
from cryptography.exceptions import InvalidTag

from abesd import holder, jose, sdjwt
from abesd.encoding import b64url_decode, b64url_encode
from abesd.errors import LengthMismatch, MalformedSegment, PolicyNotSatisfied, UnknownDisclosure
from abesd.rng import SeededRng
from abesd.sdjwt import digest_disclosure


@pytest.fixture(scope="module")
def credential(issuer_key, holder_key):
    claims = {"name": "Alice", "diagnosis": "J01.90", "prescription": "amoxicillin"}
    return sdjwt.issue(claims, {}, holder_key, issuer_key, SeededRng("cred"), clock=lambda: 1000)


def test_encrypt_roundtrip(params, keygen):
    d = sdjwt.Disclosure(b"\x00" * 16, "name", "Alice")
    ed = holder.encrypt_disclosure(params, d, "Hospital or Pharmacy", SeededRng(1))
    assert holder.decrypt_disclosure(keygen({"Pharmacy"}), params, ed) == d.encoding.text
    with pytest.raises(PolicyNotSatisfied):
        holder.decrypt_disclosure(keygen({"Insurer"}), params, ed)


def test_wire_format(params):
    d = sdjwt.Disclosure(b"\x01" * 16, "x", 1)
    ed = holder.encrypt_disclosure(params, d, "A  and B", SeededRng(2))
    obj = json.loads(b64url_decode(ed.wire))
    assert list(obj) == ["pcy", "kem", "iv", "ct"]
    assert obj["pcy"] == "A and B"
    assert len(b64url_decode(obj["iv"])) == holder.NONCE_LEN
    assert len(b64url_decode(obj["ct"])) == len(d.encoding.text) + 16
    assert holder.EncryptedDisclosure.from_wire(ed.wire) == ed
    assert str(ed) == ed.wire


def _rewire(wire, **changes):
    obj = json.loads(b64url_decode(wire))
    obj.update(changes)
    return b64url_encode(json.dumps(obj, separators=(",", ":")).encode())


def test_from_wire_rejects(params):
    ed = holder.encrypt_disclosure(params, sdjwt.Disclosure(b"s", "x", 1), "A", SeededRng(3))
    obj = json.loads(b64url_decode(ed.wire))
    spaced = b64url_encode(json.dumps(obj).encode())  # default separators add spaces
    reordered = b64url_encode(json.dumps(dict(reversed(list(obj.items()))), separators=(",", ":")).encode())
    for bad in [
        "",
        "!!!",
        b64url_encode(b"[]"),
        spaced,
        reordered,
        _rewire(ed.wire, pcy="B"),
        _rewire(ed.wire, iv=b64url_encode(b"short")),
        _rewire(ed.wire, kem=b64url_encode(b"\x01junk")),
        _rewire(ed.wire, ct=5),
    ]:
        with pytest.raises(MalformedSegment):
            holder.EncryptedDisclosure.from_wire(bad)


def test_policy_is_authenticated(params, keygen):
    # moving a DEM ciphertext under another encapsulation fails authentication
    a = holder.encrypt_disclosure(params, sdjwt.Disclosure(b"s", "x", 1), "A", SeededRng(4))
    b = holder.encrypt_disclosure(params, sdjwt.Disclosure(b"t", "y", 2), "A", SeededRng(5))
    swapped = holder.EncryptedDisclosure(a.policy_text, a.encapsulation, b.aead_nonce, b.aead_ct)
    with pytest.raises(InvalidTag):
        holder.decrypt_disclosure(keygen({"A"}), params, swapped)


def test_build_kb_jwt(params, holder_key, credential):
    jwt, disclosures = credential
    encs = [holder.encrypt_disclosure(params, d, "A", SeededRng(i)) for i, d in enumerate(disclosures[:2])]
    digests = [d.digest for d in disclosures[:2]]
    kb = holder.build_kb_jwt(jwt.compact_text, encs, digests, "verifier", "n-1", 1000, holder_key)
    assert kb.header == {"alg": "ES256", "typ": "kb+abe+jwt"}
    assert list(kb.payload) == ["iat", "aud", "nonce", "sd_hash", "_sd", "abe_pcy"]
    assert kb.payload["_sd"] == digests
    assert kb.payload["abe_pcy"] == ["A", "A"]
    assert kb.payload["sd_hash"] == sdjwt.sd_hash(jwt.compact_text, [e.wire for e in encs])
    jose.verify_compact(kb.compact_text, holder_key.public_key())
    with pytest.raises(LengthMismatch):
        holder.build_kb_jwt(jwt.compact_text, encs, digests[:1], "verifier", "n-1", 1000, holder_key)


def test_present_order_law(params, holder_key, keygen, credential):
    jwt, disclosures = credential
    policies = ["Hospital", "Pharmacy and Hospital", "Pharmacy"]
    pres = holder.present(
        jwt, list(zip(disclosures, policies)), params, holder_key, "v", "n", clock=lambda: 1000, rng=SeededRng(6)
    )
    issuer_text, segments, kb_text = sdjwt.parse_presentation(pres.text)
    assert issuer_text == jwt.compact_text and kb_text == pres.kb_jwt.compact_text
    kb = jose.parse_compact(kb_text).payload
    assert len(segments) == len(kb["_sd"]) == len(kb["abe_pcy"]) == 3
    sk = keygen({"Hospital", "Pharmacy"})
    for seg, dg, pcy in zip(segments, kb["_sd"], kb["abe_pcy"]):
        ed = holder.EncryptedDisclosure.from_wire(seg)
        assert ed.policy_text == pcy
        assert digest_disclosure(holder.decrypt_disclosure(sk, params, ed)) == dg


def test_present_subset_and_unknown(params, holder_key, credential, issuer_key):
    jwt, disclosures = credential
    pres = holder.present(jwt, [(disclosures[1], "A")], params, holder_key, "v", "n", rng=SeededRng(7))
    assert len(sdjwt.parse_presentation(pres.text)[1]) == 1
    _, others = sdjwt.issue({"name": "Mallory"}, {}, holder_key, issuer_key, SeededRng("other"))
    with pytest.raises(UnknownDisclosure):
        holder.present(jwt, [(others[0], "A")], params, holder_key, "v", "n")


def test_present_deterministic(params, holder_key, credential):
    jwt, disclosures = credential
    run = lambda: holder.present(  # noqa: E731
        jwt, [(disclosures[0], "A")], params, holder_key, "v", "n", clock=lambda: 5, rng=SeededRng(8)
    ).text
    assert run() == run()
