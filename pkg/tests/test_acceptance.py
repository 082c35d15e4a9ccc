"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line."""

import hashlib
import random
import time

import pytest

from abesd import abe, holder, jose, sdjwt, verifier
from abesd.bench import BenchConfig, check_scaling, run_bench
from abesd.errors import PolicyNotSatisfied
from abesd.policy import And, Leaf, Or, serialize_policy
from abesd.rng import SeededRng
from helpers import ATTR_POOL, criterion, oracle_digest, oracle_disclosure, oracle_satisfies

NOW = 1_700_000_000
AUD, NONCE = "https://verifier.example", "acceptance-nonce"


def random_policy(rnd: random.Random, gate_levels: int = 3):
    """Random tree over ATTR_POOL with at most ``gate_levels`` nested gates."""
    if gate_levels == 0 or rnd.random() < 0.3:
        return Leaf(rnd.choice(ATTR_POOL))
    kind = rnd.choice((And, Or))
    return kind(*(random_policy(rnd, gate_levels - 1) for _ in range(rnd.randint(2, 3))))


def random_attrs(rnd: random.Random):
    return {a for a in ATTR_POOL if rnd.random() < 0.5}


@pytest.fixture(scope="module")
def parties():
    rng = SeededRng("acceptance")
    params, msk = abe.abe_setup(128, rng)
    return {
        "params": params,
        "msk": msk,
        "issuer": jose.generate_signing_key(rng),
        "holder": jose.generate_signing_key(rng),
        "rng": rng,
    }


def vp_for(parties, nonce=NONCE):
    return verifier.VerificationPolicy(parties["issuer"].public_key(), AUD, nonce, clock=lambda: NOW)


def issue_and_present(parties, claims, policies, rng):
    jwt, disclosures = sdjwt.issue(claims, {}, parties["holder"], parties["issuer"], rng, clock=lambda: NOW)
    pres = holder.present(
        jwt, list(zip(disclosures, policies)), parties["params"], parties["holder"], AUD, NONCE,
        clock=lambda: NOW, rng=rng,
    )
    return jwt, disclosures, pres


def test_criterion_1_end_to_end(parties):
    with criterion(1, "end-to-end round trip for N in {5,10,20}") as c:
        start = time.perf_counter()
        for n in (5, 10, 20):
            attrs = [f"role{i}" for i in range(n)]
            sk = abe.abe_keygen(parties["msk"], parties["params"], attrs, parties["rng"])
            claims = {f"claim_{i}": {"n": i, "text": f"value {i}"} for i in range(n)}
            _, _, pres = issue_and_present(parties, claims, attrs, parties["rng"])
            report = verifier.verify_presentation(pres.text, sk, parties["params"], vp_for(parties))
            assert report.accepted, report.error
            disclosed = [o for o in report.disclosures if isinstance(o, verifier.Disclosed)]
            assert len(disclosed) == n
            assert {o.name: o.value for o in disclosed} == claims
        elapsed = time.perf_counter() - start
        c.detail = f"{elapsed:.2f} s, limit 5 s"
        assert elapsed < 5.0


def test_criterion_2_oracle_equivalence(parties):
    with criterion(2, "access control matches brute-force oracle") as c:
        rnd = random.Random(20240601)
        params, msk = parties["params"], parties["msk"]
        pairs = discrepancies = 0
        while pairs < 200:
            policies = [random_policy(rnd) for _ in range(5)]
            attrs = random_attrs(rnd)
            # keys need one attribute; an outside name keeps the set semantically empty
            sk = abe.abe_keygen(msk, params, sorted(attrs) or ["outsider"], parties["rng"])
            claims = {f"c{i}": i for i in range(5)}
            _, _, pres = issue_and_present(parties, claims, policies, parties["rng"])
            report = verifier.verify_presentation(pres.text, sk, params, vp_for(parties))
            assert report.accepted, report.error
            for i, (pol, outcome) in enumerate(zip(policies, report.disclosures)):
                expected = oracle_satisfies(serialize_policy(pol), attrs)
                got = isinstance(outcome, verifier.Disclosed) and outcome.value == i
                discrepancies += expected != got
                pairs += 1
        c.detail = f"{pairs} pairs, {discrepancies} discrepancies"
        assert discrepancies == 0


def test_criterion_3_tamper_soundness(parties):
    with criterion(3, "single-byte mutations never yield a wrong claim") as c:
        params = parties["params"]
        claims = {"diagnosis": "J01.90", "prescription": "amoxicillin"}
        _, _, pres = issue_and_present(parties, claims, ["A", "B"], SeededRng("tamper"))
        sk = abe.abe_keygen(parties["msk"], params, ["A", "B"], SeededRng("tamper-key"))
        vp = vp_for(parties)
        assert verifier.verify_presentation(pres.text, sk, params, vp).claims == claims
        raw = pres.text.encode("ascii")
        start = time.perf_counter()
        mutations = bad = 0
        for pos in range(len(raw)):
            # every single-bit flip of this byte, plus its full inversion
            for mask in (1, 2, 4, 8, 16, 32, 64, 128, 0xFF):
                mutated = bytearray(raw)
                mutated[pos] ^= mask
                report = verifier.verify_presentation(bytes(mutated), sk, params, vp)
                mutations += 1
                if report.accepted and any(claims.get(k, object()) != v for k, v in report.claims.items()):
                    bad += 1
        elapsed = time.perf_counter() - start
        c.detail = f"{mutations} mutations of {len(raw)} bytes, {bad} unsound, {elapsed:.1f} s"
        assert bad == 0
        assert elapsed < 120


def test_criterion_4_scaling():
    with criterion(4, "scaling ratios on a fresh bench run") as c:
        report = run_bench(BenchConfig(seed=7))
        result = check_scaling(report)
        c.detail = "; ".join(f"{chk.name}={chk.value:.3f}" for chk in result.checks)
        c.detail += f"; backend={report.machine['pairing_backend']}"
        assert result.passed, str(result)


GOLDEN_PRESENTATION_SHA256 = "9d7a061a0f1727914d8225053ae5a959fb29c877979b4af68006a689d2648276"


def golden_presentation() -> str:
    rng = SeededRng("golden")
    params, _ = abe.abe_setup(128, rng)
    issuer, holder_key = jose.generate_signing_key(rng), jose.generate_signing_key(rng)
    jwt, disclosures = sdjwt.issue(
        {"given_name": "Erika", "family_name": "Mustermann", "birthdate": "1963-08-12"},
        {"vct": "urn:example:pid"}, holder_key, issuer, rng, clock=lambda: NOW,
    )
    pol = ["Hospital", "Pharmacy or Hospital", "Insurer and Hospital"]
    return holder.present(
        jwt, list(zip(disclosures, pol)), params, holder_key, AUD, NONCE, clock=lambda: NOW, rng=rng
    ).text


def test_criterion_5_kb_jwt_conformance(parties):
    with criterion(5, "KB-JWT field conformance and golden vector") as c:
        for n in (1, 2, 5):
            claims = {f"k{i}": i for i in range(n)}
            _, _, pres = issue_and_present(parties, claims, ["A"] * n, parties["rng"])
            _, segments, kb_text = sdjwt.parse_presentation(pres.text)
            kb = jose.verify_compact(kb_text, parties["holder"].public_key())
            assert kb.header["typ"] == "kb+abe+jwt" and kb.header["alg"] == "ES256"
            for field in ("iat", "aud", "nonce", "sd_hash"):
                assert field in kb.payload, field
            assert len(kb.payload["_sd"]) == len(kb.payload["abe_pcy"]) == len(segments) == n
        first, second = golden_presentation(), golden_presentation()
        assert first == second
        digest = hashlib.sha256(first.encode("ascii")).hexdigest()
        c.detail = f"golden sha256 {digest[:16]}..."
        assert digest == GOLDEN_PRESENTATION_SHA256


def test_criterion_6_digest_and_kem_oracles(parties):
    with criterion(6, "digest oracle and KEM round trips") as c:
        rnd = random.Random(6)
        values = [None, True, 0, -12, 3.5, "x", "Möbius", ["a", 1], {"k": {"n": [None]}}, "\U0001F600"]
        for i in range(25):
            salt = bytes(rnd.getrandbits(8) for _ in range(16))
            name, value = f"claim_{i}", rnd.choice(values)
            d = sdjwt.Disclosure(salt, name, value)
            assert d.encoding.text == oracle_disclosure(salt, name, value)
            assert sdjwt.digest_disclosure(d.encoding) == oracle_digest(d.encoding.text)

        params, msk = parties["params"], parties["msk"]
        ok = refused = 0
        keys = {}
        while ok < 100 or refused < 100:
            policy = random_policy(rnd)
            attrs = frozenset(random_attrs(rnd))
            want_sat = oracle_satisfies(serialize_policy(policy), attrs)
            if (want_sat and ok >= 100) or (not want_sat and refused >= 100) or not attrs:
                continue
            if attrs not in keys:
                keys[attrs] = abe.abe_keygen(msk, params, sorted(attrs), parties["rng"])
            key, enc = abe.abe_encapsulate(params, policy, parties["rng"])
            if want_sat:
                assert abe.abe_decapsulate(keys[attrs], params, enc.to_bytes()) == key
                ok += 1
            else:
                with pytest.raises(PolicyNotSatisfied):
                    abe.abe_decapsulate(keys[attrs], params, enc)
                refused += 1
        c.detail = f"25 digest fixtures, {ok} round trips, {refused} refusals"
