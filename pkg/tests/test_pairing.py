import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abesd import pairing
from abesd.pairing import _pure

try:
    native = pairing.load_backend("native")
except ImportError:  # extension not built
    native = None

needs_native = pytest.mark.skipif(native is None, reason="native extension not built")
BACKENDS = [_pure] + ([native] if native else [])

# standard compressed generators
G1_GEN = bytes.fromhex(
    "97f1d3a73197d7942695638c4fa9ac0fc3688c4f9774b905a14e3a3f171bac586c55e83ff97a1aeffb3af00adb22c6bb"
)
G2_GEN = bytes.fromhex(
    "93e02b6052719f607dacd3a088274f65596bd0d09920b61ab5da61bbdc7f5049334cf11213945d57e5ac7d055d042b7e"
    "024aa2b2f08f0a91260805272dc51051c6e47ad4fa403b02b4510b647ae3d1770bac0326a805bbefd48056c8c121bdb8"
)

scalars = st.integers(min_value=0, max_value=pairing.R - 1)


@pytest.mark.parametrize("mod", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_generator_encodings(mod):
    assert mod.G1.generator().to_bytes() == G1_GEN
    assert mod.G2.generator().to_bytes() == G2_GEN
    assert mod.G1.identity().to_bytes() == bytes([0xC0]) + bytes(47)


@pytest.mark.parametrize("mod", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_group_laws(mod):
    g = mod.G1.generator()
    assert g * pairing.R == mod.G1.identity()
    assert g * (pairing.R + 5) == g * 5
    assert g * -3 == -(g * 3)
    assert (g * 2) - g == g
    h = mod.G2.generator()
    assert (h * 7) + (h * 11) == h * 18


@pytest.mark.parametrize("mod", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_serialization_roundtrip_and_rejection(mod):
    p = mod.G1.generator() * 123456789
    q = mod.G2.generator() * 987654321
    assert mod.G1.from_bytes(p.to_bytes()) == p
    assert mod.G2.from_bytes(q.to_bytes()) == q
    with pytest.raises(ValueError):
        mod.G1.from_bytes(p.to_bytes()[:-1])
    with pytest.raises(ValueError):
        mod.G1.from_bytes(bytes(48))  # compression flag missing


def _off_subgroup_g1_bytes():
    # first x with a curve point; before cofactor clearing it is almost surely outside G1
    x = 1
    while True:
        if _pure.fp_sqrt((x**3 + 4) % _pure.P) is not None:
            enc = bytearray(x.to_bytes(48, "big"))
            enc[0] |= 0x80
            return bytes(enc)
        x += 1


@pytest.mark.parametrize("mod", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_subgroup_check(mod):
    raw = _off_subgroup_g1_bytes()
    pt = mod.G1._from_bytes_unchecked(raw)
    assert not (pt._unchecked_mul(pairing.R)).is_identity()
    with pytest.raises(ValueError):
        mod.G1.from_bytes(raw)


def test_final_exponentiation_matches_direct_power():
    f = _pure.miller_loop([(_pure.G1.generator() * 5, _pure.G2.generator())])
    direct = _pure.f12_pow(f, 3 * (_pure.P**12 - 1) // _pure.R)
    assert _pure.final_exponentiation(f) == direct


@pytest.mark.parametrize("mod", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_pairing_bilinear_and_nondegenerate(mod):
    g1, g2 = mod.G1.generator(), mod.G2.generator()
    base = mod.pairing(g1, g2)
    assert not base.is_identity()
    assert (base ** pairing.R).is_identity()
    a, b = 0x1234567, 0xABCDEF01
    assert mod.pairing(g1 * a, g2 * b) == base ** (a * b % pairing.R)
    assert mod.pairing(g1 * a, g2) == mod.pairing(g1, g2 * a)
    assert mod.multi_pairing([(g1 * a, g2), (-(g1), g2 * a)]).is_identity()
    assert mod.multi_pairing([]).is_identity()


@pytest.mark.parametrize("mod", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_gt_encoding(mod):
    e = mod.pairing(mod.G1.generator() * 3, mod.G2.generator())
    raw = e.to_bytes()
    assert len(raw) == 576
    assert mod.GT.from_bytes(raw) == e
    bad = bytearray(raw)
    bad[-1] ^= 1
    with pytest.raises(ValueError):
        mod.GT.from_bytes(bytes(bad))


@needs_native
@settings(max_examples=8)
@given(a=scalars, b=scalars)
def test_backends_agree(a, b):
    p_n, p_p = native.G1.generator() * a, _pure.G1.generator() * a
    q_n, q_p = native.G2.generator() * b, _pure.G2.generator() * b
    assert p_n.to_bytes() == p_p.to_bytes()
    assert q_n.to_bytes() == q_p.to_bytes()
    assert native.pairing(p_n, q_n).to_bytes() == _pure.pairing(p_p, q_p).to_bytes()


@needs_native
@pytest.mark.parametrize("data", [b"", b"A", b"Pharmacy", bytes(range(40))])
def test_hash_to_g1_backends_agree(data):
    a = pairing.hash_to_g1(data, b"dst", backend=native)
    b = pairing.hash_to_g1(data, b"dst", backend=_pure)
    assert a.to_bytes() == b.to_bytes()
    assert (b * pairing.R).is_identity() and not b.is_identity()


def test_hash_to_g1_domain_separation():
    assert pairing.hash_to_g1(b"A", b"one") != pairing.hash_to_g1(b"A", b"two")
    assert pairing.hash_to_g1(b"A", b"one") == pairing.hash_to_g1(b"A", b"one")


def test_pairing_counter():
    pairing.reset_counters()
    g1, g2 = pairing.G1.generator(), pairing.G2.generator()
    pairing.pairing(g1, g2)
    pairing.multi_pairing([(g1, g2), (g1, g2)])
    assert pairing.OP_COUNTS["pairings"] == 3


@needs_native
@pytest.mark.parametrize("k", [3, 2**64 + 1, 2**130 + 7, pairing.R - 1, pairing.R, pairing.R + 1, pairing.G1_H_EFF])
def test_unchecked_mul_outside_subgroup_agrees(k):
    # cofactor clearing needs true integer multiplication, not arithmetic mod r
    raw = _off_subgroup_g1_bytes()
    a = native.G1._from_bytes_unchecked(raw)._unchecked_mul(k)
    b = _pure.G1._from_bytes_unchecked(raw)._unchecked_mul(k)
    assert a.to_bytes() == b.to_bytes()


def test_backend_selection_by_environment():
    import os
    import subprocess
    import sys

    code = "import abesd; print(abesd.BACKEND)"
    env = dict(os.environ, ABESD_BACKEND="pure")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "pure"
    with pytest.raises(ValueError):
        pairing.load_backend("gmp")
