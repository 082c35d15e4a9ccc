"""Wall-clock benchmark of the issue / present / verify pipeline.

Four measurements per disclosure count N, each a mean and standard
deviation over the repetitions:

* ``generate_ms``: SD-JWT issuance
* ``client_total_ms``: issuance plus Disclosure encryption plus KB-JWT
  (``encrypt_ms`` and ``kb_ms`` report the split)
* ``decrypt_ms``: policy filtering, decapsulation and AEAD opening
* ``verify_ms``: both signatures, sd_hash and digest binding

Setup and key generation happen once, outside the timed region.
"""

from __future__ import annotations

import hashlib
import os
import platform
import statistics
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Mapping

from . import abe, holder, jose, pairing, sdjwt, verifier
from .encoding import b64url_encode
from .rng import SeededRng

POLICY_SHAPES = ("single", "and2", "or2")
FIXED_IAT = 1_700_000_000
MEASUREMENTS = ("generate_ms", "client_total_ms", "encrypt_ms", "kb_ms", "decrypt_ms", "verify_ms")


@dataclass(frozen=True)
class BenchConfig:
    disclosure_counts: tuple = (5, 10, 20)
    repetitions: int = 30
    warmup: int = 3
    policy_shape: str = "single"
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "disclosure_counts", tuple(int(n) for n in self.disclosure_counts))
        if not self.disclosure_counts or any(n < 1 for n in self.disclosure_counts):
            raise ValueError("disclosure counts must be positive integers")
        if self.repetitions < 5:
            raise ValueError("need at least 5 repetitions for a meaningful mean")
        if self.warmup < 0:
            raise ValueError("warmup must be non-negative")
        if self.policy_shape not in POLICY_SHAPES:
            raise ValueError(f"policy_shape must be one of {POLICY_SHAPES}")


@dataclass(frozen=True)
class Stat:
    mean: float
    std: float

    @classmethod
    def of(cls, samples) -> "Stat":
        samples = list(samples)
        return cls(statistics.fmean(samples), statistics.stdev(samples) if len(samples) > 1 else 0.0)


@dataclass(frozen=True)
class BenchRow:
    n: int
    generate_ms: Stat
    client_total_ms: Stat
    encrypt_ms: Stat
    kb_ms: Stat
    decrypt_ms: Stat
    verify_ms: Stat
    # sha256 over every presentation produced, in order
    presentations_sha256: str = ""


@dataclass
class BenchReport:
    config: BenchConfig
    rows: dict = field(default_factory=dict)
    machine: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "config": asdict(self.config),
            "machine": self.machine,
            "rows": {str(n): asdict(row) for n, row in sorted(self.rows.items())},
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "BenchReport":
        cfg = BenchConfig(**d["config"])
        rows = {}
        for key, r in d["rows"].items():
            stats = {m: Stat(**r[m]) for m in MEASUREMENTS}
            rows[int(key)] = BenchRow(int(r["n"]), **stats, presentations_sha256=r.get("presentations_sha256", ""))
        return cls(cfg, rows, dict(d.get("machine", {})))


def policy_for(index: int, shape: str) -> str:
    if shape == "single":
        return f"attr{index}"
    if shape == "and2":
        return f"attr{index} and extra{index}"
    return f"attr{index} or extra{index}"


def machine_descriptor() -> dict:
    return {
        "platform": platform.platform(),
        "machine": platform.machine(),
        "processor": platform.processor(),
        "python": sys.version.split()[0],
        "cpus": os.cpu_count(),
        "pairing_backend": pairing.BACKEND,
    }


class _Fixture:
    """Long-lived keys shared by every iteration (not timed)."""

    def __init__(self, cfg: BenchConfig):
        rng = SeededRng(cfg.seed).fork("setup")
        self.params, msk = abe.abe_setup(abe.SECURITY_LEVEL, rng)
        self.issuer_key = jose.generate_signing_key(rng)
        self.holder_key = jose.generate_signing_key(rng)
        top = max(cfg.disclosure_counts)
        attrs = [f"attr{i}" for i in range(top)] + [f"extra{i}" for i in range(top)]
        self.sk = abe.abe_keygen(msk, self.params, attrs, rng)
        self.vp = verifier.VerificationPolicy(
            self.issuer_key.public_key(), "verifier.example", "", clock=lambda: FIXED_IAT
        )


def _one_iteration(fx: _Fixture, cfg: BenchConfig, n: int, rng, rep: int) -> tuple[dict, str]:
    claims = {f"claim{i}": f"value-{i}" for i in range(n)}
    policies = [policy_for(i, cfg.policy_shape) for i in range(n)]
    nonce = b64url_encode(rng.bytes(16))
    clock = lambda: FIXED_IAT  # noqa: E731
    t = {}

    t0 = time.perf_counter()
    issuer_jwt, disclosures = sdjwt.issue(claims, None, fx.holder_key, fx.issuer_key, rng, clock=clock)
    t1 = time.perf_counter()
    encrypted = [holder.encrypt_disclosure(fx.params, d, p, rng) for d, p in zip(disclosures, policies)]
    t2 = time.perf_counter()
    kb = holder.build_kb_jwt(
        issuer_jwt.compact_text, encrypted, [d.digest for d in disclosures],
        fx.vp.expected_aud, nonce, FIXED_IAT, fx.holder_key,
    )
    text = sdjwt.serialize_presentation(issuer_jwt.compact_text, [e.wire for e in encrypted], kb.compact_text)
    t3 = time.perf_counter()
    t["generate_ms"] = (t1 - t0) * 1e3
    t["encrypt_ms"] = (t2 - t1) * 1e3
    t["kb_ms"] = (t3 - t2) * 1e3
    t["client_total_ms"] = (t3 - t0) * 1e3

    vp = verifier.VerificationPolicy(fx.vp.issuer_pub, fx.vp.expected_aud, nonce, clock=clock)
    v0 = time.perf_counter()
    issuer_text, segments, kb_text = sdjwt.parse_presentation(text)
    issuer_payload = verifier.verify_issuer_jwt(issuer_text, vp.issuer_pub)
    kb_payload = verifier.verify_kb_jwt(kb_text, issuer_payload["cnf"]["jwk"], vp)
    if not verifier.check_sd_hash(kb_payload, issuer_text, segments):
        raise RuntimeError("sd_hash mismatch on an honest presentation")
    v1 = time.perf_counter()
    outcomes = verifier.decrypt_disclosures(fx.sk, fx.params, segments, kb_payload)
    v2 = time.perf_counter()
    recovered = {}
    for o in outcomes:
        if not isinstance(o, verifier.Decrypted):
            raise RuntimeError(f"bench iteration {rep} at N={n}: unexpected outcome {o!r}")
        d = verifier.verify_disclosure_binding(o.encoding, issuer_payload["_sd"])
        recovered[d.claim_name] = d.claim_value
    v3 = time.perf_counter()
    if recovered != claims:
        raise RuntimeError(f"bench iteration {rep} at N={n}: recovered claims differ")
    t["decrypt_ms"] = (v2 - v1) * 1e3
    t["verify_ms"] = ((v1 - v0) + (v3 - v2)) * 1e3
    return t, text


def run_bench(cfg: BenchConfig | None = None, progress=None) -> BenchReport:
    """Run the pipeline ``warmup + repetitions`` times per count; any failure aborts."""
    cfg = cfg or BenchConfig()
    fx = _Fixture(cfg)
    report = BenchReport(cfg, machine=machine_descriptor())
    for n in cfg.disclosure_counts:
        rng = SeededRng(cfg.seed).fork(f"count-{n}")
        samples = {m: [] for m in MEASUREMENTS}
        h = hashlib.sha256()
        for rep in range(cfg.warmup + cfg.repetitions):
            t, text = _one_iteration(fx, cfg, n, rng, rep)
            h.update(text.encode("ascii") + b"\n")
            if rep >= cfg.warmup:
                for m in MEASUREMENTS:
                    samples[m].append(t[m])
        report.rows[n] = BenchRow(n, **{m: Stat.of(samples[m]) for m in MEASUREMENTS}, presentations_sha256=h.hexdigest())
        if progress:
            progress(report.rows[n])
    return report


# --- scaling checks ---------------------------------------------------------------

RATIO_BAND = (2.5, 6.0)
GENERATE_MAX_RATIO = 5.0
VERIFY_FRACTION = 10.0


@dataclass(frozen=True)
class ScalingCheck:
    name: str
    value: float
    bound: str
    passed: bool


@dataclass(frozen=True)
class ScalingResult:
    passed: bool
    checks: tuple

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": [asdict(c) for c in self.checks]}

    def __str__(self):
        lines = [f"{'PASS' if c.passed else 'FAIL'} {c.name} = {c.value:.3f} ({c.bound})" for c in self.checks]
        return "\n".join(lines)


def _ratio(a: float, b: float) -> float:
    return a / b if b > 0 else float("inf")


def check_scaling(report: BenchReport | Mapping, small: int = 5, large: int = 20) -> ScalingResult:
    """Compare t(large)/t(small) against the expected growth bands."""
    if isinstance(report, Mapping):
        report = BenchReport.from_dict(report)
    if small not in report.rows or large not in report.rows:
        check = ScalingCheck(f"counts {small} and {large} present", 0.0, "required", False)
        return ScalingResult(False, (check,))
    lo, hi = RATIO_BAND
    s, l = report.rows[small], report.rows[large]
    checks = []
    for m in ("client_total_ms", "decrypt_ms"):
        r = _ratio(getattr(l, m).mean, getattr(s, m).mean)
        checks.append(ScalingCheck(f"{m} ratio t({large})/t({small})", r, f"in [{lo}, {hi}]", lo <= r <= hi))
    g = _ratio(l.generate_ms.mean, s.generate_ms.mean)
    checks.append(ScalingCheck(f"generate_ms ratio t({large})/t({small})", g, f"<= {GENERATE_MAX_RATIO}", g <= GENERATE_MAX_RATIO))
    v = _ratio(l.verify_ms.mean, l.decrypt_ms.mean)
    checks.append(ScalingCheck(f"verify_ms/decrypt_ms at {large}", v, f"< 1/{VERIFY_FRACTION:g}", v < 1 / VERIFY_FRACTION))
    return ScalingResult(all(c.passed for c in checks), tuple(checks))
