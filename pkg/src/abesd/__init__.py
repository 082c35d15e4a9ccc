"""SD-JWT presentations whose Disclosures are sealed under CP-ABE policies."""

from .abe import (
    AbeEncapsulation,
    AbeSystemParams,
    AttributeSecretKey,
    MasterSecretKey,
    abe_decapsulate,
    abe_encapsulate,
    abe_keygen,
    abe_setup,
)
from .holder import KB_TYP, EncryptedDisclosure, build_kb_jwt, encrypt_disclosure, present
from .pairing import BACKEND
from .policy import And, Leaf, Or, parse_policy, satisfies, serialize_policy
from .rng import SeededRng, SystemRng
from .sdjwt import Disclosure, decode_disclosure, digest_disclosure, issue, parse_presentation
from .verifier import (
    Disclosed,
    Skipped,
    Unauthorized,
    VerificationPolicy,
    VerificationReport,
    verify_presentation,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "KB_TYP",
    "AbeEncapsulation",
    "AbeSystemParams",
    "And",
    "AttributeSecretKey",
    "Disclosed",
    "Disclosure",
    "EncryptedDisclosure",
    "Leaf",
    "MasterSecretKey",
    "Or",
    "SeededRng",
    "Skipped",
    "SystemRng",
    "Unauthorized",
    "VerificationPolicy",
    "VerificationReport",
    "abe_decapsulate",
    "abe_encapsulate",
    "abe_keygen",
    "abe_setup",
    "build_kb_jwt",
    "decode_disclosure",
    "digest_disclosure",
    "encrypt_disclosure",
    "issue",
    "parse_policy",
    "parse_presentation",
    "present",
    "satisfies",
    "serialize_policy",
    "verify_presentation",
]
