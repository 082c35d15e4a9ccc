"""Exception hierarchy shared by all modules."""


class AbesdError(Exception):
    """Root of every error raised by this package."""


# policy language

class PolicyError(AbesdError, ValueError):
    pass


class EmptyPolicy(PolicyError):
    pass


class PolicySyntaxError(PolicyError):
    def __init__(self, offset: int, expected: str, text: str = ""):
        self.offset = offset
        self.expected = expected
        self.text = text
        super().__init__(f"at offset {offset}: expected {expected}")


class InvalidAttributeName(PolicyError):
    pass


# ABE engine

class AbeError(AbesdError):
    pass


class UnsupportedSecurityLevel(AbeError, ValueError):
    pass


class EmptyAttributeSet(AbeError, ValueError):
    pass


class PolicyNotSatisfied(AbeError):
    pass


class MalformedCiphertext(AbeError, ValueError):
    pass


class MalformedKey(AbeError, ValueError):
    pass


# SD-JWT codec

class CodecError(AbesdError):
    pass


class NonSerializableValue(CodecError, TypeError):
    pass


class DuplicateClaimName(CodecError, ValueError):
    pass


class SigningFailure(CodecError):
    pass


class MalformedPresentation(CodecError, ValueError):
    pass


class MalformedToken(CodecError, ValueError):
    pass


class MalformedDisclosure(CodecError, ValueError):
    pass


# holder

class HolderError(AbesdError):
    pass


class LengthMismatch(HolderError, ValueError):
    pass


class UnknownDisclosure(HolderError, ValueError):
    pass


# verifier

class VerificationError(AbesdError):
    pass


class SignatureInvalid(VerificationError):
    pass


class MissingCnf(VerificationError):
    pass


class WrongType(VerificationError):
    pass


class AudienceMismatch(VerificationError):
    pass


class NonceMismatch(VerificationError):
    pass


class Stale(VerificationError):
    pass


class MalformedSegment(VerificationError):
    pass


class DigestMismatch(VerificationError):
    pass
