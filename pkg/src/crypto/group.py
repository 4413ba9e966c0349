"""
Prime-order group arithmetic: Diffie-Hellman for the pairwise baseline and
Schnorr signatures for proof aggregation.

The group is the order-q subgroup of the integers modulo the RFC 5114 2048-bit
MODP prime p, with a 256-bit prime q dividing p - 1 and g generating the
subgroup. Scalars live in [1, q).
"""

import hmac
from dataclasses import dataclass

from .primitives import digest, hkdf
from ..utils.errors import InvalidElement, InvalidScalar
from ..utils.opcount import record
from ..utils.rng import RunRng

P = int(
    "87a8e61db4b6663cffbbd19c651959998ceef608660dd0f25d2ceed4435e3b00"
    "e00df8f1d61957d4faf7df4561b2aa3016c3d91134096faa3bf4296d830e9a7c"
    "209e0c6497517abd5a8a9d306bcf67ed91f9e6725b4758c022e0b1ef4275bf7b"
    "6c5bfc11d45f9088b941f54eb1e59bb8bc39a0bf12307f5c4fdb70c581b23f76"
    "b63acae1caa6b7902d52526735488a0ef13c6d9a51bfa4ab3ad8347796524d8e"
    "f6a167b5a41825d967e144e5140564251ccacb83e6b486f6b3ca3f7971506026"
    "c0b857f689962856ded4010abd0be621c3a3960a54e710c375f26375d7014103"
    "a4b54330c198af126116d2276e11715f693877fad7ef09cadb094ae91e1a1597",
    16,
)
Q = int(
    "8cf83642a709a097b447997640129da299b1a47d1eb3750ba308b0fe64f5fbd3",
    16,
)
G = int(
    "3fb32c9b73134d0b2e77506660edbd484ca7b18f21ef205407f4793a1a0ba125"
    "10dbc15077be463fff4fed4aac0bb555be3a6c1b0c6b47b1bc3773bf7e8c6f62"
    "901228f8c28cbb18a55ae31341000a650196f931c77a57f2ddf463e5e9ec144b"
    "777de62aaab8a8628ac376d282d6ed3864e67982428ebc831d14348f6f2f9193"
    "b5045af2767164e1dfc967c1fb3f2e55a4bd1bffe83b9c80d052b985d182ea0a"
    "db2a3b7313d3fe14c8484b1e052588b9b7d2bbd2df016199ecd06e1557cd0915"
    "b3353bbb64e0ec377fd028370df92b52c7891428cdc67eb6184b523d1db246c3"
    "2f63078490f00ef8d647d148d47954515e2327cfef98c582664b4c0f6cc41659",
    16,
)
ELEMENT_BYTES = (P.bit_length() + 7) // 8
SCALAR_BYTES = (Q.bit_length() + 7) // 8


def _pow(base: int, exponent: int) -> int:
    record("group_exps")
    return pow(base, exponent, P)


@dataclass(frozen=True)
class GroupElement:
    """Member of the order-q subgroup; membership is checked on construction."""

    value: int

    def __post_init__(self):
        if not isinstance(self.value, int) or not 1 <= self.value < P:
            raise InvalidElement("value outside [1, p)")
        if _pow(self.value, Q) != 1:
            raise InvalidElement("value is not in the prime-order subgroup")

    @classmethod
    def _closed(cls, value: int) -> "GroupElement":
        # Result of group operations on members; closure makes the check redundant.
        element = object.__new__(cls)
        object.__setattr__(element, "value", value)
        return element

    @classmethod
    def generator(cls) -> "GroupElement":
        return cls._closed(G)

    @classmethod
    def from_bytes(cls, blob: bytes) -> "GroupElement":
        return cls(int.from_bytes(blob, "big"))

    def to_bytes(self) -> bytes:
        return self.value.to_bytes(ELEMENT_BYTES, "big")

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement._closed(self.value * other.value % P)

    def __pow__(self, scalar: int) -> "GroupElement":
        return GroupElement._closed(_pow(self.value, scalar))


def _check_scalar(scalar: int):
    if not isinstance(scalar, int) or not 1 <= scalar < Q:
        raise InvalidScalar("scalar outside [1, q)")


def _as_element(element) -> GroupElement:
    if isinstance(element, GroupElement):
        return element
    if isinstance(element, int):
        return GroupElement(element)
    raise InvalidElement(f"not a group element: {type(element).__name__}")


def dh_keypair(rng: RunRng) -> tuple[int, GroupElement]:
    scalar = 1 + rng.randbelow(Q - 1)
    return scalar, GroupElement.generator() ** scalar


def dh_shared(scalar: int, element) -> GroupElement:
    _check_scalar(scalar)
    return _as_element(element) ** scalar


# Schnorr signatures over the same group. The aggregator of the reference
# proof backend signs batch transcripts with these.

SIGNATURE_BYTES = ELEMENT_BYTES + SCALAR_BYTES
_NONCE_SALT = b"yotta/schnorr-nonce/v1"


@dataclass(frozen=True)
class SigningKey:
    scalar: int

    def __repr__(self) -> str:
        return "SigningKey(<redacted>)"

    @classmethod
    def derive(cls, secret: bytes) -> "SigningKey":
        wide = hkdf(secret, salt=b"yotta/schnorr-key/v1", info=b"", length=SCALAR_BYTES + 8)
        return cls(1 + int.from_bytes(wide, "big") % (Q - 1))

    def public(self) -> GroupElement:
        return GroupElement.generator() ** self.scalar


def _challenge(r: GroupElement, public: GroupElement, message: bytes) -> int:
    return int.from_bytes(digest(r.to_bytes() + public.to_bytes() + message), "big") % Q


def schnorr_sign(key: SigningKey, message: bytes) -> bytes:
    """Deterministic signature: the nonce is derived from the key and the message."""
    secret = key.scalar.to_bytes(SCALAR_BYTES, "big")
    wide = hkdf(secret, salt=_NONCE_SALT, info=digest(message), length=SCALAR_BYTES + 8)
    k = 1 + int.from_bytes(wide, "big") % (Q - 1)
    r = GroupElement.generator() ** k
    e = _challenge(r, key.public(), message)
    s = (k + e * key.scalar) % Q
    return r.to_bytes() + s.to_bytes(SCALAR_BYTES, "big")


def schnorr_verify(public: GroupElement, message: bytes, signature: bytes) -> bool:
    if len(signature) != SIGNATURE_BYTES:
        return False
    try:
        r = GroupElement.from_bytes(signature[:ELEMENT_BYTES])
    except InvalidElement:
        return False
    s = int.from_bytes(signature[ELEMENT_BYTES:], "big")
    if s >= Q:
        return False
    e = _challenge(r, public, message)
    lhs = GroupElement.generator() ** s
    rhs = r * (public ** e)
    return hmac.compare_digest(lhs.to_bytes(), rhs.to_bytes())
