"""Tests for hashing, keys, commitments, AEAD and the group."""

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from src.crypto.group import (
    ELEMENT_BYTES,
    G,
    P,
    Q,
    SCALAR_BYTES,
    SIGNATURE_BYTES,
    GroupElement,
    SigningKey,
    dh_keypair,
    dh_shared,
    schnorr_sign,
    schnorr_verify,
)
from src.crypto.primitives import (
    Ciphertext,
    NonceSource,
    SymmetricKey,
    commit_key,
    decrypt,
    digest,
    encrypt,
    gen_key,
)
from src.utils.errors import AuthFailure, EmptyPlaintext, InvalidElement, InvalidScalar
from src.utils.opcount import counting
from src.utils.rng import RunRng


def test_sha256_vectors(vectors):
    for case in vectors["sha256"]:
        assert digest(bytes.fromhex(case["input_hex"])).hex() == case["digest_hex"]


def test_chacha20_poly1305_rfc_vector(vectors):
    case = vectors["chacha20_poly1305"][0]
    key = SymmetricKey(bytes.fromhex(case["key_hex"]))
    ct = encrypt(
        key,
        case["plaintext"].encode("ascii"),
        bytes.fromhex(case["nonce_hex"]),
        associated_data=bytes.fromhex(case["aad_hex"]),
    )
    assert ct.body.hex().startswith(case["ciphertext_prefix_hex"])
    assert ct.auth_tag.hex() == case["tag_hex"]
    assert decrypt(key, ct, bytes.fromhex(case["aad_hex"])).decode("ascii") == case["plaintext"]


def test_gen_key_deterministic():
    assert gen_key(7, 1) == gen_key(7, 1)
    assert gen_key(7, 1) != gen_key(7, 2)
    assert gen_key(7, 1) != gen_key(8, 1)
    assert len(gen_key(7, 0).key_bytes) == 32


def test_gen_key_vector(vectors):
    case = vectors["gen_key"][0]
    key = gen_key(case["seed"], case["index"])
    assert key.key_bytes.hex() == case["key_hex"]
    assert commit_key(key).hex() == case["commitment_hex"]


def test_key_repr_is_redacted():
    key = gen_key(7, 0)
    assert key.reveal() not in repr(key)


def test_commit_key():
    key = gen_key(7, 0)
    assert commit_key(key) == commit_key(SymmetricKey(key.key_bytes))
    assert commit_key(key) != commit_key(gen_key(7, 1))
    # Domain-separated: not the bare hash of the key.
    assert commit_key(key).digest != digest(key.key_bytes)


def test_encrypt_decrypt_roundtrip():
    key = gen_key(1, 1)
    nonces = NonceSource(RunRng(1))
    ct = encrypt(key, b"cid:abc", nonces)
    assert decrypt(key, ct) == b"cid:abc"


def test_encrypt_empty_rejected():
    with pytest.raises(EmptyPlaintext):
        encrypt(gen_key(1, 1), b"", NonceSource(RunRng(1)))


def test_decrypt_wrong_key():
    ct = encrypt(gen_key(1, 1), b"secret", NonceSource(RunRng(1)))
    with pytest.raises(AuthFailure):
        decrypt(gen_key(1, 2), ct)


def test_every_single_bit_flip_fails_authentication():
    key = gen_key(3, 0)
    blob = encrypt(key, b"address bytes", NonceSource(RunRng(3))).to_bytes()
    for position in range(len(blob)):
        for bit in range(8):
            mutated = bytearray(blob)
            mutated[position] ^= 1 << bit
            with pytest.raises(AuthFailure):
                decrypt(key, Ciphertext.from_bytes(bytes(mutated)))


@settings(max_examples=1000, deadline=None)
@given(
    st.integers(min_value=0, max_value=2**64 - 1),
    st.binary(min_size=1, max_size=256),
    st.integers(min_value=0),
)
def test_random_bit_flips_fail_authentication(seed, message, flip):
    key = gen_key(seed, 1)
    blob = bytearray(encrypt(key, message, NonceSource(RunRng(seed))).to_bytes())
    flip %= len(blob) * 8
    blob[flip // 8] ^= 1 << (flip % 8)
    with pytest.raises(AuthFailure):
        decrypt(key, Ciphertext.from_bytes(bytes(blob)))


def test_nonce_source_never_repeats():
    nonces = NonceSource(RunRng(5))
    drawn = {nonces.next_nonce() for _ in range(500)}
    assert len(drawn) == 500


def test_ciphertext_hex_roundtrip():
    ct = encrypt(gen_key(2, 0), b"x", NonceSource(RunRng(2)))
    assert Ciphertext.from_hex(ct.hex()) == ct


def test_ciphertext_too_short():
    with pytest.raises(AuthFailure):
        Ciphertext.from_bytes(b"\x00" * 27)


@settings(max_examples=50, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.binary(min_size=1, max_size=512), st.integers(min_value=0, max_value=2**64 - 1))
def test_roundtrip_property(plaintext, seed):
    key = gen_key(seed, 0)
    assert decrypt(key, encrypt(key, plaintext, NonceSource(RunRng(seed)))) == plaintext


# Group


def test_group_parameters():
    assert P.bit_length() == 2048
    assert Q.bit_length() == 256
    assert (P - 1) % Q == 0
    assert ELEMENT_BYTES == 256
    assert SCALAR_BYTES == 32
    assert SIGNATURE_BYTES == 288
    assert pow(G, Q, P) == 1
    assert G != 1


def test_generator_powers_match_modular_exponentiation():
    assert (GroupElement.generator() ** 5).value == pow(G, 5, P)
    assert GroupElement(pow(G, 5, P)) == GroupElement.generator() ** 5


def test_unit_scalar_returns_the_element():
    _, element = dh_keypair(RunRng(21))
    assert dh_shared(1, element) == element
    assert dh_shared(1, element.value) == element


@pytest.mark.parametrize("value", [0, P, P + 5, P - 1])
def test_invalid_elements(value):
    # p - 1 has order 2, so it is outside the prime-order subgroup.
    with pytest.raises(InvalidElement):
        GroupElement(value)


def test_dh_agreement():
    rng = RunRng(11)
    a, A = dh_keypair(rng.child(0))
    b, B = dh_keypair(rng.child(1))
    assert dh_shared(a, B) == dh_shared(b, A)


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=1, max_value=Q - 1), st.integers(min_value=1, max_value=Q - 1))
def test_dh_agreement_property(a, b):
    generator = GroupElement.generator()
    assert dh_shared(a, generator ** b) == dh_shared(b, generator ** a)


def test_dh_rejects_bad_scalar():
    _, element = dh_keypair(RunRng(1))
    with pytest.raises(InvalidScalar):
        dh_shared(0, element)
    with pytest.raises(InvalidScalar):
        dh_shared(Q, element)


def test_dh_rejects_element_outside_subgroup():
    with pytest.raises(InvalidElement):
        dh_shared(5, P - 1)


def test_exponentiations_are_counted():
    with counting() as ops:
        scalar, element = dh_keypair(RunRng(1))
        dh_shared(scalar, GroupElement(element.value))
    assert ops.get("group_exps") == 3


def test_schnorr_sign_verify():
    key = SigningKey.derive(b"\x01" * 32)
    signature = schnorr_sign(key, b"batch")
    assert schnorr_sign(key, b"batch") == signature
    assert schnorr_verify(key.public(), b"batch", signature)
    assert not schnorr_verify(key.public(), b"other", signature)
    assert not schnorr_verify(SigningKey.derive(b"\x02" * 32).public(), b"batch", signature)
    assert not schnorr_verify(key.public(), b"batch", signature[:-1])


def test_schnorr_verify_costs_constant_exponentiations():
    key = SigningKey.derive(b"\x03" * 32)
    public = key.public()
    signature = schnorr_sign(key, b"m")
    with counting() as ops:
        assert schnorr_verify(public, b"m", signature)
    assert ops.get("group_exps") == 3
