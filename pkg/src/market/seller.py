"""
Seller side of the protocol: Step 1 preparation, Step 4 claims, and the
modelled seller misbehaviours.
"""

from dataclasses import replace
from typing import Optional

from ..crypto.primitives import NonceSource, commit_key, encrypt, gen_key
from ..ledger.chain import Ledger
from ..ledger.models import ClaimResult
from ..proof.backend import ProofBackend
from ..proof.evals import builtin_eval
from ..proof.statement import SellerStatement, SellerWitness
from ..storage.content_store import ContentStore
from ..utils.config import AdversaryMix
from ..utils.errors import EmptyData
from ..utils.rng import RunRng
from .models import AdversaryKind, Listing, SellerOffer

_ADVERSARY_ORDER = (
    AdversaryKind.WRONG_KEY,
    AdversaryKind.FAILING_F,
    AdversaryKind.PROOF_REPLAY,
    AdversaryKind.STORE_TAMPER,
    AdversaryKind.NON_CLAIMER,
)


def seller_prepare(
    data: bytes,
    eval_id: str,
    price: int,
    rng: RunRng,
    *,
    store: ContentStore,
    backend: ProofBackend,
    seller: str = "seller",
    item: int = 0,
) -> Listing:
    """
    Step 1 for one (buyer, item) pair.

    Draws a fresh key, stores encrypt(K, data) in the content store, encrypts
    the textual content address under K and proves the statement. The
    returned ``Listing`` keeps the key and data; ``listing.offer`` is what
    the buyer sees.
    """
    if not data:
        raise EmptyData(f"{seller} has no data for item {item}")
    eval_fn = builtin_eval(eval_id)

    key = gen_key(rng.next_u64(), item)
    nonces = NonceSource(rng)
    content_hash = store.put(encrypt(key, data, nonces).to_bytes())
    address = str(content_hash).encode("utf-8")
    ciphertext = encrypt(key, address, nonces)

    stmt = SellerStatement(commit_key(key), ciphertext, content_hash, eval_fn.eval_id)
    proof = backend.prove(stmt, SellerWitness(data, key, address), eval_fn)

    offer = SellerOffer(
        seller=seller,
        item=item,
        key_commitment=stmt.key_commitment,
        ciphertext=ciphertext,
        content_hash=content_hash,
        proof=proof,
        eval_id=eval_fn.eval_id,
        asking_price=price,
    )
    return Listing(offer=offer, key=key, data=data)


def seller_claim(ledger: Ledger, contract_id: str, seller: str, key) -> ClaimResult:
    """Step 4: reveal the key to the escrow contract."""
    return ledger.submit_key(contract_id, seller, key)


def assign_adversaries(sellers: int, mix: AdversaryMix, rng: RunRng) -> list[AdversaryKind]:
    """
    Seeded role per seller index.

    Each misbehaviour gets floor(share * sellers / 100) sellers; positions
    are a seeded shuffle, so the expected counts are known before a run.
    """
    shares = mix.model_dump()
    kinds: list[AdversaryKind] = []
    for kind in _ADVERSARY_ORDER:
        kinds.extend([kind] * int(shares[kind.value] * sellers // 100))
    kinds.extend([AdversaryKind.HONEST] * (sellers - len(kinds)))
    positions = rng.shuffled(list(range(sellers)))

    assigned = [AdversaryKind.HONEST] * sellers
    for position, kind in zip(positions, kinds):
        assigned[position] = kind
    return assigned


def expected_adversary_counts(sellers: int, mix: AdversaryMix) -> dict[AdversaryKind, int]:
    shares = mix.model_dump()
    counts = {kind: int(shares[kind.value] * sellers // 100) for kind in _ADVERSARY_ORDER}
    counts[AdversaryKind.HONEST] = sellers - sum(counts.values())
    return counts


def make_wrong_key(listing: Listing, rng: RunRng) -> Listing:
    """The seller will submit a key unrelated to its commitment."""
    listing.kind = AdversaryKind.WRONG_KEY
    listing.claim_key = gen_key(rng.next_u64(), listing.offer.item + 1)
    return listing


def replay_proof(listing: Listing, donor: SellerOffer) -> Listing:
    """Present another offer's proof alongside this seller's own statement."""
    listing.kind = AdversaryKind.PROOF_REPLAY
    listing.offer = replace(listing.offer, proof=donor.proof)
    return listing


def tamper_store(listing: Listing, store: ContentStore, replacement: Optional[bytes] = None) -> Listing:
    """Overwrite the stored payload after proving, without changing its address."""
    listing.kind = AdversaryKind.STORE_TAMPER
    store.simulate_corruption(listing.offer.content_hash, replacement or b"tampered:" + listing.data[:64])
    return listing
