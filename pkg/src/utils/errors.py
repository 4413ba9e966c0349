"""
Exception hierarchy for the Yotta data market.
"""

from typing import Optional


class YottaError(Exception):
    """Base class for every error raised by this package."""


class InvalidConfig(YottaError):
    """Scenario or command-line configuration could not be validated."""


# Content store

class StoreError(YottaError):
    pass


class EmptyPayload(StoreError):
    pass


class NotFound(StoreError):
    pass


class StoreIntegrityError(StoreError):
    """Stored bytes no longer hash to their content identifier, or two payloads collided."""


# Crypto

class CryptoError(YottaError):
    pass


class EmptyPlaintext(CryptoError):
    pass


class AuthFailure(CryptoError):
    """Wrong key or tampered ciphertext. The two cases are indistinguishable."""


class InvalidElement(CryptoError):
    pass


class InvalidScalar(CryptoError):
    pass


class KeyAgreementMismatch(CryptoError):
    pass


# Proof system

class ProofError(YottaError):
    pass


class MalformedProof(ProofError):
    pass


class MixedBackends(ProofError):
    pass


class EmptyBatch(ProofError):
    pass


class CountMismatch(ProofError):
    pass


class UnknownEval(ProofError):
    pass


# Ledger

class LedgerError(YottaError):
    pass


class InsufficientFunds(LedgerError):
    pass


class PastDeadline(LedgerError):
    pass


class EmptyEntries(LedgerError):
    pass


class InvalidAmount(LedgerError):
    pass


class UnknownContract(LedgerError):
    pass


class UnknownSeller(LedgerError):
    pass


class AlreadySettled(LedgerError):
    pass


class DeadlinePassed(LedgerError):
    pass


class DeadlineNotReached(LedgerError):
    pass


class CorruptLog(LedgerError):
    """A ledger log failed replay; ``index`` is the first invalid record."""

    def __init__(self, index: int, reason: str):
        super().__init__(f"record {index}: {reason}")
        self.index = index
        self.reason = reason


# Market protocol

class MarketError(YottaError):
    pass


class EmptyData(MarketError):
    pass


class InvalidOrder(MarketError):
    pass


class SettlementPending(MarketError):
    """Finalization requested while entries are Funded and the deadline is still open."""


class IntegrityFailure(MarketError):
    """One of the buyer's delivery checks failed for a Paid entry."""

    STAGES = ("decrypt_address", "fetch", "content_hash", "decrypt_payload", "evaluate")

    def __init__(self, stage: str, seller: Optional[str] = None, detail: str = ""):
        who = f" (seller {seller})" if seller else ""
        super().__init__(f"integrity failure at {stage}{who}: {detail}".rstrip(": "))
        self.stage = stage
        self.seller = seller
        self.detail = detail
