"""
Ledger data models: accounts, escrow contracts and transaction records.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field


class EscrowStatus(str, Enum):
    FUNDED = "Funded"
    PAID = "Paid"
    REFUNDED = "Refunded"


class EscrowMode(str, Enum):
    COMMITMENT_ONLY = "commitment-only"
    FULL_DECRYPT = "full-decrypt"


class TxKind(str, Enum):
    GENESIS = "genesis"
    DEPLOY = "deploy"
    SUBMIT_KEY = "submit_key"
    ADVANCE = "advance"
    REFUND = "refund"


class EscrowEntrySpec(BaseModel):
    """One payment condition requested by the buyer at deployment."""

    seller: str
    key_commitment: str = Field(description="Hex SHA-256 key commitment")
    amount: int
    ciphertext: Optional[str] = Field(default=None, description="Hex C_i, full-decrypt mode only")
    content_hash: Optional[str] = None
    proof_digest: Optional[str] = None


class EscrowEntry(EscrowEntrySpec):
    status: EscrowStatus = EscrowStatus.FUNDED
    revealed_key: Optional[str] = None

    @property
    def settled(self) -> bool:
        return self.status != EscrowStatus.FUNDED


class EscrowContract(BaseModel):
    id: str
    buyer: str
    entries: list[EscrowEntry]
    deadline: int
    mode: EscrowMode = EscrowMode.COMMITMENT_ONLY

    def escrowed(self) -> int:
        """Tokens still held: the sum over Funded entries."""
        return sum(e.amount for e in self.entries if e.status == EscrowStatus.FUNDED)

    def settled_total(self, status: EscrowStatus) -> int:
        return sum(e.amount for e in self.entries if e.status == status)

    def is_settled(self) -> bool:
        return all(e.settled for e in self.entries)


class Transaction(BaseModel):
    """One line of the ledger log."""

    index: int
    height: int
    kind: TxKind
    payload: dict[str, Any] = Field(default_factory=dict)
    state_digest: str


class LogSeal(BaseModel):
    """Closing line of an exported log: how many records it holds and the last digest."""

    model_config = ConfigDict(extra="forbid")

    records: int
    head_digest: str


class SealLine(BaseModel):
    model_config = ConfigDict(extra="forbid")

    seal: LogSeal


class LedgerState(BaseModel):
    balances: dict[str, int] = Field(default_factory=dict)
    height: int = 0
    contracts: dict[str, EscrowContract] = Field(default_factory=dict)
    log: list[Transaction] = Field(default_factory=list)

    def escrowed(self) -> int:
        return sum(c.escrowed() for c in self.contracts.values())

    def total_supply(self) -> int:
        """Balances plus tokens held in escrow; constant after genesis."""
        return sum(self.balances.values()) + self.escrowed()


@dataclass(frozen=True)
class ClaimResult:
    """Outcome of a key submission: Paid(amount) or Rejected(reason)."""

    paid: bool
    amount: int = 0
    entry_index: Optional[int] = None
    reason: str = ""

    @classmethod
    def paid_out(cls, amount: int, entry_index: int) -> "ClaimResult":
        return cls(True, amount, entry_index)

    @classmethod
    def rejected(cls, reason: str) -> "ClaimResult":
        return cls(False, reason=reason)

    def __str__(self) -> str:
        return f"Paid({self.amount})" if self.paid else f"Rejected({self.reason!r})"
