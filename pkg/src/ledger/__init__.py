"""Simulated ledger with escrow contracts."""

from .chain import GENESIS_DIGEST, Ledger
from .models import (
    ClaimResult,
    EscrowContract,
    EscrowEntry,
    EscrowEntrySpec,
    EscrowMode,
    EscrowStatus,
    LedgerState,
    Transaction,
    TxKind,
)

__all__ = [
    "GENESIS_DIGEST",
    "Ledger",
    "ClaimResult",
    "EscrowContract",
    "EscrowEntry",
    "EscrowEntrySpec",
    "EscrowMode",
    "EscrowStatus",
    "LedgerState",
    "Transaction",
    "TxKind",
]
