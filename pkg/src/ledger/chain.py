"""
Deterministic simulated blockchain.

Accounts hold integer tokens, ``height`` is the block clock and every state
change is appended to an ordered log of ``Transaction`` records. The escrow
contract implements deposit, key-reveal verification, payout and timeout
refund. Each record carries ``state_digest``, a hash chain over the previous
digest, the canonical record and the post-state of everything the record
touched, so ``replay`` can re-execute a log and pinpoint the first record
that does not reproduce.

All mutating calls go through one lock and are applied in submission order.
"""

import json
import threading
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence, Union

from pydantic import ValidationError

from ..crypto.primitives import Ciphertext, SymmetricKey, commit_key, decrypt, digest
from ..utils.errors import (
    AlreadySettled,
    AuthFailure,
    CorruptLog,
    DeadlineNotReached,
    DeadlinePassed,
    EmptyEntries,
    InsufficientFunds,
    InvalidAmount,
    LedgerError,
    PastDeadline,
    UnknownContract,
    UnknownSeller,
    YottaError,
)
from ..utils.logging import AgentLogger
from .models import (
    ClaimResult,
    EscrowContract,
    EscrowEntry,
    EscrowEntrySpec,
    EscrowMode,
    EscrowStatus,
    LedgerState,
    LogSeal,
    SealLine,
    Transaction,
    TxKind,
)

GENESIS_DIGEST = bytes(32)


def _canonical(obj: Any) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")


def seal_log(log: Sequence[Transaction]) -> LogSeal:
    head = log[-1].state_digest if log else GENESIS_DIGEST.hex()
    return LogSeal(records=len(log), head_digest=head)


def dump_log(log: Iterable[Transaction]) -> str:
    """Render ``log`` as NDJSON closed by its seal line."""
    log = list(log)
    lines = [tx.model_dump_json() for tx in log]
    lines.append(SealLine(seal=seal_log(log)).model_dump_json())
    return "\n".join(lines) + "\n"


class Ledger:
    """Single-writer ledger with escrow contracts."""

    def __init__(self, accounts: Optional[dict[str, int]] = None):
        self.logger = AgentLogger("ledger")
        self._state = LedgerState()
        self._lock = threading.RLock()
        self._last_digest = GENESIS_DIGEST
        self._genesis_total: Optional[int] = None
        # (contract id, seller) -> entry positions
        self._seller_entries: dict[tuple[str, str], list[int]] = {}

        if accounts is not None:
            self.genesis(accounts)

    # Queries

    @property
    def height(self) -> int:
        return self._state.height

    @property
    def genesis_total(self) -> Optional[int]:
        return self._genesis_total

    @property
    def log(self) -> list[Transaction]:
        with self._lock:
            return list(self._state.log)

    def balance(self, account: str) -> int:
        return self._state.balances.get(account, 0)

    def contract(self, contract_id: str) -> EscrowContract:
        with self._lock:
            return self._contract(contract_id).model_copy(deep=True)

    def snapshot(self) -> LedgerState:
        with self._lock:
            return self._state.model_copy(deep=True)

    def check_conservation(self) -> bool:
        return self._genesis_total is not None and self._state.total_supply() == self._genesis_total

    def revealed_keys(self, contract_id: str) -> dict[int, SymmetricKey]:
        """Keys published by successful submissions, read back from the log."""
        keys = {}
        for tx in self.log:
            if tx.kind != TxKind.SUBMIT_KEY or tx.payload.get("contract_id") != contract_id:
                continue
            result = tx.payload["result"]
            if result.get("status") == "paid":
                keys[result["entry"]] = SymmetricKey.from_hex(tx.payload["key"])
        return keys

    # Transactions

    def genesis(self, accounts: dict[str, int]) -> int:
        """Mint the initial balances. Only valid as the first record."""
        with self._lock:
            if self._state.log:
                raise LedgerError("genesis must be the first record of the log")
            for account, amount in accounts.items():
                if not isinstance(amount, int) or amount < 0:
                    raise InvalidAmount(f"initial balance of {account} must be a non-negative integer")

            balances = {account: int(amount) for account, amount in sorted(accounts.items())}
            total = sum(balances.values())
            self._state.balances.update(balances)
            self._genesis_total = total
            self._append(
                TxKind.GENESIS,
                {"accounts": balances, "result": {"total": total}},
                accounts=balances,
            )
            self.logger.debug(f"Genesis: {len(balances)} accounts, {total} tokens")
            return total

    def deploy_escrow(
        self,
        buyer: str,
        entries: Sequence[Union[EscrowEntrySpec, dict]],
        deadline: int,
        mode: Union[EscrowMode, str] = EscrowMode.COMMITMENT_ONLY,
    ) -> str:
        """Lock the buyer's payment for each entry until ``deadline``; returns the contract id."""
        mode = EscrowMode(mode)
        specs = [e if isinstance(e, EscrowEntrySpec) else EscrowEntrySpec(**e) for e in entries]

        with self._lock:
            if not specs:
                raise EmptyEntries("an escrow needs at least one entry")
            for spec in specs:
                if spec.amount < 1:
                    raise InvalidAmount(f"entry for {spec.seller} pays {spec.amount}; minimum is 1")
                if mode == EscrowMode.FULL_DECRYPT and spec.ciphertext is None:
                    raise LedgerError(f"full-decrypt entry for {spec.seller} carries no ciphertext")
            if deadline <= self._state.height:
                raise PastDeadline(f"deadline {deadline} is not after height {self._state.height}")
            total = sum(spec.amount for spec in specs)
            balance = self.balance(buyer)
            if balance < total:
                raise InsufficientFunds(f"{buyer} holds {balance}, escrow needs {total}")

            contract_id = f"escrow-{len(self._state.contracts) + 1:06d}"
            contract = EscrowContract(
                id=contract_id,
                buyer=buyer,
                entries=[EscrowEntry(**spec.model_dump()) for spec in specs],
                deadline=deadline,
                mode=mode,
            )
            self._state.balances[buyer] = balance - total
            self._state.contracts[contract_id] = contract
            for position, entry in enumerate(contract.entries):
                self._seller_entries.setdefault((contract_id, entry.seller), []).append(position)

            self._append(
                TxKind.DEPLOY,
                {
                    "contract_id": contract_id,
                    "buyer": buyer,
                    "deadline": deadline,
                    "mode": mode.value,
                    "entries": [spec.model_dump() for spec in specs],
                    "result": {"contract_id": contract_id, "escrowed": total},
                },
                accounts=[buyer],
                entries=[(contract_id, i) for i in range(len(specs))],
            )
            self.logger.debug(f"{contract_id}: {buyer} escrowed {total} for {len(specs)} entries")
            return contract_id

    def submit_key(self, contract_id: str, seller: str, key: Union[SymmetricKey, str]) -> ClaimResult:
        """Reveal a key to claim a Funded entry of ``seller``; rejected attempts stay retryable."""
        if not isinstance(key, SymmetricKey):
            key = SymmetricKey.from_hex(key)

        with self._lock:
            contract = self._contract(contract_id)
            positions = self._seller_entries.get((contract_id, seller))
            if not positions:
                raise UnknownSeller(f"{seller} has no entry in {contract_id}")
            if self._state.height > contract.deadline:
                raise DeadlinePassed(f"height {self._state.height} is past deadline {contract.deadline}")
            funded = [i for i in positions if contract.entries[i].status == EscrowStatus.FUNDED]
            if not funded:
                raise AlreadySettled(f"every entry of {seller} in {contract_id} is settled")

            # A seller may hold several entries (one per item); the key picks the entry.
            commitment = commit_key(key).hex()
            matched = next((i for i in funded if contract.entries[i].key_commitment == commitment), None)

            if matched is None:
                outcome = ClaimResult.rejected("commitment mismatch")
            elif contract.mode == EscrowMode.FULL_DECRYPT and not self._decrypts(
                key, contract.entries[matched].ciphertext
            ):
                outcome = ClaimResult.rejected("decryption failed")
            else:
                entry = contract.entries[matched]
                entry.status = EscrowStatus.PAID
                entry.revealed_key = key.reveal()
                self._state.balances[seller] = self.balance(seller) + entry.amount
                outcome = ClaimResult.paid_out(entry.amount, matched)

            if outcome.paid:
                result = {"status": "paid", "entry": outcome.entry_index, "amount": outcome.amount}
            else:
                result = {"status": "rejected", "reason": outcome.reason}
            self._append(
                TxKind.SUBMIT_KEY,
                {"contract_id": contract_id, "seller": seller, "key": key.reveal(), "result": result},
                accounts=[seller] if outcome.paid else (),
                entries=[(contract_id, outcome.entry_index)] if outcome.paid else (),
            )
            self.logger.debug(f"{contract_id}: {seller} -> {outcome}")
            return outcome

    def advance_blocks(self, n: int) -> int:
        if not isinstance(n, int) or n < 1:
            raise InvalidAmount("blocks to advance must be a positive integer")
        with self._lock:
            self._state.height += n
            self._append(TxKind.ADVANCE, {"blocks": n, "result": {"height": self._state.height}})
            return self._state.height

    def refund_expired(self, contract_id: str) -> int:
        """Return every still-Funded entry to the buyer; a second call refunds 0."""
        with self._lock:
            contract = self._contract(contract_id)
            if self._state.height <= contract.deadline:
                raise DeadlineNotReached(
                    f"{contract_id} expires after height {contract.deadline}, now {self._state.height}"
                )
            positions = [i for i, e in enumerate(contract.entries) if e.status == EscrowStatus.FUNDED]
            if not positions:
                return 0

            refunded = sum(contract.entries[i].amount for i in positions)
            for i in positions:
                contract.entries[i].status = EscrowStatus.REFUNDED
            self._state.balances[contract.buyer] = self.balance(contract.buyer) + refunded
            self._append(
                TxKind.REFUND,
                {"contract_id": contract_id, "result": {"refunded": refunded, "entries": positions}},
                accounts=[contract.buyer],
                entries=[(contract_id, i) for i in positions],
            )
            self.logger.debug(f"{contract_id}: refunded {refunded} to {contract.buyer}")
            return refunded

    # Internals

    def _contract(self, contract_id: str) -> EscrowContract:
        contract = self._state.contracts.get(contract_id)
        if contract is None:
            raise UnknownContract(contract_id)
        return contract

    @staticmethod
    def _decrypts(key: SymmetricKey, ciphertext_hex: Optional[str]) -> bool:
        if ciphertext_hex is None:
            return False
        try:
            decrypt(key, Ciphertext.from_hex(ciphertext_hex))
        except (AuthFailure, ValueError):
            return False
        return True

    def _append(
        self,
        kind: TxKind,
        payload: dict[str, Any],
        accounts: Iterable[str] = (),
        entries: Iterable[tuple[str, int]] = (),
    ) -> Transaction:
        index = len(self._state.log)
        record = {"index": index, "height": self._state.height, "kind": kind.value, "payload": payload}
        post = {
            "accounts": {a: self.balance(a) for a in sorted(set(accounts))},
            "entries": [
                [cid, i, self._state.contracts[cid].entries[i].status.value,
                 self._state.contracts[cid].entries[i].revealed_key]
                for cid, i in entries
            ],
        }
        chained = digest(self._last_digest + _canonical(record) + _canonical(post))
        tx = Transaction(
            index=index,
            height=self._state.height,
            kind=kind,
            payload=payload,
            state_digest=chained.hex(),
        )
        self._state.log.append(tx)
        self._last_digest = chained
        return tx

    # Log persistence and audit

    def export_log(self, path: Union[str, Path]):
        Path(path).write_text(dump_log(self.log))

    @staticmethod
    def load_log(path: Union[str, Path]) -> tuple[list[Transaction], Optional[LogSeal]]:
        """Parse an NDJSON log and its seal; undecodable lines raise CorruptLog with their position."""
        records: list[Transaction] = []
        seal: Optional[LogSeal] = None
        with open(path, "r") as f:
            for position, line in enumerate(f):
                if not line.strip():
                    continue
                if seal is not None:
                    raise CorruptLog(position, "record after the log seal")
                try:
                    records.append(Transaction.model_validate_json(line))
                    continue
                except ValidationError as exc:
                    error = exc
                try:
                    seal = SealLine.model_validate_json(line).seal
                except ValidationError:
                    raise CorruptLog(
                        position, f"not a transaction record: {error.error_count()} errors"
                    ) from error
        if not records:
            raise CorruptLog(0, "log is empty")
        return records, seal

    def _execute(self, tx: Transaction):
        payload = tx.payload
        if tx.kind == TxKind.GENESIS:
            self.genesis(payload["accounts"])
        elif tx.kind == TxKind.DEPLOY:
            self.deploy_escrow(payload["buyer"], payload["entries"], payload["deadline"], payload["mode"])
        elif tx.kind == TxKind.SUBMIT_KEY:
            self.submit_key(payload["contract_id"], payload["seller"], payload["key"])
        elif tx.kind == TxKind.ADVANCE:
            self.advance_blocks(payload["blocks"])
        elif tx.kind == TxKind.REFUND:
            self.refund_expired(payload["contract_id"])

    @classmethod
    def replay(cls, log: Sequence[Transaction]) -> LedgerState:
        """
        Re-execute ``log`` from an empty ledger.

        Every record must reproduce its payload (including the recorded
        result), height and state digest, and token conservation must hold
        after it. Raises CorruptLog at the first record that fails.
        """
        ledger = cls()
        for position, tx in enumerate(log):
            if tx.index != position:
                raise CorruptLog(position, f"expected index {position}, found {tx.index}")
            if (position == 0) != (tx.kind == TxKind.GENESIS):
                raise CorruptLog(position, "genesis must be exactly the first record")
            try:
                ledger._execute(tx)
            except (YottaError, KeyError, TypeError, ValueError, ValidationError) as exc:
                raise CorruptLog(position, f"{tx.kind.value} does not re-execute: {exc}") from exc

            if len(ledger._state.log) != position + 1:
                raise CorruptLog(position, "record has no effect on replay")
            produced = ledger._state.log[-1]
            if produced.payload != tx.payload:
                raise CorruptLog(position, "payload or result differs on replay")
            if produced.height != tx.height:
                raise CorruptLog(position, f"height {tx.height} recorded, {produced.height} replayed")
            if produced.state_digest != tx.state_digest:
                raise CorruptLog(position, "state digest differs on replay")
            if not ledger.check_conservation():
                raise CorruptLog(position, "token conservation violated")

        return ledger.snapshot()

    @classmethod
    def verify_log(cls, path: Union[str, Path]) -> LedgerState:
        """Replay an exported log, then check that its seal covers every record."""
        records, seal = cls.load_log(path)
        state = cls.replay(records)
        end = len(records)
        if seal is None:
            raise CorruptLog(end, "log ends before its seal")
        if seal.records != end:
            raise CorruptLog(end, f"seal counts {seal.records} records, log holds {end}")
        if seal.head_digest != records[-1].state_digest:
            raise CorruptLog(end, "seal head digest differs from the last record")
        return state
