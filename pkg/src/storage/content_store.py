"""
Content-addressed object store standing in for IPFS.

Objects are located and verified by the SHA-256 of their bytes. The in-memory
store is the default; ``FileContentStore`` keeps one file per object, named by
its hex digest, under a directory.
"""

import os
import tempfile
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional

from ..crypto.primitives import digest
from ..utils.errors import EmptyPayload, NotFound, StoreIntegrityError
from ..utils.logging import get_logger
from ..utils.opcount import record

CID_PREFIX = "cid:"

logger = get_logger("yotta.store")


@dataclass(frozen=True)
class ContentHash:
    digest: bytes

    def __post_init__(self):
        if len(self.digest) != 32:
            raise ValueError("content hashes are 32-byte digests")

    def __str__(self) -> str:
        return CID_PREFIX + self.digest.hex()

    def hex(self) -> str:
        return self.digest.hex()

    @classmethod
    def of(cls, payload: bytes) -> "ContentHash":
        return cls(digest(payload))

    @classmethod
    def parse(cls, text: str) -> "ContentHash":
        """Inverse of ``str()``; raises ValueError on anything but ``cid:`` + 64 lowercase hex."""
        if not text.startswith(CID_PREFIX):
            raise ValueError(f"missing {CID_PREFIX!r} prefix")
        body = text[len(CID_PREFIX):]
        if len(body) != 64 or body != body.lower():
            raise ValueError("expected 64 lowercase hex characters")
        return cls(bytes.fromhex(body))


@dataclass(frozen=True)
class StoredObject:
    hash: ContentHash
    payload: bytes


class ContentStore:
    """In-process store. Reads may run concurrently; writes are serialized."""

    def __init__(self):
        self._objects: dict[ContentHash, StoredObject] = {}
        self._write_lock = threading.RLock()

    def __len__(self) -> int:
        return len(self._objects)

    def __contains__(self, content_hash: ContentHash) -> bool:
        return content_hash in self._objects

    def __iter__(self) -> Iterator[ContentHash]:
        return iter(list(self._objects))

    def put(self, payload: bytes) -> ContentHash:
        if not payload:
            raise EmptyPayload("cannot store an empty payload")
        payload = bytes(payload)
        content_hash = ContentHash.of(payload)
        record("store_writes")
        with self._write_lock:
            existing = self._read(content_hash)
            if existing == payload:
                return content_hash
            if existing is not None and ContentHash.of(existing) == content_hash:
                raise StoreIntegrityError(f"distinct payloads collided under {content_hash}")
            if existing is not None:
                logger.warning("Rewriting corrupted object %s", content_hash)
            self._write(content_hash, payload)
        return content_hash

    def get(self, content_hash: ContentHash) -> bytes:
        record("store_reads")
        payload = self._read(content_hash)
        if payload is None:
            raise NotFound(str(content_hash))
        if ContentHash.of(payload) != content_hash:
            raise StoreIntegrityError(f"stored bytes no longer match {content_hash}")
        return payload

    def verify(self, content_hash: ContentHash, payload: bytes) -> bool:
        return ContentHash.of(bytes(payload)) == content_hash

    def simulate_corruption(self, content_hash: ContentHash, payload: bytes):
        """Overwrite an object without re-addressing it, as a misbehaving storage node would."""
        with self._write_lock:
            if self._read(content_hash) is None:
                raise NotFound(str(content_hash))
            logger.debug("Corrupting %s", content_hash)
            self._write(content_hash, bytes(payload))

    def _read(self, content_hash: ContentHash) -> Optional[bytes]:
        obj = self._objects.get(content_hash)
        return obj.payload if obj is not None else None

    def _write(self, content_hash: ContentHash, payload: bytes):
        self._objects[content_hash] = StoredObject(content_hash, payload)


class FileContentStore(ContentStore):
    """One file per object under ``root``, named by the hex digest."""

    def __init__(self, root: str):
        super().__init__()
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def __len__(self) -> int:
        return sum(1 for path in self.root.iterdir() if len(path.name) == 64)

    def __contains__(self, content_hash: ContentHash) -> bool:
        return self._path(content_hash).exists()

    def __iter__(self) -> Iterator[ContentHash]:
        return iter(
            ContentHash(bytes.fromhex(path.name))
            for path in sorted(self.root.iterdir())
            if len(path.name) == 64
        )

    def _path(self, content_hash: ContentHash) -> Path:
        return self.root / content_hash.hex()

    def _read(self, content_hash: ContentHash) -> Optional[bytes]:
        path = self._path(content_hash)
        if not path.exists():
            return None
        return path.read_bytes()

    def _write(self, content_hash: ContentHash, payload: bytes):
        # Write to a scratch file first so readers never see a partial object.
        with tempfile.NamedTemporaryFile(dir=self.root, delete=False) as tmp:
            tmp.write(payload)
        os.replace(tmp.name, self._path(content_hash))


def open_store(store_dir: Optional[str] = None) -> ContentStore:
    """File-backed store when a directory is given, in-memory otherwise."""
    if store_dir:
        logger.info("Using file-backed content store at %s", store_dir)
        return FileContentStore(store_dir)
    return ContentStore()
