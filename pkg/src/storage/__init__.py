"""Content-addressed storage."""

from .content_store import ContentHash, ContentStore, FileContentStore, StoredObject, open_store

__all__ = [
    "ContentHash",
    "ContentStore",
    "FileContentStore",
    "StoredObject",
    "open_store",
]
