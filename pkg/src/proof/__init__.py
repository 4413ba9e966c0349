"""Proof system: statements, evaluation functions and backends."""

from .backend import RECHECK_BACKEND_ID, ProofBackend, RecheckBackend, create_backend
from .evals import EvalFunction, builtin_eval, register_eval
from .statement import AggregateProof, Proof, SellerStatement, SellerWitness

__all__ = [
    "RECHECK_BACKEND_ID",
    "ProofBackend",
    "RecheckBackend",
    "create_backend",
    "EvalFunction",
    "builtin_eval",
    "register_eval",
    "AggregateProof",
    "Proof",
    "SellerStatement",
    "SellerWitness",
]
