"""Pairwise Diffie-Hellman comparison baseline."""

from .dcdh import BaselineReport, CostRecord, PairwiseSession, PartyState, run_baseline, run_pair

__all__ = [
    "BaselineReport",
    "CostRecord",
    "PairwiseSession",
    "PartyState",
    "run_baseline",
    "run_pair",
]
