"""Market actors: sellers, buyers and the coordinator that runs them."""

from .base_agent import AgentMessage, AgentStatus, BaseAgent
from .buyer_agent import BuyerAgent
from .coordinator import MarketCoordinator, run_market
from .seller_agent import SellerAgent

__all__ = [
    "AgentMessage",
    "AgentStatus",
    "BaseAgent",
    "BuyerAgent",
    "MarketCoordinator",
    "run_market",
    "SellerAgent",
]
