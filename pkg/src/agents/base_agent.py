"""
Base agent class for market actors.
"""

from abc import ABC, abstractmethod
from enum import Enum
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field

from ..utils.logging import AgentLogger


class AgentStatus(str, Enum):
    IDLE = "idle"
    RUNNING = "running"
    ERROR = "error"


class AgentMessage(BaseModel):
    """Message passed between agents."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    sender: str
    recipient: str
    message_type: str
    payload: dict[str, Any] = Field(default_factory=dict)


class BaseAgent(ABC):
    """Abstract base class for buyers, sellers and the coordinator."""

    def __init__(self, name: str, role: Optional[str] = None):
        self.name = name
        self.role = role or name
        self.status = AgentStatus.IDLE
        self.logger = AgentLogger(name, self.role)
        self.stats = {
            "messages_received": 0,
            "messages_sent": 0,
            "errors": 0,
        }

    @abstractmethod
    async def process(self, message: AgentMessage) -> Optional[AgentMessage]:
        """
        Handle one message.

        Args:
            message: Incoming message

        Returns:
            Optional response message
        """

    async def handle(self, message: AgentMessage) -> Optional[AgentMessage]:
        """Run ``process`` with status and statistics bookkeeping; errors propagate."""
        self.stats["messages_received"] += 1
        self.status = AgentStatus.RUNNING
        try:
            response = await self.process(message)
        except Exception as e:
            self.stats["errors"] += 1
            self.status = AgentStatus.ERROR
            self.logger.error(f"{message.message_type} failed: {e}")
            raise
        self.status = AgentStatus.IDLE
        return response

    def send_message(self, recipient: str, message_type: str, payload: dict) -> AgentMessage:
        """Create a message addressed to another agent."""
        message = AgentMessage(
            sender=self.name,
            recipient=recipient,
            message_type=message_type,
            payload=payload,
        )
        self.stats["messages_sent"] += 1
        return message

    def get_status(self) -> dict:
        return {
            "name": self.name,
            "role": self.role,
            "status": self.status.value,
            "stats": self.stats,
        }
