"""Turn offline sequence decoders into simultaneous translators and measure the latency cost."""

from .core import EOS, AgentAction, Beam, CommitLog, Hypothesis, RunReport, Token, Utterance, tokens, validate_utterance
from .engine import EngineConfig, Session, new_session
from .stability import DecodeHistory, Strategy, hold_n, la_n, lcp, sp_n

__version__ = "0.1.0"

__all__ = [
    "EOS",
    "AgentAction",
    "Beam",
    "CommitLog",
    "DecodeHistory",
    "EngineConfig",
    "Hypothesis",
    "RunReport",
    "Session",
    "Strategy",
    "Token",
    "Utterance",
    "hold_n",
    "la_n",
    "lcp",
    "new_session",
    "sp_n",
    "tokens",
    "validate_utterance",
]
