"""Knowledge-based question answering over an in-memory graph.

Questions are resolved through a three-tier intent cascade (keyword rules,
cosine similarity over stored question vectors, generative fallback),
answered by filling intent-keyed graph query templates, and unknown
intents are learned at runtime from a feedback dialogue.
"""

__version__ = "0.1.0"

from .config import ServiceConfig, load_config
from .engine import Engine

__all__ = ["Engine", "ServiceConfig", "load_config", "__version__"]
