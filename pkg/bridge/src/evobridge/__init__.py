"""Encoder bridge: turns text-only JSONL into an embedded corpus JSONL.

The bridge writes files only; the search stack consumes them through its own
ingest command, so neither package imports the other.
"""

from .embed import EmbedSummary, embed_texts
from .encoders import EncoderBackend, SentenceTransformerEncoder, load_encoder
from .errors import BridgeError
from .squad import fetch_squad_subset, load_squad_questions

__version__ = "0.1.0"

__all__ = [
    "BridgeError",
    "EmbedSummary",
    "EncoderBackend",
    "SentenceTransformerEncoder",
    "embed_texts",
    "fetch_squad_subset",
    "load_encoder",
    "load_squad_questions",
]
