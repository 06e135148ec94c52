"""Occlusion-based producer of word-importance files.

Reads a sentence records file, scores every token by leave-one-out
occlusion against a scoring oracle, and writes the interchange format
consumed by downstream explainability tooling. Deliberately standalone:
it shares file formats with that tooling, not code.
"""

from .adapter import OcclusionAdapter, load_sentences, write_importance
from .oracles import (
    ConstantOracle,
    KeywordOracle,
    LexiconOracle,
    TokenCountOracle,
    build_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "OcclusionAdapter",
    "load_sentences",
    "write_importance",
    "TokenCountOracle",
    "ConstantOracle",
    "KeywordOracle",
    "LexiconOracle",
    "build_oracle",
    "__version__",
]
