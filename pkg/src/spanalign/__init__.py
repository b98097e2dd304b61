"""spanalign: align sub-sentential information units between reference
summaries and source documents, evaluate predicted alignments, and derive
downstream datasets (salience, clustering, sentence planning, fusion,
ordering) from alignments."""

__version__ = "0.1.0"

from .corpus import (
    AlignmentPair,
    AlignmentSet,
    InformationUnit,
    Sentence,
    Span,
    TextEntry,
    Topic,
    span_text,
    split_sentences,
)
from .errors import IntegrityError, ParseError, ScorerError, SpanAlignError, UsageError
from .metrics import (
    char_jaccard,
    cojac,
    coverage,
    extended_recall_precision,
    joint_jaccard,
    rouge,
    rouge_text,
    sentence_salience_eval,
)

__all__ = [
    "AlignmentPair",
    "AlignmentSet",
    "InformationUnit",
    "Sentence",
    "Span",
    "TextEntry",
    "Topic",
    "span_text",
    "split_sentences",
    "SpanAlignError",
    "ParseError",
    "IntegrityError",
    "ScorerError",
    "UsageError",
    "char_jaccard",
    "joint_jaccard",
    "extended_recall_precision",
    "cojac",
    "coverage",
    "rouge",
    "rouge_text",
    "sentence_salience_eval",
    "__version__",
]
