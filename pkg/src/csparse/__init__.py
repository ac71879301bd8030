"""Processing pipeline for Hindi-English code-switched text.

Token language identification, normalization/back-transliteration with
context-aware sentence decoding, and joint POS tagging + dependency
parsing, plus the file formats and metrics that glue them together.
"""

__version__ = "0.1.0"

from .conllu import (
    LangTag,
    Sentence,
    Token,
    parse_conllu,
    read_conllu_file,
    validate_tree,
    write_conllu,
    write_conllu_file,
)
from .errors import ConlluError, DataError, ModelError
from .metrics import EvalReport, LabelScore, attachment_scores, label_prf, token_accuracy
from .pipeline import (
    AnnotationPipeline,
    PipelineConfig,
    PipelineOutput,
    annotate_corpus,
    evaluate,
    merge_spaces,
    run_pipeline,
)

__all__ = [
    "AnnotationPipeline",
    "ConlluError",
    "DataError",
    "EvalReport",
    "LabelScore",
    "LangTag",
    "ModelError",
    "PipelineConfig",
    "PipelineOutput",
    "Sentence",
    "Token",
    "annotate_corpus",
    "attachment_scores",
    "evaluate",
    "label_prf",
    "merge_spaces",
    "parse_conllu",
    "read_conllu_file",
    "run_pipeline",
    "token_accuracy",
    "validate_tree",
    "write_conllu",
    "write_conllu_file",
]
