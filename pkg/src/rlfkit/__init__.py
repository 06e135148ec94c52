"""rlfkit: detect and normalize repetitive lengthening in text, build
paired sentiment datasets, and score how much attention a model's
word-importance output gives the lengthened token.
"""

__version__ = "0.1.0"

from .corpus import Document, Sentence, map_rating_to_label
from .detect import (
    Dictionary,
    RlfSpan,
    RlfStyle,
    bundled_dictionary,
    generalized_form,
    reduce_punct_root,
    reduce_to_root,
    rlf_search,
    scan_word,
)
from .explain import (
    ExplainabilityReport,
    WisRecord,
    align_rlf_index,
    explainability_score,
    normalize_wis,
    occlusion_wis,
)
from .instruct import (
    InstructionSample,
    build_instruction_dataset,
    build_sa_prompt,
    build_wis_prompt,
    parse_wis_response,
)
from .metrics import (
    accuracy,
    dataset_summary,
    doc_sentence_confusion,
    krippendorff_alpha,
    length_binned_accuracy,
    macro_f1,
    pearson_corr,
)
from .pipeline import (
    BalancePolicy,
    RlfSentenceRecord,
    balance,
    extract_rlf,
    merge_short_sentences,
    pair_control,
    segment_sentences,
    stratified_subset,
)

__all__ = [
    "BalancePolicy",
    "Dictionary",
    "Document",
    "ExplainabilityReport",
    "InstructionSample",
    "RlfSentenceRecord",
    "RlfSpan",
    "RlfStyle",
    "Sentence",
    "WisRecord",
    "accuracy",
    "align_rlf_index",
    "balance",
    "build_instruction_dataset",
    "build_sa_prompt",
    "build_wis_prompt",
    "bundled_dictionary",
    "dataset_summary",
    "doc_sentence_confusion",
    "explainability_score",
    "extract_rlf",
    "generalized_form",
    "krippendorff_alpha",
    "length_binned_accuracy",
    "macro_f1",
    "map_rating_to_label",
    "merge_short_sentences",
    "normalize_wis",
    "occlusion_wis",
    "pair_control",
    "parse_wis_response",
    "pearson_corr",
    "reduce_punct_root",
    "reduce_to_root",
    "rlf_search",
    "scan_word",
    "segment_sentences",
    "stratified_subset",
]
