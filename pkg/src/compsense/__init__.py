"""compsense: corpus tools for compositionality-sensitive NLI evaluation.

The toolkit trains a bag-of-words softmax regression on NLI corpora,
scores every example by how strongly its lexical content argues for a
wrong label (the lexically-misleading score), extracts the hard subsets
where that score is high, generates rule-based adversarial pairs from
dependency parses, and evaluates external model predictions on all of
the above. Every artifact-producing step is deterministic and leaves a
run manifest beside its output.
"""

__version__ = "0.1.0"

from .adversary import (
    AdversarialPair,
    AmodMap,
    GenReport,
    Rejection,
    SvoFrame,
    find_svo,
    gen_addamod,
    gen_soswap,
    generate_adversaries,
    mine_amod_map,
    pair_to_obj,
)
from .corpus import (
    ConlluStats,
    ConllToken,
    DepTree,
    IngestStats,
    NliExample,
    PtbTree,
    example_to_obj,
    flat_parse,
    leaves_with_pos,
    load_conllu,
    load_nli_jsonl,
    parse_ptb,
    render_ptb,
    shuffle_words,
    with_determined_gold,
    write_jsonl,
)
from .errors import (
    CompsenseError,
    DataValidationError,
    FingerprintMismatchError,
    PtbParseError,
)
from .config import PipelineConfig, validate_config
from .evaluation import (
    EvalResult,
    PredictionSet,
    ReportRow,
    eval_items,
    evaluate,
    human_estimate,
    load_predictions,
    majority_vote_baseline,
    read_report_csv,
    write_report,
)
from .features import (
    CONTENT_TAGS,
    FeatureMatrix,
    LexicalFeaturizer,
    Vocabulary,
    build_vocab,
    content_words,
    extract_keys,
    featurize,
    hashed_vocab,
    is_content_word,
)
from .labels import LABELS, Label
from .lms import (
    CsSubset,
    LmsRecord,
    LmsStats,
    compute_lms,
    filter_jsonl_by_ids,
    lms_from_probs,
    lms_histogram,
    read_lms_jsonl,
    read_subset_ids,
    subset_cs,
    write_lms_jsonl,
    write_subset_ids,
)
from .manifest import file_sha256, read_manifest, write_manifest
from .model import (
    BowSoftmaxRegression,
    batch_loss_and_grad,
    load_model,
    save_model,
    softmax,
)

__all__ = [
    "__version__",
    "AdversarialPair",
    "AmodMap",
    "BowSoftmaxRegression",
    "CONTENT_TAGS",
    "CompsenseError",
    "ConllToken",
    "ConlluStats",
    "CsSubset",
    "DataValidationError",
    "DepTree",
    "EvalResult",
    "FeatureMatrix",
    "FingerprintMismatchError",
    "GenReport",
    "IngestStats",
    "LABELS",
    "Label",
    "LexicalFeaturizer",
    "LmsRecord",
    "LmsStats",
    "NliExample",
    "PipelineConfig",
    "PredictionSet",
    "PtbParseError",
    "PtbTree",
    "Rejection",
    "ReportRow",
    "SvoFrame",
    "Vocabulary",
    "batch_loss_and_grad",
    "build_vocab",
    "compute_lms",
    "content_words",
    "eval_items",
    "evaluate",
    "example_to_obj",
    "extract_keys",
    "featurize",
    "file_sha256",
    "filter_jsonl_by_ids",
    "find_svo",
    "flat_parse",
    "gen_addamod",
    "gen_soswap",
    "generate_adversaries",
    "hashed_vocab",
    "human_estimate",
    "is_content_word",
    "leaves_with_pos",
    "lms_from_probs",
    "lms_histogram",
    "load_conllu",
    "load_model",
    "load_nli_jsonl",
    "load_predictions",
    "majority_vote_baseline",
    "mine_amod_map",
    "pair_to_obj",
    "parse_ptb",
    "read_lms_jsonl",
    "read_manifest",
    "read_report_csv",
    "read_subset_ids",
    "render_ptb",
    "save_model",
    "shuffle_words",
    "softmax",
    "subset_cs",
    "validate_config",
    "with_determined_gold",
    "write_jsonl",
    "write_lms_jsonl",
    "write_manifest",
    "write_report",
    "write_subset_ids",
]
