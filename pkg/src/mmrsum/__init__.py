"""mmrsum: query-focused summarization without fine-tuning.

Topic-word queries from a per-document topic model, marginal-relevance
sentence ranking, fusion of external candidate summaries, and ROUGE-1/2/L
evaluation. See the demos/ directory for narrative walkthroughs of each
capability.
"""

from .corpus import (
    Cluster,
    DatasetError,
    DebateRecord,
    Document,
    Sentence,
    TokenizerConfig,
    load_cluster_dataset,
    load_debate_dataset,
    normalize_text,
    split_sentences,
    tokenize_words,
)
from .mmr import MmrProblem, MmrSelection, mmr_score, mmr_select
from .pipeline import (
    CandidateSummary,
    PipelineConfig,
    PipelineError,
    PreparedUnit,
    RankedDocument,
    UnitResult,
    check_candidate_coverage,
    fuse_summaries,
    group_candidates,
    load_candidates,
    pipeline_config_from_dict,
    pipeline_config_to_dict,
    prepare_cluster_unit,
    prepare_debate_unit,
    preprocess_cluster,
    rank_document,
    run_cluster,
    run_cluster_unit,
    run_debate,
    run_debate_unit,
)
from .rouge import (
    RougeReport,
    RougeScore,
    average_reports,
    evaluate_corpus,
    rouge_l,
    rouge_n,
    score_pair,
)
from .stopwords import DEFAULT_STOPWORDS
from .topicmodel import (
    LdaConfig,
    LdaError,
    LdaState,
    Query,
    derive_seed,
    extract_query,
    fit_lda,
    query_to_tokens,
)
from .vectorize import (
    EmbeddingProvider,
    FileEmbedding,
    SparseVector,
    TfIdfModel,
    TfidfEmbedding,
    builtin_embedding,
    cosine,
    fit_tfidf,
    transform,
)

__version__ = "0.1.0"
