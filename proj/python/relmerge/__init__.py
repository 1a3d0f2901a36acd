"""Corpus harmonization toolkit for biomedical relation extraction."""

from ._relmerge import (
    ConfigError,
    ConflictError,
    Document,
    EntityMention,
    IoError,
    ParseError,
    SourceRelation,
    ValidationError,
    baseline_predict,
    build_prompt,
    canonicalize_pair,
    generate_instances,
    harmonize,
    instances_jsonl,
    kfold_split,
    merge,
    paired_t_test,
    parse_pubtator,
    regularized_incomplete_beta,
    run_cli,
    score,
    segment_sentences,
    subsample,
    validate_profile,
    write_pubtator,
)

__all__ = [
    "ConfigError",
    "ConflictError",
    "Document",
    "EntityMention",
    "IoError",
    "ParseError",
    "SourceRelation",
    "ValidationError",
    "baseline_predict",
    "build_prompt",
    "canonicalize_pair",
    "generate_instances",
    "harmonize",
    "instances_jsonl",
    "kfold_split",
    "merge",
    "paired_t_test",
    "parse_pubtator",
    "regularized_incomplete_beta",
    "run_cli",
    "score",
    "segment_sentences",
    "subsample",
    "validate_profile",
    "write_pubtator",
]
