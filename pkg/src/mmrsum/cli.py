"""Command-line surface: querygen, preprocess, rank, fuse, run, eval.

Every run writes a manifest that records the effective config; feeding that
config back via ``--config`` on the same inputs reproduces the outputs byte
for byte. All output files are written to a temp file and atomically renamed,
so a failing run never leaves a partially-written report behind.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

from .corpus import (
    DatasetError,
    _iter_jsonl,
    _require_str,
    load_cluster_dataset,
    load_debate_dataset,
    tokenize_words,
)
from .pipeline import (
    PipelineConfig,
    PipelineError,
    check_candidate_coverage,
    group_candidates,
    load_candidates,
    pipeline_config_from_dict,
    pipeline_config_to_dict,
    prepare_cluster_unit,
    prepare_debate_unit,
    preprocess_cluster,
    run_cluster_unit,
    run_debate_unit,
)
from .rouge import average_reports, evaluate_corpus
from .topicmodel import LdaError, derive_seed, extract_query, fit_lda
from .vectorize import FileEmbedding, builtin_embedding

__all__ = ["main", "CONFIG_ENV_VAR", "FUSED_ROW_NAME", "RunConfig"]

#: Environment variable that supplies the default --config path.
CONFIG_ENV_VAR = "MMRSUM_CONFIG"

#: Name of the fused-summary row in the report tables.
FUSED_ROW_NAME = "MMR(Our)"


@dataclass(frozen=True)
class RunConfig:
    """Validated parameters for a fuse/run invocation."""

    kind: str
    input_path: Path
    candidates_path: Path
    out_dir: Path
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    report_format: str = "json"

    def __post_init__(self) -> None:
        if self.kind not in ("cluster", "debate"):
            raise ValueError(f"kind must be 'cluster' or 'debate', got {self.kind!r}")
        if self.report_format not in ("json", "markdown"):
            raise ValueError(f"report format must be 'json' or 'markdown', got {self.report_format!r}")
        if not self.input_path.is_file():
            raise ValueError(f"input file not found: {self.input_path}")
        if not self.candidates_path.is_file():
            raise ValueError(f"candidates file not found: {self.candidates_path}")
        self.out_dir.mkdir(parents=True, exist_ok=True)
        if not os.access(self.out_dir, os.W_OK):
            raise ValueError(f"output directory is not writable: {self.out_dir}")


def _json_document(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _jsonl_document(rows: Sequence[dict]) -> str:
    return "".join(json.dumps(row, sort_keys=True) + "\n" for row in rows)


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    try:
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise


def _resolve_config(args: argparse.Namespace) -> PipelineConfig:
    """Defaults, then config file (flag or $MMRSUM_CONFIG), then flag overrides."""
    path = getattr(args, "config", None)
    if path is None and os.environ.get(CONFIG_ENV_VAR):
        path = Path(os.environ[CONFIG_ENV_VAR])
    data = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid config JSON ({exc.msg})") from exc
        if not isinstance(data, dict):
            raise ValueError(f"{path}: config must be a JSON object")
    cfg = pipeline_config_from_dict(data)
    seed = getattr(args, "seed", None)
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    return cfg


def _make_embedding(cfg: PipelineConfig):
    """File-backed provider when configured, else None (per-cluster tf-idf)."""
    if cfg.embedding == "file":
        if not cfg.vectors_path:
            raise ValueError("embedding='file' requires vectors_path in the config")
        return FileEmbedding.from_file(cfg.vectors_path)
    return None


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _query_terms_payload(prepared) -> list[dict]:
    if prepared.query_weights is None:
        return [{"word": word} for word in prepared.query_tokens]
    return [
        {"word": word, "weight": weight}
        for word, weight in zip(prepared.query_tokens, prepared.query_weights)
    ]


def _unit_payload(result) -> dict:
    prepared = result.prepared
    payload = {
        "id": prepared.unit_id,
        "query_source": prepared.query_source,
        "query_terms": _query_terms_payload(prepared),
        "input_token_count": len(prepared.input_tokens),
        "rouge": {
            "fused": result.fused_report.as_dict(),
            "models": {
                name: report.as_dict()
                for name, report in sorted(result.model_reports.items())
            },
        },
    }
    if prepared.selected_doc_ids is not None:
        payload["selected_documents"] = list(prepared.selected_doc_ids)
    return payload


def _aggregate_rows(models: Sequence[str], results) -> list[dict]:
    rows = []
    for model in models:
        report = average_reports([r.model_reports[model] for r in results])
        rows.append({"model": model, **report.as_dict()})
    fused = average_reports([r.fused_report for r in results])
    rows.append({"model": FUSED_ROW_NAME, **fused.as_dict()})
    return rows


def _markdown_report(rows: Sequence[dict], n_units: int) -> str:
    # F1 is the headline number; precision/recall stay in the JSON report.
    lines = [
        f"Macro-averaged F1 over {n_units} units.",
        "",
        "| Model | R-1 | R-2 | R-L |",
        "| --- | --- | --- | --- |",
    ]
    for row in rows:
        lines.append(
            "| {model} | {r1:.4f} | {r2:.4f} | {rl:.4f} |".format(
                model=row["model"],
                r1=row["r1"]["f1"],
                r2=row["r2"]["f1"],
                rl=row["rl"]["f1"],
            )
        )
    return "\n".join(lines) + "\n"


def _load_units(kind: str, input_path: Path):
    """Returns (units, unit_ids) for either dataset shape."""
    if kind == "cluster":
        units = load_cluster_dataset(input_path)
        return units, [cluster.id for cluster in units]
    units = load_debate_dataset(input_path)
    return units, [record.document.id for record in units]


def _run_units(kind: str, units, candidates, cfg: PipelineConfig):
    grouped = group_candidates(candidates)
    emb = _make_embedding(cfg)
    results = []
    for unit in units:
        if kind == "cluster":
            results.append(run_cluster_unit(unit, grouped[unit.id], cfg, emb))
        else:
            results.append(run_debate_unit(unit, grouped[unit.document.id], cfg))
    return results


def _cmd_querygen(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    out = _out_dir(args)
    units, _ = _load_units(args.kind, args.input)
    emb = _make_embedding(cfg)

    rows: list[dict] = []
    errors: list[dict] = []
    for unit in units:
        unit_id = unit.id if args.kind == "cluster" else unit.document.id
        try:
            if args.kind == "cluster":
                prepared = prepare_cluster_unit(unit, cfg, emb)
                terms = _query_terms_payload(prepared)
            else:
                # querygen always reports the topic-model query, even when the
                # record carries its own query text.
                lda_cfg = replace(cfg.lda, seed=derive_seed(cfg.seed, unit_id))
                state = fit_lda(unit.document, lda_cfg)
                query = extract_query(state, lda_cfg)
                terms = [{"word": word, "weight": weight} for word, weight in query.terms]
            rows.append({"doc_id": unit_id, "terms": terms})
        except LdaError as exc:
            errors.append({"id": unit_id, "error": str(exc)})

    _write_atomic(out / "queries.jsonl", _jsonl_document(rows))
    manifest = {
        "command": "querygen",
        "dataset_kind": args.kind,
        "input": str(args.input),
        "config": pipeline_config_to_dict(cfg),
        "generated": len(rows),
        "errors": errors,
    }
    _write_atomic(out / "manifest.json", _json_document(manifest))
    return 0


def _cmd_preprocess(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    out = _out_dir(args)
    clusters = load_cluster_dataset(args.input)
    emb = _make_embedding(cfg)

    rows = []
    selections = []
    for cluster in clusters:
        provider = emb or builtin_embedding(
            [doc.raw_text for doc in cluster.documents]
            + [cluster.gold_summary.raw_text],
            stopwords=cfg.stopword_set(),
        )
        reduced = preprocess_cluster(cluster, cfg, provider)
        rows.append(
            {
                "id": reduced.id,
                "summary": reduced.gold_summary.raw_text,
                "articles": [
                    {"id": doc.id, "text": doc.raw_text} for doc in reduced.documents
                ],
            }
        )
        selections.append(
            {"id": reduced.id, "selected_documents": [d.id for d in reduced.documents]}
        )

    _write_atomic(out / "preprocessed.jsonl", _jsonl_document(rows))
    manifest = {
        "command": "preprocess",
        "dataset_kind": "cluster",
        "input": str(args.input),
        "config": pipeline_config_to_dict(cfg),
        "clusters": selections,
        "errors": [],
    }
    _write_atomic(out / "manifest.json", _json_document(manifest))
    return 0


def _cmd_rank(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    out = _out_dir(args)
    units, _ = _load_units(args.kind, args.input)
    emb = _make_embedding(cfg)

    rows = []
    unit_entries = []
    for unit in units:
        if args.kind == "cluster":
            prepared = prepare_cluster_unit(unit, cfg, emb)
        else:
            prepared = prepare_debate_unit(unit, cfg)
        rows.append(
            {
                "id": prepared.unit_id,
                "query": list(prepared.query_tokens),
                "input_text": " ".join(prepared.input_tokens),
                "token_count": len(prepared.input_tokens),
            }
        )
        entry = {
            "id": prepared.unit_id,
            "query_source": prepared.query_source,
            "input_token_count": len(prepared.input_tokens),
        }
        if prepared.selected_doc_ids is not None:
            entry["selected_documents"] = list(prepared.selected_doc_ids)
        unit_entries.append(entry)

    _write_atomic(out / "ranked.jsonl", _jsonl_document(rows))
    manifest = {
        "command": "rank",
        "dataset_kind": args.kind,
        "input": str(args.input),
        "config": pipeline_config_to_dict(cfg),
        "units": unit_entries,
        "errors": [],
    }
    _write_atomic(out / "manifest.json", _json_document(manifest))
    return 0


def _run_or_fuse(args: argparse.Namespace, with_report: bool) -> int:
    run_config = RunConfig(
        kind=args.kind,
        input_path=Path(args.input),
        candidates_path=Path(args.candidates),
        out_dir=Path(args.out),
        pipeline=_resolve_config(args),
        report_format=getattr(args, "report", "json"),
    )
    cfg = run_config.pipeline
    units, unit_ids = _load_units(run_config.kind, run_config.input_path)
    candidates = load_candidates(run_config.candidates_path)
    models = check_candidate_coverage(candidates, unit_ids)
    results = _run_units(run_config.kind, units, candidates, cfg)

    summaries = [{"id": r.unit_id, "text": r.fused.raw_text} for r in results]
    rows = _aggregate_rows(models, results)
    manifest = {
        "command": "run" if with_report else "fuse",
        "dataset_kind": run_config.kind,
        "input": str(run_config.input_path),
        "candidates": str(run_config.candidates_path),
        "config": pipeline_config_to_dict(cfg),
        "models": models,
        "report_format": run_config.report_format if with_report else None,
        "units": [_unit_payload(r) for r in results],
        "aggregate": {"n_units": len(results), "rows": rows},
        "errors": [],
    }

    out = run_config.out_dir
    _write_atomic(out / "summaries.jsonl", _jsonl_document(summaries))
    if with_report:
        if run_config.report_format == "markdown":
            _write_atomic(out / "report.md", _markdown_report(rows, len(results)))
        else:
            report = {"n_units": len(results), "rows": rows}
            _write_atomic(out / "report.json", _json_document(report))
    _write_atomic(out / "manifest.json", _json_document(manifest))
    return 0


def _cmd_fuse(args: argparse.Namespace) -> int:
    return _run_or_fuse(args, with_report=False)


def _cmd_run(args: argparse.Namespace) -> int:
    return _run_or_fuse(args, with_report=True)


def _load_text_file(path: Path) -> dict[str, str]:
    """JSONL of {"id", "text"} records, id-keyed; duplicate ids are errors."""
    texts: dict[str, str] = {}
    for lineno, obj in _iter_jsonl(path):
        record_id = _require_str(obj, "id", path, lineno)
        text = _require_str(obj, "text", path, lineno)
        if record_id in texts:
            raise DatasetError(f"{path}: line {lineno}: duplicate id {record_id!r}")
        texts[record_id] = text
    return texts


def _cmd_eval(args: argparse.Namespace) -> int:
    system = _load_text_file(Path(args.system))
    reference = _load_text_file(Path(args.reference))
    if set(system) != set(reference):
        missing = sorted(set(reference) - set(system))
        extra = sorted(set(system) - set(reference))
        raise DatasetError(
            f"id mismatch between system and reference files; "
            f"missing from system: {missing}; not in reference: {extra}"
        )
    pairs = [
        (tokenize_words(system[record_id]), tokenize_words(reference[record_id]))
        for record_id in reference
    ]
    report = evaluate_corpus(pairs)
    payload = {**report.as_dict(), "n_pairs": len(pairs)}
    text = _json_document(payload)
    if args.out is not None:
        _write_atomic(Path(args.out), text)
    print(text, end="")
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config",
        type=Path,
        default=None,
        help=f"JSON config file (default: ${CONFIG_ENV_VAR} when set)",
    )
    parser.add_argument("--seed", type=int, default=None, help="override the base seed")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmrsum",
        description="Query-focused summarization: topic-word queries, "
        "relevance/diversity ranking, ensemble fusion, ROUGE evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    querygen = sub.add_parser("querygen", help="extract topic-word queries per unit")
    querygen.add_argument("--kind", choices=("cluster", "debate"), required=True)
    querygen.add_argument("--input", type=Path, required=True)
    querygen.add_argument("--out", type=Path, required=True)
    _add_common(querygen)
    querygen.set_defaults(handler=_cmd_querygen)

    preprocess = sub.add_parser(
        "preprocess", help="reduce clusters to their top documents"
    )
    preprocess.add_argument("--input", type=Path, required=True)
    preprocess.add_argument("--out", type=Path, required=True)
    _add_common(preprocess)
    preprocess.set_defaults(handler=_cmd_preprocess)

    rank = sub.add_parser(
        "rank", help="rank sentences and export truncated model inputs"
    )
    rank.add_argument("--kind", choices=("cluster", "debate"), required=True)
    rank.add_argument("--input", type=Path, required=True)
    rank.add_argument("--out", type=Path, required=True)
    _add_common(rank)
    rank.set_defaults(handler=_cmd_rank)

    fuse = sub.add_parser(
        "fuse", help="fuse candidate summaries into final summaries"
    )
    fuse.add_argument("--kind", choices=("cluster", "debate"), required=True)
    fuse.add_argument("--input", type=Path, required=True)
    fuse.add_argument("--candidates", type=Path, required=True)
    fuse.add_argument("--out", type=Path, required=True)
    _add_common(fuse)
    fuse.set_defaults(handler=_cmd_fuse)

    run = sub.add_parser(
        "run", help="end to end: fuse, evaluate, and emit report tables"
    )
    run.add_argument("--kind", choices=("cluster", "debate"), required=True)
    run.add_argument("--input", type=Path, required=True)
    run.add_argument("--candidates", type=Path, required=True)
    run.add_argument("--out", type=Path, required=True)
    run.add_argument("--report", choices=("json", "markdown"), default="json")
    _add_common(run)
    run.set_defaults(handler=_cmd_run)

    evaluate = sub.add_parser(
        "eval", help="ROUGE between a system file and a reference file"
    )
    evaluate.add_argument("--system", type=Path, required=True)
    evaluate.add_argument("--reference", type=Path, required=True)
    evaluate.add_argument("--out", type=Path, default=None)
    _add_common(evaluate)
    evaluate.set_defaults(handler=_cmd_eval)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (DatasetError, PipelineError, LdaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
