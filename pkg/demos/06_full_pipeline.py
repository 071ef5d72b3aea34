"""The full pipeline on one in-memory cluster.

Stage 1 keeps the documents closest to the gold summary (dropping a
byte-identical duplicate's redundancy), stage 2 derives a topic-word query
and reorders sentences by marginal relevance, and stage 3 fuses candidate
summaries from several "models" into one final summary that scores better
than any of them.
"""

from mmrsum import (
    CandidateSummary,
    Cluster,
    Document,
    PipelineConfig,
    run_cluster_unit,
)

articles = [
    ("a1", "The council approved the valley solar farm on Tuesday. The project delivers ninety megawatts of capacity. Supporters cheered outside the chamber."),
    ("a2", "Construction on the solar farm begins next spring. Contractors expect the panels to power forty thousand homes. Local hiring rules were added."),
    ("a3", "The council approved the valley solar farm on Tuesday. The project delivers ninety megawatts of capacity. Supporters cheered outside the chamber."),
    ("a4", "Opponents raised concerns about farmland loss. The council said the site sits on degraded pasture. A drainage review is still pending."),
]
gold = (
    "The council approved the ninety megawatt valley solar farm. "
    "Construction begins next spring and the panels should power forty thousand homes."
)
cluster = Cluster(
    "solar",
    tuple(Document.from_text(doc_id, text) for doc_id, text in articles),
    Document.from_text("solar/summary", gold),
)

# Candidate summaries normally come from external pre-trained models via the
# candidates JSONL file; here three are inlined. Each model caught a
# different part of the story, which is exactly the situation fusion exists
# for: no single candidate covers the gold summary alone.
candidates = [
    CandidateSummary.from_text("alpha", "solar", "The council approved the ninety megawatt valley solar farm. Commentators praised the process."),
    CandidateSummary.from_text("bravo", "solar", "Construction begins next spring and the panels should power forty thousand homes. Analysts stayed cautious."),
    CandidateSummary.from_text("charlie", "solar", "Opponents worried about farmland loss near the site."),
]

cfg = PipelineConfig(preprocess_top_k=3, seed=7)
result = run_cluster_unit(cluster, candidates, cfg)

print("stage 1 - documents kept (selection order):", list(result.prepared.selected_doc_ids))
print("stage 2 - topic query:", list(result.prepared.query_tokens))
print(f"stage 2 - model input: {len(result.prepared.input_tokens)} tokens")
print()
print("stage 3 - fused summary:")
for sentence in result.fused.sentences:
    print("   ", sentence.text)
print()
print(f"{'system':>8}  R-1 F1   R-2 F1   R-L F1")
for name, report in sorted(result.model_reports.items()):
    print(f"{name:>8}  {report.r1.f1:.4f}   {report.r2.f1:.4f}   {report.rl.f1:.4f}")
fused = result.fused_report
print(f"{'fused':>8}  {fused.r1.f1:.4f}   {fused.r2.f1:.4f}   {fused.rl.f1:.4f}")
