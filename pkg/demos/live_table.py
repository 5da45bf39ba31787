# Recompute the headline EM/F1 rows against a live chat endpoint.
#
#   HYGRAPH_LLM_ENDPOINT=https://.../v1/chat/completions HYGRAPH_LLM_API_KEY=... \
#       python demos/live_table.py data.jsonl --sample-size 100
#
# Every exchange is recorded into --cache-dir, so a second run replays offline.
import argparse

from hygraph.metrics import comparison_table
from hygraph.pipeline import RunConfig, run

ap = argparse.ArgumentParser()
ap.add_argument("corpus")
ap.add_argument("--format", default="native")
ap.add_argument("--sample-size", type=int)
ap.add_argument("--cache-dir", default="live-cache")
ap.add_argument("--reader-model", default="gpt-4-1106-preview")
ap.add_argument("--modes", nargs="*", default=["base", "odyssey_hopwise"])
ap.add_argument("--out", default="live-results")
args = ap.parse_args()

reports = {}
for mode in args.modes:
    cfg = RunConfig(corpus=args.corpus, format=args.format, sample_size=args.sample_size, mode=mode,
                    gateway_mode="record", cache_dir=args.cache_dir, reader_model=args.reader_model)
    _, rep = run(cfg, f"{args.out}/{mode}")
    reports[mode] = rep.to_dict()

print(comparison_table(reports), end="")
