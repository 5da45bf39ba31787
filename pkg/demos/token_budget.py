# Compare reader token spend across all modes on the 25-instance sample.
import numpy as np

from hygraph.cli import BUNDLED_CACHE, BUNDLED_SAMPLE, bundled
from hygraph.corpus import load_corpus
from hygraph.metrics import token_reduction
from hygraph.pipeline import MODES, Pipeline, RunConfig

sample = load_corpus(bundled(BUNDLED_SAMPLE))
tokens, em = {}, {}
for mode in MODES:
    cfg = RunConfig(cache_dir=bundled(BUNDLED_CACHE), mode=mode)
    results = Pipeline(cfg).run(sample)
    tokens[mode] = np.array([r.token_totals()["reader_input"] for r in results])
    em[mode] = np.mean([r.score_row(mode).em for r in results]) * 100

print(f"{'mode':18} {'EM':>6} {'mean':>8} {'median':>8} {'max':>6}")
for mode in MODES:
    t = tokens[mode]
    print(f"{mode:18} {em[mode]:6.1f} {t.mean():8.1f} {np.median(t):8.0f} {t.max():6d}")

red = token_reduction(tokens["full_context"].mean(), tokens["odyssey_hopwise"].mean())
print(f"\nhopwise vs full context: {100 * red:.1f}% fewer reader tokens")

# flat mode sends every hop at once; per instance it costs this much more
hop, flat = tokens["odyssey_hopwise"], tokens["odyssey_flat"]
ratio = flat / hop
print(f"flat / hopwise per instance: min {ratio.min():.2f}, median {np.median(ratio):.2f}, max {ratio.max():.2f}")
print(f"flat / hopwise in total: {flat.sum() / hop.sum():.2f}")
