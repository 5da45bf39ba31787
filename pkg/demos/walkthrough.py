# Step through one question end to end on the shipped replay cache:
# question analysis, graph, seed matching, hop dictionary, reader.
from hygraph.analysis import analyze
from hygraph.cli import BUNDLED_CACHE, bundled
from hygraph.corpus import load_corpus
from hygraph.pipeline import Pipeline, RunConfig

cfg = RunConfig(corpus=bundled("gp2004.jsonl"), cache_dir=bundled(BUNDLED_CACHE))
pipe = Pipeline(cfg)
inst = load_corpus(cfg.corpus)[0]
print(inst.question)
print(f"table: {inst.table.name}, {len(inst.table.rows)} rows, headers {list(inst.table.headers)}")

# three analysis calls, all served from the cache
a = analyze(inst, pipe.gw, cfg.analysis_model)
print("entities:", a.entities)
print("headers: ", a.relevant_headers)
print("mapping: ", a.entity_header_map)

g, matches, hops = pipe.traverse(inst, a)
print(f"\ngraph: {len(g.nodes)} nodes, {len(g.edges())} edges")
for m in matches:
    print(f"  {m.question_entity!r:36} -> {m.matched_node} ({m.score:.2f}, {m.search_space})")

# each hop only holds the triples that first reach a node at that distance
for k, triples in hops.to_json().items():
    print(f"\n{k}: {len(triples)} triples")
    for t in triples[:4]:
        print("  ", t)

r = pipe.run_instance(inst)
print(f"\nanswer {r.outcome.answer!r} at hop {r.outcome.hop_answered}, gold {list(inst.gold_answers)}")
print("reader input tokens:", [e.input_tokens for e in r.outcome.exchanges])
