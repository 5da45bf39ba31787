"""Command line: ingest, run, report, record-fixtures, dump-graph."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields
from importlib import resources
from pathlib import Path

from .corpus import CorpusError, dump_corpus, load_corpus, sample_instances
from .llm import LlmGateway, ReplayMiss, TransportError
from .metrics import comparison_table
from .pipeline import MODES, Pipeline, RunConfig, write_results

log = logging.getLogger("hygraph")

EXIT_VALIDATION = 2
EXIT_REPLAY_MISS = 3
EXIT_TRANSPORT = 4


def bundled(name: str) -> str:
    """Path of a file shipped under ``hygraph/data``."""
    return str(resources.files("hygraph").joinpath("data", name))


BUNDLED_SAMPLE = "sample25.jsonl"
BUNDLED_CACHE = "cache"


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML or JSON file with RunConfig fields")
    p.add_argument("--bundled", action="store_true", help="use the shipped 25-instance sample and its replay cache")
    for f in fields(RunConfig):
        flag = "--" + f.name.replace("_", "-")
        ann = str(f.type)
        kind = int if "int" in ann else float if "float" in ann else str
        if f.name == "mode":
            p.add_argument(flag, choices=MODES, default=None)
        else:
            p.add_argument(flag, type=kind, default=None)


def config_from_args(args) -> RunConfig:
    overrides = {f.name: getattr(args, f.name) for f in fields(RunConfig)}
    if args.bundled:
        overrides["corpus"] = overrides["corpus"] or bundled(BUNDLED_SAMPLE)
        overrides["cache_dir"] = overrides["cache_dir"] or bundled(BUNDLED_CACHE)
    if args.config:
        return RunConfig.from_file(args.config, **overrides)
    return RunConfig(**{k: v for k, v in overrides.items() if v is not None})


def _load(cfg: RunConfig):
    if not cfg.corpus:
        raise CorpusError("no corpus given (use --corpus or --bundled)")
    return sample_instances(load_corpus(cfg.corpus, cfg.format, cfg.split), cfg.sample_size, cfg.seed)


def cmd_ingest(args) -> int:
    try:
        instances = load_corpus(args.input, args.format, args.split)
    except (CorpusError, FileNotFoundError, NotADirectoryError, json.JSONDecodeError, KeyError) as e:
        print(f"ingest failed: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    instances = sample_instances(instances, args.sample_size, args.seed)
    dump_corpus(instances, args.output)
    print(f"wrote {len(instances)} instances to {args.output}")
    return 0


def _check_replay(cfg: RunConfig) -> None:
    if cfg.gateway_mode == "replay" and not (cfg.cache_dir and Path(cfg.cache_dir).is_dir()):
        raise CorpusError(f"replay mode needs an existing cache directory, got {cfg.cache_dir!r}")


def cmd_run(args) -> int:
    try:
        cfg = config_from_args(args)
        _check_replay(cfg)
        instances = _load(cfg)
    except (CorpusError, ValueError, FileNotFoundError) as e:
        print(f"run failed: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    pipe = Pipeline(cfg)
    results, missing = [], []
    for inst in instances:
        try:
            results.append(pipe.run_instance(inst))
        except ReplayMiss as e:
            missing.append((inst.question_id, e.purpose_tag, e.cache_key))
        except TransportError as e:
            print(f"{inst.question_id}: {e}", file=sys.stderr)
            return EXIT_TRANSPORT
    if missing:
        print(f"replay cache is missing {len(missing)} exchange(s):", file=sys.stderr)
        for qid, purpose, key in missing:
            print(f"  {qid}\t{purpose}\t{key}", file=sys.stderr)
        return EXIT_REPLAY_MISS
    rep = write_results(results, cfg.mode, args.out, cfg.input_rate)
    print(rep.markdown(), end="")
    return 0


def cmd_report(args) -> int:
    reports = {}
    for d in args.dirs:
        p = Path(d) / "report.json"
        if not p.is_file():
            print(f"no report.json in {d}", file=sys.stderr)
            return EXIT_VALIDATION
        rep = json.loads(p.read_text(encoding="utf-8"))
        name = rep["mode"]
        if name in reports:
            name = f"{name} ({Path(d).name})"
        reports[name] = rep
    table = comparison_table(reports)
    if args.output:
        Path(args.output).write_text(table, encoding="utf-8")
    print(table, end="")
    return 0


def cmd_record_fixtures(args) -> int:
    """Run every requested mode in record mode so later runs replay offline."""
    try:
        cfg = config_from_args(args)
        instances = _load(cfg)
    except (CorpusError, ValueError, FileNotFoundError) as e:
        print(f"record-fixtures failed: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    if not cfg.cache_dir:
        print("record-fixtures needs --cache-dir", file=sys.stderr)
        return EXIT_VALIDATION
    transport = None
    if args.scripted:
        from .scripted import ScriptedTransport

        transport = ScriptedTransport()
    gw = LlmGateway(mode="record", cache_dir=cfg.cache_dir, transport=transport, tokenizer_id=cfg.tokenizer,
                    temperature=cfg.temperature)
    modes = args.modes or list(MODES)
    for mode in modes:
        run_cfg = RunConfig(**{**cfg.__dict__, "mode": mode, "gateway_mode": "record"})
        try:
            Pipeline(run_cfg, gw).run(instances)
        except TransportError as e:
            print(f"{mode}: {e}", file=sys.stderr)
            return EXIT_TRANSPORT
        print(f"recorded {mode} for {len(instances)} instances")
    return 0


def cmd_dump_graph(args) -> int:
    try:
        cfg = config_from_args(args)
        _check_replay(cfg)
        instances = _load(cfg)
    except (CorpusError, ValueError, FileNotFoundError) as e:
        print(f"dump-graph failed: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    chosen = [i for i in instances if args.question_id in (None, i.question_id)]
    if not chosen:
        print(f"no instance with question_id {args.question_id!r}", file=sys.stderr)
        return EXIT_VALIDATION
    inst = chosen[0]
    pipe = Pipeline(cfg)
    from .analysis import analyze

    try:
        analysis = analyze(inst, pipe.gw, cfg.analysis_model)
    except ReplayMiss as e:
        print(f"replay cache is missing {e.purpose_tag} exchange {e.cache_key}", file=sys.stderr)
        return EXIT_REPLAY_MISS
    g, matches, hopdict = pipe.traverse(inst, analysis)
    out = {
        "question_id": inst.question_id,
        "analysis": {
            "entities": analysis.entities,
            "relevant_headers": analysis.relevant_headers,
            "entity_header_map": analysis.entity_header_map,
        },
        "matches": [
            {"entity": m.question_entity, "node": list(m.matched_node) if m.matched_node else None,
             "score": round(m.score, 6), "search_space": m.search_space}
            for m in matches
        ],
        "hops": hopdict.to_json() if hopdict else None,
        "graph": g.to_json(),
    }
    text = json.dumps(out, ensure_ascii=False, indent=1, sort_keys=True) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hygraph", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    ing = sub.add_parser("ingest", help="convert a dataset to native JSONL")
    ing.add_argument("input")
    ing.add_argument("output")
    ing.add_argument("--format", choices=("native", "hybridqa", "ottqa"), default="native")
    ing.add_argument("--split", default="dev")
    ing.add_argument("--sample-size", type=int)
    ing.add_argument("--seed", type=int, default=0)
    ing.set_defaults(func=cmd_ingest)

    run = sub.add_parser("run", help="run one mode and write records plus a report")
    _add_config_flags(run)
    run.add_argument("--out", required=True, help="results directory")
    run.set_defaults(func=cmd_run)

    rep = sub.add_parser("report", help="compare result directories")
    rep.add_argument("dirs", nargs="+")
    rep.add_argument("--output")
    rep.set_defaults(func=cmd_report)

    rec = sub.add_parser("record-fixtures", help="record exchanges for later replay")
    _add_config_flags(rec)
    rec.add_argument("--modes", nargs="*", choices=MODES)
    rec.add_argument("--scripted", action="store_true", help="use the deterministic stand-in model")
    rec.set_defaults(func=cmd_record_fixtures)

    dg = sub.add_parser("dump-graph", help="print analysis, seeds, hop dictionary and graph as JSON")
    _add_config_flags(dg)
    dg.add_argument("--question-id")
    dg.add_argument("--output")
    dg.set_defaults(func=cmd_dump_graph)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
