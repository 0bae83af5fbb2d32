"""Command-line entry point: ``astroturf <command> ...``.

Exit status is 0 on success, 1 on a usage error and 2 when the input data
or configuration cannot be processed.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import re
import sys
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import tomli

from . import __version__, svg
from .analytics import (
    DAY,
    top_hashtag_pairs,
    top_hashtags,
    top_media,
    top_referenced_users,
    tweet_type_timeseries,
)
from .evaluation import (
    EvalReport,
    cross_validate,
    evaluate_external,
    evaluate_specs,
    expand_grid,
    extrapolate_table,
    predict_labels,
    read_labels,
    read_scores,
    select_best,
)
from .features import (
    CorpusStats,
    FeatureTable,
    extract_store,
    suggest_labels,
    write_suggestions,
)
from .features.extract import COLUMN_NAMES
from .ingest import (
    CorpusConfig,
    Store,
    UserProfile,
    UserTimeline,
    apply_exclusion,
    expand_inputs,
    filter_terms,
    iter_records,
    load_store,
    write_store,
)
from .models import DEFAULT_GRIDS, Family, ModelSpec, load_model, save_model, train
from .synth import SynthConfig, generate
from .trolls import load_troll_list, match_trolls

MANIFEST = "manifest.json"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


# -- manifest -----------------------------------------------------------------

def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    command: str
    config_digest: str
    input_digests: dict[str, str] = field(default_factory=dict)
    seed: int | None = None
    version: str = __version__
    wall_time: float = 0.0

    def write(self, directory: str | Path) -> Path:
        path = Path(directory) / MANIFEST
        path.write_text(json.dumps(asdict(self), indent=1, sort_keys=True) + "\n",
                        encoding="utf-8")
        return path


def _config_digest(args: argparse.Namespace, config_files: list[str]) -> str:
    """Digest of every setting that can change the outputs.

    Paths are left out: inputs are identified by content in the manifest's
    input digests and config files are hashed here by content.
    """
    skip = {"out", "threads", "func", "started", "config", "grid", "inputs", "store",
            "features", "labels", "model", "scores", "list"}
    settings = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    payload = {"settings": settings,
               "config_files": [sha256_file(p) for p in config_files]}
    blob = json.dumps(payload, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()


def _finish(args, out_dir: Path, inputs: list[str], config_files=(), seed=None) -> None:
    digests = {}
    for p in inputs:
        p = Path(p)
        if p.is_dir():
            p = p / "timelines.jsonl"
        digests[str(p)] = sha256_file(p)
    RunManifest(
        command=args.command if not getattr(args, "action", None)
        else f"{args.command} {args.action}",
        config_digest=_config_digest(args, list(config_files)),
        input_digests=digests,
        seed=seed,
        wall_time=round(time.monotonic() - args.started, 3),
    ).write(out_dir)


def _file_out(path: str) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _dir_out(path: str) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


# -- config -------------------------------------------------------------------

def read_toml(path: str | Path) -> dict:
    with open(path, "rb") as fh:
        return tomli.load(fh)


def _grid_value(v):
    if isinstance(v, str) and v.strip().lower() in ("none", "inf", "infinity"):
        return None
    return v


def read_grid(path: str | Path, family: Family) -> dict[str, list]:
    """Grid from a TOML file.

    Either a flat ``[grid]`` table or one sub-table per family, keyed by the
    family name or a short alias (``[grid.gb]``). The string ``"none"`` means
    no limit, e.g. unbounded tree depth.
    """
    doc = read_toml(path)
    grid = doc.get("grid", doc)
    if not isinstance(grid, dict):
        raise ValueError(f"{path}: [grid] must be a table")
    for key, value in grid.items():
        if isinstance(value, dict):
            try:
                if Family.parse(key) is family:
                    grid = value
                    break
            except ValueError:
                pass
    else:
        if any(isinstance(v, dict) for v in grid.values()):
            raise ValueError(f"{path}: no grid for {family.value}")
    out = {}
    for key, value in grid.items():
        values = value if isinstance(value, list) else [value]
        if not values:
            raise ValueError(f"{path}: grid entry {key!r} is empty")
        out[key] = [_grid_value(v) for v in values]
    return out


def _corpus_config(path: str) -> CorpusConfig:
    doc = read_toml(path)
    section = doc.get("corpus", doc)
    known = {"search_terms", "exclusion_terms", "match_mode"}
    unknown = set(section) - known
    if unknown:
        raise ValueError(f"{path}: unknown corpus settings {sorted(unknown)}")
    return CorpusConfig(**section)


def _parse_param(text: str) -> tuple[str, object]:
    if "=" not in text:
        raise UsageError(f"--param expects name=value, got {text!r}")
    key, raw = text.split("=", 1)
    raw = raw.strip()
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = _grid_value(raw)
    return key.strip(), _grid_value(value)


_UNITS = {"s": 1, "m": 60, "h": 3600, "d": DAY}


def parse_duration(text: str) -> int:
    m = re.fullmatch(r"\s*(\d+)\s*([smhd]?)\s*", text)
    if not m or int(m.group(1)) <= 0:
        raise UsageError(f"bad bin width {text!r}; use e.g. 1d, 6h, 30m")
    return int(m.group(1)) * _UNITS[m.group(2) or "s"]


def threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("ASTROTURF_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"ASTROTURF_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


# -- shared io ------------------------------------------------------------------

def _write_rows(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _iso(ts: int) -> str:
    return datetime.fromtimestamp(ts, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _labeled_matrix(table: FeatureTable, labels: dict[int, str]):
    rows = [i for i, uid in enumerate(table.user_ids) if uid in labels]
    if not rows:
        raise ValueError("no feature row has a label")
    y = np.array([labels[table.user_ids[i]] for i in rows])
    return table.X[rows], y


def _family_grid(args, family: Family) -> tuple[dict, list[str]]:
    if args.grid:
        return read_grid(args.grid, family), [args.grid]
    return DEFAULT_GRIDS[family], []


# -- commands -------------------------------------------------------------------

def cmd_synth(args) -> None:
    config_files = []
    settings = {}
    if args.config:
        doc = read_toml(args.config)
        settings = doc.get("synth", doc)
        config_files.append(args.config)
    if args.seed is not None:
        settings = {**settings, "seed": args.seed}
    config = SynthConfig.from_dict(settings)
    out = _dir_out(args.out)
    generate(config).write(out)
    _finish(args, out, [], config_files, config.seed)


def cmd_ingest(args) -> None:
    config = _corpus_config(args.config)
    paths = expand_inputs(args.inputs)
    errors: list = []
    records = 0

    def counted():
        nonlocal records
        for t in iter_records(paths, errors):
            records += 1
            yield t

    kept, stats = apply_exclusion(filter_terms(counted(), config), config)
    store = Store.from_tweets(kept)
    out = _dir_out(args.store)
    write_store(store, out)
    _write_rows(out / "ingest_stats.csv", ["metric", "value"], [
        ["records", records],
        ["parse_errors", len(errors)],
        ["matched", stats.parsed],
        ["excluded", stats.excluded],
        ["excluded_fraction", repr(stats.excluded_fraction)],
        ["kept", stats.kept],
        ["stored", store.n_tweets],
        ["users", len(store)],
    ])
    _write_rows(out / "parse_errors.csv", ["path", "offset", "message"],
                [[p, e.offset, e.args[0]] for p, e in errors])
    _finish(args, out, paths, [args.config])


def _ranked(out: Path, name: str, ranked, title: str) -> None:
    _write_rows(out / f"{name}.csv", ["rank", "key", "count"],
                [[i + 1, k, c] for i, (k, c) in enumerate(ranked.entries)])
    svg.write(out / f"{name}.svg",
              svg.bar_chart([k for k, _ in ranked.entries], [c for _, c in ranked.entries],
                            title))


def cmd_stats(args) -> None:
    width = parse_duration(args.bin)
    store = load_store(args.store)
    out = _dir_out(args.out)
    ts = tweet_type_timeseries(store, width)
    kinds = list(ts.series)
    bins = [b for b, _ in next(iter(ts.series.values()))] if kinds else []
    counts = {k: [c for _, c in pts] for k, pts in ts.series.items()}
    rows = []
    for i, b in enumerate(bins):
        row = [counts[k][i] for k in kinds]
        rows.append([_iso(b), *row, sum(row)])
    _write_rows(out / "tweet_types.csv", ["bin_start", *(k.value for k in kinds), "total"],
                rows)
    series = {k.value: ([(b - bins[0]) / DAY for b in bins], counts[k]) for k in kinds}
    svg.write(out / "tweet_types.svg",
              svg.line_chart(series, "Tweets per type", x_label="days since first bin",
                             y_label="tweets"))
    _ranked(out, "hashtags", top_hashtags(store, args.top), "Top hashtags")
    _ranked(out, "hashtag_pairs", top_hashtag_pairs(store, args.top), "Top hashtag pairs")
    _ranked(out, "media", top_media(store, args.top), "Top media")
    _ranked(out, "retweeted_users", top_referenced_users(store, args.top, "retweeted"),
            "Most retweeted users")
    _ranked(out, "quoted_users", top_referenced_users(store, args.top, "quoted"),
            "Most quoted users")
    _finish(args, out, [args.store])


def cmd_trolls(args) -> None:
    store = load_store(args.store)
    roster = load_troll_list(args.list)
    report = match_trolls(store, roster)
    out = _dir_out(args.out)
    _write_rows(out / "trolls_matched.csv",
                ["user_id", "screen_name", "tweets_total", "originals", "retweets", "quotes",
                 "replies", "renamed"],
                [[a.user_id, a.screen_name, a.tweets_total, a.originals, a.retweets, a.quotes,
                  a.replies, int(a.renamed)] for a in report.matched_accounts])
    inter = report.interaction
    _write_rows(out / "trolls_summary.csv", ["metric", "value"], [
        ["list_size", report.list_size],
        ["matched", len(report.matched_accounts)],
        ["unmatched", report.unmatched],
        ["renamed", sum(a.renamed for a in report.matched_accounts)],
        ["tweets_total", report.tweets_total],
        ["retweets_by_trolls", inter.retweets_by_trolls],
        ["retweets_by_others", inter.retweets_by_others],
        ["quotes_by_trolls", inter.quotes_by_trolls],
        ["quotes_by_others", inter.quotes_by_others],
    ])
    created = report.creation_histogram
    _write_rows(out / "creation_months.csv", ["month", "accounts"], created.items())
    svg.write(out / "creation_months.svg",
              svg.column_chart(list(created), list(created.values()),
                               "Matched accounts by creation month"))
    activity = report.activity_series
    _write_rows(out / "activity.csv", ["day", "tweets"], activity.items())
    svg.write(out / "activity.svg",
              svg.column_chart(list(activity), list(activity.values()),
                               "Tweets by matched accounts per day"))
    _finish(args, out, [args.store, args.list])


def cmd_features(args) -> None:
    store = load_store(args.store)
    table = extract_store(store, args.min_tweets)
    path = _file_out(args.out)
    table.write_csv(path)
    _finish(args, path.parent, [args.store])


def cmd_labels(args) -> None:
    table = FeatureTable.read_csv(args.features)
    inputs = [args.features]
    if args.store:
        store = load_store(args.store)
        stats = CorpusStats.from_store(store)
        inputs.append(args.store)
    else:
        store, stats = Store({}), CorpusStats.from_store({})
    suggestions = []
    for uid, name, row in zip(table.user_ids, table.screen_names, table.X):
        # without a store there are no tweets, so R3 cannot fire
        tl = store.timelines.get(uid) or UserTimeline(UserProfile(uid, name), [])
        suggestions.append(suggest_labels(row, tl, stats))
    path = _file_out(args.out)
    write_suggestions(suggestions, path)
    _finish(args, path.parent, inputs)


def _select_spec(args, family, X, y, n_jobs) -> tuple[ModelSpec, list[str]]:
    params = dict(_parse_param(p) for p in args.param or [])
    if args.grid:
        grid, files = _family_grid(args, family)
        specs = expand_grid(family, grid, params, args.seed)
        results = evaluate_specs(specs, X, y, args.k, args.grid_repeats, args.seed, n_jobs)
        return select_best(results).spec, files
    return ModelSpec(family, params, args.seed), []


def cmd_train(args) -> None:
    family = Family.parse(args.family)
    table = FeatureTable.read_csv(args.features)
    X, y = _labeled_matrix(table, read_labels(args.labels))
    spec, files = _select_spec(args, family, X, y, threads(args))
    model = train(spec, X, y)
    path = _file_out(args.out)
    save_model(model, path)
    _finish(args, path.parent, [args.features, args.labels], files, args.seed)


def cmd_eval_cv(args) -> None:
    family = Family.parse(args.family)
    n_jobs = threads(args)
    table = FeatureTable.read_csv(args.features)
    X, y = _labeled_matrix(table, read_labels(args.labels))
    grid, files = _family_grid(args, family)
    specs = expand_grid(family, grid, seed=args.seed)
    grid_repeats = args.repeats if args.full else args.grid_repeats
    results = evaluate_specs(specs, X, y, args.k, grid_repeats, args.seed, n_jobs)
    best = select_best(results)
    if grid_repeats != args.repeats:
        final = cross_validate(best.spec, X, y, args.k, args.repeats, args.seed, n_jobs)
        results = [final if r is best else r for r in results]
        best = final
    out = _dir_out(args.out)
    EvalReport(results, best).write(out)
    _finish(args, out, [args.features, args.labels], files, args.seed)


def cmd_eval_external(args) -> None:
    report = evaluate_external(read_scores(args.scores), read_labels(args.labels))
    out = _dir_out(args.out)
    report.write(out)
    _finish(args, out, [args.scores, args.labels])


def cmd_predict(args) -> None:
    model = load_model(args.model)
    inputs = [args.model]
    if args.features:
        table = FeatureTable.read_csv(args.features)
        active = table.X[:, COLUMN_NAMES.index("total_tweets")] >= args.min_tweets
        keep = np.flatnonzero(active)
        table = FeatureTable([table.user_ids[i] for i in keep],
                             [table.screen_names[i] for i in keep], table.X[keep])
        inputs.append(args.features)
    else:
        table = extract_store(load_store(args.store), args.min_tweets)
        inputs.append(args.store)
    labeled = {}
    if args.labels:
        labeled = read_labels(args.labels)
        inputs.append(args.labels)
    ex = extrapolate_table(model, table, labeled)
    out = _dir_out(args.out)
    ids = sorted(ex.scores)
    flags = predict_labels(np.array([ex.scores[u] for u in ids]))
    _write_rows(out / "scores.csv", ["user_id", "screen_name", "score", "label"],
                [[u, ex.screen_names.get(u, ""), repr(ex.scores[u]),
                  "bot" if f else "human"] for u, f in zip(ids, flags)])
    _write_rows(out / "summary.csv", ["metric", "value"], [
        ["scored", len(ids)],
        ["predicted_bots", ex.predicted_bots],
        ["predicted_humans", ex.predicted_humans],
        ["labeled_bots", ex.labeled_bots],
        ["labeled_humans", ex.labeled_humans],
        ["bots", ex.bots],
        ["humans", ex.humans],
        ["bot_fraction", repr(ex.bot_fraction)],
    ])
    _finish(args, out, inputs, seed=model.spec.seed)


# -- parser ---------------------------------------------------------------------

def _add_eval_options(p, grid_repeats_help: str) -> None:
    p.add_argument("--k", type=int, default=10, help="folds per repeat (default 10)")
    p.add_argument("--grid-repeats", type=int, default=10, help=grid_repeats_help)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--threads", type=int, default=None,
                        help="worker cap (default: $ASTROTURF_THREADS or all cores)")

    parser = _Parser(prog="astroturf",
                     description="Election-tweet analytics and social-bot detection.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", parents=[common], help="generate a labeled synthetic corpus")
    p.add_argument("--config", help="TOML file with a [synth] table")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ingest", parents=[common], help="filter raw tweets into a store")
    p.add_argument("--config", required=True, help="TOML file with search/exclusion terms")
    p.add_argument("--in", dest="inputs", nargs="+", required=True, metavar="GLOB")
    p.add_argument("--store", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("stats", parents=[common], help="tweet-type series and top-k tables")
    p.add_argument("--store", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--bin", default="1d", help="time-series bin width, e.g. 1d or 6h")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("trolls", parents=[common], help="match a troll roster by user id")
    p.add_argument("--store", required=True)
    p.add_argument("--list", required=True, help="roster CSV with user_id and screen_name")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_trolls)

    p = sub.add_parser("features", parents=[common], help="per-account feature table")
    p.add_argument("--store", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--min-tweets", type=int, default=30)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("labels", help="labeling aids")
    lsub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    q = lsub.add_parser("suggest", parents=[common], help="rule-based label suggestions")
    q.add_argument("--features", required=True)
    q.add_argument("--store", help="timeline store; enables the trending-hashtag rule")
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_labels)

    p = sub.add_parser("train", parents=[common], help="fit and save one model")
    p.add_argument("--features", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--family", required=True)
    p.add_argument("--param", action="append", metavar="NAME=VALUE")
    p.add_argument("--grid", help="TOML grid; pick the best point by cross-validated AUC")
    p.add_argument("--seed", type=int, default=0)
    _add_eval_options(p, "repeats per grid point (default 10)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluation protocols")
    esub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    q = esub.add_parser("cv", parents=[common], help="repeated stratified CV with grid search")
    q.add_argument("--features", required=True)
    q.add_argument("--labels", required=True)
    q.add_argument("--family", required=True)
    q.add_argument("--grid", help="TOML grid (default: built-in grid for the family)")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--repeats", type=int, default=100, help="repeats for the chosen spec")
    _add_eval_options(q, "repeats per grid point (default 10)")
    q.add_argument("--full", action="store_true", help="run every grid point at --repeats")
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_eval_cv)
    q = esub.add_parser("external", parents=[common], help="ROC report for a score file")
    q.add_argument("--scores", required=True, help="CSV with account and score columns")
    q.add_argument("--labels", required=True)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_eval_external)

    p = sub.add_parser("predict", parents=[common], help="score accounts and count bots")
    p.add_argument("--model", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--features")
    src.add_argument("--store")
    p.add_argument("--labels", help="known labels, merged into the totals")
    p.add_argument("--min-tweets", type=int, default=30)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.started = time.monotonic()
        args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    except (ValueError, OSError, KeyError) as exc:
        print(f"astroturf: error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
