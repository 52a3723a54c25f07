"""End-to-end orchestration: ingest, detect, analyze, compare, report.

Every artifact starts with a ``# config_fingerprint=...`` comment so outputs
can always be traced back to the exact configuration that produced them.
Artifacts are byte-identical across runs with the same inputs: stage timings
are kept on the returned RunSummary object (and printed by the CLI) but are
deliberately left out of run_summary.json.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

from . import corpus as corpus_mod
from . import detector as detector_mod
from . import stats as stats_mod
from . import textmine as textmine_mod
from .detector import DetectorConfig, Label
from .errors import PipelineStageError
from .stats import KsResult

__all__ = [
    "GROUP_SLUGS",
    "COMPARISON_PAIRS",
    "PipelineSettings",
    "RunSummary",
    "settings_from_flags",
    "compare_group_sentiment",
    "compare_groups",
    "write_classifications",
    "execute_pipeline",
    "run_pipeline",
]

GROUP_SLUGS = {
    Label.NO_BOT: "nobot",
    Label.SUSPICIOUS: "suspicious",
    Label.BOT: "bot",
}

COMPARISON_PAIRS = (
    (Label.NO_BOT, Label.BOT),
    (Label.NO_BOT, Label.SUSPICIOUS),
    (Label.SUSPICIOUS, Label.BOT),
)


@dataclass(frozen=True)
class PipelineSettings:
    """Everything that influences pipeline output, in one fingerprintable bag."""

    detector: DetectorConfig = field(default_factory=DetectorConfig)
    rate_basis: str = corpus_mod.RATE_CORPUS_WINDOW
    strictness: str = corpus_mod.LENIENT
    output_format: str = "csv"  # classification file format: csv | jsonl
    query_term: str = textmine_mod.DEFAULT_QUERY_TERM
    min_df: float = 0.01
    max_df: float = 0.45
    window: int = 5
    k_terms: int = 20
    k_neighbors: int = 5
    stopwords_path: str | None = None
    lexicon_path: str | None = None

    def __post_init__(self):
        if self.output_format not in ("csv", "jsonl"):
            raise ValueError(f"output_format must be csv or jsonl, got {self.output_format!r}")

    def fingerprint(self) -> str:
        """sha256 over the resolved configuration (content, not file paths)."""
        stopwords = textmine_mod.load_stopwords(self.stopwords_path)
        lexicon = textmine_mod.load_lexicon(self.lexicon_path)
        payload = {
            "detector": {
                "min_followers": self.detector.min_followers,
                "ratio_tolerance": self.detector.ratio_tolerance,
                "activity_strategy": self.detector.activity_strategy.value,
                "activity_quantile": self.detector.activity_quantile,
                "iqr_multiplier": self.detector.iqr_multiplier,
                "iqr_fence_base": self.detector.iqr_fence_base,
                "duplicate_min_cluster": self.detector.duplicate_min_cluster,
                "suspicious_sources": sorted(self.detector.suspicious_sources),
            },
            "rate_basis": self.rate_basis,
            "strictness": self.strictness,
            "output_format": self.output_format,
            "query_term": self.query_term,
            "min_df": self.min_df,
            "max_df": self.max_df,
            "window": self.window,
            "k_terms": self.k_terms,
            "k_neighbors": self.k_neighbors,
            "stopwords": sorted(stopwords),
            "lexicon": sorted(lexicon.polarity.items()),
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


@dataclass
class RunSummary:
    """Outcome of one pipeline run.

    ``timings`` lives only on this object; the JSON written to disk excludes
    it so repeated runs stay byte-identical.
    """

    config_fingerprint: str
    total_tweets: int
    total_accounts: int
    span_start: str
    span_end: str
    skipped_records: int
    duplicate_ids: int
    rate_basis: str
    activity_strategy: str
    activity_threshold: float
    label_shares: dict          # inclusive counts/shares per label
    disjoint_shares: dict       # per-label counts/shares with Bot carved out
    rule_hits: dict             # rule -> tweets with that rule firing
    verified_overrides: int
    mean_sentiment: dict        # label -> mean per-tweet score or None
    ks_comparisons: dict        # "A_vs_B" -> dict or None
    artifacts: list
    timings: dict

    def to_dict(self) -> dict:
        return {
            "config_fingerprint": self.config_fingerprint,
            "corpus": {
                "total_tweets": self.total_tweets,
                "total_accounts": self.total_accounts,
                "span_start": self.span_start,
                "span_end": self.span_end,
                "skipped_records": self.skipped_records,
                "duplicate_ids": self.duplicate_ids,
                "rate_basis": self.rate_basis,
            },
            "detection": {
                "activity_strategy": self.activity_strategy,
                "activity_threshold": self.activity_threshold,
                "inclusive_label_shares": self.label_shares,
                "disjoint_label_shares": self.disjoint_shares,
                "rule_hits": self.rule_hits,
                "verified_overrides": self.verified_overrides,
            },
            "sentiment": {
                "group_means": self.mean_sentiment,
                "ks_comparisons": self.ks_comparisons,
            },
            "artifacts": self.artifacts,
        }


def compare_group_sentiment(samples: Mapping[Label, Sequence[float]]) -> dict:
    """KS-compare word-level sentiment samples between label groups.

    Returns {"NoBot_vs_Bot": KsResult | None, ...}; a pair with an empty side
    is reported as None (skipped).  Fewer than two non-empty groups means
    there is nothing to compare at all, which is an error.
    """
    non_empty = [label for label in Label if samples.get(label)]
    if len(non_empty) < 2:
        raise ValueError("group comparison needs at least two non-empty groups")
    out = {}
    for a, b in COMPARISON_PAIRS:
        key = f"{a.value}_vs_{b.value}"
        sa = samples.get(a) or ()
        sb = samples.get(b) or ()
        out[key] = stats_mod.ks_two_sample(sa, sb) if sa and sb else None
    return out


def compare_groups(classifications, docs, lexicon) -> dict:
    """Classified docs -> per-pair KS results on word-level sentiment."""
    samples = textmine_mod.group_word_sentiment_samples(classifications, docs, lexicon)
    return compare_group_sentiment(samples)


def _write_table(path: Path, fingerprint: str, header, rows, created: list):
    created.append(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# config_fingerprint={fingerprint}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_classifications(path: Path, fingerprint: str, classifications,
                          fmt: str, created: list | None = None):
    """Write per-tweet classification records as csv or jsonl."""
    if created is not None:
        created.append(path)
    if fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(f"# config_fingerprint={fingerprint}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["tweet_id", "label", "rules", "verified_override"])
            for c in classifications:
                writer.writerow([c.tweet_id, c.label.value,
                                 "|".join(r.value for r in c.rules),
                                 str(c.verified_override).lower()])
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for c in classifications:
                fh.write(json.dumps({
                    "tweet_id": c.tweet_id,
                    "label": c.label.value,
                    "rules": [r.value for r in c.rules],
                    "verified_override": c.verified_override,
                    "config_fingerprint": fingerprint,
                }, sort_keys=True, separators=(",", ":")))
                fh.write("\n")


def execute_pipeline(corpus_path, out_dir, settings: PipelineSettings | None = None) -> RunSummary:
    """Run the full chain on a corpus file and write all artifacts to out_dir.

    Writes per-group word-cloud, co-occurrence and sentiment-ECDF tables, the
    per-tweet classification file, and run_summary.json.  On failure the
    partially written artifacts are removed and PipelineStageError names the
    stage that died.
    """
    if settings is None:
        settings = PipelineSettings()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    created: list[Path] = []
    timings: dict[str, float] = {}
    stage = "setup"
    try:
        fingerprint = settings.fingerprint()

        stage = "ingest"
        t0 = time.perf_counter()
        corpus = corpus_mod.ingest(corpus_path, strictness=settings.strictness,
                                   rate_basis=settings.rate_basis)
        timings[stage] = time.perf_counter() - t0

        stage = "detect"
        t0 = time.perf_counter()
        classifications = detector_mod.classify(corpus, settings.detector)
        threshold = detector_mod.activity_threshold(
            (a.tweets_per_day for a in corpus.accounts.values()), settings.detector)
        shares = detector_mod.group_summary(classifications)
        timings[stage] = time.perf_counter() - t0

        stage = "analyze"
        t0 = time.perf_counter()
        stopwords = textmine_mod.load_stopwords(settings.stopwords_path)
        lexicon = textmine_mod.load_lexicon(settings.lexicon_path)
        docs = textmine_mod.tokenize_corpus(corpus.tweets, stopwords, settings.query_term)
        group_docs = {label: [] for label in Label}
        for doc, c in zip(docs, classifications):
            group_docs[c.label].append(doc)
            if c.label is Label.BOT:
                group_docs[Label.SUSPICIOUS].append(doc)

        for label, slug in GROUP_SLUGS.items():
            gdocs = group_docs[label]
            cloud_rows = []
            edge_rows = []
            if gdocs:
                vocab = textmine_mod.build_vocab(gdocs, settings.min_df, settings.max_df)
                counts = vocab.total_term_counts()
                weights = vocab.tfidf_sums()
                cloud_rows = [(term, counts[term], weights[term])
                              for term in sorted(vocab.terms,
                                                 key=lambda t: (-counts[t], t))]
                model = textmine_mod.cooccurrence(gdocs, settings.window)
                edge_rows = textmine_mod.top_cooccurrents(
                    model, settings.k_terms, settings.k_neighbors)
            _write_table(out_dir / f"wordcloud_{slug}.csv", fingerprint,
                         ["term", "count", "tfidf_sum"], cloud_rows, created)
            _write_table(out_dir / f"cooccurrence_{slug}.csv", fingerprint,
                         ["term", "neighbor", "association"], edge_rows, created)

        mean_sentiment = textmine_mod.group_mean_sentiment(classifications, docs, lexicon)
        timings[stage] = time.perf_counter() - t0

        stage = "compare"
        t0 = time.perf_counter()
        samples = textmine_mod.group_word_sentiment_samples(classifications, docs, lexicon)
        for label, slug in GROUP_SLUGS.items():
            points = []
            if samples[label]:
                points = stats_mod.ecdf(samples[label]).points()
            _write_table(out_dir / f"ecdf_{slug}.csv", fingerprint,
                         ["value", "cumulative_probability"], points, created)
        ks_results = compare_group_sentiment(samples)
        timings[stage] = time.perf_counter() - t0

        stage = "report"
        t0 = time.perf_counter()
        class_name = "classifications.csv" if settings.output_format == "csv" else "classifications.jsonl"
        write_classifications(out_dir / class_name, fingerprint, classifications,
                              settings.output_format, created)

        rule_hits = {rule.value: 0 for rule in detector_mod.Rule}
        overrides = 0
        disjoint_counts = {label: 0 for label in Label}
        for c in classifications:
            disjoint_counts[c.label] += 1
            if c.verified_override:
                overrides += 1
            for rule in c.rules:
                rule_hits[rule.value] += 1
        total = len(corpus)
        disjoint = {label.value: {"count": n, "share": n / total}
                    for label, n in disjoint_counts.items()}

        summary = RunSummary(
            config_fingerprint=fingerprint,
            total_tweets=len(corpus),
            total_accounts=len(corpus.accounts),
            span_start=corpus.span_start.isoformat(),
            span_end=corpus.span_end.isoformat(),
            skipped_records=corpus.skipped_count,
            duplicate_ids=corpus.duplicate_count,
            rate_basis=settings.rate_basis,
            activity_strategy=settings.detector.activity_strategy.value,
            activity_threshold=threshold,
            label_shares={label.value: {"count": gs.count, "share": gs.share}
                          for label, gs in shares.items()},
            disjoint_shares=disjoint,
            rule_hits=rule_hits,
            verified_overrides=overrides,
            mean_sentiment={label.value: mean_sentiment[label] for label in Label},
            ks_comparisons={key: (None if res is None else {
                "d_statistic": res.d_statistic, "p_value": res.p_value,
                "n1": res.n1, "n2": res.n2}) for key, res in ks_results.items()},
            artifacts=sorted(p.name for p in created) + ["run_summary.json"],
            timings=timings,
        )
        summary_path = out_dir / "run_summary.json"
        created.append(summary_path)
        with open(summary_path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(summary.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        timings[stage] = time.perf_counter() - t0
        summary.timings = dict(timings)
        return summary
    except Exception as exc:
        for path in created:
            try:
                path.unlink()
            except FileNotFoundError:
                pass
        raise PipelineStageError(stage, exc) from exc


_RATE_BASIS_ALIASES = {
    "window": corpus_mod.RATE_CORPUS_WINDOW,
    "corpus-window": corpus_mod.RATE_CORPUS_WINDOW,
    "lifetime": corpus_mod.RATE_LIFETIME,
}


def settings_from_flags(config_path=None, flags: Mapping | None = None) -> PipelineSettings:
    """Resolve a detector config file plus flag overrides into PipelineSettings.

    Precedence: dataclass defaults < config file < flags.  Flag keys mirror
    the CLI: activity_strategy, quantile, ratio_tolerance, sources, lexicon,
    stopwords, rate_basis, strict, format, and the text-mining knobs
    (query_term, min_df, max_df, window, k_terms, k_neighbors).
    """
    flags = dict(flags or {})
    sources = flags.pop("sources", None)
    if config_path is not None:
        det = detector_mod.load_detector_config(config_path, sources_path=sources)
    elif sources is not None:
        det = DetectorConfig(suspicious_sources=detector_mod.load_suspicious_sources(sources))
    else:
        det = DetectorConfig()

    det_overrides = {}
    if flags.get("activity_strategy") is not None:
        det_overrides["activity_strategy"] = detector_mod.parse_activity_strategy(
            str(flags.pop("activity_strategy")))
    for flag, field_name in (("quantile", "activity_quantile"),
                             ("ratio_tolerance", "ratio_tolerance"),
                             ("iqr_multiplier", "iqr_multiplier"),
                             ("iqr_fence_base", "iqr_fence_base"),
                             ("min_followers", "min_followers"),
                             ("duplicate_min_cluster", "duplicate_min_cluster")):
        if flags.get(flag) is not None:
            det_overrides[field_name] = flags.pop(flag)
        else:
            flags.pop(flag, None)
    if det_overrides:
        det = replace(det, **det_overrides)

    kwargs = {"detector": det}
    rate_basis = flags.pop("rate_basis", None)
    if rate_basis is not None:
        try:
            kwargs["rate_basis"] = _RATE_BASIS_ALIASES[str(rate_basis).lower()]
        except KeyError:
            raise ValueError(f"unknown rate basis {rate_basis!r}") from None
    if flags.pop("strict", False):
        kwargs["strictness"] = corpus_mod.STRICT
    fmt = flags.pop("format", None)
    if fmt is not None:
        kwargs["output_format"] = fmt
    for flag, field_name in (("lexicon", "lexicon_path"), ("stopwords", "stopwords_path"),
                             ("query_term", "query_term"), ("min_df", "min_df"),
                             ("max_df", "max_df"), ("window", "window"),
                             ("k_terms", "k_terms"), ("k_neighbors", "k_neighbors")):
        value = flags.pop(flag, None)
        if value is not None:
            kwargs[field_name] = value
    if flags:
        raise ValueError(f"unknown pipeline flags: {sorted(flags)}")
    return PipelineSettings(**kwargs)


def run_pipeline(corpus_path, config_path=None, out_dir="artifacts",
                 flags: Mapping | None = None) -> RunSummary:
    """Entry point taking a detector config file plus flat flag overrides."""
    try:
        settings = settings_from_flags(config_path, flags)
    except Exception as exc:
        raise PipelineStageError("config", exc) from exc
    return execute_pipeline(corpus_path, out_dir, settings)
