"""Synthetic tweet-corpus generator with planted ground truth.

Produces a newline-delimited JSON dump shaped exactly like a real capture
plus a companion account_id,label file, so the detector and the analysis
chain can be verified end to end at desk scale.  Output is a pure function
of the config: same settings, same bytes.

Planted behaviors per account class:

* humans post at ~human_rate_mean tweets/day from official apps, follower
  and friend counts independent, occasionally retweet, 2% verified;
* bots post at ~bot_rate_mean tweets/day, mostly from suspicious apps
  (bot_suspicious_source_prob), mostly with near-equal follower/friend
  counts (bot_ratio_equalized_prob, relative gap <= 0.05), and clone a
  shared template text on bot_duplicate_prob of their tweets;
* bot texts skew negative (bot_negative_skew) versus humans
  (human_negative_skew), so sentiment separates the groups.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, Mapping

from .corpus import Corpus
from .detector import Classification, Label
from .errors import ConfigError
from .rng import SplitMix64

__all__ = [
    "SynthConfig",
    "DetectionReport",
    "generate",
    "load_ground_truth",
    "evaluate_detection",
]

# fixed origin so timestamps are reproducible and span a known window
_BASE_EPOCH = datetime(2017, 12, 30, 0, 0, 0, tzinfo=timezone.utc)
_TEMPLATE_POOL = 12

# word pools; sentiment words must stay aligned with data/lexicon.tsv
_FILLER = ("the", "and", "for", "with", "this", "that", "from", "have", "will", "about")
_NEUTRAL = ("people", "news", "today", "world", "government", "country", "city",
            "street", "report", "video", "watch", "live", "media", "minister",
            "president", "oil", "economy", "election", "internet", "tonight")
_POSITIVE = ("good", "great", "hope", "peace", "free", "freedom", "support",
             "happy", "strong", "proud", "justice", "truth", "help")
_NEGATIVE = ("bad", "terror", "war", "hate", "kill", "death", "attack", "crisis",
             "corrupt", "regime", "violence", "fear", "threat", "enemy", "evil",
             "prison", "danger")
_HASHTAGS = ("#IranProtests", "#Tehran", "#FreeIran", "#News", "#Breaking")
_URL_ALPHABET = "abcdefghijklmnopqrstuvwxyz0123456789"

_OFFICIAL_APPS = (
    ("Twitter for iPhone", "http://twitter.com/download/iphone"),
    ("Twitter for Android", "http://twitter.com/download/android"),
    ("Twitter Web Client", "http://twitter.com"),
    ("Twitter Lite", "https://mobile.twitter.com"),
    ("TweetDeck", "https://about.twitter.com/products/tweetdeck"),
)
_BOT_APPS = (
    ("twittbot.net", "http://twittbot.net/"),
    ("IFTTT", "https://ifttt.com"),
    ("www.AgendaofEvil.com", "http://www.agendaofevil.com"),
    ("pipes.cyberguerril.org", "http://pipes.cyberguerril.org"),
    ("www.rightstreem.com", "http://www.rightstreem.com"),
)


@dataclass(frozen=True)
class SynthConfig:
    """Generator knobs; every field participates in the deterministic stream."""

    seed: int = 7
    n_humans: int = 500
    n_bots: int = 25
    span_hours: float = 24.0
    human_rate_mean: float = 5.0
    bot_rate_mean: float = 300.0
    bot_ratio_equalized_prob: float = 0.9
    bot_suspicious_source_prob: float = 0.8
    bot_duplicate_prob: float = 0.3
    bot_negative_skew: float = 0.7
    human_negative_skew: float = 0.45
    verified_human_prob: float = 0.02

    def __post_init__(self):
        if self.n_humans < 0 or self.n_bots < 0:
            raise ConfigError("account counts must be >= 0")
        if self.n_humans + self.n_bots == 0:
            raise ConfigError("nothing to generate: zero accounts")
        if self.span_hours <= 0:
            raise ConfigError(f"span_hours must be > 0, got {self.span_hours}")
        if self.human_rate_mean <= 0 or self.bot_rate_mean <= 0:
            raise ConfigError("rate means must be > 0")
        for name in ("bot_ratio_equalized_prob", "bot_suspicious_source_prob",
                     "bot_duplicate_prob", "bot_negative_skew",
                     "human_negative_skew", "verified_human_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {p}")


def _anchor(app: tuple) -> str:
    name, href = app
    return f'<a href="{href}" rel="nofollow">{name}</a>'


def _short_url(rng: SplitMix64) -> str:
    return "https://t.co/" + "".join(rng.choice(_URL_ALPHABET) for _ in range(8))


def _compose_text(rng: SplitMix64, negative_skew: float) -> str:
    """One tweet body: filler/topic/sentiment words, maybe a hashtag or URL."""
    n_words = rng.randint(6, 12)
    words = []
    for _ in range(n_words):
        r = rng.random()
        if r < 0.20:
            words.append(rng.choice(_FILLER))
        elif r < 0.50:
            words.append(rng.choice(_NEUTRAL))
        elif rng.chance(negative_skew):
            words.append(rng.choice(_NEGATIVE))
        else:
            words.append(rng.choice(_POSITIVE))
    if rng.chance(0.5):
        words.insert(rng.randint(0, len(words) - 1), "Iran")
    if rng.chance(0.35):
        words.append(rng.choice(_HASHTAGS))
    if rng.chance(0.15):
        words.append(_short_url(rng))
    return " ".join(words)


def _iso(dt: datetime) -> str:
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


def generate(config: SynthConfig, corpus_path, truth_path) -> dict:
    """Write the synthetic corpus and its ground-truth file.

    Returns the ground-truth mapping account_id -> "human" | "bot".  Records
    land in the corpus file sorted by (created_at, tweet id) like a capture
    replayed in order; all draws come from one SplitMix64 stream seeded with
    config.seed, so identical configs give byte-identical files.
    """
    rng = SplitMix64(config.seed)
    span_secs = max(int(config.span_hours * 3600), 1)
    span_days = config.span_hours / 24.0
    iso_memo: dict[int, str] = {}

    def offset_iso(offset: int) -> str:
        try:
            return iso_memo[offset]
        except KeyError:
            value = _iso(_BASE_EPOCH + timedelta(seconds=offset))
            iso_memo[offset] = value
            return value

    # shared texts that duplicate-happy bots clone verbatim
    templates = tuple(_compose_text(rng, config.bot_negative_skew)
                      for _ in range(_TEMPLATE_POOL))

    records = []  # (created_at_iso, tweet_id, serialized line)
    truth: dict[str, str] = {}
    counter = 0

    def emit(created_iso: str, text: str, source: str, user: dict,
             retweet_of: str | None = None):
        nonlocal counter
        tweet_id = f"t{counter:08d}"
        counter += 1
        record = {
            "id": tweet_id,
            "text": text,
            "created_at": created_iso,
            "source": source,
            "user": user,
        }
        if retweet_of is not None:
            record["retweeted_status_id"] = retweet_of
        records.append((created_iso, tweet_id,
                        json.dumps(record, sort_keys=True, separators=(",", ":"))))

    for h in range(config.n_humans):
        acct_id = f"h{h:06d}"
        truth[acct_id] = "human"
        rate = config.human_rate_mean * (0.5 + rng.random())
        verified = rng.chance(config.verified_human_prob)
        if verified:
            # media-style account; half get an exactly equalized ratio so the
            # corpus always exercises the verified override suppressing a hit
            followers = rng.randint(1000, 50000)
            friends = followers if rng.chance(0.5) else rng.randint(10, 2000)
        else:
            followers = rng.randint(10, 2000)
            friends = rng.randint(10, 2000)
        age_days = rng.randint(200, 3000)
        user = {
            "id": acct_id,
            "screen_name": f"human_{h:05d}",
            "followers_count": followers,
            "friends_count": friends,
            "verified": verified,
            "statuses_count": int(rate * age_days),
            "created_at": _iso(_BASE_EPOCH - timedelta(days=age_days)),
        }
        for _ in range(max(1, round(rate * span_days))):
            created = offset_iso(rng.randint(0, span_secs - 1))
            source = _anchor(rng.choice(_OFFICIAL_APPS))
            if rng.chance(0.12):
                # half the retweets echo a template verbatim: identical texts
                # that must stay exempt from the duplicate rule
                if rng.chance(0.5):
                    text = "RT @newswire: " + rng.choice(templates)
                else:
                    text = "RT @afriend: " + _compose_text(rng, config.human_negative_skew)
                emit(created, text, source, user, retweet_of=str(900_000_000 + counter))
            else:
                emit(created, _compose_text(rng, config.human_negative_skew),
                     source, user)

    for b in range(config.n_bots):
        acct_id = f"b{b:06d}"
        truth[acct_id] = "bot"
        rate = config.bot_rate_mean * (0.5 + rng.random())
        followers = rng.randint(150, 30000)
        if rng.chance(config.bot_ratio_equalized_prob):
            # truncation keeps the relative gap <= 0.05 of the larger count
            delta = int(followers * 0.05 * rng.random())
            friends = followers + delta if rng.chance(0.5) else followers - delta
        else:
            friends = rng.randint(10, 2000)
        if rng.chance(config.bot_suspicious_source_prob):
            app = rng.choice(_BOT_APPS)
        else:
            app = rng.choice(_OFFICIAL_APPS)
        age_days = rng.randint(20, 400)
        user = {
            "id": acct_id,
            "screen_name": f"bot_{b:04d}",
            "followers_count": followers,
            "friends_count": friends,
            "verified": False,
            "statuses_count": int(rate * age_days),
            "created_at": _iso(_BASE_EPOCH - timedelta(days=age_days)),
        }
        source = _anchor(app)
        for _ in range(max(1, round(rate * span_days))):
            created = offset_iso(rng.randint(0, span_secs - 1))
            if rng.chance(config.bot_duplicate_prob):
                text = rng.choice(templates)
            else:
                text = _compose_text(rng, config.bot_negative_skew)
            emit(created, text, source, user)

    records.sort()
    corpus_path = Path(corpus_path)
    truth_path = Path(truth_path)
    with open(corpus_path, "w", encoding="utf-8", newline="\n") as fh:
        for _, _, line in records:
            fh.write(line)
            fh.write("\n")
    with open(truth_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("account_id,label\n")
        for acct in sorted(truth):
            fh.write(f"{acct},{truth[acct]}\n")
    return truth


def load_ground_truth(path) -> dict:
    """Read an account_id,label file back into a dict."""
    truth = {}
    for line in Path(path).read_text("utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#") or line == "account_id,label":
            continue
        acct, _, label = line.partition(",")
        label = label.strip().lower()
        if label not in ("human", "bot"):
            raise ConfigError(f"ground truth label must be human|bot, got {label!r}")
        truth[acct.strip()] = label
    return truth


@dataclass(frozen=True)
class DetectionReport:
    """Account-level detection quality against planted ground truth."""

    recall: float | None
    false_positive_rate: float | None
    true_bots: int
    true_humans: int
    predicted_bot_accounts: frozenset


def evaluate_detection(classifications: Iterable[Classification], corpus: Corpus,
                       truth: Mapping[str, str]) -> DetectionReport:
    """Score detection at account granularity.

    An account counts as detected when any of its tweets is labeled Bot.
    Recall is detected/true bots; the false positive rate is the share of
    true humans wrongly detected.  Either is None when its class is absent.
    """
    author_of = {t.id: t.author_id for t in corpus.tweets}
    predicted = set()
    for c in classifications:
        if c.label is Label.BOT:
            author = author_of.get(c.tweet_id)
            if author is None:
                raise ValueError(f"classification for unknown tweet {c.tweet_id!r}")
            predicted.add(author)
    bots = {a for a, label in truth.items() if label == "bot"}
    humans = {a for a, label in truth.items() if label == "human"}
    recall = len(predicted & bots) / len(bots) if bots else None
    fpr = len(predicted & humans) / len(humans) if humans else None
    return DetectionReport(recall, fpr, len(bots), len(humans), frozenset(predicted))
