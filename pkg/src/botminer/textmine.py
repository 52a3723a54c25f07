"""Text mining over tokenized tweets.

Covers the whole chain used for the per-group analyses: tokenization,
document-frequency-pruned TF-IDF, skip-window co-occurrence with directional
association strengths, and dictionary-based sentiment scoring.
"""

from __future__ import annotations

import math
import re
from collections import Counter, defaultdict
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .detector import Classification, Label
from .errors import ConfigError

__all__ = [
    "DEFAULT_QUERY_TERM",
    "TokenizedDoc",
    "load_stopwords",
    "tokenize_text",
    "tokenize",
    "tokenize_corpus",
    "term_frequencies",
    "VocabModel",
    "build_vocab",
    "CooccurrenceModel",
    "cooccurrence",
    "top_cooccurrents",
    "SentimentLexicon",
    "load_lexicon",
    "tweet_sentiment",
    "word_sentiment_values",
    "group_word_sentiment_samples",
    "group_mean_sentiment",
]

DEFAULT_QUERY_TERM = "iran"

# strip everything that is not a word character; the leading # or @ survives
_NONWORD_RE = re.compile(r"\W+", re.UNICODE)
_KEPT_PREFIXES = ("#", "@")


@dataclass(frozen=True, slots=True)
class TokenizedDoc:
    """Token stream of a single tweet."""

    tweet_id: str
    tokens: tuple


def load_stopwords(path=None) -> frozenset:
    """Stop-word list, one word per line, '#' comments, lowercased."""
    if path is None:
        text = resources.files("botminer").joinpath("data/stopwords.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    if not words:
        raise ConfigError("stop-word list is empty")
    return frozenset(words)


def _clean(raw: str) -> str:
    prefix = raw[0] if raw[0] in _KEPT_PREFIXES else ""
    body = _NONWORD_RE.sub("", raw[len(prefix):])
    if not body:
        return ""
    return prefix + body


def tokenize_text(text: str, stopwords: frozenset,
                  query_term: str = DEFAULT_QUERY_TERM) -> list:
    """Lowercase, split on whitespace, drop URLs/stop-words/the query term.

    Punctuation is stripped except a leading '#' or '@', which stays glued to
    its word so hashtags and mentions survive as distinct tokens.  The output
    is stable under re-tokenization.
    """
    query = query_term.lower()
    out = []
    for raw in text.lower().split():
        if raw.startswith("http"):
            continue  # URL tokens carry no topical signal
        token = _clean(raw)
        if not token or token.startswith("http"):
            continue
        if token in stopwords or token == query:
            continue
        out.append(token)
    return out


def tokenize(tweet, stopwords: frozenset,
             query_term: str = DEFAULT_QUERY_TERM) -> TokenizedDoc:
    """Tokenize one tweet into a TokenizedDoc."""
    return TokenizedDoc(tweet.id, tuple(tokenize_text(tweet.text, stopwords, query_term)))


def tokenize_corpus(tweets, stopwords: frozenset,
                    query_term: str = DEFAULT_QUERY_TERM) -> list:
    """Tokenize a tweet sequence in order."""
    return [tokenize(t, stopwords, query_term) for t in tweets]


def term_frequencies(docs: Iterable[TokenizedDoc]) -> Counter:
    """Corpus-wide token occurrence counts (the word-cloud weight input)."""
    counts = Counter()
    for doc in docs:
        counts.update(doc.tokens)
    return counts


# ---------------------------------------------------------------------------
# TF-IDF with document-frequency pruning
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VocabModel:
    """Pruned vocabulary with term and tf-idf weights.

    ``weight(tweet_id, term)`` is raw count * ln(n_docs / doc_freq); terms
    outside the document-frequency band were pruned and weigh zero.
    """

    terms: tuple
    doc_freq: Mapping[str, int]
    n_docs: int
    _tf: Mapping
    _tfidf: Mapping

    def term_count(self, tweet_id: str, term: str) -> int:
        return self._tf.get((tweet_id, term), 0)

    def weight(self, tweet_id: str, term: str) -> float:
        return self._tfidf.get((tweet_id, term), 0.0)

    def total_term_counts(self) -> Counter:
        """Corpus-wide occurrence count per kept term."""
        totals = Counter()
        for (_, term), count in self._tf.items():
            totals[term] += count
        return totals

    def tfidf_sums(self) -> dict:
        """Corpus-wide summed tf-idf weight per kept term."""
        sums = defaultdict(float)
        for (_, term), w in self._tfidf.items():
            sums[term] += w
        return dict(sums)


def build_vocab(docs: Sequence[TokenizedDoc], min_df: float = 0.01,
                max_df: float = 0.45) -> VocabModel:
    """Build the pruned vocabulary over *docs*.

    A term is kept when min_df <= df/n_docs <= max_df (both ends inclusive);
    the band kills one-off noise at the bottom and near-ubiquitous filler at
    the top.  idf is the unsmoothed ln(n_docs / doc_freq).
    """
    if not docs:
        raise ValueError("build_vocab needs at least one document")
    if not 0.0 <= min_df < max_df <= 1.0:
        raise ValueError(f"bad document-frequency band [{min_df}, {max_df}]")
    n = len(docs)
    df = Counter()
    for doc in docs:
        df.update(set(doc.tokens))
    kept = sorted(t for t, c in df.items() if min_df <= c / n <= max_df)
    kept_set = set(kept)
    doc_freq = {t: df[t] for t in kept}
    tf = {}
    tfidf = {}
    for doc in docs:
        counts = Counter(tok for tok in doc.tokens if tok in kept_set)
        for term, count in counts.items():
            tf[doc.tweet_id, term] = count
            tfidf[doc.tweet_id, term] = count * math.log(n / doc_freq[term])
    return VocabModel(tuple(kept), doc_freq, n, tf, tfidf)


# ---------------------------------------------------------------------------
# skip-window co-occurrence
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CooccurrenceModel:
    """Symmetric co-occurrence counts within a token window."""

    window: int
    pair_counts: Mapping  # canonical (min, max) term pair -> count
    term_freq: Mapping[str, int]

    def count(self, w1: str, w2: str) -> int:
        if w1 == w2:
            return 0
        key = (w1, w2) if w1 <= w2 else (w2, w1)
        return self.pair_counts.get(key, 0)

    def association(self, w1: str, w2: str) -> float:
        """count(w1, w2) / freq(w1): how often w2 keeps w1 company."""
        freq = self.term_freq.get(w1, 0)
        if freq == 0:
            return 0.0
        return self.count(w1, w2) / freq


def cooccurrence(docs: Iterable[TokenizedDoc], window: int = 5) -> CooccurrenceModel:
    """Count token pairs at positional distance <= window inside each doc.

    Pairs never cross document boundaries and a term does not co-occur with
    itself (repeats at close range are ignored).
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    pair_counts = Counter()
    term_freq = Counter()
    for doc in docs:
        tokens = doc.tokens
        term_freq.update(tokens)
        length = len(tokens)
        for i in range(length):
            left = tokens[i]
            for j in range(i + 1, min(i + window, length - 1) + 1):
                right = tokens[j]
                if left == right:
                    continue
                key = (left, right) if left <= right else (right, left)
                pair_counts[key] += 1
    return CooccurrenceModel(window, dict(pair_counts), dict(term_freq))


def top_cooccurrents(model: CooccurrenceModel, k_terms: int = 20,
                     k_neighbors: int = 5) -> list:
    """Strongest neighbors of the most frequent terms.

    Returns (hub, neighbor, association) triples: for each of the k_terms
    most frequent terms, its k_neighbors highest-association partners.
    Ties break lexicographically so output order is reproducible.
    """
    if k_terms < 1 or k_neighbors < 1:
        raise ValueError("k_terms and k_neighbors must be >= 1")
    hubs = sorted(model.term_freq, key=lambda t: (-model.term_freq[t], t))[:k_terms]
    neighbors = defaultdict(set)
    for w1, w2 in model.pair_counts:
        neighbors[w1].add(w2)
        neighbors[w2].add(w1)
    edges = []
    for hub in hubs:
        scored = [(p, model.association(hub, p)) for p in neighbors[hub]]
        scored.sort(key=lambda pv: (-pv[1], pv[0]))
        edges.extend((hub, partner, value) for partner, value in scored[:k_neighbors])
    return edges


# ---------------------------------------------------------------------------
# dictionary sentiment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SentimentLexicon:
    """Word -> polarity map with case-insensitive lookup."""

    polarity: Mapping[str, float]

    def __post_init__(self):
        if not self.polarity:
            raise ConfigError("sentiment lexicon is empty")
        object.__setattr__(
            self, "polarity", {w.lower(): float(v) for w, v in self.polarity.items()})

    def value(self, token: str) -> float | None:
        return self.polarity.get(token.lower())

    def __len__(self) -> int:
        return len(self.polarity)


def load_lexicon(path=None) -> SentimentLexicon:
    """Load a two-column TSV lexicon (word <TAB> polarity, '#' comments)."""
    if path is None:
        text = resources.files("botminer").joinpath("data/lexicon.tsv").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    polarity = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ConfigError(f"lexicon line {lineno}: expected 'word<TAB>polarity'")
        try:
            polarity[parts[0].strip()] = float(parts[1])
        except ValueError:
            raise ConfigError(f"lexicon line {lineno}: bad polarity {parts[1]!r}") from None
    return SentimentLexicon(polarity)


def tweet_sentiment(doc: TokenizedDoc, lexicon: SentimentLexicon) -> float:
    """Sum of polarities of the doc's lexicon words (0.0 when none match)."""
    total = 0.0
    for token in doc.tokens:
        value = lexicon.value(token)
        if value is not None:
            total += value
    return total


def word_sentiment_values(docs: Iterable[TokenizedDoc],
                          lexicon: SentimentLexicon) -> list:
    """Per-occurrence polarity values of every lexicon word in *docs*.

    This is the word-level sample the distribution comparisons run on.
    """
    values = []
    for doc in docs:
        for token in doc.tokens:
            value = lexicon.value(token)
            if value is not None:
                values.append(value)
    return values


def group_word_sentiment_samples(classifications: Iterable[Classification],
                                 docs: Iterable[TokenizedDoc],
                                 lexicon: SentimentLexicon) -> dict:
    """Word-level polarity samples per label group (Suspicious includes Bot)."""
    label_by_id = {c.tweet_id: c.label for c in classifications}
    samples = {label: [] for label in Label}
    for doc in docs:
        try:
            label = label_by_id[doc.tweet_id]
        except KeyError:
            raise ValueError(f"no classification for tweet {doc.tweet_id!r}") from None
        groups = (label,) if label is not Label.BOT else (Label.BOT, Label.SUSPICIOUS)
        for token in doc.tokens:
            value = lexicon.value(token)
            if value is not None:
                for g in groups:
                    samples[g].append(value)
    return samples


def group_mean_sentiment(classifications: Iterable[Classification],
                         docs: Iterable[TokenizedDoc],
                         lexicon: SentimentLexicon) -> dict:
    """Mean per-tweet sentiment for each label group.

    Suspicious is inclusive of Bot (a Bot tweet counts in both groups);
    a group with no tweets maps to None.
    """
    label_by_id = {c.tweet_id: c.label for c in classifications}
    sums = {label: 0.0 for label in Label}
    counts = {label: 0 for label in Label}
    for doc in docs:
        try:
            label = label_by_id[doc.tweet_id]
        except KeyError:
            raise ValueError(f"no classification for tweet {doc.tweet_id!r}") from None
        score = tweet_sentiment(doc, lexicon)
        groups = (label,) if label is not Label.BOT else (Label.BOT, Label.SUSPICIOUS)
        for g in groups:
            sums[g] += score
            counts[g] += 1
    return {label: (sums[label] / counts[label] if counts[label] else None)
            for label in Label}
