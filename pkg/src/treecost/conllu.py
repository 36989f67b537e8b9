"""CONLL-U ingestion: parsing, cleaning into directed trees, and sampling.

Cleaning keeps only plain-integer tokens (multiword "a-b" ranges and
decimal empty nodes are skipped), deletes PUNCT vertices, re-attaching
their dependents to the punctuation token's own head (transitively across
PUNCT chains), re-indexes survivors densely from 0 in original order, and
rejects anything that is not a single rooted tree.  Rejections are values,
not exceptions: a treebank full of oddities should degrade row by row.
"""
from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConlluParseError, TreeInvariantError
from .trees import DirectedTree

__all__ = [
    "TokenRecord",
    "SentenceTree",
    "Rejection",
    "CorpusSample",
    "parse_conllu",
    "parse_conllu_file",
    "to_tree",
    "filter_and_sample",
    "load_manifest",
    "scan_ud_treebanks",
    "write_samples",
    "read_samples",
]

_WORD_ID = re.compile(r"^[1-9]\d*$")
_RANGE_ID = re.compile(r"^\d+-\d+$")
_EMPTY_ID = re.compile(r"^\d+\.\d+$")

N_COLUMNS = 10


@dataclass(frozen=True)
class TokenRecord:
    """One CONLL-U token line; columns beyond id/head/upos ride along unused."""

    id_raw: str
    head: int | None
    upos: str
    columns: tuple[str, ...]

    @property
    def is_word(self) -> bool:
        return _WORD_ID.match(self.id_raw) is not None

    @property
    def is_range(self) -> bool:
        return _RANGE_ID.match(self.id_raw) is not None

    @property
    def is_empty_node(self) -> bool:
        return _EMPTY_ID.match(self.id_raw) is not None

    @property
    def word_id(self) -> int:
        return int(self.id_raw)


@dataclass(frozen=True)
class SentenceTree:
    tree: DirectedTree
    language: str
    source_index: int


@dataclass(frozen=True)
class Rejection:
    """Why a sentence (or a whole language) was dropped."""

    reason: str
    source_index: int = -1


@dataclass(frozen=True)
class CorpusSample:
    language: str
    sentences: tuple[SentenceTree, ...]
    seed: int


def parse_conllu(lines: Iterable[str] | str) -> list[list[TokenRecord]]:
    """Split CONLL-U text into sentences of token records.

    Sentences are blank-line separated; '#' lines are comments.  A token
    line must have exactly 10 tab-separated columns, and word lines must
    carry a non-negative integer HEAD; anything else raises with the
    offending line number.
    """
    if isinstance(lines, str):
        lines = lines.splitlines()
    sentences: list[list[TokenRecord]] = []
    current: list[TokenRecord] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            if current:
                sentences.append(current)
                current = []
            continue
        if line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != N_COLUMNS:
            raise ConlluParseError(
                "expected %d tab-separated columns, got %d" % (N_COLUMNS, len(cols)), lineno
            )
        id_raw = cols[0]
        if not (_WORD_ID.match(id_raw) or _RANGE_ID.match(id_raw) or _EMPTY_ID.match(id_raw)):
            raise ConlluParseError("unrecognized token id %r" % id_raw, lineno)
        head: int | None = None
        if _WORD_ID.match(id_raw):
            head_raw = cols[6]
            if not head_raw.isdigit():
                raise ConlluParseError("word token needs an integer HEAD, got %r" % head_raw, lineno)
            head = int(head_raw)
        current.append(TokenRecord(id_raw, head, cols[3], tuple(cols)))
    if current:
        sentences.append(current)
    return sentences


def parse_conllu_file(path) -> list[list[TokenRecord]]:
    with open(path, encoding="utf-8") as fh:
        return parse_conllu(fh)


def to_tree(tokens: Sequence[TokenRecord], language: str = "", source_index: int = -1,
            punct_policy: str = "reattach") -> SentenceTree | Rejection:
    """Clean one parsed sentence into a directed tree, or say why not.

    punct_policy "reattach" (default) re-hangs dependents of removed PUNCT
    tokens on the punctuation's own head; "discard" leaves them dangling so
    the treeness check rejects the sentence instead.
    """
    if punct_policy not in ("reattach", "discard"):
        raise ValueError("punct_policy must be 'reattach' or 'discard'")
    words = [t for t in tokens if t.is_word]
    if not words:
        return Rejection("empty", source_index)
    ids = [t.word_id for t in words]
    if len(set(ids)) != len(ids):
        return Rejection("not-a-tree", source_index)
    head_of = {t.word_id: t.head for t in words}
    punct_ids = {t.word_id for t in words if t.upos == "PUNCT"}
    survivors = [t for t in words if t.word_id not in punct_ids]
    if not survivors:
        return Rejection("empty", source_index)
    index = {t.word_id: i for i, t in enumerate(survivors)}

    def resolve(h: int) -> int | None:
        seen = set()
        while h != 0 and h in punct_ids:
            if punct_policy == "discard" or h in seen:
                return None
            seen.add(h)
            h = head_of[h]
        return h

    edges = []
    roots = []
    for t in survivors:
        h = resolve(t.head)
        if h is None:
            return Rejection("not-a-tree", source_index)
        if h == 0:
            roots.append(t)
        elif h not in index:
            return Rejection("not-a-tree", source_index)
        else:
            edges.append((index[h], index[t.word_id]))
    if not roots:
        return Rejection("not-a-tree", source_index)
    if len(roots) > 1:
        return Rejection("multiple-roots", source_index)
    try:
        tree = DirectedTree.from_edges(len(survivors), index[roots[0].word_id], edges)
    except TreeInvariantError:
        return Rejection("not-a-tree", source_index)
    return SentenceTree(tree, language, source_index)


def filter_and_sample(trees: Sequence[SentenceTree], rng: np.random.Generator,
                      seed: int = -1, min_n: int = 4, max_n: int = 50,
                      min_sentences: int = 50, cap: int = 1000) -> CorpusSample | Rejection:
    """Apply the size filters, then sample without replacement up to cap.

    All trees must belong to one language (treebanks concatenated first).
    Languages with fewer than min_sentences eligible trees are rejected.
    The sampled sentences keep their original corpus order.
    """
    eligible = [t for t in trees if min_n <= t.tree.n <= max_n]
    if len(eligible) < min_sentences:
        return Rejection("too-few-sentences")
    language = eligible[0].language
    take = min(cap, len(eligible))
    picked = sorted(rng.choice(len(eligible), size=take, replace=False))
    return CorpusSample(language, tuple(eligible[i] for i in picked), seed)


def load_manifest(path) -> dict[str, list[str]]:
    """JSON manifest {language: [conllu paths]}, paths relative to the manifest."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError("manifest must be a JSON object mapping language -> file list")
    base = os.path.dirname(os.path.abspath(path))
    out: dict[str, list[str]] = {}
    for lang, files in raw.items():
        if not isinstance(files, list):
            raise ValueError("manifest entry %r must list file paths" % lang)
        out[lang] = [f if os.path.isabs(f) else os.path.join(base, f) for f in files]
    return out


def scan_ud_treebanks(root) -> dict[str, list[str]]:
    """Build a manifest from a Universal Dependencies release directory.

    Treebank directories follow the UD_<Language>-<Treebank> convention;
    all treebanks of one language are concatenated under that language.
    """
    manifest: dict[str, list[str]] = {}
    for entry in sorted(os.listdir(root)):
        full = os.path.join(root, entry)
        if not (entry.startswith("UD_") and os.path.isdir(full)):
            continue
        language = entry[3:].split("-")[0]
        files = sorted(
            os.path.join(full, f) for f in os.listdir(full) if f.endswith(".conllu")
        )
        if files:
            manifest.setdefault(language, []).extend(files)
    return manifest


SAMPLES_SCHEMA = "language,sentence_index,n,edges"


def write_samples(path, sentences: Iterable[SentenceTree]) -> None:
    """Serialize cleaned trees as delimited text, edges as 'parent>child' pairs."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# %s\n" % SAMPLES_SCHEMA)
        for s in sentences:
            edges = " ".join("%d>%d" % e for e in sorted(s.tree.edges))
            fh.write("%s,%d,%d,%s\n" % (s.language, s.source_index, s.tree.n, edges))


def read_samples(path) -> list[SentenceTree]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            language, idx, n, edgefield = line.split(",")
            n = int(n)
            edges = []
            if edgefield:
                for pair in edgefield.split(" "):
                    p, c = pair.split(">")
                    edges.append((int(p), int(c)))
            root_candidates = set(range(n)) - {c for _, c in edges}
            (root,) = root_candidates
            tree = DirectedTree.from_edges(n, root, edges)
            out.append(SentenceTree(tree, language, int(idx)))
    return out
