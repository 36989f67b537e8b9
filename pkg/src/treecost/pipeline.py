"""Pipeline stages behind the CLI subcommands.

Every stage reads/writes plain comma-separated text with a '#' schema
header, decimal '.', and 12 significant digits, so reruns with identical
inputs and configuration are byte-identical.  Randomness is derived per
(stage, language, sentence) from the global seed by hashing, which makes
each stage independently reproducible.
"""
from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

import numpy as np

from . import conllu, measures, optimizer, samplers, stats, trees
from . import _backend
from .errors import TreecostError

__all__ = [
    "RunConfig",
    "MeasureRow",
    "derive_seed",
    "stage_rng",
    "read_measures",
    "write_measures",
    "run_extrema",
    "run_measure",
    "run_baseline",
    "run_optimize",
    "run_pa",
    "run_pa_sweep",
    "run_compare",
]


@dataclass(frozen=True)
class RunConfig:
    global_seed: int = 1
    manifest: str | None = None
    outdir: str = "out"
    rho: float = 0.9
    sigma: float = 0.075
    epochs: int = 400
    population: int = 100
    record_every: int = 1
    reps: int = 100
    alpha_override: float | None = None
    min_len: int = 4
    max_len: int = 50
    cap: int = 1000
    min_sentences: int = 50
    n_max: int = 50
    punct_policy: str = "reattach"


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from the hashed part tuple (platform independent)."""
    text = "|".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def stage_rng(*parts) -> np.random.Generator:
    return np.random.default_rng(derive_seed(*parts))


class MeasureRow(NamedTuple):
    language: str
    sentence_index: int
    n: int
    h_ks: float
    h_deg: float
    H_ks: float
    H_deg: float
    alpha_hat: float


MEASURES_SCHEMA = "language,sentence_index,n,h_ks,h_deg,H_ks,H_deg,alpha_hat"


def write_measures(path, rows: Sequence[MeasureRow]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# %s\n" % MEASURES_SCHEMA)
        for r in rows:
            fh.write("%s,%d,%d,%.12g,%.12g,%.12g,%.12g,%.12g\n"
                     % (r.language, r.sentence_index, r.n, r.h_ks, r.h_deg,
                        r.H_ks, r.H_deg, r.alpha_hat))


def read_measures(path) -> list[MeasureRow]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            lang, idx, n, hks, hdeg, bks, bdeg, alpha = line.split(",")
            out.append(MeasureRow(lang, int(idx), int(n), float(hks), float(hdeg),
                                  float(bks), float(bdeg), float(alpha)))
    return out


def _write_summary(path, pairs) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for key, value in pairs:
            fh.write("%s=%s\n" % (key, value))


def _extrema_path(cfg: RunConfig) -> str:
    return os.path.join(cfg.outdir, "extrema.csv")


def _ensure_table(cfg: RunConfig) -> measures.EntropyExtremaTable:
    """Load the cached extrema table, building (and caching) it if needed."""
    path = _extrema_path(cfg)
    if os.path.exists(path):
        table = measures.read_extrema_table(path)
        if table.n_max >= cfg.n_max:
            return table
    table = measures.build_extrema_table(cfg.n_max)
    os.makedirs(cfg.outdir, exist_ok=True)
    measures.write_extrema_table(table, path)
    return table


def _measure_rows(sentences: Sequence[conllu.SentenceTree],
                  table: measures.EntropyExtremaTable) -> list[MeasureRow]:
    packed, ns = trees.pack_parents([s.tree for s in sentences])
    h_ks, h_deg = _backend.costs_from_parents(packed, ns)
    big_ks, big_deg = measures.normalize_arrays(h_ks, h_deg, ns, table)
    alphas = samplers.alpha_hats_from_parents(packed, ns)
    return [
        MeasureRow(s.language, s.source_index, int(ns[i]), float(h_ks[i]), float(h_deg[i]),
                   float(big_ks[i]), float(big_deg[i]), float(alphas[i]))
        for i, s in enumerate(sentences)
    ]


def _group_rows(rows: Sequence[MeasureRow]) -> dict[str, list[MeasureRow]]:
    grouped: dict[str, list[MeasureRow]] = {}
    for r in rows:
        grouped.setdefault(r.language, []).append(r)
    return grouped


def run_extrema(cfg: RunConfig) -> dict:
    os.makedirs(cfg.outdir, exist_ok=True)
    table = measures.build_extrema_table(cfg.n_max)
    measures.write_extrema_table(table, _extrema_path(cfg))
    return {"path": _extrema_path(cfg), "rows": len(table.rows)}


def run_measure(cfg: RunConfig) -> dict:
    """Ingest the manifest corpora and emit per-sentence measures and trees."""
    if cfg.manifest is None:
        raise TreecostError("measure needs a manifest")
    manifest = conllu.load_manifest(cfg.manifest)
    os.makedirs(cfg.outdir, exist_ok=True)
    table = _ensure_table(cfg)
    all_rows: list[MeasureRow] = []
    all_sentences: list[conllu.SentenceTree] = []
    failures: dict[str, str] = {}
    kept: dict[str, int] = {}
    for lang in sorted(manifest):
        try:
            cleaned: list[conllu.SentenceTree] = []
            counter = 0
            for path in manifest[lang]:
                for toks in conllu.parse_conllu_file(path):
                    result = conllu.to_tree(toks, lang, counter, cfg.punct_policy)
                    counter += 1
                    if isinstance(result, conllu.SentenceTree):
                        cleaned.append(result)
            seed = derive_seed(cfg.global_seed, "measure", lang)
            sample = conllu.filter_and_sample(
                cleaned, np.random.default_rng(seed), seed=seed, min_n=cfg.min_len,
                max_n=cfg.max_len, min_sentences=cfg.min_sentences, cap=cfg.cap)
            if isinstance(sample, conllu.Rejection):
                failures[lang] = sample.reason
                continue
            rows = _measure_rows(sample.sentences, table)
            all_rows.extend(rows)
            all_sentences.extend(sample.sentences)
            kept[lang] = len(rows)
        except (OSError, TreecostError) as exc:
            failures[lang] = str(exc)
    write_measures(os.path.join(cfg.outdir, "real_measures.csv"), all_rows)
    conllu.write_samples(os.path.join(cfg.outdir, "real_trees.txt"), all_sentences)
    pairs = [("stage", "measure"), ("languages_ok", len(kept)),
             ("languages_failed", len(failures)), ("rows", len(all_rows))]
    pairs += [("kept.%s" % k, v) for k, v in sorted(kept.items())]
    pairs += [("failed.%s" % k, v) for k, v in sorted(failures.items())]
    _write_summary(os.path.join(cfg.outdir, "measure_summary.txt"), pairs)
    return {"kept": kept, "failures": failures, "rows": len(all_rows)}


def _synthetic_outputs(cfg: RunConfig, name: str, sentences, table) -> list[MeasureRow]:
    rows = _measure_rows(sentences, table)
    write_measures(os.path.join(cfg.outdir, "%s_measures.csv" % name), rows)
    conllu.write_samples(os.path.join(cfg.outdir, "%s_trees.txt" % name), sentences)
    return rows


def run_baseline(cfg: RunConfig, measures_path: str | None = None) -> dict:
    """Uniform random trees matched in size to every measured sentence."""
    measures_path = measures_path or os.path.join(cfg.outdir, "real_measures.csv")
    real_rows = read_measures(measures_path)
    os.makedirs(cfg.outdir, exist_ok=True)
    table = _ensure_table(cfg)
    synthetic: list[conllu.SentenceTree] = []
    for r in real_rows:
        rng = stage_rng(cfg.global_seed, "baseline", r.language, r.sentence_index)
        tree = samplers.sample_uniform_directed_tree(r.n, rng)
        synthetic.append(conllu.SentenceTree(tree, r.language, r.sentence_index))
    rows = _synthetic_outputs(cfg, "uniform", synthetic, table)
    _write_summary(os.path.join(cfg.outdir, "baseline_summary.txt"),
                   [("stage", "baseline"), ("rows", len(rows))])
    return {"rows": len(rows)}


def run_optimize(cfg: RunConfig, trees_path: str | None = None) -> dict:
    """Evolve per-language samples of the baseline trees and record trajectories."""
    trees_path = trees_path or os.path.join(cfg.outdir, "uniform_trees.txt")
    sentences = conllu.read_samples(trees_path)
    os.makedirs(cfg.outdir, exist_ok=True)
    table = _ensure_table(cfg)
    by_lang: dict[str, list[conllu.SentenceTree]] = {}
    for s in sentences:
        by_lang.setdefault(s.language, []).append(s)
    config = optimizer.OptimizerConfig(rho=cfg.rho, sigma=cfg.sigma,
                                       epochs=cfg.epochs, record_every=cfg.record_every)
    all_rows: list[MeasureRow] = []
    for lang in sorted(by_lang):
        pool = by_lang[lang]
        rng = stage_rng(cfg.global_seed, "optimize", lang)
        take = min(cfg.population, len(pool))
        picked = sorted(rng.choice(len(pool), size=take, replace=False))
        chosen = [pool[i] for i in picked]
        population = optimizer.population_from_trees([s.tree for s in chosen])
        final, trajectory = optimizer.run(population, config, table, rng)
        optimizer.write_trajectory(
            trajectory, os.path.join(cfg.outdir, "trajectory_%s.csv" % lang))
        packed, ns = trees.pack_codes([m.code for m in final.members])
        parents = _backend.decode_codes(packed, ns)
        evolved = [
            conllu.SentenceTree(trees.tree_from_parent_row(parents[i], int(ns[i])),
                                lang, chosen[i].source_index)
            for i in range(len(final.members))
        ]
        all_rows.extend(_measure_rows(evolved, table))
    write_measures(os.path.join(cfg.outdir, "optimized_measures.csv"), all_rows)
    _write_summary(os.path.join(cfg.outdir, "optimize_summary.txt"),
                   [("stage", "optimize"), ("rows", len(all_rows)),
                    ("epochs", cfg.epochs), ("rho", "%.12g" % cfg.rho),
                    ("sigma", "%.12g" % cfg.sigma)])
    return {"rows": len(all_rows), "languages": len(by_lang)}


def _language_alphas(real_rows: Sequence[MeasureRow],
                     override: float | None) -> dict[str, float]:
    grouped = _group_rows(real_rows)
    if override is not None:
        return {lang: override for lang in grouped}
    return {lang: samplers.language_alpha([r.alpha_hat for r in rows])
            for lang, rows in grouped.items()}


def _pa_sentences(cfg: RunConfig, real_rows, alphas, tag: str) -> list[conllu.SentenceTree]:
    out = []
    for r in real_rows:
        rng = stage_rng(cfg.global_seed, tag, r.language, r.sentence_index)
        tree = samplers.sample_pa_tree(r.n, alphas[r.language], rng)
        out.append(conllu.SentenceTree(tree, r.language, r.sentence_index))
    return out


def run_pa(cfg: RunConfig, measures_path: str | None = None) -> dict:
    """Sublinear preferential-attachment trees matched to the measured sentences."""
    measures_path = measures_path or os.path.join(cfg.outdir, "real_measures.csv")
    real_rows = read_measures(measures_path)
    os.makedirs(cfg.outdir, exist_ok=True)
    table = _ensure_table(cfg)
    alphas = _language_alphas(real_rows, cfg.alpha_override)
    rows = _synthetic_outputs(cfg, "pa", _pa_sentences(cfg, real_rows, alphas, "pa"), table)
    pairs = [("stage", "pa"), ("rows", len(rows))]
    pairs += [("alpha.%s" % lang, "%.12g" % a) for lang, a in sorted(alphas.items())]
    _write_summary(os.path.join(cfg.outdir, "pa_summary.txt"), pairs)
    return {"rows": len(rows), "alphas": alphas}


def _kld_real_vs(real_xy: np.ndarray, synth_xy: np.ndarray,
                 rng: np.random.Generator, reps: int) -> tuple[float, float, int]:
    """Size-matched KLD(real || synth) and the bootstrap zero at that size."""
    m = min(len(real_xy), len(synth_xy))
    real_ds = stats.downsample(real_xy, m, rng) if len(real_xy) > m else real_xy
    synth_ds = stats.downsample(synth_xy, m, rng) if len(synth_xy) > m else synth_xy
    kld = stats.kld_gaussian(stats.fit_gaussian(real_ds), stats.fit_gaussian(synth_ds))
    zero = stats.bootstrap_zero(real_ds, rng, reps)
    return kld, zero, m


def run_pa_sweep(cfg: RunConfig, alphas: Sequence[float],
                 measures_path: str | None = None) -> dict:
    """One matched PA set and KLD-vs-real per language per sweep alpha."""
    measures_path = measures_path or os.path.join(cfg.outdir, "real_measures.csv")
    real_rows = read_measures(measures_path)
    os.makedirs(cfg.outdir, exist_ok=True)
    table = _ensure_table(cfg)
    real_by_lang = _group_rows(real_rows)
    lines = []
    for alpha in alphas:
        tag = "pa-sweep-%.12g" % alpha
        fixed = {lang: float(alpha) for lang in real_by_lang}
        sentences = _pa_sentences(cfg, real_rows, fixed, tag)
        rows = _measure_rows(sentences, table)
        synth_by_lang = _group_rows(rows)
        for lang in sorted(real_by_lang):
            real_xy = np.array([(r.h_ks, r.h_deg) for r in real_by_lang[lang]])
            synth_xy = np.array([(r.h_ks, r.h_deg) for r in synth_by_lang[lang]])
            rng = stage_rng(cfg.global_seed, "pa-sweep-kld", lang, "%.12g" % alpha)
            kld, zero, m = _kld_real_vs(real_xy, synth_xy, rng, cfg.reps)
            lines.append((lang, float(alpha), kld, zero, m))
    path = os.path.join(cfg.outdir, "pa_sweep.csv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# language,alpha,kld_vs_real_nats,zero_baseline_nats,n_used\n")
        for lang, alpha, kld, zero, m in lines:
            fh.write("%s,%.12g,%.12g,%.12g,%d\n" % (lang, alpha, kld, zero, m))
    return {"rows": len(lines), "path": path}


def run_compare(cfg: RunConfig, real_path: str | None = None,
                synthetic: dict[str, str] | None = None) -> dict:
    """Per-language KLDs plus pooled classifiers and paired t per condition."""
    real_path = real_path or os.path.join(cfg.outdir, "real_measures.csv")
    synthetic = synthetic or {}
    real_rows = read_measures(real_path)
    real_by_lang = _group_rows(real_rows)
    os.makedirs(cfg.outdir, exist_ok=True)
    summary_pairs = [("stage", "compare")]
    results: dict[str, dict] = {}
    for cond in sorted(synthetic):
        synth_rows = read_measures(synthetic[cond])
        synth_by_lang = _group_rows(synth_rows)
        langs = sorted(set(real_by_lang) & set(synth_by_lang))
        skipped = sorted(set(real_by_lang) ^ set(synth_by_lang))
        accuracies: dict[str, float] = {}
        for subset, min_n in (("all", 0), ("min10", 10)):
            feats, labels = [], []
            for lang in langs:
                for r in real_by_lang[lang]:
                    if r.n >= min_n:
                        feats.append((r.H_ks, r.H_deg))
                        labels.append(1)
                for r in synth_by_lang[lang]:
                    if r.n >= min_n:
                        feats.append((r.H_ks, r.H_deg))
                        labels.append(0)
            rng = stage_rng(cfg.global_seed, "classifier", cond, subset)
            _, acc = stats.classifier_experiment(np.array(feats), np.array(labels), rng)
            accuracies[subset] = acc
        t_ks = t_deg = float("nan")
        df = 0
        if len(langs) >= 2:
            mean_real_ks = [np.mean([r.H_ks for r in real_by_lang[g]]) for g in langs]
            mean_syn_ks = [np.mean([r.H_ks for r in synth_by_lang[g]]) for g in langs]
            mean_real_deg = [np.mean([r.H_deg for r in real_by_lang[g]]) for g in langs]
            mean_syn_deg = [np.mean([r.H_deg for r in synth_by_lang[g]]) for g in langs]
            t_ks, df = stats.paired_t(mean_real_ks, mean_syn_ks)
            t_deg, _ = stats.paired_t(mean_real_deg, mean_syn_deg)
        per_lang = {}
        for lang in langs:
            real_xy = np.array([(r.h_ks, r.h_deg) for r in real_by_lang[lang]])
            synth_xy = np.array([(r.h_ks, r.h_deg) for r in synth_by_lang[lang]])
            rng = stage_rng(cfg.global_seed, "compare", cond, lang)
            kld, zero, m = _kld_real_vs(real_xy, synth_xy, rng, cfg.reps)
            per_lang[lang] = (kld, zero, m)
            report = os.path.join(cfg.outdir, "compare_%s_%s.txt" % (lang, cond))
            _write_summary(report, [
                ("language", lang),
                ("condition", cond),
                ("n_real", len(real_xy)),
                ("n_synthetic", len(synth_xy)),
                ("n_used", m),
                ("kld_vs_real_nats", "%.12g" % kld),
                ("zero_baseline_nats", "%.12g" % zero),
                ("classifier_accuracy_all", "%.12g" % accuracies["all"]),
                ("classifier_accuracy_min10", "%.12g" % accuracies["min10"]),
                ("paired_t_H_ks", "%.12g" % t_ks),
                ("paired_t_H_deg", "%.12g" % t_deg),
                ("paired_t_df", df),
            ])
        results[cond] = {"per_language": per_lang, "accuracies": accuracies,
                         "paired_t_H_ks": t_ks, "paired_t_H_deg": t_deg, "df": df,
                         "skipped": skipped}
        summary_pairs += [
            ("%s.languages" % cond, len(langs)),
            ("%s.skipped" % cond, ";".join(skipped)),
            ("%s.accuracy_all" % cond, "%.12g" % accuracies["all"]),
            ("%s.accuracy_min10" % cond, "%.12g" % accuracies["min10"]),
            ("%s.paired_t_H_ks" % cond, "%.12g" % t_ks),
            ("%s.paired_t_H_deg" % cond, "%.12g" % t_deg),
            ("%s.paired_t_df" % cond, df),
            ("%s.mean_kld" % cond, "%.12g" % float(np.mean([v[0] for v in per_lang.values()]))),
            ("%s.mean_zero" % cond, "%.12g" % float(np.mean([v[1] for v in per_lang.values()]))),
        ]
    _write_summary(os.path.join(cfg.outdir, "compare_summary.txt"), summary_pairs)
    return results
