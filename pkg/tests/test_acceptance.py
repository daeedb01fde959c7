"""Acceptance suite: one criterion per test, one printed verdict line each.

Every criterion is checked against an independent oracle or a frozen
expectation; none of the thresholds here may be loosened to make a
failing implementation pass.
"""

import dataclasses

import numpy as np

from conftest import verdict
from vned.baselines import (
    limsi_assign,
    ovr_loss_and_grad,
    random_baseline,
    softmax_loss_and_grad,
)
from vned.bipartite import build_graphs
from vned.cli import main as cli_main
from vned.clustering import agglomerative_ward, kmeans
from vned.core import BoundingBox
from vned.metrics import confusion, evaluate_labels, iou, metrics, sweep_clusters
from vned.pipeline import run_discovery
from vned.prototypes import compute_prototypes, find_most_frequent, refine
from vned.synth import (
    SynthConfig,
    brute_force_kmeans,
    generate,
    penny_config,
    reference_ward,
    unknown_dominant_config,
)
from vned.vocab import (
    CutoffPolicy,
    EntityVocabulary,
    build_vocabulary,
    normalize_mentions,
)


def _stage_report(result, gt, stages):
    return evaluate_labels(gt, result.labels_for(stages), result.vocab)


# ---------------------------------------------------------------------------
# 1. Stage ordering on the canonical benchmark


def test_c01_stage_ordering(canonical_run, canonical_gt):
    result, elapsed = canonical_run
    gt = canonical_gt
    r1 = _stage_report(result, gt, "1")
    r12 = _stage_report(result, gt, "12")
    r123 = _stage_report(result, gt, "123")
    rand = evaluate_labels(
        gt, random_baseline(sorted(gt), result.vocab, seed=42), result.vocab
    )

    ordering = (
        rand.macro_accuracy < r1.macro_accuracy < r12.macro_accuracy
        and r123.macro_accuracy >= r12.macro_accuracy
    )
    tradeoff = (
        r123.macro_recall >= r12.macro_recall - 1e-12
        and r123.macro_precision <= r12.macro_precision + 1e-12
    )
    ok = ordering and tradeoff and elapsed < 60.0
    verdict(
        "C1 stage ordering",
        ok,
        f"macro acc random={rand.macro_accuracy:.3f} < s1={r1.macro_accuracy:.3f} "
        f"< s12={r12.macro_accuracy:.3f} <= s123={r123.macro_accuracy:.3f}; "
        f"recall {r12.macro_recall:.3f}->{r123.macro_recall:.3f}, "
        f"precision {r12.macro_precision:.3f}->{r123.macro_precision:.3f}; "
        f"runtime {elapsed:.1f}s < 60s",
    )


# ---------------------------------------------------------------------------
# 2. Prototype refinement rebalances the unknown-dominant regime


def test_c02_rebalancing_unknown_dominant():
    seeds = (11, 12, 13, 14, 15)
    named = unknown_dominant_config().named_entities()
    unknown = "unknown"
    s12_acc = {name: [] for name in (*named, unknown)}
    s123_acc = {name: [] for name in (*named, unknown)}
    for seed in seeds:
        res = generate(unknown_dominant_config(seed))
        vocab = build_vocabulary(res.dataset.mentions, CutoffPolicy.top_k(6))
        out = run_discovery(res.dataset, k=20, seed=seed, stages="123", vocab=vocab)
        gt = {d.id: d.gt_label for d in res.dataset.detections}
        r12 = _stage_report(out, gt, "12")
        r123 = _stage_report(out, gt, "123")
        for name in (*named, unknown):
            s12_acc[name].append(r12.accuracy_for(name))
            s123_acc[name].append(r123.accuracy_for(name))

    deltas = {
        name: float(np.mean(s123_acc[name]) - np.mean(s12_acc[name]))
        for name in (*named, unknown)
    }
    named_ok = all(deltas[name] >= -1e-12 for name in named)
    strict = sum(deltas[name] > 1e-12 for name in named)
    unknown_ok = deltas[unknown] <= 1e-12
    ok = named_ok and strict >= 4 and unknown_ok
    verdict(
        "C2 unknown-dominant rebalancing",
        ok,
        f"5-seed mean per-class gains s2->s3: all {len(named)} named >= 0 "
        f"({named_ok}), {strict}/{len(named)} strictly positive, "
        f"unknown delta {deltas[unknown]:+.4f} <= 0",
    )


# ---------------------------------------------------------------------------
# 3. Clustering against enumeration references


def test_c03_clustering_matches_references():
    rng = np.random.default_rng(1234)
    km_ok = True
    worst_rel = 0.0
    for n, k in [(4, 2), (6, 2), (6, 3), (8, 3), (8, 2), (5, 3)]:
        centers = rng.normal(scale=50.0, size=(k, 3))
        sizes = [n // k + (1 if i < n % k else 0) for i in range(k)]
        X = np.vstack(
            [c + rng.normal(scale=0.5, size=(s, 3)) for c, s in zip(centers, sizes)]
        )
        emb = {f"p{i}": row for i, row in enumerate(X)}
        ours = kmeans(emb, k, seed=0).objective
        _, best = brute_force_kmeans(X, k)
        rel = abs(ours - best) / max(best, 1e-12)
        worst_rel = max(worst_rel, rel)
        km_ok = km_ok and ours <= best * (1 + 1e-9) + 1e-12

    ward_ok = True
    for trial in range(20):
        n = int(rng.integers(6, 65))
        k = int(rng.integers(2, 9))
        k = min(k, n)
        X = rng.normal(size=(n, int(rng.integers(2, 6))))
        emb = {f"p{i}": row for i, row in enumerate(X)}
        ours = agglomerative_ward(emb, k)
        flat = np.array([ours.assignment[f"p{i}"] for i in range(n)])
        if not np.array_equal(flat, reference_ward(X, k)):
            ward_ok = False
            break

    ok = km_ok and ward_ok
    verdict(
        "C3 clustering vs references",
        ok,
        f"k-means optimal on 6 fixed instances (worst rel err {worst_rel:.2e} "
        f"<= 1e-9); ward identical to naive reference on 20 random instances: "
        f"{ward_ok}",
    )


# ---------------------------------------------------------------------------
# 4. Lloyd iterations never increase the objective


def test_c04_kmeans_monotone():
    rng = np.random.default_rng(777)
    violations = 0
    for trial in range(100):
        n = int(rng.integers(10, 61))
        d = int(rng.integers(2, 9))
        k = int(rng.integers(2, min(9, n + 1)))
        X = rng.normal(size=(n, d))
        emb = {f"p{i}": row for i, row in enumerate(X)}
        history = kmeans(emb, k, seed=trial).objective_history
        tol = 1e-9 * max(1.0, history[0])
        if np.any(np.diff(history) > tol):
            violations += 1
    verdict(
        "C4 k-means monotonicity",
        violations == 0,
        f"objective non-increasing on 100 random instances ({violations} violations)",
    )


# ---------------------------------------------------------------------------
# 5. Refinement invariants over randomized inputs


def test_c05_refine_invariants():
    rng = np.random.default_rng(555)
    names = [f"e{j}" for j in range(6)]
    failures = 0
    for _ in range(1000):
        n = int(rng.integers(2, 50))
        d = int(rng.integers(1, 8))
        emb = {f"d{i}": rng.normal(size=d) for i in range(n)}
        labels = {f"d{i}": names[int(rng.integers(len(names)))] for i in range(n)}
        protos = compute_prototypes(emb, labels)
        mf = find_most_frequent(labels)
        out = refine(labels, protos, emb, most_frequent=mf)

        untouched = all(
            out.labels[i] == labels[i] for i in labels if labels[i] != mf
        )
        count_before = sum(1 for v in labels.values() if v == mf)
        count_after = sum(1 for v in out.labels.values() if v == mf)
        shrunk = count_after <= count_before
        targets_only = all(labels[i] == mf for i in out.reassigned)
        again = refine(out.labels, protos, emb, most_frequent=mf)
        idempotent = again.labels == out.labels and not again.reassigned
        if not (untouched and shrunk and targets_only and idempotent):
            failures += 1
    verdict(
        "C5 refinement invariants",
        failures == 0,
        "1000 randomized cases: non-target labels untouched, most-frequent "
        f"count never grows, second pass is a no-op ({failures} failures)",
    )


# ---------------------------------------------------------------------------
# 6. Metric implementations against hand-computed values


def test_c06_metric_oracles():
    gt, pred = {}, {}
    i = 0
    for g, p, n in [("A", "A", 3), ("A", "B", 1), ("B", "A", 2), ("B", "B", 4)]:
        for _ in range(n):
            gt[f"x{i}"], pred[f"x{i}"] = g, p
            i += 1
    report = metrics(confusion(gt, pred, ["A", "B"]))
    micro_ok = abs(report.micro_accuracy - 0.7) <= 1e-12
    macro_p_ok = abs(report.macro_precision - 0.7) <= 1e-12

    box_val = iou(BoundingBox(0, 0, 10, 10), BoundingBox(5, 5, 15, 15))
    iou_ok = (
        abs(box_val - 1 / 7) <= 1e-12
        and iou(BoundingBox(0, 0, 10, 10), BoundingBox(0, 0, 10, 10)) == 1.0
        and iou(BoundingBox(0, 0, 10, 10), BoundingBox(20, 20, 30, 30)) == 0.0
    )
    ok = micro_ok and macro_p_ok and iou_ok
    verdict(
        "C6 metric oracles",
        ok,
        f"confusion [[3,1],[2,4]] -> micro {report.micro_accuracy:.6f}=0.7, "
        f"macro precision {report.macro_precision:.6f}=0.7; "
        f"iou overlap case {box_val:.6f}=1/7",
    )


# ---------------------------------------------------------------------------
# 7. Random baseline lands at chance level


def test_c07_random_baseline_calibration():
    entities = tuple(f"name{j}" for j in range(6))
    vocab = EntityVocabulary(
        entities=entities, frequencies={}, unknown_name="unknown", normalization={}
    )
    classes = vocab.classes()
    rng = np.random.default_rng(8)
    ids = [f"d{i}" for i in range(100_000)]
    gt = {i: classes[int(c)] for i, c in zip(ids, rng.integers(len(classes), size=len(ids)))}
    pred = random_baseline(ids, vocab, seed=0)
    macro = metrics(confusion(gt, pred, classes)).macro_accuracy
    expected = 1.0 / len(classes)
    ok = abs(macro - expected) <= 0.01
    verdict(
        "C7 random-baseline calibration",
        ok,
        f"macro accuracy {macro:.4f} within 1/7={expected:.4f} +- 0.01 "
        "over 100000 draws",
    )


# ---------------------------------------------------------------------------
# 8. Over-clustering plateau in k


def test_c08_overclustering_plateau(canonical_synth, canonical_run, canonical_gt):
    result, _ = canonical_run
    n_entities = len(result.vocab.entities)
    assert n_entities == 7
    emb = canonical_synth.dataset.embeddings_by_id()
    k_values = list(range(n_entities, 4 * n_entities + 1))
    reports = sweep_clusters(
        emb, result.weak, canonical_gt, result.vocab, k_values, method="ward"
    )
    plateau = [reports[k].macro_accuracy for k in k_values if k >= 2 * n_entities]
    spread = max(plateau) - min(plateau)
    lowest = reports[k_values[0]].macro_accuracy
    mean_plateau = float(np.mean(plateau))
    ok = spread <= 0.05 and lowest < mean_plateau
    verdict(
        "C8 over-clustering plateau",
        ok,
        f"macro acc spread {spread:.4f} <= 0.05 for k in [{2*n_entities},"
        f"{k_values[-1]}]; k={k_values[0]} gives {lowest:.4f} "
        f"< plateau mean {mean_plateau:.4f}",
    )


# ---------------------------------------------------------------------------
# 9. Systematically under-mentioned entity (penny mode)


def test_c09_penny_mode():
    cfg = penny_config(seed=42)
    res = generate(cfg)
    vocab = build_vocabulary(res.dataset.mentions, CutoffPolicy.top_k(7))
    out = run_discovery(res.dataset, k=20, seed=42, stages="12", vocab=vocab)
    gt = {d.id: d.gt_label for d in res.dataset.detections}
    r1 = _stage_report(out, gt, "1")
    r12 = _stage_report(out, gt, "12")

    suppressed = cfg.penny_entity
    others = [n for n in cfg.named_entities() if n != suppressed]
    suppressed_ok = r12.accuracy_for(suppressed) < 0.1
    others_ok = all(r12.accuracy_for(n) > r1.accuracy_for(n) for n in others)
    ok = suppressed_ok and others_ok
    verdict(
        "C9 penny mode",
        ok,
        f"suppressed '{suppressed}' stage-2 accuracy "
        f"{r12.accuracy_for(suppressed):.3f} < 0.1 while the other "
        f"{len(others)} named classes all improve over stage 1",
    )


# ---------------------------------------------------------------------------
# 10. Comparison with direct-matching + clustering (LIMSI-style)


def test_c10_limsi_comparison(canonical_synth, canonical_run, canonical_gt):
    result, _ = canonical_run
    ds = canonical_synth.dataset
    normalized = normalize_mentions(ds.mentions, result.vocab)
    graphs = build_graphs(dataclasses.replace(ds, mentions=tuple(normalized)))
    limsi = limsi_assign(ds, result.vocab, graphs, k=20, seed=42)
    limsi_recall = evaluate_labels(canonical_gt, limsi.labels, result.vocab).macro_recall
    ours_recall = _stage_report(result, canonical_gt, "123").macro_recall
    recall_ok = ours_recall >= limsi_recall - 1e-12

    clean_cfg = SynthConfig(
        n_entities=7, n_frames=400, faces_per_frame=(1, 1), p_mention=1.0,
        p_spurious=0.0, unknown_tail_entities=0, seed=5,
    )
    clean = generate(clean_cfg)
    clean_vocab = build_vocabulary(clean.dataset.mentions, CutoffPolicy.top_k(7))
    clean_norm = normalize_mentions(clean.dataset.mentions, clean_vocab)
    clean_graphs = build_graphs(
        dataclasses.replace(clean.dataset, mentions=tuple(clean_norm))
    )
    clean_limsi = limsi_assign(clean.dataset, clean_vocab, clean_graphs, k=8)
    clean_gt = {d.id: d.gt_label for d in clean.dataset.detections}
    direct = clean_limsi.direct_ids
    direct_acc = (
        sum(clean_limsi.labels[i] == clean_gt[i] for i in direct) / len(direct)
        if direct else 0.0
    )
    clean_ok = len(direct) == len(clean.dataset.detections) and direct_acc == 1.0

    ok = recall_ok and clean_ok
    verdict(
        "C10 direct-matching comparison",
        ok,
        f"canonical macro recall ours {ours_recall:.4f} >= direct-matching "
        f"{limsi_recall:.4f}; noise-free single-mention run direct-matches "
        f"{len(direct)}/{len(clean.dataset.detections)} detections at "
        f"accuracy {direct_acc:.4f}",
    )


# ---------------------------------------------------------------------------
# 11. End-to-end CLI determinism


def test_c11_cli_determinism(tmp_path):
    data = tmp_path / "data"
    run_a = tmp_path / "a"
    run_b = tmp_path / "b"
    assert cli_main(["synth", "--preset", "canonical", "--out-dir", str(data)]) == 0
    argv = [
        "discover",
        "--detections", str(data / "detections.jsonl"),
        "--mentions", str(data / "mentions.jsonl"),
        "--k", "20", "--seed", "42",
    ]
    assert cli_main(argv + ["--out-dir", str(run_a)]) == 0
    assert cli_main(argv + ["--out-dir", str(run_b)]) == 0
    names = ("labels_stage1.jsonl", "labels_stage12.jsonl", "labels_stage123.jsonl")
    identical = all(
        (run_a / name).read_bytes() == (run_b / name).read_bytes() for name in names
    )
    verdict(
        "C11 CLI determinism",
        identical,
        "discover run twice on the canonical dataset: all three label files "
        "byte-identical",
    )


# ---------------------------------------------------------------------------
# 12. Trainer gradients against finite differences


def test_c12_trainer_gradients():
    rng = np.random.default_rng(2024)
    X = rng.normal(size=(5, 4))
    W = rng.normal(scale=0.3, size=(3, 4))
    b = rng.normal(scale=0.1, size=3)
    Y = (rng.random((5, 3)) < 0.5).astype(float)
    y_idx = rng.integers(3, size=5)
    h = 1e-6

    def fd(loss_fn):
        gW = np.zeros_like(W)
        for idx in np.ndindex(W.shape):
            Wp, Wm = W.copy(), W.copy()
            Wp[idx] += h
            Wm[idx] -= h
            gW[idx] = (loss_fn(Wp, b) - loss_fn(Wm, b)) / (2 * h)
        gb = np.zeros_like(b)
        for j in range(b.shape[0]):
            bp, bm = b.copy(), b.copy()
            bp[j] += h
            bm[j] -= h
            gb[j] = (loss_fn(W, bp) - loss_fn(W, bm)) / (2 * h)
        return gW, gb

    def max_rel(analytic, numeric):
        return float(np.max(np.abs(analytic - numeric) / np.maximum(np.abs(numeric), 1e-6)))

    _, gW, gb = ovr_loss_and_grad(W, b, X, Y, 1e-4)
    fW, fb = fd(lambda w, bb: ovr_loss_and_grad(w, bb, X, Y, 1e-4)[0])
    ovr_err = max(max_rel(gW, fW), max_rel(gb, fb))

    _, gW, gb = softmax_loss_and_grad(W, b, X, y_idx, 1e-4)
    fW, fb = fd(lambda w, bb: softmax_loss_and_grad(w, bb, X, y_idx, 1e-4)[0])
    sm_err = max(max_rel(gW, fW), max_rel(gb, fb))

    ok = ovr_err < 1e-4 and sm_err < 1e-4
    verdict(
        "C12 trainer gradients",
        ok,
        f"central finite differences on fixed 5-sample batches: "
        f"ovr rel err {ovr_err:.2e}, softmax rel err {sm_err:.2e} (tol 1e-4)",
    )
