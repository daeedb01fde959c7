"""End-to-end discovery pipeline wiring and stage gating."""

import pytest

from vned.errors import ConfigError
from vned.pipeline import cluster_embeddings, run_discovery
from vned.synth import SynthConfig, generate
from vned.vocab import CutoffPolicy


SMALL = SynthConfig(n_entities=3, n_frames=150, embedding_dim=4,
                    unknown_tail_entities=4, seed=9)


@pytest.fixture(scope="module")
def small_ds():
    return generate(SMALL).dataset


class TestStageGating:
    def test_stage1_only_skips_clustering(self, small_ds):
        out = run_discovery(small_ds, k=0, stages="1")  # bad k must not matter
        assert out.cleansed is None and out.refined is None
        assert set(out.stage1) == set(small_ds.detection_ids())
        assert "stage1" in out.timings and "stage2" not in out.timings

    def test_stage12_requires_overclustering(self, small_ds):
        with pytest.raises(ConfigError, match="over-clustering"):
            run_discovery(small_ds, k=2, stages="12", policy=CutoffPolicy.top_k(3))

    def test_bad_stage_string(self, small_ds):
        with pytest.raises(ConfigError, match="stages"):
            run_discovery(small_ds, stages="13")

    def test_labels_for_guards_missing_stages(self, small_ds):
        out = run_discovery(small_ds, k=8, stages="1")
        with pytest.raises(ValueError):
            out.labels_for("12")
        with pytest.raises(ValueError):
            out.labels_for("123")
        assert out.final_labels() == out.stage1

    def test_full_run_produces_all_three_label_sets(self, small_ds):
        out = run_discovery(small_ds, k=8, stages="123", seed=1)
        ids = set(small_ds.detection_ids())
        for stages in ("1", "12", "123"):
            assert set(out.labels_for(stages)) == ids
        assert out.final_labels() == out.labels_for("123")
        assert set(out.timings) == {"vocabulary", "stage1", "stage2", "stage3"}
        assert out.prototypes  # stage 3 ran

    def test_refine_touches_only_most_frequent_labels(self, small_ds):
        out = run_discovery(small_ds, k=8, stages="123", seed=1)
        mf = out.refined.most_frequent
        for det_id, before in out.cleansed.labels.items():
            after = out.refined.labels[det_id]
            if before != mf:
                assert after == before
            if det_id in out.refined.reassigned:
                assert before == mf and after != mf


class TestDeterminismAndOverrides:
    def test_same_seed_same_labels(self, small_ds):
        a = run_discovery(small_ds, k=8, seed=5)
        b = run_discovery(small_ds, k=8, seed=5)
        assert a.stage1 == b.stage1
        assert a.labels_for("123") == b.labels_for("123")

    def test_kmeans_method(self, small_ds):
        out = run_discovery(small_ds, k=8, method="kmeans", seed=2)
        assert set(out.labels_for("123")) == set(small_ds.detection_ids())

    def test_unknown_method_rejected(self, small_ds):
        with pytest.raises(ConfigError):
            run_discovery(small_ds, k=8, method="spectral")

    def test_vocab_override_is_used(self, small_ds):
        from vned.vocab import build_vocabulary

        vocab = build_vocabulary(small_ds.mentions, CutoffPolicy.top_k(1))
        out = run_discovery(small_ds, k=8, vocab=vocab)
        assert out.vocab.entities == vocab.entities
        assert set(out.stage1.values()) <= set(vocab.classes())

    def test_cluster_embeddings_dispatch(self, small_ds):
        emb = dict(list(small_ds.embeddings_by_id().items())[:20])
        ward = cluster_embeddings(emb, 4, "ward", seed=0)
        km = cluster_embeddings(emb, 4, "kmeans", seed=0)
        assert set(ward.assignment) == set(km.assignment) == set(emb)
        with pytest.raises(ConfigError):
            cluster_embeddings(emb, 4, "dbscan", seed=0)
