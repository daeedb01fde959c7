"""Command-line front end.

Subcommands: synth / discover / baseline / eval / sweep / report. All
outputs land under --out-dir with fixed names so runs are comparable:
labels_stage1.jsonl, labels_stage12.jsonl, labels_stage123.jsonl,
report.json, confusion.csv, sweep.csv, manifest.json.

Settings resolve as: built-in defaults < config file < command-line flags.
Exit codes: 0 success, 1 usage/config error, 2 data error, 3 internal.
"""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import sys
import time
from pathlib import Path
from typing import Mapping, Sequence

try:
    import tomllib  # py311+
except ModuleNotFoundError:  # pragma: no cover - py310 path
    import tomli as tomllib

from . import __version__
from .baselines import (
    TrainConfig,
    chronological_split,
    limsi_assign,
    random_baseline,
    train_multilabel_weak,
    train_oracle,
)
from .bipartite import WindowPolicy, build_graphs, weak_labels
from .core import (
    canonical_json,
    load_dataset,
    read_mentions,
    write_detections,
    write_mentions,
)
from .errors import ConfigError, DataError, DiscoveryError, EvaluationError
from .metrics import confusion, match_predictions_to_gt, metrics, sweep_clusters
from .pipeline import STAGE_CHOICES, run_discovery
from .synth import (
    SynthConfig,
    canonical_config,
    generate,
    penny_config,
    unknown_dominant_config,
)
from .vocab import (
    DEFAULT_FUZZY_THRESHOLD,
    CutoffPolicy,
    EntityVocabulary,
    build_vocabulary,
    load_taxonomy,
    normalize_mentions,
)

log = logging.getLogger("vned.cli")

_SYNTH_PRESETS = {
    "canonical": canonical_config,
    "unknown-dominant": unknown_dominant_config,
    "penny": penny_config,
}


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as ConfigError (exit 1, not 2)."""

    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# Small shared helpers

def _load_config_file(path: str | Path) -> dict:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    if p.suffix == ".toml":
        with open(p, "rb") as fh:
            return tomllib.load(fh)
    try:
        with open(p, encoding="utf-8") as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}: invalid JSON config: {exc.msg}") from exc
    if not isinstance(payload, dict):
        raise ConfigError(f"{p}: config must be a JSON object")
    return payload


def _check_keys(section: Mapping, allowed: set[str], where: str) -> None:
    extra = sorted(set(section) - allowed)
    if extra:
        raise ConfigError(f"unknown {where} key(s): {', '.join(extra)}")


def _require_file(path: str | Path, what: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise DataError(f"{what} file not found: {p}")
    return p


def _sha256(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_labels(path: str | Path, labels: Mapping[str, str]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for det_id in sorted(labels):
            fh.write(canonical_json(
                {"schema": 1, "id": det_id, "label": labels[det_id]}) + "\n")


def read_labels(path: str | Path) -> dict[str, str]:
    from .core import _parse_jsonl  # shares line-level error reporting

    labels: dict[str, str] = {}
    for line_number, record in _parse_jsonl(path):
        for key in ("schema", "id", "label"):
            if key not in record:
                raise DataError(f"{path}:{line_number}: missing key '{key}'")
        labels[str(record["id"])] = str(record["label"])
    if not labels:
        raise DataError(f"{path}: no label records")
    return labels


def _write_manifest(out_dir: Path, payload: dict, name: str = "manifest.json") -> Path:
    path = out_dir / name
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    return path


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# synth

_SYNTH_KEYS = {f.name for f in dataclasses.fields(SynthConfig)} | {"preset"}


def _resolve_synth_config(args) -> SynthConfig:
    base = _SYNTH_PRESETS["canonical"]()
    file_cfg: dict = {}
    if args.config:
        file_cfg = _load_config_file(args.config)
        _check_keys(file_cfg, _SYNTH_KEYS, "synth config")
    preset = args.preset or file_cfg.pop("preset", None)
    if preset is not None:
        if preset not in _SYNTH_PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; "
                              f"choose from {sorted(_SYNTH_PRESETS)}")
        base = _SYNTH_PRESETS[preset]()
    if "faces_per_frame" in file_cfg:
        raw = file_cfg["faces_per_frame"]
        if not (isinstance(raw, (list, tuple)) and len(raw) == 2):
            raise ConfigError("faces_per_frame must be a [lo, hi] pair")
        file_cfg["faces_per_frame"] = (int(raw[0]), int(raw[1]))
    cfg = dataclasses.replace(base, **file_cfg)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    return cfg


def cmd_synth(args) -> int:
    cfg = _resolve_synth_config(args)
    cfg.validate()  # fail before any file is touched
    result = generate(cfg)
    out = _out_dir(args)

    write_detections(out / "detections.jsonl", result.dataset.detections)
    write_mentions(out / "mentions.jsonl", result.dataset.mentions)
    with open(out / "prototypes.jsonl", "w", encoding="utf-8") as fh:
        for name in sorted(result.prototypes):
            fh.write(canonical_json({
                "schema": 1,
                "entity": name,
                "prototype": [float(v) for v in result.prototypes[name]],
            }) + "\n")

    manifest = {
        "schema": 1,
        "command": "synth",
        "version": __version__,
        "config": dataclasses.asdict(cfg),
        "counts": {
            "detections": len(result.dataset.detections),
            "mentions": len(result.dataset.mentions),
            "identities": len(result.prototypes),
        },
        "outputs": ["detections.jsonl", "mentions.jsonl", "prototypes.jsonl"],
    }
    manifest["config"]["faces_per_frame"] = list(cfg.faces_per_frame)
    _write_manifest(out, manifest)
    print(json.dumps(manifest, indent=2))
    return 0


# ---------------------------------------------------------------------------
# discover / baseline shared settings

_DISCOVER_DEFAULTS = {
    "seed": 0,
    "stages": "123",
    "detections": None,
    "mentions": None,
    "taxonomy": None,
    "policy": "min_fraction:0.1",
    "fuzzy_threshold": DEFAULT_FUZZY_THRESHOLD,
    "window_known": 1,
    "window_unknown": 1,
    "dedup": True,
    "method": "ward",
    "k": 20,
}


def _resolve_discover_settings(args) -> dict:
    settings = dict(_DISCOVER_DEFAULTS)
    if getattr(args, "config", None):
        cfg = _load_config_file(args.config)
        _check_keys(cfg, {"seed", "stages", "paths", "vocabulary", "window",
                          "cluster"}, "config")
        settings["seed"] = cfg.get("seed", settings["seed"])
        settings["stages"] = str(cfg.get("stages", settings["stages"]))
        paths = cfg.get("paths", {})
        _check_keys(paths, {"detections", "mentions", "taxonomy"}, "paths")
        for key in ("detections", "mentions", "taxonomy"):
            if key in paths:
                settings[key] = paths[key]
        vocab_cfg = cfg.get("vocabulary", {})
        _check_keys(vocab_cfg, {"policy", "fuzzy_threshold"}, "vocabulary")
        settings["policy"] = vocab_cfg.get("policy", settings["policy"])
        settings["fuzzy_threshold"] = vocab_cfg.get(
            "fuzzy_threshold", settings["fuzzy_threshold"])
        window = cfg.get("window", {})
        _check_keys(window, {"known", "unknown", "dedup"}, "window")
        settings["window_known"] = window.get("known", settings["window_known"])
        settings["window_unknown"] = window.get("unknown", settings["window_unknown"])
        settings["dedup"] = window.get("dedup", settings["dedup"])
        cluster = cfg.get("cluster", {})
        _check_keys(cluster, {"method", "k"}, "cluster")
        settings["method"] = cluster.get("method", settings["method"])
        settings["k"] = cluster.get("k", settings["k"])

    for flag, key in (
        ("seed", "seed"), ("stages", "stages"), ("detections", "detections"),
        ("mentions", "mentions"), ("taxonomy", "taxonomy"), ("policy", "policy"),
        ("fuzzy_threshold", "fuzzy_threshold"), ("window_known", "window_known"),
        ("window_unknown", "window_unknown"), ("method", "method"), ("k", "k"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            settings[key] = value
    if getattr(args, "no_dedup", False):
        settings["dedup"] = False

    if not settings["detections"] or not settings["mentions"]:
        raise ConfigError("detections and mentions paths are required "
                          "(flags or [paths] in the config file)")
    if settings["stages"] not in STAGE_CHOICES:
        raise ConfigError(f"stages must be one of {STAGE_CHOICES}")
    if settings["method"] not in ("ward", "kmeans"):
        raise ConfigError("cluster method must be 'ward' or 'kmeans'")
    return settings


def _load_inputs(settings):
    _require_file(settings["detections"], "detections")
    _require_file(settings["mentions"], "mentions")
    if settings.get("taxonomy"):
        _require_file(settings["taxonomy"], "taxonomy")
    ds = load_dataset(settings["detections"], settings["mentions"])
    policy = CutoffPolicy.parse(str(settings["policy"]))
    window = WindowPolicy(
        w_known=int(settings["window_known"]),
        w_unknown=int(settings["window_unknown"]),
        dedup_per_graph=bool(settings["dedup"]),
    )
    window.validate()
    return ds, policy, window


def _input_hashes(settings) -> dict[str, str]:
    hashes = {
        "detections": _sha256(settings["detections"]),
        "mentions": _sha256(settings["mentions"]),
    }
    if settings.get("taxonomy"):
        hashes["taxonomy"] = _sha256(settings["taxonomy"])
    return hashes


def cmd_discover(args) -> int:
    settings = _resolve_discover_settings(args)
    out = _out_dir(args)
    ds, policy, window = _load_inputs(settings)

    vocab = build_vocabulary(ds.mentions, policy)
    taxonomy = None
    if settings["taxonomy"]:
        taxonomy = load_taxonomy(settings["taxonomy"], vocab)

    result = run_discovery(
        ds,
        policy=policy,
        window=window,
        method=settings["method"],
        k=int(settings["k"]),
        seed=int(settings["seed"]),
        stages=settings["stages"],
        taxonomy=taxonomy,
        fuzzy_threshold=int(settings["fuzzy_threshold"]),
        vocab=vocab,
    )

    written = []
    write_labels(out / "labels_stage1.jsonl", result.stage1)
    written.append("labels_stage1.jsonl")
    if result.cleansed is not None:
        write_labels(out / "labels_stage12.jsonl", result.cleansed.labels)
        written.append("labels_stage12.jsonl")
    if result.refined is not None:
        write_labels(out / "labels_stage123.jsonl", result.refined.labels)
        written.append("labels_stage123.jsonl")

    manifest = {
        "schema": 1,
        "command": "discover",
        "version": __version__,
        "settings": settings,
        "inputs": _input_hashes(settings),
        "vocabulary": {
            "entities": list(vocab.entities),
            "unknown": vocab.unknown_name,
        },
        "timings": {k: round(v, 4) for k, v in result.timings.items()},
        "outputs": written,
    }
    _write_manifest(out, manifest)
    for name in written:
        print(f"wrote {out / name}")
    print(f"entities: {', '.join(vocab.entities)} (+ {vocab.unknown_name})")
    return 0


# ---------------------------------------------------------------------------
# baseline

def cmd_baseline(args) -> int:
    settings = _resolve_discover_settings(args)
    out = _out_dir(args)
    ds, policy, window = _load_inputs(settings)

    vocab = build_vocabulary(ds.mentions, policy)
    taxonomy = load_taxonomy(settings["taxonomy"], vocab) if settings["taxonomy"] else None
    normalized = normalize_mentions(ds.mentions, vocab, taxonomy=taxonomy,
                                    threshold=int(settings["fuzzy_threshold"]))
    ds_norm = dataclasses.replace(ds, mentions=tuple(normalized))
    graphs = build_graphs(ds_norm, window=window, unknown_name=vocab.unknown_name)
    seed = int(settings["seed"])

    train_cfg = TrainConfig(
        epochs=args.epochs, batch_size=args.batch_size,
        learning_rate=args.learning_rate, seed=seed,
    )

    name = args.baseline
    if name == "limsi":
        labels = limsi_assign(ds, vocab, graphs, k=int(settings["k"]),
                              seed=seed, method=settings["method"]).labels
    elif name == "random":
        labels = random_baseline(ds.detection_ids(), vocab, seed=seed)
    elif name in ("weak", "oracle"):
        train_ids, _ = chronological_split(ds)
        emb = ds.embeddings_by_id()
        train_emb = {i: emb[i] for i in train_ids}
        if name == "weak":
            weak = weak_labels(graphs, all_detection_ids=ds.detection_ids())
            model, _ = train_multilabel_weak(
                train_emb, {i: weak[i] for i in train_ids}, vocab, train_cfg)
        else:
            gt = {d.id: d.gt_label for d in ds.detections}
            try:
                model, _ = train_oracle(
                    train_emb, {i: gt[i] for i in train_ids}, vocab, train_cfg)
            except ValueError as exc:
                raise DataError(str(exc)) from exc
        labels = model.predict(emb)
        with open(out / f"model_{name}.json", "w", encoding="utf-8") as fh:
            json.dump(model.to_json_dict(), fh)
            fh.write("\n")
    else:  # argparse choices guard this
        raise ConfigError(f"unknown baseline {name!r}")

    path = out / f"labels_{name}.jsonl"
    write_labels(path, labels)
    manifest = {
        "schema": 1,
        "command": "baseline",
        "baseline": name,
        "version": __version__,
        "settings": settings,
        "inputs": _input_hashes(settings),
        "outputs": [path.name],
    }
    _write_manifest(out, manifest, name=f"manifest_{name}.json")
    print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------------------
# eval

def _vocab_for_eval(args, labels_path: Path) -> EntityVocabulary:
    manifest_path = Path(args.manifest) if args.manifest else labels_path.parent / "manifest.json"
    if manifest_path.exists():
        with open(manifest_path, encoding="utf-8") as fh:
            manifest = json.load(fh)
        entities = manifest.get("vocabulary", {}).get("entities")
        unknown = manifest.get("vocabulary", {}).get("unknown", "unknown")
        if entities:
            return EntityVocabulary(
                entities=tuple(entities),
                frequencies={},
                unknown_name=unknown,
                normalization={},
            )
    if args.mentions:
        policy = CutoffPolicy.parse(args.policy or "min_fraction:0.1")
        return build_vocabulary(read_mentions(args.mentions), policy)
    raise ConfigError(
        "cannot determine the vocabulary: pass --manifest, or --mentions "
        "(with optional --policy) to rebuild it")


def cmd_eval(args) -> int:
    labels_path = _require_file(args.labels, "labels")
    _require_file(args.detections, "detections")
    if args.mentions:
        _require_file(args.mentions, "mentions")
    if args.gt_boxes:
        _require_file(args.gt_boxes, "gt-boxes")
    pred = read_labels(labels_path)
    ds = load_dataset(args.detections, args.mentions)
    vocab = _vocab_for_eval(args, labels_path)
    out = _out_dir(args)

    if args.gt_boxes:
        gt_ds = load_dataset(args.gt_boxes, None)
        matches = match_predictions_to_gt(ds.detections, gt_ds.detections)
        gt_map: dict[str, str] = {}
        pred_map: dict[str, str] = {}
        gt_label = {d.id: d.gt_label for d in gt_ds.detections}
        for pred_id, gt_id, _ in matches.pairs:
            gt_map[gt_id] = vocab.project_gt(gt_label[gt_id])
            pred_map[gt_id] = pred.get(pred_id, vocab.unknown_name)
        for gt_id in matches.unmatched_gt:
            gt_map[gt_id] = vocab.project_gt(gt_label[gt_id])
            pred_map[gt_id] = vocab.unknown_name
        mode = "boxes"
    else:
        ids = sorted(set(pred) & {d.id for d in ds.detections})
        if not ids:
            raise EvaluationError("labels and detections share no ids")
        if args.split == "tail20":
            _, eval_ids = chronological_split(ds)
            ids = sorted(set(ids) & set(eval_ids))
            if not ids:
                raise EvaluationError("no labeled ids fall in the tail20 split")
        gt_by_id = {d.id: d.gt_label for d in ds.detections}
        gt_map = {i: vocab.project_gt(gt_by_id[i]) for i in ids}
        pred_map = {i: pred[i] for i in ids}
        mode = "inline"

    cm = confusion(gt_map, pred_map, vocab.classes())
    report = metrics(cm)

    with open(out / "report.json", "w", encoding="utf-8") as fh:
        json.dump({"schema": 1, "mode": mode, "split": args.split,
                   "n": cm.total, "labels_file": str(labels_path),
                   "report": report.as_dict()}, fh, indent=2)
        fh.write("\n")
    with open(out / "confusion.csv", "w", encoding="utf-8") as fh:
        fh.write("gt/pred," + ",".join(cm.classes) + "\n")
        for i, name in enumerate(cm.classes):
            fh.write(name + "," + ",".join(str(int(v)) for v in cm.counts[i]) + "\n")

    print(f"n={cm.total} micro={report.micro_accuracy:.4f} "
          f"macro={report.macro_accuracy:.4f} macro_f1={report.macro_f1:.4f}")
    return 0


# ---------------------------------------------------------------------------
# sweep

def cmd_sweep(args) -> int:
    settings = _resolve_discover_settings(args)
    out = _out_dir(args)
    ds, policy, window = _load_inputs(settings)

    vocab = build_vocabulary(ds.mentions, policy)
    taxonomy = load_taxonomy(settings["taxonomy"], vocab) if settings["taxonomy"] else None
    normalized = normalize_mentions(ds.mentions, vocab, taxonomy=taxonomy,
                                    threshold=int(settings["fuzzy_threshold"]))
    ds_norm = dataclasses.replace(ds, mentions=tuple(normalized))
    graphs = build_graphs(ds_norm, window=window, unknown_name=vocab.unknown_name)
    weak = weak_labels(graphs, all_detection_ids=ds.detection_ids())

    n_entities = len(vocab.entities)
    if args.k_list:
        try:
            k_values = sorted({int(v) for v in args.k_list.split(",")})
        except ValueError as exc:
            raise ConfigError(f"bad --k-list: {args.k_list!r}") from exc
    else:
        k_values = list(range(n_entities, 4 * n_entities + 1))
    if any(k < 1 for k in k_values):
        raise ConfigError("k values must be >= 1")

    gt = {d.id: d.gt_label for d in ds.detections}
    if all(v is None for v in gt.values()):
        raise DataError("sweep needs gt_label on detections to score against")

    reports = sweep_clusters(ds.embeddings_by_id(), weak, gt, vocab, k_values,
                             method=settings["method"], seed=int(settings["seed"]))
    with open(out / "sweep.csv", "w", encoding="utf-8") as fh:
        fh.write("k,micro_accuracy,macro_accuracy,macro_f1\n")
        for k in k_values:
            r = reports[k]
            fh.write(f"{k},{r.micro_accuracy:.6f},{r.macro_accuracy:.6f},"
                     f"{r.macro_f1:.6f}\n")
            print(f"k={k:3d} micro={r.micro_accuracy:.4f} "
                  f"macro={r.macro_accuracy:.4f}")
    print(f"wrote {out / 'sweep.csv'}")
    return 0


# ---------------------------------------------------------------------------
# report

def cmd_report(args) -> int:
    path = Path(args.report)
    if not path.exists():
        raise DataError(f"report file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    rep = payload.get("report", payload)
    classes = rep["classes"]
    print(f"labels: {payload.get('labels_file', '?')}  mode: "
          f"{payload.get('mode', '?')}  n: {payload.get('n', '?')}")
    width = max(len(c) for c in classes)
    print(f"{'class'.ljust(width)}  support  accuracy  precision  f1")
    for i, name in enumerate(classes):
        print(f"{name.ljust(width)}  {rep['support'][i]:7d}  "
              f"{rep['per_class_accuracy'][i]:8.4f}  "
              f"{rep['per_class_precision'][i]:9.4f}  "
              f"{rep['per_class_f1'][i]:6.4f}")
    print(f"micro accuracy  {rep['micro_accuracy']:.4f}")
    print(f"macro accuracy  {rep['macro_accuracy']:.4f}")
    print(f"macro precision {rep['macro_precision']:.4f}")
    print(f"macro f1        {rep['macro_f1']:.4f}")
    if rep.get("zero_support"):
        print(f"zero-support classes: {', '.join(rep['zero_support'])}")
    return 0


# ---------------------------------------------------------------------------
# wiring

def _add_dataset_flags(p: _Parser) -> None:
    p.add_argument("--config", help="TOML or JSON settings file")
    p.add_argument("--detections", help="detections JSONL path")
    p.add_argument("--mentions", help="mentions JSONL path")
    p.add_argument("--taxonomy", help="surface->entity override map (JSON)")
    p.add_argument("--policy", help="vocabulary cutoff, e.g. top_k:7 or min_fraction:0.1")
    p.add_argument("--fuzzy-threshold", type=int, dest="fuzzy_threshold")
    p.add_argument("--window-known", type=int, dest="window_known")
    p.add_argument("--window-unknown", type=int, dest="window_unknown")
    p.add_argument("--no-dedup", action="store_true",
                   help="count repeated in-caption mentions with multiplicity")
    p.add_argument("--method", choices=("ward", "kmeans"))
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir", required=True)


def build_parser() -> _Parser:
    parser = _Parser(prog="vned", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"vned {__version__}")
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic benchmark dataset")
    p.add_argument("--config", help="TOML or JSON SynthConfig file")
    p.add_argument("--preset", choices=sorted(_SYNTH_PRESETS))
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("discover", help="run the staged discovery pipeline")
    _add_dataset_flags(p)
    p.add_argument("--stages", choices=STAGE_CHOICES)
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("baseline", help="run a comparison method")
    _add_dataset_flags(p)
    p.add_argument("--baseline", required=True,
                   choices=("limsi", "weak", "oracle", "random"))
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--batch-size", type=int, default=256, dest="batch_size")
    p.add_argument("--learning-rate", type=float, default=0.0012,
                   dest="learning_rate")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("eval", help="score a labels file against ground truth")
    p.add_argument("--labels", required=True)
    p.add_argument("--detections", required=True)
    p.add_argument("--mentions", help="only needed to rebuild the vocabulary")
    p.add_argument("--policy")
    p.add_argument("--manifest", help="manifest.json carrying the vocabulary")
    p.add_argument("--gt-boxes", dest="gt_boxes",
                   help="separate gt detections; match by IoU instead of id")
    p.add_argument("--split", choices=("all", "tail20"), default="all")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="agreement-stage quality across cluster counts")
    _add_dataset_flags(p)
    p.add_argument("--k-list", dest="k_list",
                   help="comma-separated cluster counts (default |E|..4|E|)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="pretty-print a report.json")
    p.add_argument("--report", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
        )
        start = time.perf_counter()
        code = args.func(args)
        log.info("%s finished in %.2fs", args.command, time.perf_counter() - start)
        return code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except DiscoveryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to exit 3
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
