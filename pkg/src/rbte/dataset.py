"""Manifest composition and batch runs.

Manifests are CSV files with header ``path,class_name,source_tag,split``;
class ids are never stored, they are assigned densely (sorted by merged
class name) at compose time.  Class maps are CSVs with header
``source_tag,original_class_name,merged_class_name`` and must be
functions: no original class may map to two merged names.
"""

from __future__ import annotations

import csv
import multiprocessing
import os
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    DuplicatePathError,
    ManifestFormatError,
    RbteError,
    UnmappedClassError,
)
from .image import save_binary
from .pipeline import PipelineSpec, log_decisions, sample_rng, transform

MANIFEST_FIELDS = ["path", "class_name", "source_tag", "split"]
CLASS_MAP_FIELDS = ["source_tag", "original_class_name", "merged_class_name"]
SPLITS = ("train", "val", "test")


@dataclass(frozen=True)
class Record:
    path: str
    class_name: str
    source_tag: str
    split: str
    class_id: int | None = None


def read_manifest(path) -> list:
    """Load a manifest CSV; validates header and split values."""
    records = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != MANIFEST_FIELDS:
            raise ManifestFormatError(
                f"{path}: expected header {','.join(MANIFEST_FIELDS)}, "
                f"got {reader.fieldnames}"
            )
        for i, row in enumerate(reader, start=2):
            if row["split"] not in SPLITS:
                raise ManifestFormatError(
                    f"{path}:{i}: split must be one of {SPLITS}, got {row['split']!r}"
                )
            records.append(
                Record(row["path"], row["class_name"], row["source_tag"], row["split"])
            )
    return records


def write_manifest(records, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(MANIFEST_FIELDS)
        for r in records:
            writer.writerow([r.path, r.class_name, r.source_tag, r.split])


def read_class_map(path) -> dict:
    """Load a class map CSV as {(source_tag, original_name): merged_name}."""
    mapping = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CLASS_MAP_FIELDS:
            raise ManifestFormatError(
                f"{path}: expected header {','.join(CLASS_MAP_FIELDS)}, "
                f"got {reader.fieldnames}"
            )
        for i, row in enumerate(reader, start=2):
            key = (row["source_tag"], row["original_class_name"])
            merged = row["merged_class_name"]
            if key in mapping and mapping[key] != merged:
                raise ManifestFormatError(
                    f"{path}:{i}: {key} maps to both {mapping[key]!r} and {merged!r}"
                )
            mapping[key] = merged
    return mapping


def identity_class_map(records) -> dict:
    """Map every (source_tag, class_name) in the records to itself."""
    return {(r.source_tag, r.class_name): r.class_name for r in records}


def compose(records, class_map, cap=None, seed: int = 0, strict: bool = True) -> list:
    """Relabel records to merged classes, cap per class and split, assign ids.

    When a (merged class, split) group exceeds the cap, records are kept by
    seeded round-robin over the group's original classes (each original's
    list is shuffled), so per-original quotas stay within one of each other.
    """
    merged_recs = []
    for rec in records:
        merged = class_map.get((rec.source_tag, rec.class_name))
        if merged is None:
            if strict:
                raise UnmappedClassError(
                    f"no mapping for class {rec.class_name!r} "
                    f"(source {rec.source_tag!r})"
                )
            continue
        merged_recs.append((merged, rec))

    seen = set()
    for merged, rec in merged_recs:
        key = (rec.split, rec.path)
        if key in seen:
            raise DuplicatePathError(
                f"path {rec.path!r} appears twice in split {rec.split!r}"
            )
        seen.add(key)

    groups = defaultdict(list)
    for merged, rec in merged_recs:
        groups[(merged, rec.split)].append(rec)

    kept = []
    for (merged, split), recs in sorted(groups.items()):
        if cap is None or len(recs) <= cap:
            kept.extend((merged, r) for r in recs)
            continue
        by_orig = defaultdict(list)
        for r in recs:
            by_orig[r.class_name].append(r)
        pools = []
        for orig in sorted(by_orig):
            ordered = sorted(by_orig[orig], key=lambda r: r.path)
            rng = sample_rng(seed, f"compose|{merged}|{split}|{orig}", 0)
            perm = rng.permutation(len(ordered))
            pools.append([ordered[i] for i in perm])
        chosen = []
        depth = 0
        while len(chosen) < cap:
            took = False
            for pool in pools:
                if depth < len(pool):
                    chosen.append(pool[depth])
                    took = True
                    if len(chosen) == cap:
                        break
            if not took:
                break
            depth += 1
        kept.extend((merged, r) for r in chosen)

    names = sorted({m for m, _ in kept})
    ids = {n: i for i, n in enumerate(names)}
    out = [
        Record(r.path, m, r.source_tag, r.split, class_id=ids[m]) for m, r in kept
    ]
    out.sort(key=lambda r: (r.class_name, r.split, r.path))
    return out


def stats(records) -> dict:
    """Per-class/per-split and per-source record counts."""
    per_class = defaultdict(lambda: Counter())
    per_source = Counter()
    per_split = Counter()
    for r in records:
        per_class[r.class_name][r.split] += 1
        per_source[r.source_tag] += 1
        per_split[r.split] += 1
    return {
        "classes": {name: dict(c) for name, c in sorted(per_class.items())},
        "sources": dict(per_source),
        "splits": dict(per_split),
        "total": len(records),
    }


def common_classes(a, b) -> list:
    """Class names present in both manifests."""
    return sorted({r.class_name for r in a} & {r.class_name for r in b})


def format_stats(summary: dict) -> str:
    lines = []
    lines.append(f"{'class':<30} {'train':>8} {'val':>8} {'test':>8} {'total':>8}")
    for name, splits in summary["classes"].items():
        total = sum(splits.values())
        lines.append(
            f"{name:<30} {splits.get('train', 0):>8} {splits.get('val', 0):>8} "
            f"{splits.get('test', 0):>8} {total:>8}"
        )
    lines.append("")
    for tag, n in sorted(summary["sources"].items()):
        lines.append(f"source {tag}: {n}")
    lines.append(f"total records: {summary['total']}")
    return "\n".join(lines)


@dataclass
class BatchResult:
    files: int
    decisions: list
    failures: list
    per_class: dict


def _output_path(out_dir: Path, rec: Record, index: int) -> Path:
    return out_dir / rec.class_name / f"{Path(rec.path).stem}.{index}.png"


def _run_records(records, spec_dict, out_dir, draws):
    spec = PipelineSpec.from_dict(spec_dict)
    out_dir = Path(out_dir)
    decisions = []
    failures = []
    for rec in records:
        for index in range(draws):
            try:
                mask, decision = transform(rec.path, spec, index, image_id=rec.path)
                save_binary(mask, _output_path(out_dir, rec, index))
                decisions.append((rec.class_name, decision))
            except Exception as e:  # collected, reported by the caller
                failures.append((rec.path, index, f"{type(e).__name__}: {e}"))
    return decisions, failures


def run_batch(
    records,
    spec: PipelineSpec,
    out_dir,
    workers: int | None = None,
    draws: int = 1,
    strict: bool = False,
) -> BatchResult:
    """Generate rBTEs for a manifest into ``out_dir``.

    Output tree is ``<class_name>/<stem>.<index>.png`` plus a
    ``decisions.jsonl`` log sorted by (image id, index).  Content is
    schedule independent: any worker count produces the same bytes.
    """
    if workers is None:
        workers = int(os.environ.get("RBTE_NUM_THREADS", "1"))
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if draws < 1:
        raise ValueError(f"draws must be >= 1, got {draws}")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    targets = set()
    for rec in records:
        for index in range(draws):
            path = _output_path(out_dir, rec, index)
            if path in targets:
                raise DuplicatePathError(f"output collision at {path}")
            targets.add(path)
    for rec in records:
        (out_dir / rec.class_name).mkdir(parents=True, exist_ok=True)

    spec_dict = spec.to_dict()
    if workers == 1 or len(records) <= 1:
        decisions, failures = _run_records(records, spec_dict, str(out_dir), draws)
    else:
        chunk = -(-len(records) // (workers * 4))
        chunks = [records[i : i + chunk] for i in range(0, len(records), chunk)]
        try:
            ctx = multiprocessing.get_context("fork")
        except ValueError:
            ctx = multiprocessing.get_context()
        decisions = []
        failures = []
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
            futures = [
                pool.submit(_run_records, part, spec_dict, str(out_dir), draws)
                for part in chunks
            ]
            for fut in futures:
                d, f = fut.result()
                decisions.extend(d)
                failures.extend(f)

    if strict and failures:
        path, index, msg = failures[0]
        raise RbteError(
            f"{len(failures)} record(s) failed; first: {path} draw {index}: {msg}"
        )

    decisions.sort(key=lambda pair: (pair[1].image_id, pair[1].index))
    log_path = out_dir / "decisions.jsonl"
    log_path.unlink(missing_ok=True)
    log_decisions([d for _, d in decisions], log_path)

    per_class = Counter(name for name, _ in decisions)
    return BatchResult(
        files=len(decisions),
        decisions=[d for _, d in decisions],
        failures=failures,
        per_class=dict(per_class),
    )
