"""CSV serialization for datasets and generator ground truth."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .core import Dataset, ExampleKind, SkewbenchError

# 17 significant digits round-trips any float64 exactly.
_FLOAT_FMT = "{:.17g}"


def format_float(x: float) -> str:
    return _FLOAT_FMT.format(float(x))


def dataset_to_csv_text(ds: Dataset) -> str:
    header = [f"f{i}" for i in range(ds.d)] + ["label"]
    if ds.kinds is not None:
        header.append("kind")
    lines = [",".join(header)]
    for i in range(ds.n):
        row = [format_float(v) for v in ds.points[i]]
        row.append(str(int(ds.labels[i])))
        if ds.kinds is not None:
            row.append(ExampleKind(int(ds.kinds[i])).tag)
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def write_dataset_csv(ds: Dataset, path) -> None:
    Path(path).write_text(dataset_to_csv_text(ds), encoding="ascii", newline="\n")


def _parse_header(header: str) -> tuple[int, bool]:
    fields = header.rstrip("\n").split(",")
    has_kind = fields[-1] == "kind"
    if has_kind:
        fields = fields[:-1]
    if len(fields) < 2 or fields[-1] != "label":
        raise SkewbenchError("line 1: header must be f0,...,f{d-1},label[,kind]")
    d = len(fields) - 1
    if fields[:-1] != [f"f{i}" for i in range(d)]:
        raise SkewbenchError("line 1: feature columns must be named f0..f{d-1}")
    return d, has_kind


def read_dataset_csv(path) -> Dataset:
    """Parse a dataset CSV; malformed rows raise with their line number."""
    text = Path(path).read_text(encoding="ascii")
    lines = text.splitlines()
    if not lines:
        raise SkewbenchError("line 1: empty file, header expected")
    d, has_kind = _parse_header(lines[0])
    width = d + 1 + (1 if has_kind else 0)
    points, labels, kinds = [], [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != width:
            raise SkewbenchError(f"line {lineno}: expected {width} fields, got {len(parts)}")
        try:
            points.append([float(v) for v in parts[:d]])
        except ValueError:
            raise SkewbenchError(f"line {lineno}: invalid feature value") from None
        try:
            label = int(parts[d])
            if label < 0:
                raise ValueError
        except ValueError:
            raise SkewbenchError(f"line {lineno}: invalid label {parts[d]!r}") from None
        labels.append(label)
        if has_kind:
            try:
                kinds.append(int(ExampleKind.from_tag(parts[d + 1])))
            except SkewbenchError:
                raise SkewbenchError(f"line {lineno}: invalid kind {parts[d + 1]!r}") from None
    pts = np.array(points, dtype=np.float64).reshape(len(points), d)
    return Dataset(pts, np.array(labels, dtype=np.int64),
                   np.array(kinds, dtype=np.uint8) if has_kind else None)


def ground_truth_to_csv_text(minority_centers: np.ndarray, majority_centers: np.ndarray,
                             minority_label: int, majority_label: int) -> str:
    d = minority_centers.shape[1]
    lines = [",".join([f"center_x{i}" for i in range(d)] + ["label", "subcluster"])]
    for j, center in enumerate(majority_centers):
        lines.append(",".join([format_float(v) for v in center] + [str(majority_label), str(j)]))
    for j, center in enumerate(minority_centers):
        lines.append(",".join([format_float(v) for v in center] + [str(minority_label), str(j)]))
    return "\n".join(lines) + "\n"


def write_ground_truth_csv(gt, path, minority_label: int = 1, majority_label: int = 0) -> None:
    text = ground_truth_to_csv_text(gt.minority_centers, gt.majority_centers,
                                    minority_label, majority_label)
    Path(path).write_text(text, encoding="ascii", newline="\n")
