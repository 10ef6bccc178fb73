"""Dataset ingestion: IDX image/label files and JSON input lists.

Pixel datasets normalize to [0, 1] by dividing by 255; verification radii
are interpreted in those normalized units.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

IDX_IMAGES_MAGIC = 2051
IDX_LABELS_MAGIC = 2049


class DatasetError(ValueError):
    pass


def read_idx_images(path) -> np.ndarray:
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) < 16:
            raise DatasetError(f"{path}: truncated IDX header")
        magic, count, rows, cols = struct.unpack(">IIII", header)
        if magic != IDX_IMAGES_MAGIC:
            raise DatasetError(f"{path}: bad magic {magic}, expected {IDX_IMAGES_MAGIC}")
        data = np.frombuffer(fh.read(), dtype=np.uint8)
    if data.size != count * rows * cols:
        raise DatasetError(f"{path}: expected {count * rows * cols} pixels, got {data.size}")
    return data.reshape(count, rows * cols).astype(np.float64) / 255.0


def read_idx_labels(path) -> np.ndarray:
    with open(path, "rb") as fh:
        header = fh.read(8)
        if len(header) < 8:
            raise DatasetError(f"{path}: truncated IDX header")
        magic, count = struct.unpack(">II", header)
        if magic != IDX_LABELS_MAGIC:
            raise DatasetError(f"{path}: bad magic {magic}, expected {IDX_LABELS_MAGIC}")
        data = np.frombuffer(fh.read(), dtype=np.uint8)
    if data.size != count:
        raise DatasetError(f"{path}: expected {count} labels, got {data.size}")
    return data.astype(np.int64)


def write_idx_images(path, images: np.ndarray) -> None:
    """Write uint8 images of shape (n, rows, cols) in IDX format."""
    n, rows, cols = images.shape
    with open(path, "wb") as fh:
        fh.write(struct.pack(">IIII", IDX_IMAGES_MAGIC, n, rows, cols))
        fh.write(np.ascontiguousarray(images, dtype=np.uint8).tobytes())


def write_idx_labels(path, labels: np.ndarray) -> None:
    with open(path, "wb") as fh:
        fh.write(struct.pack(">II", IDX_LABELS_MAGIC, len(labels)))
        fh.write(np.ascontiguousarray(labels, dtype=np.uint8).tobytes())


def _labels_path_for(images_path: Path) -> Path:
    name = images_path.name.replace("images", "labels").replace("idx3", "idx1")
    if name == images_path.name:
        raise DatasetError(
            f"{images_path}: cannot derive the labels file name; pass "
            "'images_path,labels_path' explicitly")
    return images_path.with_name(name)


def load_dataset(path, limit: int | None = None) -> list[tuple[np.ndarray, int]]:
    """Load (input, label) pairs from a JSON array or an IDX image file.

    IDX labels come from an explicit 'images,labels' pair or from the
    conventional sibling name (images->labels, idx3->idx1). Order is
    preserved so 'first N' selections are meaningful.
    """
    spec = str(path)
    if "," in spec:
        images_path, labels_path = (Path(p) for p in spec.split(",", 1))
    elif spec.endswith(".json"):
        with open(spec) as fh:
            rows = json.load(fh)
        if not isinstance(rows, list):
            raise DatasetError(f"{spec}: expected a JSON array of objects")
        out = []
        for row in rows[:limit]:
            try:
                out.append((np.asarray(row["input"], dtype=np.float64).reshape(-1),
                            int(row["label"])))
            except (KeyError, TypeError) as exc:
                raise DatasetError(f"{spec}: rows need 'input' and 'label'") from exc
        return out
    else:
        images_path = Path(spec)
        labels_path = _labels_path_for(images_path)
    images = read_idx_images(images_path)
    labels = read_idx_labels(labels_path)
    if images.shape[0] != labels.shape[0]:
        raise DatasetError(f"{images_path}: {images.shape[0]} images but "
                           f"{labels.shape[0]} labels")
    pairs = list(zip(images, (int(v) for v in labels)))
    return pairs[:limit]
