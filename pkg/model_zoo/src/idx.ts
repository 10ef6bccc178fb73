/** MNIST-format IDX readers (big-endian magic 2051 images / 2049 labels). */
import { readFileSync } from "node:fs";

export class IdxError extends Error {}

export interface IdxDataset {
  /** Flat images normalized to [0, 1], row-major per image. */
  images: Float64Array[];
  labels: Uint8Array;
  rows: number;
  cols: number;
}

export function readIdxImages(path: string): { data: Float64Array[]; rows: number; cols: number } {
  const buf = readFileSync(path);
  if (buf.length < 16) throw new IdxError(`${path}: truncated IDX header`);
  const magic = buf.readUInt32BE(0);
  if (magic !== 2051) throw new IdxError(`${path}: bad magic ${magic}, expected 2051`);
  const count = buf.readUInt32BE(4);
  const rows = buf.readUInt32BE(8);
  const cols = buf.readUInt32BE(12);
  if (buf.length !== 16 + count * rows * cols) {
    throw new IdxError(`${path}: expected ${count * rows * cols} pixels`);
  }
  const data: Float64Array[] = [];
  for (let i = 0; i < count; i++) {
    const img = new Float64Array(rows * cols);
    const base = 16 + i * rows * cols;
    for (let p = 0; p < rows * cols; p++) img[p] = buf[base + p] / 255;
    data.push(img);
  }
  return { data, rows, cols };
}

export function readIdxLabels(path: string): Uint8Array {
  const buf = readFileSync(path);
  if (buf.length < 8) throw new IdxError(`${path}: truncated IDX header`);
  const magic = buf.readUInt32BE(0);
  if (magic !== 2049) throw new IdxError(`${path}: bad magic ${magic}, expected 2049`);
  const count = buf.readUInt32BE(4);
  if (buf.length !== 8 + count) throw new IdxError(`${path}: expected ${count} labels`);
  return new Uint8Array(buf.subarray(8));
}

/** Load an images/labels pair by the conventional sibling naming. */
export function loadIdxPair(imagesPath: string): IdxDataset {
  const labelsPath = imagesPath.replace("images", "labels").replace("idx3", "idx1");
  if (labelsPath === imagesPath) {
    throw new IdxError(`${imagesPath}: cannot derive the labels file name`);
  }
  const { data, rows, cols } = readIdxImages(imagesPath);
  const labels = readIdxLabels(labelsPath);
  if (labels.length !== data.length) {
    throw new IdxError(`${imagesPath}: ${data.length} images but ${labels.length} labels`);
  }
  return { images: data, labels, rows, cols };
}
