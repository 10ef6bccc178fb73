"""Build a 28x28 ten-class digits dataset in MNIST IDX byte format.

scikit-learn's bundled 8x8 digits are upscaled to 28x28 and augmented with
seeded pixel jitter, then written as standard IDX files (magic 2051/2049,
big-endian), so every consumer exercises the exact MNIST ingestion path.
Swap in real MNIST files to reproduce results on the original data.

    python tools/make_mnist_like.py [out_dir]
"""
import sys
from pathlib import Path

import numpy as np
from sklearn.datasets import load_digits

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))
from dualbound.datasets import write_idx_images, write_idx_labels  # noqa: E402

TRAIN_COPIES = 4  # jittered copies per source digit
SEED = 1234


def upscale(img8: np.ndarray) -> np.ndarray:
    """8x8 in [0, 16] -> 28x28 uint8: 3x nearest-neighbor plus 2px border."""
    big = np.kron(img8, np.ones((3, 3)))
    out = np.zeros((28, 28))
    out[2:26, 2:26] = big * (255.0 / 16.0)
    return out


def jitter(rng, img: np.ndarray) -> np.ndarray:
    dy, dx = rng.integers(-2, 3, size=2)
    out = np.roll(np.roll(img, dy, axis=0), dx, axis=1)
    noise = rng.normal(0.0, 8.0, size=out.shape)
    return np.clip(out + noise, 0, 255)


def main(out_dir: Path) -> None:
    rng = np.random.default_rng(SEED)
    digits = load_digits()
    images = digits.images
    labels = digits.target.astype(np.uint8)
    order = rng.permutation(len(images))
    images, labels = images[order], labels[order]

    n_test = 1000
    test_x = np.stack([upscale(im) for im in images[:n_test]]).astype(np.uint8)
    test_y = labels[:n_test]

    train_src = images[n_test:]
    train_y_src = labels[n_test:]
    train_imgs, train_lbls = [], []
    for im, lb in zip(train_src, train_y_src):
        base = upscale(im)
        train_imgs.append(base.astype(np.uint8))
        train_lbls.append(lb)
        for _ in range(TRAIN_COPIES):
            train_imgs.append(jitter(rng, base).astype(np.uint8))
            train_lbls.append(lb)
    train_x = np.stack(train_imgs)
    train_y = np.array(train_lbls, dtype=np.uint8)

    out_dir.mkdir(parents=True, exist_ok=True)
    write_idx_images(out_dir / "train-images-idx3-ubyte", train_x)
    write_idx_labels(out_dir / "train-labels-idx1-ubyte", train_y)
    write_idx_images(out_dir / "t10k-images-idx3-ubyte", test_x)
    write_idx_labels(out_dir / "t10k-labels-idx1-ubyte", test_y)
    print(f"wrote {len(train_x)} train / {len(test_x)} test images to {out_dir}")


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else
         Path(__file__).resolve().parents[1] / "data" / "mnist_like")
