"""Dataset loading, preprocessing, and synthetic fixtures.

A :class:`Dataset` stores features column-per-sample (shape ``(D, N)``),
integer class labels, and a one-hot target matrix ready for the trainers.
CSV ingestion maps label strings to dense class indices in first-appearance
order; splitting and standardization are seeded and deterministic, and
standardization statistics always come from the training partition alone.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np

from .linalg import SeededRng, gaussian_matrix

__all__ = [
    "Dataset",
    "SplitSpec",
    "make_dataset",
    "load_csv",
    "standardize",
    "apply_standardization",
    "train_test_split",
    "synthetic_blobs",
    "synthetic_correlated_pairs",
]


@dataclass
class Dataset:
    """Immutable sample collection: ``features[:, j]`` belongs to class
    ``labels[j]``, and ``one_hot[:, j]`` is its target column (single 1.0
    at row ``labels[j]``)."""

    features: np.ndarray
    labels: np.ndarray
    one_hot: np.ndarray
    class_names: list[str]
    name: str

    @property
    def n_features(self) -> int:
        return self.features.shape[0]

    @property
    def n_samples(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)


@dataclass(frozen=True)
class SplitSpec:
    """How to partition a dataset: held-out fraction, shuffle seed, and
    whether class proportions are preserved per class."""

    test_fraction: float
    seed: int
    stratified: bool = True

    def __post_init__(self):
        if not (0.0 < self.test_fraction < 1.0):
            raise ValueError(
                f"test_fraction must lie in (0, 1), got {self.test_fraction}"
            )


def _one_hot(labels: np.ndarray, n_classes: int) -> np.ndarray:
    out = np.zeros((n_classes, labels.shape[0]))
    out[labels, np.arange(labels.shape[0])] = 1.0
    return out


def make_dataset(features, labels, class_names, name: str) -> Dataset:
    """Assemble a Dataset from parts, building the one-hot matrix."""
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if features.ndim != 2 or features.shape[1] != labels.shape[0]:
        raise ValueError(
            f"features {features.shape} do not match {labels.shape[0]} labels"
        )
    class_names = [str(c) for c in class_names]
    if labels.size and (labels.min() < 0 or labels.max() >= len(class_names)):
        raise ValueError("labels must index into class_names")
    return Dataset(
        features=features,
        labels=labels,
        one_hot=_one_hot(labels, len(class_names)),
        class_names=class_names,
        name=name,
    )


def load_csv(
    path,
    label_column: int | str = -1,
    feature_columns=None,
    header: bool | None = None,
    max_rows: int | None = None,
    name: str | None = None,
) -> Dataset:
    """Parse a comma-separated file into a Dataset.

    ``label_column`` selects the class column by index (negative allowed)
    or, when the file has a header, by name.  ``feature_columns`` defaults
    to every other column.  ``header=None`` auto-detects: if any selected
    feature cell of the first row fails to parse as a number, that row is
    treated as a header.  ``max_rows`` keeps only the first rows after the
    header, for subsetting large files.  Labels map to class indices in
    order of first appearance; a row with a wrong field count or a
    non-numeric feature cell fails the load with its 1-based row number.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"dataset file not found: {path}")
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    if not rows:
        raise ValueError(f"{path}: file contains no data")

    ncols = len(rows[0])

    def resolve(col, names):
        if isinstance(col, str):
            if names is None:
                raise ValueError(f"column {col!r} requested by name but file has no header")
            if col not in names:
                raise ValueError(f"no column named {col!r}; header has {names}")
            return names.index(col)
        col = int(col)
        if not (-ncols <= col < ncols):
            raise ValueError(f"column index {col} out of range for {ncols} columns")
        return col % ncols

    def is_number(cell):
        try:
            float(cell)
            return True
        except ValueError:
            return False

    header_names = None
    if header is None:
        by_name = isinstance(label_column, str) or (
            feature_columns is not None
            and any(isinstance(c, str) for c in feature_columns)
        )
        if by_name:
            # Name-based selection only makes sense with a header present.
            has_header = True
        else:
            label_probe = resolve(label_column, None)
            if feature_columns is None:
                probe_idx = [i for i in range(ncols) if i != label_probe]
            else:
                probe_idx = [resolve(c, None) for c in feature_columns]
            has_header = not all(is_number(rows[0][i]) for i in probe_idx)
    else:
        has_header = bool(header)
    if has_header:
        header_names = [c.strip() for c in rows[0]]
        rows = rows[1:]
        if not rows:
            raise ValueError(f"{path}: no data rows after header")

    label_idx = resolve(label_column, header_names)
    if feature_columns is None:
        feature_idx = [i for i in range(ncols) if i != label_idx]
    else:
        feature_idx = [resolve(c, header_names) for c in feature_columns]
    if not feature_idx:
        raise ValueError("no feature columns selected")

    if max_rows is not None:
        rows = rows[: int(max_rows)]

    first_row = 2 if has_header else 1
    features = np.empty((len(feature_idx), len(rows)))
    labels = np.empty(len(rows), dtype=np.int64)
    class_index: dict[str, int] = {}
    class_names: list[str] = []
    for j, row in enumerate(rows):
        rownum = first_row + j
        if len(row) != ncols:
            raise ValueError(
                f"{path}: row {rownum} has {len(row)} fields, expected {ncols}"
            )
        for i, c in enumerate(feature_idx):
            cell = row[c].strip()
            try:
                features[i, j] = float(cell)
            except ValueError:
                raise ValueError(
                    f"{path}: row {rownum}, column {c}: non-numeric feature {cell!r}"
                ) from None
        label = row[label_idx].strip()
        if label not in class_index:
            class_index[label] = len(class_names)
            class_names.append(label)
        labels[j] = class_index[label]

    return make_dataset(
        features, labels, class_names, name or os.path.basename(str(path))
    )


def standardize(ds: Dataset) -> tuple[Dataset, np.ndarray, np.ndarray]:
    """Scale each feature row to mean 0 and standard deviation 1.

    Returns the transformed dataset together with the per-feature mean and
    std (population convention) so the same affine map can be applied to
    held-out data via :func:`apply_standardization`.  A zero-variance
    feature is centered and left unscaled (its std reported as 1).
    """
    mean = ds.features.mean(axis=1)
    std = ds.features.std(axis=1)
    std = np.where(std > 0.0, std, 1.0)
    return apply_standardization(ds, mean, std), mean, std


def apply_standardization(ds: Dataset, mean: np.ndarray, std: np.ndarray) -> Dataset:
    """Apply previously computed standardization statistics to a dataset."""
    mean = np.asarray(mean, dtype=np.float64)
    std = np.asarray(std, dtype=np.float64)
    if mean.shape != (ds.n_features,) or std.shape != (ds.n_features,):
        raise ValueError(
            f"statistics shaped {mean.shape}/{std.shape} do not fit "
            f"{ds.n_features} features"
        )
    if np.any(std <= 0.0):
        raise ValueError("std entries must be positive")
    feats = (ds.features - mean[:, None]) / std[:, None]
    return Dataset(
        features=feats,
        labels=ds.labels,
        one_hot=ds.one_hot,
        class_names=list(ds.class_names),
        name=ds.name,
    )


def _take(ds: Dataset, idx: np.ndarray) -> Dataset:
    return Dataset(
        features=ds.features[:, idx],
        labels=ds.labels[idx],
        one_hot=ds.one_hot[:, idx],
        class_names=list(ds.class_names),
        name=ds.name,
    )


def train_test_split(ds: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Seeded split into disjoint, exhaustive train and test partitions.

    The permutation comes from ranking one uniform draw per sample, so a
    seed fully determines the split.  Stratified mode draws the held-out
    count class by class (rounded per class, so proportions hold to within
    one sample); unstratified mode holds out ``round(test_fraction * N)``
    samples overall.  Within each partition samples keep their original
    file order.  Both partitions must end up non-empty.
    """
    n = ds.n_samples
    rng = SeededRng(spec.seed)
    order = np.argsort(rng.uniform(n), kind="stable")
    test_mask = np.zeros(n, dtype=bool)
    if spec.stratified:
        for c in range(ds.n_classes):
            members = order[np.isin(order, np.flatnonzero(ds.labels == c))]
            k = int(round(spec.test_fraction * members.size))
            test_mask[members[:k]] = True
    else:
        k = int(round(spec.test_fraction * n))
        test_mask[order[:k]] = True
    n_test = int(test_mask.sum())
    if n_test == 0 or n_test == n:
        raise ValueError(
            f"split leaves an empty partition ({n - n_test} train / {n_test} test); "
            "adjust test_fraction"
        )
    return _take(ds, np.flatnonzero(~test_mask)), _take(ds, np.flatnonzero(test_mask))


def synthetic_blobs(
    n_per_class: int, d: int, classes: int, separation: float, seed: int
) -> Dataset:
    """Gaussian point clouds with class-dependent means, for fast fixtures.

    Class c is centered at ``(1 + c // d) * separation`` along coordinate
    ``c % d`` with unit isotropic noise, so any number of classes fits any
    dimension and large separation makes the classes linearly separable.
    """
    if n_per_class < 1 or d < 1 or classes < 1:
        raise ValueError("n_per_class, d, and classes must all be positive")
    streams = SeededRng(seed).split(classes)
    parts = []
    for c in range(classes):
        center = np.zeros((d, 1))
        center[c % d, 0] = (1 + c // d) * separation
        parts.append(center + gaussian_matrix(streams[c], d, n_per_class, 1.0))
    features = np.concatenate(parts, axis=1)
    labels = np.repeat(np.arange(classes), n_per_class)
    return make_dataset(features, labels, [f"class_{c}" for c in range(classes)], "blobs")


_CONTRAST_WEIGHTS = (1.5, -1.2, 1.0, 0.8, -0.7, 0.6)


def synthetic_correlated_pairs(
    n_samples: int,
    n_pairs: int = 14,
    seed: int = 0,
    label_noise: float = 0.15,
    jitter: float = 0.05,
    n_signal_pairs: int = 6,
) -> Dataset:
    """Binary task whose signal hides in low-variance contrast directions.

    Features come in strongly correlated pairs: both members of pair j
    share a standard-normal common factor and differ only by independent
    jitter of scale ``jitter``, so the within-pair difference has tiny
    variance compared to the features themselves.  The label thresholds a
    fixed weighted sum of the first ``n_signal_pairs`` within-pair
    differences at its median (balanced classes), then flips with
    probability ``label_noise``.

    Per-feature standardization leaves this geometry intact, so methods
    that resolve the full feature covariance (least-squares solves) pick
    the contrast directions up immediately, while per-coordinate gradient
    steps approach them slowly.  That contrast is the point: the task
    separates training-method families the way hard tabular benchmarks do,
    and stands in for such a benchmark when no source file is available.
    Fully determined by ``seed``.
    """
    if n_samples < 2 or n_pairs < 1:
        raise ValueError("need n_samples >= 2 and n_pairs >= 1")
    if not (1 <= n_signal_pairs <= n_pairs):
        raise ValueError(
            f"n_signal_pairs must lie in [1, {n_pairs}], got {n_signal_pairs}"
        )
    if not (0.0 <= label_noise < 0.5):
        raise ValueError(f"label_noise must lie in [0, 0.5), got {label_noise}")
    if jitter <= 0.0:
        raise ValueError(f"jitter must be positive, got {jitter}")
    s_factor, s_jitter, s_flip = SeededRng(seed).split(3)
    factors = gaussian_matrix(s_factor, n_pairs, n_samples, 1.0)
    noise = gaussian_matrix(s_jitter, 2 * n_pairs, n_samples, jitter)
    features = np.repeat(factors, 2, axis=0) + noise
    weights = [
        _CONTRAST_WEIGHTS[j % len(_CONTRAST_WEIGHTS)] for j in range(n_signal_pairs)
    ]
    score = sum(
        w * (features[2 * j] - features[2 * j + 1]) for j, w in enumerate(weights)
    )
    labels = (score > np.median(score)).astype(np.int64)
    if label_noise > 0.0:
        flips = s_flip.uniform(n_samples) < label_noise
        labels = np.where(flips, 1 - labels, labels)
    return make_dataset(features, labels, ["0", "1"], "correlated-pairs")
