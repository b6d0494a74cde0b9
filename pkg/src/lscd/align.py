"""Cross-space alignment: seed dictionaries and linear source->target maps.

Vectors are rows throughout, so a transform right-multiplies: x_hat = x @ W.

Two fits are provided. The orthogonal fit is the closed-form Procrustes
solution (SVD of S^T T), which only rotates/reflects and therefore preserves
all pairwise cosines. The CCA fit whitens both sides of the paired dictionary
matrices, takes the SVD of the whitened cross-correlation, and composes the
two projections into a single source->target map through the (pseudo)inverse
of the target-side projection; the target space itself is never touched.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import Vocabulary
from .errors import AlignmentError, EmbeddingFormatError, NumericalError
from .sgns import EmbeddingSpace
from .textio import fmt_float

DICT_MODE_INTERSECTION = "full_intersection_minus_targets"
DICT_MODE_RANDOM_K = "random_k"
PREPROCESS_CHOICES = ("none", "unit", "unit_center")
PINV_RCOND = 1e-10


@dataclass
class SeedDictionary:
    pairs: list[tuple[str, str]]
    mode: str

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass
class Transform:
    matrix: np.ndarray
    orthogonal: bool
    method: str
    correlations: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.float64)
        if self.matrix.ndim != 2 or self.matrix.shape[0] != self.matrix.shape[1]:
            raise NumericalError(f"transform must be square, got shape {self.matrix.shape}")
        if not np.all(np.isfinite(self.matrix)):
            raise NumericalError("transform contains non-finite values")
        if self.orthogonal:
            drift = np.abs(self.matrix.T @ self.matrix - np.eye(self.matrix.shape[0])).max()
            if drift >= 1e-6:
                raise NumericalError(f"matrix flagged orthogonal but ||W^T W - I||_max = {drift:.2e}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def build_seed_dictionary(src: Vocabulary, tgt: Vocabulary, targets=(),
                          mode: str = DICT_MODE_INTERSECTION, k: int = 5000,
                          seed: int = 0) -> SeedDictionary:
    """Pair identical surface forms present in both vocabularies.

    ``full_intersection_minus_targets`` keeps every common word except the
    words under analysis; ``random_k`` keeps min(k, |intersection|) common
    words drawn uniformly without replacement (targets are NOT excluded).
    """
    common = sorted(set(src.words) & set(tgt.words))
    if mode == DICT_MODE_INTERSECTION:
        targets = set(targets)
        words = [w for w in common if w not in targets]
    elif mode == DICT_MODE_RANDOM_K:
        if k < 1:
            raise AlignmentError(f"random_k needs k >= 1, got {k}")
        if len(common) > k:
            rng = np.random.default_rng(seed)
            picks = rng.choice(len(common), size=k, replace=False)
            words = [common[i] for i in sorted(picks)]
        else:
            words = common
    else:
        raise AlignmentError(f"unknown dictionary mode {mode!r}")
    if not words:
        raise AlignmentError("seed dictionary is empty (no usable common words)")
    return SeedDictionary([(w, w) for w in words], mode)


def _paired_matrices(src: EmbeddingSpace, tgt: EmbeddingSpace,
                     dictionary: SeedDictionary) -> tuple[np.ndarray, np.ndarray]:
    if src.dim != tgt.dim:
        raise AlignmentError(f"dimension mismatch: source {src.dim} vs target {tgt.dim}")
    if len(dictionary) < 1:
        raise AlignmentError("seed dictionary is empty")
    try:
        s_rows = [src.vocab.index[a] for a, _ in dictionary.pairs]
        t_rows = [tgt.vocab.index[b] for _, b in dictionary.pairs]
    except KeyError as missing:
        raise AlignmentError(f"dictionary word {missing} not in vocabulary") from None
    return src.matrix[s_rows].copy(), tgt.matrix[t_rows].copy()


def _preprocess(mat: np.ndarray, how: str) -> np.ndarray:
    if how == "none":
        return mat
    norms = np.linalg.norm(mat, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise NumericalError("dictionary contains an all-zero vector; cannot normalize")
    mat = mat / norms
    if how == "unit_center":
        mat = mat - mat.mean(axis=0)
    return mat


def fit_orthogonal(src: EmbeddingSpace, tgt: EmbeddingSpace, dictionary: SeedDictionary,
                   preprocess: str = "unit") -> Transform:
    """Closed-form least-squares rotation: W = U V^T from svd(S^T T)."""
    if preprocess not in PREPROCESS_CHOICES:
        raise AlignmentError(f"unknown preprocess {preprocess!r} (expected one of {PREPROCESS_CHOICES})")
    s_mat, t_mat = _paired_matrices(src, tgt, dictionary)
    if preprocess == "none" and (not np.any(s_mat) or not np.any(t_mat)):
        raise NumericalError("dictionary vectors are all zero; rotation is undetermined")
    s_mat = _preprocess(s_mat, preprocess)
    t_mat = _preprocess(t_mat, preprocess)
    u, _, vt = np.linalg.svd(s_mat.T @ t_mat)
    return Transform(u @ vt, orthogonal=True, method="procrustes")


def _inverse_sqrt(cov: np.ndarray) -> np.ndarray:
    eigval, eigvec = np.linalg.eigh(cov)
    if eigval.min() <= eigval.max() * 1e-14:
        raise NumericalError("covariance is singular; increase ridge")
    return eigvec @ np.diag(1.0 / np.sqrt(eigval)) @ eigvec.T


def fit_cca(src: EmbeddingSpace, tgt: EmbeddingSpace, dictionary: SeedDictionary,
            ridge: float = 1e-8) -> Transform:
    """CCA on the paired dictionary vectors, composed into one map.

    Both sides are column-centered; each covariance gets ridge*I before
    whitening. All d canonical components are kept. The returned matrix maps
    source rows directly into the target space.
    """
    if ridge < 0:
        raise AlignmentError(f"ridge must be >= 0, got {ridge}")
    if len(dictionary) < 2:
        raise AlignmentError(f"CCA needs at least 2 dictionary pairs, got {len(dictionary)}")
    s_mat, t_mat = _paired_matrices(src, tgt, dictionary)
    n, d = s_mat.shape
    s_mat -= s_mat.mean(axis=0)
    t_mat -= t_mat.mean(axis=0)
    denom = max(n - 1, 1)
    eye = np.eye(d)
    cov_ss = s_mat.T @ s_mat / denom + ridge * eye
    cov_tt = t_mat.T @ t_mat / denom + ridge * eye
    cov_st = s_mat.T @ t_mat / denom
    isqrt_s = _inverse_sqrt(cov_ss)
    isqrt_t = _inverse_sqrt(cov_tt)
    u, sigma, vt = np.linalg.svd(isqrt_s @ cov_st @ isqrt_t)
    proj_s = isqrt_s @ u
    proj_t = isqrt_t @ vt.T
    matrix = proj_s @ np.linalg.pinv(proj_t, rcond=PINV_RCOND)
    if not np.all(np.isfinite(matrix)):
        raise NumericalError("CCA produced a non-finite transform; increase ridge")
    return Transform(matrix, orthogonal=False, method="cca",
                     correlations=np.clip(sigma, 0.0, 1.0))


def apply_transform(transform: Transform, space: EmbeddingSpace) -> EmbeddingSpace:
    if transform.dim != space.dim:
        raise AlignmentError(f"dimension mismatch: transform {transform.dim} vs space {space.dim}")
    return EmbeddingSpace(space.vocab, space.matrix @ transform.matrix)


def save_transform(transform: Transform, dest) -> None:
    """Text format: "<method> <orthogonal:0|1> <d>" header, then d rows of d reals."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8", newline="\n") as fh:
            save_transform(transform, fh)
        return
    dest.write(f"{transform.method} {int(transform.orthogonal)} {transform.dim}\n")
    for row in transform.matrix:
        dest.write(" ".join(fmt_float(x) for x in row))
        dest.write("\n")


def load_transform(source) -> Transform:
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            return load_transform(fh)
    header = source.readline().split()
    if len(header) != 3:
        raise EmbeddingFormatError(f"bad transform header {header!r}")
    method, ortho, d = header[0], header[1], header[2]
    try:
        d = int(d)
        ortho = bool(int(ortho))
    except ValueError:
        raise EmbeddingFormatError(f"bad transform header {header!r}") from None
    matrix = np.empty((d, d), dtype=np.float64)
    for i in range(d):
        parts = source.readline().split()
        if len(parts) != d:
            raise EmbeddingFormatError(f"transform row {i + 1}: expected {d} values, got {len(parts)}")
        try:
            matrix[i] = [float(x) for x in parts]
        except ValueError:
            raise EmbeddingFormatError(f"transform row {i + 1}: non-numeric value") from None
    return Transform(matrix, orthogonal=ortho, method=method)
