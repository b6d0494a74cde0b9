import io

import numpy as np
import pytest

from lscd.align import (
    SeedDictionary,
    apply_transform,
    build_seed_dictionary,
    fit_cca,
    fit_orthogonal,
    load_transform,
    save_transform,
)
from lscd.change import cosine_similarity
from lscd.corpus import Vocabulary, build_vocab
from lscd.errors import AlignmentError, NumericalError
from lscd.sgns import EmbeddingSpace


def space_of(words, matrix):
    return EmbeddingSpace(Vocabulary(list(words), [1] * len(words)), np.asarray(matrix, dtype=float))


def identity_dict(words):
    return SeedDictionary([(w, w) for w in words], "full_intersection_minus_targets")


def random_orthogonal(d, rng):
    # QR of a Gaussian matrix, sign-fixed: the planted-rotation oracle
    q, r = np.linalg.qr(rng.normal(size=(d, d)))
    return q * np.sign(np.diag(r))


def vocab_of(words):
    return build_vocab([list(words)], min_count=1)


class TestSeedDictionary:
    def test_intersection_minus_targets(self):
        src = vocab_of(["a", "b", "t"])
        tgt = vocab_of(["a", "b", "t", "c"])
        d = build_seed_dictionary(src, tgt, targets={"t"})
        assert sorted(d.pairs) == [("a", "a"), ("b", "b")]

    def test_random_k_does_not_exclude_targets(self):
        src = vocab_of(["a", "b", "t"])
        tgt = vocab_of(["a", "b", "t", "c"])
        d = build_seed_dictionary(src, tgt, targets={"t"}, mode="random_k", k=1, seed=0)
        assert len(d.pairs) == 1
        assert d.pairs[0] in [("a", "a"), ("b", "b"), ("t", "t")]

    def test_random_k_capped_at_intersection(self):
        src = vocab_of(["a", "b"])
        tgt = vocab_of(["a", "b", "c"])
        d = build_seed_dictionary(src, tgt, mode="random_k", k=100, seed=0)
        assert sorted(d.pairs) == [("a", "a"), ("b", "b")]

    def test_random_k_seed_deterministic(self):
        src = vocab_of(list("abcdefgh"))
        tgt = vocab_of(list("abcdefgh"))
        d1 = build_seed_dictionary(src, tgt, mode="random_k", k=3, seed=9)
        d2 = build_seed_dictionary(src, tgt, mode="random_k", k=3, seed=9)
        assert d1.pairs == d2.pairs

    def test_disjoint_vocabularies_rejected(self):
        with pytest.raises(AlignmentError):
            build_seed_dictionary(vocab_of(["a"]), vocab_of(["b"]))


class TestOrthogonalFit:
    def test_identity_when_spaces_equal(self):
        rng = np.random.default_rng(0)
        words = [f"w{i}" for i in range(20)]
        mat = rng.normal(size=(20, 6))
        src = space_of(words, mat)
        transform = fit_orthogonal(src, space_of(words, mat), identity_dict(words))
        assert np.abs(transform.matrix - np.eye(6)).max() < 1e-6

    @pytest.mark.parametrize("preprocess", ["none", "unit", "unit_center"])
    def test_recovers_planted_rotation(self, preprocess):
        rng = np.random.default_rng(1)
        d, n = 10, 50
        planted = random_orthogonal(d, rng)
        words = [f"w{i}" for i in range(n)]
        src_mat = rng.normal(size=(n, d))
        src = space_of(words, src_mat)
        tgt = space_of(words, src_mat @ planted)
        transform = fit_orthogonal(src, tgt, identity_dict(words), preprocess=preprocess)
        assert np.linalg.norm(transform.matrix - planted) < 1e-4

    def test_orthogonal_even_when_underdetermined(self):
        rng = np.random.default_rng(2)
        words = ["a", "b"]
        src = space_of(words, rng.normal(size=(2, 3)))
        tgt = space_of(words, rng.normal(size=(2, 3)))
        transform = fit_orthogonal(src, tgt, identity_dict(words))
        gram = transform.matrix.T @ transform.matrix
        assert np.abs(gram - np.eye(3)).max() < 1e-6
        assert transform.orthogonal

    def test_monte_carlo_optimality(self):
        # brute-force oracle: no random rotation beats the closed form
        rng = np.random.default_rng(3)
        for _ in range(5):
            d = int(rng.integers(2, 5))
            n = int(rng.integers(2, 7))
            words = [f"w{i}" for i in range(n)]
            s_mat = rng.normal(size=(n, d))
            t_mat = rng.normal(size=(n, d))
            transform = fit_orthogonal(space_of(words, s_mat), space_of(words, t_mat),
                                       identity_dict(words), preprocess="none")
            best = np.linalg.norm(s_mat @ transform.matrix - t_mat) ** 2

            samples = rng.normal(size=(2000, d, d))
            q, r = np.linalg.qr(samples)
            q *= np.sign(np.einsum("nii->ni", r))[:, None, :]
            objectives = np.linalg.norm(np.einsum("nd,mde->mne", s_mat, q) - t_mat, axis=(1, 2)) ** 2
            assert best <= objectives.min() + 1e-9

    def test_preserves_pairwise_cosines(self):
        rng = np.random.default_rng(4)
        d, n = 12, 40
        words = [f"w{i}" for i in range(n)]
        src = space_of(words, rng.normal(size=(n, d)))
        tgt = space_of(words, rng.normal(size=(n, d)))
        transform = fit_orthogonal(src, tgt, identity_dict(words))
        mapped = apply_transform(transform, src)
        for _ in range(200):
            i, j = rng.integers(0, n, size=2)
            if i == j:
                continue
            before = cosine_similarity(src.matrix[i], src.matrix[j])
            after = cosine_similarity(mapped.matrix[i], mapped.matrix[j])
            assert abs(before - after) < 1e-9

    def test_invariant_to_pair_order(self):
        rng = np.random.default_rng(5)
        words = [f"w{i}" for i in range(15)]
        src = space_of(words, rng.normal(size=(15, 4)))
        tgt = space_of(words, rng.normal(size=(15, 4)))
        t1 = fit_orthogonal(src, tgt, identity_dict(words))
        shuffled = list(words)
        rng.shuffle(shuffled)
        t2 = fit_orthogonal(src, tgt, identity_dict(shuffled))
        assert np.allclose(t1.matrix, t2.matrix, atol=1e-10)

    def test_zero_dictionary_vector_surfaces_error(self):
        words = ["a", "b"]
        src = space_of(words, [[0.0, 0.0], [1.0, 0.0]])
        tgt = space_of(words, [[1.0, 0.0], [0.0, 1.0]])
        with pytest.raises(NumericalError):
            fit_orthogonal(src, tgt, identity_dict(words), preprocess="unit")

    def test_dimension_mismatch(self):
        src = space_of(["a"], [[1.0, 0.0]])
        tgt = space_of(["a"], [[1.0, 0.0, 0.0]])
        with pytest.raises(AlignmentError):
            fit_orthogonal(src, tgt, identity_dict(["a"]))


class TestCcaFit:
    def test_one_dimensional_doubling(self):
        # hand oracle: t = 2s exactly; correlation 1, map multiplies by 2
        rng = np.random.default_rng(6)
        s = rng.normal(size=(30, 1))
        words = [f"w{i}" for i in range(30)]
        src = space_of(words, s)
        tgt = space_of(words, 2.0 * s)
        transform = fit_cca(src, tgt, identity_dict(words), ridge=0.0)
        assert transform.correlations[0] == pytest.approx(1.0, abs=1e-12)
        mapped = apply_transform(transform, src)
        assert np.abs(mapped.matrix - tgt.matrix).max() < 1e-9
        assert not transform.orthogonal

    def test_self_alignment_sanity(self):
        rng = np.random.default_rng(7)
        words = [f"w{i}" for i in range(100)]
        mat = rng.normal(size=(100, 5))
        src = space_of(words, mat)
        transform = fit_cca(src, space_of(words, mat), identity_dict(words))
        mapped = apply_transform(transform, src)
        for i in range(100):
            assert cosine_similarity(mapped.matrix[i], mat[i]) > 0.99

    def test_degenerate_pairs_need_ridge(self):
        words = ["a", "b"]
        mat = np.array([[1.0, 2.0], [1.0, 2.0]])
        src = space_of(words, mat)
        tgt = space_of(words, mat)
        with pytest.raises(NumericalError):
            fit_cca(src, tgt, identity_dict(words), ridge=0.0)
        transform = fit_cca(src, tgt, identity_dict(words), ridge=1e-5)
        assert np.all(np.isfinite(transform.matrix))

    def test_correlations_sorted_in_unit_interval(self):
        rng = np.random.default_rng(8)
        words = [f"w{i}" for i in range(60)]
        src = space_of(words, rng.normal(size=(60, 6)))
        tgt = space_of(words, rng.normal(size=(60, 6)))
        transform = fit_cca(src, tgt, identity_dict(words))
        corr = transform.correlations
        assert np.all(corr >= 0.0) and np.all(corr <= 1.0)
        assert np.all(np.diff(corr) <= 1e-12)

    def test_needs_two_pairs(self):
        src = space_of(["a"], [[1.0, 0.0]])
        with pytest.raises(AlignmentError):
            fit_cca(src, src, identity_dict(["a"]))


class TestApplyTransform:
    def test_identity(self):
        rng = np.random.default_rng(9)
        words = ["a", "b"]
        src = space_of(words, rng.normal(size=(2, 3)))
        from lscd.align import Transform
        out = apply_transform(Transform(np.eye(3), True, "procrustes"), src)
        assert np.array_equal(out.matrix, src.matrix)
        assert out.vocab.words == src.vocab.words

    def test_quarter_turn(self):
        from lscd.align import Transform
        rot = Transform(np.array([[0.0, 1.0], [-1.0, 0.0]]), True, "procrustes")
        src = space_of(["a"], [[1.0, 0.0]])
        out = apply_transform(rot, src)
        assert np.abs(out.matrix[0] - np.array([0.0, 1.0])).max() < 1e-12

    def test_dimension_mismatch(self):
        from lscd.align import Transform
        with pytest.raises(AlignmentError):
            apply_transform(Transform(np.eye(3), True, "procrustes"),
                            space_of(["a"], [[1.0, 0.0]]))


def test_transform_round_trip():
    rng = np.random.default_rng(10)
    words = [f"w{i}" for i in range(12)]
    src = space_of(words, rng.normal(size=(12, 4)))
    tgt = space_of(words, rng.normal(size=(12, 4)))
    for transform in (fit_orthogonal(src, tgt, identity_dict(words)),
                      fit_cca(src, tgt, identity_dict(words))):
        buf = io.StringIO()
        save_transform(transform, buf)
        buf.seek(0)
        loaded = load_transform(buf)
        assert np.array_equal(loaded.matrix, transform.matrix)
        assert loaded.orthogonal == transform.orthogonal
        assert loaded.method == transform.method
