import numpy as np
import pytest

from csparse.embeddings import (
    BilingualLexicon,
    EmbeddingSpace,
    learn_projection,
    load_embeddings,
    load_lexicon,
    lookup,
    save_embeddings,
)
from csparse.errors import DataError
from csparse.nn import orthonormal_init


def write(tmp_path, text, name="vec.txt"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def make_space(words, rng, dim=4):
    return EmbeddingSpace(words, rng.standard_normal((len(words), dim)))


class TestLoad:
    def test_three_words_plus_unk(self, tmp_path):
        space = load_embeddings(
            write(tmp_path, "cat 1 2\ndog 3 4\nfish 5 6\n")
        )
        assert len(space) == 3
        assert space.dim == 2
        assert space.matrix.shape == (4, 2)
        np.testing.assert_array_equal(space.matrix[space.vocab["dog"]], [3.0, 4.0])

    def test_header_skipped(self, tmp_path):
        space = load_embeddings(write(tmp_path, "2 3\na 1 2 3\nb 4 5 6\n"))
        assert len(space) == 2
        assert space.dim == 3

    def test_unk_is_mean(self, tmp_path):
        space = load_embeddings(write(tmp_path, "a 1 2\nb 3 4\n"))
        np.testing.assert_allclose(space.matrix[space.unk_index], [2.0, 3.0])

    def test_ragged_row_names_line(self, tmp_path):
        with pytest.raises(DataError, match="line 2"):
            load_embeddings(write(tmp_path, "a 1 2\nb 3\n"))

    def test_duplicate_first_wins_with_warning(self, tmp_path):
        path = write(tmp_path, "a 1 2\na 9 9\n")
        with pytest.warns(UserWarning, match="duplicate"):
            space = load_embeddings(path)
        np.testing.assert_array_equal(space.matrix[space.vocab["a"]], [1.0, 2.0])

    def test_non_numeric_rejected(self, tmp_path):
        with pytest.raises(DataError, match="line 1"):
            load_embeddings(write(tmp_path, "a x y\n"))

    def test_empty_rejected(self, tmp_path):
        with pytest.raises(DataError, match="no vectors"):
            load_embeddings(write(tmp_path, ""))

    def test_save_load_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        space = make_space(["alpha", "beta", "Gamma"], rng)
        path = tmp_path / "out.txt"
        save_embeddings(path, space)
        loaded = load_embeddings(path)
        assert loaded.words == space.words
        np.testing.assert_array_equal(loaded.matrix, space.matrix)


class TestLookup:
    def test_known_word(self, tmp_path):
        space = load_embeddings(write(tmp_path, "cat 1 2\ndog 3 4\n"))
        np.testing.assert_array_equal(lookup(space, "cat"), [1.0, 2.0])

    def test_lowercase_fallback(self, tmp_path):
        space = load_embeddings(write(tmp_path, "cat 1 2\n"))
        np.testing.assert_array_equal(lookup(space, "CAT"), [1.0, 2.0])

    def test_exact_beats_lowercase(self, tmp_path):
        space = load_embeddings(write(tmp_path, "Cat 9 9\ncat 1 2\n"))
        np.testing.assert_array_equal(lookup(space, "Cat"), [9.0, 9.0])

    def test_oov_gets_unk(self, tmp_path):
        space = load_embeddings(write(tmp_path, "a 1 2\nb 3 4\n"))
        np.testing.assert_array_equal(
            lookup(space, "zzz"), space.matrix[space.unk_index]
        )

    def test_projection_is_right_multiply(self, tmp_path):
        space = load_embeddings(write(tmp_path, "a 1 2\n"))
        W = np.array([[0.0, 1.0], [1.0, 0.0]])
        np.testing.assert_array_equal(
            lookup(space, "a", projection=W), lookup(space, "a") @ W
        )


class TestLexicon:
    def test_load_and_lookup(self, tmp_path):
        path = write(tmp_path, "ghar\thouse\nghar\thome\npani\twater\n", "lex.tsv")
        lex = load_lexicon(path)
        assert len(lex) == 3
        assert lex.translations("ghar") == ["house", "home"]
        assert lex.translations("GHAR") == ["house", "home"]
        assert lex.reverse_translations("water") == ["pani"]
        assert lex.translations("missing") == []

    def test_bad_column_count(self, tmp_path):
        with pytest.raises(DataError, match="line 1"):
            load_lexicon(write(tmp_path, "just-one-column\n", "lex.tsv"))

    def test_empty_word_rejected(self, tmp_path):
        with pytest.raises(DataError, match="line 1"):
            load_lexicon(write(tmp_path, "\tx\n", "lex.tsv"))

    def test_empty_file_rejected(self, tmp_path):
        with pytest.raises(DataError, match="empty"):
            load_lexicon(write(tmp_path, "", "lex.tsv"))

    def test_duplicate_pair_ignored(self):
        lex = BilingualLexicon()
        lex.add("a", "x")
        lex.add("a", "x")
        assert lex.translations("a") == ["x"]


def identity_lexicon(words):
    lex = BilingualLexicon()
    for w in words:
        lex.add(w, w)
    return lex


class TestLearnProjection:
    def test_identity_when_spaces_match(self):
        rng = np.random.default_rng(1)
        words = [f"w{i}" for i in range(10)]
        src = make_space(words, rng)
        tgt = EmbeddingSpace(words, src.matrix[:-1].copy())
        W = learn_projection(src, tgt, identity_lexicon(words))
        np.testing.assert_allclose(W, np.eye(4), atol=1e-6)

    def test_recovers_planted_rotation(self):
        rng = np.random.default_rng(2)
        words = [f"w{i}" for i in range(30)]
        dim = 6
        X = rng.standard_normal((len(words), dim))
        R = orthonormal_init(dim, dim, 3)
        src = EmbeddingSpace(words, X)
        # Rotate AFTER the preprocessing transforms commute: unit rows map
        # to unit rows under R, so planting on normalized data is exact.
        Xn = X / np.linalg.norm(X, axis=1, keepdims=True)
        tgt = EmbeddingSpace(words, Xn @ R)
        src_n = EmbeddingSpace(words, Xn)
        W = learn_projection(src_n, tgt, identity_lexicon(words))
        np.testing.assert_allclose(W, R, atol=1e-6)

    def test_w_is_orthogonal(self):
        rng = np.random.default_rng(4)
        words = [f"w{i}" for i in range(20)]
        src = make_space(words, rng)
        tgt = make_space(words, rng)
        W = learn_projection(src, tgt, identity_lexicon(words))
        np.testing.assert_allclose(W.T @ W, np.eye(4), atol=1e-6)

    def test_projection_preserves_norms(self):
        rng = np.random.default_rng(5)
        words = [f"w{i}" for i in range(20)]
        src = make_space(words, rng)
        tgt = make_space(words, rng)
        W = learn_projection(src, tgt, identity_lexicon(words))
        vecs = rng.standard_normal((50, 4))
        np.testing.assert_allclose(
            np.linalg.norm(vecs @ W, axis=1), np.linalg.norm(vecs, axis=1), atol=1e-6
        )

    def test_deterministic(self):
        rng = np.random.default_rng(6)
        words = [f"w{i}" for i in range(15)]
        src = make_space(words, rng)
        tgt = make_space(words, rng)
        lex = identity_lexicon(words)
        np.testing.assert_array_equal(
            learn_projection(src, tgt, lex), learn_projection(src, tgt, lex)
        )

    def test_too_few_pairs(self):
        rng = np.random.default_rng(7)
        words = ["a", "b"]
        src = make_space(words, rng, dim=4)
        tgt = make_space(words, rng, dim=4)
        with pytest.raises(DataError, match="too few anchor pairs"):
            learn_projection(src, tgt, identity_lexicon(words))

    def test_dim_mismatch(self):
        rng = np.random.default_rng(8)
        src = make_space(["a"], rng, dim=3)
        tgt = make_space(["a"], rng, dim=4)
        with pytest.raises(DataError, match="dim mismatch"):
            learn_projection(src, tgt, identity_lexicon(["a"]))

    def test_matches_grid_search_in_two_dims(self):
        # Independent oracle: scan all 2x2 orthogonal matrices (rotations
        # and reflections) for the one maximizing the alignment objective
        # sum_i dot(x_i W, z_i) on preprocessed rows; the closed form must
        # achieve that optimum.
        rng = np.random.default_rng(9)
        words = ["p", "q", "r"]
        X = rng.standard_normal((3, 2))
        Z = rng.standard_normal((3, 2))
        src = EmbeddingSpace(words, X)
        tgt = EmbeddingSpace(words, Z)
        W = learn_projection(src, tgt, identity_lexicon(words))

        def prep(rows):
            unit = rows / np.linalg.norm(rows, axis=1, keepdims=True)
            return unit - unit.mean(axis=0, keepdims=True)

        Xp, Zp = prep(X), prep(Z)

        def objective(M):
            return float(np.sum((Xp @ M) * Zp))

        best = -np.inf
        for theta in np.linspace(0.0, 2 * np.pi, 200_001):
            c, s = np.cos(theta), np.sin(theta)
            for M in (np.array([[c, -s], [s, c]]), np.array([[c, s], [s, -c]])):
                best = max(best, objective(M))
        assert objective(W) == pytest.approx(best, abs=1e-4)
        assert objective(W) >= best - 1e-12
