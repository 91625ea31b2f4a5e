import numpy as np
import pytest

from diffpeak import (
    FeatureMatrix,
    build_knn,
    build_transition,
    candidate_pairs,
    cosine_distance,
    tpdi,
)
from conftest import dense_probs, random_transition, transition_from_rows


def brute_force_pairs(p):
    """O(n^2) oracle: pairs of rows with intersecting positive support."""
    supports = [set(idx[pr > 0].tolist()) for idx, pr in (p.row(i) for i in range(p.n))]
    out = []
    for i in range(p.n):
        for j in range(i + 1, p.n):
            if supports[i] & supports[j]:
                out.append((i, j))
    return out


def brute_force_tpdi(p):
    """Dense evaluation of the overlap distance for every pair."""
    dense = dense_probs(p)
    overlap = np.sqrt(dense) @ np.sqrt(dense).T
    return 1.0 - overlap


class TestTpdi:
    def test_identical_rows_have_distance_zero(self):
        p = transition_from_rows(
            {
                0: {0: 0.3, 1: 0.5, 2: 0.2},
                1: {0: 0.3, 1: 0.5, 2: 0.2},
                2: {2: 1.0},
            }
        )
        dist = tpdi(p)
        mask = (dist.i == 0) & (dist.j == 1)
        assert mask.sum() == 1
        assert dist.d[mask][0] == 0.0

    def test_disjoint_supports_omitted(self):
        p = transition_from_rows({0: {0: 1.0}, 1: {1: 1.0}})
        dist = tpdi(p)
        assert dist.num_pairs == 0

    def test_uniform_two_neighbor_case(self):
        # rows {a,b} and {b,c} with weight 1/2 each, one common neighbor:
        # Eq. evaluation gives 1 - sqrt(1/4) = 0.5, and so does the
        # Jaccard form 1 - 2J/(1+J) with J = 1/3
        p = transition_from_rows(
            {0: {2: 0.5, 3: 0.5}, 1: {3: 0.5, 4: 0.5}, 2: {2: 1.0}, 3: {3: 1.0}, 4: {4: 1.0}}
        )
        dist = tpdi(p)
        mask = (dist.i == 0) & (dist.j == 1)
        assert abs(dist.d[mask][0] - 0.5) < 1e-12

    def test_jaccard_identity_on_uniform_rows(self, rng):
        # uniform 1/K rows without self loops reduce to a Jaccard distance
        for _ in range(30):
            n, k = 30, 5
            rows = {}
            for i in range(n):
                choices = rng.choice(np.arange(n), size=k, replace=False)
                choices = choices[choices != i][: k - 1] if i in choices else choices
                rows[i] = {int(c): 1.0 / len(choices) for c in choices}
            # make all rows exactly K entries by re-drawing short ones
            for i in list(rows):
                while len(rows[i]) < k:
                    extra = int(rng.integers(0, n))
                    if extra != i and extra not in rows[i]:
                        rows[i] = {**{c: 1.0 / k for c in rows[i]}, extra: 1.0 / k}
                rows[i] = {c: 1.0 / k for c in rows[i]}
            p = transition_from_rows(rows, n=n)
            dist = tpdi(p)
            supports = [set(rows[i]) for i in range(n)]
            for i, j, d in zip(dist.i, dist.j, dist.d):
                jac = len(supports[i] & supports[j]) / len(supports[i] | supports[j])
                assert abs(d - (1.0 - 2.0 * jac / (1.0 + jac))) < 1e-9

    def test_range_symmetry_and_pair_set_on_random_matrices(self, rng):
        for _ in range(25):
            p = random_transition(rng, int(rng.integers(3, 60)), 5)
            dist = tpdi(p)
            assert np.all(dist.d >= 0.0) and np.all(dist.d <= 1.0)
            assert np.all(dist.i < dist.j)
            got = list(zip(dist.i.tolist(), dist.j.tolist()))
            assert got == brute_force_pairs(p)
            assert len(set(got)) == len(got)
            full = brute_force_tpdi(p)
            for i, j, d in zip(dist.i, dist.j, dist.d):
                assert abs(d - full[i, j]) < 1e-12
                assert abs(d - full[j, i]) < 1e-12

    def test_omitted_pairs_evaluate_to_one(self, rng):
        p = random_transition(rng, 40, 4)
        dist = tpdi(p)
        emitted = set(zip(dist.i.tolist(), dist.j.tolist()))
        full = brute_force_tpdi(p)
        for i in range(p.n):
            for j in range(i + 1, p.n):
                if (i, j) not in emitted:
                    assert full[i, j] == 1.0

    def test_block_size_independent(self, rng):
        p = random_transition(rng, 100, 6)
        a = tpdi(p)
        b = tpdi(p, block_size=7)
        np.testing.assert_array_equal(a.i, b.i)
        np.testing.assert_array_equal(a.j, b.j)
        np.testing.assert_array_equal(a.d, b.d)


class TestCandidatePairs:
    def test_identity_rows_share_nothing(self):
        p = transition_from_rows({i: {i: 1.0} for i in range(4)})
        assert candidate_pairs(p).shape == (0, 2)

    def test_shared_index_pairs_present(self):
        p = transition_from_rows({0: {2: 1.0}, 1: {2: 1.0}, 2: {2: 1.0}})
        pairs = candidate_pairs(p)
        assert pairs.tolist() == [[0, 1], [0, 2], [1, 2]]

    def test_matches_brute_force(self, rng):
        for _ in range(20):
            p = random_transition(rng, int(rng.integers(2, 120)), 6)
            pairs = candidate_pairs(p)
            assert [tuple(row) for row in pairs.tolist()] == brute_force_pairs(p)

    def test_zero_probability_entries_are_not_support(self):
        p = transition_from_rows({0: {2: 0.0, 0: 1.0}, 1: {2: 1.0}, 2: {2: 1.0}})
        pairs = candidate_pairs(p)
        assert (0, 1) not in {tuple(r) for r in pairs.tolist()}

    def test_max_bucket_caps_and_is_subset(self, rng):
        p = random_transition(rng, 60, 6)
        full = {tuple(r) for r in candidate_pairs(p).tolist()}
        capped = {tuple(r) for r in candidate_pairs(p, max_bucket=3).tolist()}
        assert capped <= full


class TestCosineDistance:
    def _features(self, rng, n, d):
        raw = rng.normal(size=(n, d))
        return FeatureMatrix((raw / np.linalg.norm(raw, axis=1, keepdims=True)).astype(np.float32))

    def test_identical_and_orthogonal(self):
        # hand-built graph so the orthogonal pair still shares support
        # (exact-zero similarities would otherwise drop it from the
        # candidate set, leaving its distance implicitly 1)
        from diffpeak import SimilarityGraph

        fm = FeatureMatrix(np.array([[1, 0], [1, 0], [0, 1]], dtype=np.float32))
        g = SimilarityGraph(
            indptr=np.array([0, 3, 5, 7]),
            indices=np.array([0, 1, 2, 1, 0, 2, 0]),
            weights=np.array([1, 1, 0.5, 1, 1, 1, 0.5], dtype=np.float32),
        )
        dist = cosine_distance(fm, g)
        lookup = {(i, j): d for i, j, d in zip(dist.i, dist.j, dist.d)}
        assert lookup[(0, 1)] == 0.0
        assert lookup[(0, 2)] == 1.0

    def test_matches_direct_dot_products(self, rng):
        fm = self._features(rng, 40, 6)
        g = build_knn(fm, k=5, self_loop=True)
        dist = cosine_distance(fm, g)
        x = fm.values.astype(np.float64)
        for i, j, d in zip(dist.i, dist.j, dist.d):
            expected = min(max(1.0 - float(x[i] @ x[j]), 0.0), 1.0)
            assert abs(d - expected) < 1e-12

    def test_same_pair_set_as_tpdi(self, rng):
        fm = self._features(rng, 50, 5)
        g = build_knn(fm, k=6, self_loop=True)
        cos = cosine_distance(fm, g)
        overlap = tpdi(build_transition(g))
        np.testing.assert_array_equal(cos.i, overlap.i)
        np.testing.assert_array_equal(cos.j, overlap.j)
