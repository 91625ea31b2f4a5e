import numpy as np
import pytest

from diffpeak import DistanceGraph, dpc_assign, sweep_tau
from diffpeak.model import NO_PARENT

TAU_GRID = [0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9]


def dist_graph(n, entries):
    entries = sorted(entries)
    return DistanceGraph(
        n=n,
        i=np.array([e[0] for e in entries], dtype=np.int64),
        j=np.array([e[1] for e in entries], dtype=np.int64),
        d=np.array([e[2] for e in entries], dtype=np.float64),
    )


def random_instance(rng, n=None):
    n = n or int(rng.integers(4, 60))
    rho = rng.uniform(0.1, 5.0, n)
    i, j = np.triu_indices(n, k=1)
    keep = rng.random(i.size) < rng.uniform(0.1, 0.6)
    d = rng.uniform(0.0, 1.0, int(keep.sum()))
    return rho, DistanceGraph(n=n, i=i[keep], j=j[keep], d=d)


def assert_forest(clustering):
    """Walk every parent chain; a cycle would revisit a point."""
    n = clustering.n
    for start in range(n):
        seen = set()
        node = start
        while clustering.parent[node] != NO_PARENT:
            assert node not in seen, f"cycle through {node}"
            seen.add(node)
            node = int(clustering.parent[node])


class TestHandCases:
    def test_descending_chain_forms_one_tree(self):
        rho = np.array([3.0, 2.0, 1.0])
        dist = dist_graph(3, [(0, 1, 0.1), (1, 2, 0.1)])
        c = dpc_assign(rho, dist, tau=0.7)
        assert c.parent.tolist() == [NO_PARENT, 0, 1]
        assert c.cluster_id.tolist() == [0, 0, 0]
        assert np.isnan(c.parent_distance[0])
        assert c.parent_distance[1] == 0.1

    def test_all_far_pairs_give_singletons(self):
        rho = np.array([3.0, 2.0, 1.0])
        dist = dist_graph(3, [(0, 1, 0.9), (1, 2, 0.8), (0, 2, 0.95)])
        c = dpc_assign(rho, dist, tau=0.7)
        assert np.all(c.parent == NO_PARENT)
        assert c.num_clusters == 3
        assert c.cluster_id.tolist() == [0, 1, 2]

    def test_equal_density_tie_connects_one_way(self):
        rho = np.array([1.0, 1.0])
        dist = dist_graph(2, [(0, 1, 0.2)])
        c = dpc_assign(rho, dist, tau=0.7)
        assert c.parent.tolist() == [NO_PARENT, 0]
        assert c.num_clusters == 1
        assert_forest(c)

    def test_distance_tie_picks_lowest_index(self):
        rho = np.array([5.0, 5.0, 1.0])
        dist = dist_graph(3, [(0, 2, 0.3), (1, 2, 0.3), (0, 1, 0.9)])
        c = dpc_assign(rho, dist, tau=0.7)
        assert c.parent[2] == 0


class TestProperties:
    def test_forest_and_total_order(self, rng):
        for _ in range(60):
            rho, dist = random_instance(rng)
            c = dpc_assign(rho, dist, tau=float(rng.uniform(0.2, 0.9)))
            assert_forest(c)
            linked = np.nonzero(c.parent != NO_PARENT)[0]
            for i in linked:
                p = c.parent[i]
                assert (rho[p] > rho[i]) or (rho[p] == rho[i] and p < i)

    def test_links_monotone_in_tau(self, rng):
        for _ in range(20):
            rho, dist = random_instance(rng)
            clusterings = sweep_tau(rho, dist, TAU_GRID)
            for lo, hi in zip(clusterings, clusterings[1:]):
                lo_links = np.nonzero(lo.parent != NO_PARENT)[0]
                assert np.all(hi.parent[lo_links] == lo.parent[lo_links])
                assert hi.num_clusters <= lo.num_clusters

    def test_permutation_equivariance(self, rng):
        for _ in range(20):
            rho, dist = random_instance(rng)
            n = rho.size
            perm = rng.permutation(n)
            pi, pj = perm[dist.i], perm[dist.j]
            swap = pi > pj
            pi[swap], pj[swap] = pj[swap], pi[swap]
            order = np.lexsort((pj, pi))
            permuted = DistanceGraph(n=n, i=pi[order], j=pj[order], d=dist.d[order])
            rho_p = np.empty(n)
            rho_p[perm] = rho
            base = dpc_assign(rho, dist, tau=0.7)
            moved = dpc_assign(rho_p, permuted, tau=0.7)
            # same partition after undoing the permutation
            base_ids = base.cluster_id
            moved_ids = moved.cluster_id[perm]
            mapping = {}
            for a, b in zip(base_ids.tolist(), moved_ids.tolist()):
                assert mapping.setdefault(a, b) == b
            assert len(set(mapping.values())) == len(mapping)

    def test_sweep_matches_individual_assignments(self, rng):
        rho, dist = random_instance(rng)
        swept = sweep_tau(rho, dist, TAU_GRID)
        for tau, c in zip(TAU_GRID, swept):
            single = dpc_assign(rho, dist, tau)
            np.testing.assert_array_equal(c.parent, single.parent)
            np.testing.assert_array_equal(c.cluster_id, single.cluster_id)

    def test_cluster_ids_follow_ascending_roots(self, rng):
        rho, dist = random_instance(rng)
        c = dpc_assign(rho, dist, tau=0.6)
        roots = c.roots()
        assert c.cluster_id[roots].tolist() == list(range(roots.size))


class TestValidation:
    def test_size_mismatch(self):
        dist = dist_graph(3, [(0, 1, 0.1)])
        with pytest.raises(ValueError, match="points"):
            dpc_assign(np.ones(5), dist, tau=0.5)

    def test_tau_domain(self):
        dist = dist_graph(2, [(0, 1, 0.1)])
        for tau in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(ValueError, match="tau"):
                dpc_assign(np.ones(2), dist, tau=tau)
