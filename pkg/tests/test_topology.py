import numpy as np
import pytest

from linewsn.errors import (
    IndexOutOfRangeError,
    LengthMismatchError,
    NonPositiveRangeError,
    UnsortedPositionsError,
)
from linewsn.topology import (
    Topology,
    build_topology,
    downstream,
    is_connected_induced,
    min_connected_count,
    neighbors,
)

from conftest import connected_oracle, make_chain3, random_topology


class TestBuildTopology:
    def test_midpoint_reaches_both_sinks(self):
        t = make_chain3(0.6)
        assert neighbors(t, 1) == {0, 2}

    def test_short_radius_yields_no_edges(self):
        t = make_chain3(0.4)
        assert all(neighbors(t, i) == set() for i in range(3))

    def test_consecutive_pairs_only(self, chain6):
        expected = {0: {1}, 1: {0, 2}, 2: {1, 3}, 3: {2, 4}, 4: {3, 5}, 5: {4}}
        for i, adj in expected.items():
            assert neighbors(chain6, i) == adj

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            build_topology([0, 0.5, 1], [0.6, 0.6])

    def test_too_few_nodes(self):
        with pytest.raises(LengthMismatchError):
            build_topology([0, 1], [0.5, 0.5])

    def test_unsorted_positions(self):
        with pytest.raises(UnsortedPositionsError):
            build_topology([0, 0.7, 0.4, 1], [0.5] * 4)

    def test_non_positive_range(self):
        with pytest.raises(NonPositiveRangeError):
            build_topology([0, 0.5, 1], [0.6, 0.0, 0.6])

    def test_edge_at_exact_radius(self):
        t = build_topology([0.0, 0.5, 1.0], [0.5] * 3)
        assert neighbors(t, 1) == {0, 2}

    def test_explicit_adjacency_must_be_symmetric(self):
        with pytest.raises(LengthMismatchError):
            Topology.from_neighbor_sets(1, {0: {1}, 1: set(), 2: set()})

    def test_explicit_adjacency_bad_index(self):
        with pytest.raises(IndexOutOfRangeError):
            Topology.from_neighbor_sets(1, {0: {7}, 1: set(), 2: set()})


class TestNeighbors:
    def test_downstream_of_sink(self, chain6):
        assert neighbors(chain6, 0) == {1}
        assert downstream(chain6, 0) == (1,)

    def test_middle_sensor(self, chain6):
        assert neighbors(chain6, 2) == {1, 3}
        assert downstream(chain6, 2) == (3,)

    def test_index_out_of_range(self, chain6):
        with pytest.raises(IndexOutOfRangeError):
            neighbors(chain6, 6)
        with pytest.raises(IndexOutOfRangeError):
            neighbors(chain6, -1)

    def test_symmetry_under_equal_ranges(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            t = random_topology(rng, int(rng.integers(3, 9)))
            for i in range(t.n_sensors + 2):
                for j in neighbors(t, i):
                    assert i in neighbors(t, j)


class TestConnectivity:
    def test_full_chain_connected(self, chain6):
        assert is_connected_induced(chain6, {1, 2, 3, 4})

    def test_gap_disconnects(self, chain6):
        assert not is_connected_induced(chain6, {1, 3, 4})

    def test_empty_active_needs_adjacent_sinks(self, chain6):
        assert not is_connected_induced(chain6, set())
        wide = build_topology([0.0, 0.5, 1.0], [1.0] * 3)
        assert is_connected_induced(wide, set())

    def test_sensor_index_validated(self, chain6):
        with pytest.raises(IndexOutOfRangeError):
            is_connected_induced(chain6, {9})

    def test_matches_union_find_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(60):
            n = int(rng.integers(2, 10))
            t = random_topology(rng, n, 0.1, 0.6)
            active = {i for i in t.sensors() if rng.random() < 0.6}
            assert is_connected_induced(t, active) == connected_oracle(t, active)

    def test_monotone_in_supersets_of_connected_witness(self, chain6):
        assert is_connected_induced(chain6, {1, 2, 3, 4})
        # chain6 forces the full set; a wider instance exercises supersets
        t = build_topology([0.0, 0.2, 0.4, 0.6, 0.8, 1.0], [0.45] * 6)
        witness = {1, 3}
        assert is_connected_induced(t, witness)
        for extra in ({2}, {4}, {2, 4}):
            assert is_connected_induced(t, witness | extra)


class TestMinConnectedCount:
    def test_unique_route(self, chain6):
        assert min_connected_count(chain6, {1, 2, 3, 4}) == 4

    def test_single_candidate(self, chain3):
        assert min_connected_count(chain3, {1}) == 1

    def test_infeasible_candidates(self, chain6):
        assert min_connected_count(chain6, {1, 2, 4}) is None

    def test_adjacent_sinks_count_zero(self):
        wide = build_topology([0.0, 0.5, 1.0], [1.0] * 3)
        assert min_connected_count(wide, set()) == 0

    def test_subset_never_shortens(self):
        rng = np.random.default_rng(23)
        for _ in range(40):
            n = int(rng.integers(3, 10))
            t = random_topology(rng, n, 0.15, 0.5)
            full = set(t.sensors())
            sub = {i for i in full if rng.random() < 0.7}
            m_full = min_connected_count(t, full)
            m_sub = min_connected_count(t, sub)
            if m_sub is not None:
                assert m_full is not None and m_sub >= m_full

    def test_crossover_route_size(self, crossover):
        assert min_connected_count(crossover, {1, 2, 3, 4}) == 2
        assert min_connected_count(crossover, {1, 4}) is None
