"""
Tests for plain and reduced incidence matrices, fusion, translation and
local modification
"""

import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import gl2, gl42
from core.errors import ConsistencyError, SolutionError
from core.gfmat import gaussian_binomial
from core.kramer_mesner import (
    Solution,
    admissible_columns,
    column_mask,
    fuse_matrix,
    is_feasible,
    local_modify,
    plain_matrix,
    reduced_matrix,
    saturate,
    translate_solution,
    zoom_prune,
)
from core.orbits import GroupGens, close_group, fuse, orbit_partition
from utils.file_utils import incidence_text, read_incidence_text
from utils.fixtures import display_match, load_fixture


class TestPlainMatrix:
    def test_lines_through_points(self):
        A = plain_matrix(4, 1, 2)
        assert A.shape == (15, 35)
        assert (A.entries.sum(axis=0) == 3).all()
        assert (A.entries.sum(axis=1) == gaussian_binomial(3, 1)).all()
        assert A.is_plain

    def test_planes_over_lines(self):
        A = plain_matrix(5, 2, 3)
        assert (A.entries.sum(axis=0) == gaussian_binomial(3, 2)).all()
        assert (A.entries.sum(axis=1) == gaussian_binomial(3, 1)).all()

    def test_ternary(self):
        A = plain_matrix(3, 1, 2, q=3)
        assert A.shape == (13, 13)
        assert (A.entries.sum(axis=0) == 4).all()

    def test_trivial_group_gives_plain_matrix(self):
        plain = plain_matrix(4, 1, 2)
        reduced = reduced_matrix(GroupGens.trivial(2, 4), 1, 2)
        assert np.array_equal(plain.entries, reduced.entries)
        assert plain.col_orbits == reduced.col_orbits


class TestReducedMatrix:
    def test_displays(self, example):
        for key, fixture in (('A_H', 'example_AH'), ('A_prime', 'example_Aprime'), ('A_G', 'example_AG')):
            assert display_match(fixture).applies(example[key], load_fixture(fixture)), key

    def test_display_mismatch_detected(self, example):
        display = load_fixture('example_AG')
        match = display_match('example_AG')
        display.entries[0, 0] += 1
        assert not match.applies(example['A_G'], display)
        swapped = dataclasses.replace(match, cols=(match.cols[1], match.cols[0]) + match.cols[2:])
        assert not swapped.applies(example['A_G'], load_fixture('example_AG'))
        assert not display_match('example_AH').applies(example['A_G'], load_fixture('example_AG'))

    def test_display_solutions(self, example):
        x = Solution.from_columns(example['A_G'], [display_match('example_AG').cols[j] for j in (2, 8)])
        y = translate_solution(x, example['fmap_cols'], example['A_H'])
        assert "".join("1" if y.selected[c] else "0" for c in display_match('example_AH').cols) == "0000100000001"

    def test_double_counting(self, example):
        for key in ('A_H', 'A_G'):
            assert example[key].double_counting_defects().size == 0

    def test_fusion_equals_direct(self, example):
        direct = reduced_matrix(example['G'], 1, 2, example['rows_G'], example['cols_G'])
        assert np.array_equal(example['A_G'].entries, direct.entries)
        assert np.array_equal(example['A_G'].col_weights, direct.col_weights)
        assert np.array_equal(example['A_G'].row_weights, direct.row_weights)

    def test_fusion_rejects_mismatched_rows(self, example):
        A_H = example['A_H']
        broken = type(A_H)(A_H.q, A_H.n, A_H.t, A_H.k, A_H.row_orbits, A_H.col_orbits,
                           A_H.entries.copy(), A_H.row_weights, A_H.col_weights)
        # break equality of two rows that fuse into one G-orbit
        part = next(p for p in example['fmap_rows'].parts() if len(p) == 2)
        broken.entries[part[0]] = 0
        with pytest.raises(ConsistencyError, match="incidence preservation"):
            fuse_matrix(broken, example['fmap_cols'], example['fmap_rows'])

    def test_admissible_columns(self, example):
        A_G, A_H = example['A_G'], example['A_H']
        mask_G = admissible_columns(A_G)
        assert mask_G.sum() == 2
        assert set(A_G.col_weights[mask_G]) == {1}
        mask_H = admissible_columns(A_H)
        assert sorted(A_H.col_weights[mask_H]) == [1, 1, 3, 3]

    def test_larger_group_matrix(self):
        gens = load_fixture('gen_n7')
        A = reduced_matrix(gens, 2, 3, threads=2)
        assert A.double_counting_defects().size == 0
        assert int(A.col_weights.sum()) == gaussian_binomial(7, 3)
        assert int(A.row_weights.sum()) == gaussian_binomial(7, 2)

    def test_text_export(self, example, tmp_path):
        path = tmp_path / "ag.mat"
        path.write_text(incidence_text(example['A_G']))
        entries, col_weights, row_weights = read_incidence_text(str(path))
        assert entries == example['A_G'].entries.tolist()
        assert col_weights == example['A_G'].col_weights.tolist()
        assert row_weights == example['A_G'].row_weights.tolist()


def _all_admissible(A):
    return Solution(A, admissible_columns(A))


class TestTranslation:
    def test_example_translation(self, example):
        x = _all_admissible(example['A_G'])
        assert x.feasible and x.weighted_size == 2
        y = translate_solution(x, example['fmap_cols'], example['A_H'])
        assert y.weighted_size == 2
        assert sorted(example['A_H'].col_weights[y.selected]) == [1, 1]
        assert set(x.expand().blocks()) == set(y.expand().blocks())

    def test_infeasible_rejected(self, example):
        x = Solution(example['A_G'], np.ones(9, dtype=bool))
        with pytest.raises(SolutionError):
            translate_solution(x, example['fmap_cols'], example['A_H'])

    def test_prune_excludes_admissible_g_orbits(self, example):
        fmap, A_H = example['fmap_cols'], example['A_H']
        excluded = zoom_prune(fmap, admissible_columns(example['A_G']))
        mask = column_mask(A_H, fmap, excluded)
        assert mask.sum() == 2
        y = translate_solution(_all_admissible(example['A_G']), fmap, A_H)
        assert np.array_equal(mask, y.selected)

    @given(gl42(), st.integers(1, 15))
    def test_translation_preserves_blocks(self, g, divisor):
        G = GroupGens(2, 4, (g,))
        order = close_group(G).order
        step = divisor if order % divisor == 0 else 1
        H = GroupGens(2, 4, (g.power(step),))
        cols_G, cols_H = orbit_partition(G, 2), orbit_partition(H, 2)
        A_G = reduced_matrix(G, 1, 2, cols=cols_G, threads=1)
        A_H = reduced_matrix(H, 1, 2, cols=cols_H, threads=1)
        fmap = fuse(H, G, 2, fine=cols_H, coarse=cols_G)
        assert A_G.double_counting_defects().size == 0
        assert A_H.double_counting_defects().size == 0
        x = saturate(Solution.empty(A_G))
        y = translate_solution(x, fmap, A_H)
        assert y.feasible
        assert y.weighted_size == x.weighted_size
        assert set(x.expand(G).blocks()) == set(y.expand(H).blocks())
        assert_pruned_columns_conflict(x, y, fmap)

    @settings(max_examples=10)
    @given(gl2(5), st.integers(1, 31))
    def test_pruning_in_dimension_five(self, g, divisor):
        G = GroupGens(2, 5, (g,))
        order = close_group(G).order
        step = divisor if order % divisor == 0 else 1
        H = GroupGens(2, 5, (g.power(step),))
        cols_G, cols_H = orbit_partition(G, 2), orbit_partition(H, 2)
        A_G = reduced_matrix(G, 1, 2, cols=cols_G, threads=1)
        A_H = reduced_matrix(H, 1, 2, cols=cols_H, threads=1)
        fmap = fuse(H, G, 2, fine=cols_H, coarse=cols_G)
        x = saturate(Solution.empty(A_G))
        assert_pruned_columns_conflict(x, translate_solution(x, fmap, A_H), fmap)

    def test_pruning_in_example(self, example):
        x = _all_admissible(example['A_G'])
        y = translate_solution(x, example['fmap_cols'], example['A_H'])
        assert_pruned_columns_conflict(x, y, example['fmap_cols'])


def assert_pruned_columns_conflict(x, y, fmap):
    """Every excluded column outside y clashes with y"""
    A_H = y.matrix
    excluded = column_mask(A_H, fmap, zoom_prune(fmap, admissible_columns(x.matrix)))
    for c in np.flatnonzero(excluded & ~y.selected):
        assert not local_modify(y, add=[int(c)]).accepted, c


class TestSolutions:
    def test_bitstring_roundtrip(self, example):
        y = Solution.from_bitstring(example['A_H'], "0000100000001")
        assert y.to_bitstring() == "0000100000001"
        assert y.columns() == [4, 12]

    def test_bad_bitstring(self, example):
        with pytest.raises(SolutionError):
            Solution.from_bitstring(example['A_G'], "0012")
        with pytest.raises(SolutionError):
            Solution.from_bitstring(example['A_G'], "01")

    def test_is_feasible(self, example):
        A = example['A_G']
        assert is_feasible(A, np.zeros(9, dtype=bool))
        assert not is_feasible(A, np.ones(9, dtype=bool))

    def test_local_modify(self, example):
        A_H = example['A_H']
        y = translate_solution(_all_admissible(example['A_G']), example['fmap_cols'], A_H)
        free = [c for c in np.flatnonzero(admissible_columns(A_H)) if not y.selected[c]]
        assert len(free) == 2
        first = local_modify(y, add=[free[0]])
        assert first.accepted
        assert first.solution.weighted_size == 5
        both = local_modify(y, add=free)
        assert not both.accepted
        assert both.conflict_rows
        assert both.solution is y

    def test_remove_unselected(self, example):
        y = Solution.empty(example['A_H'])
        with pytest.raises(SolutionError):
            local_modify(y, remove=[0])

    def test_remove_then_saturate(self, example):
        A_H = example['A_H']
        y = translate_solution(_all_admissible(example['A_G']), example['fmap_cols'], A_H)
        removed = local_modify(y, remove=y.columns()[:1]).solution
        assert removed.weighted_size == 1
        assert saturate(removed).feasible
