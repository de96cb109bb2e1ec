"""
Shared pytest fixtures
"""

import os
import sys

import pytest
from hypothesis import settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from core.gfmat import FqMatrix
from core.kramer_mesner import intermediate_matrix, fuse_matrix, reduced_matrix
from core.orbits import close_group, cyclic_subgroup_of_order, fuse, orbit_partition
from utils.fixtures import load_fixture

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def example_group():
    return load_fixture('example_g4')


@pytest.fixture(scope="session")
def example_subgroup(example_group):
    return cyclic_subgroup_of_order(close_group(example_group), 3)


@pytest.fixture(scope="session")
def example(example_group, example_subgroup):
    """Orbit partitions and matrices of the order 6 / order 3 pair acting on F_2^4"""
    G, H = example_group, example_subgroup
    rows_H, cols_H = orbit_partition(H, 1), orbit_partition(H, 2)
    rows_G, cols_G = orbit_partition(G, 1), orbit_partition(G, 2)
    A_H = reduced_matrix(H, 1, 2, rows_H, cols_H, threads=2)
    fmap_cols = fuse(H, G, 2, fine=cols_H, coarse=cols_G)
    fmap_rows = fuse(H, G, 1, fine=rows_H, coarse=rows_G)
    return {
        'G': G, 'H': H,
        'rows_H': rows_H, 'cols_H': cols_H, 'rows_G': rows_G, 'cols_G': cols_G,
        'A_H': A_H,
        'A_prime': intermediate_matrix(A_H, fmap_cols),
        'A_G': fuse_matrix(A_H, fmap_cols, fmap_rows),
        'fmap_cols': fmap_cols, 'fmap_rows': fmap_rows,
    }


@st.composite
def gl2(draw, n=4):
    """A random element of GL(n, 2), built from column operations on the identity"""
    cols = [1 << i for i in range(n)]
    ops = st.tuples(st.integers(0, n - 1), st.integers(1, n - 1))
    for i, shift in draw(st.lists(ops, max_size=3 * n)):
        cols[(i + shift) % n] ^= cols[i]
    cols = draw(st.permutations(cols))
    return FqMatrix(2, n, tuple(cols))


def gl42():
    """A random element of GL(4, 2)"""
    return gl2(4)


@st.composite
def f2_vectors(draw, n=6, max_size=4):
    return draw(st.lists(st.integers(1, (1 << n) - 1), min_size=1, max_size=max_size))
