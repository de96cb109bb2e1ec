"""
Fixtures - registry of the committed designs, representatives, generators
and matrices, with checksums and the published metadata they come with
"""

import logging
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from config.settings import FIXTURE_DIR
from core.errors import FixtureError, FormatError
from utils.file_utils import (
    file_sha256,
    read_generators,
    read_incidence_text,
    read_subspaces,
    read_text_file,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FixtureInfo:
    name: str
    filename: str
    kind: str                      # blocks | reps | generators | display | permutation | bounds
    sha256: str
    description: str
    meta: Dict[str, object] = field(default_factory=dict)

    @property
    def path(self):
        return os.path.join(FIXTURE_DIR, self.filename)


FIXTURES = {info.name: info for info in [
    FixtureInfo('p2_2_3_7', 'p2_2_3_7.blocks', 'blocks',
                '552c3f199d997ec7f1416684f38eabfbda814a2d47d594cd716691039b9574dd',
                '329 blocks of a 2-(7,3,1)_2 packing',
                {'expected_size': 329, 'group': 'gen_n7'}),
    FixtureInfo('p2_2_3_8', 'p2_2_3_8.reps', 'reps',
                '94765cc365fd34b28b7f9b2cf09edc8d3ea602e3726ecd89f84df28b95489301',
                '196 H-orbit representatives, H of order 7 in a group of order 217',
                {'expected_size': 1312, 'group': 'gen_n8', 'subgroup_order': 7}),
    FixtureInfo('p2_2_3_11', 'p2_2_3_11.reps', 'reps',
                'f8adf48d7739e6f412741377b3c7242b4763944d63db30fa8e44dd32ae5886e9',
                '11 orbit representatives under NS(10,2) x 1',
                {'expected_size': 92411, 'group': 'gen_n11'}),
    FixtureInfo('p2_2_3_12', 'p2_2_3_12.reps', 'reps',
                'b6cdf964a852f76e0854f51b938fb8e27039414e26d7eecc2b855e1771a9e716',
                '10 orbit representatives under NS(12,2)',
                {'expected_size': 385515, 'group': 'gen_n12'}),
    FixtureInfo('p2_2_3_14', 'p2_2_3_14.reps', 'reps',
                '5d2fcff75e7b52346d23af4586847a373d1c48ee11604653ca967915de220ca0',
                '28 orbit representatives under NS(14,2)',
                {'expected_size': 5996178, 'group': 'gen_n14'}),
    FixtureInfo('example_g4', 'example_g4.gens', 'generators',
                '52f3bd70e6fd2748c6cd96167580cca076f0e81fda84837a7b7030d830248f80',
                'order 6 group on F_2^4 of the worked example',
                {'order': 6, 'subgroup_order': 3}),
    FixtureInfo('gen_n7', 'gen_n7.gens', 'generators',
                'b3bd615abc7664bb68c95e29cf3484e16e99096330a75797136b4777b625d4e7',
                'cyclic group of order 15 on F_2^7', {'order': 15}),
    FixtureInfo('gen_n8', 'gen_n8.gens', 'generators',
                'f5aa28dec2931b973ba617326ff4a624db4ad77fc28fedac3b62da7c1963054f',
                'cyclic group of order 217 on F_2^8', {'order': 217}),
    FixtureInfo('gen_n11', 'gen_n11.gens', 'generators',
                '19a71d52a777430c71c8608f578a061944959f84ae477ca67e02f4fb4e7a6e58',
                'NS(10,2) x 1 on F_2^11', {'order': 10230, 'table_order': 22517}),
    FixtureInfo('gen_n12', 'gen_n12.gens', 'generators',
                'bad2865abb86b21841c59a28748b593a37f4775935f6c07ab5135b2e007cfd24',
                'NS(12,2) on F_2^12', {'order': 49140}),
    FixtureInfo('gen_n14', 'gen_n14.gens', 'generators',
                '1e0d8e332400faa86ee3ff65406f1a5b8d0cdcda12576d359e3e6d894716968b',
                'NS(14,2) on F_2^14', {'order': 229362}),
    FixtureInfo('example_AH', 'example_AH.mat', 'display',
                '7997148342b85c45298274ff7499dc05e1536c1c65391fb49144b18566e7475a',
                'A^H_{1,2} of the worked example (7x13)'),
    FixtureInfo('example_Aprime', 'example_Aprime.mat', 'display',
                'e1e49d4bd6cb0a1b50d500ddd401b11587c7a0781745981dffb308893275144c',
                "intermediate matrix A' of the worked example (7x9)"),
    FixtureInfo('example_AG', 'example_AG.mat', 'display',
                '16e1dec25647dc214268fb822a9415dc10e08550b1f0266599e6f6743910fdb1',
                'A^G_{1,2} of the worked example (5x9)'),
    FixtureInfo('example_display', 'example_display.perm', 'permutation',
                '8bc2ddee0a424a1f075aeaed942e02a0845e141fd2690956190f6431647b4d60',
                'row and column permutations from the computed example matrices to the displays'),
    FixtureInfo('b2_2_3_bounds', 'b2_2_3_bounds.txt', 'bounds',
                'd05f6640ea42981b9db648d26f0798ea4a8db60c9a656cb76c4761f68e9e9f05',
                'lower and upper bounds on B_2(2,3,n), n = 6..14, from the literature'),
]}


@dataclass(frozen=True)
class BoundRow:
    n: int
    lower: int
    upper: int
    reference: str


@dataclass(frozen=True)
class DisplayMatrix:
    entries: np.ndarray
    col_weights: np.ndarray
    row_weights: Optional[np.ndarray] = None


@dataclass(frozen=True)
class DisplayMatch:
    """display row i is computed row rows[i]; display column j is computed column cols[j]"""
    rows: Tuple[int, ...]
    cols: Tuple[int, ...]

    def applies(self, A, D: DisplayMatrix) -> bool:
        """True when permuting A (entries and weights) gives D exactly"""
        if (len(self.rows), len(self.cols)) != D.entries.shape or A.shape != D.entries.shape:
            return False
        rows, cols = list(self.rows), list(self.cols)
        if sorted(rows) != list(range(A.shape[0])) or sorted(cols) != list(range(A.shape[1])):
            return False
        if not np.array_equal(A.entries.astype(np.int64)[np.ix_(rows, cols)], D.entries):
            return False
        if not np.array_equal(np.asarray(A.col_weights)[cols], D.col_weights):
            return False
        return D.row_weights is None or np.array_equal(np.asarray(A.row_weights)[rows], D.row_weights)


def fixture_info(name) -> FixtureInfo:
    try:
        return FIXTURES[name]
    except KeyError:
        raise FixtureError(f"unknown fixture '{name}'; known: {', '.join(sorted(FIXTURES))}") from None


def check_fixture(name) -> FixtureInfo:
    info = fixture_info(name)
    if not os.path.exists(info.path):
        raise FixtureError(f"fixture file {info.path} is missing")
    digest = file_sha256(info.path)
    if digest != info.sha256:
        raise FixtureError(f"checksum mismatch for {info.filename}: {digest}")
    return info


def _read_bounds(path) -> List[BoundRow]:
    rows = []
    for line in read_text_file(path).splitlines():
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        n, lower, upper, reference = line.split()
        rows.append(BoundRow(int(n), int(lower), int(upper), reference))
    return rows


def _read_permutations(path) -> Dict[str, DisplayMatch]:
    found: Dict[str, Dict[str, Tuple[int, ...]]] = {}
    for number, line in enumerate(read_text_file(path).splitlines(), 1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        parts = line.split()
        if len(parts) < 3 or parts[1] not in ('rows', 'cols'):
            raise FormatError("expected '<display> rows|cols <indices>'", path, number)
        try:
            found.setdefault(parts[0], {})[parts[1]] = tuple(int(p) for p in parts[2:])
        except ValueError:
            raise FormatError(f"not an integer list: {line!r}", path, number) from None
    incomplete = sorted(name for name, perms in found.items() if len(perms) != 2)
    if incomplete:
        raise FormatError(f"missing rows or cols for {', '.join(incomplete)}", path)
    return {name: DisplayMatch(perms['rows'], perms['cols']) for name, perms in found.items()}


def load_fixture(name):
    """Parsed contents of a fixture, verified against its checksum

    blocks/reps -> list of Subspace, generators -> GroupGens,
    display -> DisplayMatrix, permutation -> {display name: DisplayMatch},
    bounds -> list of BoundRow.
    """
    info = check_fixture(name)
    logger.debug("loading fixture %s (%s)", name, info.kind)
    if info.kind in ('blocks', 'reps'):
        return read_subspaces(info.path)[1]
    if info.kind == 'generators':
        return read_generators(info.path, name=name)
    if info.kind == 'display':
        entries, col_weights, row_weights = read_incidence_text(info.path)
        return DisplayMatrix(np.array(entries, dtype=np.int64), np.array(col_weights, dtype=np.int64),
                             None if row_weights is None else np.array(row_weights, dtype=np.int64))
    if info.kind == 'permutation':
        return _read_permutations(info.path)
    return _read_bounds(info.path)


def literature_bounds() -> Dict[int, BoundRow]:
    return {row.n: row for row in load_fixture('b2_2_3_bounds')}


def table_order_note(name, computed) -> Optional[str]:
    """Discrepancy line when the published table order differs from the computed one"""
    table = fixture_info(name).meta.get('table_order')
    if table is None or table == computed:
        return None
    logger.warning("group %s: computed order %d but the published table lists %d", name, computed, table)
    return f"table_order_mismatch fixture={name} computed={computed} table={table}"


def display_match(display) -> DisplayMatch:
    """Committed permutation for one of the display fixtures"""
    matches = load_fixture('example_display')
    if display not in matches:
        raise FixtureError(f"no committed permutation for display '{display}'")
    return matches[display]
