from __future__ import annotations

import itertools

import pytest

from qlattice import Cell, Configuration, GridSpec, config_index, index_to_config
from qlattice.errors import QLatticeError


def cfg(*cells: tuple[int, int]) -> Configuration:
    return Configuration(tuple(Cell(ax, ay) for ax, ay in cells))


def test_first_index_is_zero():
    grid = GridSpec(m=2, n=2)
    assert config_index(cfg((0, 0)), grid) == 0


def test_last_index_single_particle():
    grid = GridSpec(m=2, n=2)
    assert config_index(cfg((1, 1)), grid) == 3


def test_two_particle_example():
    grid = GridSpec(m=2, n=2)
    assert config_index(cfg((0, 0), (1, 1)), grid) == 3


def test_bijective_over_all_configurations():
    # Enumerate the full N=2 space on a 2x2 grid: 16 configurations.
    grid = GridSpec(m=2, n=2)
    seen = set()
    for a0x, a0y, a1x, a1y in itertools.product(range(2), repeat=4):
        c = cfg((a0x, a0y), (a1x, a1y))
        idx = config_index(c, grid)
        assert 0 <= idx < 16
        seen.add(idx)
        assert index_to_config(idx, grid, 2) == c
    assert len(seen) == 16


def test_row_major_particle0_slowest():
    grid = GridSpec(m=3, n=2)
    # Incrementing particle 0's ax jumps by (n * m * n) = 12.
    base = config_index(cfg((0, 0), (0, 0)), grid)
    bumped = config_index(cfg((1, 0), (0, 0)), grid)
    assert bumped - base == grid.n * grid.m * grid.n
    # Incrementing the last particle's ay moves by exactly 1.
    assert config_index(cfg((0, 0), (0, 1)), grid) - base == 1


def test_out_of_bounds_cell_rejected():
    grid = GridSpec(m=2, n=2)
    with pytest.raises(QLatticeError, match="cell outside grid"):
        config_index(cfg((2, 0)), grid)
    with pytest.raises(QLatticeError, match="cell outside grid"):
        config_index(cfg((0, -1)), grid)


def test_index_to_config_range_check():
    grid = GridSpec(m=2, n=2)
    with pytest.raises(QLatticeError):
        index_to_config(16, grid, 2)


def test_grid_invariants():
    with pytest.raises(QLatticeError, match="grid.m"):
        GridSpec(m=1, n=4)
    with pytest.raises(QLatticeError, match="grid.n"):
        GridSpec(m=4, n=1)
    with pytest.raises(QLatticeError, match="grid.dx"):
        GridSpec(m=4, n=4, dx=0.0)
    with pytest.raises(QLatticeError, match="grid.dy"):
        GridSpec(m=4, n=4, dy=-1.0)


def test_wrap():
    grid = GridSpec(m=4, n=3)
    assert grid.wrap(-1, 3) == Cell(3, 0)
    assert grid.wrap(4, -3) == Cell(0, 0)
