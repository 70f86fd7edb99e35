from __future__ import annotations

import random

import pytest

from qdesigns.catalog import builtin_group
from qdesigns.gf2 import BitMatrix, identity, mat_mul
from qdesigns.grassmann import gaussian_binomial, span
from qdesigns.groups import (
    act,
    close_group,
    element_order,
    orbit_of,
    orbit_partition,
    parse_generator_text,
    read_generator_file,
    write_generator_file,
)

# small cyclic test group: companion-style shift on GF(2)^3 of order 7
SHIFT3 = BitMatrix(3, (0b010, 0b100, 0b011))


def test_close_group_cyclic():
    g = close_group([SHIFT3])
    assert g.order == 7
    assert g.elements[0] == identity(3)
    assert element_order(SHIFT3) == 7


def test_close_group_rejects_singular():
    with pytest.raises(ValueError):
        close_group([BitMatrix(2, (0b01, 0b01))])


def test_closure_contains_all_products():
    g = close_group([SHIFT3])
    elems = set(m.rows for m in g.elements)
    for a in g.elements:
        for b in g.elements:
            assert mat_mul(a, b).rows in elems


def test_act_preserves_dimension_and_composition():
    rng = random.Random(21)
    g = close_group([SHIFT3])
    for _ in range(50):
        s = span(3, [rng.randrange(8) for _ in range(2)])
        for a in g.elements:
            img = act(s, a)
            assert img.dim == s.dim
        a, b = rng.choice(g.elements), rng.choice(g.elements)
        assert act(act(s, a), b) == act(s, mat_mul(a, b))


def test_act_identity():
    s = span(3, [0b011])
    assert act(s, identity(3)) == s


def test_orbit_of_line_under_shift():
    g = close_group([SHIFT3])
    orbit = orbit_of(span(3, [1]), g)
    # the order-7 cycle is transitive on the 7 nonzero vectors
    assert len(orbit) == 7


def test_orbit_partition_small():
    g = close_group([SHIFT3])
    part = orbit_partition(3, 1, g)
    assert part.sizes == [7]
    part2 = orbit_partition(3, 2, g)
    assert sorted(part2.sizes) == [7]
    assert sum(part2.sizes) == gaussian_binomial(3, 2)


def test_orbit_partition_indexing_consistency():
    g = close_group([SHIFT3])
    part = orbit_partition(3, 2, g)
    for i in range(part.n_orbits):
        for member in part.members(i):
            assert part.orbit_index(member) == i
    # representative is the lexicographically smallest member
    for i, rep in enumerate(part.representatives):
        assert rep.rows == min(m.rows for m in part.members(i))


def test_orbit_partition_orbit_sizes_divide_group_order():
    g = builtin_group()
    part = orbit_partition(8, 2, g)
    assert sum(part.sizes) == gaussian_binomial(8, 2)
    assert all(g.order % s == 0 for s in part.sizes)


def test_generator_file_roundtrip(tmp_path):
    path = tmp_path / "gens.txt"
    g = builtin_group()
    write_generator_file(path, g.generators)
    back = read_generator_file(path)
    assert tuple(back) == g.generators


def test_parse_generator_text_errors():
    with pytest.raises(ValueError):
        parse_generator_text("01\n10\n\n012\n101\n")  # bad digit
    with pytest.raises(ValueError):
        parse_generator_text("01\n10\n11\n")  # not square
    with pytest.raises(ValueError):
        parse_generator_text("   ")
