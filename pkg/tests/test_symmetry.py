import itertools
import math

import numpy as np
import pytest

from polybell.composite import maximally_entangled_state, pentagon_hardy_state, product_state, state_key
from polybell.errors import InvalidParameterError
from polybell.polygon import build_model
from polybell.symmetry import (
    act, burnside_orbit_count, canonical_form, compose, cycle_lengths,
    fixed_point_grid, fixed_subset_count, group_elements, indices_from_mask,
    is_canonical, mask_from_indices, orbit_representatives, orbit_summaries,
    product_index, state_orbit,
)

TABLE_GRID_4 = [
    [12870, 6, 70, 6, 70, 646, 70, 646],
    [6, 6, 6, 6, 6, 6, 6, 6],
    [70, 6, 70, 6, 70, 70, 70, 70],
    [6, 6, 6, 6, 6, 6, 6, 6],
    [70, 6, 70, 6, 70, 70, 70, 70],
    [646, 6, 70, 6, 70, 150, 70, 150],
    [70, 6, 70, 6, 70, 70, 70, 70],
    [646, 6, 70, 6, 70, 150, 70, 150],
]


def _element(group, label):
    return next(g for g in group if g.label == label)


def test_group_sizes():
    for n in (4, 5, 6):
        assert len(group_elements(build_model(n))) == 4 * n * n


def test_identity_permutation(model4):
    group = group_elements(model4)
    identity = _element(group, (4, 1, 4, 1))
    assert identity.is_identity
    assert np.array_equal(identity.perm, np.arange(16))


def test_cached_perm_matches_componentwise_rule(model5):
    from polybell.polygon import effect_permutation, transformation
    group = group_elements(model5)
    rng = np.random.default_rng(3)
    for g in rng.choice(len(group), size=12, replace=False):
        element = group[g]
        pa = effect_permutation(model5, transformation(model5, element.k1, element.s1))
        pb = effect_permutation(model5, transformation(model5, element.k2, element.s2))
        for i in range(1, 6):
            for j in range(1, 6):
                source = product_index(5, i, j) - 1
                target = product_index(5, pa[i - 1], pb[j - 1]) - 1
                assert element.perm[source] == target


def test_mask_roundtrip():
    mask = mask_from_indices([1, 2, 3, 4, 9, 10, 11, 12])
    assert indices_from_mask(mask) == (1, 2, 3, 4, 9, 10, 11, 12)
    assert mask == 0b111100001111


def test_act_reflection_rotation_example(model4):
    # the reflected-rotation on one side fixes two full rows of the index
    # grid and exchanges entries of the other two rows pairwise
    group = group_elements(model4)
    g = _element(group, (1, -1, 4, 1))
    fixed = mask_from_indices([1, 2, 3, 4, 9, 10, 11, 12])
    assert act(g, fixed) == fixed
    assert act(g, mask_from_indices([5])) == mask_from_indices([13])
    assert act(g, mask_from_indices([13])) == mask_from_indices([5])
    identity = _element(group, (4, 1, 4, 1))
    assert act(identity, fixed) == fixed


def test_act_is_group_action_exhaustive_n4(model4):
    group = group_elements(model4)
    samples = [
        mask_from_indices([1, 2, 3, 4, 9, 10, 11, 12]),
        mask_from_indices([1, 2, 3, 5, 8, 13, 15, 16]),
        mask_from_indices([2, 4, 6, 8, 10, 12, 14, 16]),
    ]
    for g in group:
        for h in group:
            gh = compose(g, h)
            for mask in samples:
                assert act(gh, mask) == act(g, act(h, mask))


def test_compose_matches_matrix_products(model5):
    group = group_elements(model5)
    rng = np.random.default_rng(5)
    idx = rng.integers(0, len(group), size=(20, 2))
    for a, b in idx:
        g, h = group[a], group[b]
        gh = compose(g, h)
        assert np.allclose(gh.matrix_a, g.matrix_a @ h.matrix_a, atol=1e-12)
        assert np.allclose(gh.matrix_b, g.matrix_b @ h.matrix_b, atol=1e-12)
        assert np.array_equal(gh.perm, g.perm[h.perm])


def test_canonical_form_properties(model4):
    group = group_elements(model4)
    mask = mask_from_indices([1, 3, 5, 7, 9, 11, 13, 15])
    canon = canonical_form(mask, group)
    assert canonical_form(canon, group) == canon
    orbit = {act(g, mask) for g in group}
    assert canon == min(orbit)
    assert sum(1 for member in orbit if is_canonical(member, group)) == 1


def test_brute_force_canonical_count_n4(model4):
    # oracle for both the orbit count and the streaming walk: scan all
    # C(16, 8) subsets and keep those minimal in their orbit
    group = group_elements(model4)
    count = 0
    for combo in itertools.combinations(range(16), 8):
        mask = sum(1 << c for c in combo)
        if is_canonical(mask, group):
            count += 1
    assert count == 283


def test_fixed_subset_count_examples(model4):
    group = group_elements(model4)
    identity = _element(group, (4, 1, 4, 1))
    assert fixed_subset_count(identity) == math.comb(16, 8) == 12870
    mixed = _element(group, (1, -1, 4, 1))
    assert fixed_subset_count(mixed) == 646
    # brute-force oracle for the same element
    brute = sum(1 for combo in itertools.combinations(range(16), 8)
                if act(mixed, sum(1 << c for c in combo))
                == sum(1 << c for c in combo))
    assert brute == 646
    rot_rot = _element(group, (1, 1, 1, 1))
    assert fixed_subset_count(rot_rot) == 6


def test_cycle_lengths_cover_all_points(model5):
    for g in group_elements(model5)[:10]:
        assert sum(cycle_lengths(g.perm)) == 25


def test_burnside_counts():
    assert burnside_orbit_count(4) == 283
    assert burnside_orbit_count(5) == 11103
    assert burnside_orbit_count(6) == 213962


def test_fixed_point_grid_matches_reference(model4):
    grid = fixed_point_grid(model4)
    assert grid.tolist() == TABLE_GRID_4
    assert int(grid.sum()) == 18112
    assert int(grid.sum()) // 64 == 283


@pytest.mark.parametrize("n", [4, 5])
def test_orbit_summaries_partition_everything(n):
    model = build_model(n)
    summaries = list(orbit_summaries(model))
    assert len(summaries) == burnside_orbit_count(n)
    total = sum(s.size for s in summaries)
    assert total == math.comb(n * n, 8)
    group_order = 4 * n * n
    assert all(group_order % s.size == 0 for s in summaries)
    reps = [s.representative for s in summaries]
    assert reps == sorted(reps)
    group = group_elements(model)
    for s in summaries[:25]:
        assert is_canonical(s.representative, group)


def test_orbit_representatives_max_order(model4):
    group = group_elements(model4)
    reps_min = list(orbit_representatives(model4, order="min"))
    reps_max = list(orbit_representatives(model4, order="max"))
    assert len(reps_min) == len(reps_max) == 283
    assert reps_max == sorted(reps_max, reverse=True)
    # both choices tile the same orbits
    assert sorted(canonical_form(m, group) for m in reps_max) == reps_min
    with pytest.raises(InvalidParameterError):
        list(orbit_representatives(model4, order="median"))


def test_state_orbit_sizes(model5):
    assert len(state_orbit(maximally_entangled_state(5), model5)) == 10
    assert len(state_orbit(pentagon_hardy_state(), model5)) == 100
    product_keys = set()
    for i in range(1, 6):
        for j in range(1, 6):
            product_keys.add(state_key(product_state(model5.state(i), model5.state(j))))
    orbit = state_orbit(product_state(model5.state(1), model5.state(2)), model5)
    assert all(state_key(member) in product_keys for member in orbit)
