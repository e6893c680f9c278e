import math

import numpy as np
import pytest

from polybell.errors import InternalInconsistencyError, InvalidParameterError, UnsupportedError
from polybell.polygon import (
    build_model, complement, effect_permutation, effect_value, mod1,
    orthogonality_graph, polygon_radius, state_permutation, transformation,
    transformations,
)


def test_mod1_wraps_to_n():
    assert mod1(5, 5) == 5
    assert mod1(6, 5) == 1
    assert mod1(0, 5) == 5
    assert mod1(-1, 4) == 3


@pytest.mark.parametrize("n", [1, 2, 3, 0, -2])
def test_small_n_rejected(n):
    with pytest.raises(InvalidParameterError):
        build_model(n)


def test_square_vertex_values():
    model = build_model(4)
    # r_4 = sec(pi/4)^(1/2) = 2^(1/4); the n-th vertex sits on the x axis
    assert model.radius == pytest.approx(2.0 ** 0.25, abs=1e-15)
    assert np.allclose(model.state(4), [2.0 ** 0.25, 0.0, 1.0], atol=1e-12)


@pytest.mark.parametrize("n", range(4, 13))
def test_geometry_invariants(n):
    model = build_model(n)
    assert np.allclose(model.states[:, 2], 1.0, atol=1e-15)
    radii = np.hypot(model.states[:, 0], model.states[:, 1])
    assert np.allclose(radii, model.radius, atol=1e-12)
    values = model.ray_effects @ model.states.T
    assert values.min() >= -1e-12
    assert values.max() <= 1.0 + 1e-12
    assert np.allclose(model.states @ model.unit, 1.0, atol=1e-15)
    assert np.allclose(model.states @ model.null, 0.0, atol=1e-15)


@pytest.mark.parametrize("n", range(4, 13))
def test_effect_sum_proportional_to_unit(n):
    model = build_model(n)
    total = model.ray_effects.sum(axis=0)
    coefficient = n / 2 if n % 2 == 0 else n / (1.0 + model.radius ** 2)
    assert np.allclose(total, coefficient * model.unit, atol=1e-12)


def test_effect_value_examples():
    odd = build_model(5)
    assert effect_value(odd.ray_effect(1), odd.state(1)) == pytest.approx(1.0, abs=1e-12)
    # on the centroid (0,0,1) every odd ray effect returns its z component
    centroid = np.array([0.0, 0.0, 1.0])
    expected = 1.0 / (1.0 + 1.0 / math.cos(math.pi / 5.0))
    for i in range(1, 6):
        assert effect_value(odd.ray_effect(i), centroid) == pytest.approx(expected, abs=1e-12)
    even = build_model(4)
    for i in range(1, 5):
        assert effect_value(even.ray_effect(i), centroid) == pytest.approx(0.5, abs=1e-15)


def test_complement_examples():
    model = build_model(6)
    assert np.allclose(complement(model, model.unit), model.null, atol=1e-15)
    assert np.allclose(complement(model, model.null), model.unit, atol=1e-15)
    # even gon: the complement of a ray effect is the antipodal ray effect
    for i in range(1, 7):
        assert np.allclose(complement(model, model.ray_effect(i)),
                           model.ray_effect(mod1(i + 3, 6)), atol=1e-12)
    # matches the hexagon pairing e_i + e_{i+3} = u
    for i in range(1, 7):
        assert np.allclose(model.ray_effect(i) + model.ray_effect(mod1(i + 3, 6)),
                           model.unit, atol=1e-12)


def test_transformation_basics():
    model = build_model(4)
    identity = transformation(model, 4, 1)
    assert np.allclose(identity.matrix, np.eye(3), atol=1e-15)
    rot = transformation(model, 1, 1)
    assert np.allclose(rot.matrix @ model.state(1), model.state(2), atol=1e-12)
    with pytest.raises(InvalidParameterError):
        transformation(model, 0, 1)
    with pytest.raises(InvalidParameterError):
        transformation(model, 5, 1)
    with pytest.raises(InvalidParameterError):
        transformation(model, 1, 2)


def test_reflections_are_involutions():
    model = build_model(5)
    refl = transformation(model, 1, -1)
    squared = refl.matrix @ refl.matrix
    for i in range(1, 6):
        assert np.allclose(squared @ model.state(i), model.state(i), atol=1e-12)


@pytest.mark.parametrize("n", range(4, 9))
def test_transformations_permute_vertices(n):
    model = build_model(n)
    for t in transformations(model):
        perm = state_permutation(model, t)
        assert sorted(perm) == list(range(1, n + 1))
        for i in range(1, n + 1):
            image = t.matrix @ model.state(i)
            assert np.abs(image - model.state(perm[i - 1])).max() <= 1e-9


def test_effect_permutation_examples():
    model = build_model(4)
    identity = transformation(model, 4, 1)
    assert effect_permutation(model, identity) == (1, 2, 3, 4)
    rot = transformation(model, 1, 1)
    assert effect_permutation(model, rot) == (2, 3, 4, 1)
    # some reflection reverses the effect order completely
    perms = {effect_permutation(model, t) for t in transformations(model)}
    assert (4, 3, 2, 1) in perms


def test_effect_permutation_rejects_foreign_matrix():
    model = build_model(5)
    with pytest.raises(InternalInconsistencyError):
        effect_permutation(model, np.diag([2.0, 2.0, 1.0]))


@pytest.mark.parametrize("n", [4, 5, 6, 8])
def test_effect_permutation_is_a_homomorphism(n):
    model = build_model(n)
    ts = transformations(model)
    perms = {id(t): effect_permutation(model, t) for t in ts}
    for t1 in ts:
        for t2 in ts:
            combined = effect_permutation(model, t1.matrix @ t2.matrix)
            p1, p2 = perms[id(t1)], perms[id(t2)]
            composed = tuple(p1[p2[i] - 1] for i in range(n))
            assert combined == composed


@pytest.mark.parametrize("n", [5, 7, 9, 11])
def test_orthogonality_graph_matches_brute_force(n):
    model = build_model(n)
    graph = orthogonality_graph(model)
    effects = {("e", i): model.ray_effect(i) for i in range(1, n + 1)}
    effects.update({("ebar", i): model.bar_effect(i) for i in range(1, n + 1)})
    # oracle: recompute every vanishing pair directly
    for a, va in effects.items():
        expected = sorted(b for b, vb in effects.items()
                          if b != a and abs(float(va @ vb)) <= 1e-9)
        assert list(graph[a]) == expected
    # stated structure: e_r is orthogonal to e_{r+(n-1)/2}, e_{r+(n+1)/2}, ebar_r
    for r in range(1, n + 1):
        neighbors = {("e", mod1(r + (n - 1) // 2, n)),
                     ("e", mod1(r + (n + 1) // 2, n)),
                     ("ebar", r)}
        assert set(graph[("e", r)]) == neighbors
        assert len(graph[("e", r)]) == 3


def test_pentagon_neighbor_example():
    graph = orthogonality_graph(build_model(5))
    assert set(graph[("e", 1)]) == {("e", 3), ("e", 4), ("ebar", 1)}


def test_bar_effect_orthogonal_to_its_ray():
    model = build_model(5)
    for i in range(1, 6):
        assert abs(float(model.bar_effect(i) @ model.ray_effect(i))) <= 1e-12


def test_orthogonality_graph_rejects_even():
    with pytest.raises(UnsupportedError):
        orthogonality_graph(build_model(6))


def test_radius_closed_form():
    for n in (4, 5, 6, 10):
        assert polygon_radius(n) == pytest.approx(
            math.sqrt(1.0 / math.cos(math.pi / n)), abs=1e-15)
