from fractions import Fraction

import pytest

from errors import PolytopeError
from geometry import (
    AffineFunc, barycenter, build_polytope, check_delzant, clip, interval, standard_simplex, unit_cube,
)
from quadrature import volume


# =========================================
# build_polytope
# =========================================


def test_interval_vertices_and_labels():
    P = interval(0, 1)
    assert P.dim == 1
    assert sorted(v[0] for v in P.vertices) == [0, 1]
    assert P.labels[0] == AffineFunc((1,), 0)
    assert P.labels[1] == AffineFunc((-1,), 1)
    assert P.is_exact


def test_simplex_has_three_vertices():
    P = standard_simplex(2)
    assert set(P.vertices) == {(0, 0), (1, 0), (0, 1)}
    assert volume(P) == Fraction(1, 2)


def test_cube_facets():
    P = unit_cube(2)
    assert len(P.labels) == 4
    assert len(P.vertices) == 4
    assert sorted(P.facet_vertices(0)) == [(0, 0), (0, 1)]


def test_normals_are_reduced_to_primitive():
    P = build_polytope([[2, 0], [0, 3], [-1, -1]], [0, 0, 1])
    assert P.normals == [(1, 0), (0, 1), (-1, -1)]
    assert P.offsets == [0, 0, 1]


def test_gcd_reduction_scales_offset():
    P = build_polytope([[2], [-2]], [0, 4])
    assert P.labels[1] == AffineFunc((-1,), 2)
    assert sorted(v[0] for v in P.vertices) == [0, 2]


def test_rational_offsets_stay_exact():
    P = interval(Fraction(1, 3), Fraction(5, 2))
    assert sorted(v[0] for v in P.vertices) == [Fraction(1, 3), Fraction(5, 2)]
    assert P.is_interior((1,))
    assert not P.is_interior((Fraction(1, 3),))


def test_unbounded_region_rejected():
    with pytest.raises(PolytopeError, match="unbounded"):
        build_polytope([[1, 0], [0, 1], [1, 1]], [0, 0, 1])


def test_empty_interior_rejected():
    with pytest.raises(PolytopeError, match="empty interior"):
        build_polytope([[1], [-1]], [-2, 1])


def test_redundant_label_rejected():
    with pytest.raises(PolytopeError, match="redundant label 3"):
        build_polytope([[1, 0], [0, 1], [-1, -1], [-1, 0]], [0, 0, 1, 5])


def test_duplicate_label_rejected():
    with pytest.raises(PolytopeError, match="redundant label 1"):
        build_polytope([[1], [2], [-1]], [0, 0, 1])


def test_zero_normal_rejected():
    with pytest.raises(PolytopeError, match="label 1: normal must be nonzero"):
        build_polytope([[1, 0], [0, 0], [-1, -1]], [0, 0, 1])


def test_fractional_normal_rejected():
    with pytest.raises(PolytopeError, match="integers"):
        build_polytope([[0.5], [-1]], [0, 1])


def test_round_trip_through_dict():
    P = unit_cube(2)
    Q = type(P).from_dict(P.to_dict())
    assert Q.normals == P.normals and Q.offsets == P.offsets


# =========================================
# Delzant check
# =========================================


@pytest.mark.parametrize("P", [interval(0, 1), standard_simplex(2), unit_cube(2), standard_simplex(3)])
def test_standard_polytopes_are_delzant(P):
    assert check_delzant(P).passed


def test_weighted_projective_plane_fails_at_vertex():
    P = build_polytope([[1, 0], [0, 1], [-1, -2]], [0, 0, 1])
    report = check_delzant(P)
    assert not report.passed
    assert report.vertex == (0, Fraction(1, 2))
    assert report.facets == (0, 2)
    assert report.determinant == 2
    assert "|det| = 2" in report.reason


def test_hirzebruch_surface_is_delzant():
    P = build_polytope([[1, 0], [0, 1], [-1, -2], [0, -1]], [0, 0, 3, 1])
    assert check_delzant(P).passed


# =========================================
# clip and barycenter
# =========================================


def test_clip_simplex_corner():
    region = clip(standard_simplex(2), (1, 0), Fraction(1, 2))
    assert region.volume() == Fraction(1, 8)


def test_clip_outside_is_empty():
    assert clip(interval(0, 1), (1,), 2).is_empty


def test_clip_through_vertex_keeps_full_polytope():
    region = clip(unit_cube(2), (1, 1), 0)
    assert region.volume() == 1


def test_clip_diagonal_half_square():
    region = clip(unit_cube(2), (1, 1), 1)
    assert region.volume() == Fraction(1, 2)


def test_barycenters():
    assert barycenter(interval(0, 1)) == (Fraction(1, 2),)
    assert barycenter(standard_simplex(2)) == (Fraction(1, 3), Fraction(1, 3))
    assert barycenter(unit_cube(2)) == (Fraction(1, 2), Fraction(1, 2))
