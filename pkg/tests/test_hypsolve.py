import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy.integrate import quad

from graphcensus.hypsolve import (
    REGULAR, FIXTURE_DIR, SolveError, angle_sums, bloch_wigner, build_ideal, clausen2,
    cusp_curves, edge_equations, format_ideal, load_ideal, lobachevsky, parse_ideal, solve,
    volume, volume_catalog,
)
from graphcensus.spine import apply_move23
from graphcensus.triangulation import StructureError

FIG8 = "0_3_1.tri"


def bloch_wigner_mpmath(z):
    z = mpmath.mpc(z.real, z.imag)
    return float(mpmath.im(mpmath.polylog(2, z)) + mpmath.arg(1 - z) * mpmath.log(abs(z)))


def fig8(ideal_path):
    return load_ideal(ideal_path(FIG8))


# -- fixtures and equations -----------------------------------------------------------------

def test_figure_eight_equations(ideal_path):
    it = fig8(ideal_path)
    assert it.edge_rows.shape == (2, 6)
    # each tetrahedron has every shape slot on two of its six edges
    assert it.edge_rows.sum(axis=0).tolist() == [2] * 6
    assert it.edge_rows.sum(axis=1).tolist() == [6, 6]
    # frozen from the shipped fixture
    assert it.edge_rows.tolist() == [[2, 1, 0, 1, 0, 2], [0, 1, 2, 1, 2, 0]]
    assert it.cusp_rows.shape == (1, 6)


def test_edge_count_equals_tetrahedra(ideal_path):
    for row in volume_catalog():
        it = load_ideal(ideal_path(row["name"] + ".tri"))
        assert len(it.edge_rows) == it.n


def test_fixture_round_trip(ideal_path):
    it = fig8(ideal_path)
    back = parse_ideal(format_ideal(it))
    assert back.tri == it.tri
    assert back.meridians == it.meridians


def test_unglued_face_rejected(ideal_path):
    text = open(ideal_path(FIG8)).read().replace("1:0132 1:1230", "- 1:1230", 1)
    with pytest.raises(StructureError):
        parse_ideal(text)


@pytest.mark.parametrize("line", ["meridian 0:", "meridian 0: (0,7,1)", "meridian 1: (0,0,1)"])
def test_bad_meridian_rejected(ideal_path, line):
    lines = open(ideal_path(FIG8)).read().splitlines()
    text = "\n".join(lines[:-1] + [line]) + "\n"
    with pytest.raises(StructureError):
        parse_ideal(text)


def test_closed_triangulation_rejected(closed_upto3):
    with pytest.raises(StructureError):
        build_ideal(closed_upto3[1][0], [[(0, 0, 1)]])


def test_automatic_cusp_curves(ideal_path):
    it = fig8(ideal_path)
    curves = cusp_curves(it.tri)
    assert len(curves) == 1
    auto = build_ideal(it.tri, curves)
    assert solve(auto).volume == pytest.approx(2.029883213, abs=1e-9)


# -- Newton solver --------------------------------------------------------------------------

def test_regular_shapes_satisfy_figure_eight(ideal_path):
    # substitution: every log is i*pi/3 and each edge row carries six of them
    it = fig8(ideal_path)
    sums = angle_sums(it, [REGULAR, REGULAR])
    assert np.allclose(sums, 2 * math.pi, atol=1e-14)


def test_figure_eight_solution(ideal_path):
    res = solve(fig8(ideal_path), REGULAR)
    assert res.geometric
    assert res.residual < 1e-11
    assert np.allclose(res.shapes, REGULAR, atol=1e-10)


def test_perturbed_start_same_solution(ideal_path):
    res = solve(fig8(ideal_path), complex(0.4, 0.9))
    assert np.allclose(res.shapes, REGULAR, atol=1e-10)


def test_lower_half_plane_start_rejected(ideal_path):
    with pytest.raises(ValueError):
        solve(fig8(ideal_path), complex(0.5, -0.5))


@pytest.mark.parametrize("name", ["0_3_1", "0_3_1_three", "0_4_1", "0_4_2", "0_4_3", "0_4_4"])
def test_solution_identities(ideal_path, name):
    it = load_ideal(ideal_path(name + ".tri"))
    res = solve(it)
    assert res.geometric and res.volume >= 0
    assert np.allclose(angle_sums(it, res.shapes), 2 * math.pi, atol=1e-9)
    for z in res.shapes:
        total = cmath.log(z) + cmath.log(1 / (1 - z)) + cmath.log(1 - 1 / z)
        assert abs(total - math.pi * 1j) < 1e-10


@pytest.mark.parametrize("name,vol", [
    ("0_3_1", 2.029883213), ("0_4_4", 2.828122088), ("0_4_2", 2.568970601),
    ("0_4_1", 2.029883213), ("0_4_3", 2.666744783),
])
def test_catalog_volumes(name, vol):
    rows = {r["name"]: r for r in volume_catalog()}
    assert rows[name]["volume"] == pytest.approx(vol, abs=1e-6)


def test_catalog_reports_failures(tmp_path):
    (tmp_path / "bad.tri").write_text("ideal\ntets 1\n")
    (tmp_path / "ok.tri").write_text(open(f"{FIXTURE_DIR}/{FIG8}").read())
    rows = {r["name"]: r for r in volume_catalog(str(tmp_path))}
    assert rows["bad"]["error"] and rows["ok"]["error"] is None


def test_move23_preserves_volume(ideal_path):
    it = fig8(ideal_path)
    base = solve(it).volume
    three = solve(load_ideal(ideal_path("0_3_1_three.tri"))).volume
    assert three == pytest.approx(base, abs=1e-8)
    # the shipped three-tetrahedron fixture is the 2-3 move on face (0, 0)
    moved, _ = apply_move23(it.tri, (0, 0))
    assert moved == load_ideal(ideal_path("0_3_1_three.tri")).tri


def test_move23_on_every_face(ideal_path):
    it = fig8(ideal_path)
    base = solve(it).volume
    for (t, f, nb, _, _) in it.tri.face_pairs():
        moved, _ = apply_move23(it.tri, (t, f))
        curves = cusp_curves(moved)
        res = solve(build_ideal(moved, curves))
        assert res.volume == pytest.approx(base, abs=1e-8)


def test_solve_error_type():
    assert issubclass(SolveError, RuntimeError)


# -- special functions ----------------------------------------------------------------------

upper = st.complex_numbers(min_magnitude=1e-3, max_magnitude=50, allow_nan=False,
                           allow_infinity=False)


@settings(max_examples=200, deadline=None)
@given(upper)
def test_bloch_wigner_matches_mpmath(z):
    assume(abs(z.imag) > 1e-6 and abs(1 - z) > 1e-3)
    assert bloch_wigner(z) == pytest.approx(bloch_wigner_mpmath(z), abs=1e-11)


@settings(max_examples=200, deadline=None)
@given(upper)
def test_bloch_wigner_antisymmetry(z):
    assume(abs(z.imag) > 1e-6 and abs(1 - z) > 1e-3)
    assert bloch_wigner(z.conjugate()) == pytest.approx(-bloch_wigner(z), abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(upper)
def test_bloch_wigner_shape_slots(z):
    assume(abs(z.imag) > 1e-6 and abs(1 - z) > 1e-3)
    d = bloch_wigner(z)
    assert bloch_wigner(1 / (1 - z)) == pytest.approx(d, abs=1e-10)
    assert bloch_wigner(1 - 1 / z) == pytest.approx(d, abs=1e-10)


def test_regular_tetrahedron_volume():
    assert volume([REGULAR]) == pytest.approx(1.0149416064, abs=1e-8)
    assert 3 * lobachevsky(math.pi / 3) == pytest.approx(volume([REGULAR]), abs=1e-8)


def test_volume_rejects_flat_tetrahedron():
    with pytest.raises(ValueError):
        volume([2.0 + 0j])


def test_lobachevsky_values():
    assert lobachevsky(math.pi / 2) == pytest.approx(0.0, abs=1e-15)
    assert 8 * lobachevsky(math.pi / 4) == pytest.approx(3.663862377, abs=1e-6)
    assert lobachevsky(0.3) == pytest.approx(-lobachevsky(math.pi - 0.3), abs=1e-14)
    assert lobachevsky(0.3 + math.pi) == pytest.approx(lobachevsky(0.3), abs=1e-14)


@pytest.mark.parametrize("theta", np.linspace(0.05, 3.1, 25))
def test_lobachevsky_matches_quadrature(theta):
    ref, _ = quad(lambda t: -math.log(abs(2 * math.sin(t))), 0, theta, limit=200,
                  points=[math.pi / 2] if theta > math.pi / 2 else None)
    assert lobachevsky(theta) == pytest.approx(ref, abs=1e-9)


@pytest.mark.parametrize("theta", [0.1, 1.0, 2.5, -1.3])
def test_clausen_matches_mpmath(theta):
    assert clausen2(theta) == pytest.approx(float(mpmath.clsin(2, theta)), abs=1e-12)


def test_edge_equations_shape(closed_upto3):
    tri = closed_upto3[2][0]
    assert edge_equations(tri).sum() == 6 * tri.n
