"""Assembly tests: grids, mode forms, T_alpha, Dirichlet splits.

Derived oracles frozen below:

* v=0 eigenvalues of the canonical-weight pencil on [0, 30] (Dirichlet at
  30): inner solution J_0(kr), outer r^alpha (c1 J_alpha + c2 Y_alpha)(kr),
  matched at r=1 -- roots found by bisection on the 2x2 matching
  determinant (scipy.special Bessel + brentq, independent of any assembly
  here).
* ground state for alpha=1/2, v=-3*1_{r<=2}, r_max=30: piecewise
  J_0/trig/sinh shooting gives E0 = -2.445106627573.
"""

import math

import numpy as np
import pytest
from scipy.linalg import eigh, eigh_tridiagonal

from paulilt import field as F
from paulilt import operators as O

# v=0, r_max=30, Dirichlet at 30; rows: alpha -> three lowest eigenvalues
_BESSEL_MATCH_ROOTS = {
    0.3: (0.0041354080, 0.0285242839, 0.0751801058),
    0.5: (0.0028352671, 0.0255165855, 0.0708748418),
    0.8: (0.0013381695, 0.0223847652, 0.0667261345),
}
_WELL_GROUND = -2.445106627573  # alpha=0.5, v=-3 on [0,2], r_max=30


def geig(op):
    d = 1.0 / np.sqrt(op.mass)
    return eigh_tridiagonal(op.diag * d * d, op.off * d[:-1] * d[1:],
                            eigvals_only=True)


def count_below(op, thr):
    return int(np.sum(geig(op) < thr))


def q_alpha(alpha):
    # weighted-Hardy constant of the m=-1 chiral channel
    c = 2.0 ** (-2.0 * alpha - 1.0) * (1.0 - alpha) ** 2
    return c / (2.0 * alpha + c)


# ---------------------------------------------------------------- grids


def test_make_grid_basics():
    g = O.make_grid(50.0, 2000, 1.003)
    assert g.contains_one and g.r[g.idx_one] == 1.0
    assert g.r[0] > 0 and np.all(np.diff(g.r) > 0)
    assert g.r[-1] == 50.0
    assert np.all(g.w > 0)
    assert g.w.sum() == pytest.approx(g.r_max - g.r[0], rel=1e-13)
    # graded towards the origin
    assert g.spacing()[-1] > 10 * g.spacing()[0]


def test_make_grid_uniform_fallback():
    g = O.make_grid(10.0, 64, 1.0)
    assert g.r[g.idx_one] == 1.0
    dr = g.spacing()
    assert dr.max() < 1.2 * dr.min()


def test_make_grid_validation():
    with pytest.raises(ValueError):
        O.make_grid(0.9, 100, 1.003)
    with pytest.raises(ValueError):
        O.make_grid(10.0, 32, 1.003)
    with pytest.raises(ValueError):
        O.make_grid(10.0, 100, 0.97)


def test_refinement_pair():
    """Eigenvalues move O(spacing^2) between grids at n, 2n, 4n.

    grading-1 must scale like 1/n, otherwise doubling n only extends the
    resolved range towards the origin instead of halving local spacings.
    """
    def lowest(n):
        g = O.make_grid(30.0, n, 1.0 + 2.4 / n)
        op = O.assemble_mode(g, "model", 0.3, "-", 0,
                             lambda r: -5.0 * np.exp(-r * r))
        return geig(op)[0]

    l1, l2, l3 = lowest(400), lowest(800), lowest(1600)
    assert abs(l2 - l3) < abs(l1 - l2)
    assert 2.5 < (l1 - l2) / (l2 - l3) < 6.5


# ------------------------------------------------------- mode assembly


def gaussian_pot():
    return F.tabulate_h(F.FieldProfile("gaussian", 1.0), r_max=80.0, n=500)


def test_radial_laplacian_nonneg():
    g = O.make_grid(30.0, 800, 1.004)
    assert geig(O.assemble_mode(g, "model", 0.0, "-", 0))[0] >= -1e-8


@pytest.mark.parametrize("kind", O.WEIGHT_KINDS)
@pytest.mark.parametrize("sign", ["+", "-"])
def test_forms_nonneg_v0(kind, sign):
    g = O.make_grid(30.0, 400, 1.006)
    pot = gaussian_pot() if kind == "exact-h" else None
    for m in (0, -1, 2):
        for chiral in (False, True):
            op = O.assemble_mode(g, kind, 0.5, sign, m, chiral=chiral,
                                 potential=pot)
            assert np.all(op.mass > 0)
            assert geig(op)[0] >= -1e-8, (kind, sign, m, chiral)


def test_chiral_equals_expanded_at_alpha0():
    """At alpha=0 the cross term telescopes: same matrices exactly."""
    g = O.make_grid(30.0, 600, 1.004)
    for m in (-2, -1, 1, 3):
        for sign in ("+", "-"):
            c = O.assemble_mode(g, "model", 0.0, sign, m, chiral=True)
            e = O.assemble_mode(g, "model", 0.0, sign, m, chiral=False)
            scale = np.max(np.abs(e.diag))
            assert np.max(np.abs(c.diag - e.diag)) < 1e-12 * scale
            assert np.max(np.abs(c.off - e.off)) < 1e-12 * scale


def test_chiral_vs_expanded_cross_term():
    """chiral[u] = expanded[u] - 2 s m int W u u' / r dr, same quadrature."""
    g = O.make_grid(20.0, 500, 1.005)
    alpha, m, s = 0.4, 2, +1.0
    c = O.assemble_mode(g, "model", alpha, "+", m, chiral=True)
    e = O.assemble_mode(g, "model", alpha, "+", m, chiral=False)
    u = c.nodes * np.exp(-c.nodes)

    # cross integral on the same two-point Gauss rule, P1 interpolant of u
    ufull = np.concatenate(([0.0], u, [0.0]))  # Dirichlet values at both ends
    a, b = g.r[:-1], g.r[1:]
    h = b - a
    du = np.diff(ufull) / h
    cross = 0.0
    for x, om in zip((0.5 - 0.5 / math.sqrt(3), 0.5 + 0.5 / math.sqrt(3)),
                     (0.5, 0.5)):
        rg = a + x * h
        wg = O.weight_values("model", alpha, "+", rg)
        ug = ufull[:-1] * (1 - x) + ufull[1:] * x
        cross += np.sum(om * h * wg * ug * du / rg)

    lhs = c.form_value(u)
    rhs = e.form_value(u) - 2.0 * s * m * cross
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_h_minus():
    g = O.make_grid(30.0, 800, 1.004)
    assert geig(O.assemble_h_minus(g, 0.5))[0] >= -1e-8
    deep = O.assemble_h_minus(g, 0.5, lambda r: -50.0 * (r <= 1.0))
    assert count_below(deep, 0.0) >= 1
    # alpha -> 0: weight tends to r, entries match the plain assembly
    tiny = O.assemble_h_minus(g, 1e-12)
    lap = O.assemble_mode(g, "model", 0.0, "-", 0)
    np.testing.assert_allclose(tiny.diag, lap.diag, rtol=1e-10)
    np.testing.assert_allclose(tiny.off, lap.off, rtol=1e-10)
    with pytest.raises(ValueError):
        O.assemble_h_minus(g, 1.2)


def test_mode_monotonicity():
    g = O.make_grid(30.0, 600, 1.004)
    v = lambda r: -8.0 * np.exp(-r * r)
    lows = [geig(O.assemble_mode(g, "model", 0.4, "-", m, v))[0]
            for m in (0, 1, 2, 3)]
    assert lows == sorted(lows)


def test_exact_h_matches_model_for_circle_field():
    """ac-circle h with R=1 makes e^{-2h} r the canonical weight exactly."""
    g = O.make_grid(30.0, 400, 1.006)
    pot = F.tabulate_h(F.FieldProfile("ac-circle", 0.5))
    ex = O.assemble_mode(g, "exact-h", 0.5, "-", 0, potential=pot)
    cw = O.assemble_mode(g, "canonical-w", 0.5, "-", 0)
    np.testing.assert_allclose(ex.diag, cw.diag, rtol=1e-12)
    np.testing.assert_allclose(ex.off, cw.off, rtol=1e-12)


def test_assemble_mode_validation():
    g = O.make_grid(10.0, 200, 1.01)
    with pytest.raises(ValueError):
        O.assemble_mode(g, "quartic", 0.5, "-", 0)
    with pytest.raises(ValueError):
        O.assemble_mode(g, "exact-h", 0.5, "-", 0)  # no potential supplied
    with pytest.raises(ValueError):
        O.assemble_mode(g, "model", 0.5, "x", 0)
    with pytest.raises(ValueError):
        O.assemble_mode(g, "model", 0.5, "-", 1.5)
    with pytest.raises(ValueError):
        O.assemble_mode(g, "model", 0.5, "-", 0, np.zeros(7))


# ------------------------------------------------------------- T_alpha


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8])
def test_T_alpha_and_canonical_match_oracle(alpha):
    g = O.make_grid(30.0, 1200, 1.003)
    roots = _BESSEL_MATCH_ROOTS[alpha]
    eT = geig(O.assemble_T_alpha(g, alpha))[:3]
    eH = geig(O.assemble_mode(g, "canonical-w", alpha, "-", 0))[:3]
    np.testing.assert_allclose(eT, roots, rtol=2e-4)
    np.testing.assert_allclose(eH, roots, rtol=2e-4)


def test_T_alpha_nonneg():
    g = O.make_grid(30.0, 800, 1.004)
    for alpha in (0.2, 0.5, 1.0):
        assert geig(O.assemble_T_alpha(g, alpha))[0] >= -1e-8


def test_T_alpha_zero_limit_matches_radial_laplacian():
    g = O.make_grid(30.0, 800, 1.004)
    eT = geig(O.assemble_T_alpha(g, 1e-12))[:3]
    eL = geig(O.assemble_mode(g, "model", 0.0, "-", 0))[:3]
    np.testing.assert_allclose(eT, eL, rtol=1e-5)


def test_T_alpha_well_ground_matches_shooting():
    g = O.make_grid(30.0, 1600, 1.002)
    v = lambda r: -3.0 * (r <= 2.0)
    eT = geig(O.assemble_T_alpha(g, 0.5, v))[0]
    eH = geig(O.assemble_mode(g, "canonical-w", 0.5, "-", 0, v))[0]
    # sampled discontinuous well: node placement noise dominates, O(h) at
    # the jump
    assert eT == pytest.approx(_WELL_GROUND, abs=3e-3)
    assert eH == pytest.approx(_WELL_GROUND, abs=3e-3)


def test_T_alpha_validation():
    g = O.make_grid(10.0, 200, 1.01)
    with pytest.raises(ValueError):
        O.assemble_T_alpha(g, 1.5)
    bare = O.RadialGrid(r=g.r, w=g.w, r_max=g.r_max, grading=g.grading,
                        idx_one=None)
    with pytest.raises(ValueError, match="node at r=1"):
        O.assemble_T_alpha(bare, 0.5)


def test_U_conjugation_spectra():
    """T_alpha and the canonical-weight operator share their low spectrum."""
    v = lambda r: -3.0 * np.exp(-0.5 * r * r)
    for alpha in (0.3, 0.8):
        diffs = []
        for n in (700, 1400):
            g = O.make_grid(30.0, n, 1.004)
            eT = geig(O.assemble_T_alpha(g, alpha, v))[:3]
            eH = geig(O.assemble_mode(g, "canonical-w", alpha, "-", 0, v))[:3]
            diffs.append(np.max(np.abs(eT - eH)))
        assert diffs[1] < 2e-5
        assert diffs[1] < diffs[0]  # two-grid: the gap is discretization


# ---------------------------------------------------- Dirichlet splits


def well_operator(n=300):
    g = O.make_grid(12.0, n, 1.01)
    return O.assemble_mode(g, "model", 0.4, "-", 0,
                           lambda r: -9.0 * np.exp(-((r - 1.0) ** 2)))


def test_dirichlet_split_interlacing():
    op = well_operator()
    inner, outer = O.dirichlet_split(op)
    d = 1.0 / np.sqrt(op.mass)
    full = eigh(np.diag(d) @ op.dense() @ np.diag(d), eigvals_only=True)
    split = np.sort(np.concatenate([geig(inner), geig(outer)]))
    tol = 1e-12 * np.max(np.abs(full))
    for k in range(len(split)):
        assert full[k] <= split[k] + tol
        assert split[k] <= full[k + 1] + tol


def test_dirichlet_split_riesz_bracket():
    op = well_operator()
    inner, outer = O.dirichlet_split(op)
    ef, ei, eo = geig(op), geig(inner), geig(outer)
    for gamma in (0.5, 1.0):
        full = np.sum((-ef[ef < 0]) ** gamma)
        parts = (np.sum((-ei[ei < 0]) ** gamma)
                 + np.sum((-eo[eo < 0]) ** gamma) + (-ef[0]) ** gamma)
        assert full >= 0.1  # nonvacuous
        assert full <= parts + 1e-10


def test_dirichlet_split_v0_trivial():
    g = O.make_grid(12.0, 300, 1.01)
    op = O.assemble_mode(g, "model", 0.4, "-", 0)
    inner, outer = O.dirichlet_split(op)
    for o in (op, inner, outer):
        assert count_below(o, 0.0) == 0


def test_dirichlet_split_missing_node():
    g = O.make_grid(2000.0, 64, 1.0)  # node pinned to 1 is the first node
    op = O.assemble_mode(g, "model", 0.4, "-", 1)  # ...and it is constrained
    assert op.idx_one is None
    with pytest.raises(ValueError):
        O.dirichlet_split(op)


# ------------------------------------------------- weight comparisons


def test_smooth_model_sandwich_counting():
    """(1+r^2)^{1/2} <= 1+r <= sqrt(2)(1+r^2)^{1/2} transfers to counts."""
    g = O.make_grid(25.0, 700, 1.005)
    alpha, c = 0.6, 2.0 ** 0.6

    def count(kind, sign, v):
        return count_below(O.assemble_mode(g, kind, alpha, sign, 0, v), 0.0)

    checked = 0
    for depth in (2.0, 5.0, 12.0, 30.0):
        v = lambda r: -depth * np.exp(-r * r)
        vc = lambda r: -c * depth * np.exp(-r * r)
        # upper sign: model weight is the larger one
        assert count("model", "+", v) <= count("smooth", "+", vc)
        # lower sign: smooth weight is the larger one
        assert count("smooth", "-", v) <= count("model", "-", vc)
        checked += count("model", "+", v) + count("smooth", "-", v)
    assert checked >= 4  # the comparison was not vacuous


def test_exact_vs_model_counting():
    """N(H + V + tau) <= N(model op - q^{-1}(m+m-)^2 V_- + q^{-1} tau)."""
    prof = F.FieldProfile("gaussian", 1.0)
    pot = F.tabulate_h(prof, r_max=80.0, n=500)
    mp, mm = F.sup_bounds_m(prof)
    alpha = 0.5
    q = q_alpha(alpha)
    g = O.make_grid(25.0, 700, 1.005)
    v = lambda r: -8.0 * np.exp(-((r - 0.5) ** 2))
    v_scaled = lambda r: -(mp * mm) ** 2 / q * np.maximum(-v(g.r * 0 + r), 0)

    total_exact = 0
    for tau in (0.02, 0.1):
        for sign in ("+", "-"):
            for m in (-2, -1, 0, 1, 2):
                ex = O.assemble_mode(g, "exact-h", alpha, sign, m, v,
                                     chiral=True, potential=pot)
                mo = O.assemble_mode(g, "model", alpha, sign, m, v_scaled)
                n_ex = count_below(ex, -tau)
                n_mo = count_below(mo, -tau / q)
                assert n_ex <= n_mo, (sign, m, tau)
                total_exact += n_ex
    assert total_exact >= 4  # nonvacuous
