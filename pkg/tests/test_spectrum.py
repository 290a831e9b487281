"""Spectral pipeline tests against independent oracles.

The 2x2 section eigenvalues come from the quadratic formula, the masses
from a 120-digit reference run (Christoffel sum, numerator/derivative
quotient and measure completeness all agree on these digits), and the Weyl
function from its three structurally different routes.
"""

import math

import numpy as np
import pytest

from jspec.entire import KIND_CHAR, eval_series, series_coeffs
from jspec.errors import TailDominates
from jspec.polycore import second_kind_at_zero
from jspec.sequences import Geometric, JacobiParams, gamma_lower_bound
from jspec.spectrum import (
    associated_checks,
    char_via_second_kind,
    eigen_bisect,
    masses_and_vectors,
    orthonormality_check,
    point_spectrum,
    second_kind,
    second_kind_routes,
    section_eigenvalues,
    section_inverse_trace,
    sturm_count,
    truncate,
    weyl,
)

GEOM = JacobiParams(Geometric(0.25), 0.5)

# 120-digit reference values (independent high-precision run)
REF_MASSES = [
    0.9993047484667936,
    0.0006952492975648114,
    2.2356415848102893e-09,
    3.1193475539668106e-17,
    1.775465827088824e-27,
    4.008321695361601e-40,
    3.552427739481818e-55,
    1.2317137620111174e-72,
]
REF_LAMBDA0 = 11.841809843065835
REF_ASSOC_TRACE = 0.0044451005466138935


@pytest.fixture(scope="module")
def sd8():
    return point_spectrum(GEOM, 8, tol=1e-10)


@pytest.fixture(scope="module")
def sd12():
    return point_spectrum(GEOM, 12, tol=1e-10)


def test_truncate_entries():
    T = truncate(GEOM, 2)
    assert list(T.diag) == [12.0, 243.0]
    assert list(T.offdiag) == [6.0]
    T1 = truncate(GEOM, 1)
    assert T1.size == 1 and T1.diag[0] == 12.0


def test_sturm_counts():
    T = truncate(GEOM, 40)
    assert sturm_count(T, 3.0) == 0  # below gamma nothing
    lo, hi = T.gershgorin()
    assert sturm_count(T, hi * 1.001) == 40
    lam = section_eigenvalues(T, 2)
    assert sturm_count(T, float(np.sqrt(lam[0] * lam[1]))) == 1


def test_eigen_bisect_small_sections():
    assert eigen_bisect(truncate(GEOM, 1), 0) == pytest.approx(12.0, abs=1e-10)
    T2 = truncate(GEOM, 2)
    disc = math.sqrt(231.0**2 + 144.0)  # quadratic formula for [[12,6],[6,243]]
    assert eigen_bisect(T2, 0, tol=1e-12) == pytest.approx((255.0 - disc) / 2.0, rel=1e-13)
    assert eigen_bisect(T2, 1, tol=1e-12) == pytest.approx((255.0 + disc) / 2.0, rel=1e-13)


def test_point_spectrum_invariants(sd8):
    gamma = gamma_lower_bound(GEOM)
    assert np.all(sd8.lambdas >= gamma)
    assert np.all(np.diff(sd8.lambdas) > 0.0)
    assert np.all(sd8.masses > 0.0)
    assert float(np.sum(sd8.masses)) <= 1.0 + 1e-12
    assert sd8.completeness_defect <= 1e-8
    assert sd8.lambdas[0] == pytest.approx(REF_LAMBDA0, rel=1e-12)


def test_masses_match_reference(sd8):
    for j in range(8):
        assert sd8.masses[j] == pytest.approx(REF_MASSES[j], rel=1e-11)
        assert sd8.masses_quadrature[j] == pytest.approx(REF_MASSES[j], rel=1e-9)


def test_reciprocal_eigenvalue_sum_below_trace(sd8):
    from jspec.polycore import trace_inverse

    partial = float(np.sum(1.0 / sd8.lambdas))
    assert partial <= trace_inverse(GEOM) + 1e-15


def test_mass_vectors_and_residuals(sd8):
    md = masses_and_vectors(GEOM, sd8, n_max=30)
    assert np.all(md.eigen_residuals[:7] <= 1e-8)
    assert np.all(md.norm_residuals[:7] <= 1e-8)
    # vector route flags: series everywhere for this configuration
    assert set(md.mass_route) == {"series"}
    # the numerator at the ground eigenvalue is the measure's first moment
    # of the resolvent at that point; sanity: negative derivative, positive mass
    assert np.all(md.masses > 0.0)


def test_product_representation_converges(sd8):
    # partial products prod(1 - z/lambda_j) approach the series value at
    # z = gamma/2, with the defect controlled by the reciprocal tail
    z = gamma_lower_bound(GEOM) / 2.0
    ser = series_coeffs(GEOM, KIND_CHAR, 16, 60)
    target = eval_series(ser, z).value
    defects = []
    for J in range(2, 9):
        prod = float(np.prod(1.0 - z / sd8.lambdas[:J]))
        defects.append(abs(prod - target))
    assert defects[-1] < defects[0]
    from jspec.polycore import trace_inverse

    tail = trace_inverse(GEOM) - float(np.sum(1.0 / sd8.lambdas))
    assert defects[-1] <= abs(target) * (math.exp(z * tail) - 1.0) + 1e-13


def test_orthonormality(sd12):
    dev = orthonormality_check(GEOM, sd12, 8, tol=1e-6)
    assert dev <= 1e-6
    with pytest.raises(TailDominates):
        orthonormality_check(GEOM, point_spectrum(GEOM, 3, tol=1e-10), 8, tol=1e-10)


def test_weyl_three_routes(sd8):
    gamma = gamma_lower_bound(GEOM)
    for z in (0.0, -1.0, gamma / 2.0, float(np.sqrt(sd8.lambdas[1] * sd8.lambdas[2]))):
        w = weyl(GEOM, z, sd8)
        assert not w.series_failed
        vals = [w.series, w.poles, w.resolvent]
        assert max(vals) - min(vals) <= 1e-8 * max(1.0, abs(w.poles))
    w0 = weyl(GEOM, 0.0, sd8)
    assert w0.series == pytest.approx(second_kind_at_zero(GEOM, 0), rel=1e-12)


def test_weyl_asymptotics(sd8):
    w = weyl(GEOM, -1e6, sd8)
    assert w.poles == pytest.approx(1e-6, rel=0.02)


def test_weyl_rejects_spectrum_points(sd8):
    with pytest.raises(ValueError):
        weyl(GEOM, float(sd8.lambdas[2]), sd8)


def test_second_kind_routes():
    primary, alt = second_kind_routes(GEOM, 2, 1.0)
    assert alt is not None
    assert primary == pytest.approx(alt, rel=1e-9)
    # n = 0 at the origin reduces to the zero-point series
    p0, a0 = second_kind_routes(GEOM, 0, 0.0)
    assert p0 == pytest.approx(second_kind_at_zero(GEOM, 0), rel=1e-12)
    assert a0 == pytest.approx(p0, rel=1e-10)
    # consistency checked inside second_kind as well
    assert second_kind(GEOM, 1, 0.5) == pytest.approx(second_kind_routes(GEOM, 1, 0.5)[0])


def test_second_kind_matches_weyl(sd8):
    z = -2.0
    w = weyl(GEOM, z, sd8)
    assert second_kind(GEOM, 0, z) == pytest.approx(w.poles, rel=1e-9)


def test_char_via_second_kind():
    ser = series_coeffs(GEOM, KIND_CHAR, 16, 60)
    assert char_via_second_kind(GEOM, 0.0) == 1.0
    for z in (2.0, 5.0):
        direct = eval_series(ser, z).value
        assert char_via_second_kind(GEOM, z) == pytest.approx(direct, rel=1e-9)
    # slope at the origin is minus the trace of the inverse
    h = 1e-6
    slope = (char_via_second_kind(GEOM, h) - char_via_second_kind(GEOM, -h)) / (2.0 * h)
    assert slope == pytest.approx(-4.0 / 45.0, abs=1e-8)


def test_associated_operator():
    rep = associated_checks(GEOM, 60, n_zeros=5)
    assert rep.trace_rel_diff <= 1e-8
    assert np.max(rep.zero_rel_diffs) <= 1e-6
    assert rep.trace_sane
    assert rep.trace_direct == pytest.approx(REF_ASSOC_TRACE, rel=1e-10)
    # interlacing with the base spectrum: lambda_j < zero_j < lambda_{j+1};
    # for higher indices the zero and the next eigenvalue agree to every
    # float bit, so the strict comparison runs on the double-double words
    from jspec.doubledouble import dd_sub

    sd = point_spectrum(GEOM, 6, tol=1e-10)
    for i in range(5):
        lo_gap, _ = dd_sub(rep.numerator_zeros[i], rep.numerator_zeros_lo[i],
                           sd.lambdas[i], sd.lambdas_lo[i])
        hi_gap, _ = dd_sub(sd.lambdas[i + 1], sd.lambdas_lo[i + 1],
                           rep.numerator_zeros[i], rep.numerator_zeros_lo[i])
        assert lo_gap > 0.0
        assert hi_gap > 0.0


def test_section_trace_matches_eigen_sum():
    T = truncate(GEOM, 12)
    lams = section_eigenvalues(T, 12, rtol=1e-14)
    assert section_inverse_trace(T) == pytest.approx(float(np.sum(1.0 / lams)), rel=1e-12)


def test_interlacing_sections():
    prev = None
    for N in range(1, 16):
        lams = section_eigenvalues(truncate(GEOM, N), N, rtol=0.0)
        if prev is not None:
            for j in range(len(prev)):
                assert lams[j] <= prev[j] * (1.0 + 1e-14)
                assert prev[j] < lams[j + 1]
        prev = lams
