import json
import math
from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import quad
from scipy.optimize import brentq

from ptcomb.bloch import (
    BandEdgeDegeneracy,
    bloch_state,
    localization_metrics,
    norm_integral,
    psi,
    psi_profile,
    residuals,
)
from ptcomb.condition import big_b_real
from ptcomb.lattice import UnitCell, cell_from_json, make_pt_cell
from ptcomb.spectra import OutOfBandError, allowed_bands
from ptcomb.transfer import cell_matrix

from conftest import random_pt_cell

GOLDEN = json.loads((Path(__file__).parent / "golden" / "bloch_metrics.json").read_text())


def in_band_samples(rng, count, n_range=(2, 7)):
    out = []
    while len(out) < count:
        cell = random_pt_cell(rng, int(rng.integers(*n_range)), r=(0, 8), s=(-10, 10))
        e = rng.uniform(0.2, 30)
        if abs(big_b_real(cell, e)) < 1 - 1e-6:
            out.append((cell, e))
    return out


def test_free_particle_flat():
    st = bloch_state(UnitCell([(0, 0)] * 3), 1.3)
    x, d = psi_profile(st, 50)
    assert_allclose(d, 1 / 3, atol=1e-14)
    assert localization_metrics(st) == (pytest.approx(1.0), pytest.approx(1.0))
    assert st.q_a == pytest.approx((2 * math.pi - 3 * 1.3) / 3, abs=1e-12)


def test_residuals_random(rng):
    for cell, e in in_band_samples(rng, 300):
        for sign in "+-":
            r = residuals(bloch_state(cell, e, sign))
            assert r["matching"] <= 1e-10
            assert r["bloch"] <= 1e-10
            assert r["normalization"] <= 1e-10


def test_multiplier_is_cell_matrix_eigenvalue(rng):
    for cell, e in in_band_samples(rng, 50):
        m = cell_matrix(cell, e).entries
        st = bloch_state(cell, e, "+")
        lam = st.multiplier
        assert abs(lam) == pytest.approx(1.0, abs=1e-10)
        assert np.min(np.abs(np.linalg.eigvals(m) - lam)) <= 1e-9 * max(1.0, np.max(np.abs(m)))


def test_opposite_signs_give_conjugate_multipliers():
    cell = make_pt_cell([(3, 2)], 1)
    e = next(x for x in np.linspace(0.5, 10, 400) if abs(big_b_real(cell, x)) < 0.9)
    plus, minus = bloch_state(cell, e, "+"), bloch_state(cell, e, "-")
    assert plus.q_a == pytest.approx(-minus.q_a)
    assert 0 < plus.q_a < math.pi / cell.n


def test_phase_convention():
    st = bloch_state(make_pt_cell([(5, 19)], 3), 5.2)
    p0 = complex(psi(st, 0.0))
    assert p0.imag == pytest.approx(0, abs=1e-14) and p0.real > 0


def test_closed_form_normalisation_against_quadrature(rng):
    for cell, e in in_band_samples(rng, 40):
        st = bloch_state(cell, e, "+")
        total = 0.0
        for j in range(cell.n):
            val, _ = quad(lambda x: abs(complex(psi(st, x))) ** 2, j, j + 1, epsabs=1e-13, epsrel=1e-12, limit=200)
            total += val
        assert total == pytest.approx(1.0, abs=1e-8)
        assert norm_integral(st) == pytest.approx(total, abs=1e-8)


def test_profile_trapezoid_and_continuity(rng):
    for cell, e in in_band_samples(rng, 20):
        st = bloch_state(cell, e, "-")
        x, d = psi_profile(st, 20001)
        assert np.trapezoid(d, x) == pytest.approx(1.0, abs=1e-6)
        knots = np.arange(1, cell.n + 1, dtype=float)
        left = np.abs(psi(st, knots, "left")) ** 2
        right = np.abs(psi(st, knots, "right")) ** 2
        assert_allclose(left[:-1], right[:-1], atol=1e-9)


def test_profile_rejects_small_samples():
    with pytest.raises(ValueError):
        psi_profile(bloch_state(UnitCell([(0, 0)]), 1.0), 1)


def test_out_of_band_and_edge():
    kp = UnitCell([(5.0, 0.0)])
    with pytest.raises(OutOfBandError):
        bloch_state(kp, 4.0)
    edge = allowed_bands(kp, (0.1, 4))[0].eps_lo
    with pytest.raises((OutOfBandError, BandEdgeDegeneracy)):
        bloch_state(kp, edge)
    # just inside the edge, where the two eigenvectors nearly coincide
    e = brentq(lambda x: big_b_real(kp, x) - (1 - 5e-11), edge, edge + 0.1, xtol=1e-15)
    with pytest.raises(BandEdgeDegeneracy):
        bloch_state(kp, e)


def test_rejects_bad_sign_and_non_pt():
    with pytest.raises(ValueError):
        bloch_state(UnitCell([(0, 0)]), 1.0, "x")
    with pytest.raises(ValueError):
        bloch_state(UnitCell([(1, 1), (1, 1)]), 1.0)


def test_density_symmetric_about_pt_centre(rng):
    # PT maps each Bloch state onto itself: |psi(x)|^2 = |psi(N + 1 - x)|^2 (mod N)
    for cell, e in in_band_samples(rng, 40):
        n = cell.n
        x = np.linspace(0, n, 777)
        for sign in "+-":
            st = bloch_state(cell, e, sign)
            a = np.abs(psi(st, x)) ** 2
            b = np.abs(psi(st, np.mod(n + 1 - x, n))) ** 2
            assert_allclose(a, b, atol=1e-8)


def test_real_couplings_partner_is_reflection(rng):
    for _ in range(20):
        cell = random_pt_cell(rng, int(rng.integers(2, 6)), r=(0, 6), s=(0, 0))
        e = rng.uniform(0.5, 20)
        if abs(big_b_real(cell, e)) >= 1 - 1e-6:
            continue
        n = cell.n
        x = np.linspace(0, n, 301)
        plus, minus = bloch_state(cell, e, "+"), bloch_state(cell, e, "-")
        assert_allclose(np.abs(psi(plus, x)) ** 2, np.abs(psi(minus, np.mod(n + 1 - x, n))) ** 2, atol=1e-8)


def test_metrics_two_spike_limit():
    # strong barriers around a wide well: the low band lives in half the cell
    cell = make_pt_cell([(50, 0), (50, 0), (0, 0)])
    band = next(b for b in allowed_bands(cell, (0.05, 3.0)) if b.width > 0)
    pr, peak = localization_metrics(bloch_state(cell, band.eps_lo + 0.5 * band.width))
    assert pr < 0.4 and peak > 2.5


def test_metrics_match_sampled_profile(rng):
    for cell, e in in_band_samples(rng, 20):
        st = bloch_state(cell, e)
        x, d = psi_profile(st, 40001)
        pr, peak = localization_metrics(st)
        assert pr == pytest.approx(1 / (cell.n * np.trapezoid(d * d, x)), rel=1e-6)
        assert peak == pytest.approx(d.max() * cell.n, rel=1e-6)
        assert 0 < pr <= 1 and peak >= 1


@pytest.mark.parametrize("key", sorted(GOLDEN))
def test_golden_metrics(key):
    g = GOLDEN[key]
    st = bloch_state(cell_from_json({"couplings": g["couplings"]}), g["eps"], g["q_sign"])
    pr, peak = localization_metrics(st)
    assert pr == pytest.approx(g["participation_ratio"], rel=1e-9)
    assert peak == pytest.approx(g["peak_to_mean"], rel=1e-9)
    r = residuals(st)
    assert max(r.values()) <= 1e-8


def test_golden_directions():
    pr = {k: v["participation_ratio"] for k, v in GOLDEN.items()}
    # the imaginary coupling concentrates the state; the small eps shift spreads it
    assert pr["fig7_s19"] < pr["fig7_s0"]
    assert pr["fig8_e313"] > pr["fig8_e295"]
