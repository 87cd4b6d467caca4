import numpy as np
import pytest

from maxres import lap
from maxres import region as rg
from maxres import spectral as sp
from maxres.materials import Material2, Material3

RNG = np.random.default_rng(23)

MAT2 = Material2(1.3, 0.25, 0.9, mu=1.4)
MAT3 = Material3(0.5, 1.0 / 0.7)
OMEGA = 3.1


def far_current(grid, mat, ncomp, omega, margin=0.5):
    """Random band-limited current with all near-sphere modes removed."""
    J = sp.random_band_limited(grid, ncomp, RNG)
    c = J.coeffs().reshape(ncomp, -1)
    far, near = lap._mode_masks(grid, omega, mat, margin)
    c[:, near] = 0
    return sp.Field.from_coeffs(grid, c.reshape(J.data.shape))


def test_smooth_step_endpoints():
    assert lap._smooth_step(np.array([-1.0, 0.0]))[0] == 1.0
    assert lap._smooth_step(np.array([1.0, 2.0]))[1] == 0.0
    mid = lap._smooth_step(np.array([0.5]))[0]
    assert 0.0 < mid < 1.0


def test_cutoff_spec():
    beta = lap.CutoffSpec(2.0, 4.0)
    assert beta(np.array([[1.0, 0.0]]))[0] == 1.0
    assert beta(np.array([[5.0, 0.0]]))[0] == 0.0
    with pytest.raises(ValueError):
        lap.CutoffSpec(4.0, 2.0)


def test_surface_quadrature_total_measure():
    q2 = lap.surface_quadrature(3.0, np.eye(2), n=64)
    assert q2.weights.sum() == pytest.approx(2 * np.pi * 3.0)
    q3 = lap.surface_quadrature(2.0, np.eye(3), n=12)
    assert q3.weights.sum() == pytest.approx(4 * np.pi * 4.0)
    # anisotropic ellipsoid: coarea measure carries det(Q)^(-1/2)
    Q = np.diag([0.7, 2.0, 2.0])
    qa = lap.surface_quadrature(2.0, Q, n=12)
    assert qa.weights.sum() == pytest.approx(
        4 * np.pi * 4.0 / np.sqrt(np.linalg.det(Q)))


def test_offgrid_transform_reproduces_lattice():
    # at exact lattice wavevectors the semidiscrete transform returns
    # the FFT coefficients
    g = sp.Grid(2, 16)
    f = sp.random_band_limited(g, 1, RNG)
    xi_pts = np.array([[1.0, 2.0], [-3.0, 5.0], [0.0, 0.0]])
    amps = lap.offgrid_transform(f, xi_pts)
    c = f.coeffs().reshape(-1)
    xi = g.xi_flat()
    for k, pt in enumerate(xi_pts):
        idx = np.nonzero(np.all(xi == pt, axis=1))[0][0]
        assert abs(amps[0, k] - c[idx]) < 1e-12


def test_e_delta_lattice_single_mode():
    g = sp.Grid(2, 32)
    x = g.x_axis()
    X, Y = np.meshgrid(x, x, indexing='ij')
    f = sp.scalar_field(g, np.exp(1j * (2 * X + Y)))
    delta = 0.1
    beta = lap.CutoffSpec(10.0, 14.0)
    out = lap.e_delta(f, OMEGA, delta, +1, beta, 'euclidean', method='lattice')
    rho = np.sqrt(5.0)
    expect = f.data / (rho - (OMEGA + 1j * delta))
    assert np.abs(out.data - expect).max() < 1e-14


def test_e_delta_validation():
    g = sp.Grid(2, 16)
    f = sp.random_band_limited(g, 1, RNG)
    with pytest.raises(ValueError):
        lap.e_delta(f, -1.0, 0.1)
    with pytest.raises(ValueError):
        lap.e_delta(f, 2.0, 0.9)


def test_surface_part_closed_form():
    # a unit-coefficient spectrum is the interpolant of a grid delta;
    # its surface term is i pi beta(omega) |circle of radius omega|
    g = sp.Grid(2, 32)
    c = np.ones((1, 32, 32), dtype=complex)
    f = sp.Field.from_coeffs(g, c)
    beta = lap.CutoffSpec(10.0, 14.0)
    out = lap.surface_part(f, OMEGA, beta, 'euclidean', sign=+1,
                           n_sphere=256)
    val = out.data[0, 0, 0]     # x = 0: all phases are 1
    expect = 1j * np.pi * 2 * np.pi * OMEGA
    assert abs(val - expect) < 1e-10 * abs(expect)
    # opposite limit flips the sign
    out_m = lap.surface_part(f, OMEGA, beta, 'euclidean', sign=-1,
                             n_sphere=256)
    assert abs(out_m.data[0, 0, 0] + expect) < 1e-10 * abs(expect)


def _smooth_annulus(grid, lo, hi, shift=(0.7, -1.1)):
    xi = grid.xi_flat()
    r = np.sqrt(np.einsum('ki,ki->k', xi, xi))
    t = (r - lo) / (hi - lo)
    prof = np.where((t > 0) & (t < 1),
                    np.exp(-1.0 / np.clip(t * (1 - t), 1e-12, None) / 0.25),
                    0.0)
    c = prof * np.exp(1j * (xi @ np.asarray(shift)))
    return sp.Field.from_coeffs(grid, c.reshape((1,) + (grid.n,) * grid.dim))


def test_pv_pairing_agrees_with_plain():
    g = sp.Grid(2, 64)
    f = _smooth_annulus(g, 6.0, 10.0)
    beta = lap.CutoffSpec(18.0, 28.0)
    pv = lap.pv_part(f, OMEGA, beta, 'eps_prime', MAT2)
    plain = lap.pv_part(f, OMEGA, beta, 'eps_prime', MAT2, pairing=False)
    assert (sp.lebesgue_norm(pv - plain, 2)
            / sp.lebesgue_norm(pv, 2)) < 1e-10


def test_e_delta_norm_monotone_near_sphere():
    # |denominator| shrinks pointwise as delta decreases, so the norm of
    # e_delta f is nondecreasing for spectrum near the sphere
    g = sp.Grid(2, 64)
    f = _smooth_annulus(g, 1.0, 8.0)
    beta = lap.CutoffSpec(18.0, 28.0)
    norms = [sp.lebesgue_norm(
        lap.e_delta(f, OMEGA, d, +1, beta, 'eps_prime', MAT2,
                    method='lattice'), 2)
        for d in (0.4, 0.2, 0.1, 0.05)]
    assert all(b >= a for a, b in zip(norms, norms[1:]))


def test_pv_convergence_tolerance():
    g = sp.Grid(2, 64)
    f = _smooth_annulus(g, 1.0, 8.0)
    beta = lap.CutoffSpec(18.0, 28.0)
    out = lap.pv_part(f, OMEGA, beta, 'eps_prime', MAT2, tol=1e-2)
    assert np.isfinite(out.data).all()


def test_richardson_limit():
    # u(delta) = u0 + c delta + d delta^2 is resolved exactly
    u0, c, d = 1.7, -0.4, 2.3
    deltas = [0.1 * 2.0 ** -k for k in range(5)]
    vals = [u0 + c * t + d * t ** 2 for t in deltas]
    lim = lap.richardson_limit([np.array([v]) for v in vals])
    assert abs(lim[0] - u0) < 1e-12


@pytest.mark.parametrize('mat,grid,ncomp', [
    (MAT2, sp.Grid(2, 64), 3),
    (MAT3, sp.Grid(3, 16), 6),
])
def test_lap_solve_far_spectrum(mat, grid, ncomp):
    J = far_current(grid, mat, ncomp, OMEGA)
    uq = lap.lap_solve(OMEGA, J, mat, method='quadrature')
    ue = lap.lap_solve(OMEGA, J, mat, method='extrapolate')
    assert (sp.lebesgue_norm(uq - ue, 2)
            / sp.lebesgue_norm(uq, 2)) < 1e-10
    r = sp.forward_operator(OMEGA, uq, mat) - J
    assert (sp.lebesgue_norm(r, 2) / sp.lebesgue_norm(J, 2)) < 1e-10


@pytest.mark.parametrize('mat,grid,ncomp', [
    (MAT2, sp.Grid(2, 64), 3),
    (MAT3, sp.Grid(3, 16), 6),
])
def test_difference_identity(mat, grid, ncomp):
    J = sp.random_band_limited(grid, ncomp, RNG)
    up = lap.lap_solve(OMEGA, J, mat, sign=+1)
    um = lap.lap_solve(OMEGA, J, mat, sign=-1)
    st = lap.surface_terms(OMEGA, J, mat, sign=+1)
    diff = (up - um) - 2.0 * st
    denom = max(sp.lebesgue_norm(up - um, 2), 1e-300)
    assert sp.lebesgue_norm(diff, 2) / denom < 1e-10


def test_lap_solve_negative_omega():
    g = sp.Grid(2, 64)
    J = far_current(g, MAT2, 3, OMEGA)
    u = lap.lap_solve(-OMEGA, J, MAT2, sign=-1)
    r = sp.forward_operator(-OMEGA, u, MAT2) - J
    assert (sp.lebesgue_norm(r, 2) / sp.lebesgue_norm(J, 2)) < 1e-10


def test_lap_solve_cross_validation():
    g = sp.Grid(2, 64)
    J = far_current(g, MAT2, 3, OMEGA)
    u = lap.lap_solve(OMEGA, J, MAT2, cross_tol=1e-8)
    assert np.isfinite(u.data).all()


def test_blowup_probe_slope():
    g = sp.Grid(2, 64)
    mat = Material2(1.0, 0.0, 1.0)
    omega = rg.on_sphere_frequency(g, mat)
    deltas = [2.0 ** -k for k in range(3, 8)]
    fit, ds, ratios = lap.lap_blowup_probe(
        omega, rg.LebesguePair(0.5, 0.5, 2), mat, deltas, grid=g)
    assert fit.slope == pytest.approx(-1.0, abs=0.05)
