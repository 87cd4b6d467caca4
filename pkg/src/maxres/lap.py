"""Limiting absorption: the resolvent at real frequency.

Two routes to P_(+-)(omega) for real omega != 0:

* ``extrapolate``: solve at omega + i*sign*delta for a geometric delta
  sequence and Richardson-extrapolate to delta = 0.
* ``quadrature``: split the multiplier into its smooth background and
  the singular scalars 1/(i(omega - rho)); the smooth part acts on the
  frequency lattice, the singular part is evaluated as a continuum
  principal value plus a surface integral over the characteristic
  sphere, using off-grid quadrature nodes and the semidiscrete
  transform of the grid samples.

Scalar model operators (e_delta, pv_part, surface_part) expose the same
machinery for a single flavor norm, which is where the Sokhotsky limit
e_delta -> pv + i*pi*(surface) is quantitatively verified.
"""

from dataclasses import dataclass

import numpy as np

from .errors import MethodsDisagree, QuadratureNotConverged
from .materials import Material3
from . import multiplier, spectral, symbol

TAU = 2.0 * np.pi

_PT_CHUNK = 256


# ---------------------------------------------------------------------------
# smooth radial cutoff

def _smooth_step(t):
    """C-infinity step: 1 for t <= 0, 0 for t >= 1."""
    t = np.asarray(t, dtype=float)
    lo = np.clip(1.0 - t, 1e-300, None)
    hi = np.clip(t, 1e-300, None)
    with np.errstate(over='ignore'):
        f_lo = np.where(t < 1, np.exp(-1.0 / lo), 0.0)
        f_hi = np.where(t > 0, np.exp(-1.0 / hi), 0.0)
    out = np.where(t <= 0, 1.0, np.where(t >= 1, 0.0, f_lo / (f_lo + f_hi)))
    return out


@dataclass(frozen=True)
class CutoffSpec:
    """Radial bump: 1 on ||xi|| <= r_in, 0 on ||xi|| >= r_out."""

    r_in: float
    r_out: float

    def __post_init__(self):
        if not 0 < self.r_in < self.r_out:
            raise ValueError("need 0 < r_in < r_out")

    def radial(self, r):
        return _smooth_step((np.asarray(r, dtype=float) - self.r_in)
                            / (self.r_out - self.r_in))

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        return self.radial(np.sqrt(np.einsum('...i,...i->...', xi, xi)))


def sphere_stretch(qform):
    """Largest euclidean radius of the unit sphere of the quadratic form,
    i.e. 1/sqrt(min eigenvalue)."""
    return 1.0 / np.sqrt(np.linalg.eigvalsh(qform).min())


def default_cutoff(grid, omega, mat):
    """Plateau past every characteristic sphere, support inside the
    frequency band of the grid."""
    stretch = max(sphere_stretch(q)
                  for _, q in multiplier.singular_weights(omega, np.array(
                      [[1.0] + [0.5] * (mat.dim - 1)]), mat))
    r_in = 1.3 * abs(omega) * stretch
    r_out = 0.95 * np.pi * grid.n / grid.length
    if r_in >= r_out:
        raise ValueError("grid band too small for the cutoff plateau: "
                         "r_in=%g >= r_out=%g" % (r_in, r_out))
    return CutoffSpec(r_in, r_out)


def apply_cutoff(f, beta, complement=False):
    """Multiply spectral coefficients by beta(xi) (or 1 - beta)."""
    grid = f.grid
    vals = beta(grid.xi_flat())
    if complement:
        vals = 1.0 - vals
    c = f.coeffs().reshape(f.ncomp, -1) * vals
    return spectral.Field.from_coeffs(grid, c.reshape(f.data.shape))


# ---------------------------------------------------------------------------
# quadrature geometry

def _inv_sqrt_spd(Q):
    w, V = np.linalg.eigh(np.asarray(Q, dtype=float))
    return (V / np.sqrt(w)) @ V.T


def sphere_quadrature(dim, n):
    """Nodes and weights on the euclidean unit sphere.

    2D: n-point trapezoid rule on the circle (spectrally accurate).
    3D: n-point Gauss-Legendre in the polar cosine times a 2n-point
    trapezoid rule in azimuth.
    """
    if dim == 2:
        th = TAU * np.arange(n) / n
        pts = np.stack([np.cos(th), np.sin(th)], axis=-1)
        return pts, np.full(n, TAU / n)
    c, wc = np.polynomial.legendre.leggauss(n)
    phi = TAU * np.arange(2 * n) / (2 * n)
    s = np.sqrt(1.0 - c ** 2)
    pts = np.stack([np.outer(s, np.cos(phi)),
                    np.outer(s, np.sin(phi)),
                    np.outer(c, np.ones_like(phi))], axis=-1).reshape(-1, 3)
    w = np.outer(wc, np.full(phi.shape, TAU / (2 * n))).ravel()
    return pts, w


@dataclass
class SurfaceQuadrature:
    """Quadrature for the coarea (delta-shell) measure on the sphere
    { ||xi||_Q = radius }; weights sum to the surface measure
    det(Q)^(-1/2) radius^(d-1) |S^(d-1)|."""

    nodes: np.ndarray
    weights: np.ndarray
    radius: float
    qform: np.ndarray


def surface_quadrature(radius, qform, n=None):
    qform = np.asarray(qform, dtype=float)
    dim = qform.shape[0]
    if n is None:
        n = 128 if dim == 2 else 12
    u, w = sphere_quadrature(dim, n)
    R = _inv_sqrt_spd(qform)
    nodes = radius * u @ R.T
    dets = np.linalg.det(qform) ** -0.5
    weights = w * dets * radius ** (dim - 1)
    return SurfaceQuadrature(nodes=nodes, weights=weights,
                             radius=float(radius), qform=qform)


# ---------------------------------------------------------------------------
# semidiscrete transform at off-grid wavevectors

def _phase_factors(grid, xi_pts):
    """exp(-i x_j . xi_p) as an (npoints, npts) array, built from the
    tensor structure of the grid.

    Grid coordinates are taken centered in [-L/2, L/2); this halves the
    largest phase gradient and with it the node counts the sphere and
    radial rules need."""
    x = grid.x_axis()
    x = np.where(x >= 0.5 * grid.length, x - grid.length, x)
    facs = [np.exp(-1j * np.outer(x, xi_pts[:, a])) for a in range(grid.dim)]
    if grid.dim == 2:
        E = facs[0][:, None, :] * facs[1][None, :, :]
    else:
        E = (facs[0][:, None, None, :] * facs[1][None, :, None, :]
             * facs[2][None, None, :, :])
    return E.reshape(grid.npoints, -1)


def offgrid_transform(f, xi_pts):
    """Semidiscrete transform (1/N) sum_j f(x_j) e^{-i x_j xi} at
    arbitrary wavevectors; exact coefficients for band-limited f."""
    grid = f.grid
    flat = f.data.reshape(f.ncomp, -1)
    out = np.empty((f.ncomp, len(xi_pts)), dtype=complex)
    for s in range(0, len(xi_pts), _PT_CHUNK):
        E = _phase_factors(grid, xi_pts[s:s + _PT_CHUNK])
        out[:, s:s + E.shape[1]] = flat @ E / grid.npoints
    return out


def synthesize(grid, xi_pts, amps):
    """Evaluate sum_p amps_p e^{i x_j xi_p} on the grid."""
    amps = np.atleast_2d(amps)
    flat = np.zeros((amps.shape[0], grid.npoints), dtype=complex)
    for s in range(0, len(xi_pts), _PT_CHUNK):
        E = _phase_factors(grid, xi_pts[s:s + _PT_CHUNK])
        flat += amps[:, s:s + E.shape[1]] @ np.conj(E).T
    return spectral.Field(grid, flat.reshape((amps.shape[0],)
                                             + (grid.n,) * grid.dim))


def _apply_offgrid(J, xi_pts, coeffs, weight_fn=None, out_ncomp=None):
    """sum_p coeffs_p W(xi_p) Jhat(xi_p) e^{i x xi_p} in one pass."""
    grid = J.grid
    if out_ncomp is None:
        out_ncomp = J.ncomp
    flat_in = J.data.reshape(J.ncomp, -1)
    flat_out = np.zeros((out_ncomp, grid.npoints), dtype=complex)
    for s in range(0, len(xi_pts), _PT_CHUNK):
        pts = xi_pts[s:s + _PT_CHUNK]
        E = _phase_factors(grid, pts)
        vals = flat_in @ E / grid.npoints
        if weight_fn is None:
            amps = vals * coeffs[s:s + E.shape[1]]
        else:
            W = weight_fn(pts)
            amps = np.einsum('pij,jp->ip', W, vals) * coeffs[s:s + E.shape[1]]
        flat_out += amps @ np.conj(E).T
    return spectral.Field(grid, flat_out.reshape((out_ncomp,)
                                                 + (grid.n,) * grid.dim))


# ---------------------------------------------------------------------------
# radial-singular continuum quadrature

def _flavor_qform(flavor, mat, dim):
    if flavor == 'euclidean':
        return np.eye(dim)
    return spectral._flavor_qform(flavor, mat, dim)


def _radial_nodes(r0, r_max, n_radial, pairing=True, window=None):
    """Symmetric-pairing nodes for the principal value at r0 plus plain
    Gauss-Legendre tails covering (0, r_max).

    Returns (radii, signed coefficients c_i) such that
    p.v. int_0^{r_max} g(r)/(r - r0) dr ~= sum_i c_i g(r_i).
    """
    T = 0.5 * min(r0, max(r_max - r0, 1e-9)) if window is None \
        else min(window, 0.99 * r0)
    if pairing:
        t, wt = np.polynomial.legendre.leggauss(n_radial)
        t = 0.5 * T * (t + 1.0)
        wt = 0.5 * T * wt
        if window is not None:
            # smooth radial taper; the windowed integrand stays a
            # principal value because the taper is even in t
            wt = wt * _smooth_step(2.0 * t / T - 1.0)
        radii = [r0 + t, r0 - t]
        coefs = [wt / t, -wt / t]
        if window is not None:
            return np.concatenate(radii), np.concatenate(coefs)
    else:
        t, wt = np.polynomial.legendre.leggauss(2 * n_radial)
        r = r0 + T * t
        radii = [r]
        coefs = [T * wt / (r - r0)]
    for lo, hi in ((0.0, r0 - T), (r0 + T, r_max)):
        if hi - lo < 1e-12:
            continue
        s, ws = np.polynomial.legendre.leggauss(n_radial)
        r = 0.5 * (hi - lo) * (s + 1.0) + lo
        w = 0.5 * (hi - lo) * ws
        radii.append(r)
        coefs.append(w / (r - r0))
    return np.concatenate(radii), np.concatenate(coefs)


def _edelta_nodes(r0, r_max, delta, sign, n_radial):
    """Nodes and coefficients for int_0^{r_max} g(r)/(r - r0 - i s d) dr
    with the singular layer resolved by r = r0 + delta*sinh(u)."""
    T = 0.5 * min(r0, max(r_max - r0, 1e-9))
    S = np.arcsinh(T / delta)
    u, wu = np.polynomial.legendre.leggauss(2 * n_radial)
    u = S * u
    wu = S * wu
    sh = np.sinh(u)
    radii = [r0 + delta * sh]
    coefs = [wu * np.cosh(u) / (sh - 1j * sign)]
    for lo, hi in ((0.0, r0 - T), (r0 + T, r_max)):
        if hi - lo < 1e-12:
            continue
        s, ws = np.polynomial.legendre.leggauss(n_radial)
        r = 0.5 * (hi - lo) * (s + 1.0) + lo
        w = 0.5 * (hi - lo) * ws
        radii.append(r)
        coefs.append(w / (r - r0 - 1j * sign * delta))
    return np.concatenate(radii), np.concatenate(coefs)


def _polar_points(radii, coefs, qform, beta, grid, n_sphere):
    """Expand radial nodes into full polar quadrature points with the
    coarea volume element, the cutoff and the continuum reproduction
    scale (L / 2 pi)^d folded into the coefficients."""
    dim = grid.dim
    u, w = sphere_quadrature(dim, n_sphere)
    R = _inv_sqrt_spd(qform)
    dirs = u @ R.T                                   # unit flavor radius
    pts = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, dim)
    dets = np.linalg.det(np.asarray(qform, float)) ** -0.5
    cf = (coefs * radii ** (dim - 1))[:, None] * (dets * w)[None, :]
    cf = cf.reshape(-1).astype(complex)
    cf *= beta(pts)
    cf *= (grid.length / TAU) ** dim
    keep = np.abs(cf) > 0
    return pts[keep], cf[keep]


def _radial_extent(qform, beta):
    return beta.r_out * np.sqrt(np.linalg.eigvalsh(
        np.asarray(qform, float)).max())


# ---------------------------------------------------------------------------
# scalar model operators

def e_delta(f, omega, delta, sign=+1, beta=None, flavor='euclidean',
            mat=None, method='lattice', n_sphere=None, n_radial=32):
    """The regularized scalar operator with multiplier
    beta(xi) / (||xi||_flavor - (omega + i*sign*delta)).

    'lattice' evaluates the multiplier on the frequency lattice (exact
    for band-limited f); 'quadrature' evaluates the continuum integral
    of the semidiscrete transform, resolving the delta-width layer at
    the singular radius with a sinh substitution.
    """
    if not (omega > 0 and 0 < delta < 0.5):
        raise ValueError("need omega > 0 and 0 < delta < 1/2")
    grid = f.grid
    if beta is None:
        beta = CutoffSpec(0.55 * np.pi * grid.n / grid.length,
                          0.95 * np.pi * grid.n / grid.length)
    qform = _flavor_qform(flavor, mat, grid.dim)
    if method == 'lattice':
        xi = grid.xi_flat()
        rho = np.sqrt(np.einsum('ki,ij,kj->k', xi, qform, xi))
        mult = beta(xi) / (rho - (omega + 1j * sign * delta))
        c = f.coeffs().reshape(f.ncomp, -1) * mult
        return spectral.Field.from_coeffs(grid, c.reshape(f.data.shape))
    if method != 'quadrature':
        raise ValueError("method must be 'lattice' or 'quadrature'")
    if n_sphere is None:
        n_sphere = 192 if grid.dim == 2 else 16
    r_max = _radial_extent(qform, beta)
    radii, coefs = _edelta_nodes(omega, r_max, delta, sign, n_radial)
    pts, cf = _polar_points(radii, coefs, qform, beta, grid, n_sphere)
    return _apply_offgrid(f, pts, cf)


def _pv_once(f, omega, beta, qform, n_sphere, n_radial, weight_fn=None,
             out_ncomp=None, pairing=True, window=None):
    r_max = _radial_extent(qform, beta)
    radii, coefs = _radial_nodes(omega, r_max, n_radial, pairing, window)
    pts, cf = _polar_points(radii, coefs, qform, beta, f.grid, n_sphere)
    return _apply_offgrid(f, pts, cf, weight_fn, out_ncomp)


def pv_part(f, omega, beta=None, flavor='euclidean', mat=None,
            n_sphere=None, n_radial=32, tol=None, pairing=True):
    """Principal value of the continuum integral with multiplier
    beta(xi)/(||xi||_flavor - omega), by symmetric pairing around the
    singular radius.  With ``tol`` set, the node counts are doubled and
    QuadratureNotConverged is raised if the result moves by more.
    ``pairing=False`` integrates straight through the singular radius
    (only sensible when the transform of f vanishes there)."""
    if not omega > 0:
        raise ValueError("need omega > 0")
    grid = f.grid
    if beta is None:
        beta = CutoffSpec(0.55 * np.pi * grid.n / grid.length,
                          0.95 * np.pi * grid.n / grid.length)
    if n_sphere is None:
        n_sphere = 192 if grid.dim == 2 else 16
    qform = _flavor_qform(flavor, mat, grid.dim)
    out = _pv_once(f, omega, beta, qform, n_sphere, n_radial, pairing=pairing)
    if tol is not None:
        fine = _pv_once(f, omega, beta, qform, 2 * n_sphere, 2 * n_radial,
                        pairing=pairing)
        drift = spectral.lebesgue_norm(fine - out, 2)
        scale = max(spectral.lebesgue_norm(fine, 2), 1e-300)
        if drift > tol * scale:
            raise QuadratureNotConverged(
                "doubling nodes moved pv_part by %.3e relative" %
                (drift / scale))
        return fine
    return out


def surface_part(f, omega, beta=None, flavor='euclidean', mat=None,
                 quad=None, sign=+1, n_sphere=None):
    """sign * i * pi times the surface integral of beta * fhat over the
    characteristic sphere, synthesized on the grid."""
    if not omega > 0:
        raise ValueError("need omega > 0")
    grid = f.grid
    if beta is None:
        beta = CutoffSpec(0.55 * np.pi * grid.n / grid.length,
                          0.95 * np.pi * grid.n / grid.length)
    if quad is None:
        qform = _flavor_qform(flavor, mat, grid.dim)
        quad = surface_quadrature(omega, qform, n_sphere)
    cf = (sign * 1j * np.pi * (grid.length / TAU) ** grid.dim) \
        * quad.weights.astype(complex) * beta(quad.nodes)
    return _apply_offgrid(f, quad.nodes, cf)


# ---------------------------------------------------------------------------
# full limiting-absorption solves

def _real_resolvent(omega, xi, mat):
    """The resolvent matrix at real omega (finite off the spheres).

    The singular scalar is 1/(i(omega - rho)) for omega > 0 and
    1/(i(omega + rho)) for omega < 0.
    """
    s = 1.0 if omega > 0 else -1.0
    M = multiplier.regular_matrix(omega, xi, mat)
    for W, qform in multiplier.singular_weights(omega, xi, mat):
        rho = np.sqrt(np.einsum('...i,ij,...j->...', xi, qform, xi))
        M = M + W / (1j * (omega - s * rho))[..., None, None]
    return M


def _axis_mask(grid, mat):
    """3D lattice modes too close to the distinguished axis for the
    closed-form coefficient matrices."""
    if mat.dim == 2:
        return np.zeros(grid.npoints, dtype=bool)
    xi = grid.xi_flat()
    n2 = np.einsum('ki,ki->k', xi, xi)
    s2 = xi[:, 1] ** 2 + xi[:, 2] ** 2
    return (n2 > 0) & (s2 < symbol.AXIS_GUARD * n2)


def _direct_lattice_solve(omega, J, mask, mat):
    """Invert the full 6x6 (or 3x3) symbol mode by mode; finite at real
    omega as long as no masked mode sits exactly on a sphere."""
    grid = J.grid
    xi = grid.xi_flat()
    c = J.coeffs().reshape(J.ncomp, -1)
    out = np.zeros_like(c)
    idx = np.nonzero(mask & (np.abs(c).sum(axis=0) > 0))[0]
    if idx.size:
        p = symbol.symbol_p(omega, xi[idx], mat)
        out[:, idx] = np.linalg.solve(p, c[:, idx].T[..., None])[..., 0].T
    return spectral.Field.from_coeffs(grid, out.reshape(J.data.shape))


def _mode_masks(grid, omega, mat, margin):
    """Lattice indices split by distance to the characteristic spheres."""
    xi = grid.xi_flat()
    nz = np.any(xi != 0, axis=-1)
    dist = np.full(grid.npoints, np.inf)
    probe = np.array([[1.0] + [0.5] * (grid.dim - 1)])
    for _, qform in multiplier.singular_weights(omega, probe, mat):
        rho = np.sqrt(np.einsum('ki,ij,kj->k', xi, qform, xi))
        dist = np.minimum(dist, np.abs(rho - abs(omega)))
    near = nz & (dist < margin * abs(omega))
    far = nz & ~near
    return far, near


def _split_field(J, mask):
    c = J.coeffs().reshape(J.ncomp, -1)
    sel = np.zeros_like(c)
    sel[:, mask] = c[:, mask]
    return spectral.Field.from_coeffs(J.grid, sel.reshape(J.data.shape))


def richardson_limit(values, return_table=False):
    """Limit of a sequence sampled at delta_k = delta0 * 2^(-k), assuming
    an expansion in integer powers of delta; full Neville table."""
    T = [list(values)]
    for j in range(1, len(values)):
        fac = 2.0 ** j
        prev = T[-1]
        T.append([(fac * prev[i + 1] - prev[i]) / (fac - 1.0)
                  for i in range(len(prev) - 1)])
    return (T[-1][-1], T) if return_table else T[-1][-1]


def lap_solve(omega, J, mat, sign=+1, method='quadrature', beta=None,
              margin=0.35, n_sphere=None, n_radial=24, delta0=0.1,
              levels=7, cross_tol=None):
    """The limiting-absorption solution P_(+-)(omega) J at real omega.

    quadrature: lattice modes at relative flavor distance >= margin from
    every characteristic sphere get the real-frequency resolvent matrix
    directly; the remaining near-sphere content is handled by the smooth
    background on the lattice plus, per singular sphere, a continuum
    principal-value integral and the surface term carried by the
    Sokhotsky weights.

    extrapolate: Richardson limit of solve(omega + i*sign*delta_k, J)
    over delta_k = delta0 * 2^(-k), k < levels.

    cross_tol compares the two methods and raises MethodsDisagree.
    """
    omega = float(omega)
    if omega == 0:
        raise ValueError("omega must be nonzero real")
    if isinstance(mat, Material3) and not mat.is_canonical:
        canon, Jc, record = symbol.canonicalize(mat, J)
        return record.backward_fields(
            lap_solve(omega, Jc, canon, sign=sign, method=method, beta=beta,
                      margin=margin, n_sphere=n_sphere, n_radial=n_radial,
                      delta0=delta0, levels=levels, cross_tol=cross_tol))
    grid = J.grid
    if method == 'extrapolate':
        sols = [spectral.solve(omega + 1j * sign * delta0 * 0.5 ** k, J, mat)
                for k in range(levels)]
        out = richardson_limit([u.data for u in sols])
        return spectral.Field(grid, out)
    if method != 'quadrature':
        raise ValueError("method must be 'quadrature' or 'extrapolate'")
    if beta is None:
        beta = default_cutoff(grid, omega, mat)
    if n_sphere is None:
        n_sphere = 160 if grid.dim == 2 else 12
    far, near = _mode_masks(grid, omega, mat, margin)
    ax = _axis_mask(grid, mat)
    zero = 1.0 / (1j * omega) * np.eye(J.ncomp)
    u = apply_symbol(J, far & ~ax,
                     lambda xi: _real_resolvent(omega, xi, mat), zero)
    if np.any(ax):
        # near-axis modes bypass the split entirely; off the spheres the
        # direct inverse is their limiting value
        u = u + _direct_lattice_solve(omega, J, (far | near) & ax, mat)
    near = near & ~ax
    if np.any(near):
        J_near = _split_field(J, near)
        u = u + apply_symbol(
            J_near, near, lambda xi: multiplier.regular_matrix(omega, xi, mat))
        abs_xi = np.array([[1.0] + [0.5] * (grid.dim - 1)])
        for k, (_, qform) in enumerate(
                multiplier.singular_weights(omega, abs_xi, mat)):
            def wfun(pts, k=k):
                return multiplier.singular_weights(omega, pts, mat)[k][0]
            # 1/(i(omega -+ rho)) = (+-i) / (rho - |omega|) near the sphere
            pv_sign = 1j if omega > 0 else -1j
            pv = _pv_once(J_near, abs(omega), beta, qform, n_sphere, n_radial,
                          weight_fn=lambda pts: pv_sign * wfun(pts),
                          window=2.0 * margin * abs(omega))
            quad = surface_quadrature(abs(omega), qform, n_sphere)
            cf = (-sign * np.pi * (grid.length / TAU) ** grid.dim) \
                * quad.weights.astype(complex) * beta(quad.nodes)
            sf = _apply_offgrid(J_near, quad.nodes, cf, weight_fn=wfun)
            u = u + pv + sf
    if cross_tol is not None:
        other = lap_solve(omega, J, mat, sign=sign, method='extrapolate',
                          delta0=delta0, levels=levels)
        diff = spectral.lebesgue_norm(u - other, 2)
        scale = max(spectral.lebesgue_norm(u, 2), 1e-300)
        if diff > cross_tol * scale:
            raise MethodsDisagree(
                "extrapolate and quadrature differ by %.3e relative"
                % (diff / scale))
    return u


def apply_symbol(J, mask, symbol_fn, zero_mode=None):
    """Lattice multiplier restricted to the masked modes."""
    grid = J.grid
    xi = grid.xi_flat()
    c = J.coeffs().reshape(J.ncomp, -1)
    out = np.zeros_like(c)
    idx = np.nonzero(mask & (np.abs(c).sum(axis=0) > 0))[0]
    for s in range(0, idx.size, 1 << 15):
        sel = idx[s:s + (1 << 15)]
        M = symbol_fn(xi[sel])
        out[:, sel] = np.einsum('kij,jk->ik', M, c[:, sel])
    if zero_mode is not None:
        z = np.nonzero(~np.any(xi != 0, axis=-1))[0]
        out[:, z] = np.asarray(zero_mode) @ c[:, z]
    return spectral.Field.from_coeffs(grid, out.reshape(J.data.shape))


def surface_terms(omega, J, mat, sign=+1, beta=None, margin=0.35,
                  n_sphere=None):
    """The assembled surface contributions of lap_solve's quadrature
    route (all characteristic spheres)."""
    omega = float(omega)
    grid = J.grid
    if beta is None:
        beta = default_cutoff(grid, omega, mat)
    if n_sphere is None:
        n_sphere = 160 if grid.dim == 2 else 12
    _, near = _mode_masks(grid, omega, mat, margin)
    near = near & ~_axis_mask(grid, mat)
    J_near = _split_field(J, near)
    abs_xi = np.array([[1.0] + [0.5] * (grid.dim - 1)])
    out = spectral.Field.zeros(grid, J.ncomp)
    for k, (_, qform) in enumerate(
            multiplier.singular_weights(omega, abs_xi, mat)):
        def wfun(pts, k=k):
            return multiplier.singular_weights(omega, pts, mat)[k][0]
        quad = surface_quadrature(abs(omega), qform, n_sphere)
        cf = (-sign * np.pi * (grid.length / TAU) ** grid.dim) \
            * quad.weights.astype(complex) * beta(quad.nodes)
        out = out + _apply_offgrid(J_near, quad.nodes, cf, weight_fn=wfun)
    return out


def lap_blowup_probe(omega, pair, mat, deltas, grid=None, thickness=0.5,
                     flavor_index=0, sign=+1):
    """Fit the growth of a resolvent-norm lower bound as delta -> 0.

    For each delta the bound is the best ratio ||u||_q / ||J||_p over
    single-mode currents polarized along the singular eigenvector, with
    wavevectors drawn from a spectral annulus around the characteristic
    sphere.  Returns (fit, deltas, ratios); the fitted slope is compared
    with -gamma of the Lebesgue pair.
    """
    from . import region
    if grid is None:
        grid = spectral.Grid(2, 64) if mat.dim == 2 else spectral.Grid(3, 32)
    xi = grid.xi_flat()
    rho = region.characteristic_radii(xi, mat)[flavor_index]
    sel = np.nonzero((np.abs(rho - abs(omega)) < thickness) & (rho > 0))[0]
    if sel.size == 0:
        raise ValueError("annulus contains no lattice modes")
    order = np.argsort(np.abs(rho[sel] - abs(omega)))
    sel = sel[order[:48]]
    col = region._singular_columns(mat)[flavor_index]
    m, _, _ = symbol.eigen_decomposition(abs(omega), xi[sel], mat)
    ncomp = 3 if mat.dim == 2 else 6
    ratios = []
    for delta in deltas:
        best = 0.0
        for i in range(sel.size):
            c = np.zeros((ncomp, grid.npoints), dtype=complex)
            c[:, sel[i]] = m[i, :, col]
            J = spectral.Field.from_coeffs(
                grid, c.reshape((ncomp,) + (grid.n,) * grid.dim))
            u = spectral.solve(abs(omega) + 1j * sign * delta, J, mat)
            best = max(best, spectral.lebesgue_norm(u, pair.q)
                       / spectral.lebesgue_norm(J, pair.p))
        ratios.append(best)
    from .region import loglog_fit
    return loglog_fit(deltas, ratios), np.asarray(deltas, float), \
        np.array(ratios)
