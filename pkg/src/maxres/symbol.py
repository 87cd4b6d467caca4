"""Operator symbols and their diagonalization.

The first-order symbol p(omega, xi) of the time-harmonic Maxwell system is
assembled as a dense matrix (3x3 in 2D, 6x6 in 3D, acting on the (D, B)
field components).  Away from the degenerate directions it factors as
p = m d m^{-1} with an explicit frequency-independent eigenbasis m(xi) and
the diagonal

    2D:  d = i diag(omega, omega - |xi|_w, omega + |xi|_w)
    3D:  d = i diag(omega, omega, omega -+ sqrt(b)|xi|, omega -+ |xi|_e)

where |xi|_w is the weighted 2D norm <xi, eps xi / (mu det eps)>^(1/2) and
|xi|_e^2 = b xi1^2 + a (xi2^2 + xi3^2).

All evaluators are vectorized: ``xi`` may have any leading shape (..., d)
and matrices come back as (..., m, m).
"""

import numpy as np

from .errors import DegenerateDirection
from .materials import Material2, Material3

# Below this fraction of |xi|^2 in the transverse plane the 3D closed-form
# eigenbasis is refused and callers invert the 6x6 symbol directly.
AXIS_GUARD = 1e-8

SQ2 = np.sqrt(2.0)


def norm_eps_prime(xi, mat):
    """Weighted 2D norm sqrt(<xi, mu^-1 det(eps)^-1 eps xi>)."""
    xi = np.asarray(xi, dtype=float)
    q = mat.qform
    return np.sqrt(np.einsum('...i,ij,...j->...', xi, q, xi))


def norm_eps(xi, mat):
    """Anisotropic 3D norm sqrt(b xi1^2 + a (xi2^2 + xi3^2))."""
    if not mat.is_canonical:
        raise ValueError("norm_eps requires a canonicalized material")
    xi = np.asarray(xi, dtype=float)
    return np.sqrt(mat.b * xi[..., 0] ** 2
                   + mat.a * (xi[..., 1] ** 2 + xi[..., 2] ** 2))


def _symbol_2d(omega, xi, mat):
    e = mat.eps_inv
    e11, e12, e22 = e[0, 0], e[0, 1], e[1, 1]
    x1, x2 = xi[..., 0], xi[..., 1]
    p = np.zeros(xi.shape[:-1] + (3, 3), dtype=complex)
    p[..., 0, 0] = 1j * omega
    p[..., 1, 1] = 1j * omega
    p[..., 2, 2] = 1j * omega
    p[..., 0, 2] = -1j * x2 / mat.mu
    p[..., 1, 2] = 1j * x1 / mat.mu
    p[..., 2, 0] = 1j * (x1 * e12 - x2 * e11)
    p[..., 2, 1] = 1j * (x1 * e22 - x2 * e12)
    return p


def _cross_blocks(xi):
    """Entries of the curl symbol B(xi), (curl u)^ = -i B(xi) u^."""
    x1, x2, x3 = xi[..., 0], xi[..., 1], xi[..., 2]
    B = np.zeros(xi.shape[:-1] + (3, 3), dtype=float)
    B[..., 0, 1] = x3
    B[..., 0, 2] = -x2
    B[..., 1, 0] = -x3
    B[..., 1, 2] = x1
    B[..., 2, 0] = x2
    B[..., 2, 1] = -x1
    return B


def _symbol_3d(omega, xi, mat):
    einv = 1.0 / mat.eps_diag
    B = _cross_blocks(xi)
    p = np.zeros(xi.shape[:-1] + (6, 6), dtype=complex)
    for i in range(6):
        p[..., i, i] = 1j * omega
    p[..., :3, 3:] = 1j * B / mat.mu
    # right block of the lower row: -i B(xi) eps^{-1} (columnwise scaling)
    p[..., 3:, :3] = -1j * B * einv
    return p


def symbol_p(omega, xi, mat):
    """Maxwell symbol p(omega, xi); p(omega, 0) = i omega I."""
    xi = np.asarray(xi, dtype=float)
    if mat.dim == 2:
        return _symbol_2d(omega, xi, mat)
    return _symbol_3d(omega, xi, mat)


def _check_offaxis(xi, guard):
    """3D axis guard; returns (|xi|, transverse |.|^2) after validating."""
    n2 = np.einsum('...i,...i->...', xi, xi)
    s2 = xi[..., 1] ** 2 + xi[..., 2] ** 2
    bad = s2 < guard * n2
    if np.any(bad) or np.any(n2 == 0):
        raise DegenerateDirection(
            "wavevector too close to the distinguished axis (or zero); "
            "use direct 6x6 inversion")
    return np.sqrt(n2), s2


def _eigen_2d(omega, xi, mat):
    e = mat.eps_inv
    e11, e12, e22 = e[0, 0], e[0, 1], e[1, 1]
    n = norm_eps_prime(xi, mat)
    if np.any(n == 0):
        raise DegenerateDirection("zero wavevector has no eigenbasis")
    x1p = xi[..., 0] / n
    x2p = xi[..., 1] / n
    mu = mat.mu
    shape = xi.shape[:-1]
    m = np.zeros(shape + (3, 3), dtype=complex)
    m[..., 0, 0] = e22 * x1p - e12 * x2p
    m[..., 1, 0] = e11 * x2p - e12 * x1p
    # the two propagating columns carry a 1/sqrt(2) normalization so that
    # det m = -1 exactly
    m[..., 0, 1] = -x2p / (mu * SQ2)
    m[..., 1, 1] = x1p / (mu * SQ2)
    m[..., 2, 1] = -1.0 / SQ2
    m[..., 0, 2] = x2p / (mu * SQ2)
    m[..., 1, 2] = -x1p / (mu * SQ2)
    m[..., 2, 2] = -1.0 / SQ2

    minv = np.zeros(shape + (3, 3), dtype=complex)
    minv[..., 0, 0] = x1p / mu
    minv[..., 0, 1] = x2p / mu
    minv[..., 1, 0] = (x1p * e12 - x2p * e11) / SQ2
    minv[..., 1, 1] = (e22 * x1p - e12 * x2p) / SQ2
    minv[..., 1, 2] = -1.0 / SQ2
    minv[..., 2, 0] = (x2p * e11 - x1p * e12) / SQ2
    minv[..., 2, 1] = (x2p * e12 - x1p * e22) / SQ2
    minv[..., 2, 2] = -1.0 / SQ2

    d = np.zeros(shape + (3, 3), dtype=complex)
    d[..., 0, 0] = 1j * omega
    d[..., 1, 1] = 1j * (omega - n)
    d[..., 2, 2] = 1j * (omega + n)
    return m, d, minv


def _eigvecs_3d(xi, mat):
    """Plain (unrenormalized) eigenvector columns v1..v6 plus norms."""
    a, b = mat.a, mat.b
    n = np.sqrt(np.einsum('...i,...i->...', xi, xi))
    ne = norm_eps(xi, mat)
    xp = xi / n[..., None]
    xt = xi / ne[..., None]
    sb = np.sqrt(b)
    shape = xi.shape[:-1]
    m = np.zeros(shape + (6, 6), dtype=complex)
    # v1: magnetic gradient direction, eigenvalue i omega
    m[..., 3:, 0] = xp
    # v2: electric (eps-weighted) gradient direction, eigenvalue i omega
    m[..., 0, 1] = xt[..., 0] / a
    m[..., 1, 1] = xt[..., 1] / b
    m[..., 2, 1] = xt[..., 2] / b
    # v3, v4: the sqrt(b)|xi| pair
    sp = xp[..., 1] ** 2 + xp[..., 2] ** 2
    m[..., 1, 2] = -xp[..., 2] / sb
    m[..., 2, 2] = xp[..., 1] / sb
    m[..., 3, 2] = -sp
    m[..., 4, 2] = xp[..., 0] * xp[..., 1]
    m[..., 5, 2] = xp[..., 0] * xp[..., 2]
    m[..., 1, 3] = xp[..., 2] / sb
    m[..., 2, 3] = -xp[..., 1] / sb
    m[..., 3, 3] = -sp
    m[..., 4, 3] = xp[..., 0] * xp[..., 1]
    m[..., 5, 3] = xp[..., 0] * xp[..., 2]
    # v5, v6: the |xi|_e pair
    st = xt[..., 1] ** 2 + xt[..., 2] ** 2
    m[..., 0, 4] = st
    m[..., 1, 4] = -xt[..., 0] * xt[..., 1]
    m[..., 2, 4] = -xt[..., 0] * xt[..., 2]
    m[..., 4, 4] = -xt[..., 2]
    m[..., 5, 4] = xt[..., 1]
    m[..., 0, 5] = -st
    m[..., 1, 5] = xt[..., 0] * xt[..., 1]
    m[..., 2, 5] = xt[..., 0] * xt[..., 2]
    m[..., 4, 5] = -xt[..., 2]
    m[..., 5, 5] = xt[..., 1]
    return m, n, ne, xp, xt


def _minv_3d_renormalized(xi, mat, n, ne, xp, xt):
    """Closed-form inverse of the renormalized eigenbasis."""
    a, b = mat.a, mat.b
    sb = np.sqrt(b)
    sp = xp[..., 1] ** 2 + xp[..., 2] ** 2
    st = xt[..., 1] ** 2 + xt[..., 2] ** 2
    alpha = np.sqrt(xi[..., 1] ** 2 + xi[..., 2] ** 2) / np.sqrt(n * ne)
    shape = xi.shape[:-1]
    mi = np.zeros(shape + (6, 6), dtype=complex)
    mi[..., 0, 3:] = xp
    mi[..., 1, 0] = a * b * xt[..., 0]
    mi[..., 1, 1] = a * b * xt[..., 1]
    mi[..., 1, 2] = a * b * xt[..., 2]
    c = sb * n / (2.0 * ne)
    mi[..., 2, 1] = -c * xt[..., 2] / st
    mi[..., 2, 2] = c * xt[..., 1] / st
    mi[..., 2, 3] = -0.5
    mi[..., 2, 4] = xp[..., 0] * xp[..., 1] / (2.0 * sp)
    mi[..., 2, 5] = xp[..., 0] * xp[..., 2] / (2.0 * sp)
    mi[..., 3, 1] = c * xt[..., 2] / st
    mi[..., 3, 2] = -c * xt[..., 1] / st
    mi[..., 3, 3] = -0.5
    mi[..., 3, 4] = mi[..., 2, 4]
    mi[..., 3, 5] = mi[..., 2, 5]
    mi[..., 4, 0] = a / 2.0
    mi[..., 4, 1] = -b * xt[..., 0] * xt[..., 1] / (2.0 * st)
    mi[..., 4, 2] = -b * xt[..., 0] * xt[..., 2] / (2.0 * st)
    mi[..., 4, 4] = -xp[..., 2] * ne / (2.0 * n * sp)
    mi[..., 4, 5] = ne * xp[..., 1] / (2.0 * n * sp)
    mi[..., 5, 0] = -a / 2.0
    mi[..., 5, 1] = -mi[..., 4, 1]
    mi[..., 5, 2] = -mi[..., 4, 2]
    mi[..., 5, 4] = mi[..., 4, 4]
    mi[..., 5, 5] = mi[..., 4, 5]
    # renormalization: columns 3..6 of m are divided by alpha, so the
    # matching rows of the inverse are multiplied by it
    mi[..., 2:, :] *= alpha[..., None, None]
    return mi, alpha


def _eigen_3d(omega, xi, mat, guard):
    if not mat.is_canonical:
        raise ValueError("eigen_decomposition requires a canonicalized material")
    _check_offaxis(xi, guard)
    m, n, ne, xp, xt = _eigvecs_3d(xi, mat)
    mi, alpha = _minv_3d_renormalized(xi, mat, n, ne, xp, xt)
    # renormalize: the four propagating columns are divided by alpha
    m[..., :, 2:] /= alpha[..., None, None]
    shape = xi.shape[:-1]
    d = np.zeros(shape + (6, 6), dtype=complex)
    sb = np.sqrt(mat.b)
    vals = [omega, omega, omega - sb * n, omega + sb * n, omega - ne, omega + ne]
    for i, v in enumerate(vals):
        d[..., i, i] = 1j * v
    return m, d, mi


def eigen_decomposition(omega, xi, mat, guard=AXIS_GUARD):
    """Return (m, d, m_inv) with p = m d m_inv.

    2D: det m = -1 for every nonzero xi.  3D: the renormalized basis whose
    determinant stays bounded away from 0 off the distinguished axis.
    Raises DegenerateDirection at xi = 0 or (3D) too close to the axis.
    """
    xi = np.asarray(xi, dtype=float)
    if mat.dim == 2:
        return _eigen_2d(omega, xi, mat)
    return _eigen_3d(omega, xi, mat, guard)


def det_diagnostics(xi, mat):
    """Renormalization diagnostics for the 3D eigenbasis.

    Returns (alpha, delta, det_m, det_m_tilde) where alpha is the
    transverse renormalization factor, delta = |xi| / |xi|_e, det_m the
    determinant of the plain eigenvector matrix and det_m_tilde that of
    the renormalized one (det_m_tilde = det_m / alpha^4).
    """
    xi = np.asarray(xi, dtype=float)
    if not isinstance(mat, Material3):
        raise TypeError("det_diagnostics applies to 3D materials")
    n = np.sqrt(np.einsum('...i,...i->...', xi, xi))
    if np.any(n == 0):
        raise DegenerateDirection("zero wavevector")
    ne = norm_eps(xi, mat)
    alpha = np.sqrt(xi[..., 1] ** 2 + xi[..., 2] ** 2) / np.sqrt(n * ne)
    delta = n / ne
    m_plain, _, _, _, _ = _eigvecs_3d(xi, mat)
    det_m = np.linalg.det(m_plain)
    with np.errstate(divide='ignore', invalid='ignore'):
        det_mt = det_m / alpha ** 4
    return alpha, delta, det_m, det_mt


# canonical-axis cyclic permutations (0-based): new axis i is old axis perm[i]
_AXIS_PERMS = {1: (0, 1, 2), 2: (1, 2, 0), 3: (2, 0, 1)}


class TransformRecord:
    """How a 3D material/current pair was brought to canonical form.

    Stores the cyclic axis permutation and the permeability that was
    folded into the permittivity; knows how to map currents into the
    canonical frame and solution fields back out.
    """

    def __init__(self, perm, mu):
        self.perm = tuple(perm)
        self.mu = float(mu)
        inv = [0, 0, 0]
        for i, p in enumerate(self.perm):
            inv[p] = i
        self.inv_perm = tuple(inv)

    def _permute(self, field, perm):
        data = field.data
        comp = list(perm) + [3 + p for p in perm]
        data = data[comp]
        data = np.transpose(data, axes=[0] + [1 + p for p in perm])
        return type(field)(field.grid, np.ascontiguousarray(data))

    def forward_currents(self, J):
        """Permute axes/components and rescale the magnetic current."""
        out = self._permute(J, self.perm)
        out.data[3:] /= self.mu
        return out

    def backward_fields(self, u):
        """Undo the permutation and restore the magnetic components."""
        out = type(u)(u.grid, u.data.copy())
        out.data[3:] *= self.mu
        return self._permute(out, self.inv_perm)


def canonicalize(mat, currents=None):
    """Bring a Material3 to axis=1, mu=1 form.

    Returns (canonical_material, transformed_currents, record).  The
    permutation is cyclic so the curl symbol is equivariant; the
    permeability is folded into the permittivity, with the magnetic
    components of currents divided by mu on the way in and solution
    fields multiplied by mu on the way out.
    """
    if not isinstance(mat, Material3):
        raise TypeError("canonicalize applies to 3D materials")
    record = TransformRecord(_AXIS_PERMS[mat.axis], mat.mu)
    canon = Material3(eps_axis=mat.mu * mat.eps_axis,
                      eps_perp=mat.mu * mat.eps_perp, axis=1, mu=1.0)
    out = None if currents is None else record.forward_currents(currents)
    return canon, out, record
