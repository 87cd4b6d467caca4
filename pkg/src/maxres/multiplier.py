"""Closed-form inverse-symbol (resolvent) matrices.

The inverse of the Maxwell symbol splits as M + M_c where M is a linear
combination of the scalar resolvents

    2D:  A = 1/(i(omega - |xi|_w)),          B = 1/(i(omega + |xi|_w))
    3D:  A, B as above with sqrt(b)|xi|;     C, D with |xi|_e

with zero-homogeneous coefficient matrices, and M_c carries the charge
(non-solenoidal) contribution with a plain 1/(i omega) factor.  The
coefficient matrices are exposed separately, which is what the
limiting-absorption machinery needs: at real omega each singular scalar
factors into a principal value plus a surface-delta term.

Every evaluator is vectorized over a leading batch of wavevectors.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDirection, RealFrequency
from .materials import Material2, Material3
from .symbol import AXIS_GUARD, norm_eps, norm_eps_prime

# 3D matrix entries that are identically zero; a sign flip there is
# unobservable, so fault-injection sampling skips them.
M3_ZERO_ENTRIES = ((0, 3), (3, 0))


def scalar_resolvent_values(omega, xi, mat):
    """The scalar resolvents (A, B) in 2D or (A, B, C, D) in 3D."""
    xi = np.asarray(xi, dtype=float)
    # at real omega a lattice mode can sit exactly on the singular
    # sphere; the inf lands in a scalar the caller discards
    with np.errstate(divide='ignore', invalid='ignore'):
        if mat.dim == 2:
            n = norm_eps_prime(xi, mat)
            return 1.0 / (1j * (omega - n)), 1.0 / (1j * (omega + n))
        n = np.sqrt(np.einsum('...i,...i->...', xi, xi))
        ne = norm_eps(xi, mat)
        sb = np.sqrt(mat.b)
        return (1.0 / (1j * (omega - sb * n)), 1.0 / (1j * (omega + sb * n)),
                1.0 / (1j * (omega - ne)), 1.0 / (1j * (omega + ne)))


def _m2_coeffs(xi, mat):
    """Coefficient matrices (WA, WB) of the scalar resolvents A, B."""
    e = mat.eps_inv
    e11, e12, e22 = e[0, 0], e[0, 1], e[1, 1]
    mu = mat.mu
    n = norm_eps_prime(xi, mat)
    x1p = xi[..., 0] / n
    x2p = xi[..., 1] / n
    shape = xi.shape[:-1]
    WA = np.zeros(shape + (3, 3), dtype=complex)
    WB = np.zeros(shape + (3, 3), dtype=complex)
    sym00 = (x2p ** 2 * e11 - x1p * x2p * e12) / (2 * mu)
    sym01 = (x2p ** 2 * e12 - x1p * x2p * e22) / (2 * mu)
    sym10 = (x1p ** 2 * e12 - x1p * x2p * e11) / (2 * mu)
    sym11 = (x1p ** 2 * e22 - x1p * x2p * e12) / (2 * mu)
    for W in (WA, WB):
        W[..., 0, 0] = sym00
        W[..., 0, 1] = sym01
        W[..., 1, 0] = sym10
        W[..., 1, 1] = sym11
        W[..., 2, 2] = 0.5
    WA[..., 0, 2] = x2p / (2 * mu)
    WB[..., 0, 2] = -x2p / (2 * mu)
    WA[..., 1, 2] = -x1p / (2 * mu)
    WB[..., 1, 2] = x1p / (2 * mu)
    anti20 = (x2p * e11 - x1p * e12) / 2
    anti21 = (x1p * e22 - x2p * e12) / 2
    WA[..., 2, 0] = anti20
    WB[..., 2, 0] = -anti20
    WA[..., 2, 1] = -anti21
    WB[..., 2, 1] = anti21
    return WA, WB


def m2c_matrix(omega, xi, mat):
    """Charge part M_c of the 2D inverse symbol."""
    xi = np.asarray(xi, dtype=float)
    e = mat.eps_inv
    e11, e12, e22 = e[0, 0], e[0, 1], e[1, 1]
    n = norm_eps_prime(xi, mat)
    x1p = xi[..., 0] / n
    x2p = xi[..., 1] / n
    M = np.zeros(xi.shape[:-1] + (3, 3), dtype=complex)
    M[..., 0, 0] = e22 * x1p ** 2 - e12 * x1p * x2p
    M[..., 0, 1] = e22 * x1p * x2p - e12 * x2p ** 2
    M[..., 1, 0] = e11 * x1p * x2p - e12 * x1p ** 2
    M[..., 1, 1] = e11 * x2p ** 2 - e12 * x1p * x2p
    M *= 1.0 / (1j * omega * mat.mu)
    return M


def resolvent_matrix_2d(omega, xi, mat):
    """Full 2D inverse symbol M(A, B) + M_c at Im(omega) != 0."""
    if omega.imag == 0:
        raise RealFrequency("unsplit resolvent needs Im(omega) != 0")
    xi = np.asarray(xi, dtype=float)
    A, B = scalar_resolvent_values(omega, xi, mat)
    WA, WB = _m2_coeffs(xi, mat)
    return (WA * A[..., None, None] + WB * B[..., None, None]
            + m2c_matrix(omega, xi, mat))


def _m3_coeffs(xi, mat, flip_entry=None):
    """Coefficient matrices (WA, WB, WC, WD) of the 3D scalar resolvents.

    flip_entry=(i, j) negates entry (i, j) of the assembled matrix; this
    fault-injection hook exists for the verification suite's mutation
    test and must stay None in production use.
    """
    a, b = mat.a, mat.b
    sb = np.sqrt(b)
    n = np.sqrt(np.einsum('...i,...i->...', xi, xi))
    ne = norm_eps(xi, mat)
    x1, x2, x3 = xi[..., 0], xi[..., 1], xi[..., 2]
    s = x2 ** 2 + x3 ** 2
    x1p, x2p, x3p = x1 / n, x2 / n, x3 / n
    t1, t2, t3 = x1 / ne, x2 / ne, x3 / ne
    sp = x2p ** 2 + x3p ** 2
    st = t2 ** 2 + t3 ** 2
    shape = xi.shape[:-1]
    WA = np.zeros(shape + (6, 6), dtype=complex)
    WB = np.zeros(shape + (6, 6), dtype=complex)
    WC = np.zeros(shape + (6, 6), dtype=complex)
    WD = np.zeros(shape + (6, 6), dtype=complex)

    def sym(W1, W2, i, j, val):
        W1[..., i, j] = W1[..., i, j] + val
        W2[..., i, j] = W2[..., i, j] + val

    def anti(W1, W2, i, j, val):
        W1[..., i, j] = W1[..., i, j] + val
        W2[..., i, j] = W2[..., i, j] - val

    # row 0 (electric 1)
    sym(WC, WD, 0, 0, a * st / 2)
    sym(WC, WD, 0, 1, -b * t1 * t2 / 2)
    sym(WC, WD, 0, 2, -b * t1 * t3 / 2)
    anti(WD, WC, 0, 4, t3 / 2)
    anti(WC, WD, 0, 5, t2 / 2)
    # row 1 (electric 2)
    sym(WC, WD, 1, 0, -a * t1 * t2 / 2)
    sym(WA, WB, 1, 1, x3 ** 2 / (2 * s))
    sym(WC, WD, 1, 1, b * t1 ** 2 * x2 ** 2 / (2 * s))
    sym(WA, WB, 1, 2, -x2 * x3 / (2 * s))
    sym(WC, WD, 1, 2, b * t1 ** 2 * x2 * x3 / (2 * s))
    anti(WA, WB, 1, 3, x3p / (2 * sb))
    anti(WB, WA, 1, 4, x1p * x2 * x3 / (2 * sb * s))
    anti(WC, WD, 1, 4, t1 * x2 * x3 / (2 * s))
    anti(WB, WA, 1, 5, x1p * x3 ** 2 / (2 * sb * s))
    anti(WD, WC, 1, 5, t1 * x2 ** 2 / (2 * s))
    # row 2 (electric 3)
    sym(WC, WD, 2, 0, -a * t1 * t3 / 2)
    sym(WA, WB, 2, 1, -x2 * x3 / (2 * s))
    sym(WC, WD, 2, 1, b * t1 ** 2 * x2 * x3 / (2 * s))
    sym(WA, WB, 2, 2, x2 ** 2 / (2 * s))
    sym(WC, WD, 2, 2, b * t1 ** 2 * x3 ** 2 / (2 * s))
    anti(WB, WA, 2, 3, x2p / (2 * sb))
    anti(WA, WB, 2, 4, x1p * x2 ** 2 / (2 * sb * s))
    anti(WC, WD, 2, 4, t1 * x3 ** 2 / (2 * s))
    anti(WA, WB, 2, 5, x1p * x2 * x3 / (2 * sb * s))
    anti(WD, WC, 2, 5, t1 * x2 * x3 / (2 * s))
    # row 3 (magnetic 1)
    anti(WA, WB, 3, 1, sb * x3p / 2)
    anti(WB, WA, 3, 2, sb * x2p / 2)
    sym(WA, WB, 3, 3, sp / 2)
    sym(WA, WB, 3, 4, -x1p * x2p / 2)
    sym(WA, WB, 3, 5, -x1p * x3p / 2)
    # row 4 (magnetic 2)
    anti(WD, WC, 4, 0, a * t3 / 2)
    anti(WB, WA, 4, 1, sb * x1p * x2 * x3 / (2 * s))
    anti(WC, WD, 4, 1, b * t1 * x2 * x3 / (2 * s))
    anti(WA, WB, 4, 2, sb * x1p * x2 ** 2 / (2 * s))
    anti(WC, WD, 4, 2, b * t1 * x3 ** 2 / (2 * s))
    sym(WA, WB, 4, 3, -x1p * x2p / 2)
    sym(WA, WB, 4, 4, x1p ** 2 * x2 ** 2 / (2 * s))
    sym(WC, WD, 4, 4, x3 ** 2 / (2 * s))
    sym(WA, WB, 4, 5, x1p ** 2 * x2 * x3 / (2 * s))
    sym(WC, WD, 4, 5, -x2 * x3 / (2 * s))
    # row 5 (magnetic 3)
    anti(WC, WD, 5, 0, a * t2 / 2)
    anti(WB, WA, 5, 1, sb * x1p * x3 ** 2 / (2 * s))
    anti(WD, WC, 5, 1, b * t1 * x2 ** 2 / (2 * s))
    anti(WA, WB, 5, 2, sb * x1p * x2 * x3 / (2 * s))
    anti(WD, WC, 5, 2, b * t1 * x2 * x3 / (2 * s))
    sym(WA, WB, 5, 3, -x1p * x3p / 2)
    sym(WA, WB, 5, 4, x1p ** 2 * x2 * x3 / (2 * s))
    sym(WC, WD, 5, 4, -x2 * x3 / (2 * s))
    sym(WA, WB, 5, 5, x1p ** 2 * x3 ** 2 / (2 * s))
    sym(WC, WD, 5, 5, x2 ** 2 / (2 * s))

    if flip_entry is not None:
        i, j = flip_entry
        for W in (WA, WB, WC, WD):
            W[..., i, j] = -W[..., i, j]
    return WA, WB, WC, WD


def m3c_matrix(omega, xi, mat):
    """Charge part M_c of the 3D inverse symbol."""
    xi = np.asarray(xi, dtype=float)
    a, b = mat.a, mat.b
    n = np.sqrt(np.einsum('...i,...i->...', xi, xi))
    ne = norm_eps(xi, mat)
    xp = xi / n[..., None]
    xt = xi / ne[..., None]
    M = np.zeros(xi.shape[:-1] + (6, 6), dtype=complex)
    w = np.stack([b * xt[..., 0], a * xt[..., 1], a * xt[..., 2]], axis=-1)
    M[..., :3, :3] = w[..., :, None] * xt[..., None, :]
    M[..., 3:, 3:] = xp[..., :, None] * xp[..., None, :]
    M *= 1.0 / (1j * omega)
    return M


def resolvent_matrix_3d(omega, xi, mat, guard=AXIS_GUARD, flip_entry=None):
    """Full 3D inverse symbol M(A, B, C, D) + M_c at Im(omega) != 0.

    Raises DegenerateDirection near the distinguished axis, where the
    caller inverts the 6x6 symbol directly.
    """
    if omega.imag == 0:
        raise RealFrequency("unsplit resolvent needs Im(omega) != 0")
    if not mat.is_canonical:
        raise ValueError("resolvent_matrix_3d requires a canonicalized material")
    xi = np.asarray(xi, dtype=float)
    n2 = np.einsum('...i,...i->...', xi, xi)
    if np.any(xi[..., 1] ** 2 + xi[..., 2] ** 2 < guard * n2) or np.any(n2 == 0):
        raise DegenerateDirection("wavevector on or near the distinguished axis")
    A, B, C, D = scalar_resolvent_values(omega, xi, mat)
    WA, WB, WC, WD = _m3_coeffs(xi, mat, flip_entry=flip_entry)
    M = (WA * A[..., None, None] + WB * B[..., None, None]
         + WC * C[..., None, None] + WD * D[..., None, None])
    return M + m3c_matrix(omega, xi, mat)


def resolvent_matrix(omega, xi, mat, **kw):
    """Dimension dispatch for the closed-form inverse symbol."""
    if mat.dim == 2:
        return resolvent_matrix_2d(omega, xi, mat)
    return resolvent_matrix_3d(omega, xi, mat, **kw)


def charge_column_2d(omega, xi, mat, J_hat):
    """M_c applied to J, expressed through the charge rho_e = i xi . J_e."""
    xi = np.asarray(xi, dtype=float)
    J_hat = np.asarray(J_hat, dtype=complex)
    e = mat.eps_inv
    e11, e12, e22 = e[0, 0], e[0, 1], e[1, 1]
    n = norm_eps_prime(xi, mat)
    x1p = xi[..., 0] / n
    x2p = xi[..., 1] / n
    rho_e = 1j * (xi[..., 0] * J_hat[..., 0] + xi[..., 1] * J_hat[..., 1])
    col = np.stack([e12 * x2p - e22 * x1p,
                    e12 * x1p - e11 * x2p,
                    np.zeros_like(x1p)], axis=-1)
    return col * (rho_e / (mat.mu * omega * n))[..., None]


def charge_column_3d(omega, xi, mat, J_hat):
    """M_c applied to J through the charges rho_e, rho_m of both triples."""
    xi = np.asarray(xi, dtype=float)
    J_hat = np.asarray(J_hat, dtype=complex)
    a, b = mat.a, mat.b
    n = np.sqrt(np.einsum('...i,...i->...', xi, xi))
    ne = norm_eps(xi, mat)
    xp = xi / n[..., None]
    xt = xi / ne[..., None]
    rho_e = 1j * np.einsum('...i,...i->...', xi, J_hat[..., :3])
    rho_m = 1j * np.einsum('...i,...i->...', xi, J_hat[..., 3:])
    fe = -(rho_e / (omega * ne))[..., None]
    fm = -(rho_m / (omega * n))[..., None]
    ecol = np.stack([b * xt[..., 0], a * xt[..., 1], a * xt[..., 2]], axis=-1)
    return np.concatenate([ecol * fe, xp * fm], axis=-1)


@dataclass
class MultiplierSplit:
    """Decomposition of the resolvent matrix at real frequency.

    Off the singular sphere the matrix is
        regular + pv_weight / (i (omega - r))
    with r the flavor norm of xi.  In the distributional limit the scalar
    becomes a principal value plus a surface delta, and the matrix is
        regular + pv_weight (x) pv[1/(i(omega - r))]
                + surface_weight (x) delta(r - |omega|)
    where surface_weight already carries the -+ i pi / i factor picked by
    ``sign``.

    qform is the SPD matrix of the flavor norm: the singular sphere is
    { <xi, qform xi> = singular_radius^2 }.
    """

    regular: np.ndarray
    pv_weight: np.ndarray
    surface_weight: np.ndarray
    singular_radius: float
    qform: np.ndarray


def _assemble_split(regular, W, sign, radius, qform):
    # limit of 1/(i(w +- i d - r)): (1/i) pv - (+-) (1/i) i pi delta
    surf = W * (-sign * np.pi)
    return MultiplierSplit(regular=regular, pv_weight=W,
                           surface_weight=surf,
                           singular_radius=radius, qform=qform)


def sokhotsky_split(omega, xi, mat, sign=+1):
    """Split the resolvent matrix at real omega per singular sphere.

    ``sign`` +1/-1 selects the limit from above/below the real axis.  For
    omega > 0 the scalar A (and C in 3D) is singular; for omega < 0 it is
    B (and D), by the reflection symmetry of the spectrum.  Returns one
    MultiplierSplit in 2D and a pair (euclidean-sphere split,
    anisotropic-sphere split) in 3D.
    """
    omega = float(omega)
    if omega == 0:
        raise ValueError("omega must be nonzero real")
    xi = np.asarray(xi, dtype=float)
    radius = abs(omega)
    if mat.dim == 2:
        A, B = scalar_resolvent_values(omega, xi, mat)
        WA, WB = _m2_coeffs(xi, mat)
        Mc = m2c_matrix(omega, xi, mat)
        if omega > 0:
            regular = WB * B[..., None, None] + Mc
            Wsing = WA
        else:
            regular = WA * A[..., None, None] + Mc
            Wsing = WB
        return _assemble_split(regular, Wsing, sign, radius, mat.qform)
    A, B, C, D = scalar_resolvent_values(omega, xi, mat)
    WA, WB, WC, WD = _m3_coeffs(xi, mat)
    Mc = m3c_matrix(omega, xi, mat)
    terms = {'A': WA * A[..., None, None], 'B': WB * B[..., None, None],
             'C': WC * C[..., None, None], 'D': WD * D[..., None, None]}
    sing_euc, sing_ani = ('A', 'C') if omega > 0 else ('B', 'D')
    W_euc = WA if omega > 0 else WB
    W_ani = WC if omega > 0 else WD
    q_euc = mat.b * np.eye(3)        # sqrt(b)|xi| sphere
    q_ani = mat.qform                # |xi|_e sphere
    reg_euc = sum(v for k, v in terms.items() if k != sing_euc) + Mc
    reg_ani = sum(v for k, v in terms.items() if k != sing_ani) + Mc
    return (_assemble_split(reg_euc, W_euc, sign, radius, q_euc),
            _assemble_split(reg_ani, W_ani, sign, radius, q_ani))


def regular_matrix(omega, xi, mat):
    """Resolvent at real omega with every singular scalar removed.

    This is the smooth background shared by both Sokhotsky splits; the
    singular spheres contribute through the principal-value and surface
    weights only.
    """
    omega = float(omega)
    xi = np.asarray(xi, dtype=float)
    if mat.dim == 2:
        A, B = scalar_resolvent_values(omega, xi, mat)
        WA, WB = _m2_coeffs(xi, mat)
        Mc = m2c_matrix(omega, xi, mat)
        if omega > 0:
            return WB * B[..., None, None] + Mc
        return WA * A[..., None, None] + Mc
    A, B, C, D = scalar_resolvent_values(omega, xi, mat)
    WA, WB, WC, WD = _m3_coeffs(xi, mat)
    Mc = m3c_matrix(omega, xi, mat)
    if omega > 0:
        return WB * B[..., None, None] + WD * D[..., None, None] + Mc
    return WA * A[..., None, None] + WC * C[..., None, None] + Mc


def singular_weights(omega, xi, mat):
    """List of (pv-coefficient matrix, flavor qform) for real omega."""
    xi = np.asarray(xi, dtype=float)
    if mat.dim == 2:
        WA, WB = _m2_coeffs(xi, mat)
        return [(WA if omega > 0 else WB, mat.qform)]
    WA, WB, WC, WD = _m3_coeffs(xi, mat)
    if omega > 0:
        return [(WA, mat.b * np.eye(3)), (WC, mat.qform)]
    return [(WB, mat.b * np.eye(3)), (WD, mat.qform)]
