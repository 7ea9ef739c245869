"""Chern connection, curvature and torsion of a Hermitian metric at a point.

Conventions, fixed once here and used by every downstream module:

* holomorphic coordinate frame e0_a = d/dz_a with coframe dz_a; the
  connection matrix in it is theta = (del g) g^{-1} (type (1,0)) and the
  curvature is Theta = delbar theta, with nabla e_i = sum_j theta_{ij} e_j;
* canonical unitary frame e_i = sum_a P_{ia} e0_a with P = L^{-1}, where
  L is the Cholesky factor of g with positive real diagonal (so
  P g P^* = I); the unitary coframe is psi = tL dz, i.e.
  dz_a = sum_i P_{ia} psi_i;
* torsion 2-forms tau_k = sum_{i,j} T^k_{ij} psi_i ^ psi_j summed over all
  ordered pairs with T antisymmetric, so the coefficient of psi_i ^ psi_j
  for i < j equals 2 T^k_{ij};
* curvature components Theta_{ij} = sum_{k,l} Rh[k,l,i,j] psi_k ^ psibar_l
  (first two indices from the 2-form, last two from the endomorphism).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dsl import MetricField
from .errors import InsufficientJetOrderError
from .forms import Form
from .jets import Jet2, JetMatrix


def _theta_coefficients(g, ginv):
    """Coefficient matrices of theta = (del g) g^{-1}, one per dz_k slot."""
    return [g.wirtinger(k) @ ginv for k in range(g.n)]


def _theta_forms(theta_coeff, n):
    mats = [[Form(n, 1) for _ in range(n)] for _ in range(n)]
    for k, M in enumerate(theta_coeff):
        for i in range(n):
            for j in range(n):
                mats[i][j] = mats[i][j] + Form(n, 1, {(k,): M[i, j]})
    return mats


def _coordinate_torsion(theta_forms, n):
    """tau_i = sum_j theta_{ji} ^ dz_j in the holomorphic coordinate frame."""
    taus = []
    for i in range(n):
        acc = Form(n, 2)
        for j in range(n):
            acc = acc + theta_forms[j][i].wedge(Form.dz(n, j))
        taus.append(acc)
    return taus


def torsion_jets_in_frame(tau_coord, F):
    """Torsion coefficient jets T^k_{ij} for the frame e_i = sum_a F_{ia} e0_a.

    ``tau_coord`` are the coordinate-frame torsion 2-forms; ``F`` is the
    jet-valued frame matrix.  Returns a nested list T[k][i][j] of jets,
    antisymmetric in (i, j).
    """
    n = F.rows
    K = F.inverse()
    zero = Jet2.constant(0.0, tau_coord[0].n)
    T = [[[zero for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for k in range(n):
        # tau^F_k = sum_j K_{jk} tau0_j
        combined = {}
        for j in range(n):
            for key, jet in tau_coord[j].coeffs.items():
                term = K[j, k] * jet
                combined[key] = (combined[key] + term) if key in combined else term
        for (a, b), c in combined.items():
            for i in range(n):
                for jj in range(i + 1, n):
                    w = F[i, a] * F[jj, b] - F[jj, a] * F[i, b]
                    T[k][i][jj] = T[k][i][jj] + c * w * 0.5
    for k in range(n):
        for i in range(n):
            for jj in range(i + 1, n):
                T[k][jj][i] = -T[k][i][jj]
    return T


def frame_connection_values(theta_coeff, F):
    """Chern connection coefficients in an arbitrary frame, value level.

    Returns an array th[c, i, j] over the 2n coordinate cotangent slots with
    theta^F = F theta0 F^{-1} + dF F^{-1}.
    """
    n = F.rows
    Fv = F.values()
    Finv = np.linalg.inv(Fv)
    th = np.zeros((2 * n, n, n), dtype=complex)
    for c in range(2 * n):
        dF = F.d1_values(c)
        th[c] = dF @ Finv
        if c < n:
            th[c] += Fv @ theta_coeff[c].values() @ Finv
    return th


@dataclass
class ChernData:
    """All Chern-side pointwise data of a metric at one chart point."""

    metric: MetricField
    point: np.ndarray
    n: int
    g: JetMatrix
    ginv: JetMatrix
    L: JetMatrix
    P: JetMatrix
    theta_coeff: list
    theta_forms: list
    Theta_forms: list
    tau_coord: list
    T_jets: list
    T: np.ndarray
    Rh: np.ndarray
    Rh_type_residual: float
    eta_jets: list
    eta: np.ndarray
    theta_u_vals: np.ndarray
    covT: np.ndarray = field(default=None)
    covT_bar: np.ndarray = field(default=None)

    @property
    def Pv(self):
        return self.P.values()

    @property
    def Lv(self):
        return self.L.values()

    def omega_form(self):
        """Kahler form omega = i sum g_{ab} dz_a ^ dzbar_b with jet coefficients."""
        n = self.n
        coeffs = {}
        for a in range(n):
            for b in range(n):
                coeffs[(a, n + b)] = self.g[a, b] * 1j
        return Form(n, 2, coeffs)

    def sigma_form(self):
        """Torsion (2,2) form sigma = t(tau) ^ g taubar (coordinate frame)."""
        n = self.n
        acc = Form(n, 4)
        taubar = [t.conj() for t in self.tau_coord]
        for i in range(n):
            for j in range(n):
                acc = acc + self.tau_coord[i].wedge(taubar[j].scale(self.g[i, j]))
        return acc

    def torsion_norm_sq(self):
        return float(np.sum(np.abs(self.T) ** 2))

    def frame_coframe_change(self):
        """Matrix C with dz_a = sum_i C[a, i] psi_i for the canonical coframe."""
        return self.Pv.T


def chern_at(metric, point, g=None):
    """Compute connection, curvature and torsion data at ``point``.

    ``g`` may override the evaluated metric jets (used by the
    finite-difference oracle mode).
    """
    point = np.asarray(point, dtype=complex)
    n = metric.n
    if g is None:
        g = metric.evaluate(point)
    ginv = g.inverse()
    L = g.cholesky()
    P = L.inverse()
    Pv = P.values()

    theta_coeff = _theta_coefficients(g, ginv)
    theta_forms = _theta_forms(theta_coeff, n)
    Theta_forms = [
        [theta_forms[i][j].exterior_d(part="delbar") for j in range(n)] for i in range(n)
    ]
    tau_coord = _coordinate_torsion(theta_forms, n)

    T_jets = torsion_jets_in_frame(tau_coord, P)
    T = np.array(
        [[[T_jets[k][i][j].value for j in range(n)] for i in range(n)] for k in range(n)]
    )

    eta_jets = []
    for j in range(n):
        acc = Jet2.constant(0.0, n)
        for i in range(n):
            acc = acc + T_jets[i][i][j]
        eta_jets.append(acc)
    eta = np.array([e.value for e in eta_jets])

    # curvature components in the canonical unitary frame
    C = Pv.T  # dz_a = sum_i Pv[i, a] psi_i
    Pinv_v = L.values()
    Rh = np.zeros((n, n, n, n), dtype=complex)
    type_residual = 0.0
    for i in range(n):
        for j in range(n):
            acc = Form(n, 2)
            for a in range(n):
                for b in range(n):
                    w = Pv[i, a] * Pinv_v[b, j]
                    if w != 0:
                        acc = acc + Theta_forms[a][b].scale(w)
            conv = acc.to_coframe(C)
            A20, B11, C02 = conv.blocks_2form()
            Rh[:, :, i, j] = B11
            type_residual = max(
                type_residual, float(np.max(np.abs(A20))), float(np.max(np.abs(C02)))
            )

    theta_u_vals = frame_connection_values(theta_coeff, P)

    data = ChernData(
        metric=metric,
        point=point,
        n=n,
        g=g,
        ginv=ginv,
        L=L,
        P=P,
        theta_coeff=theta_coeff,
        theta_forms=theta_forms,
        Theta_forms=Theta_forms,
        tau_coord=tau_coord,
        T_jets=T_jets,
        T=T,
        Rh=Rh,
        Rh_type_residual=type_residual,
        eta_jets=eta_jets,
        eta=eta,
        theta_u_vals=theta_u_vals,
    )
    data.covT, data.covT_bar = covderiv_torsion(data)
    return data


def covderiv_torsion(data):
    """Covariant derivatives T^k_{ij,l} and T^k_{ij,lbar} in the unitary frame.

    The raw frame-direction derivative of the jet-valued coefficients is
    corrected by the three connection-action terms (two lower indices, one
    upper index).
    """
    n = data.n
    Pv = data.Pv
    T = data.T
    Tj = data.T_jets
    th = data.theta_u_vals

    if any(
        Tj[k][i][j].order < 1 for k in range(n) for i in range(n) for j in range(n)
    ):
        raise InsufficientJetOrderError(
            "torsion jets lost their first derivatives; cannot happen when the "
            "metric is evaluated at order 2"
        )
    dT = np.array(
        [[[Tj[k][i][j].d1 for j in range(n)] for i in range(n)] for k in range(n)]
    )  # [k, i, j, slot]
    eT = np.einsum("la,kija->kijl", Pv, dT[..., :n])
    ebT = np.einsum("la,kija->kijl", np.conj(Pv), dT[..., n:])

    th10 = np.einsum("la,aij->lij", Pv, th[:n])
    th01 = np.einsum("la,aij->lij", np.conj(Pv), th[n:])

    def corrected(raw, conn):
        out = raw.copy()
        out -= np.einsum("lir,krj->kijl", conn, T)
        out -= np.einsum("ljr,kir->kijl", conn, T)
        out += np.einsum("lrk,rij->kijl", conn, T)
        return out

    return corrected(eT, th10), corrected(ebT, th01)


# ----------------------------------------------------------------------
# identity residuals in the holomorphic coordinate frame
def bianchi_residual(data):
    """Residual of d tau + t(theta) ^ tau - t(Theta) ^ phi (coordinate frame)."""
    n = data.n
    worst = 0.0
    for i in range(n):
        acc = data.tau_coord[i].exterior_d()
        for j in range(n):
            acc = acc + data.theta_forms[j][i].wedge(data.tau_coord[j])
            acc = acc - data.Theta_forms[j][i].wedge(Form.dz(n, j))
        worst = max(worst, acc.max_abs())
    return worst


def ddbar_omega_form(data):
    """i del delbar omega as a coordinate-frame (2,2) form."""
    return data.omega_form().exterior_d(part="delbar").exterior_d(part="del").scale(1j)


def phi_Theta_phibar_form(data):
    """t(phi) ^ Theta ^ g phibar, the frame-invariant curvature (2,2) form."""
    n = data.n
    acc = Form(n, 4)
    for i in range(n):
        for j in range(n):
            gbar_j = Form(n, 1)
            for k in range(n):
                gbar_j = gbar_j + Form(n, 1, {(n + k,): data.g[j, k]})
            acc = acc + Form.dz(n, i).wedge(data.Theta_forms[i][j]).wedge(gbar_j)
    return acc


def curvature_identity_residual(data):
    """Residual of i del delbar omega = t(tau)^taubar + t(phi)^Theta^phibar."""
    lhs = ddbar_omega_form(data)
    rhs = data.sigma_form() + phi_Theta_phibar_form(data)
    return (lhs - rhs).max_abs()


def del_omega_residual(data):
    """Residual of del omega = i t(tau) ^ g phibar."""
    n = data.n
    lhs = data.omega_form().exterior_d(part="del")
    rhs = Form(n, 3)
    for i in range(n):
        for j in range(n):
            rhs = rhs + data.tau_coord[i].wedge(
                Form(n, 1, {(n + j,): data.g[i, j]})
            )
    return (lhs - rhs.scale(1j)).max_abs()


def balanced_identity_residual(data):
    """Residual of del(omega^{n-1}) + 2 eta ^ omega^{n-1}."""
    from .forms import wedge_power

    n = data.n
    omega = data.omega_form()
    om_pow = wedge_power(omega, n - 1)
    lhs = om_pow.exterior_d(part="del")
    eta_form = Form(n, 1)
    for j in range(n):
        for a in range(n):
            eta_form = eta_form + Form(n, 1, {(a,): data.L[a, j] * data.eta_jets[j]})
    resid = lhs + eta_form.wedge(om_pow).scale(2.0)
    return resid.max_abs()


def eta_form(data):
    """Torsion 1-form eta = sum_j eta_j psi_j in coordinate components."""
    n = data.n
    out = Form(n, 1)
    for j in range(n):
        for a in range(n):
            out = out + Form(n, 1, {(a,): data.L[a, j] * data.eta_jets[j]})
    return out


def delbar_eta_residual(data):
    """Max coefficient of delbar(eta); zero when eta is holomorphic."""
    return eta_form(data).exterior_d(part="delbar").max_abs()


def kahler_like_residual(data):
    """Deviation of Rh from its first/third index symmetry."""
    return float(np.max(np.abs(data.Rh - data.Rh.transpose(2, 1, 0, 3))))


def theta_wedge_phi_residual(data):
    """Max coefficient of t(Theta) ^ phi (coordinate frame)."""
    n = data.n
    worst = 0.0
    for i in range(n):
        acc = Form(n, 3)
        for j in range(n):
            acc = acc + data.Theta_forms[j][i].wedge(Form.dz(n, j))
        worst = max(worst, acc.max_abs())
    return worst


def skew_hermitian_residual(data):
    """Unitary-frame curvature satisfies Theta + Theta^* = 0.

    On components (the form conjugation swaps and flips the psi ^ psibar
    pair) this reads Rh[k,l,i,j] = conj(Rh[l,k,j,i]).
    """
    Rh = data.Rh
    return float(np.max(np.abs(Rh - np.conj(Rh.transpose(1, 0, 3, 2)))))


# ----------------------------------------------------------------------
# frame normalization: a unitary frame field whose connection vanishes at p
@dataclass
class NormalFrame:
    metric: MetricField
    point: np.ndarray
    C_hol: np.ndarray  # theta-tilde dz_a coefficients at p, [a, i, j]
    C_anti: np.ndarray  # theta-tilde dzbar_a coefficients at p

    def frame_jets(self, q):
        """Jet matrix of the frame field A(z) P(z) at the point q."""
        metric = self.metric
        n = metric.n
        q = np.asarray(q, dtype=complex)
        g = metric.evaluate(q)
        P = g.cholesky().inverse()
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = Jet2.constant(1.0 if i == j else 0.0, n)
                for a in range(n):
                    za = Jet2.coordinate(a, q[a], n)
                    dz = za - complex(self.point[a])
                    dzb = za.conj() - complex(np.conj(self.point[a]))
                    acc = acc - dz * complex(self.C_hol[a, i, j])
                    acc = acc - dzb * complex(self.C_anti[a, i, j])
                row.append(acc)
            rows.append(row)
        A = JetMatrix(rows)
        return A @ P

    def connection_values_at(self, q):
        q = np.asarray(q, dtype=complex)
        g = self.metric.evaluate(q)
        ginv = g.inverse()
        theta_coeff = _theta_coefficients(g, ginv)
        return frame_connection_values(theta_coeff, self.frame_jets(q))

    def theta_norm_at_base(self):
        return float(np.max(np.abs(self.connection_values_at(self.point))))

    def torsion_jets_at(self, q):
        q = np.asarray(q, dtype=complex)
        g = self.metric.evaluate(q)
        ginv = g.inverse()
        theta_coeff = _theta_coefficients(g, ginv)
        theta_forms = _theta_forms(theta_coeff, self.metric.n)
        tau = _coordinate_torsion(theta_forms, self.metric.n)
        return torsion_jets_in_frame(tau, self.frame_jets(q))

    def torsion_values_at(self, q):
        n = self.metric.n
        Tj = self.torsion_jets_at(q)
        return np.array(
            [[[Tj[k][i][j].value for j in range(n)] for i in range(n)] for k in range(n)]
        )


def normal_frame_at(metric, point, data=None):
    """Unitary frame field with vanishing connection matrix at ``point``.

    The Cholesky frame is composed with a first-order polynomial unitary
    correction A(z) = I - sum_a C_a (z_a - p_a) - sum_a D_a (zbar_a - pbar_a)
    whose derivatives cancel the connection at p.
    """
    if data is None:
        data = chern_at(metric, point)
    n = metric.n
    return NormalFrame(
        metric=metric,
        point=np.asarray(point, dtype=complex),
        C_hol=data.theta_u_vals[:n].copy(),
        C_anti=data.theta_u_vals[n:].copy(),
    )
