"""Curvature and torsion of left-invariant almost Hermitian structures.

A model is a real Lie algebra (structure constants ``c[i, j, k]`` with
``[e_i, e_j] = sum_k c[i, j, k] e_k``), a metric and an orthogonal almost
complex structure. Everything is invariant, so derivatives of invariant
functions vanish and each curvature identity becomes finite linear algebra in
one orthonormal frame.

Index conventions (orthonormal frame, so indices are raised for free):

* ``Gamma[i, j, k] = g(nabla_{e_i} e_j, e_k)``
* ``T[i, j, k]``  = k-th component of T(e_i, e_j)
* ``R[i, j]``     = matrix of R_{e_i e_j} = [nabla_i, nabla_j] - nabla_{[e_i, e_j]}
* 3-forms and TM-valued 2-forms share the identification
  ``psi[i, j, k] = phi(e_k, e_i, e_j)`` (output slot last).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from itertools import permutations
from pathlib import Path

import numpy as np

TOL = 1e-12

# Calibrated so that the (0,2)-part of the Chern torsion equals N; see
# calibrate_nijenhuis().
NIJENHUIS_SCALE = 0.25
# Sign s in d^cF(X, Y, Z) = s * dF(JX, JY, JZ), fixed by t = d^cF / 3.
DC_SIGN = -1.0


class ModelError(ValueError):
    """A model violates Jacobi, J^2 = -1, or orthogonality."""


@dataclass(frozen=True)
class LieAlgebraModel:
    structure_constants: np.ndarray
    J: np.ndarray
    metric: np.ndarray | None = None
    name: str = "model"

    def __post_init__(self):
        c = np.asarray(self.structure_constants, dtype=float)
        m = c.shape[0]
        object.__setattr__(self, "structure_constants", c)
        object.__setattr__(self, "J", np.asarray(self.J, dtype=float))
        g = np.eye(m) if self.metric is None else np.asarray(self.metric, dtype=float)
        object.__setattr__(self, "metric", g)

    @property
    def dim(self) -> int:
        return self.structure_constants.shape[0]

    def bracket(self, X, Y):
        return np.einsum("ijk,i,j->k", self.structure_constants, X, Y)

    def residuals(self) -> dict[str, float]:
        c, J, g = self.structure_constants, self.J, self.metric
        m = self.dim
        return {
            "antisymmetry": float(np.max(np.abs(c + c.transpose(1, 0, 2)))),
            "jacobi": jacobi_residual(c),
            "J_squared": float(np.max(np.abs(J @ J + np.eye(m)))),
            "J_orthogonal": float(np.max(np.abs(J.T @ g @ J - g))),
            "metric_symmetric": float(np.max(np.abs(g - g.T))),
        }

    def validate(self, tol: float = TOL) -> None:
        if self.dim % 2:
            raise ModelError(f"{self.name}: dimension {self.dim} is odd")
        if np.min(np.linalg.eigvalsh(0.5 * (self.metric + self.metric.T))) <= 0:
            raise ModelError(f"{self.name}: metric is not positive definite")
        for key, val in self.residuals().items():
            scale = max(1.0, float(np.max(np.abs(self.structure_constants)))) ** 2 \
                if key == "jacobi" else 1.0
            if val > tol * scale:
                raise ModelError(f"{self.name}: {key} residual {val:.3e} exceeds {tol:g}")

    def scaled(self, kappa: float) -> "LieAlgebraModel":
        """Same algebra and J with metric e^(2 kappa) g."""
        return replace(self, metric=np.exp(2 * kappa) * self.metric,
                       name=f"{self.name}*e^{2 * kappa:g}")

    # -- file format ------------------------------------------------------
    def to_json(self) -> dict:
        c = self.structure_constants
        m = self.dim
        entries = [[i, j, k, float(c[i, j, k])] for i in range(m) for j in range(i + 1, m)
                   for k in range(m) if c[i, j, k] != 0]
        metric = "identity" if np.array_equal(self.metric, np.eye(m)) else self.metric.tolist()
        return {"name": self.name, "dim": m, "structure_constants": entries,
                "metric": metric, "J": self.J.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "LieAlgebraModel":
        m = int(data["dim"])
        c = np.zeros((m, m, m))
        for i, j, k, v in data["structure_constants"]:
            c[i, j, k] += v
            if i != j:
                c[j, i, k] -= v
        metric = data.get("metric", "identity")
        g = np.eye(m) if metric in (None, "identity") else np.array(metric, dtype=float)
        return cls(c, np.array(data["J"], dtype=float), g, data.get("name", "model"))

    @classmethod
    def load(cls, path) -> "LieAlgebraModel":
        model = cls.from_json(json.loads(Path(path).read_text()))
        model.validate()
        return model


def jacobi_residual(c: np.ndarray) -> float:
    # [[e_i, e_j], e_k] + cyclic
    t = np.einsum("ijl,lkm->ijkm", c, c)
    cyc = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
    return float(np.max(np.abs(cyc))) if c.size else 0.0


def change_basis(c: np.ndarray, E: np.ndarray) -> np.ndarray:
    """Structure constants in the basis whose vectors are the columns of E."""
    Einv = np.linalg.inv(E)
    return np.einsum("ia,jb,ijk,ck->abc", E, E, c, Einv)


def orthonormal_model(model: LieAlgebraModel) -> LieAlgebraModel:
    """Re-express a model in a g-orthonormal frame (identity when g = Id)."""
    g = model.metric
    m = model.dim
    if np.allclose(g, np.eye(m), atol=0, rtol=0):
        return model
    L = np.linalg.cholesky(g)
    E = np.linalg.inv(L.T)  # columns are g-orthonormal
    c = change_basis(model.structure_constants, E)
    J = np.linalg.inv(E) @ model.J @ E
    return LieAlgebraModel(c, J, np.eye(m), model.name)


def adapted_frame(J: np.ndarray) -> np.ndarray:
    """Orthonormal basis v_1, J v_1, v_2, J v_2, ... as columns."""
    m = J.shape[0]
    cols: list[np.ndarray] = []
    for k in range(m):
        if len(cols) == m:
            break
        v = np.eye(m)[:, k].copy()
        for w in cols:
            v -= (w @ v) * w
        nv = np.linalg.norm(v)
        if nv < 1e-8:
            continue
        v /= nv
        w = J @ v
        for u in cols:
            w -= (u @ w) * u
        w /= np.linalg.norm(w)
        cols += [v, w]
    return np.column_stack(cols)


def holomorphic_frame(J: np.ndarray) -> np.ndarray:
    """Columns z_a = (v_a - i J v_a)/2 spanning T^{1,0}."""
    E = adapted_frame(J)
    V = E[:, 0::2]
    return 0.5 * (V - 1j * (J @ V))


# -- connections ----------------------------------------------------------------

@dataclass(frozen=True)
class Connection:
    Gamma: np.ndarray
    flag: str  # "chern" | "levi_civita"

    def matrix(self, i: int) -> np.ndarray:
        """Matrix of nabla_{e_i} acting on component vectors."""
        return self.Gamma[i].T

    def along(self, X) -> np.ndarray:
        return np.einsum("i,ijk->kj", X, self.Gamma)


def levi_civita(model: LieAlgebraModel) -> Connection:
    model = orthonormal_model(model)
    c = model.structure_constants
    # Koszul: g(D_i e_j, e_k) = (c_ijk - c_jki + c_kij) / 2
    G = 0.5 * (c - c.transpose(2, 0, 1) + c.transpose(1, 2, 0))
    return Connection(G, "levi_civita")


def chern_connection(model: LieAlgebraModel) -> Connection:
    """Chern connection of invariant fields from the (0,1)-bracket formula.

    For invariant W, Z in T^{1,0}: h(W, nabla_X Z) = h(W, [X01, Z]) + h([W, X01], Z).
    """
    model = orthonormal_model(model)
    c, J = model.structure_constants, model.J
    m = model.dim
    Z = holomorphic_frame(J)
    zeta = 2 * Z.conj().T  # dual coframe z^a on T^{1,0}, kills T^{0,1}

    def br(a, b):
        return np.einsum("ijk,i,j->k", c, a, b)

    def h(a, b):
        return a @ b.conj()

    n = Z.shape[1]
    Gamma = np.zeros((m, m, m))
    for i in range(m):
        X = np.eye(m)[:, i]
        X01 = 0.5 * (X + 1j * (J @ X))
        Gm = np.zeros((n, n), dtype=complex)
        for a in range(n):
            for b in range(n):
                rhs = h(Z[:, a], br(X01, Z[:, b])) + h(br(Z[:, a], X01), Z[:, b])
                Gm[a, b] = 2 * np.conj(rhs)
        A = 2 * np.real(Z @ Gm @ zeta)
        Gamma[i] = A.T
    return Connection(Gamma, "chern")


def chern_by_constraints(model: LieAlgebraModel) -> Connection:
    """Independent characterisation: the unique connection with nabla g = 0,
    nabla J = 0 and J-anti-invariant torsion, found by least squares."""
    model = orthonormal_model(model)
    c, J = model.structure_constants, model.J
    m = model.dim
    N = m ** 3

    def idx(i, j, k):
        return (i * m + j) * m + k

    rows, rhs = [], []
    # metric: Gamma[i,j,k] + Gamma[i,k,j] = 0
    for i in range(m):
        for j in range(m):
            for k in range(j, m):
                r = np.zeros(N)
                r[idx(i, j, k)] += 1
                r[idx(i, k, j)] += 1
                rows.append(r)
                rhs.append(0.0)
    # nabla J = 0: A_i J - J A_i = 0 with A_i[k, j] = Gamma[i, j, k]
    for i in range(m):
        for k in range(m):
            for l in range(m):
                r = np.zeros(N)
                for j in range(m):
                    r[idx(i, j, k)] += J[j, l]      # (A_i J)[k, l]
                    r[idx(i, l, j)] -= J[k, j]      # (J A_i)[k, l]
                rows.append(r)
                rhs.append(0.0)
    # T(JX, JY) + T(X, Y) = 0, T(e_i, e_j)_k = Gamma[i,j,k] - Gamma[j,i,k] - c[i,j,k]
    for i in range(m):
        for j in range(m):
            for k in range(m):
                r = np.zeros(N)
                b = c[i, j, k]
                r[idx(i, j, k)] += 1
                r[idx(j, i, k)] -= 1
                for a in range(m):
                    for d in range(m):
                        w = J[a, i] * J[d, j]
                        if w:
                            r[idx(a, d, k)] += w
                            r[idx(d, a, k)] -= w
                            b += w * c[a, d, k]
                rows.append(r)
                rhs.append(b)
    sol, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    return Connection(sol.reshape(m, m, m), "chern")


def torsion(conn: Connection, model: LieAlgebraModel) -> np.ndarray:
    model = orthonormal_model(model)
    G = conn.Gamma
    return G - G.transpose(1, 0, 2) - model.structure_constants


def connection_residuals(conn: Connection, model: LieAlgebraModel) -> dict[str, float]:
    model = orthonormal_model(model)
    J = model.J
    G = conn.Gamma
    T = torsion(conn, model)
    out = {"metric": float(np.max(np.abs(G + G.transpose(0, 2, 1))))}
    out["nabla_J"] = float(max(np.max(np.abs(conn.matrix(i) @ J - J @ conn.matrix(i)))
                               for i in range(model.dim)))
    out["torsion_free"] = float(np.max(np.abs(T)))
    TJJ = np.einsum("ai,bj,abk->ijk", J, J, T)
    out["torsion_11"] = float(np.max(np.abs(TJJ + T)))
    return out


# -- exterior calculus on invariant forms ---------------------------------------

def d_invariant_2form(phi: np.ndarray, c: np.ndarray) -> np.ndarray:
    """d phi(X,Y,Z) = -phi([X,Y],Z) + phi([X,Z],Y) - phi([Y,Z],X)."""
    t = np.einsum("ijl,lk->ijk", c, phi)
    return -t + t.transpose(0, 2, 1) - t.transpose(2, 0, 1)


def d_invariant_1form(theta: np.ndarray, c: np.ndarray) -> np.ndarray:
    return -np.einsum("ijk,k->ij", c, theta)


def form_to_vector_valued(phi: np.ndarray) -> np.ndarray:
    """i(phi)(X, Y) = phi(-, X, Y)^sharp, stored as psi[i, j, k] = phi[k, i, j]."""
    return phi.transpose(1, 2, 0)


def vector_valued_to_form(psi: np.ndarray) -> np.ndarray:
    return psi.transpose(2, 0, 1)


def type_operator(psi: np.ndarray, J: np.ndarray) -> np.ndarray:
    """K(psi) = -J(psi(J., .) + psi(., J.)); eigenvalue r - s on TM-type (r, s)."""
    a = np.einsum("li,ljk->ijk", J, psi)
    b = np.einsum("lj,ilk->ijk", J, psi)
    return -np.einsum("kl,ijl->ijk", J, a + b)


def type_projections(psi: np.ndarray, J: np.ndarray) -> dict[tuple[int, int], np.ndarray]:
    K1 = type_operator(psi, J)
    K2 = type_operator(K1, J)
    return {(2, 0): (K2 + 2 * K1) / 8,
            (1, 1): psi - K2 / 4,
            (0, 2): (K2 - 2 * K1) / 8}


def norm2_form(phi: np.ndarray) -> float:
    """|phi|^2 = (1/p!) sum phi_{i1..ip}^2 in an orthonormal frame."""
    p = phi.ndim
    return float(np.sum(phi ** 2)) / float(np.prod(range(1, p + 1)))


def norm2_vv2(psi: np.ndarray) -> float:
    """Norm of a TM-valued 2-form: (1/2) sum_{ijk} psi[i,j,k]^2."""
    return 0.5 * float(np.sum(psi ** 2))


def antisymmetrize3(Tl: np.ndarray) -> np.ndarray:
    return (Tl + Tl.transpose(2, 0, 1) + Tl.transpose(1, 2, 0)) / 3.0


def nijenhuis_raw(model: LieAlgebraModel) -> np.ndarray:
    """[JX,JY] - J[JX,Y] - J[X,JY] - [X,Y] on frame pairs, output slot last."""
    model = orthonormal_model(model)
    c, J = model.structure_constants, model.J
    m = model.dim
    N = np.zeros((m, m, m))
    E = np.eye(m)
    for i in range(m):
        for j in range(m):
            X, Y = E[:, i], E[:, j]
            JX, JY = J @ X, J @ Y
            N[i, j] = (model.bracket(JX, JY) - J @ model.bracket(JX, Y)
                       - J @ model.bracket(X, JY) - model.bracket(X, Y))
    return N


@dataclass
class TorsionData:
    T: np.ndarray
    N: np.ndarray
    theta: np.ndarray
    t: np.ndarray
    F: np.ndarray
    dF: np.ndarray
    dcF: np.ndarray
    type_components: dict
    nijenhuis_scale: float


def fundamental_form(model: LieAlgebraModel) -> np.ndarray:
    """F(X, Y) = g(JX, Y) in an orthonormal frame."""
    model = orthonormal_model(model)
    return model.J.T.copy()


def torsion_package(model: LieAlgebraModel, chern: Connection | None = None,
                    nijenhuis_scale: float = NIJENHUIS_SCALE,
                    dc_sign: float = DC_SIGN) -> TorsionData:
    model = orthonormal_model(model)
    chern = chern or chern_connection(model)
    J, c = model.J, model.structure_constants
    T = torsion(chern, model)
    N = nijenhuis_scale * nijenhuis_raw(model)
    theta = np.einsum("ikk->i", T)
    Tl = T.transpose(2, 0, 1)  # Tl[x, y, z] = g(e_x, T(e_y, e_z))
    t = antisymmetrize3(Tl)
    F = fundamental_form(model)
    dF = d_invariant_2form(F, c)
    dcF = dc_sign * np.einsum("ai,bj,ck,abc->ijk", J, J, J, dF)
    return TorsionData(T=T, N=N, theta=theta, t=t, F=F, dF=dF, dcF=dcF,
                       type_components=type_projections(T, J),
                       nijenhuis_scale=nijenhuis_scale)


def calibrate_nijenhuis(model: LieAlgebraModel) -> float:
    """Scale s with T^{0,2} = s * raw Nijenhuis bracket expression (least squares)."""
    model = orthonormal_model(model)
    T = torsion(chern_connection(model), model)
    T02 = type_projections(T, model.J)[(0, 2)]
    raw = nijenhuis_raw(model)
    denom = float(np.sum(raw * raw))
    if denom < 1e-24:
        raise ValueError("J is integrable on this model; nothing to calibrate")
    return float(np.sum(T02 * raw)) / denom


# -- curvature -----------------------------------------------------------------

def curvature(conn: Connection, model: LieAlgebraModel) -> np.ndarray:
    """R[i, j] = [A_i, A_j] - sum_k c[i,j,k] A_k, with A_i the matrix of nabla_{e_i}."""
    model = orthonormal_model(model)
    c = model.structure_constants
    m = model.dim
    A = np.stack([conn.matrix(i) for i in range(m)])
    comm = np.einsum("iab,jbc->ijac", A, A) - np.einsum("jab,ibc->ijac", A, A)
    return comm - np.einsum("ijk,kab->ijab", c, A)


def lefschetz(phi: np.ndarray, J: np.ndarray) -> float:
    """Lambda(phi) = (1/2) sum_i phi(e_i, J e_i)."""
    return 0.5 * float(np.real(np.einsum("il,li->", phi, J)))


def ricci_forms(R: np.ndarray, J: np.ndarray):
    """Real-frame Ricci forms (rho, r) and the complex-frame third Ricci form sigma."""
    # rho(X, Y) = -Lambda(R_XY) = -(1/2) sum_k g(R_XY e_k, J e_k)
    rho = -0.5 * np.einsum("ijlk,lk->ij", R, J)
    # r(X, Y) = -(1/2) sum_i g(R_{e_i, J e_i} X, Y)
    RJ = np.einsum("li,ilab->ab", J, R)
    r = -0.5 * RJ.T
    sigma = third_ricci(R, J)
    return rho, r, sigma


def _R4(R: np.ndarray) -> np.ndarray:
    """R4[i, j, k, l] = g(R_{e_i e_j} e_k, e_l)."""
    return R.transpose(0, 1, 3, 2)


def _coframe(Z: np.ndarray) -> np.ndarray:
    return 2 * Z.conj().T


def third_ricci(R: np.ndarray, J: np.ndarray) -> np.ndarray:
    """sigma built literally from its complex-frame components."""
    Z = holomorphic_frame(J)
    Zb = Z.conj()
    R4 = _R4(R)

    def Rc(a, b, cc, d):
        return np.einsum("ijkl,ia,jb,kc,ld->abcd", R4, a, b, cc, d)

    G = Z.T @ Zb  # g_C(z_a, zbar_b)
    Ginv = np.linalg.inv(G)
    R_zzbz = Rc(Z, Z, Zb, Z)      # (mu, alpha, beta, lam)
    R_bzbz = Rc(Zb, Z, Zb, Z)
    R_bbzb = Rc(Zb, Zb, Z, Zb)    # (mu, beta, alpha, lam)
    X1 = np.einsum("ab,mabl->ml", Ginv, R_zzbz)
    X2 = np.einsum("ab,mabl->ml", Ginv, R_bzbz)
    X3 = np.einsum("ab,mbal->ml", Ginv, R_bbzb)
    zeta = _coframe(Z)           # rows z^lam as covectors
    zetab = zeta.conj()

    def wedge(u, v):
        return np.outer(u, v) - np.outer(v, u)

    n = Z.shape[1]
    m = J.shape[0]
    sig = np.zeros((m, m), dtype=complex)
    for mu in range(n):
        for lam in range(n):
            sig += 0.5j * X1[mu, lam] * wedge(zeta[lam], zeta[mu])
            sig += 1j * X2[mu, lam] * wedge(zeta[lam], zetab[mu])
            sig += -0.5j * X3[mu, lam] * wedge(zetab[lam], zetab[mu])
    return sig


def first_ricci_complex(R: np.ndarray, J: np.ndarray) -> np.ndarray:
    """rho from its complex components i/2 R_ab.g^g z^a^z^b + i R_a.bbar.g^g ... ."""
    Z = holomorphic_frame(J)
    Zb = Z.conj()
    zeta = _coframe(Z)
    # trace of R_XY on T^{1,0}: R_{XY g}^g = sum_g z^g(R_XY z_g)
    tr = np.einsum("gk,ijkl,lg->ij", zeta, R, Z)
    frames = {0: Z, 1: Zb}
    cof = {0: zeta, 1: zeta.conj()}
    m = J.shape[0]
    rho = np.zeros((m, m), dtype=complex)
    for ta, tb, w in ((0, 0, 0.5j), (0, 1, 1j), (1, 1, 0.5j)):
        comp = frames[ta].T @ tr @ frames[tb]
        for a in range(Z.shape[1]):
            for b in range(Z.shape[1]):
                u, v = cof[ta][a], cof[tb][b]
                rho += w * comp[a, b] * (np.outer(u, v) - np.outer(v, u))
    return rho


@dataclass
class ScalarReport:
    name: str
    dim: int
    sC: float
    sC_via_r: float
    sH: float
    s: float
    s_real: float
    sg: float
    norms: dict
    delta_theta: float
    residuals: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "dim": self.dim, "sC": self.sC, "sC_via_r": self.sC_via_r,
                "sH": self.sH, "s": self.s, "s_real": self.s_real, "sg": self.sg,
                "norms": dict(self.norms), "delta_theta": self.delta_theta,
                "residuals": dict(self.residuals), "flags": dict(self.flags)}


def scalar_curvature_riemannian(R_lc: np.ndarray) -> float:
    """s^g = sum_{ij} g(R_{e_i e_j} e_j, e_i)."""
    return float(np.einsum("ijij->", R_lc))


def scalars(model: LieAlgebraModel, R_chern: np.ndarray | None = None,
            R_lc: np.ndarray | None = None, tors: TorsionData | None = None) -> ScalarReport:
    model = orthonormal_model(model)
    J = model.J
    ch = chern_connection(model)
    lc = levi_civita(model)
    R_chern = curvature(ch, model) if R_chern is None else R_chern
    R_lc = curvature(lc, model) if R_lc is None else R_lc
    tors = tors or torsion_package(model, ch)
    rho, r, sigma = ricci_forms(R_chern, J)
    sC = lefschetz(rho, J)
    sC_r = lefschetz(r, J)
    s = lefschetz(np.real(sigma), J)
    s_real = -0.5 * float(np.einsum("ijji->", R_chern))
    sg = scalar_curvature_riemannian(R_lc)
    theta = tors.theta
    delta_theta = float(np.einsum("k,iik->", theta, lc.Gamma))
    J_ = J
    T20 = tors.type_components[(2, 0)]
    dcF20 = type_projections(form_to_vector_valued(tors.dcF), J_)[(2, 0)]
    norms = {
        "T": norm2_vv2(tors.T),
        "t": norm2_form(tors.t),
        "theta": float(theta @ theta),
        "N": norm2_vv2(tors.N),
        "dF": norm2_form(tors.dF),
        "dcF": norm2_form(tors.dcF),
        "dcF20": norm2_vv2(dcF20),
        "T20": norm2_vv2(T20),
    }
    rep = ScalarReport(name=model.name, dim=model.dim, sC=sC, sC_via_r=sC_r, sH=2 * sC,
                       s=s, s_real=s_real, sg=sg, norms=norms, delta_theta=delta_theta)
    rep.residuals = internal_residuals(model, tors, rho, r, sigma, R_chern)
    rep.residuals.update(verify_identities(rep, model.dim))
    # sigma itself need not be real off the Kaehler locus; only its trace is.
    rep.norms["sigma_imag_max"] = float(np.max(np.abs(np.imag(sigma))))
    rep.flags = inequality_flags(rep)
    return rep


def internal_residuals(model, tors: TorsionData, rho, r, sigma, R_chern) -> dict:
    J, c = model.J, model.structure_constants
    T = tors.T
    comps = tors.type_components
    Tl = T.transpose(2, 0, 1)
    out = {
        "sC_rho_vs_r": abs(lefschetz(rho, J) - lefschetz(r, J)),
        "s_sigma_vs_real": abs(lefschetz(np.real(sigma), J)
                               + 0.5 * float(np.einsum("ijji->", R_chern))),
        "s_imag": abs(lefschetz(np.imag(sigma), J)),
        "rho_complex": float(np.max(np.abs(first_ricci_complex(R_chern, J) - rho))),
        "rho_closed": float(np.max(np.abs(d_invariant_2form(rho, c)))),
        "T11": float(np.max(np.abs(comps[(1, 1)]))),
        "T02_minus_N": float(np.max(np.abs(comps[(0, 2)] - tors.N))),
        "T20_minus_dcF20": float(np.max(np.abs(
            comps[(2, 0)] - type_projections(form_to_vector_valued(tors.dcF), J)[(2, 0)]))),
        "t_minus_dcF_over_3": float(np.max(np.abs(tors.t - tors.dcF / 3))),
        "tTnorm": abs(9 * norm2_form(tors.t) - norm2_vv2(T)
                      - float(np.einsum("ijk,jki->", Tl, Tl))),
        "chern_minus_lc": chern_levi_civita_residual(model),
    }
    return out


def chern_levi_civita_residual(model: LieAlgebraModel) -> float:
    """max |g(nabla_X Y, Z) - g(D_X Y, Z) - 3/2 t(X,Y,Z) + g(X, T(Y,Z))| on frame triples."""
    model = orthonormal_model(model)
    ch = chern_connection(model)
    T = torsion(ch, model)
    Tl = T.transpose(2, 0, 1)
    t = antisymmetrize3(Tl)
    diff = ch.Gamma - levi_civita(model).Gamma - 1.5 * t + Tl
    return float(np.max(np.abs(diff)))


def verify_identities(report: ScalarReport, dim: int) -> dict:
    nm = report.norms
    sC, s, sg, sH = report.sC, report.s, report.sg, report.sH
    dth = report.delta_theta
    out = {
        "prop31": abs((sC - s) - (0.5 * nm["theta"] + 0.5 * dth - 4.5 * nm["t"] + 0.5 * nm["T"])),
        "prop32": abs((2 * s - sg) - (nm["T"] - 4.5 * nm["t"] - 2 * dth - nm["theta"])),
        "cor_sHsG": abs((sH - sg) - (-dth - 13.5 * nm["t"] + 2 * nm["T"])),
    }
    if dim == 4:
        out["better4"] = abs((nm["T"] - 4.5 * nm["t"]) - (nm["N"] + 0.5 * nm["dcF20"]))
    return out


def inequality_flags(rep: ScalarReport, tol: float = 1e-9) -> dict:
    return {
        "sg_le_2s_le_sH": rep.sg <= 2 * rep.s + tol and 2 * rep.s <= rep.sH + tol,
        "sH_le_2s_le_sg": rep.sH <= 2 * rep.s + tol and 2 * rep.s <= rep.sg + tol,
        "strict": abs(rep.sg - 2 * rep.s) > tol and abs(2 * rep.s - rep.sH) > tol,
    }


def integrability_residual(model: LieAlgebraModel) -> float:
    return float(np.max(np.abs(nijenhuis_raw(model))))


def nearly_kaehler_residual(model: LieAlgebraModel) -> float:
    """max |(D_X J)Y + (D_Y J)X| over frame pairs."""
    model = orthonormal_model(model)
    lc = levi_civita(model)
    J = model.J
    DJ = np.stack([lc.matrix(i) @ J - J @ lc.matrix(i) for i in range(model.dim)])
    # DJ[i][:, j] = (D_{e_i} J) e_j
    S = DJ.transpose(0, 2, 1)
    return float(np.max(np.abs(S + S.transpose(1, 0, 2))))


def conformal_scale_constant(model: LieAlgebraModel, kappa: float) -> ScalarReport:
    return scalars(model.scaled(kappa))


def comparison_norms_dim4(phi: np.ndarray, J: np.ndarray) -> tuple[float, float]:
    """(2|psi^{2,0}|^2, |psi^{1,1}|^2) for psi = i(phi), phi a 3-form."""
    proj = type_projections(form_to_vector_valued(phi), J)
    return 2 * norm2_vv2(proj[(2, 0)]), norm2_vv2(proj[(1, 1)])


def random_three_form(m: int, rng: np.random.Generator) -> np.ndarray:
    raw = rng.standard_normal((m, m, m))
    out = np.zeros_like(raw)
    for perm in permutations(range(3)):
        sign = np.linalg.det(np.eye(3)[list(perm)])
        out += sign * raw.transpose(perm)
    return out / 6.0
