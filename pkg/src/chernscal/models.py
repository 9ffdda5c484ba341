"""Built-in invariant almost Hermitian structures on Lie algebras."""

from __future__ import annotations

import numpy as np

from .frame_calculus import LieAlgebraModel, change_basis


def _constants(m: int, brackets: dict[tuple[int, int], dict[int, float]]) -> np.ndarray:
    """Structure constants from 1-based ``{(i, j): {k: coef}}`` for i < j."""
    c = np.zeros((m, m, m))
    for (i, j), out in brackets.items():
        for k, v in out.items():
            c[i - 1, j - 1, k - 1] += v
            c[j - 1, i - 1, k - 1] -= v
    return c


def _complex_structure(m: int, pairs: list[tuple[int, int]]) -> np.ndarray:
    """J with J e_a = e_b for each 1-based pair (a, b)."""
    J = np.zeros((m, m))
    for a, b in pairs:
        J[b - 1, a - 1] = 1.0
        J[a - 1, b - 1] = -1.0
    return J


def torus4() -> LieAlgebraModel:
    return LieAlgebraModel(np.zeros((4, 4, 4)), _complex_structure(4, [(1, 2), (3, 4)]),
                           name="torus4")


def kodaira_thurston() -> LieAlgebraModel:
    """h3 + R with an almost Kaehler, non-integrable J; F = e13 + e24."""
    c = _constants(4, {(1, 2): {3: -1.0}})
    return LieAlgebraModel(c, _complex_structure(4, [(1, 3), (2, 4)]),
                           name="kodaira-thurston")


def kodaira_primary() -> LieAlgebraModel:
    """h3 + R with the integrable J e1 = e2, J e3 = e4 (Hermitian, not Kaehler)."""
    c = _constants(4, {(1, 2): {3: -1.0}})
    return LieAlgebraModel(c, _complex_structure(4, [(1, 2), (3, 4)]),
                           name="kodaira-primary")


def iwasawa() -> LieAlgebraModel:
    """Complex Heisenberg algebra with its bi-invariant complex structure."""
    c = _constants(6, {(1, 3): {5: 1.0}, (1, 4): {6: 1.0},
                       (2, 3): {6: 1.0}, (2, 4): {5: -1.0}})
    return LieAlgebraModel(c, _complex_structure(6, [(1, 2), (3, 4), (5, 6)]),
                           name="iwasawa")


def hyperbolic_plane() -> LieAlgebraModel:
    """aff(R) with [e1, e2] = e2: the Kaehler hyperbolic plane, s^g = -2."""
    c = _constants(2, {(1, 2): {2: 1.0}})
    return LieAlgebraModel(c, _complex_structure(2, [(1, 2)]), name="hyperbolic-plane")


def _su2(scale: float = 2.0) -> np.ndarray:
    return _constants(3, {(1, 2): {3: scale}, (2, 3): {1: scale}, (3, 1): {2: scale}})


def hopf_surface() -> LieAlgebraModel:
    """su(2) + R: round unit S^3 times a circle, s^g = 6."""
    c = np.zeros((4, 4, 4))
    c[:3, :3, :3] = _su2(2.0)
    return LieAlgebraModel(c, _complex_structure(4, [(1, 2), (3, 4)]), name="hopf-s3xs1")


def s3xs3_nearly_kaehler() -> LieAlgebraModel:
    """su(2) + su(2) with the structure pulled back from the 3-symmetric space G^3/G.

    The tangent space at the base point is m = {(a, b, c) : a + b + c = 0} in g^3
    with the product metric and J = (2/sqrt 3)(sigma + 1/2), sigma the cyclic shift.
    """
    s = _su2(1.0)
    c = np.zeros((6, 6, 6))
    c[:3, :3, :3] = s
    c[3:, 3:, 3:] = s
    I = np.eye(3)
    Z = np.zeros((3, 3))
    # (X, Y) -> ((2X - Y)/3, (2Y - X)/3, -(X + Y)/3), rows grouped per factor
    phi = np.block([[2 * I, -I], [-I, 2 * I], [-I, -I]]) / 3.0
    sigma = np.block([[Z, I, Z], [Z, Z, I], [I, Z, Z]])
    Jm = (2 / np.sqrt(3)) * (sigma + 0.5 * np.eye(9))
    # inverse of phi on m: (a, b, c) -> (a - c, b - c)
    psi = np.block([[I, Z, -I], [Z, I, -I]])
    g = phi.T @ phi
    J = psi @ Jm @ phi
    return LieAlgebraModel(c, J, g, name="s3s3-nk")


BUILTIN = {
    "torus4": torus4,
    "kodaira-thurston": kodaira_thurston,
    "kodaira-primary": kodaira_primary,
    "iwasawa": iwasawa,
    "s3s3-nk": s3xs3_nearly_kaehler,
    "hyperbolic-plane": hyperbolic_plane,
    "hopf-s3xs1": hopf_surface,
}


def builtin(name: str) -> LieAlgebraModel:
    try:
        return BUILTIN[name]()
    except KeyError:
        raise KeyError(f"unknown model {name!r}; choose from {sorted(BUILTIN)}") from None


def _four_dim_algebras(rng: np.random.Generator) -> list[np.ndarray]:
    a, b, cc = rng.uniform(-1.5, 1.5, size=3)
    return [
        np.zeros((4, 4, 4)),
        _constants(4, {(1, 2): {3: 1.0}}),
        _constants(4, {(1, 2): {2: 1.0}, (3, 4): {4: 1.0}}),
        _constants(4, {(4, 1): {1: a}, (4, 2): {2: b}, (4, 3): {3: cc}}),
        _constants(4, {(4, 1): {1: a, 2: -1.0}, (4, 2): {1: 1.0, 2: a}, (4, 3): {3: b}}),
        hopf_surface().structure_constants,
        _constants(4, {(1, 2): {2: 1.0}}),
    ]


def random_orthogonal_J(m: int, rng: np.random.Generator) -> np.ndarray:
    Q, R = np.linalg.qr(rng.standard_normal((m, m)))
    Q = Q * np.sign(np.diag(R))
    J0 = _complex_structure(m, [(2 * k + 1, 2 * k + 2) for k in range(m // 2)])
    return Q @ J0 @ Q.T


def random_model(rng: np.random.Generator, index: int | None = None,
                 conditioning: float = 3.0) -> LieAlgebraModel:
    """A 4-dimensional algebra in a random non-orthonormal basis with random J.

    The metric is orthonormal for the original basis, J is a random orthogonal
    complex structure there, and everything is transported to a random basis.
    """
    algs = _four_dim_algebras(rng)
    k = int(rng.integers(len(algs))) if index is None else index % len(algs)
    c0 = algs[k] * rng.uniform(0.3, 2.0)
    J0 = random_orthogonal_J(4, rng)
    while True:
        E = rng.standard_normal((4, 4))
        if np.linalg.cond(E) < conditioning * 10:
            break
    c = change_basis(c0, E)
    g = E.T @ E
    J = np.linalg.solve(E, J0 @ E)
    return LieAlgebraModel(c, J, g, name=f"random4-{k}")
