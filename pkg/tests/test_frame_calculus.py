import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chernscal import frame_calculus as fc
from chernscal.models import BUILTIN, builtin, random_model

MODELS = {name: builtin(name) for name in BUILTIN}
seeds = st.integers(0, 2 ** 32 - 1)


@pytest.fixture(scope="module")
def reports():
    return {name: fc.scalars(m) for name, m in MODELS.items()}


# -- models ----------------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_builtin_models_validate(name):
    MODELS[name].validate()


def test_jacobi_violation_is_named():
    rng = np.random.default_rng(3)
    c = rng.standard_normal((4, 4, 4))
    c = c - c.transpose(1, 0, 2)
    with pytest.raises(fc.ModelError, match="jacobi"):
        fc.LieAlgebraModel(c, MODELS["torus4"].J).validate()


def test_non_orthogonal_J_is_named():
    J = np.array([[0.0, -2.0], [0.5, 0.0]])
    with pytest.raises(fc.ModelError, match="J_orthogonal"):
        fc.LieAlgebraModel(np.zeros((2, 2, 2)), J).validate()


def test_odd_dimension_rejected():
    with pytest.raises(fc.ModelError):
        fc.LieAlgebraModel(np.zeros((3, 3, 3)), np.eye(3)).validate()


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_json_round_trip(name, tmp_path):
    m = MODELS[name]
    path = tmp_path / "m.json"
    path.write_text(json.dumps(m.to_json()))
    back = fc.LieAlgebraModel.load(path)
    assert np.array_equal(back.structure_constants, m.structure_constants)
    assert np.array_equal(back.J, m.J) and np.array_equal(back.metric, m.metric)


@given(seeds)
def test_orthonormalisation_preserves_scalars(seed):
    """The same structure written in a skewed basis gives the same scalars."""
    rng = np.random.default_rng(seed)
    m = random_model(rng)
    onb = fc.orthonormal_model(m)
    assert np.allclose(onb.metric, np.eye(4))
    r1, r2 = fc.scalars(m), fc.scalars(onb)
    for key in ("sC", "s", "sg"):
        assert getattr(r1, key) == pytest.approx(getattr(r2, key), abs=1e-9)


# -- connections -------------------------------------------------------------------

def test_abelian_levi_civita_vanishes():
    assert not np.any(fc.levi_civita(MODELS["torus4"]).Gamma)


def test_heisenberg_koszul_value():
    c = np.zeros((4, 4, 4))
    c[0, 1, 2], c[1, 0, 2] = 1.0, -1.0
    m = fc.LieAlgebraModel(c, MODELS["torus4"].J)
    assert fc.levi_civita(m).Gamma[0, 1, 2] == pytest.approx(0.5)


def test_bi_invariant_metric_half_bracket():
    m = MODELS["s3s3-nk"]
    flat = fc.LieAlgebraModel(m.structure_constants, MODELS["iwasawa"].J)
    G = fc.levi_civita(flat).Gamma
    assert np.allclose(G, 0.5 * flat.structure_constants, atol=1e-14)


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_chern_connection_properties(name):
    m = MODELS[name]
    res = fc.connection_residuals(fc.chern_connection(m), m)
    assert res["metric"] <= 1e-10 and res["nabla_J"] <= 1e-10 and res["torsion_11"] <= 1e-10
    lc = fc.connection_residuals(fc.levi_civita(m), m)
    assert lc["torsion_free"] <= 1e-12 and lc["metric"] <= 1e-12


@given(seeds)
def test_chern_agrees_with_constraint_solve(seed):
    m = random_model(np.random.default_rng(seed))
    a = fc.chern_connection(m).Gamma
    b = fc.chern_by_constraints(m).Gamma
    assert np.max(np.abs(a - b)) <= 1e-9 * max(1.0, np.max(np.abs(a)))


def test_kaehler_chern_equals_levi_civita():
    for name in ("torus4", "hyperbolic-plane"):
        m = MODELS[name]
        assert np.allclose(fc.chern_connection(m).Gamma, fc.levi_civita(m).Gamma, atol=1e-14)


@given(seeds)
def test_chern_levi_civita_difference(seed):
    assert fc.chern_levi_civita_residual(random_model(np.random.default_rng(seed))) <= 1e-10


# -- torsion --------------------------------------------------------------------------

def test_flat_torus_torsion_vanishes():
    t = fc.torsion_package(MODELS["torus4"])
    for arr in (t.T, t.N, t.theta, t.t):
        assert not np.any(arr)


def test_kodaira_thurston_torsion_is_nijenhuis():
    t = fc.torsion_package(MODELS["kodaira-thurston"])
    assert np.allclose(t.T, t.N, atol=1e-14)
    assert np.max(np.abs(t.N)) > 0
    assert np.allclose(t.theta, 0) and np.allclose(t.t, 0) and np.allclose(t.dF, 0)


def test_nijenhuis_calibration_constant():
    assert fc.calibrate_nijenhuis(MODELS["kodaira-thurston"]) == pytest.approx(fc.NIJENHUIS_SCALE)
    assert fc.calibrate_nijenhuis(MODELS["s3s3-nk"]) == pytest.approx(fc.NIJENHUIS_SCALE)
    with pytest.raises(ValueError):
        fc.calibrate_nijenhuis(MODELS["iwasawa"])


def test_primary_kodaira_structure_is_integrable_not_kaehler():
    """J e1 = e2, J e3 = e4 on h3 + R is integrable with dF != 0."""
    m = MODELS["kodaira-primary"]
    assert fc.integrability_residual(m) == 0
    assert np.max(np.abs(fc.torsion_package(m).dF)) > 0


@given(seeds)
def test_type_projections_orthogonal_and_complete(seed):
    rng = np.random.default_rng(seed)
    J = fc.orthonormal_model(random_model(rng)).J
    psi = rng.standard_normal((4, 4, 4))
    psi = psi - psi.transpose(1, 0, 2)
    parts = fc.type_projections(psi, J)
    assert np.allclose(sum(parts.values()), psi, atol=1e-12)
    keys = list(parts)
    for i, a in enumerate(keys):
        assert np.allclose(fc.type_projections(parts[a], J)[a], parts[a], atol=1e-12)
        for b in keys[i + 1:]:
            assert abs(np.sum(parts[a] * parts[b])) <= 1e-10 * np.sum(psi ** 2)


@given(seeds, st.sampled_from([4, 6]))
def test_norm_convention_ratio(seed, dim):
    phi = fc.random_three_form(dim, np.random.default_rng(seed))
    psi = fc.form_to_vector_valued(phi)
    assert fc.norm2_form(phi) == pytest.approx(fc.norm2_vv2(psi) / 3, rel=1e-12)


@given(seeds)
def test_comparison_norms_dim4(seed):
    """2|psi^{2,0}|^2 = |psi^{1,1}|^2 for psi = i(phi), phi a 3-form in dimension 4."""
    rng = np.random.default_rng(seed)
    J = fc.orthonormal_model(random_model(rng)).J
    lhs, rhs = fc.comparison_norms_dim4(fc.random_three_form(4, rng), J)
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)


# -- curvature and scalars ---------------------------------------------------------------

def test_flat_torus_scalars(reports):
    r = reports["torus4"]
    assert r.sC == r.sH == r.s == r.sg == 0


def test_sign_calibration_models(reports):
    assert reports["hyperbolic-plane"].sg == pytest.approx(-2)
    assert reports["hyperbolic-plane"].sH == pytest.approx(-2)
    assert reports["hopf-s3xs1"].sg == pytest.approx(6)


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_identities_on_builtins(name, reports):
    r = reports[name]
    assert r.sH == 2 * r.sC
    for key in ("prop31", "prop32", "cor_sHsG", "tTnorm", "chern_minus_lc", "sC_rho_vs_r",
                "s_sigma_vs_real", "s_imag", "rho_closed", "T11", "T02_minus_N",
                "T20_minus_dcF20", "t_minus_dcF_over_3", "rho_complex"):
        assert r.residuals[key] <= 1e-9, key
    if MODELS[name].dim == 4:
        assert r.residuals["better4"] <= 1e-10


@given(seeds)
def test_identities_on_random_models(seed):
    r = fc.scalars(random_model(np.random.default_rng(seed)))
    scale = max(1.0, abs(r.sg), r.norms["T"])
    for key, val in r.residuals.items():
        assert val <= 1e-9 * scale, key


def test_integrable_models_t_versus_T(reports):
    for name in ("iwasawa", "kodaira-primary", "hopf-s3xs1"):
        n = reports[name].norms
        assert 9 * n["t"] == pytest.approx(n["T"], abs=1e-10)


def test_kodaira_thurston_gaps(reports):
    r = reports["kodaira-thurston"]
    N2 = r.norms["N"]
    assert N2 > 0
    assert 2 * r.s - r.sg == pytest.approx(N2, abs=1e-10)
    assert r.sH - 2 * r.s == pytest.approx(N2, abs=1e-10)
    assert r.sg < 2 * r.s < r.sH
    assert r.flags["sg_le_2s_le_sH"] and r.flags["strict"]


def test_nearly_kaehler_gaps(reports):
    m = MODELS["s3s3-nk"]
    assert fc.nearly_kaehler_residual(m) <= 1e-12
    r = reports["s3s3-nk"]
    dc = r.norms["dcF"]
    assert 2 * r.s - r.sg == pytest.approx(-dc / 6, abs=1e-9)
    assert r.sH - 2 * r.s == pytest.approx(-2 * dc / 3, abs=1e-9)
    assert r.sH < 2 * r.s < r.sg


@pytest.mark.parametrize("name", ["kodaira-thurston", "s3s3-nk", "hopf-s3xs1"])
def test_conformal_scaling(name, reports):
    base = reports[name]
    scaled = fc.conformal_scale_constant(MODELS[name], math.log(2))
    for key in ("sC", "sH", "s", "sg"):
        assert getattr(scaled, key) == pytest.approx(getattr(base, key) / 4, abs=1e-12)
    assert scaled.norms["N"] == pytest.approx(base.norms["N"] / 4, abs=1e-12)
    same = fc.conformal_scale_constant(MODELS[name], 0.0)
    assert same.sC == base.sC and same.sg == base.sg


def test_report_dict_is_json_ready(reports):
    d = reports["iwasawa"].to_dict()
    assert json.loads(json.dumps(d))["sg"] == reports["iwasawa"].sg
