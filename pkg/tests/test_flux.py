import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from claw_control import Flux, FluxComponent, audit_nondegeneracy, engquist_osher_flux, godunov_flux
from claw_control.exceptions import EvaluationError, InvalidInterval
from claw_control.flux import TabulatedComponent

values = st.floats(-3, 3, allow_nan=False)


def brute_godunov(comp, a, b, n=20001):
    s = np.linspace(min(a, b), max(a, b), n)
    fs = comp.f(s)
    return fs.min() if a <= b else fs.max()


def oracle_eo(comp, a, b):
    kinks = [p for p in comp.critical_points(min(a, b), max(a, b))]
    integral, _ = quad(lambda s: abs(float(comp.df(s))), a, b, limit=200, points=kinks or None)
    return 0.5 * (comp.f(a) + comp.f(b)) - 0.5 * integral


def test_godunov_shock_takes_right_state(burgers):
    assert godunov_flux(burgers.components[0], -0.5, -1.0) == pytest.approx(0.5, abs=1e-15)


def test_godunov_sonic_rarefaction(burgers):
    assert godunov_flux(burgers.components[0], -1.0, 1.0) == 0.0


def test_engquist_osher_examples(burgers):
    comp = burgers.components[0]
    assert engquist_osher_flux(comp, -0.5, -1.0) == pytest.approx(0.5, abs=1e-15)
    # transonic shock: EO gives 1.0 where Godunov gives 0.5
    assert engquist_osher_flux(comp, 1.0, -1.0) == pytest.approx(1.0, abs=1e-14)
    assert oracle_eo(comp, 1.0, -1.0) == pytest.approx(1.0, abs=1e-10)
    assert godunov_flux(comp, 1.0, -1.0) == pytest.approx(0.5)


@pytest.mark.parametrize("flux", [Flux.burgers(), Flux.cubic(), Flux.skew(2)])
@given(a=values)
@settings(max_examples=40, deadline=None)
def test_consistency(flux, a):
    for comp in flux.components:
        assert godunov_flux(comp, a, a) == pytest.approx(float(comp.f(a)), abs=1e-13)
        assert engquist_osher_flux(comp, a, a) == pytest.approx(float(comp.f(a)), abs=1e-13)


@pytest.mark.parametrize("flux", [Flux.burgers(), Flux.cubic()])
@given(a=values, b=values)
@settings(max_examples=60, deadline=None)
def test_godunov_matches_brute_force(flux, a, b):
    comp = flux.components[0]
    assert godunov_flux(comp, a, b) == pytest.approx(brute_godunov(comp, a, b), abs=1e-6)


@pytest.mark.parametrize("flux", [Flux.burgers(), Flux.cubic()])
@given(a=values, b=values)
@settings(max_examples=60, deadline=None)
def test_engquist_osher_matches_quadrature(flux, a, b):
    comp = flux.components[0]
    assert engquist_osher_flux(comp, a, b) == pytest.approx(oracle_eo(comp, a, b), abs=1e-9)


@given(a=values, b=values, da=st.floats(0, 0.5), db=st.floats(0, 0.5))
@settings(max_examples=60, deadline=None)
def test_numerical_fluxes_monotone(a, b, da, db):
    # nondecreasing in the left state, nonincreasing in the right state
    comp = Flux.cubic().components[0]
    for F in (godunov_flux, engquist_osher_flux):
        assert F(comp, a + da, b) >= F(comp, a, b) - 1e-12
        assert F(comp, a, b + db) <= F(comp, a, b) + 1e-12


def test_callable_component_uses_generic_paths():
    comp = FluxComponent.from_callable(lambda u: np.sin(u), np.cos, name="sin")
    for a, b in [(0.0, 3.0), (3.0, 0.0), (-1.0, 2.5)]:
        assert godunov_flux(comp, a, b) == pytest.approx(brute_godunov(comp, a, b), abs=1e-7)
        assert engquist_osher_flux(comp, a, b) == pytest.approx(oracle_eo(comp, a, b), abs=1e-8)


def test_vectorized_matches_scalar(burgers, rng):
    comp = burgers.components[0]
    a, b = rng.uniform(-2, 2, 50), rng.uniform(-2, 2, 50)
    vec = comp.godunov(a, b)
    assert np.array_equal(vec, [godunov_flux(comp, x, y) for x, y in zip(a, b)])


def test_tabulated_flux(tmp_path):
    u = np.linspace(0, 3, 61)
    path = tmp_path / "f.csv"
    path.write_text("u,f1\n" + "".join(f"{float(x)!r},{float(x * x / 2)!r}\n" for x in u))
    flux = Flux.from_table(path)
    assert flux.kind == "tabulated"
    assert flux.default_numerical_flux == "engquist-osher"
    comp = flux.components[0]
    assert float(comp.f(1.3)) == pytest.approx(0.845, abs=1e-4)
    with pytest.raises(EvaluationError):
        comp.f(3.5)
    assert isinstance(comp, TabulatedComponent)


def test_builtin_catalogue():
    assert Flux.builtin("burgers").dimension == 1
    assert Flux.builtin("diagonal-burgers", (3,)).dimension == 3
    f = Flux.skew(3)
    assert np.allclose(f.eval(2.0), [2.0, 8 / 3, 4.0])
    assert np.allclose(f.derivative(2.0), [2.0, 4.0, 8.0])
    with pytest.raises(KeyError):
        Flux.builtin("nope")


def test_audit_affine_is_degenerate():
    rep = audit_nondegeneracy(Flux.affine(1.0, 2.0), (0.0, 1.0))
    assert rep.worst_fraction == 1.0 and rep.degenerate


def test_audit_burgers_worst_fraction_is_tiny():
    rep = audit_nondegeneracy(Flux.burgers(), (-1.0, 1.0), n_samples=1000)
    assert rep.worst_fraction <= 2 / 1000
    assert rep.verdict == "nondegenerate"


def test_audit_skew_2d_nondegenerate():
    assert not audit_nondegeneracy(Flux.skew(2), (0.0, 1.0)).degenerate


def test_audit_rejects_point_interval():
    with pytest.raises(InvalidInterval):
        audit_nondegeneracy(Flux.burgers(), (1.0, 1.0))


def test_audit_brute_force_count_burgers():
    # sign changes of tau + zeta*z on a sample grid: at most one point for zeta != 0
    z = np.linspace(-1, 1, 1000)
    worst = 0
    for tau in np.linspace(-1, 1, 201):
        worst = max(worst, int(np.sum(np.abs(tau + z) <= 1e-9 + (z[1] - z[0]))))
    assert worst <= 2
