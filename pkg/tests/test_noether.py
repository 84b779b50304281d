import pytest
import sympy as sp

from edskit.forms import VectorField, d, homotopy, lie_derivative
from edskit.jets import JetChart
from edskit.noether import (
    PRESCRIPTION, NoetherError, catalog_conformal, catalog_euclidean, catalog_wave,
    classify_symmetry, conformal_pullback_check, contact_field_from_generating_function,
    euclidean_frame, generating_function, is_symmetry, noether, pohozaev_integrand,
)
from edskit.scalar import function_symbol
from edskit.variational import el_system, pc_form_classical

ORDER = ["g_Lambda", "g_[Lambda]", "g_Pi", "g_E"]


def energy(n=2, F=None):
    ch = JetChart(n, 1, 1)
    z = ch.z[0]
    F = F if F is not None else z ** 3
    L = sum(ch.pi(i) ** 2 for i in range(n)) / 2 + F
    return ch, pc_form_classical(L, ch)


@pytest.mark.parametrize("kind,mode", [
    ("minimal", "translation"), ("minimal", "rotation"), ("minimal", "dilation"),
    ("cmc", "translation"), ("cmc", "rotation"),
])
def test_euclidean_catalog_laws_verify(kind, mode):
    law = catalog_euclidean(kind, mode)
    assert law.verified
    assert law.transcript.transcript.get("path") in ("exact", None) or law.transcript.is_zero


def test_minimal_dilation_is_almost_conserved():
    law = catalog_euclidean("minimal", "dilation")
    assert law.almost is not None
    assert law.extra["L_x Lambda - n Lambda"] == "Zero"
    # without the n·Λ correction dφ is not in the ideal
    assert law.ideal.contains(d(law.phi)).is_nonzero


def test_euclidean_frame_in_three_dimensions():
    F = euclidean_frame(3)
    assert catalog_euclidean("minimal", "translation", frame=F).verified


@pytest.mark.parametrize("mode", ["translation", "rotation", "dilation", "inversion"])
def test_conformal_catalog_laws_verify(mode):
    law = catalog_conformal(3, mode=mode)
    assert law.verified
    tr = law.transcript.transcript
    assert tr["path"] == "numeric-membership"
    assert tr["config"]["samples"] == 32 and tr["config"]["dps"] == 50
    assert tr["max_relative"] < 1e-30
    assert law.extra["exact"] == "Zero"


def test_conformal_sampled_membership_detects_perturbation():
    law = catalog_conformal(3, mode="dilation")
    u = law.phi.space.atoms[3]
    assert law.ideal.contains_sampled(d(law.phi + u * law.phi)).is_nonzero


def test_conformal_pullback():
    restricted, expected, st, _ = conformal_pullback_check(3)
    assert st.is_zero


def test_pohozaev_integrand_shape():
    e = pohozaev_integrand(3)
    assert {s.name for s in e.free_symbols} >= {"r", "u", "du_dnu", "gradu2", "C"}


@pytest.mark.parametrize("mode", ["time-translation", "dilation", "inversion"])
def test_wave_catalog_laws_verify(mode):
    law = catalog_wave(2, mode=mode)
    assert law.verified
    if mode != "time-translation":
        assert law.extra["Pi-symmetry"] == "Zero"


def test_wave_conformal_guard():
    with pytest.raises(NoetherError):
        catalog_wave(2, mode="dilation", F=sp.Symbol("z") ** 2)


def test_noether_energy_density():
    ch, pc = energy(2, function_symbol("Fe")(JetChart(2, 1, 1).z[0]))
    v = VectorField.from_coordinates(pc.space, {ch.x[0]: 1})
    law = noether(v, pc)
    assert law.verified
    assert law.extra["prescription"] == PRESCRIPTION


def test_noether_requires_pi_symmetry():
    ch, pc = energy(2)
    v = VectorField.from_coordinates(pc.space, {ch.z[0]: 1})
    with pytest.raises(NoetherError):
        noether(v, pc)


def test_noether_general_path_differs_by_exact_plus_ideal():
    ch, pc = energy(2)
    el = el_system(pc, check=False)
    for comps in ({ch.x[0]: 1}, {ch.x[0]: -ch.x[1], ch.x[1]: ch.x[0],
                                  ch.pi(0): -ch.pi(1), ch.pi(1): ch.pi(0)}):
        v = VectorField.from_coordinates(pc.space, comps)
        fast = noether(v, pc, el)
        gamma = homotopy(lie_derivative(v, pc.Lambda).canonical())
        general = fast.phi + gamma if gamma is not None else fast.phi
        assert el.ideal.contains(d(general - fast.phi)).is_zero


def test_generating_function_round_trip():
    ch = JetChart(2, 1, 1)
    x1, x2 = ch.x
    p1, p2 = ch.pi(0), ch.pi(1)
    for g in (p1, x1 * p2 - x2 * p1, 2 * ch.z[0] + x1 * p1 + x2 * p2, x1 ** 2 * p2 + ch.z[0] ** 2):
        v = contact_field_from_generating_function(g, ch)
        assert sp.expand(generating_function(v, ch) - g) == 0
        assert is_symmetry(v, "contact", chart=ch).is_zero


@pytest.mark.parametrize("g_kind", ["translation", "rotation", "dilation", "z-shift", "random"])
def test_flag_monotonicity(g_kind):
    ch, pc = energy(2, 0)
    x1, x2 = ch.x
    z = ch.z[0]
    p1, p2 = ch.pi(0), ch.pi(1)
    g = {"translation": p1, "rotation": x1 * p2 - x2 * p1, "dilation": z + x1 * p1 + x2 * p2,
         "z-shift": sp.Integer(1), "random": x1 * z + p1 ** 2}[g_kind]
    flags = classify_symmetry(contact_field_from_generating_function(g, ch), pc).flags
    seen_zero = False
    for key in ORDER:
        if seen_zero:
            assert flags[key] == "Zero", (key, flags)
        seen_zero = seen_zero or flags[key] == "Zero"
