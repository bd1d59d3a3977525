import math

import numpy as np
import pytest

from sowitness.angular import Convention, HalfInt, SpinOrbitSystem, ground_multiplet, multiplets
from sowitness.dense import build_hamiltonian, eigen_spectrum, thermal_mean_energy
from sowitness.ions import CATALOG, ion_record
from sowitness.thermal import (
    BRACKET_CAP_K,
    ThermalPoint,
    WitnessCurve,
    WitnessStatus,
    entanglement_temperature,
    mean_energy,
    mean_energy_at_zero,
    weight,
    witness,
    witness_curve,
)

LEVEL = Convention.LEVEL_UNIFORM
MULTIPLET = Convention.MULTIPLET_DEGENERATE

# Entanglement temperatures in kelvin, frozen from an independent dense-matrix
# solver (Brent root finding on the trace-formula witness, xtol = 1e-10).
TE_LEVEL = {
    "Ce": 1758.0484736364,
    "Pr": 1850.5726640819,
    "Nd": 1903.7245931154,
    "Pm": 2008.1731408087,
    "Sm": 1974.8609711047,
    "Eu": 3295.3248901796,
}
TE_MULTIPLET = {
    "Ce": 1514.8297929334,
    "Pr": 1665.0208543617,
    "Nd": 1711.2116743757,
    "Pm": 1753.4789112451,
    "Sm": 1564.2282381372,
    "Eu": 1588.9863011275,
}

# Shifted per-level weights for Eu at T = 3295 K under unit level weights,
# frozen from the same solver.
EU_LEVEL_WEIGHTS_3295 = [
    1.0,
    0.859207292012,
    0.634298760253,
    0.402334917259,
    0.219270164226,
    0.102676087833,
    0.041310175303,
]

LIGHT = [r for r in CATALOG if r.light]
COUPLED = [r for r in CATALOG if r.zeta is not None]


def sys_of(symbol, convention):
    return ion_record(symbol).system(convention)


class TestWeight:
    @pytest.mark.parametrize("bad", [0.0, -1.0, float("nan")])
    def test_non_positive_temperature_rejected(self, bad):
        ce = sys_of("Ce", MULTIPLET)
        with pytest.raises(ValueError):
            weight(ce, multiplets(ce)[0], bad)

    def test_ground_weight_is_effective_degeneracy(self):
        ce = sys_of("Ce", MULTIPLET)
        assert weight(ce, ground_multiplet(ce), 137.0) == 6.0
        ce_level = sys_of("Ce", LEVEL)
        assert weight(ce_level, ground_multiplet(ce_level), 137.0) == 1.0

    def test_cerium_ratio_at_gap_over_ln8(self):
        ce = sys_of("Ce", MULTIPLET)
        ground, excited = multiplets(ce)
        t = 3150.0 / math.log(8.0)
        ratio = weight(ce, ground, t) / weight(ce, excited, t)
        assert ratio == pytest.approx(6.0, rel=1e-12)

    def test_high_temperature_ratio_approaches_degeneracy_ratio(self):
        ce = sys_of("Ce", MULTIPLET)
        ground, excited = multiplets(ce)
        ratio = weight(ce, excited, 1e13) / weight(ce, ground, 1e13)
        assert ratio == pytest.approx(8.0 / 6.0, rel=1e-9)
        ce_level = sys_of("Ce", LEVEL)
        ratio = weight(ce_level, excited, 1e13) / weight(ce_level, ground, 1e13)
        assert ratio == pytest.approx(1.0, rel=1e-9)

    def test_europium_level_weights_at_3295(self):
        eu = sys_of("Eu", LEVEL)
        got = [weight(eu, level, 3295.0) for level in multiplets(eu)]
        assert got == pytest.approx(EU_LEVEL_WEIGHTS_3295, abs=1e-9)

    def test_europium_weights_match_dense_spectrum_ratios(self):
        eu = sys_of("Eu", LEVEL)
        values = eigen_spectrum(build_hamiltonian(eu))
        unique = sorted({round(v, 6) for v in values})
        dense_weights = [math.exp(-(v - unique[0]) / 3295.0) for v in unique]
        got = [weight(eu, level, 3295.0) for level in multiplets(eu)]
        assert sorted(got, reverse=True) == pytest.approx(dense_weights, rel=1e-9)


class TestMeanEnergy:
    def test_europium_level_at_table_temperature(self):
        # The tabulated crossing temperature is rounded to the kelvin, so the
        # mean energy reaches the product bound -4500 K only to ~0.2 K there.
        assert mean_energy(sys_of("Eu", LEVEL), 3295.0) == pytest.approx(-4500.0, abs=0.2)

    def test_europium_level_at_computed_root(self):
        assert mean_energy(sys_of("Eu", LEVEL), TE_LEVEL["Eu"]) == pytest.approx(
            -4500.0, abs=1e-6
        )

    def test_low_temperature_limit_is_ground_energy(self):
        for record in COUPLED:
            for convention in (LEVEL, MULTIPLET):
                sys_ = record.system(convention)
                cold = mean_energy(sys_, record.delta_e / 100.0)
                assert cold == pytest.approx(mean_energy_at_zero(sys_), abs=1e-6)

    def test_cerium_high_temperature_limits(self):
        assert mean_energy(sys_of("Ce", LEVEL), 1e8) == pytest.approx(-225.0, abs=0.1)
        assert mean_energy(sys_of("Ce", MULTIPLET), 1e8) == pytest.approx(0.0, abs=0.1)

    def test_high_temperature_equal_weight_average(self):
        # At 1e10 K every catalog ion sits within 0.1 K of the equal-weight
        # average; the residual at finite T is the 1/T correction tested below.
        for record in COUPLED:
            for convention in (LEVEL, MULTIPLET):
                sys_ = record.system(convention)
                levels = multiplets(sys_)
                if convention is MULTIPLET:
                    weights = [m.degeneracy for m in levels]
                else:
                    weights = [1] * len(levels)
                flat = math.fsum(w * m.energy for w, m in zip(weights, levels)) / sum(weights)
                assert mean_energy(sys_, 1e10) == pytest.approx(flat, abs=0.1)

    def test_high_temperature_convergence_law(self):
        # <H>_T - <H>_flat -> -Var(E)/T: check the leading coefficient at
        # 1e8 K, which pins the approach to the limit far more tightly than
        # any single absolute tolerance.
        for record in COUPLED:
            for convention in (LEVEL, MULTIPLET):
                sys_ = record.system(convention)
                levels = multiplets(sys_)
                if convention is MULTIPLET:
                    weights = [float(m.degeneracy) for m in levels]
                else:
                    weights = [1.0] * len(levels)
                total = math.fsum(weights)
                flat = math.fsum(w * m.energy for w, m in zip(weights, levels)) / total
                var = math.fsum(
                    w * (m.energy - flat) ** 2 for w, m in zip(weights, levels)
                ) / total
                deviation = mean_energy(sys_, 1e8) - flat
                assert deviation == pytest.approx(-var / 1e8, rel=2e-2), record.symbol

    def test_nondecreasing_in_temperature(self):
        grid = np.geomspace(1.0, 1e6, 200)
        for record in COUPLED:
            for convention in (LEVEL, MULTIPLET):
                sys_ = record.system(convention)
                values = [mean_energy(sys_, t) for t in grid]
                diffs = np.diff(values)
                assert diffs.min() >= -1e-9, record.symbol

    def test_matches_dense_trace_formula(self):
        for record in COUPLED:
            sys_ = record.system(MULTIPLET)
            for t in np.geomspace(1.0, 1e6, 50):
                lhs = mean_energy(sys_, t)
                rhs = thermal_mean_energy(sys_, t)
                assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs)), record.symbol

    def test_shift_invariance_at_moderate_temperatures(self):
        # Above ~300 K the unshifted Boltzmann factors are representable, so
        # an unshifted reference sum must agree to near machine precision.
        for record in COUPLED:
            for convention in (LEVEL, MULTIPLET):
                sys_ = record.system(convention)
                levels = multiplets(sys_)
                for t in (300.0, 1000.0, 5000.0):
                    if convention is MULTIPLET:
                        raw = [m.degeneracy * math.exp(-m.energy / t) for m in levels]
                    else:
                        raw = [math.exp(-m.energy / t) for m in levels]
                    reference = math.fsum(
                        w * m.energy for w, m in zip(raw, levels)
                    ) / math.fsum(raw)
                    value = mean_energy(sys_, t)
                    assert abs(value - reference) <= 1e-12 * max(1.0, abs(reference))


class TestMeanEnergyAtZero:
    def test_catalog_values(self):
        assert mean_energy_at_zero(sys_of("Ce", MULTIPLET)) == -1800.0
        assert mean_energy_at_zero(sys_of("Tb", MULTIPLET)) == -4347.0
        assert mean_energy_at_zero(sys_of("Gd", MULTIPLET)) == 0.0

    def test_convention_independent(self):
        for record in COUPLED:
            assert mean_energy_at_zero(record.system(LEVEL)) == mean_energy_at_zero(
                record.system(MULTIPLET)
            )


class TestWitness:
    def test_cerium_at_zero(self):
        assert witness(sys_of("Ce", MULTIPLET), 0.0) == -450.0

    def test_terbium_at_zero_is_exactly_zero(self):
        # Heavy ground energy is zeta*s*l, cancelling the bound identically.
        assert witness(sys_of("Tb", MULTIPLET), 0.0) == 0.0
        for record in CATALOG:
            if record.heavy:
                assert witness(record.system(MULTIPLET), 0.0) == 0.0

    def test_europium_level_near_zero_at_table_temperature(self):
        assert abs(witness(sys_of("Eu", LEVEL), 3295.0)) < 0.2

    def test_negative_temperature_rejected(self):
        with pytest.raises(ValueError):
            witness(sys_of("Ce", MULTIPLET), -1.0)

    def test_is_mean_energy_plus_bound(self):
        for record in COUPLED:
            sys_ = record.system(MULTIPLET)
            for t in (10.0, 450.0, 3000.0):
                assert witness(sys_, t) == mean_energy(sys_, t) + sys_.separable_bound

    def test_light_witness_at_zero_closed_form(self):
        # For zeta > 0: ground -zeta*s*(l+1) plus bound zeta*s*l gives -zeta*s.
        for record in LIGHT:
            sys_ = record.system(MULTIPLET)
            expected = -record.zeta * record.s.value
            assert witness(sys_, 0.0) == pytest.approx(expected, rel=1e-14)


class TestEntanglementTemperature:
    def test_light_ions_level_uniform(self):
        for symbol, expected in TE_LEVEL.items():
            result = entanglement_temperature(sys_of(symbol, LEVEL))
            assert result.status is WitnessStatus.CROSSED
            assert result.temperature == pytest.approx(expected, abs=1e-3)

    def test_light_ions_multiplet_degenerate(self):
        for symbol, expected in TE_MULTIPLET.items():
            result = entanglement_temperature(sys_of(symbol, MULTIPLET))
            assert result.status is WitnessStatus.CROSSED
            assert result.temperature == pytest.approx(expected, abs=1e-3)

    def test_cerium_closed_forms(self):
        assert entanglement_temperature(sys_of("Ce", LEVEL)).temperature == pytest.approx(
            3150.0 / math.log(6.0), abs=1e-3
        )
        assert entanglement_temperature(sys_of("Ce", MULTIPLET)).temperature == pytest.approx(
            3150.0 / math.log(8.0), abs=1e-3
        )

    def test_multiplet_weighting_lowers_the_crossing(self):
        for symbol in TE_LEVEL:
            low = entanglement_temperature(sys_of(symbol, MULTIPLET)).temperature
            high = entanglement_temperature(sys_of(symbol, LEVEL)).temperature
            assert low < high

    def test_heavy_ions_never_cross(self):
        for record in CATALOG:
            if not record.heavy:
                continue
            for convention in (LEVEL, MULTIPLET):
                result = entanglement_temperature(record.system(convention))
                assert result.status is WitnessStatus.NO_CROSSING
                assert result.temperature is None

    def test_half_filled_shell_is_degenerate(self):
        result = entanglement_temperature(sys_of("Gd", MULTIPLET))
        assert result.status is WitnessStatus.WITNESS_DEGENERATE
        assert result.temperature is None

    def test_singlet_triplet_closed_form(self):
        sys_ = SpinOrbitSystem(HalfInt(1), HalfInt(1), 1.0, MULTIPLET)
        result = entanglement_temperature(sys_, tolerance=1e-6)
        assert result.temperature == pytest.approx(1.0 / math.log(3.0), abs=1e-6)

    def test_singlet_triplet_level_uniform_never_crosses_below_cap(self):
        # With unit level weights the s = l = 1/2 witness tends to zero from
        # below without ever crossing, so bracketing must hit the cap.
        sys_ = SpinOrbitSystem(HalfInt(1), HalfInt(1), 1.0, LEVEL)
        with pytest.raises(RuntimeError, match="no zero below"):
            entanglement_temperature(sys_)
        assert BRACKET_CAP_K == 1e9

    def test_tolerance_validated(self):
        with pytest.raises(ValueError):
            entanglement_temperature(sys_of("Ce", LEVEL), tolerance=0.0)
        with pytest.raises(ValueError):
            entanglement_temperature(sys_of("Ce", LEVEL), tolerance=-1.0)

    def test_coarse_tolerance_still_brackets_root(self):
        result = entanglement_temperature(sys_of("Ce", LEVEL), tolerance=100.0)
        assert result.temperature == pytest.approx(TE_LEVEL["Ce"], abs=50.0)

    def test_root_certificate(self):
        tol = 1e-3
        for symbol in TE_LEVEL:
            for convention in (LEVEL, MULTIPLET):
                sys_ = sys_of(symbol, convention)
                t_star = entanglement_temperature(sys_, tolerance=tol).temperature
                assert abs(witness(sys_, t_star)) < abs(sys_.zeta) * 1e-6
                assert witness(sys_, t_star - 10 * tol) < 0.0
                assert witness(sys_, t_star + 10 * tol) > 0.0


def interpolated_crossings(curve):
    """Zero crossings of the sampled witness, by linear interpolation."""
    crossings = []
    for a, b in zip(curve.points, curve.points[1:]):
        if a.witness < 0.0 <= b.witness or b.witness < 0.0 <= a.witness:
            frac = a.witness / (a.witness - b.witness)
            crossings.append(a.temperature + frac * (b.temperature - a.temperature))
    return crossings


class TestWitnessCurve:
    def test_grid_is_uniform_and_inclusive(self):
        curve = witness_curve(sys_of("Ce", LEVEL), 1.0, 6000.0, 600)
        temps = [p.temperature for p in curve.points]
        assert len(temps) == 600
        assert temps[0] == 1.0
        assert temps[-1] == 6000.0
        steps = np.diff(temps)
        assert steps.max() - steps.min() < 1e-9 * steps.mean()

    def test_europium_crossing_location(self):
        curve = witness_curve(sys_of("Eu", LEVEL), 1.0, 6000.0, 600)
        crossings = interpolated_crossings(curve)
        assert len(crossings) == 1
        assert 3290.0 < crossings[0] < 3300.0

    def test_neodymium_crossing_location(self):
        curve = witness_curve(sys_of("Nd", LEVEL), 1.0, 4000.0, 400)
        crossings = interpolated_crossings(curve)
        assert len(crossings) == 1
        assert 1900.0 < crossings[0] < 1910.0

    def test_gadolinium_curve_is_identically_zero(self):
        curve = witness_curve(sys_of("Gd", MULTIPLET), 1.0, 5000.0, 50)
        assert all(p.witness == 0.0 for p in curve.points)
        assert all(p.mean_energy == 0.0 for p in curve.points)

    def test_point_invariants(self):
        sys_ = sys_of("Pr", MULTIPLET)
        curve = witness_curve(sys_, 1.0, 10000.0, 100)
        for point in curve.points:
            assert point.partition > 0.0
            assert point.witness == point.mean_energy + sys_.separable_bound

    @pytest.mark.parametrize("args", [
        (0.0, 100.0, 10),
        (-1.0, 100.0, 10),
        (100.0, 100.0, 10),
        (100.0, 50.0, 10),
        (1.0, 100.0, 1),
        (float("nan"), 100.0, 10),
        (1.0, float("inf"), 10),
    ])
    def test_invalid_ranges_rejected(self, args):
        with pytest.raises(ValueError):
            witness_curve(sys_of("Ce", LEVEL), *args)

    def test_curve_type_validates(self):
        with pytest.raises(ValueError):
            WitnessCurve(sys_of("Ce", LEVEL), ())
        point = ThermalPoint(10.0, 1.0, -1800.0, -450.0)
        earlier = ThermalPoint(5.0, 1.0, -1800.0, -450.0)
        with pytest.raises(ValueError):
            WitnessCurve(sys_of("Ce", LEVEL), (point, earlier))
