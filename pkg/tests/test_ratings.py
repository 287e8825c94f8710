import math

import numpy as np
import pytest

from gridline.errors import GridlineError, RatingCollapseError
from gridline.ratings import (AAR, DLR, SLR, RatingParams, branch_multiplier,
                              build_rating_series, estimate_diameter,
                              eta_temperature, eta_wind, fold_attack_angle,
                              k_angle, sweep_parameters)
from gridline.weather import WeatherSample, load_weather

import oracles
from helpers import triangle_network, two_bus_network

PARAMS = RatingParams()


class TestKAngle:
    def test_worst_case_and_perpendicular(self):
        assert k_angle(0.0) == pytest.approx(0.388, abs=1e-12)
        assert k_angle(math.pi / 2) == pytest.approx(1.0, abs=1e-12)

    def test_half_turn_symmetry_after_fold(self):
        rng = np.random.RandomState(1)
        for phi in rng.uniform(-2 * math.pi, 2 * math.pi, 100):
            assert k_angle(fold_attack_angle(phi)) == pytest.approx(
                k_angle(fold_attack_angle(phi + math.pi)), abs=1e-12)

    def test_image_and_monotone_on_reduced_domain(self):
        grid = np.linspace(0.0, math.pi / 2, 1001)
        values = np.array([k_angle(p) for p in grid])
        assert values.min() > 0.0 and values.max() <= 1.3
        assert np.all(np.diff(values) > 0)

    def test_fold_range(self):
        rng = np.random.RandomState(2)
        for phi in rng.uniform(-10, 10, 200):
            folded = fold_attack_angle(phi)
            assert 0.0 <= folded <= math.pi / 2


class TestEtaTemperature:
    def test_identity_at_slr_assumption(self):
        assert eta_temperature(273.15 + 40.0, PARAMS) == pytest.approx(1.0, abs=1e-12)

    def test_frozen_values(self):
        # sqrt(80/60) and sqrt(50/60), from the independent scalar oracle
        assert eta_temperature(293.15, PARAMS) == pytest.approx(1.1547005383792515, abs=1e-12)
        assert eta_temperature(323.15, PARAMS) == pytest.approx(0.9128709291752769, abs=1e-12)

    def test_collapse_refused(self):
        with pytest.raises(RatingCollapseError):
            eta_temperature(273.15 + 100.0, PARAMS)
        with pytest.raises(RatingCollapseError):
            eta_temperature(273.15 + 130.0, PARAMS)

    def test_strictly_decreasing_in_ambient(self):
        rng = np.random.RandomState(3)
        for _ in range(100):
            t = rng.uniform(250.0, 360.0)
            step = 1e-4
            assert eta_temperature(t + step, PARAMS) < eta_temperature(t, PARAMS)

    def test_decreasing_in_conductor_temp_when_cooler_than_slr(self):
        rng = np.random.RandomState(4)
        for _ in range(100):
            ambient = rng.uniform(250.0, 313.0)  # below the 40 C SLR assumption
            t_c = rng.uniform(60.0, 150.0)
            low = RatingParams(t_conductor=t_c)
            high = RatingParams(t_conductor=t_c + 1.0)
            assert eta_temperature(ambient, high) < eta_temperature(ambient, low)

    def test_matches_independent_scalar(self):
        rng = np.random.RandomState(5)
        for _ in range(200):
            ambient = rng.uniform(250.0, 350.0)
            expected = oracles.eta_temperature_reference(ambient, 100.0, 40.0)
            assert eta_temperature(ambient, PARAMS) == pytest.approx(expected, abs=1e-12)


class TestEtaWind:
    def test_slr_conditions_reproduce_unity(self):
        # at v_slr the Reynolds factor is below 1, so the floor binds
        assert eta_wind(PARAMS.v_slr, PARAMS.phi_slr, 0.016, PARAMS) == pytest.approx(1.0, abs=1e-12)

    def test_perpendicular_angle_gain(self):
        # sqrt(1.0 / 0.388), frozen from the scalar oracle; Reynolds floor binds
        value = eta_wind(PARAMS.v_slr, math.pi / 2, 0.016, PARAMS)
        assert value == pytest.approx(1.6054032476698388, abs=1e-12)

    def test_reynolds_floor_binding_case(self):
        # v=5 m/s, D=0.03 m: 0.566 * (rho/mu * D * v)^0.04 ~= 0.809 -> floor at 1
        reynolds = 0.566 * ((PARAMS.air_density / PARAMS.air_viscosity) * 0.03 * 5.0) ** 0.04
        assert reynolds == pytest.approx(0.8089952317589282, abs=1e-12)
        value = eta_wind(5.0, 0.0, 0.03, PARAMS)
        assert value == pytest.approx((5.0 / PARAMS.v_slr) ** 0.26, abs=1e-12)

    def test_calm_and_errors(self):
        assert eta_wind(0.0, 0.0, 0.02, PARAMS) == 1.0
        assert eta_wind(0.009, 1.0, 0.02, PARAMS) == 1.0
        with pytest.raises(ValueError):
            eta_wind(-1.0, 0.0, 0.02, PARAMS)

    def test_nondecreasing_in_speed_perpendicular(self):
        speeds = np.linspace(0.05, 15.0, 300)
        values = [eta_wind(v, math.pi / 2, 0.02, PARAMS) for v in speeds]
        assert np.all(np.diff(values) >= 0)

    def test_matches_independent_scalar(self):
        rng = np.random.RandomState(6)
        for _ in range(200):
            speed = rng.uniform(0.02, 15.0)
            phi = rng.uniform(-7.0, 7.0)
            diameter = rng.uniform(0.005, 0.05)
            expected = oracles.eta_wind_reference(
                speed, phi, diameter, PARAMS.v_slr, PARAMS.phi_slr,
                PARAMS.air_density, PARAMS.air_viscosity)
            assert eta_wind(speed, phi, diameter, PARAMS) == pytest.approx(expected, abs=1e-12)


class TestDiameter:
    def test_fit_from_rating(self):
        net = two_bus_network(line_limit=100.0)
        # 100 MVA at 115 kV -> about 502 A; frozen from the three-phase identity
        assert estimate_diameter(net.branches[0], net, PARAMS) == pytest.approx(
            0.016040874246776103, abs=1e-12)

    def test_explicit_override(self, networks):
        net = networks["case5"]
        branch = net.branches[net.branch_index[3]]
        assert estimate_diameter(branch, net, PARAMS) == 0.0281


class TestBranchMultiplier:
    def sample(self, temp_k=293.15, u=3.0, v=0.0):
        return WeatherSample(temp_k, u, v, 0)

    def test_transformer_stays_static(self, networks):
        net = networks["case5"]
        transformer = net.branches[net.branch_index[5]]
        for regime in (SLR, AAR, DLR):
            assert branch_multiplier(self.sample(), transformer, regime, PARAMS,
                                     0.02, 0.0) == 1.0

    def test_long_line_stays_static(self, networks):
        net = networks["case30"]
        long_line = net.branches[net.branch_index[30]]
        assert long_line.kind == "line" and long_line.length_km > 100.0
        for regime in (SLR, AAR, DLR):
            assert branch_multiplier(self.sample(), long_line, regime, PARAMS,
                                     0.02, 0.0) == 1.0

    def test_absent_sample_is_slr_fallback(self):
        net = triangle_network()
        for regime in (SLR, AAR, DLR):
            assert branch_multiplier(None, net.branches[0], regime, PARAMS, 0.02, 0.0) == 1.0

    def test_wind_floor_keeps_dlr_at_aar(self):
        # eta_T = 0.9 (ambient 51.4 C), weak wind -> eta_v < 1 -> DLR == AAR
        net = triangle_network()
        branch = net.branches[0]
        hot = self.sample(temp_k=373.15 - 0.81 * 60.0, u=0.3)
        eta_t = eta_temperature(hot.ambient_temp, PARAMS)
        assert eta_t == pytest.approx(0.9, abs=1e-12)
        aar = branch_multiplier(hot, branch, AAR, PARAMS, 0.016, 0.0)
        dlr = branch_multiplier(hot, branch, DLR, PARAMS, 0.016, 0.0)
        assert aar == pytest.approx(0.9, abs=1e-12)
        assert dlr == pytest.approx(0.9, abs=1e-12)

    def test_exact_slr_weather_gives_unity_everywhere(self):
        net = triangle_network()
        branch = net.branches[0]
        slr_weather = self.sample(temp_k=273.15 + 40.0, u=PARAMS.v_slr, v=0.0)
        for regime in (SLR, AAR, DLR):
            assert branch_multiplier(slr_weather, branch, regime, PARAMS,
                                     0.016, 0.0) == pytest.approx(1.0, abs=1e-12)

    def test_dlr_at_least_aar_random_draws(self):
        net = triangle_network()
        branch = net.branches[0]
        rng = np.random.RandomState(7)
        for _ in range(1000):
            s = WeatherSample(rng.uniform(255.0, 325.0), rng.uniform(-12, 12),
                              rng.uniform(-12, 12), 0)
            axis = rng.uniform(-math.pi, math.pi)
            aar = branch_multiplier(s, branch, AAR, PARAMS, 0.02, axis)
            dlr = branch_multiplier(s, branch, DLR, PARAMS, 0.02, axis)
            assert dlr >= aar >= 0.0


class TestRatingSeries:
    def test_slr_series_is_static(self, networks, serieses):
        net = networks["case3"]
        hours = list(serieses["case3"].hours)
        series = build_rating_series(net, None, hours, SLR, PARAMS)
        assert np.all(series.multiplier == 1.0)
        assert np.allclose(series.normal_limit, np.tile(net.static_rating, (24, 1)))
        assert np.allclose(series.contingency_limit, 1.146 * series.normal_limit)

    def test_missing_hour_falls_back_to_slr(self, networks, serieses, cases_dir, tmp_path):
        net = networks["case3"]
        hours = list(serieses["case3"].hours)
        lines = (cases_dir / "weather_case3.csv").read_text().splitlines()
        (tmp_path / "w.csv").write_text(
            "\n".join(l for l in lines if "T07:" not in l) + "\n")
        gappy = load_weather(tmp_path / "w.csv")
        dlr = build_rating_series(net, gappy, hours, DLR, PARAMS)
        slr = build_rating_series(net, None, hours, SLR, PARAMS)
        assert np.array_equal(dlr.normal_limit[7], slr.normal_limit[7])
        assert np.array_equal(dlr.contingency_limit[7], slr.contingency_limit[7])
        assert np.all(dlr.multiplier[np.arange(24) != 7] > 1.0)  # cool, windy fixture

    def test_dlr_dominates_aar_elementwise(self, networks, weathers, serieses):
        for name in ("case3", "case5", "case30"):
            net = networks[name]
            hours = list(serieses[name].hours)
            aar = build_rating_series(net, weathers[name], hours, AAR, PARAMS)
            dlr = build_rating_series(net, weathers[name], hours, DLR, PARAMS)
            assert np.all(dlr.multiplier >= aar.multiplier)
            assert np.all(aar.multiplier >= 0.0)

    def test_ineligible_branches_always_unity(self, networks, weathers, serieses):
        net = networks["case30"]
        hours = list(serieses["case30"].hours)
        ineligible = [l for l, b in enumerate(net.branches)
                      if b.kind == "transformer" or b.length_km >= 100.0]
        assert ineligible
        for regime in (SLR, AAR, DLR):
            series = build_rating_series(net, weathers["case30"], hours, regime, PARAMS)
            assert np.all(series.multiplier[:, ineligible] == 1.0)

    def test_weather_required_for_rated_regimes(self, networks, serieses):
        with pytest.raises(GridlineError, match="requires weather"):
            build_rating_series(networks["case3"], None,
                                list(serieses["case3"].hours), DLR, PARAMS)


class TestSweep:
    def test_table_orderings(self, networks, weathers, serieses):
        net = networks["case30"]
        hours = list(serieses["case30"].hours)
        table = sweep_parameters(net, weathers["case30"], hours,
                                 [78.0, 100.0, 110.0],
                                 [0.0, math.radians(45), math.radians(90)])
        means = {(t, round(math.degrees(p))): m for t, p, m in table}
        for phi in (0, 45, 90):
            assert means[(78.0, phi)] > means[(100.0, phi)] > means[(110.0, phi)]
        for t_c in (78.0, 100.0, 110.0):
            assert means[(t_c, 0)] > means[(t_c, 45)] > means[(t_c, 90)]

    def test_constant_slr_weather_gives_unity_means(self, tmp_path):
        # one line along the zone-14 central meridian (axis exactly pi/2) and
        # wind due north at v_slr: attack angle is exactly phi_slr = 0, ambient
        # exactly the SLR assumption, so eta_T = 1 and eta_v <= 1 floors to 1
        from helpers import make_network
        net = make_network(
            buses=[(1, 31.0, -99.0, 115.0), (2, 31.5, -99.0, 115.0)],
            branches=[(1, 1, 2, 0.1, 100.0)],
            gens=[(1, 1, "natural_gas", 0.0, 10.0, [(10.0, 20.0)])])
        rows = ["time,lat,lon,temp_k,wind_u_ms,wind_v_ms"]
        for h in range(4):
            rows.append(f"2016-07-01T0{h}:00:00Z,31.2,-99.0,313.15,0.0,{PARAMS.v_slr}")
        (tmp_path / "w.csv").write_text("\n".join(rows) + "\n")
        flat = load_weather(tmp_path / "w.csv")
        table = sweep_parameters(net, flat, list(flat.hours), [78.0, 100.0, 110.0],
                                 [0.0, math.radians(45), math.radians(90)])
        for _, _, mean in table:
            assert mean == pytest.approx(1.0, abs=1e-12)


def test_params_validation():
    with pytest.raises(ValueError):
        RatingParams(t_conductor=30.0, t_ambient_slr=40.0)
    with pytest.raises(ValueError):
        RatingParams(v_slr=0.0)
    with pytest.raises(ValueError):
        RatingParams(contingency_ratio=0.9)
    params = RatingParams(phi_slr=math.pi / 4)
    assert params.k_angle_slr == k_angle(math.pi / 4)


def test_nonpositive_ampacity_rejected():
    from gridline.network import Branch
    net = two_bus_network()
    bogus = Branch(9, 1, 2, 0.1, -5.0, "line", 10.0, None)
    with pytest.raises(GridlineError, match="ampacity"):
        estimate_diameter(bogus, net, PARAMS)
