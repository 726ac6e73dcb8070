import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from oracles import gqw_recurrence, path_sum_distribution
from tdcoin.errors import ExtentError, ParameterError
from tdcoin.walk import (CONTROL, DECOUPLED, GQW, STANDARD, TIME_DEP_COIN, CoinParams, Engine,
                         EngineKind, Gauge, Lattice, Schedule, WalkState, apply_coin,
                         coin_matrix, decoupled_step, evolve, gauge_transform, phase_angles,
                         position_phase, rational_phase, run, shift, step, symmetric_initial,
                         time_coin)

H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)


def basis(lattice, site, component):
    u = np.zeros(lattice.size, complex)
    d = np.zeros(lattice.size, complex)
    (u if component == "u" else d)[lattice.index(site)] = 1
    return WalkState(0, lattice, u, d)


class TestCoins:
    def test_hadamard(self):
        np.testing.assert_allclose(coin_matrix(0.5), H, atol=1e-15)

    @pytest.mark.parametrize("rho, expected", [(1.0, [[1, 0], [0, -1]]), (0.0, [[0, 1], [1, 0]])])
    def test_extreme_rho(self, rho, expected):
        np.testing.assert_array_equal(coin_matrix(rho), expected)

    @pytest.mark.parametrize("rho", [-0.1, 1.5])
    def test_rho_out_of_range(self, rho):
        with pytest.raises(ParameterError):
            coin_matrix(rho)

    def test_zero_phase_is_static(self):
        np.testing.assert_allclose(time_coin(CoinParams(0.5, 0.0), 7), H, atol=1e-15)

    def test_pi_phase(self):
        # diag(e^{-i pi}, e^{i pi}) = -identity, so both rows flip sign
        expected = -H
        np.testing.assert_allclose(time_coin(CoinParams(0.5, math.pi), 1), expected, atol=1e-15)

    def test_linear_matches_matrix_product(self):
        phi = 2 * math.pi / 150
        c0 = np.diag([cmath.exp(-1j * phi), cmath.exp(1j * phi)])
        for t in (1, 2, 9):
            direct = np.linalg.matrix_power(c0, t) @ H
            np.testing.assert_allclose(time_coin(CoinParams(0.5, Fraction(1, 150)), t), direct,
                                       atol=1e-14)

    def test_inverse_linear_and_static(self):
        phi = 0.3
        inv = time_coin(CoinParams(0.5, phi, Schedule.INVERSE_LINEAR), 4)
        np.testing.assert_allclose(inv, np.diag([cmath.exp(4j * phi), cmath.exp(-4j * phi)]) @ H,
                                   atol=1e-15)
        np.testing.assert_allclose(time_coin(CoinParams(0.5, phi, Schedule.STATIC), 4), H,
                                   atol=1e-15)

    def test_time_must_be_positive(self):
        with pytest.raises(ParameterError):
            time_coin(CoinParams(0.5, 0.1), 0)


class TestLatticeAndShift:
    def test_shift_up(self):
        lat = Lattice.line(3)
        out = shift(basis(lat, 0, "u"))
        assert out.u[lat.index(1)] == 1 and np.count_nonzero(out.u) == 1
        assert not out.d.any()

    def test_shift_down(self):
        lat = Lattice.line(3)
        out = shift(basis(lat, 0, "d"))
        assert out.d[lat.index(-1)] == 1 and np.count_nonzero(out.d) == 1

    def test_circle_wraps(self):
        lat = Lattice.circle(1)
        out = shift(basis(lat, 1, "u"))
        assert out.u[lat.index(-1)] == 1

    def test_line_boundary_raises(self):
        lat = Lattice.line(2)
        with pytest.raises(ExtentError):
            shift(basis(lat, 2, "u"))

    def test_step_boundary_raises(self):
        lat = Lattice.line(1)
        state = step(STANDARD, CoinParams(0.5), symmetric_initial(lat))
        with pytest.raises(ExtentError):
            step(STANDARD, CoinParams(0.5), state)

    def test_bad_lattices(self):
        with pytest.raises(ParameterError):
            Lattice("torus", 3)
        with pytest.raises(ParameterError):
            Lattice.circle(0)

    def test_unnormalized_initial(self):
        with pytest.raises(ParameterError):
            WalkState.localized(Lattice.line(2), 1.0, 1.0)


class TestPositionPhase:
    def test_origin_only_is_unchanged(self):
        lat = Lattice.line(4)
        state = symmetric_initial(lat)
        out = position_phase(state, 1.234)
        np.testing.assert_array_equal(out.u, state.u)

    def test_pi_flips_odd_site(self):
        lat = Lattice.line(3)
        out = position_phase(basis(lat, 1, "u"), math.pi)
        assert out.u[lat.index(1)] == pytest.approx(-1, abs=1e-15)

    def test_square_exponent(self):
        lat = Lattice.line(3)
        out = position_phase(basis(lat, 2, "u"), Fraction(1, 4), s=2)
        assert out.u[lat.index(2)] == 1  # exact: 4 * 2pi/4 reduces to 0

    def test_rational_angles_reduce_exactly(self):
        k = np.array([0, 150, 10 ** 12 * 150, 75])
        np.testing.assert_array_equal(phase_angles(Fraction(1, 150), k),
                                      [0.0, 0.0, 0.0, math.pi])

    def test_rational_phase_validation(self):
        assert rational_phase(3, 110) == Fraction(3, 110)
        with pytest.raises(ParameterError):
            rational_phase(2, 110)
        with pytest.raises(ParameterError):
            rational_phase(1, 0)

    def test_bad_exponent(self):
        with pytest.raises(ParameterError):
            position_phase(symmetric_initial(Lattice.line(2)), 0.1, s=3)


class TestEngines:
    def test_parse(self):
        assert Engine.parse("GQW") == GQW
        assert Engine.parse("romanelli") == Engine(EngineKind.GQW, 2)
        assert Engine.parse("gqw2").name == "gqw2"
        with pytest.raises(ParameterError):
            Engine.parse("hadamard")

    def test_standard_first_step(self, symmetric_coin):
        lat = Lattice.line(2)
        out = step(STANDARD, CoinParams(0.5), WalkState.localized(lat, *symmetric_coin))
        assert out.u[lat.index(1)] == pytest.approx((1 + 1j) / 2, abs=1e-15)
        assert out.d[lat.index(-1)] == pytest.approx((1 - 1j) / 2, abs=1e-15)

    def test_time_dep_first_step(self, symmetric_coin, phase150):
        lat = Lattice.line(2)
        out = step(TIME_DEP_COIN, CoinParams(0.5, phase150), WalkState.localized(lat, *symmetric_coin))
        phi = 2 * math.pi / 150
        assert out.u[lat.index(1)] == pytest.approx(cmath.exp(-1j * phi) * (1 + 1j) / 2, abs=1e-15)
        assert abs(out.u[lat.index(1)]) ** 2 == pytest.approx(0.5, abs=1e-15)

    def test_gqw_matches_recurrence(self, symmetric_coin):
        steps = 10
        phi = 2 * math.pi / 150
        traj = run(GQW, CoinParams(0.5, Fraction(1, 150)),
                   WalkState.localized(Lattice.line(steps), *symmetric_coin), steps)
        u, d = gqw_recurrence(steps, phi, *symmetric_coin)
        final = traj.states[-1]
        for n in range(-steps, steps + 1):
            i = final.lattice.index(n)
            assert final.u[i] == pytest.approx(u.get(n, 0), abs=1e-13)
            assert final.d[i] == pytest.approx(d.get(n, 0), abs=1e-13)

    def test_square_phase_matches_recurrence(self, symmetric_coin):
        steps = 12
        traj = run(Engine(EngineKind.GQW, 2), CoinParams(0.4, 0.37),
                   WalkState.localized(Lattice.line(steps), *symmetric_coin), steps)
        u, d = gqw_recurrence(steps, 0.37, *symmetric_coin, rho=0.4, exponent=2)
        final = traj.states[-1]
        got = {n: final.u[final.lattice.index(n)] for n in range(-steps, steps + 1)}
        for n, value in u.items():
            assert got[n] == pytest.approx(value, abs=1e-13)

    def test_standard_matches_path_sum(self):
        lat = Lattice.line(10)
        probs = path_sum_distribution(10, 1.0, 0.0)
        final = run(STANDARD, CoinParams(0.5), WalkState.localized(lat, 1.0, 0.0), 10).states[-1]
        p = np.abs(final.u) ** 2 + np.abs(final.d) ** 2
        for n in range(-10, 11):
            assert p[lat.index(n)] == pytest.approx(probs.get(n, 0.0), abs=1e-14)

    def test_zero_phase_collapses_engines(self, symmetric_coin):
        lat = Lattice.line(50)
        params = CoinParams(0.5, 0.0)
        start = WalkState.localized(lat, *symmetric_coin)
        ref = run(STANDARD, params, start, 50).states[-1]
        for engine in (GQW, TIME_DEP_COIN, CONTROL):
            other = run(engine, params, start, 50).states[-1]
            np.testing.assert_allclose(other.u, ref.u, atol=1e-12)
            np.testing.assert_allclose(other.d, ref.d, atol=1e-12)

    def test_support_stays_in_light_cone_with_parity(self, symmetric_coin):
        lat = Lattice.line(40)
        for state in evolve(GQW, CoinParams(0.5, Fraction(1, 30)),
                            WalkState.localized(lat, *symmetric_coin), 40):
            p = np.abs(state.u) ** 2 + np.abs(state.d) ** 2
            n = lat.sites
            assert np.all(p[np.abs(n) > state.t] == 0)
            assert np.all(p[(n + state.t) % 2 == 1] == 0)

    def test_run_zero_steps(self):
        start = symmetric_initial(Lattice.line(3))
        traj = run(GQW, CoinParams(0.5, 0.1), start, 0)
        assert traj.times == [0]

    def test_run_checks_extent_and_stride(self):
        start = symmetric_initial(Lattice.line(3))
        with pytest.raises(ParameterError):
            run(STANDARD, CoinParams(), start, 4)
        with pytest.raises(ParameterError):
            run(STANDARD, CoinParams(), start, 2, stride=0)

    def test_stride(self):
        traj = run(STANDARD, CoinParams(), symmetric_initial(Lattice.line(12)), 12, stride=4)
        assert traj.times == [0, 4, 8, 12]
        assert traj.at(8).t == 8
        with pytest.raises(ParameterError):
            traj.at(6)
        with pytest.raises(ParameterError):
            traj.at(16)

    def test_gauge_tags(self):
        start = symmetric_initial(Lattice.line(3))
        states = list(evolve(GQW, CoinParams(0.5, 0.2), start, 2))
        assert all(s.gauge is Gauge.WOJCIK for s in states)
        assert step(TIME_DEP_COIN, CoinParams(0.5, 0.2), start).gauge is Gauge.PLAIN


class TestGauge:
    def test_identity_at_t0(self):
        state = symmetric_initial(Lattice.line(3))
        out = gauge_transform(state, Fraction(1, 110))
        np.testing.assert_array_equal(out.u, state.u)
        assert out.gauge is Gauge.WOJCIK

    def test_maps_time_dep_onto_gqw(self, symmetric_coin):
        phase = Fraction(1, 110)
        start = WalkState.localized(Lattice.line(500), *symmetric_coin)
        *_, plain = evolve(TIME_DEP_COIN, CoinParams(0.5, phase), start, 500)
        *_, wojcik = evolve(GQW, CoinParams(0.5, phase), start, 500)
        mapped = gauge_transform(plain, phase)
        assert mapped.gauge is Gauge.WOJCIK
        np.testing.assert_allclose(mapped.u, wojcik.u, atol=1e-10)
        np.testing.assert_allclose(mapped.d, wojcik.d, atol=1e-10)
        back = gauge_transform(mapped, phase)
        assert back.gauge is Gauge.PLAIN
        np.testing.assert_allclose(back.u, plain.u, atol=1e-13)


class TestDecoupled:
    def _coupled(self, rho, phase, steps):
        start = symmetric_initial(Lattice.line(steps + 1))
        return list(evolve(TIME_DEP_COIN, CoinParams(rho, phase), start, steps))

    def test_one_step_matches_coupled(self, phase150):
        states = self._coupled(0.5, phase150, 2)
        for comp in ("u", "d"):
            nxt = decoupled_step(getattr(states[0], comp), getattr(states[1], comp), 1,
                                 CoinParams(0.5, phase150), comp)
            np.testing.assert_allclose(nxt, getattr(states[2], comp), atol=1e-12)

    def test_zero_phase_form(self):
        rng = np.random.default_rng(3)
        prev, curr = rng.normal(size=(2, 9)) + 1j * rng.normal(size=(2, 9))
        nxt = decoupled_step(prev, curr, 5, CoinParams(0.5, 0.0), "u")
        expected = prev.copy()
        expected[1:-1] += math.sqrt(0.5) * (curr[:-2] - curr[2:])
        np.testing.assert_allclose(nxt[1:-1], expected[1:-1], atol=1e-14)

    @pytest.mark.parametrize("rho", [0.3, 0.5, 0.7])
    def test_engine_matches_coupled(self, rho, phase150):
        steps = 200
        start = symmetric_initial(Lattice.line(steps + 1))
        params = CoinParams(rho, phase150)
        for a, b in zip(evolve(DECOUPLED, params, start, steps),
                        evolve(TIME_DEP_COIN, params, start, steps)):
            pa = np.abs(a.u) ** 2 + np.abs(a.d) ** 2
            pb = np.abs(b.u) ** 2 + np.abs(b.d) ** 2
            assert np.max(np.abs(pa - pb)) < 1e-10

    def test_mismatched_slices(self):
        with pytest.raises(ParameterError):
            decoupled_step(np.zeros(5, complex), np.zeros(7, complex), 1, CoinParams(), "u")

    def test_bad_component(self):
        with pytest.raises(ParameterError):
            decoupled_step(np.zeros(5, complex), np.zeros(5, complex), 1, CoinParams(), "x")

    def test_decoupled_is_not_a_single_step_engine(self):
        with pytest.raises(ParameterError):
            step(DECOUPLED, CoinParams(), symmetric_initial(Lattice.line(2)))


def test_apply_coin_is_unitary_on_random_state():
    rng = np.random.default_rng(0)
    lat = Lattice.line(5)
    u = rng.normal(size=lat.size) + 1j * rng.normal(size=lat.size)
    d = rng.normal(size=lat.size) + 1j * rng.normal(size=lat.size)
    state = WalkState(0, lat, u, d)
    out = apply_coin(time_coin(CoinParams(0.3, 0.7), 3), state)
    assert out.norm() == pytest.approx(state.norm(), rel=1e-14)
