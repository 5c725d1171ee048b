import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from condorlab import condor
from condorlab.condor import CondorSpec
from condorlab.errors import NoBreakeven, NonpositiveCredit, StrikeOrderViolation
from condorlab.pricer import build_pricing_grid
from condorlab.roughheston import DEFAULT_PARAMS, SimGrid, simulate


@pytest.fixture(scope="module")
def priced():
    bundle = simulate(DEFAULT_PARAMS, SimGrid(n_paths=20, n_steps=8, master_seed=2))
    grid = build_pricing_grid(bundle, [0.92, 0.96, 1.04, 1.08], 300, seed=4)
    return bundle, grid


class TestSpec:
    def test_strike_order_enforced(self):
        with pytest.raises(StrikeOrderViolation):
            CondorSpec(1.0, 0.96, 1.04, 1.08, credit=0.01)
        with pytest.raises(StrikeOrderViolation):
            CondorSpec(0.92, 1.05, 1.04, 1.08, credit=0.01)

    def test_touching_body_allowed(self):
        CondorSpec(0.96, 1.0, 1.0, 1.04, credit=0.01)


class TestFromParams:
    def test_symmetric(self):
        k1, k2, k3, k4 = condor.from_params(0.04, 0.04, 0.0)
        assert (k1, k2, k3, k4) == pytest.approx((0.92, 0.96, 1.04, 1.08))

    def test_scales_with_spot(self):
        strikes = condor.from_params(0.04, 0.04, 0.0, s0=4000.0)
        assert strikes == pytest.approx((3680.0, 3840.0, 4160.0, 4320.0))

    def test_positive_asymmetry_shifts_put_pair_down(self):
        k1, k2, k3, k4 = condor.from_params(0.04, 0.04, 0.10)
        assert (k3, k4) == pytest.approx((1.04, 1.08))
        assert (k1, k2) == pytest.approx((0.82, 0.86))

    def test_negative_asymmetry_shifts_call_pair_up(self):
        k1, k2, k3, k4 = condor.from_params(0.04, 0.04, -0.10)
        assert (k1, k2) == pytest.approx((0.92, 0.96))
        assert (k3, k4) == pytest.approx((1.14, 1.18))

    @given(
        st.floats(0.0, 0.2),
        st.floats(0.02, 0.2),
        st.floats(-0.2, 0.2),
        st.floats(0.5, 5000.0),
    )
    def test_asymmetry_identity(self, x, xhat, xbar, s0):
        k1, k2, k3, k4 = condor.from_params(x, xhat, xbar, s0=s0)
        assert (s0 - k1) - (k4 - s0) == pytest.approx(xbar * s0, abs=1e-9 * s0)

    @given(st.floats(0.0, 0.2), st.floats(0.02, 0.2), st.floats(-0.2, 0.0))
    def test_round_trip_for_nonpositive_asymmetry(self, x, xhat, xbar):
        # With xbar <= 0 the put pair stays anchored, so k2 recovers x.
        strikes = condor.from_params(x, xhat, xbar)
        rx, rxhat, rxbar = condor.params_of(*strikes)
        assert rx == pytest.approx(x, abs=1e-9)
        assert rxhat == pytest.approx(xhat, abs=1e-9)
        assert rxbar == pytest.approx(xbar, abs=1e-9)

    def test_rejects_bad_controls(self):
        with pytest.raises(ValueError):
            condor.from_params(-0.01, 0.04, 0.0)
        with pytest.raises(ValueError):
            condor.from_params(0.04, 0.0, 0.0)


class TestValuation:
    def test_entry_credit_positive(self, priced):
        _, grid = priced
        spec = condor.from_strikes(0.92, 0.96, 1.04, 1.08, grid)
        assert spec.credit > 0

    def test_nonpositive_credit_rejected(self, priced):
        _, grid = priced

        class ZeroGrid:
            values = np.zeros_like(grid.values)
            strikes = grid.strikes
            strike_index = grid.strike_index

        with pytest.raises(NonpositiveCredit):
            condor.from_strikes(0.92, 0.96, 1.04, 1.08, ZeroGrid())

    def test_value_process_combines_legs(self, priced):
        _, grid = priced
        spec = condor.from_strikes(0.92, 0.96, 1.04, 1.08, grid)
        manual = (
            grid.leg_values("put", 0.96)
            - grid.leg_values("put", 0.92)
            + grid.leg_values("call", 1.04)
            - grid.leg_values("call", 1.08)
        )
        assert np.array_equal(condor.value_process(spec, grid), manual)

    def test_entry_value_equals_credit(self, priced):
        _, grid = priced
        spec = condor.from_strikes(0.92, 0.96, 1.04, 1.08, grid)
        assert np.allclose(condor.value_process(spec, grid)[:, 0], spec.credit)


class TestTerminalPayoff:
    SPEC = CondorSpec(0.92, 0.96, 1.04, 1.08, credit=0.015)

    def test_full_credit_inside_body(self):
        assert condor.terminal_payoff(self.SPEC, 1.0) == pytest.approx(0.015)
        assert condor.terminal_payoff(self.SPEC, 0.96) == pytest.approx(0.015)

    def test_max_loss_beyond_wings(self):
        loss = 0.015 - 0.04
        assert condor.terminal_payoff(self.SPEC, 0.5) == pytest.approx(loss)
        assert condor.terminal_payoff(self.SPEC, 2.0) == pytest.approx(loss)

    @given(st.floats(0.01, 3.0))
    def test_payoff_bounds(self, s_t):
        payoff = condor.terminal_payoff(self.SPEC, s_t)
        width = max(self.SPEC.k2 - self.SPEC.k1, self.SPEC.k4 - self.SPEC.k3)
        assert self.SPEC.credit - width - 1e-12 <= payoff <= self.SPEC.credit + 1e-12

    def test_zero_at_breakevens(self):
        lo, hi = condor.breakevens(self.SPEC)
        assert condor.terminal_payoff(self.SPEC, lo) == pytest.approx(0.0, abs=1e-12)
        assert condor.terminal_payoff(self.SPEC, hi) == pytest.approx(0.0, abs=1e-12)

    def test_breakeven_values(self):
        lo, hi = condor.breakevens(self.SPEC)
        assert lo == pytest.approx(0.96 - 0.015)
        assert hi == pytest.approx(1.04 + 0.015)

    def test_no_breakeven_when_credit_dominates(self):
        spec = CondorSpec(0.92, 0.96, 1.04, 1.08, credit=0.05)
        with pytest.raises(NoBreakeven):
            condor.breakevens(spec)

    def test_vectorized(self):
        out = condor.terminal_payoff(self.SPEC, np.array([0.5, 1.0, 2.0]))
        assert out.shape == (3,)


class TestValueTensor:
    def test_layout(self, priced):
        bundle, grid = priced
        specs = [condor.from_strikes(0.92, 0.96, 1.04, 1.08, grid)]
        tensor = condor.build_value_tensor(bundle, grid, specs)
        assert tensor.d.shape == (bundle.n_paths, bundle.n_steps + 1, 2)
        assert np.array_equal(tensor.d[:, :, 0], bundle.s)
        assert np.array_equal(tensor.d[:, :, 1], condor.value_process(specs[0], grid))

    def test_requires_specs(self, priced):
        bundle, grid = priced
        with pytest.raises(ValueError):
            condor.build_value_tensor(bundle, grid, [])
