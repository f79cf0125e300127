import numpy as np
import pytest
from hypothesis import given, strategies as st

from infocapture.errors import DomainError
from infocapture.graph import generate_scale_free
from infocapture.learning import LearningParams
from infocapture.optimizer import default_grid, find_optima, sweep_rho


def kinds(opts):
    return [(o.index, o.kind) for o in opts]


class TestFindOptima:
    def test_single_peak(self):
        assert kinds(find_optima([1, 3, 2], [0.1, 0.2, 0.3])) == [(1, "global")]

    def test_plateau(self):
        assert kinds(find_optima([1, 2, 2, 1], [0.1, 0.2, 0.3, 0.4])) == [(1, "global")]

    def test_two_humps(self):
        grid = np.geomspace(0.005, 1, 60)
        vals = 1.0 * np.exp(-((np.log(grid) - np.log(0.04)) ** 2) / 0.3) + 0.6 * np.exp(-((np.log(grid) - np.log(0.5)) ** 2) / 0.1)
        opts = find_optima(vals, grid)
        assert len(opts) == 2
        glob = [o for o in opts if o.kind == "global"][0]
        loc = [o for o in opts if o.kind == "local"][0]
        assert 0.03 < glob.rho < 0.05
        assert 0.4 < loc.rho < 0.6

    def test_single_point(self):
        assert kinds(find_optima([0.3], [0.1])) == [(0, "global")]

    def test_empty(self):
        with pytest.raises(DomainError):
            find_optima([], [])

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            find_optima([1, 2], [0.1])

    @given(st.lists(st.integers(-5, 5), min_size=1, max_size=30))
    def test_properties(self, vals):
        grid = np.arange(1, len(vals) + 1) / (len(vals) + 1)
        opts = find_optima(vals, grid)
        glob = [o for o in opts if o.kind == "global"]
        assert len(glob) == 1
        g = glob[0]
        assert all(g.value >= v for v in vals)
        assert g.index == vals.index(max(vals))
        for o in opts:
            if o.kind == "local":
                i = o.index
                assert 0 < i < len(vals) - 1 and vals[i - 1] < vals[i] > vals[i + 1]

    @given(st.lists(st.integers(0, 9), min_size=1, max_size=20), st.integers(1, 4))
    def test_boundary_padding(self, vals, pad):
        # appending strictly smaller values keeps the global optimum and every local optimum
        grid = np.linspace(0.1, 0.9, len(vals))
        before = find_optima(vals, grid)
        low = min(vals) - 1
        padded = [low] * pad + list(vals) + [low] * pad
        step = 0.8 / max(len(vals) - 1, 1)
        pgrid = np.concatenate([grid[0] - step * np.arange(pad, 0, -1) * 0.01, grid, grid[-1] + step * np.arange(1, pad + 1) * 0.01])
        after = find_optima(padded, pgrid)
        gb = [o for o in before if o.kind == "global"][0]
        ga = [o for o in after if o.kind == "global"][0]
        assert ga.index - pad == gb.index
        locals_after = {o.index - pad for o in after if o.kind == "local"}
        assert {o.index for o in before if o.kind == "local"} <= locals_after


@pytest.fixture(scope="module")
def ba300():
    return generate_scale_free(300, 2, seed=2)


class TestSweep:
    def test_single_point(self, ba300):
        res = sweep_rho(ba300, LearningParams(50, 50, 1.0), 1.0, 1.0, [0.1], horizon=50)
        for k in "ves":
            assert kinds(res.optima[k]) == [(0, "global")]

    def test_no_detection_monotone(self, ba300):
        grid = np.geomspace(0.01, 1, 15)
        res = sweep_rho(ba300, LearningParams(50, 50, 1.0), 1.0, 1.0, grid, horizon=40, detect=False)
        assert np.all(np.diff(res.expected_lambda_e) >= 0)
        assert res.global_optimum("e").index == len(grid) - 1

    def test_low_rho_optimum(self, ba300):
        grid = np.geomspace(0.005, 1, 25)
        res = sweep_rho(ba300, LearningParams(100, 100, 1.0), 1.0, 1.0, grid)
        g = res.global_optimum("e")
        at_half = res.expected_lambda_e[np.argmin(abs(grid - 0.5))]
        assert g.rho < 0.1 and g.value > at_half

    def test_deterministic(self, ba300):
        kw = dict(rho_grid=[0.02, 0.2, 0.8], horizon=80)
        a = sweep_rho(ba300, LearningParams(20, 20, 0.5), 2.0, 3.0, **kw)
        b = sweep_rho(ba300, LearningParams(20, 20, 0.5), 2.0, 3.0, **kw)
        assert a.expected_lambda_e.tobytes() == b.expected_lambda_e.tobytes()

    def test_monte_carlo_engine(self, ba300):
        res = sweep_rho(ba300, LearningParams(20, 20, 0.5), 2.0, 3.0, [0.05, 0.5], engine="monte_carlo",
                        horizon=60, replicas=10, rng_seed=1)
        assert len(res.expected_lambda_e) == 2
        assert np.all(np.isfinite(res.expected_lambda_s_replica_mean))

    def test_refinement(self, ba300):
        res = sweep_rho(ba300, LearningParams(100, 100, 1.0), 1.0, 1.0, horizon=None)
        assert len(res.rho_grid) > 50
        assert set(default_grid()) <= set(res.rho_grid)

    @pytest.mark.parametrize("grid", [[], [0.0, 0.5], [0.5, 0.2], [0.5, 1.2], [0.3, 0.3]])
    def test_invalid_grid(self, ba300, grid):
        with pytest.raises(DomainError):
            sweep_rho(ba300, LearningParams(1, 1), 1.0, 1.0, grid)

    def test_unknown_engine(self, ba300):
        with pytest.raises(DomainError):
            sweep_rho(ba300, LearningParams(1, 1), 1.0, 1.0, [0.1], engine="exact")
