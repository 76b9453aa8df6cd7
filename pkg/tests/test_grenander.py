import numpy as np
import pytest

from ebmono import (
    MixtureOfUniforms,
    Sample,
    empirical_cdf,
    grenander_fit,
    least_concave_majorant,
    log_likelihood,
    to_step,
)


def pava_antitonic(y, w):
    """Weighted antitonic regression by naive repeated pooling of violators."""
    blocks = [[float(v), float(wt), 1] for v, wt in zip(y, w)]
    changed = True
    while changed:
        changed = False
        for k in range(len(blocks) - 1):
            if blocks[k][0] < blocks[k + 1][0]:
                v1, w1, c1 = blocks[k]
                v2, w2, c2 = blocks[k + 1]
                blocks[k] = [(v1 * w1 + v2 * w2) / (w1 + w2), w1 + w2, c1 + c2]
                del blocks[k + 1]
                changed = True
                break
    return np.concatenate([[v] * c for v, _, c in blocks])


def pava_heights(data):
    """Grenander heights at each distinct observation via PAVA on ECDF slopes."""
    x, mult = np.unique(data, return_counts=True)
    gaps = np.diff(x, prepend=0.0)
    slopes = mult / len(data) / gaps
    return x, pava_antitonic(slopes, gaps)


def minmax_heights(data):
    """f_hat(x_k) = min_{i<=k} max_{j>=k} (F(x_j) - F(x_{i-1})) / (x_j - x_{i-1})."""
    x, mult = np.unique(data, return_counts=True)
    F = np.concatenate(([0.0], np.cumsum(mult) / len(data)))
    X = np.concatenate(([0.0], x))
    m = x.size
    out = np.empty(m)
    for k in range(1, m + 1):
        out[k - 1] = min(
            max((F[j] - F[i - 1]) / (X[j] - X[i - 1]) for j in range(k, m + 1))
            for i in range(1, k + 1)
        )
    return x, out


def random_data(rng):
    n = int(rng.integers(1, 51))
    kind = rng.integers(4)
    if kind == 0:
        return rng.exponential(size=n)
    if kind == 1:
        return np.abs(rng.standard_normal(n))
    if kind == 2:
        return rng.uniform(0.1, 3.0, size=n)
    # rounded draws produce ties
    return np.round(rng.exponential(size=n), 1) + 0.1


def fit_heights_at(data):
    theta = grenander_fit(data)
    x = np.unique(data)
    return x, theta.pdf(x)


class TestEcdf:
    def test_two_points(self):
        e = empirical_cdf([1.0, 3.0])
        assert e.x.tolist() == [1.0, 3.0] and e.F.tolist() == [0.5, 1.0]

    def test_ties_pooled(self):
        e = empirical_cdf([2.0, 2.0, 4.0])
        assert e.x.tolist() == [2.0, 4.0]
        assert e.F.tolist() == pytest.approx([2 / 3, 1.0])

    def test_single(self):
        e = empirical_cdf([2.5])
        assert e.x.tolist() == [2.5] and e.F.tolist() == [1.0]


class TestMajorant:
    def test_already_concave(self):
        lcm = least_concave_majorant(empirical_cdf([1.0, 3.0]))
        assert lcm.x.tolist() == [0.0, 1.0, 3.0]
        assert lcm.F.tolist() == [0.0, 0.5, 1.0]
        assert lcm.slopes.tolist() == [0.5, 0.25]

    def test_pooled(self):
        lcm = least_concave_majorant(empirical_cdf([2.0, 3.0]))
        assert lcm.x.tolist() == [0.0, 3.0]
        assert lcm.slopes.tolist() == pytest.approx([1 / 3])

    def test_single(self):
        lcm = least_concave_majorant(empirical_cdf([7.0]))
        assert lcm.x.tolist() == [0.0, 7.0] and lcm.F.tolist() == [0.0, 1.0]

    def test_collinear_points_dropped(self):
        lcm = least_concave_majorant(empirical_cdf([1.0, 2.0, 3.0]))
        assert lcm.x.tolist() == [0.0, 3.0]

    def test_majorizes_and_touches(self, rng):
        for _ in range(300):
            data = random_data(rng)
            e = empirical_cdf(data)
            lcm = least_concave_majorant(e)
            assert np.all(lcm(e.x) >= e.F - 1e-12)
            at_vertices = np.interp(lcm.x[1:], e.x, e.F)
            np.testing.assert_allclose(lcm.F[1:], at_vertices, atol=1e-15)
            assert np.all(np.diff(lcm.slopes) < 0) and np.all(lcm.slopes > 0)


class TestFit:
    def test_golden_two_points(self):
        theta = grenander_fit([1.0, 3.0])
        assert theta.weights.tolist() == [0.25, 0.75]
        assert theta.locations.tolist() == [1.0, 3.0]

    def test_golden_pooled(self):
        theta = grenander_fit([2.0, 3.0])
        assert theta.weights.tolist() == [1.0]
        assert theta.locations.tolist() == [3.0]

    def test_single_observation(self):
        theta = grenander_fit([0.7])
        assert theta == MixtureOfUniforms([1.0], [0.7])

    def test_pava_oracle(self, rng):
        for _ in range(500):
            data = random_data(rng)
            x, h = fit_heights_at(data)
            x2, h2 = pava_heights(data)
            np.testing.assert_array_equal(x, x2)
            np.testing.assert_allclose(h, h2, rtol=0, atol=1e-10)

    def test_minmax_oracle(self, rng):
        for _ in range(100):
            data = random_data(rng)
            x, h = fit_heights_at(data)
            _, h2 = minmax_heights(data)
            np.testing.assert_allclose(h, h2, rtol=0, atol=1e-10)

    def test_invariants(self, rng):
        for _ in range(200):
            data = Sample(random_data(rng))
            theta = grenander_fit(data)
            assert abs(theta.weights.sum() - 1) <= 1e-12
            assert theta.locations[-1] == data.max
            assert np.all(np.diff(theta.locations) > 0)
            assert np.all(np.diff(to_step(theta).heights) < 0)

    def test_mle_against_perturbations(self, rng):
        for _ in range(100):
            data = Sample(rng.exponential(size=int(rng.integers(5, 60))))
            theta = grenander_fit(data)
            best = log_likelihood(theta, data)
            for _ in range(100):
                w = rng.dirichlet(theta.weights * 50 + 0.5)
                mu = theta.locations * rng.uniform(1.0, 1.3, size=theta.S)
                if rng.random() < 0.5:
                    w = np.append(w * 0.9, 0.1)
                    mu = np.append(mu, rng.uniform(0.01, 2 * data.max))
                other = MixtureOfUniforms(w, mu)
                assert log_likelihood(other, data) <= best + 1e-9

    def test_large_sample_is_fast_and_valid(self, rng):
        data = Sample(rng.exponential(size=10_000))
        theta = grenander_fit(data)
        assert theta.locations[-1] == data.max
        assert np.isfinite(log_likelihood(theta, data))
