import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import kstest

from ziegpd import (
    GpdParams,
    PowerCarrier,
    Sample,
    ZiegpdParams,
    gpd_cdf,
    gpd_pdf,
    params_from_dict,
    params_to_dict,
    return_level,
    ziegpd_cdf,
    ziegpd_loglik,
    ziegpd_pdf,
    ziegpd_quantile,
    ziegpd_sample,
)

# Cross-check fixtures: power-carrier fits to four winter daily-rainfall
# stations (mm/day) and the return levels they imply.
STATION_FITS = {
    "peshawar": ZiegpdParams.m1(pi=0.5999, kappa=0.4568, sigma=4.9095, xi=0.3281),
    "mardan": ZiegpdParams.m1(pi=0.6075, kappa=0.3989, sigma=5.7098, xi=0.3703),
    "bannu": ZiegpdParams.m1(pi=0.6450, kappa=0.4772, sigma=3.6156, xi=0.2681),
    "hangu": ZiegpdParams.m1(pi=0.6099, kappa=0.4437, sigma=3.9883, xi=0.3819),
}

GRID = [
    ZiegpdParams.m1(0.3, kappa, 1.0, xi)
    for kappa in (0.5, 1.0, 5.0)
    for xi in (0.0, 0.2, 0.5)
] + [
    ZiegpdParams.m2(0.4, delta, 2.0, 0.3) for delta in (0.5, 1.0, 5.0)
] + [
    ZiegpdParams.m3(0.2, delta, kappa, 0.8, 0.25)
    for delta in (0.5, 2.0)
    for kappa in (0.5, 2.0, 6.0)
]


def test_params_validation():
    with pytest.raises(ValueError):
        ZiegpdParams.m1(-0.01, 1.0, 1.0, 0.1)
    with pytest.raises(ValueError):
        ZiegpdParams.m1(1.01, 1.0, 1.0, 0.1)


def test_pdf_examples():
    theta = ZiegpdParams.m1(0.6, 1.0, 1.0, 0.5)
    assert ziegpd_pdf(0.0, theta) == 0.6
    # identity carrier: (1-pi) times the GPD density 0.125
    assert ziegpd_pdf(2.0, theta) == pytest.approx(0.05, abs=1e-12)
    # 0.5 * 2 * (1 - e^-1) * e^-1
    theta = ZiegpdParams.m1(0.5, 2.0, 1.0, 0.0)
    want = 0.5 * 2.0 * (1.0 - np.exp(-1.0)) * np.exp(-1.0)
    assert ziegpd_pdf(1.0, theta) == pytest.approx(want, abs=1e-9)


def test_pdf_negative_z_rejected():
    with pytest.raises(ValueError):
        ziegpd_pdf(-1.0, STATION_FITS["peshawar"])


def test_cdf_examples():
    theta = STATION_FITS["peshawar"]
    assert ziegpd_cdf(0.0, theta) == pytest.approx(theta.pi, abs=1e-14)
    assert ziegpd_cdf(4.2433, theta) == pytest.approx(0.900, abs=1e-3)
    big = ZiegpdParams.m1(0.3, 2.0, 1.0, 0.2)
    assert ziegpd_cdf(1e8, big) == pytest.approx(1.0, abs=1e-3)


def test_quantile_examples():
    theta = ZiegpdParams.m1(0.6, 2.0, 1.0, 0.2)
    assert ziegpd_quantile(0.5, theta) == 0.0
    pesh = STATION_FITS["peshawar"]
    assert ziegpd_quantile(0.900, pesh) == pytest.approx(4.2433, abs=0.01)
    assert ziegpd_quantile(0.950, pesh) == pytest.approx(8.5123, abs=0.02)


def test_quantile_domain():
    theta = ZiegpdParams.m1(0.5, 2.0, 1.0, 0.2)
    with pytest.raises(ValueError):
        ziegpd_quantile(1.0, theta)
    # pi = 1 puts every p in [0, 1) inside the atom
    degenerate = ZiegpdParams.m1(1.0, 2.0, 1.0, 0.2)
    assert ziegpd_quantile(0.3, degenerate) == 0.0
    assert np.all(ziegpd_quantile(np.array([0.0, 0.999999999]), degenerate) == 0.0)


def test_return_level_examples():
    assert return_level(10.0, STATION_FITS["peshawar"]) == pytest.approx(4.2433, abs=0.01)
    assert return_level(5.0, STATION_FITS["mardan"]) == pytest.approx(1.0843, abs=0.01)
    assert return_level(20.0, STATION_FITS["bannu"]) == pytest.approx(5.6242, abs=0.02)


def test_return_level_inside_atom_errors():
    theta = ZiegpdParams.m1(0.9, 1.0, 1.0, 0.1)
    with pytest.raises(ValueError):
        return_level(5.0, theta)  # 1 - 1/5 = 0.8 <= 0.9
    with pytest.raises(ValueError):
        return_level(1.0, theta)


def test_sample_degenerate_atom():
    s = ziegpd_sample(1000, ZiegpdParams.m1(1.0, 2.0, 1.0, 0.2), seed=5)
    assert s.zero_count == 1000
    assert np.all(s.values == 0.0)


def test_sample_zero_fraction_binomial():
    n, pi = 100_000, 0.6
    s = ziegpd_sample(n, ZiegpdParams.m1(pi, 2.0, 1.0, 0.2), seed=11)
    se = np.sqrt(pi * (1.0 - pi) / n)
    assert abs(s.zero_count / n - pi) < 3.0 * se


def test_sample_positive_part_ks():
    theta = ZiegpdParams.m1(0.2, 5.0, 1.0, 0.2)
    s = ziegpd_sample(100_000, theta, seed=202)
    res = kstest(s.positives, lambda z: theta.carrier.cdf(gpd_cdf(z, theta.gpd)))
    assert res.pvalue > 0.01


def test_sample_determinism_and_seed_field():
    theta = ZiegpdParams.m2(0.4, 2.0, 1.5, 0.1)
    a = ziegpd_sample(500, theta, seed=99)
    b = ziegpd_sample(500, theta, seed=99)
    assert np.array_equal(a.values, b.values)
    assert a.seed == 99


def test_loglik_examples():
    s = Sample.from_values([0.0] * 10)
    theta = ZiegpdParams.m1(0.5, 1.0, 1.0, 0.1)
    assert ziegpd_loglik(s, theta) == pytest.approx(10.0 * np.log(0.5), abs=1e-9)

    s2 = Sample.from_values([0.0, 2.0])
    theta2 = ZiegpdParams.m1(0.6, 1.0, 1.0, 0.5)
    assert ziegpd_loglik(s2, theta2) == pytest.approx(np.log(0.6) + np.log(0.05), abs=1e-9)


def test_loglik_product_consistency():
    theta = ZiegpdParams.m3(0.3, 1.5, 3.0, 1.2, 0.2)
    s = ziegpd_sample(60, theta, seed=17)
    product = np.prod([ziegpd_pdf(z, theta) for z in s.values])
    mix = theta.pi**s.zero_count * (1.0 - theta.pi) ** (s.n - s.zero_count)
    # ziegpd_pdf already carries the mixture weights, so the plain product
    # of per-observation contributions matches exp(loglik)
    assert np.exp(ziegpd_loglik(s, theta)) == pytest.approx(product, rel=1e-10)
    assert mix > 0  # sanity on the fixture


def test_loglik_sentinels():
    with_zeros = Sample.from_values([0.0, 1.0, 2.0])
    no_zeros = Sample.from_values([1.0, 2.0])
    assert ziegpd_loglik(with_zeros, ZiegpdParams.m1(0.0, 1.0, 1.0, 0.1)) == -np.inf
    assert ziegpd_loglik(with_zeros, ZiegpdParams.m1(1.0, 1.0, 1.0, 0.1)) == -np.inf
    assert np.isfinite(ziegpd_loglik(no_zeros, ZiegpdParams.m1(0.0, 1.0, 1.0, 0.1)))


@pytest.mark.parametrize("theta", GRID)
def test_normalization(theta):
    zmax = ziegpd_quantile(1.0 - 1e-8, theta)
    interior, _ = quad(lambda z: ziegpd_pdf(z, theta), 0.0, zmax, limit=200)
    tail = (1.0 - theta.pi) * (1.0 - theta.carrier.cdf(gpd_cdf(zmax, theta.gpd)))
    assert theta.pi + interior + tail == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("theta", GRID)
def test_cdf_pdf_consistency(theta):
    sigma = theta.gpd.sigma
    z = np.linspace(0.01 * sigma, 20.0 * sigma, 120)
    h = 1e-6
    oracle = (ziegpd_cdf(z + h, theta) - ziegpd_cdf(z - h, theta)) / (2.0 * h)
    assert np.max(np.abs(oracle - ziegpd_pdf(z, theta))) < 1e-5


@pytest.mark.parametrize("theta", GRID)
def test_quantile_roundtrip(theta):
    p = np.concatenate(
        [np.array([theta.pi + 1e-6]), np.linspace(theta.pi + 0.01, 1.0 - 0.01, 25),
         np.array([1.0 - 1e-6])]
    )
    back = ziegpd_cdf(ziegpd_quantile(p, theta), theta)
    assert np.max(np.abs(back - p)) < 1e-8


def test_gpd_reduction():
    gpd = GpdParams(1.7, 0.35)
    theta = ZiegpdParams(0.0, PowerCarrier(1.0), gpd)
    z = np.linspace(0.0, 30.0, 200)
    assert np.max(np.abs(ziegpd_cdf(z, theta) - gpd_cdf(z, gpd))) < 1e-12


@pytest.mark.parametrize("c", [0.1, 10.0])
def test_scale_equivariance(c):
    for theta in GRID[:6]:
        scaled = ZiegpdParams(
            theta.pi, theta.carrier, GpdParams(c * theta.gpd.sigma, theta.gpd.xi)
        )
        z = np.linspace(0.0, 15.0 * theta.gpd.sigma, 40)
        assert np.max(np.abs(ziegpd_cdf(c * z, scaled) - ziegpd_cdf(z, theta))) < 1e-12


def test_pdf_matches_chain_rule():
    # production path uses the expanded closed forms; the carrier/GPD
    # composition is the independent cross-check
    for theta in GRID:
        z = np.linspace(0.05, 10.0, 40)
        closed = ziegpd_pdf(z, theta)
        chain = (1.0 - theta.pi) * theta.carrier.pdf(
            gpd_cdf(z, theta.gpd)
        ) * gpd_pdf(z, theta.gpd)
        assert np.max(np.abs(closed - chain)) < 1e-10


def test_sample_type_invariants():
    with pytest.raises(ValueError):
        Sample.from_values([-1.0, 2.0])
    with pytest.raises(ValueError):
        Sample(values=np.array([0.0, 1.0]), zero_count=2)
    s = Sample.from_values([0.0, 1.0, 0.0])
    assert s.zero_count == 2 and s.n == 3
    assert np.array_equal(s.positives, [1.0])


def test_serialization_roundtrip():
    for theta in (STATION_FITS["peshawar"], GRID[10], GRID[-1]):
        doc = params_to_dict(theta)
        back = params_from_dict(doc)
        assert back == theta


def test_serialization_strict_fields():
    doc = params_to_dict(ZiegpdParams.m1(0.5, 2.0, 1.0, 0.2))
    extra = dict(doc, delta=1.0)
    with pytest.raises(ValueError):
        params_from_dict(extra)
    missing = {k: v for k, v in doc.items() if k != "kappa"}
    with pytest.raises(ValueError):
        params_from_dict(missing)
    with pytest.raises(ValueError):
        params_from_dict(dict(doc, model="m7"))
    with pytest.raises(ValueError):
        params_from_dict({k: v for k, v in doc.items() if k != "model"})
