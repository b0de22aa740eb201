#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "glab/errors.hpp"
#include "glab/estimators.hpp"
#include "glab/polytope.hpp"

using namespace glab;

namespace {

VPolytope cross_polytope(std::size_t n) {
    Mat g(n, n);
    for (std::size_t i = 0; i < n; ++i) g(i, i) = 1.0;
    return make_vpolytope(std::move(g), "b1");
}

VPolytope square_2d() {
    Mat g(2, 2);
    g(0, 0) = 1.0;
    g(0, 1) = 1.0;
    g(1, 0) = 1.0;
    g(1, 1) = -1.0;
    return make_vpolytope(std::move(g), "square");
}

SampleSet set_from_points(Mat points) {
    SampleSet s;
    s.n = points.cols;
    s.m = points.rows;
    s.points = std::move(points);
    s.spec = DistributionSpec::make(Family::gaussian, s.n);
    return s;
}

SampleSet gaussian_set(std::size_t n, std::size_t m, std::uint64_t seed) {
    return sample(DistributionSpec::make(Family::gaussian, n), m, {seed, 0});
}

}  // namespace

TEST_CASE("volume_mc: closed-form volumes") {
    EstimateReport b12 = volume_mc(cross_polytope(2), 1.0, 1000000, {21, 0});
    CHECK(b12.value == doctest::Approx(2.0).epsilon(0.03));
    CHECK(b12.ci_low <= 2.0);
    CHECK(b12.ci_high >= 2.0);

    EstimateReport sq = volume_mc(square_2d(), std::sqrt(2.0), 1000000, {22, 0});
    CHECK(sq.value == doctest::Approx(4.0).epsilon(0.03));

    EstimateReport b13 = volume_mc(cross_polytope(3), 1.0, 400000, {23, 0});
    CHECK(b13.value == doctest::Approx(4.0 / 3.0).epsilon(0.05));
}

TEST_CASE("volume_mc: determinism and bound validation") {
    EstimateReport a = volume_mc(cross_polytope(2), 1.5, 5000, {7, 0});
    EstimateReport b = volume_mc(cross_polytope(2), 1.5, 5000, {7, 0});
    CHECK(a.value == b.value);
    CHECK(a.ci_low == b.ci_low);
    CHECK_THROWS_AS(volume_mc(square_2d(), 1.0, 100, {1, 0}), InvalidInputError);
}

TEST_CASE("volume_exact_lowdim: closed forms and dimension guard") {
    CHECK(volume_exact_lowdim(cross_polytope(3)) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    Mat cube(4, 3);
    double verts[4][3] = {{1, 1, 1}, {1, 1, -1}, {1, -1, 1}, {1, -1, -1}};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 3; ++j) cube(i, j) = verts[i][j];
    CHECK(volume_exact_lowdim(make_vpolytope(std::move(cube))) ==
          doctest::Approx(8.0).epsilon(1e-12));
    CHECK_THROWS_AS(volume_exact_lowdim(cross_polytope(4)), UnsupportedError);
}

TEST_CASE("volume_mc agrees with volume_exact_lowdim on random bodies") {
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        Rng rng(3000 + trial, 0);
        std::size_t n = 2 + trial % 2;
        Mat g(n + 3, n);
        for (auto& v : g.a) v = rng.uniform(-1, 1);
        for (std::size_t i = 0; i < n; ++i) g(i, i) += 0.5;  // keep full rank
        VPolytope p = make_vpolytope(std::move(g));
        double exact = volume_exact_lowdim(p);
        double rad = 0.0;
        for (std::size_t i = 0; i < p.generators.rows; ++i) {
            double s = 0;
            for (std::size_t j = 0; j < n; ++j) s += p.generators(i, j) * p.generators(i, j);
            rad = std::max(rad, std::sqrt(s));
        }
        EstimateReport mc = volume_mc(p, rad, 40000, {4000 + trial, 0});
        double slack = 0.7 * (mc.ci_high - mc.ci_low);
        CHECK(exact >= mc.ci_low - slack);
        CHECK(exact <= mc.ci_high + slack);
    }
}

TEST_CASE("mean_width: segment, homogeneity, quadrature cross-check") {
    Mat seg(1, 2);
    seg(0, 0) = 1.0;
    VPolytope segment = make_vpolytope(std::move(seg));
    EstimateReport w = mean_width(segment, 200000, {31, 0});
    CHECK(w.value == doctest::Approx(4.0 / M_PI).epsilon(0.01));

    VPolytope b1 = cross_polytope(2);
    Mat g2(2, 2);
    g2(0, 0) = 2.0;
    g2(1, 1) = 2.0;
    VPolytope b1x2 = make_vpolytope(std::move(g2));
    EstimateReport w1 = mean_width(b1, 50000, {32, 0});
    EstimateReport w2 = mean_width(b1x2, 50000, {32, 0});
    CHECK(w2.value == doctest::Approx(2.0 * w1.value).epsilon(1e-12));

    // trapezoid quadrature of 2 * max(|cos|, |sin|) as an independent oracle
    const std::size_t steps = 200000;
    double acc = 0.0;
    for (std::size_t i = 0; i < steps; ++i) {
        double th = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(steps);
        acc += std::max(std::fabs(std::cos(th)), std::fabs(std::sin(th)));
    }
    double oracle = 2.0 * acc / static_cast<double>(steps);
    CHECK(w1.value == doctest::Approx(oracle).epsilon(0.01));
    CHECK(w1.ci_low <= oracle);
    CHECK(w1.ci_high >= oracle);
}

TEST_CASE("volume_radius_profile: normalized band and degenerate m = n") {
    DistributionSpec spec = DistributionSpec::make(Family::gaussian, 4);
    auto rows = volume_radius_profile(spec, 4, {8, 32, 128}, 4000, {41, 0});
    REQUIRE(rows.size() == 3);
    double lo = rows[0].normalized, hi = rows[0].normalized;
    for (const auto& r : rows) {
        CHECK(r.volume.value > 0.0);
        lo = std::min(lo, r.normalized);
        hi = std::max(hi, r.normalized);
    }
    CHECK(hi / lo <= 3.0);

    auto seed2 = volume_radius_profile(spec, 4, {8, 32, 128}, 4000, {42, 0});
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(seed2[i].normalized_lo <= rows[i].normalized_hi * 1.5);
        CHECK(rows[i].normalized_lo <= seed2[i].normalized_hi * 1.5);
    }

    DistributionSpec s2 = DistributionSpec::make(Family::gaussian, 2);
    auto deg = volume_radius_profile(s2, 2, {2}, 2000, {43, 0});
    CHECK(std::isfinite(deg[0].normalized));

    CHECK_THROWS_AS(volume_radius_profile(s2, 2, {8, 4}, 100, {1, 0}), InvalidInputError);
}

TEST_CASE("polar_volume_check: cross polytope and gaussian fixture") {
    Mat pts(2, 2);
    pts(0, 0) = 1.0;
    pts(1, 1) = 1.0;
    PolarVolumeReport rep = polar_volume_check(set_from_points(std::move(pts)), 200000, {51, 0});
    CHECK(rep.product == doctest::Approx(8.0).epsilon(0.05));
    CHECK(rep.omega_n_sq == doctest::Approx(M_PI * M_PI).epsilon(1e-12));
    double ratio = rep.product / rep.omega_n_sq;
    CHECK(ratio > 0.25);
    CHECK(ratio < 1.0);
    CHECK(rep.pass);

    PolarVolumeReport g3 = polar_volume_check(gaussian_set(3, 30, 52), 120000, {53, 0});
    double r3 = g3.product / g3.omega_n_sq;
    CHECK(r3 > 0.1);
    CHECK(r3 < 1.0);
    CHECK(g3.pass);
}

TEST_CASE("bf_bound_check: closed-form cross polytope and random sphere points") {
    double r = 1.7;
    Mat pts(4, 2);
    pts(0, 0) = r;
    pts(1, 0) = -r;
    pts(2, 1) = r;
    pts(3, 1) = -r;
    BfReport rep = bf_bound_check(pts, r, 200000, {61, 0});
    double expected = 2.0 / std::sqrt(std::log(3.0));  // (2r^2)^{1/2} sqrt(2)/(r sqrt(ln 3))
    CHECK(rep.ratio == doctest::Approx(expected).epsilon(0.03));
    CHECK(rep.pass);

    for (std::uint64_t trial = 0; trial < 5; ++trial) {
        Rng rng(700 + trial, 0);
        Mat sp(50, 3);
        for (std::size_t i = 0; i < 50; ++i) {
            Vec u = sphere_direction(rng, 3);
            for (std::size_t j = 0; j < 3; ++j) sp(i, j) = 2.0 * u[j];
        }
        BfReport rr = bf_bound_check(sp, 2.0, 40000, {800 + trial, 0});
        CHECK(rr.pass);
        CHECK(rr.ratio <= 4.0);
    }

    Mat bad(1, 2);
    bad(0, 0) = 3.0;
    CHECK_THROWS_AS(bf_bound_check(bad, 1.0, 10, {1, 0}), InvalidInputError);
}

TEST_CASE("concentration_constants: gaussian band, hand-computable case, homogeneity") {
    SampleSet g = gaussian_set(8, 800, 71);
    ConcentrationReport rep = concentration_constants(g, 64, 200, {72, 0});
    // sphere extrema of the empirical functional sit about sqrt(n/m) away
    // from the population value sqrt(2/pi) ~ 0.7979
    CHECK(rep.c1_hat >= 0.65);
    CHECK(rep.c1_hat <= 0.7979);
    CHECK(rep.c2_hat >= 0.7979);
    CHECK(rep.c2_hat <= 0.95);
    CHECK(rep.c1_hat <= rep.c2_hat);

    // samples +/- e_i once each: objective is ||y||_1 / n; min 1/n, max 1/sqrt(n)
    std::size_t n = 4;
    Mat pm(2 * n, n);
    for (std::size_t i = 0; i < n; ++i) {
        pm(2 * i, i) = 1.0;
        pm(2 * i + 1, i) = -1.0;
    }
    ConcentrationReport hand = concentration_constants(set_from_points(pm), 64, 400, {73, 0});
    CHECK(hand.c1_hat == doctest::Approx(1.0 / 4.0).epsilon(0.02));
    CHECK(hand.c2_hat == doctest::Approx(0.5).epsilon(0.02));

    Mat pm2 = pm;
    for (auto& v : pm2.a) v *= 2.0;
    ConcentrationReport dbl = concentration_constants(set_from_points(pm2), 64, 400, {73, 0});
    CHECK(dbl.c1_hat == doctest::Approx(2.0 * hand.c1_hat).epsilon(1e-12));
    CHECK(dbl.c2_hat == doctest::Approx(2.0 * hand.c2_hat).epsilon(1e-12));
}

TEST_CASE("pi1_bounds: gaussian bracket and degeneracy") {
    SampleSet g = gaussian_set(8, 800, 81);
    Pi1Bounds b = pi1_bounds(g, 64, 200, {82, 0});
    CHECK(b.lower <= b.upper);
    CHECK(b.upper >= 0.8);
    CHECK(b.lower <= 1.6);

    Mat collinear(6, 2);
    for (std::size_t i = 0; i < 6; ++i) collinear(i, 0) = (i % 2 == 0) ? 1.0 : -1.0;
    CHECK_THROWS_AS(pi1_bounds(set_from_points(collinear), 32, 100, {83, 0}), NumericalFailure);
}

TEST_CASE("unconditional_distance_certificate: lower-bound consistency") {
    // B_m = B_1^3, itself 1-unconditional: certificate must stay <= 1 (+ MC slack)
    Mat e(3, 3);
    for (std::size_t i = 0; i < 3; ++i) e(i, i) = 1.0;
    double cert = unconditional_distance_certificate(set_from_points(e), 150000, {91, 0});
    CHECK(cert <= 1.1);
    CHECK(cert > 0.0);

    double g = unconditional_distance_certificate(gaussian_set(3, 6, 92), 150000, {93, 0});
    CHECK(g >= 0.25);
    CHECK(g <= 1.1);
}

TEST_CASE("fixed_operator_smallprob_check: identity operator regimes") {
    DistributionSpec spec = DistributionSpec::make(Family::gaussian, 8);
    Mat id(8, 8);
    for (std::size_t i = 0; i < 8; ++i) id(i, i) = 1.0;
    LinearMap t = make_linear_map(id);
    VPolytope b0 = cross_polytope(8);

    SmallProbReport tiny = fixed_operator_smallprob_check(spec, t, b0, 0.05, 4, 3000, {101, 0});
    CHECK(tiny.bound == doctest::Approx(std::exp(-4.0)).epsilon(1e-12));
    CHECK(tiny.estimate.value <= 0.001);
    CHECK(tiny.pass);

    SmallProbReport huge = fixed_operator_smallprob_check(spec, t, b0, 10.0, 4, 2000, {102, 0});
    CHECK(huge.estimate.value > 0.9);
    CHECK(!huge.pass);

    Mat half(8, 8);
    for (std::size_t i = 0; i < 8; ++i) half(i, i) = 0.5;
    CHECK_THROWS_AS(
        fixed_operator_smallprob_check(spec, make_linear_map(half), b0, 0.1, 1, 10, {1, 0}),
        InvalidInputError);
}

TEST_CASE("measure_vs_volume_check: gaussian square, limit case, vacuous bound") {
    DistributionSpec spec = DistributionSpec::make(Family::gaussian, 2);
    VPolytope square = square_2d();
    MeasureVolumeReport rep = measure_vs_volume_check(spec, square, 1.0, 400000, {111, 0});
    CHECK(rep.bound == doctest::Approx(4.0 / (2.0 * M_PI)).epsilon(1e-12));
    // P(|g1|<=1)^2 = erf(1/sqrt 2)^2
    double p1 = std::erf(1.0 / std::sqrt(2.0));
    CHECK(rep.estimate.value == doctest::Approx(p1 * p1).epsilon(0.01));
    CHECK(rep.pass);

    MeasureVolumeReport small = measure_vs_volume_check(spec, square, 1e-4, 100, {112, 0});
    CHECK(small.pass);
    CHECK(small.estimate.method == "skipped_small_alpha");

    MeasureVolumeReport big = measure_vs_volume_check(spec, cross_polytope(2), 2.0, 50000, {113, 0});
    CHECK(big.bound >= 1.0);
    CHECK(big.pass);
}
