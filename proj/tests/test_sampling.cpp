#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "glab/errors.hpp"
#include "glab/sampling.hpp"

using namespace glab;

namespace {

Mat empirical_covariance(const SampleSet& s, bool center) {
    Vec mean(s.n, 0.0);
    if (center) {
        for (std::size_t i = 0; i < s.m; ++i)
            for (std::size_t j = 0; j < s.n; ++j) mean[j] += s.points(i, j) / s.m;
    }
    Mat cov(s.n, s.n);
    for (std::size_t i = 0; i < s.m; ++i)
        for (std::size_t a = 0; a < s.n; ++a)
            for (std::size_t b = 0; b < s.n; ++b)
                cov(a, b) += (s.points(i, a) - mean[a]) * (s.points(i, b) - mean[b]) / s.m;
    return cov;
}

double spectral_distance_from_identity(const Mat& cov) {
    Mat d = cov;
    for (std::size_t i = 0; i < d.rows; ++i) d(i, i) -= 1.0;
    SymEigen eig = sym_eigen(d);
    double dist = 0;
    for (double v : eig.values) dist = std::max(dist, std::fabs(v));
    return dist;
}

}  // namespace

TEST_CASE("sym_eigen reconstructs symmetric matrices") {
    Rng rng(31, 0);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 2 + rng.below(5);
        Mat a(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = rng.uniform(-1, 1);
        SymEigen eig = sym_eigen(a);
        // A = sum_k lambda_k v_k v_k^T with eigenvector rows
        Mat rec(n, n);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    rec(i, j) += eig.values[k] * eig.vectors(k, i) * eig.vectors(k, j);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                CHECK(rec(i, j) == doctest::Approx(a(i, j)).epsilon(1e-9));
    }
}

TEST_CASE("gaussian n=4 m=10000: covariance near identity") {
    auto s = sample(DistributionSpec::make(Family::gaussian, 4), 10000, {2024, 0});
    CHECK(spectral_distance_from_identity(empirical_covariance(s, true)) < 0.1);
}

TEST_CASE("cube n=1 m=1e6: variance in [0.99, 1.01]") {
    auto s = sample(DistributionSpec::make(Family::cube_uniform, 1), 1000000, {7, 0});
    Mat cov = empirical_covariance(s, true);
    CHECK(cov(0, 0) > 0.99);
    CHECK(cov(0, 0) < 1.01);
}

TEST_CASE("m=1 reproducible bit-exactly under same seed") {
    for (Family f : {Family::gaussian, Family::cube_uniform, Family::product_exponential,
                     Family::ball_uniform}) {
        auto a = sample(DistributionSpec::make(f, 3), 1, {99, 5});
        auto b = sample(DistributionSpec::make(f, 3), 1, {99, 5});
        for (std::size_t j = 0; j < 3; ++j) CHECK(a.points(0, j) == b.points(0, j));
    }
}

TEST_CASE("built-in families are isotropic at m=1e5, n in {2,4,8}") {
    for (Family f : {Family::gaussian, Family::cube_uniform, Family::product_exponential,
                     Family::ball_uniform}) {
        for (std::size_t n : {2ul, 4ul, 8ul}) {
            auto s = sample(DistributionSpec::make(f, n), 100000, {11, n});
            double tol_mean = 5.0 / std::sqrt(1e5);
            Vec mean(n, 0.0);
            for (std::size_t i = 0; i < s.m; ++i)
                for (std::size_t j = 0; j < n; ++j) mean[j] += s.points(i, j) / s.m;
            for (std::size_t j = 0; j < n; ++j) CHECK(std::fabs(mean[j]) <= tol_mean);
            CHECK(spectral_distance_from_identity(empirical_covariance(s, true)) <=
                  10.0 / std::sqrt(1e5));
        }
    }
}

TEST_CASE("isotropize whitens and is idempotent") {
    auto raw = sample(DistributionSpec::make(Family::gaussian, 4), 10000, {5, 0});
    auto iso = isotropize(raw);
    Mat cov = empirical_covariance(iso.set, true);
    CHECK(spectral_distance_from_identity(cov) < 1e-8);
    Vec mean(4, 0.0);
    for (std::size_t i = 0; i < iso.set.m; ++i)
        for (std::size_t j = 0; j < 4u; ++j) mean[j] += iso.set.points(i, j) / iso.set.m;
    CHECK(norm2(mean) < 1e-10);
    // idempotence: second whitening transform is the identity
    auto again = isotropize(iso.set);
    for (std::size_t i = 0; i < 4u; ++i)
        for (std::size_t j = 0; j < 4u; ++j)
            CHECK(std::fabs(again.transform(i, j) - (i == j ? 1.0 : 0.0)) < 1e-6);
    for (std::size_t i = 0; i < iso.set.m; ++i)
        for (std::size_t j = 0; j < 4u; ++j)
            CHECK(std::fabs(again.set.points(i, j) - iso.set.points(i, j)) < 1e-6);
    // already-isotropic input: transform near identity
    double dev = 0;
    for (std::size_t i = 0; i < 4u; ++i)
        for (std::size_t j = 0; j < 4u; ++j)
            dev = std::max(dev, std::fabs(iso.transform(i, j) - (i == j ? 1.0 : 0.0)));
    CHECK(dev < 0.2);
}

TEST_CASE("isotropize: scaling by 3 gives transform (1/3) I") {
    auto raw = sample(DistributionSpec::make(Family::gaussian, 3), 20000, {42, 1});
    auto base = isotropize(raw);
    SampleSet scaled = raw;
    for (double& v : scaled.points.a) v *= 3.0;
    auto iso = isotropize(scaled);
    for (std::size_t i = 0; i < 3u; ++i)
        for (std::size_t j = 0; j < 3u; ++j)
            CHECK(iso.transform(i, j) == doctest::Approx(base.transform(i, j) / 3.0).epsilon(1e-8));
}

TEST_CASE("isotropize: m=n centered covariance is singular -> error") {
    auto raw = sample(DistributionSpec::make(Family::gaussian, 3), 3, {8, 0});
    CHECK_THROWS_AS(isotropize(raw), NumericalFailure);
    // one more point in general position makes whitening exact
    auto ok = sample(DistributionSpec::make(Family::gaussian, 3), 4, {8, 0});
    auto iso = isotropize(ok);
    CHECK(spectral_distance_from_identity(empirical_covariance(iso.set, true)) < 1e-8);
}

TEST_CASE("isotropic_constant closed forms and range") {
    CHECK(isotropic_constant(DistributionSpec::make(Family::gaussian, 5)) ==
          doctest::Approx(0.398942).epsilon(1e-5));
    CHECK(isotropic_constant(DistributionSpec::make(Family::cube_uniform, 3)) ==
          doctest::Approx(0.288675).epsilon(1e-5));
    CHECK(isotropic_constant(DistributionSpec::make(Family::product_exponential, 2)) ==
          doctest::Approx(0.707107).epsilon(1e-5));
    for (Family f : {Family::gaussian, Family::cube_uniform, Family::product_exponential,
                     Family::ball_uniform}) {
        for (std::size_t n = 1; n <= 16; ++n) {
            double L = isotropic_constant(DistributionSpec::make(f, n));
            CHECK(L >= 0.2);
            CHECK(L <= 1.0);
        }
    }
    CHECK_THROWS_AS(isotropic_constant(DistributionSpec::make(Family::hit_and_run_body, 2)),
                    UnsupportedError);
}

TEST_CASE("radius_band_check: gaussian n=16 violations rare; degenerate cases") {
    auto s = sample(DistributionSpec::make(Family::gaussian, 16), 10000, {13, 0});
    auto rep = radius_band_check(s, 0.3, 3.0);
    CHECK(rep.value < 1e-3);

    // eps0 = 0: only upper violations counted
    auto rep0 = radius_band_check(s, 0.0, 3.0);
    CHECK(rep0.value <= rep.value);

    SampleSet origin;
    origin.n = 2;
    origin.m = 1;
    origin.points = Mat(1, 2);
    origin.spec = DistributionSpec::make(Family::gaussian, 2);
    auto rep1 = radius_band_check(origin, 0.5, 3.0);
    CHECK(rep1.value == 1.0);

    CHECK_THROWS_AS(radius_band_check(s, 3.0, 0.3), InvalidInputError);
}

TEST_CASE("paouris_tail_check: gaussian bound holds, degenerate c fails") {
    auto reps = paouris_tail_check(DistributionSpec::make(Family::gaussian, 9), {1.0}, 3.0,
                                   20000, {21, 0});
    REQUIRE(reps.size() == 1);
    CHECK(reps[0].estimate.value <= std::exp(-3.0));
    CHECK(reps[0].pass);

    auto bad = paouris_tail_check(DistributionSpec::make(Family::gaussian, 9), {1.0}, 0.0, 500,
                                  {21, 0});
    CHECK(bad[0].estimate.value == 1.0);
    CHECK_FALSE(bad[0].pass);

    // n=1 edge: runs, bound e^{-t}
    auto edge = paouris_tail_check(DistributionSpec::make(Family::gaussian, 1), {2.0}, 3.0, 500,
                                   {21, 0});
    CHECK(edge[0].bound == doctest::Approx(std::exp(-2.0)));
}

TEST_CASE("small_ball_check: gaussian n=8 and degenerate cases") {
    Vec zero(8, 0.0);
    auto rep = small_ball_check(DistributionSpec::make(Family::gaussian, 8), 0.1, zero, 0.1,
                                20000, {33, 0});
    CHECK(rep.bound == doctest::Approx(std::pow(0.1, 0.8)));
    CHECK(rep.estimate.value < 0.01);  // true value ~ 2e-5
    CHECK(rep.pass);

    auto vac = small_ball_check(DistributionSpec::make(Family::gaussian, 8), 1.0, zero, 0.0, 500,
                                {33, 0});
    CHECK(vac.bound == 1.0);
    CHECK(vac.pass);

    Vec far(8, 10.0 * std::sqrt(8.0) / std::sqrt(8.0));
    for (double& v : far) v = 10.0;  // |y| = 10*sqrt(8) = 10*sqrt(n)
    auto sep = small_ball_check(DistributionSpec::make(Family::gaussian, 8), 0.5, far, 0.1, 2000,
                                {33, 0});
    CHECK(sep.estimate.value == 0.0);
}

TEST_CASE("hit-and-run on the centered cube matches cube moments") {
    DistributionSpec spec = DistributionSpec::make(Family::hit_and_run_body, 2);
    // |x_i| <= sqrt(3): normals e_i / sqrt(3)
    spec.body_normals = Mat(2, 2);
    spec.body_normals(0, 0) = 1.0 / std::sqrt(3.0);
    spec.body_normals(1, 1) = 1.0 / std::sqrt(3.0);
    auto s = sample(spec, 20000, {55, 0});
    Mat cov = empirical_covariance(s, true);
    CHECK(cov(0, 0) == doctest::Approx(1.0).epsilon(0.1));
    CHECK(cov(1, 1) == doctest::Approx(1.0).epsilon(0.1));
    CHECK(std::fabs(cov(0, 1)) < 0.05);
    // membership-oracle variant agrees in distribution (same body)
    DistributionSpec oracle_spec = DistributionSpec::make(Family::hit_and_run_body, 2);
    oracle_spec.membership = [](const Vec& x) {
        return std::fabs(x[0]) <= std::sqrt(3.0) && std::fabs(x[1]) <= std::sqrt(3.0);
    };
    oracle_spec.membership_radius = 4.0;
    auto s2 = sample(oracle_spec, 5000, {56, 0});
    Mat cov2 = empirical_covariance(s2, true);
    CHECK(cov2(0, 0) == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("hit-and-run failure modes") {
    DistributionSpec spec = DistributionSpec::make(Family::hit_and_run_body, 2);
    CHECK_THROWS_AS(sample(spec, 1, {1, 0}), InvalidInputError);

    DistributionSpec empty = DistributionSpec::make(Family::hit_and_run_body, 2);
    empty.membership = [](const Vec&) { return false; };
    empty.membership_radius = 1.0;
    CHECK_THROWS_AS(sample(empty, 1, {1, 0}), NumericalFailure);

    // unbounded body: single normal in n=2 (slab), chords along the slab blow up
    DistributionSpec slab = DistributionSpec::make(Family::hit_and_run_body, 2);
    slab.body_normals = Mat(1, 2);
    slab.body_normals(0, 0) = 1.0;
    CHECK_THROWS_AS(sample(slab, 10, {1, 0}), NumericalFailure);
}

TEST_CASE("csv round trip") {
    auto s = sample(DistributionSpec::make(Family::ball_uniform, 3), 17, {77, 0});
    const char* path = "test_samples_roundtrip.csv";
    write_samples_csv(s, path);
    auto back = read_samples_csv(path);
    REQUIRE(back.n == s.n);
    REQUIRE(back.m == s.m);
    CHECK(back.spec.family == s.spec.family);
    CHECK(back.seed.seed == s.seed.seed);
    for (std::size_t i = 0; i < s.m; ++i)
        for (std::size_t j = 0; j < s.n; ++j) CHECK(back.points(i, j) == s.points(i, j));
    std::remove(path);
}
