// Acceptance battery: one seeded, self-contained check per criterion, one
// pass/fail line each. Exit code 0 iff every criterion passes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "glab/bm.hpp"
#include "glab/errors.hpp"
#include "glab/estimators.hpp"
#include "glab/experiments.hpp"
#include "glab/lowdim.hpp"
#include "glab/operators.hpp"
#include "glab/oracles.hpp"
#include "glab/polytope.hpp"
#include "glab/sampling.hpp"

using namespace glab;

namespace {

int g_failures = 0;

void record(int id, const std::string& title, bool pass, const std::string& detail) {
    if (!pass) ++g_failures;
    std::printf("criterion-%02d %-28s %s  (%s)\n", id, title.c_str(), pass ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
}

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

VPolytope random_body(std::size_t n, std::size_t k, Rng& rng) {
    Mat g(k, n);
    for (auto& v : g.a) v = rng.uniform(-1, 1);
    for (std::size_t i = 0; i < n; ++i) g(i, i) += 0.6;
    return make_vpolytope(std::move(g));
}

std::string g17(double x) { return fmt_g17(x); }

// 1. vol_4(V_B^2) = vol(B)^2 for the square (16) and the cross polytope (4).
void criterion_01() {
    EstimateReport sq = operator_ball_volume_check(square_2d(), 1000000, {101, 0});
    EstimateReport b1 = operator_ball_volume_check(cross_polytope(2), 1000000, {102, 0});
    double err_sq = std::fabs(sq.value - 16.0) / 16.0;
    double err_b1 = std::fabs(b1.value - 4.0) / 4.0;
    record(1, "operator-ball identity", err_sq <= 0.05 && err_b1 <= 0.05,
           "square=" + g17(sq.value) + " b1=" + g17(b1.value));
}

// 2. LP operator norm vs sphere-boundary oracle on 200 random instances.
void criterion_02() {
    bool pass = true;
    double worst = 1.0;
    for (std::size_t i = 0; i < 200; ++i) {
        Rng rng(7000 + 31 * i, 1);
        std::size_t n = 2 + i % 2;
        VPolytope a = random_body(n, n + 3, rng);
        VPolytope b = random_body(n, n + 3, rng);
        Mat tm(n, n);
        for (auto& v : tm.a) v = rng.gaussian();
        LinearMap t = make_linear_map(std::move(tm));
        double exact = op_norm_polytopes(t, a, b);
        double oracle = opnorm_sphere_oracle(t, a, b, 1000000, {8000 + i, 3}).value;
        if (oracle > exact + 1e-9) pass = false;
        worst = std::min(worst, oracle / exact);
    }
    if (worst < 0.99) pass = false;
    record(2, "norm-oracle equivalence", pass, "worst_ratio=" + g17(worst));
}

// 3. Gaussian Z_p calibration against closed-form moments at p in {1,2,4}.
void criterion_03() {
    DistributionSpec spec = DistributionSpec::make(Family::gaussian, 4);
    Rng rng(103, 0);
    bool pass = true;
    double worst = 0.0;
    for (double p : {1.0, 2.0, 4.0}) {
        double oracle = gaussian_moment_oracle(p);
        for (int d = 0; d < 20; ++d) {
            Vec y = sphere_direction(rng, 4);
            EstimateReport est = zp_support_estimate(spec, y, p, 100000,
                                                     {static_cast<std::uint64_t>(104 + d), 5});
            double err = std::fabs(est.value - oracle) / oracle;
            worst = std::max(worst, err);
            if (err > 0.02) pass = false;
        }
    }
    record(3, "Z_p calibration", pass, "worst_rel_err=" + g17(worst));
}

// 4. Normalized volume-radius statistic stays in a factor-3 band over m.
void criterion_04() {
    auto rows = volume_radius_profile(DistributionSpec::make(Family::gaussian, 4), 4,
                                      {8, 32, 128, 512}, 20000, {105, 0});
    double lo = rows.front().normalized, hi = rows.front().normalized;
    std::string detail;
    for (const auto& r : rows) {
        lo = std::min(lo, r.normalized);
        hi = std::max(hi, r.normalized);
        detail += (detail.empty() ? "" : " ") + g17(r.normalized);
    }
    record(4, "volume-radius band", hi <= 3.0 * lo, "normalized: " + detail);
}

// 5. Polar volume products: exact 8 for (B_1^2, polar), n=3 random band.
void criterion_05() {
    VPolytope b1 = cross_polytope(2);
    double v = volume_exact_lowdim(b1);
    HPolytope pol = polar(b1);
    Mat pv = facet_normals_lowdim(
        [&] {
            Mat out(2 * b1.generators.rows, 2);
            for (std::size_t i = 0; i < b1.generators.rows; ++i)
                for (std::size_t j = 0; j < 2; ++j) {
                    out(2 * i, j) = b1.generators(i, j);
                    out(2 * i + 1, j) = -b1.generators(i, j);
                }
            return out;
        }(),
        2);
    double vp = exact_volume_lowdim(pv, 2);
    bool exact_ok = std::fabs(v * vp - 8.0) <= 1e-12;

    bool band_ok = true;
    double worst = 1.0;
    for (std::uint64_t s = 0; s < 3; ++s) {
        SampleSet set = sample(DistributionSpec::make(Family::gaussian, 3), 30, {110 + s, 0});
        PolarVolumeReport rep = polar_volume_check(set, 200000, {120 + s, 0});
        double ratio = rep.product / rep.omega_n_sq;
        worst = std::min(worst, ratio);
        if (ratio < 0.1 || ratio > 1.0) band_ok = false;
    }
    record(5, "polar-volume band", exact_ok && band_ok,
           "product=" + g17(v * vp) + " min_ratio_n3=" + g17(worst));
}

// 6. Mixing witnesses: margins 1/2 and 1 exactly, shift-invariant margins.
void criterion_06() {
    bool pass = true;
    double worst_half = 0.0, worst_one = 0.0, worst_shift = 0.0;
    for (std::size_t i = 0; i < 100; ++i) {
        Rng rng(130 + i, 0);
        std::size_t n = 4 + rng.below(13);  // 4..16
        std::size_t s = 1 + rng.below(n / 2);
        Mat g(s, n);
        for (auto& v : g.a) v = rng.gaussian();
        Mat basis = orthonormal_rows(g);
        if (basis.rows < s) continue;
        Mat pm(n, n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                double acc = 0;
                for (std::size_t l = 0; l < s; ++l) acc += basis(l, r) * basis(l, c);
                pm(r, c) = acc;
            }
        LinearMap p = make_linear_map(pm);
        Subspace w = projection_mixing_witness(p);
        double margin = mixing_check(p, w, 0.0).achieved_margin;
        worst_half = std::max(worst_half, std::fabs(margin - 0.5));
        if (std::fabs(margin - 0.5) > 1e-8) pass = false;
        MixingReport two = two_p_mixing_test(p);
        worst_one = std::max(worst_one, std::fabs(two.achieved_margin - 1.0));
        if (std::fabs(two.achieved_margin - 1.0) > 1e-8) pass = false;

        Mat twice = pm;
        for (auto& v : twice.a) v *= 2.0;
        double base = mixing_check(make_linear_map(twice), w, 0.0).achieved_margin;
        for (double lam : {-3.0, 1.0, 10.0}) {
            Mat shifted = twice;
            for (std::size_t d = 0; d < n; ++d) shifted(d, d) += lam;
            double sm = mixing_check(make_linear_map(shifted), w, 0.0).achieved_margin;
            worst_shift = std::max(worst_shift, std::fabs(sm - base));
            if (std::fabs(sm - base) > 1e-10) pass = false;
        }
    }
    record(6, "mixing witnesses", pass,
           "dev_half=" + g17(worst_half) + " dev_one=" + g17(worst_one) +
               " dev_shift=" + g17(worst_shift));
}

// 7. Certified BM coupling on 100 Gluskin pairs plus the known (B_1^2, square).
void criterion_07() {
    GluskinConfig cfg;
    cfg.model = GluskinConfig::Model::pure;
    cfg.n = 2;
    cfg.m = 4;
    cfg.spec = DistributionSpec::make(Family::gaussian, 2);
    cfg.trials = 100;
    cfg.seed = {42, 0};
    cfg.net_resolution = 0.01;
    cfg.certified_lower = true;
    GluskinReport rep = gluskin_pair_experiment(cfg);
    bool coupled = true;
    for (const auto& t : rep.trials)
        if (!t.discarded && t.lower > t.upper + 1e-6) coupled = false;

    BmEstimate known = bm_lower_certified(cross_polytope(2), square_2d(), 0.02, {141, 0});
    BmEstimate known_up = bm_upper_search(cross_polytope(2), square_2d(), 8, 400, {142, 0});
    bool known_ok = known.lower <= 1.0 + 1e-9 && std::fabs(known_up.upper - 1.0) <= 1e-3;

    record(7, "certified BM coupling",
           coupled && rep.median_lower >= 1.05 && known_ok,
           "median_lower=" + g17(rep.median_lower) + " known_upper=" + g17(known_up.upper));
}

// 8. Median normalized statistic non-increasing from m=4 to m=1024 at n=2.
void criterion_08() {
    GluskinConfig cfg;
    cfg.model = GluskinConfig::Model::pure;
    cfg.n = 2;
    cfg.spec = DistributionSpec::make(Family::gaussian, 2);
    cfg.trials = 12;
    cfg.seed = {43, 0};
    cfg.certified_lower = false;
    cfg.m = 4;
    GluskinReport small = gluskin_pair_experiment(cfg);
    cfg.m = 1024;
    GluskinReport large = gluskin_pair_experiment(cfg);
    record(8, "log-correction direction",
           large.median_normalized <= small.median_normalized + 1e-9,
           "normalized m=4: " + g17(small.median_normalized) +
               "  m=1024: " + g17(large.median_normalized));
}

// 9. pi_1 bracket on the gaussian n=8, m=800 fixture.
void criterion_09() {
    SampleSet set = sample(DistributionSpec::make(Family::gaussian, 8), 800, {150, 0});
    Pi1Bounds b = pi1_bounds(set, 64, 200, {151, 0});
    bool pass = b.lower <= b.upper && b.lower >= 0.5 && b.upper <= 2.0;
    record(9, "pi1 bracket", pass, "lower=" + g17(b.lower) + " upper=" + g17(b.upper));
}

// 10. Unconditional certificate: <= 1 for B_1^n, >= 0.3 on the gaussian fixture.
void criterion_10() {
    Mat e(3, 3);
    for (std::size_t i = 0; i < 3; ++i) e(i, i) = 1.0;
    SampleSet b1set;
    b1set.n = 3;
    b1set.m = 3;
    b1set.points = e;
    b1set.spec = DistributionSpec::make(Family::gaussian, 3);
    double cert_b1 = unconditional_distance_certificate(b1set, 400000, {160, 0});

    SampleSet gset = sample(DistributionSpec::make(Family::gaussian, 3), 6, {161, 0});
    double cert_g = unconditional_distance_certificate(gset, 400000, {162, 0});
    record(10, "unconditional certificate", cert_b1 <= 1.0 && cert_g >= 0.3,
           "b1=" + g17(cert_b1) + " gaussian=" + g17(cert_g));
}

// 11. Projection norm floor on the gaussian pure model n=8, m=2048.
void criterion_11() {
    SampleSet set = sample(DistributionSpec::make(Family::gaussian, 8), 2048, {5, 0});
    VPolytope body = build_pure(set);
    BasisConstantReport rep = projection_norm_scan(body, 2, 6, 500, {6, 0});

    BasisConstantReport base = projection_norm_scan(cross_polytope(8), 2, 6, 500, {6, 0});
    bool pass = rep.min_projection_norm_found >= 1.3 &&
                rep.min_projection_norm_found >= base.min_projection_norm_found;
    record(11, "projection scan floor", pass,
           "min=" + g17(rep.min_projection_norm_found) +
               " b1_min=" + g17(base.min_projection_norm_found));
}

// 12. Greedy nets of M_B never exceed the entropy bound; covering validated.
void criterion_12() {
    bool pass = true;
    std::string detail;
    for (int which = 0; which < 2; ++which) {
        VPolytope b = which == 0 ? cross_polytope(2) : square_2d();
        double vol_b = volume_exact_lowdim(b);
        OperatorBallSpec mb;
        mb.kind = BallKind::m_b;
        mb.n = 2;
        mb.body = b;
        for (double t : {0.25, 0.5, 1.0}) {
            auto net = greedy_net(mb, t, 400000, {170, 0});
            double bound = entropy_bound(t, 2, vol_b, vol_b, M_PI, 2.0);
            double cov = net_covering_fraction(net, mb, t, 1000, {171, 0});
            if (static_cast<double>(net.size()) > bound || cov < 0.99) pass = false;
            if (t == 0.25)
                detail += std::string(which == 0 ? "b1" : " square") +
                          ": size=" + std::to_string(net.size()) + " cov=" + g17(cov);
        }
    }
    record(12, "net cardinality bound", pass, detail);
}

// 13. verify --quick is byte-identical across reruns with the same seed.
void criterion_13() {
    auto dir = [](const char* tag) {
        auto p = std::filesystem::temp_directory_path() / (std::string("glab_acc_") + tag);
        std::filesystem::remove_all(p);
        std::filesystem::create_directories(p);
        return p.string();
    };
    auto slurp = [](const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    std::string a = dir("a"), b = dir("b");
    VerifySummary first = verify_suite(true, {2024, 0}, a);
    VerifySummary second = verify_suite(true, {2024, 0}, b);
    bool identical = slurp(a + "/report.json") == slurp(b + "/report.json");
    record(13, "verify determinism", first.pass && second.pass && identical,
           identical ? "byte-identical" : "reports differ");
}

}  // namespace

int main() {
    criterion_01();
    criterion_02();
    criterion_03();
    criterion_04();
    criterion_05();
    criterion_06();
    criterion_07();
    criterion_08();
    criterion_09();
    criterion_10();
    criterion_11();
    criterion_12();
    criterion_13();
    std::printf("%d/13 criteria passed\n", 13 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
