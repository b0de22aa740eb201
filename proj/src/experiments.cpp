#include "glab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "glab/bm.hpp"
#include "glab/errors.hpp"
#include "glab/estimators.hpp"
#include "glab/lowdim.hpp"
#include "glab/lp.hpp"
#include "glab/operators.hpp"
#include "glab/oracles.hpp"
#include "glab/polytope.hpp"
#include "glab/sampling.hpp"

namespace glab {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------- schema ---

enum class PKind { number, integer, string, array, boolean };

struct PSpec {
    const char* key;
    PKind kind;
};

void check_params(const json& p, std::initializer_list<PSpec> allowed) {
    if (!p.is_object()) throw InvalidInputError("parameters must be a JSON object");
    for (const auto& [key, value] : p.items()) {
        const PSpec* found = nullptr;
        for (const PSpec& s : allowed)
            if (key == s.key) {
                found = &s;
                break;
            }
        if (!found) throw InvalidInputError("unknown parameter key: " + key);
        bool ok = false;
        switch (found->kind) {
            case PKind::number: ok = value.is_number(); break;
            case PKind::integer: ok = value.is_number_integer() || value.is_number_unsigned(); break;
            case PKind::string: ok = value.is_string(); break;
            case PKind::array: ok = value.is_array(); break;
            case PKind::boolean: ok = value.is_boolean(); break;
        }
        if (!ok) throw InvalidInputError("parameter has wrong type: " + key);
    }
}

double num(const json& p, const char* key, double def) {
    return p.contains(key) ? p.at(key).get<double>() : def;
}
std::size_t inum(const json& p, const char* key, std::size_t def) {
    return p.contains(key) ? p.at(key).get<std::size_t>() : def;
}
std::string strv(const json& p, const char* key, const std::string& def) {
    return p.contains(key) ? p.at(key).get<std::string>() : def;
}
bool boolv(const json& p, const char* key, bool def) {
    return p.contains(key) ? p.at(key).get<bool>() : def;
}
std::vector<double> arr_d(const json& p, const char* key, std::vector<double> def) {
    return p.contains(key) ? p.at(key).get<std::vector<double>>() : def;
}
std::vector<std::size_t> arr_u(const json& p, const char* key, std::vector<std::size_t> def) {
    return p.contains(key) ? p.at(key).get<std::vector<std::size_t>>() : def;
}

// ------------------------------------------------------------- utilities ---

json seed_json(RngSeed s) {
    return json{{"seed", s.seed}, {"stream", s.stream_index}};
}

json report_json(const EstimateReport& r) {
    return json{{"value", r.value},   {"ci_low", r.ci_low}, {"ci_high", r.ci_high},
                {"trials", r.trials}, {"seed", seed_json(r.seed)}, {"method", r.method}};
}

/// One CSV table: versioned comment line, header, then "%.17g" rows.
class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}
    void add_row(const std::vector<double>& row) { rows_.push_back(row); }
    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw InvalidInputError("cannot write " + path);
        out << "# schema_version=1\n";
        for (std::size_t i = 0; i < columns_.size(); ++i)
            out << columns_[i] << (i + 1 < columns_.size() ? "," : "\n");
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i)
                out << fmt_g17(row[i]) << (i + 1 < row.size() ? "," : "\n");
        }
    }

  private:
    std::vector<std::string> columns_;
    std::vector<std::vector<double>> rows_;
};

DistributionSpec spec_from(const std::string& family, std::size_t n) {
    return DistributionSpec::make(family_from_name(family), n);
}

VPolytope named_body_2d(const std::string& name) {
    if (name == "b1") {
        Mat g(2, 2);
        g(0, 0) = 1.0;
        g(1, 1) = 1.0;
        return make_vpolytope(std::move(g), "b1");
    }
    if (name == "square") {
        Mat g(2, 2);
        g(0, 0) = 1.0;
        g(0, 1) = 1.0;
        g(1, 0) = 1.0;
        g(1, 1) = -1.0;
        return make_vpolytope(std::move(g), "square");
    }
    throw InvalidInputError("unknown body name: " + name + " (expected b1 or square)");
}

VPolytope cross_polytope_n(std::size_t n) {
    Mat g(n, n);
    for (std::size_t i = 0; i < n; ++i) g(i, i) = 1.0;
    return make_vpolytope(std::move(g), "b1");
}

struct HandlerResult {
    json metrics;
    bool pass = false;
    std::vector<std::pair<std::string, CsvTable>> tables;  // name -> table
};

// ------------------------------------------------------------- handlers ----

HandlerResult h_radius_band(const json& p, RngSeed seed) {
    check_params(p, {{"family", PKind::string},
                     {"n", PKind::integer},
                     {"m", PKind::integer},
                     {"eps0", PKind::number},
                     {"b", PKind::number},
                     {"max_fraction", PKind::number}});
    double eps0 = num(p, "eps0", 0.2), b = num(p, "b", 3.0);
    if (eps0 >= b) throw InvalidInputError("radius_band: eps0 must be < b");
    std::size_t n = inum(p, "n", 4), m = inum(p, "m", 10000);
    SampleSet set = sample(spec_from(strv(p, "family", "gaussian"), n), m, seed.with_stream(1));
    EstimateReport frac = radius_band_check(set, eps0, b);
    HandlerResult r;
    r.metrics = json{{"outside_fraction", report_json(frac)}};
    r.pass = frac.value <= num(p, "max_fraction", 0.05);
    CsvTable t({"eps0", "b", "outside_fraction", "ci_low", "ci_high"});
    t.add_row({eps0, b, frac.value, frac.ci_low, frac.ci_high});
    r.tables.emplace_back("radius_band", std::move(t));
    return r;
}

HandlerResult h_paouris_tail(const json& p, RngSeed seed) {
    check_params(p, {{"family", PKind::string},
                     {"n", PKind::integer},
                     {"t_values", PKind::array},
                     {"c", PKind::number},
                     {"trials", PKind::integer}});
    std::size_t n = inum(p, "n", 8);
    auto reports = paouris_tail_check(spec_from(strv(p, "family", "gaussian"), n),
                                      arr_d(p, "t_values", {2.0, 3.0, 4.0}), num(p, "c", 3.0),
                                      inum(p, "trials", 20000), seed.with_stream(1));
    HandlerResult r;
    r.pass = true;
    CsvTable t({"t", "probability", "ci_low", "ci_high", "bound", "pass"});
    json rows = json::array();
    for (const auto& rep : reports) {
        r.pass = r.pass && rep.pass;
        t.add_row({rep.t, rep.estimate.value, rep.estimate.ci_low, rep.estimate.ci_high, rep.bound,
                   rep.pass ? 1.0 : 0.0});
        rows.push_back(json{{"t", rep.t},
                            {"estimate", report_json(rep.estimate)},
                            {"bound", rep.bound},
                            {"pass", rep.pass}});
    }
    r.metrics = json{{"tail_checks", rows}};
    r.tables.emplace_back("paouris_tail", std::move(t));
    return r;
}

HandlerResult h_small_ball(const json& p, RngSeed seed) {
    check_params(p, {{"family", PKind::string},
                     {"n", PKind::integer},
                     {"eps", PKind::number},
                     {"c0", PKind::number},
                     {"trials", PKind::integer},
                     {"y", PKind::array}});
    std::size_t n = inum(p, "n", 8);
    Vec y(n, 0.0);
    if (p.contains("y")) {
        auto yv = p.at("y").get<std::vector<double>>();
        if (yv.size() != n) throw InvalidInputError("small_ball: y must have length n");
        y.assign(yv.begin(), yv.end());
    }
    SmallBallReport rep =
        small_ball_check(spec_from(strv(p, "family", "gaussian"), n), num(p, "eps", 0.1), y,
                         num(p, "c0", 0.1), inum(p, "trials", 20000), seed.with_stream(1));
    HandlerResult r;
    r.metrics = json{{"probability", report_json(rep.estimate)}, {"bound", rep.bound},
                     {"pass", rep.pass}};
    r.pass = rep.pass;
    return r;
}

HandlerResult h_zp_profile(const json& p, RngSeed seed) {
    check_params(p, {{"family", PKind::string},
                     {"n", PKind::integer},
                     {"p_values", PKind::array},
                     {"directions", PKind::integer},
                     {"trials", PKind::integer},
                     {"c", PKind::number}});
    std::size_t n = inum(p, "n", 4);
    std::vector<double> ps = arr_d(p, "p_values", {1.0, 2.0, 4.0});
    if (ps.size() < 2 || !std::is_sorted(ps.begin(), ps.end()))
        throw InvalidInputError("zp_profile: p_values must be ascending with >= 2 entries");
    DistributionSpec spec = spec_from(strv(p, "family", "gaussian"), n);
    HandlerResult r;
    r.pass = true;
    CsvTable t({"p", "q", "worst_lower_ratio", "worst_upper_ratio", "violations", "pass"});
    json rows = json::array();
    for (std::size_t i = 0; i + 1 < ps.size(); ++i) {
        ZpInclusionReport rep = zp_inclusion_check(
            spec, ps[i], ps[i + 1], inum(p, "directions", 20), inum(p, "trials", 20000),
            num(p, "c", 2.0), seed.with_stream(10 + i));
        r.pass = r.pass && rep.pass;
        t.add_row({ps[i], ps[i + 1], rep.worst_lower_ratio, rep.worst_upper_ratio,
                   static_cast<double>(rep.monotonicity_violations), rep.pass ? 1.0 : 0.0});
        rows.push_back(json{{"p", ps[i]},
                            {"q", ps[i + 1]},
                            {"worst_lower_ratio", rep.worst_lower_ratio},
                            {"worst_upper_ratio", rep.worst_upper_ratio},
                            {"pass", rep.pass}});
    }
    r.metrics = json{{"pairs", rows}};
    r.tables.emplace_back("zp_profile", std::move(t));
    return r;
}

HandlerResult h_dgt_inclusion(const json& p, RngSeed seed) {
    check_params(p, {{"family", PKind::string},
                     {"n", PKind::integer},
                     {"m", PKind::integer},
                     {"c1", PKind::number},
                     {"directions", PKind::integer}});
    std::size_t n = inum(p, "n", 4), m = inum(p, "m", 64);
    SampleSet set = sample(spec_from(strv(p, "family", "gaussian"), n), m, seed.with_stream(1));
    DgtReport rep = dgt_inclusion_check(set, num(p, "c1", 0.25), inum(p, "directions", 200),
                                        seed.with_stream(2));
    HandlerResult r;
    r.metrics = json{{"q", rep.q},
                     {"max_passing_c1", rep.max_passing_c1},
                     {"failure_fraction", rep.failure_fraction},
                     {"directions", rep.directions},
                     {"pass", rep.pass}};
    r.pass = rep.pass;
    return r;
}

HandlerResult h_volume_radius(const json& p, RngSeed seed) {
    check_params(p, {{"family", PKind::string},
                     {"n", PKind::integer},
                     {"m_list", PKind::array},
                     {"trials", PKind::integer},
                     {"band", PKind::number}});
    std::size_t n = inum(p, "n", 4);
    auto rows = volume_radius_profile(spec_from(strv(p, "family", "gaussian"), n), n,
                                      arr_u(p, "m_list", {8, 32, 128}),
                                      inum(p, "trials", 4000), seed.with_stream(1));
    HandlerResult r;
    CsvTable t({"m", "volume", "vol_ci_low", "vol_ci_high", "normalized", "normalized_lo",
                "normalized_hi"});
    double lo = rows.front().normalized, hi = rows.front().normalized;
    json jr = json::array();
    for (const auto& row : rows) {
        t.add_row({static_cast<double>(row.m), row.volume.value, row.volume.ci_low,
                   row.volume.ci_high, row.normalized, row.normalized_lo, row.normalized_hi});
        lo = std::min(lo, row.normalized);
        hi = std::max(hi, row.normalized);
        jr.push_back(json{{"m", row.m},
                          {"volume", report_json(row.volume)},
                          {"normalized", row.normalized}});
    }
    r.pass = hi <= num(p, "band", 3.0) * lo;
    r.metrics = json{{"rows", jr}, {"band_ratio", hi / lo}};
    r.tables.emplace_back("volume_radius", std::move(t));
    return r;
}

HandlerResult h_polar_volume(const json& p, RngSeed seed) {
    check_params(p, {{"family", PKind::string},
                     {"n", PKind::integer},
                     {"m", PKind::integer},
                     {"trials", PKind::integer},
                     {"c", PKind::number}});
    std::size_t n = inum(p, "n", 3), m = inum(p, "m", 30);
    SampleSet set = sample(spec_from(strv(p, "family", "gaussian"), n), m, seed.with_stream(1));
    PolarVolumeReport rep =
        polar_volume_check(set, inum(p, "trials", 100000), seed.with_stream(2), num(p, "c", 0.5));
    HandlerResult r;
    r.metrics = json{{"vol_body", report_json(rep.vol_body)},
                     {"vol_polar", report_json(rep.vol_polar)},
                     {"product", rep.product},
                     {"omega_n_sq", rep.omega_n_sq},
                     {"ratio", rep.product / rep.omega_n_sq},
                     {"pass", rep.pass}};
    r.pass = rep.pass;
    return r;
}

HandlerResult h_concentration(const json& p, RngSeed seed) {
    check_params(p, {{"family", PKind::string},
                     {"n", PKind::integer},
                     {"m", PKind::integer},
                     {"restarts", PKind::integer},
                     {"steps", PKind::integer}});
    std::size_t n = inum(p, "n", 8), m = inum(p, "m", 800);
    SampleSet set = sample(spec_from(strv(p, "family", "gaussian"), n), m, seed.with_stream(1));
    ConcentrationReport rep = concentration_constants(set, inum(p, "restarts", 64),
                                                      inum(p, "steps", 200), seed.with_stream(2));
    HandlerResult r;
    r.metrics = json{{"c1_hat", rep.c1_hat}, {"c2_hat", rep.c2_hat},
                     {"directions", rep.directions}};
    r.pass = rep.c1_hat > 0.0 && rep.c1_hat <= rep.c2_hat;
    return r;
}

HandlerResult h_pi1(const json& p, RngSeed seed) {
    check_params(p, {{"family", PKind::string},
                     {"n", PKind::integer},
                     {"m", PKind::integer},
                     {"restarts", PKind::integer},
                     {"steps", PKind::integer},
                     {"band_lo", PKind::number},
                     {"band_hi", PKind::number}});
    std::size_t n = inum(p, "n", 8), m = inum(p, "m", 800);
    SampleSet set = sample(spec_from(strv(p, "family", "gaussian"), n), m, seed.with_stream(1));
    Pi1Bounds b = pi1_bounds(set, inum(p, "restarts", 64), inum(p, "steps", 200),
                             seed.with_stream(2));
    double lo = num(p, "band_lo", 0.5), hi = num(p, "band_hi", 2.0);
    HandlerResult r;
    r.metrics = json{{"lower", b.lower}, {"upper", b.upper}};
    r.pass = b.lower <= b.upper && b.lower >= lo && b.upper <= hi;
    return r;
}

HandlerResult h_unconditional_certificate(const json& p, RngSeed seed) {
    check_params(p, {{"family", PKind::string},
                     {"n", PKind::integer},
                     {"m", PKind::integer},
                     {"trials", PKind::integer},
                     {"min_certificate", PKind::number}});
    std::size_t n = inum(p, "n", 3), m = inum(p, "m", 6);
    SampleSet set = sample(spec_from(strv(p, "family", "gaussian"), n), m, seed.with_stream(1));
    double cert =
        unconditional_distance_certificate(set, inum(p, "trials", 100000), seed.with_stream(2));
    HandlerResult r;
    r.metrics = json{{"certificate", cert}};
    r.pass = std::isfinite(cert) && cert >= num(p, "min_certificate", 0.0);
    return r;
}

GluskinConfig gluskin_config_from(const json& p, RngSeed seed) {
    GluskinConfig cfg;
    std::string model = strv(p, "model", "pure");
    if (model == "pure")
        cfg.model = GluskinConfig::Model::pure;
    else if (model == "basis_enriched")
        cfg.model = GluskinConfig::Model::basis_enriched;
    else
        throw InvalidInputError("model must be pure or basis_enriched");
    cfg.n = inum(p, "n", 2);
    cfg.m = inum(p, "m", 4);
    cfg.spec = spec_from(strv(p, "family", "gaussian"), cfg.n);
    cfg.gamma = num(p, "gamma", 0.3);
    cfg.k = inum(p, "k", cfg.n / 2);
    cfg.trials = inum(p, "trials", 20);
    cfg.seed = seed;
    cfg.restarts = inum(p, "restarts", 6);
    cfg.steps = inum(p, "steps", 150);
    cfg.net_resolution = num(p, "net_resolution", 0.02);
    cfg.certified_lower = boolv(p, "certified_lower", cfg.n == 2);
    cfg.force_identical = boolv(p, "force_identical", false);
    return cfg;
}

constexpr std::initializer_list<PSpec> kGluskinParams = {
    {"model", PKind::string},       {"family", PKind::string},
    {"n", PKind::integer},          {"m", PKind::integer},
    {"gamma", PKind::number},       {"k", PKind::integer},
    {"trials", PKind::integer},     {"restarts", PKind::integer},
    {"steps", PKind::integer},      {"net_resolution", PKind::number},
    {"certified_lower", PKind::boolean}, {"force_identical", PKind::boolean},
    {"min_median_lower", PKind::number}, {"operators", PKind::integer},
    {"max_fraction", PKind::number}};

HandlerResult h_gluskin_pair(const json& p, RngSeed seed) {
    check_params(p, kGluskinParams);
    GluskinConfig cfg = gluskin_config_from(p, seed);
    GluskinReport rep = gluskin_pair_experiment(cfg);
    HandlerResult r;
    CsvTable t({"trial", "lower", "upper", "normalized_statistic", "discarded_flag"});
    bool coupled = true;
    for (std::size_t i = 0; i < rep.trials.size(); ++i) {
        const GluskinTrial& tr = rep.trials[i];
        t.add_row({static_cast<double>(i), tr.lower, tr.upper, tr.normalized,
                   tr.discarded ? 1.0 : 0.0});
        if (!tr.discarded && tr.lower > tr.upper + 1e-6) coupled = false;
    }
    r.metrics = json{{"median_lower", rep.median_lower},
                     {"median_upper", rep.median_upper},
                     {"median_normalized", rep.median_normalized},
                     {"discarded", rep.discarded},
                     {"coupling_ok", coupled}};
    r.pass = coupled && rep.median_lower >= num(p, "min_median_lower", 1.0);
    r.tables.emplace_back("gluskin_pair", std::move(t));
    return r;
}

HandlerResult h_sk_criterion(const json& p, RngSeed seed) {
    check_params(p, kGluskinParams);
    GluskinConfig cfg = gluskin_config_from(p, seed);
    std::size_t count = inum(p, "operators", 200);
    std::vector<LinearMap> ops;
    ops.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng(seed.with_stream(5000 + i));
        Mat m(cfg.n, cfg.n);
        for (auto& v : m.a) v = rng.gaussian();
        ops.push_back(make_linear_map(std::move(m)));
    }
    SkReport rep = sk_criterion_scan(cfg, ops);
    HandlerResult r;
    r.metrics = json{{"gamma", rep.gamma},
                     {"threshold", rep.threshold},
                     {"violations", rep.violations},
                     {"operators", rep.operators},
                     {"fraction", rep.fraction}};
    r.pass = rep.fraction <= num(p, "max_fraction", 0.05);
    return r;
}

HandlerResult h_projection_scan(const json& p, RngSeed seed) {
    check_params(p, {{"family", PKind::string},
                     {"n", PKind::integer},
                     {"m", PKind::integer},
                     {"rank_lo", PKind::integer},
                     {"rank_hi", PKind::integer},
                     {"trials", PKind::integer},
                     {"min_norm", PKind::number}});
    std::size_t n = inum(p, "n", 8), m = inum(p, "m", 0);
    VPolytope b;
    if (m == 0) {
        b = cross_polytope_n(n);
    } else {
        SampleSet set = sample(spec_from(strv(p, "family", "gaussian"), n), m,
                               seed.with_stream(1));
        b = build_pure(set);
    }
    BasisConstantReport rep =
        projection_norm_scan(b, inum(p, "rank_lo", n / 4), inum(p, "rank_hi", (3 * n) / 4),
                             inum(p, "trials", 100), seed.with_stream(2));
    HandlerResult r;
    r.metrics = json{{"min_projection_norm_found", rep.min_projection_norm_found},
                     {"trials", rep.trials}};
    r.pass = rep.min_projection_norm_found >= num(p, "min_norm", 1.0 - 1e-8);
    CsvTable t({"trial", "rank"});
    for (std::size_t i = 0; i < rep.ranks_scanned.size(); ++i)
        t.add_row({static_cast<double>(i), static_cast<double>(rep.ranks_scanned[i])});
    r.tables.emplace_back("projection_scan", std::move(t));
    return r;
}

HandlerResult h_mixing_scan(const json& p, RngSeed seed) {
    check_params(p, {{"family", PKind::string},
                     {"n", PKind::integer},
                     {"m", PKind::integer},
                     {"rank", PKind::integer},
                     {"lambdas", PKind::array},
                     {"gamma", PKind::number}});
    std::size_t n = inum(p, "n", 4), m = inum(p, "m", 0);
    std::size_t rank = inum(p, "rank", n / 2);
    if (rank < 1 || rank > n / 2) throw InvalidInputError("mixing_scan: rank in [1, n/2]");
    VPolytope b = m == 0 ? cross_polytope_n(n)
                         : build_pure(sample(spec_from(strv(p, "family", "gaussian"), n), m,
                                             seed.with_stream(1)));
    Mat pm(n, n);
    for (std::size_t i = 0; i < rank; ++i) pm(i, i) = 1.0;
    LinearMap proj = make_linear_map(pm);
    Subspace e = projection_mixing_witness(proj);
    Mat twice = pm;
    for (auto& v : twice.a) v *= 2.0;
    std::vector<LinearMap> family;
    std::vector<double> lambdas = arr_d(p, "lambdas", {-3.0, 1.0, 10.0});
    family.push_back(make_linear_map(twice));
    for (double lam : lambdas) {
        Mat shifted = twice;
        for (std::size_t i = 0; i < n; ++i) shifted(i, i) += lam;
        family.push_back(make_linear_map(shifted));
    }
    MixingScanReport rep = mixing_norm_scan(b, family, e, num(p, "gamma", 0.5));
    HandlerResult r;
    bool margins_equal = true;
    CsvTable t({"lambda", "norm", "margin"});
    for (std::size_t i = 0; i < rep.norms.size(); ++i) {
        double lam = i == 0 ? 0.0 : lambdas[i - 1];
        t.add_row({lam, rep.norms[i], rep.margins[i]});
        if (std::fabs(rep.margins[i] - rep.margins[0]) > 1e-8) margins_equal = false;
    }
    r.metrics = json{{"min_norm", rep.min_norm},
                     {"gamma_sqrt_n", rep.gamma_sqrt_n},
                     {"margins_equal", margins_equal}};
    r.pass = margins_equal;
    r.tables.emplace_back("mixing_scan", std::move(t));
    return r;
}

HandlerResult h_net_entropy(const json& p, RngSeed seed) {
    check_params(p, {{"body", PKind::string},
                     {"t_values", PKind::array},
                     {"budget", PKind::integer},
                     {"holdout", PKind::integer},
                     {"c0", PKind::number},
                     {"min_covering", PKind::number}});
    VPolytope b = named_body_2d(strv(p, "body", "b1"));
    double vol_b = volume_exact_lowdim(b);
    OperatorBallSpec mb;
    mb.kind = BallKind::m_b;
    mb.n = 2;
    mb.body = b;
    HandlerResult r;
    r.pass = true;
    CsvTable t({"t", "net_size", "entropy_bound", "covering_fraction", "pass"});
    json rows = json::array();
    double c0 = num(p, "c0", 8.154845485377136);
    double min_cov = num(p, "min_covering", 0.99);
    for (double tv : arr_d(p, "t_values", {0.5, 1.0})) {
        auto net = greedy_net(mb, tv, inum(p, "budget", 30000), seed.with_stream(3));
        double bound = entropy_bound(tv, 2, vol_b, vol_b, M_PI, 2.0, c0);
        double cov = net_covering_fraction(net, mb, tv, inum(p, "holdout", 1000),
                                           seed.with_stream(4));
        bool ok = static_cast<double>(net.size()) <= bound && cov >= min_cov;
        r.pass = r.pass && ok;
        t.add_row({tv, static_cast<double>(net.size()), bound, cov, ok ? 1.0 : 0.0});
        rows.push_back(json{{"t", tv},
                            {"net_size", net.size()},
                            {"entropy_bound", bound},
                            {"covering_fraction", cov},
                            {"pass", ok}});
    }
    r.metrics = json{{"nets", rows}};
    r.tables.emplace_back("net_entropy", std::move(t));
    return r;
}

HandlerResult h_operator_ball_volume(const json& p, RngSeed seed) {
    check_params(p, {{"body", PKind::string},
                     {"trials", PKind::integer},
                     {"rel_tol", PKind::number}});
    VPolytope b = named_body_2d(strv(p, "body", "b1"));
    double vol_b = volume_exact_lowdim(b);
    EstimateReport rep =
        operator_ball_volume_check(b, inum(p, "trials", 1000000), seed.with_stream(1));
    HandlerResult r;
    double target = vol_b * vol_b;
    r.metrics = json{{"volume", report_json(rep)}, {"target", target},
                     {"relative_error", std::fabs(rep.value - target) / target}};
    r.pass = std::fabs(rep.value - target) / target <= num(p, "rel_tol", 0.05);
    return r;
}

using Handler = HandlerResult (*)(const json&, RngSeed);

const std::vector<std::pair<std::string, Handler>>& handler_table() {
    static const std::vector<std::pair<std::string, Handler>> table = {
        {"radius_band", h_radius_band},
        {"paouris_tail", h_paouris_tail},
        {"small_ball", h_small_ball},
        {"zp_profile", h_zp_profile},
        {"dgt_inclusion", h_dgt_inclusion},
        {"volume_radius", h_volume_radius},
        {"polar_volume", h_polar_volume},
        {"concentration", h_concentration},
        {"pi1", h_pi1},
        {"unconditional_certificate", h_unconditional_certificate},
        {"gluskin_pair", h_gluskin_pair},
        {"sk_criterion", h_sk_criterion},
        {"projection_scan", h_projection_scan},
        {"mixing_scan", h_mixing_scan},
        {"net_entropy", h_net_entropy},
        {"operator_ball_volume", h_operator_ball_volume},
    };
    return table;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [name, fn] : handler_table()) v.push_back(name);
        return v;
    }();
    return names;
}

ExperimentConfig parse_experiment_config(const json& j) {
    if (!j.is_object()) throw InvalidInputError("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key != "experiment" && key != "parameters" && key != "seed" && key != "output_dir")
            throw InvalidInputError("unknown config key: " + key);
    }
    ExperimentConfig cfg;
    if (!j.contains("experiment") || !j.at("experiment").is_string())
        throw InvalidInputError("config requires a string 'experiment' field");
    cfg.experiment = j.at("experiment").get<std::string>();
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), cfg.experiment) == names.end())
        throw InvalidInputError("unknown experiment: " + cfg.experiment);
    if (j.contains("parameters")) {
        if (!j.at("parameters").is_object())
            throw InvalidInputError("'parameters' must be an object");
        cfg.parameters = j.at("parameters");
    }
    if (j.contains("seed")) {
        const json& s = j.at("seed");
        if (s.is_number_integer() || s.is_number_unsigned()) {
            cfg.seed = {s.get<std::uint64_t>(), 0};
        } else if (s.is_object()) {
            for (const auto& [key, value] : s.items()) {
                (void)value;
                if (key != "seed" && key != "stream")
                    throw InvalidInputError("unknown seed key: " + key);
            }
            cfg.seed = {s.value("seed", std::uint64_t{0}), s.value("stream", std::uint64_t{0})};
        } else {
            throw InvalidInputError("'seed' must be an integer or {seed, stream}");
        }
    }
    if (j.contains("output_dir")) {
        if (!j.at("output_dir").is_string())
            throw InvalidInputError("'output_dir' must be a string");
        cfg.output_dir = j.at("output_dir").get<std::string>();
    }
    return cfg;
}

RunReport run_experiment(const ExperimentConfig& config) {
    Handler handler = nullptr;
    for (const auto& [name, fn] : handler_table())
        if (name == config.experiment) handler = fn;
    if (!handler) throw InvalidInputError("unknown experiment: " + config.experiment);

    auto t0 = std::chrono::steady_clock::now();
    HandlerResult res = handler(config.parameters, config.seed);
    auto t1 = std::chrono::steady_clock::now();

    std::filesystem::create_directories(config.output_dir);
    RunReport out;
    out.pass = res.pass;
    out.wall_time_seconds = std::chrono::duration<double>(t1 - t0).count();
    for (auto& [name, table] : res.tables) {
        std::string path = config.output_dir + "/" + name + ".csv";
        table.write(path);
        out.artifacts.push_back(name + ".csv");
    }
    out.artifacts.push_back("report.json");
    out.report = json{{"schema_version", 1},
                      {"experiment", config.experiment},
                      {"parameters", config.parameters},
                      {"seed", seed_json(config.seed)},
                      {"metrics", res.metrics},
                      {"pass", res.pass},
                      {"artifacts", out.artifacts}};
    std::ofstream f(config.output_dir + "/report.json", std::ios::binary);
    if (!f) throw InvalidInputError("cannot write report.json under " + config.output_dir);
    f << out.report.dump(2) << "\n";
    return out;
}

// ----------------------------------------------------------- verify suite --

namespace {

VPolytope random_vpolytope(std::size_t n, std::size_t k, Rng& rng) {
    Mat g(k, n);
    for (auto& v : g.a) v = rng.uniform(-1, 1);
    for (std::size_t i = 0; i < n; ++i) g(i, i) += 0.6;
    return make_vpolytope(std::move(g));
}

VPolytope random_polygon_seeded(std::uint64_t seed) {
    Rng rng(seed, 0);
    Mat g(5, 2);
    for (auto& v : g.a) v = rng.uniform(-1, 1);
    for (std::size_t i = 0; i < 2; ++i) g(i, i) += 0.6;
    return make_vpolytope(std::move(g));
}

}  // namespace

VerifySummary verify_suite(bool quick, RngSeed seed, const std::string& output_dir) {
    // fault-injection hook: tamper with the LP pivot tolerance if requested
    if (const char* fault = std::getenv("GLAB_FAULT_LP_PIVOT_TOL")) {
        double tol = std::atof(fault);
        if (tol > 0) set_lp_pivot_tolerance_for_tests(tol);
    }

    VerifySummary sum;
    sum.quick = quick;
    auto add = [&](const std::string& name, bool pass, const std::string& detail) {
        sum.checks.push_back({name, pass, detail});
    };

    // 1. norm-oracle equivalence (LP norms vs sphere-boundary oracle)
    try {
        std::size_t instances = quick ? 12 : 200;
        std::size_t dirs = quick ? 20000 : 1000000;
        double rel = quick ? 0.97 : 0.99;
        bool pass = true;
        double worst = 1.0;
        for (std::size_t i = 0; i < instances; ++i) {
            Rng rng(seed.seed + 31 * i, 7);
            std::size_t n = 2 + i % 2;
            VPolytope a = random_vpolytope(n, n + 3, rng);
            VPolytope b = random_vpolytope(n, n + 3, rng);
            Mat tm(n, n);
            for (auto& v : tm.a) v = rng.gaussian();
            LinearMap t = make_linear_map(std::move(tm));
            double exact = op_norm_polytopes(t, a, b);
            double oracle = opnorm_sphere_oracle(t, a, b, dirs, {seed.seed + i, 11}).value;
            if (oracle > exact + 1e-9) pass = false;
            worst = std::min(worst, oracle / exact);
            if (oracle < rel * exact) pass = false;
        }
        add("norm_oracle_equivalence", pass, "worst_ratio=" + fmt_g17(worst));
    } catch (const std::exception& e) {
        add("norm_oracle_equivalence", false, std::string("exception: ") + e.what());
    }

    // 2. gaussian Z_p calibration against the closed-form moment oracle
    try {
        std::size_t trials = quick ? 20000 : 100000;
        bool pass = true;
        double worst = 0.0;
        DistributionSpec spec = DistributionSpec::make(Family::gaussian, 4);
        Rng rng(seed.seed, 13);
        for (double pval : {1.0, 2.0, 4.0}) {
            double oracle = gaussian_moment_oracle(pval);
            for (int d = 0; d < 5; ++d) {
                Vec y = sphere_direction(rng, 4);
                EstimateReport est =
                    zp_support_estimate(spec, y, pval, trials, {seed.seed + d, 17});
                double err = std::fabs(est.value - oracle) / oracle;
                worst = std::max(worst, err);
                if (err > (quick ? 0.03 : 0.02)) pass = false;
            }
        }
        add("zp_gaussian_calibration", pass, "worst_rel_err=" + fmt_g17(worst));
    } catch (const std::exception& e) {
        add("zp_gaussian_calibration", false, std::string("exception: ") + e.what());
    }

    // 3. volume MC vs exact low-dimensional volumes
    try {
        std::size_t bodies = quick ? 10 : 50;
        bool pass = true;
        for (std::size_t i = 0; i < bodies; ++i) {
            Rng rng(seed.seed + 1000 + i, 19);
            std::size_t n = 2 + i % 2;
            VPolytope b = random_vpolytope(n, n + 3, rng);
            double exact = volume_exact_lowdim(b);
            double rad = 0.0;
            for (std::size_t r = 0; r < b.generators.rows; ++r) {
                double s = 0;
                for (std::size_t c = 0; c < n; ++c) s += b.generators(r, c) * b.generators(r, c);
                rad = std::max(rad, std::sqrt(s));
            }
            EstimateReport mc =
                volume_mc(b, rad, quick ? 20000 : 100000, {seed.seed + 2000 + i, 23});
            double slack = 0.7 * (mc.ci_high - mc.ci_low);
            if (exact < mc.ci_low - slack || exact > mc.ci_high + slack) pass = false;
        }
        add("volume_mc_vs_exact", pass, "bodies=" + std::to_string(bodies));
    } catch (const std::exception& e) {
        add("volume_mc_vs_exact", false, std::string("exception: ") + e.what());
    }

    // 4. mixing witnesses: projection margin 1/2, doubled-projection margin 1
    try {
        std::size_t count = quick ? 10 : 100;
        bool pass = true;
        for (std::size_t i = 0; i < count; ++i) {
            Rng rng(seed.seed + 3000 + i, 29);
            std::size_t n = 4 + 2 * (i % 3);
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
            LinearMap proj = make_linear_map(pm);
            Subspace w = projection_mixing_witness(proj);
            double margin = mixing_check(proj, w, 0.0).achieved_margin;
            if (std::fabs(margin - 0.5) > 1e-8) pass = false;
            MixingReport two = two_p_mixing_test(proj);
            if (std::fabs(two.achieved_margin - 1.0) > 1e-8) pass = false;
        }
        add("mixing_witnesses", pass, "projections=" + std::to_string(count));
    } catch (const std::exception& e) {
        add("mixing_witnesses", false, std::string("exception: ") + e.what());
    }

    // 5. sampler isotropy for all built-in families
    try {
        std::size_t m = quick ? 20000 : 100000;
        bool pass = true;
        double worst = 0.0;
        for (Family f : {Family::gaussian, Family::cube_uniform, Family::product_exponential,
                         Family::ball_uniform}) {
            for (std::size_t n : {2, 4}) {
                SampleSet set = sample(DistributionSpec::make(f, n), m, {seed.seed + n, 31});
                IsotropyReport rep = isotropy_report(set);
                double lim = 10.0 / std::sqrt(static_cast<double>(m));
                worst = std::max(worst, rep.covariance_operator_distance / lim);
                if (rep.empirical_mean_norm > 5.0 / std::sqrt(static_cast<double>(m)) *
                                                  std::sqrt(static_cast<double>(n)) ||
                    rep.covariance_operator_distance > lim)
                    pass = false;
            }
        }
        add("sampler_isotropy", pass, "worst_cov_ratio=" + fmt_g17(worst));
    } catch (const std::exception& e) {
        add("sampler_isotropy", false, std::string("exception: ") + e.what());
    }

    // 6. polar volume product band on the exact pair (B_1^2, square)
    try {
        Mat pts(2, 2);
        pts(0, 0) = 1.0;
        pts(1, 1) = 1.0;
        SampleSet s;
        s.n = 2;
        s.m = 2;
        s.points = pts;
        s.spec = DistributionSpec::make(Family::gaussian, 2);
        PolarVolumeReport rep =
            polar_volume_check(s, quick ? 50000 : 200000, {seed.seed, 37});
        bool pass = rep.pass && std::fabs(rep.product - 8.0) < 0.06 * 8.0;
        add("polar_volume_band", pass, "product=" + fmt_g17(rep.product));
    } catch (const std::exception& e) {
        add("polar_volume_band", false, std::string("exception: ") + e.what());
    }

    // 7. certified BM coupling on random polygon pairs
    try {
        std::size_t pairs = quick ? 3 : 10;
        bool pass = true;
        for (std::size_t i = 0; i < pairs; ++i) {
            VPolytope x = random_polygon_seeded(seed.seed + 400 + i);
            VPolytope y = random_polygon_seeded(seed.seed + 500 + i);
            BmEstimate est = bm_lower_certified(x, y, 0.05, {seed.seed + 600 + i, 41});
            if (est.lower > est.upper + 1e-6 || est.lower < 1.0) pass = false;
        }
        add("bm_coupling", pass, "pairs=" + std::to_string(pairs));
    } catch (const std::exception& e) {
        add("bm_coupling", false, std::string("exception: ") + e.what());
    }

    // 8. operator net cardinality vs entropy bound, with covering validation
    try {
        VPolytope sq = named_body_2d("square");
        OperatorBallSpec mb;
        mb.kind = BallKind::m_b;
        mb.n = 2;
        mb.body = sq;
        double vol_b = volume_exact_lowdim(sq);
        bool pass = true;
        for (double t : {0.5, 1.0}) {
            auto net = greedy_net(mb, t, quick ? 30000 : 100000, {seed.seed, 43});
            double bound = entropy_bound(t, 2, vol_b, vol_b, M_PI, 2.0);
            double cov = net_covering_fraction(net, mb, t, 1000, {seed.seed, 47});
            if (static_cast<double>(net.size()) > bound || cov < 0.99) pass = false;
        }
        add("net_entropy_bound", pass, "body=square");
    } catch (const std::exception& e) {
        add("net_entropy_bound", false, std::string("exception: ") + e.what());
    }

    // 9. bit-exact determinism of the samplers and estimators
    try {
        SampleSet a = sample(DistributionSpec::make(Family::gaussian, 4), 64, {seed.seed, 53});
        SampleSet b = sample(DistributionSpec::make(Family::gaussian, 4), 64, {seed.seed, 53});
        bool pass = a.points.a == b.points.a;
        VPolytope body = build_pure(a);
        double rad = 0.0;
        for (std::size_t r = 0; r < body.generators.rows; ++r) {
            double s2 = 0;
            for (std::size_t c = 0; c < 4; ++c) s2 += body.generators(r, c) * body.generators(r, c);
            rad = std::max(rad, std::sqrt(s2));
        }
        EstimateReport v1 = volume_mc(body, rad, 5000, {seed.seed, 59});
        EstimateReport v2 = volume_mc(body, rad, 5000, {seed.seed, 59});
        if (v1.value != v2.value || v1.ci_low != v2.ci_low) pass = false;
        add("determinism", pass, "");
    } catch (const std::exception& e) {
        add("determinism", false, std::string("exception: ") + e.what());
    }

    set_lp_pivot_tolerance_for_tests(0.0);  // restore the default

    sum.pass = true;
    json checks = json::array();
    for (const auto& c : sum.checks) {
        sum.pass = sum.pass && c.pass;
        checks.push_back(json{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
    sum.report = json{{"schema_version", 1},
                      {"level", quick ? "quick" : "full"},
                      {"seed", seed_json(seed)},
                      {"checks", checks},
                      {"pass", sum.pass}};
    std::filesystem::create_directories(output_dir);
    std::ofstream f(output_dir + "/report.json", std::ios::binary);
    if (!f) throw InvalidInputError("cannot write report.json under " + output_dir);
    f << sum.report.dump(2) << "\n";
    return sum;
}

}  // namespace glab
