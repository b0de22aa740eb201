// glab: command-line front end for the numerical laboratory.
//
// Exit codes: 0 success (all bands pass), 1 a check or band failed,
// 2 usage / validation error, 3 numerical failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "glab/bm.hpp"
#include "glab/errors.hpp"
#include "glab/estimators.hpp"
#include "glab/experiments.hpp"
#include "glab/operators.hpp"
#include "glab/polytope.hpp"
#include "glab/sampling.hpp"

using namespace glab;
using nlohmann::json;

namespace {

RngSeed default_seed() {
    if (const char* env = std::getenv("GLAB_SEED")) {
        return {std::strtoull(env, nullptr, 10), 0};
    }
    return {2024, 0};
}

Vec parse_vector(const std::string& s) {
    Vec out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    if (out.empty()) throw InvalidInputError("empty vector literal");
    return out;
}

Mat parse_matrix(const std::string& s, std::size_t n) {
    // row-major, rows separated by ';', entries by ','
    std::vector<Vec> rows;
    std::stringstream ss(s);
    std::string row;
    while (std::getline(ss, row, ';')) rows.push_back(parse_vector(row));
    if (rows.size() != n) throw InvalidInputError("matrix must be square of dimension n");
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) throw InvalidInputError("matrix row has wrong length");
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"glab: random normed spaces laboratory"};
    app.require_subcommand(1);
    app.fallthrough();  // let --seed/--out/--workers appear after the subcommand

    std::uint64_t seed_opt = default_seed().seed;
    std::string out_dir = ".";
    std::size_t workers = 1;  // accepted for interface stability; results never depend on it
    app.add_option("--seed", seed_opt, "RNG seed (default: GLAB_SEED env or 2024)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--workers", workers, "worker threads (does not affect results)");

    // sample
    auto* c_sample = app.add_subcommand("sample", "draw an isotropic log-concave sample");
    std::string family = "gaussian";
    std::size_t n = 4, m = 64;
    c_sample->add_option("--family", family, "gaussian|cube_uniform|product_exponential|ball_uniform");
    c_sample->add_option("-n,--dim", n, "ambient dimension");
    c_sample->add_option("-m,--count", m, "number of points");

    // build
    auto* c_build = app.add_subcommand("build", "build a random polytope from a sample");
    std::string model = "pure";
    c_build->add_option("--model", model, "pure|basis_enriched");
    c_build->add_option("--family", family);
    c_build->add_option("-n,--dim", n);
    c_build->add_option("-m,--count", m);

    // norm
    auto* c_norm = app.add_subcommand("norm", "Minkowski norm of a point in a stored body");
    std::string body_path, point_str;
    c_norm->add_option("--body", body_path, "body CSV path")->required();
    c_norm->add_option("--point", point_str, "comma-separated coordinates")->required();

    // opnorm
    auto* c_opnorm = app.add_subcommand("opnorm", "operator norm between stored bodies");
    std::string dom_path, cod_path, matrix_str;
    c_opnorm->add_option("--domain", dom_path, "domain body CSV")->required();
    c_opnorm->add_option("--codomain", cod_path, "codomain body CSV")->required();
    c_opnorm->add_option("--matrix", matrix_str, "rows 'a,b;c,d'")->required();

    // volume
    auto* c_volume = app.add_subcommand("volume", "Monte Carlo volume of a stored body");
    std::size_t trials = 100000;
    c_volume->add_option("--body", body_path, "body CSV path")->required();
    c_volume->add_option("--trials", trials, "Monte Carlo trials");

    // bm
    auto* c_bm = app.add_subcommand("bm", "Banach-Mazur distance estimate between stored bodies");
    std::string x_path, y_path;
    double net_resolution = 0.05;
    bool certified = false;
    c_bm->add_option("--x", x_path, "first body CSV")->required();
    c_bm->add_option("--y", y_path, "second body CSV")->required();
    c_bm->add_flag("--certified", certified, "also compute a certified lower bound (n = 2)");
    c_bm->add_option("--net-resolution", net_resolution, "certification net resolution");

    // experiment run <config.json>
    auto* c_exp = app.add_subcommand("experiment", "run a configured experiment");
    auto* c_exp_run = c_exp->add_subcommand("run", "run from a JSON config file");
    std::string config_path;
    c_exp_run->add_option("config", config_path, "config JSON path")->required();
    auto* c_exp_list = c_exp->add_subcommand("list", "list experiment names");
    c_exp->require_subcommand(1);

    // verify
    auto* c_verify = app.add_subcommand("verify", "run the cross-module invariant battery");
    bool quick = false, full = false;
    c_verify->add_flag("--quick", quick, "reduced trial counts");
    c_verify->add_flag("--full", full, "full trial counts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const RngSeed seed{seed_opt, 0};
    try {
        if (*c_sample) {
            SampleSet set = sample(DistributionSpec::make(family_from_name(family), n), m, seed);
            std::string path = out_dir + "/samples.csv";
            write_samples_csv(set, path);
            IsotropyReport iso = isotropy_report(set);
            std::cout << "wrote " << path << "  mean_norm=" << fmt_g17(iso.empirical_mean_norm)
                      << "  cov_dist=" << fmt_g17(iso.covariance_operator_distance) << "\n";
        } else if (*c_build) {
            SampleSet set = sample(DistributionSpec::make(family_from_name(family), n), m, seed);
            VPolytope b = model == "basis_enriched" ? build_basis_enriched(set)
                          : model == "pure"         ? build_pure(set)
                                            : throw InvalidInputError("unknown model: " + model);
            std::string path = out_dir + "/body.csv";
            write_vpolytope_csv(b, path);
            std::cout << "wrote " << path << "  generators=" << b.generators.rows << "\n";
        } else if (*c_norm) {
            VPolytope b = read_vpolytope_csv(body_path);
            double v = minkowski_norm(b, parse_vector(point_str));
            std::cout << fmt_g17(v) << "\n";
        } else if (*c_opnorm) {
            VPolytope a = read_vpolytope_csv(dom_path);
            VPolytope b = read_vpolytope_csv(cod_path);
            LinearMap t = make_linear_map(parse_matrix(matrix_str, a.n));
            std::cout << fmt_g17(op_norm_polytopes(t, a, b)) << "\n";
        } else if (*c_volume) {
            VPolytope b = read_vpolytope_csv(body_path);
            double rad = 0.0;
            for (std::size_t i = 0; i < b.generators.rows; ++i) {
                double s = 0;
                for (std::size_t j = 0; j < b.n; ++j) s += b.generators(i, j) * b.generators(i, j);
                rad = std::max(rad, std::sqrt(s));
            }
            EstimateReport rep = volume_mc(b, rad, trials, seed);
            std::cout << fmt_g17(rep.value) << "  ci=[" << fmt_g17(rep.ci_low) << ","
                      << fmt_g17(rep.ci_high) << "]\n";
        } else if (*c_bm) {
            VPolytope x = read_vpolytope_csv(x_path);
            VPolytope y = read_vpolytope_csv(y_path);
            if (certified) {
                BmEstimate est = bm_lower_certified(x, y, net_resolution, seed);
                std::cout << "lower=" << fmt_g17(est.lower) << "  upper=" << fmt_g17(est.upper)
                          << "  method=" << est.lower_method << "\n";
            } else {
                BmEstimate est = bm_upper_search(x, y, 8, 400, seed);
                std::cout << "upper=" << fmt_g17(est.upper) << "\n";
            }
        } else if (*c_exp) {
            if (*c_exp_list) {
                for (const auto& name : experiment_names()) std::cout << name << "\n";
                return 0;
            }
            std::ifstream f(config_path);
            if (!f) throw InvalidInputError("cannot read config: " + config_path);
            json j = json::parse(f, nullptr, true);
            ExperimentConfig cfg = parse_experiment_config(j);
            if (!j.contains("seed")) cfg.seed = seed;
            if (!j.contains("output_dir") || out_dir != ".") cfg.output_dir = out_dir;
            RunReport rep = run_experiment(cfg);
            std::cout << cfg.experiment << ": " << (rep.pass ? "pass" : "FAIL") << "  ("
                      << rep.artifacts.size() << " artifacts in " << cfg.output_dir << ")\n";
            return rep.pass ? 0 : 1;
        } else if (*c_verify) {
            if (quick && full) throw InvalidInputError("--quick and --full are exclusive");
            VerifySummary sum = verify_suite(!full, seed, out_dir);
            for (const auto& c : sum.checks)
                std::cout << (c.pass ? "  pass  " : "  FAIL  ") << c.name
                          << (c.detail.empty() ? "" : "  (" + c.detail + ")") << "\n";
            std::cout << "verify: " << (sum.pass ? "pass" : "FAIL") << "\n";
            return sum.pass ? 0 : 1;
        }
    } catch (const InvalidInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
