#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "allpay/bounds.hpp"
#include "allpay/psam.hpp"
#include "allpay/rng.hpp"
#include "allpay/scenario.hpp"
#include "allpay/simultaneous.hpp"
#include "allpay/single_item.hpp"
#include "allpay/verify.hpp"

namespace {

using nlohmann::json;
using namespace allpay;

json certificate_json(const EquilibriumCertificate& cert) {
    json players = json::array();
    for (const auto& p : cert.players)
        players.push_back({{"regret", p.regret},
                           {"std_error", p.std_error},
                           {"item", p.item},
                           {"deviation_bid", p.deviation_bid}});
    return {{"players", players},  {"max_regret", cert.max_regret}, {"eps", cert.eps},
            {"samples", cert.samples}, {"grid_size", cert.grid_size},  {"family", cert.family},
            {"certified", cert.certified}};
}

json estimate_json(const McEstimate& e) {
    return {{"mean", e.mean}, {"std_error", e.std_error}, {"samples", e.samples}};
}

void emit(const json& scenario, std::uint64_t seed, int workers, const json& results,
          const std::string& out_path) {
    const json envelope = io::result_envelope(scenario, seed, workers, results);
    std::cout << envelope.dump(2) << "\n";
    if (!out_path.empty()) io::write_json_file(out_path, envelope);
}

struct RunParams {
    double samples = 1e6;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int grid = 400;
    int workers = 1;
    double tol = -1.0;
    std::string scenario_path;
    std::string out_path;
};

void add_common(CLI::App* cmd, RunParams& p, bool with_scenario) {
    if (with_scenario)
        cmd->add_option("--scenario", p.scenario_path, "scenario JSON path")->required();
    cmd->add_option("--samples", p.samples, "Monte Carlo sample count");
    cmd->add_option("--seed", p.seed, "RNG seed")->each([&p](const std::string&) { p.seed_set = true; });
    cmd->add_option("--grid", p.grid, "deviation grid size");
    cmd->add_option("--workers", p.workers, "worker thread count");
    cmd->add_option("--tol", p.tol, "override tolerance / eps");
    cmd->add_option("--out", p.out_path, "result JSON path");
}

std::uint64_t required_seed(const RunParams& p, const json& scenario) {
    if (p.seed_set) return p.seed;
    if (scenario.contains("seed") && scenario["seed"].is_number_integer())
        return scenario["seed"].get<std::uint64_t>();
    throw io::SchemaError("/seed", "a seed is required for stochastic runs");
}

int run_single_item_poa(const RunParams& p, double v, int n, const std::string& curve_path,
                        int curve_steps, bool sweep) {
    json scenario = {{"mechanism", "single-allpay"}, {"v", v}, {"n", n},
                     {"samples", static_cast<long>(p.samples)}};
    const std::uint64_t seed = required_seed(p, scenario);
    scenario["seed"] = seed;

    std::vector<double> values(static_cast<std::size_t>(n), v);
    values[0] = 1.0;
    const SingleItemInstance inst(values);
    const MixedProfile profile = worst_case_equilibrium(inst);

    std::vector<XOSValuation> vs;
    for (double val : values) vs.emplace_back(std::vector<std::vector<double>>{{val}});
    const McEstimate welfare =
        mc_expected_welfare(profile, vs, static_cast<long>(p.samples), seed, p.workers);
    const double exact = equilibrium_welfare(profile, inst);

    CertifyTask task;
    task.mechanism = Mechanism::single_allpay;
    task.profile = profile;
    task.values = values;
    task.samples = static_cast<long>(p.samples);
    task.grid_size = p.grid;
    task.seed = seed;
    task.workers = p.workers;
    if (p.tol >= 0.0) task.eps = p.tol;
    const EquilibriumCertificate cert = certify(task);

    json results = {{"welfare_mc", estimate_json(welfare)},
                    {"welfare_exact", exact},
                    {"poa", 1.0 / welfare.mean},
                    {"poa_exact", 1.0 / exact},
                    {"certificate", certificate_json(cert)}};
    if (sweep) {
        json rows = json::array();
        for (int players = 2; players <= 256; players *= 2) {
            std::vector<double> vals(static_cast<std::size_t>(players), v);
            vals[0] = 1.0;
            const SingleItemInstance sw(vals);
            rows.push_back({{"n", players}, {"welfare", equilibrium_welfare(worst_case_equilibrium(sw), sw)}});
        }
        results["n_sweep"] = rows;
        results["welfare_limit"] = asymptotic_welfare(v);
    }
    if (!curve_path.empty()) {
        std::vector<std::vector<double>> rows;
        for (int t = 1; t < curve_steps; ++t) {
            const double vv = static_cast<double>(t) / curve_steps;
            const double w = asymptotic_welfare(vv);
            rows.push_back({vv, w, 1.0 / w});
        }
        io::write_csv_file(curve_path, {"v", "welfare_limit", "poa_limit"}, rows);
    }
    emit(scenario, seed, p.workers, results, p.out_path);
    return 0;
}

int run_single_item_revenue(const RunParams& p, double v, int k) {
    json scenario = {{"mechanism", "single-allpay"}, {"v", v}, {"k", k}};
    const double revenue = closed_form_revenue(v);
    const SingleItemInstance inst({1.0, v});
    const MaxBidBound check = max_bid_bound_check(inst, k);
    json results = {{"revenue_limit", revenue},
                    {"revenue_ratio_to_v", revenue / v},
                    {"max_bid", {{"k", k},
                                 {"expected_max_bid", check.expected_max_bid},
                                 {"bound", check.bound},
                                 {"holds", check.holds}}}};
    emit(scenario, p.seed, p.workers, results, p.out_path);
    return 0;
}

int run_psam_solve(const RunParams& p, int restarts) {
    const json scenario = io::load_json_file(p.scenario_path);
    const io::PsamScenario s = io::parse_psam_scenario(scenario);
    const psam::Efficiency eff = psam::efficiency(s.valuations, s.m);

    std::vector<double> shares = psam::fractional_shares(eff.bids, s.m);
    psam::RandomAllocation rounding = psam::dependent_round(shares);
    rounding.validate();

    CertifyTask task;
    task.mechanism = Mechanism::psam;
    PureProfile rows;
    for (double b : eff.bids) rows.push_back({b});
    task.profile = std::move(rows);
    task.multi = s.valuations;
    task.units = s.m;
    if (p.tol >= 0.0) task.eps = p.tol;
    const EquilibriumCertificate cert = certify(task);

    json support = json::array();
    for (const auto& e : rounding.support)
        support.push_back({{"allocation", e.allocation}, {"probability", e.probability}});
    json results = {{"bids", eff.bids},
                    {"shares", shares},
                    {"rounding_support", support},
                    {"efficiency",
                     {{"ne_welfare", eff.ne_welfare}, {"opt_welfare", eff.opt_welfare}, {"ratio", eff.ratio}}},
                    {"certificate", certificate_json(cert)}};
    if (restarts > 1) {
        Rng rng(p.seed_set ? p.seed : 1);
        double top = 0.0;
        for (const auto& f : s.valuations)
            top = std::max(top, submodular_to_concave(f).slope(0));
        double spread = 0.0;
        for (int r = 0; r < restarts; ++r) {
            const double hi = top * (1.0 + rng.uniform01());
            const std::vector<double> again = psam::pure_nash(s.valuations, s.m, hi * 1e-9, hi);
            for (std::size_t i = 0; i < again.size(); ++i)
                spread = std::max(spread, std::abs(again[i] - eff.bids[i]));
        }
        results["restart_bid_spread"] = spread;
    }
    emit(scenario, p.seed, p.workers, results, p.out_path);
    return 0;
}

int run_simul_validate(const RunParams& p) {
    const json scenario = io::load_json_file(p.scenario_path);
    const io::SimultaneousScenario s = io::parse_simultaneous_scenario(scenario);
    const std::uint64_t seed = required_seed(p, scenario);
    const long samples = static_cast<long>(p.samples);
    const InequalityReport r1 = validate_inequality_1(s.profile, s.valuations, samples, seed, p.workers);
    const InequalityReport r2 = validate_inequality_2(s.profile, s.valuations, samples, seed, p.workers);
    auto report_json = [](const InequalityReport& r) {
        return json{{"welfare", estimate_json(r.welfare)},
                    {"rhs", r.rhs},
                    {"slack", r.slack},
                    {"holds_within_3sigma", r.holds_within_3sigma},
                    {"per_item_rhs", r.per_item_rhs},
                    {"deviation_values", r.deviation_values}};
    };
    json results = {{"inequality_1", report_json(r1)}, {"inequality_2", report_json(r2)}};
    emit(scenario, seed, p.workers, results, p.out_path);
    const bool ok = r1.holds_within_3sigma && r2.holds_within_3sigma;
    return ok ? 0 : 2;
}

int run_bounds_lambda(const RunParams& p, double lo, double hi, int steps, const std::string& csv_path) {
    json scenario = {{"mechanism", "bounds-lambda"}, {"min", lo}, {"max", hi}, {"steps", steps}};
    std::vector<std::vector<double>> rows;
    double best = 1e300, best_lambda = lo;
    for (int t = 0; t <= steps; ++t) {
        const double lambda = lo + (hi - lo) * static_cast<double>(t) / steps;
        const double bound = combined_poa_bound(lambda);
        rows.push_back({lambda, bound});
        if (bound < best) {
            best = bound;
            best_lambda = lambda;
        }
    }
    if (!csv_path.empty()) io::write_csv_file(csv_path, {"lambda", "poa_bound"}, rows);
    json results = {{"min_bound", best}, {"argmin_lambda", best_lambda}};
    emit(scenario, p.seed, p.workers, results, p.out_path);
    return 0;
}

int run_bounds_prop1(const RunParams& p, int n, double target, long trials, int starts) {
    json scenario = {{"mechanism", "bounds-prop1"}, {"n", n}, {"target", target},
                     {"trials", trials},           {"starts", starts}};
    const std::uint64_t seed = required_seed(p, scenario);
    scenario["seed"] = seed;
    Rng rng(seed);
    long violations = 0;
    double min_slack = 1e300;
    for (long t = 0; t < trials; ++t) {
        bounds::RatioInput in;
        in.G.resize(static_cast<std::size_t>(n));
        in.g.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            in.G[static_cast<std::size_t>(i)] = 1.0 - 0.999999 * rng.uniform01();
            in.g[static_cast<std::size_t>(i)] = std::exp(-6.9 + 13.8 * rng.uniform01());
        }
        const bounds::RatioCheck check = bounds::harmonic_ratio_check(in);
        min_slack = std::min(min_slack, check.lhs - check.rhs);
        if (!check.holds) ++violations;
    }
    const bounds::MinSearchResult search = bounds::harmonic_ratio_min_search(n, target, starts, 600, seed);
    json results = {{"random_trials", trials},
                    {"violations", violations},
                    {"min_slack", min_slack},
                    {"search_min", search.min_value},
                    {"sqrt_target", std::sqrt(target)},
                    {"g_at_cap", search.g_at_cap}};
    emit(scenario, seed, p.workers, results, p.out_path);
    return violations == 0 && search.min_value >= std::sqrt(target) - 1e-9 ? 0 : 2;
}

int run_bounds_rfv(const RunParams& p, double lambda, double v, long cdf_count) {
    json scenario = {{"mechanism", "bounds-rfv"}, {"lambda", lambda}, {"v", v}, {"cdfs", cdf_count}};
    const std::uint64_t seed = required_seed(p, scenario);
    scenario["seed"] = seed;
    Rng rng(seed);
    const double floor_per_v = bounds::welfare_functional_floor(lambda);

    const PiecewiseCDF tight = bounds::hat_family(v, 0.0, lambda * lambda * v);
    const double tight_r = bounds::welfare_functional(tight, v, lambda).value;

    double min_slack = 1e300;
    for (long t = 0; t < cdf_count; ++t) {
        const std::size_t points = 4 + static_cast<std::size_t>(rng.uniform01() * 28);
        const double hi = v * (0.4 + 1.2 * rng.uniform01());
        const double atom = rng.uniform01() < 0.3 ? 0.4 * rng.uniform01() : 0.0;
        std::vector<double> grid{0.0}, values{atom};
        double x = 0.0, y = atom;
        for (std::size_t i = 0; i < points; ++i) {
            x += rng.uniform01();
            grid.push_back(x);
            y += rng.uniform01();
            values.push_back(y);
        }
        for (std::size_t i = 1; i < grid.size(); ++i) grid[i] *= hi / x;
        for (std::size_t i = 1; i < values.size(); ++i)
            values[i] = atom + (1.0 - atom) * (values[i] - atom) / (y - atom);
        values.back() = 1.0;
        const PiecewiseCDF f(grid, values, atom);
        const double r = bounds::welfare_functional(f, v, lambda).value;
        min_slack = std::min(min_slack, r - floor_per_v * v);
    }
    json results = {{"floor", floor_per_v * v},
                    {"tight_family_value", tight_r},
                    {"tight_abs_err", std::abs(tight_r - floor_per_v * v)},
                    {"random_min_slack", min_slack}};
    emit(scenario, seed, p.workers, results, p.out_path);
    return min_slack >= -1e-6 && std::abs(tight_r - floor_per_v * v) <= 1e-9 ? 0 : 2;
}

int run_verify(const RunParams& p) {
    const json scenario = io::load_json_file(p.scenario_path);
    CertifyTask task = io::parse_verify_scenario(scenario);
    task.samples = static_cast<long>(p.samples);
    task.grid_size = p.grid;
    task.workers = p.workers;
    if (p.tol >= 0.0) task.eps = p.tol;
    const bool stochastic = task.mechanism != Mechanism::psam &&
                            std::holds_alternative<MixedProfile>(task.profile);
    task.seed = stochastic ? required_seed(p, scenario) : (p.seed_set ? p.seed : 1);
    const EquilibriumCertificate cert = certify(task);
    json results = {{"certificate", certificate_json(cert)}};
    if (task.mechanism == Mechanism::single_allpay &&
        std::holds_alternative<MixedProfile>(task.profile)) {
        const auto& mixed = std::get<MixedProfile>(task.profile);
        results["phi_divergence"] =
            phi_divergence(mixed, 1 % mixed.n_players, 0, std::min<long>(task.samples, 20000),
                           substream_seed(task.seed, 77));
    }
    emit(scenario, task.seed, p.workers, results, p.out_path);
    return cert.certified ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"all-pay auction equilibrium toolkit"};
    app.require_subcommand(1);

    RunParams params;

    // single-item
    auto* single = app.add_subcommand("single-item", "single-item all-pay analytics");
    single->require_subcommand(1);
    double v = 0.5;
    int n = 2, k = 200, curve_steps = 100, restarts = 1;
    bool sweep = false;
    std::string curve_path;
    auto* poa = single->add_subcommand("poa", "equilibrium welfare and price of anarchy");
    poa->add_option("--v", v, "rival valuation in (0, 1]")->required();
    poa->add_option("--n", n, "number of players");
    poa->add_flag("--sweep", sweep, "include the welfare sweep over n = 2..256");
    poa->add_option("--curve", curve_path, "CSV path for the limit-welfare curve");
    poa->add_option("--curve-steps", curve_steps, "curve grid steps");
    add_common(poa, params, false);
    auto* revenue = single->add_subcommand("revenue", "worst-equilibrium revenue and max bid");
    revenue->add_option("--v", v, "second valuation in (0, 1)")->required();
    revenue->add_option("--k", k, "symmetric rival count for the max-bid check");
    add_common(revenue, params, false);

    // psam
    auto* psam_cmd = app.add_subcommand("psam", "proportional-share mechanism");
    psam_cmd->require_subcommand(1);
    auto* solve = psam_cmd->add_subcommand("solve", "pure equilibrium, rounding, efficiency");
    solve->add_option("--restarts", restarts, "extra bisection restarts for the uniqueness probe");
    add_common(solve, params, true);

    // simul
    auto* simul = app.add_subcommand("simul", "simultaneous item bidding");
    simul->require_subcommand(1);
    auto* validate = simul->add_subcommand("validate", "welfare floor validation on a profile");
    add_common(validate, params, true);

    // bounds
    auto* bounds_cmd = app.add_subcommand("bounds", "analytic bound validation");
    bounds_cmd->require_subcommand(1);
    double lo = 0.01, hi = 1.0, lambda = 0.56, rv = 1.0, target = 0.25;
    int steps = 200, starts = 32, prop_n = 10;
    double trials = 1e5, cdf_count = 1000;
    std::string csv_path;
    auto* lambda_cmd = bounds_cmd->add_subcommand("lambda", "price-of-anarchy bound over lambda");
    lambda_cmd->add_option("--min", lo, "lambda grid start");
    lambda_cmd->add_option("--max", hi, "lambda grid end");
    lambda_cmd->add_option("--steps", steps, "grid steps");
    lambda_cmd->add_option("--csv", csv_path, "CSV path for the curve");
    add_common(lambda_cmd, params, false);
    auto* prop1 = bounds_cmd->add_subcommand("prop1", "harmonic-sum inequality checks");
    prop1->add_option("--n", prop_n, "input length");
    prop1->add_option("--target", target, "fixed product of the G entries");
    prop1->add_option("--trials", trials, "random input count");
    prop1->add_option("--starts", starts, "multi-start count for the minimization");
    add_common(prop1, params, false);
    auto* rfv = bounds_cmd->add_subcommand("rfv", "welfare functional floor checks");
    rfv->add_option("--lambda", lambda, "mixing weight in (0, 1]");
    rfv->add_option("--v", rv, "item value");
    rfv->add_option("--cdfs", cdf_count, "random CDF count");
    add_common(rfv, params, false);

    // verify
    auto* verify = app.add_subcommand("verify", "epsilon-equilibrium certification");
    add_common(verify, params, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (poa->parsed()) return run_single_item_poa(params, v, n, curve_path, curve_steps, sweep);
        if (revenue->parsed()) return run_single_item_revenue(params, v, k);
        if (solve->parsed()) return run_psam_solve(params, restarts);
        if (validate->parsed()) return run_simul_validate(params);
        if (lambda_cmd->parsed()) return run_bounds_lambda(params, lo, hi, steps, csv_path);
        if (prop1->parsed())
            return run_bounds_prop1(params, prop_n, target, static_cast<long>(trials), starts);
        if (rfv->parsed()) return run_bounds_rfv(params, lambda, rv, static_cast<long>(cdf_count));
        if (verify->parsed()) return run_verify(params);
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const std::logic_error& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
