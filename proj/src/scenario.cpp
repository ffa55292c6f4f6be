#include "allpay/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <utility>

#include "allpay/psam.hpp"
#include "allpay/single_item.hpp"

namespace allpay::io {

namespace {

const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& pointer) {
    if (!obj.is_object()) throw SchemaError(pointer, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(pointer + "/" + key, "missing required field");
    return *it;
}

double number_at(const nlohmann::json& j, const std::string& pointer) {
    if (!j.is_number()) throw SchemaError(pointer, "expected a number");
    return j.get<double>();
}

long integer_at(const nlohmann::json& j, const std::string& pointer) {
    if (!j.is_number_integer()) throw SchemaError(pointer, "expected an integer");
    return j.get<long>();
}

std::vector<double> number_list(const nlohmann::json& j, const std::string& pointer) {
    if (!j.is_array() || j.empty()) throw SchemaError(pointer, "expected a nonempty array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(number_at(j[i], pointer + "/" + std::to_string(i)));
    return out;
}

std::string mechanism_at(const nlohmann::json& scenario) {
    const auto& m = require(scenario, "mechanism", "");
    if (!m.is_string()) throw SchemaError("/mechanism", "expected a string");
    return m.get<std::string>();
}

}  // namespace

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open scenario file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("", std::string("invalid JSON: ") + e.what());
    }
    return j;
}

std::string scenario_hash(const nlohmann::json& scenario) {
    const std::string dump = scenario.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    static const char* digits = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = digits[h & 0xf];
        h >>= 4;
    }
    buf[16] = '\0';
    return std::string("fnv1a64:") + buf;
}

nlohmann::json result_envelope(const nlohmann::json& scenario, std::uint64_t seed, int workers,
                               nlohmann::json results) {
    nlohmann::json out;
    out["version"] = kVersion;
    out["scenario_hash"] = scenario_hash(scenario);
    out["seed"] = seed;
    out["workers"] = workers;
    out["results"] = std::move(results);
    return out;
}

void write_json_file(const std::string& path, const nlohmann::json& payload) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write result file: " + path);
    out << payload.dump(2) << "\n";
}

std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

void write_csv_file(const std::string& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write csv file: " + path);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
        out << "\n";
    }
}

std::vector<XOSValuation> parse_xos_valuations(const nlohmann::json& list, const std::string& pointer) {
    if (!list.is_array() || list.empty()) throw SchemaError(pointer, "expected a nonempty array");
    std::vector<XOSValuation> out;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string p = pointer + "/" + std::to_string(i);
        const auto& clauses = require(list[i], "xos", p);
        if (!clauses.is_array() || clauses.empty())
            throw SchemaError(p + "/xos", "expected a nonempty array of clauses");
        std::vector<std::vector<double>> rows;
        for (std::size_t k = 0; k < clauses.size(); ++k)
            rows.push_back(number_list(clauses[k], p + "/xos/" + std::to_string(k)));
        try {
            out.emplace_back(std::move(rows));
        } catch (const std::invalid_argument& e) {
            throw SchemaError(p + "/xos", e.what());
        }
    }
    return out;
}

std::vector<MultiUnitValuation> parse_multiunit_valuations(const nlohmann::json& list,
                                                           const std::string& pointer) {
    if (!list.is_array() || list.empty()) throw SchemaError(pointer, "expected a nonempty array");
    std::vector<MultiUnitValuation> out;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string p = pointer + "/" + std::to_string(i);
        const auto& f = require(list[i], "multiunit", p);
        try {
            out.emplace_back(number_list(f, p + "/multiunit"));
        } catch (const std::invalid_argument& e) {
            throw SchemaError(p + "/multiunit", e.what());
        }
    }
    return out;
}

PiecewiseCDF parse_cdf(const nlohmann::json& table, const std::string& pointer) {
    const double atom = table.contains("atom_at_zero")
                            ? number_at(table["atom_at_zero"], pointer + "/atom_at_zero")
                            : 0.0;
    std::vector<double> grid = number_list(require(table, "grid", pointer), pointer + "/grid");
    std::vector<double> values = number_list(require(table, "values", pointer), pointer + "/values");
    try {
        return PiecewiseCDF(std::move(grid), std::move(values), atom);
    } catch (const std::invalid_argument& e) {
        throw SchemaError(pointer, e.what());
    }
}

namespace {

Profile parse_profile_tables(const nlohmann::json& profile, std::size_t n, std::size_t m,
                             const std::string& pointer) {
    if (profile.contains("pure")) {
        const auto& rows = profile["pure"];
        if (!rows.is_array() || rows.size() != n)
            throw SchemaError(pointer + "/pure", "expected one bid row per player");
        PureProfile bids;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            bids.push_back(number_list(rows[i], pointer + "/pure/" + std::to_string(i)));
            if (bids.back().size() != m)
                throw SchemaError(pointer + "/pure/" + std::to_string(i), "expected one bid per item");
        }
        return bids;
    }
    const auto& rows = require(profile, "cdfs", pointer);
    if (!rows.is_array() || rows.size() != n)
        throw SchemaError(pointer + "/cdfs", "expected one table row per player");
    std::vector<PiecewiseCDF> tables;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string pi = pointer + "/cdfs/" + std::to_string(i);
        if (!rows[i].is_array() || rows[i].size() != m)
            throw SchemaError(pi, "expected one table per item");
        for (std::size_t j = 0; j < m; ++j)
            tables.push_back(parse_cdf(rows[i][j], pi + "/" + std::to_string(j)));
    }
    return MixedProfile(n, m, std::move(tables));
}

}  // namespace

MixedProfile product_worst_case_profile(const std::vector<XOSValuation>& vs, std::size_t grid_points) {
    if (vs.size() != 2)
        throw std::invalid_argument("product worst-case profile needs exactly two bidders");
    for (const auto& v : vs)
        if (v.clauses.size() != 1)
            throw std::invalid_argument("product worst-case profile needs additive (single-clause) bidders");
    const std::size_t m = vs.front().n_items();
    std::vector<std::vector<PiecewiseCDF>> per_player(2);
    for (std::size_t j = 0; j < m; ++j) {
        const double a = vs[0].clauses[0][j];
        const double b = vs[1].clauses[0][j];
        const std::size_t strong = (b > a) ? 1 : 0;  // ties: player 0 is the strong bidder
        const double hi = std::max(a, b), lo = std::min(a, b);
        if (!(lo > 0.0))
            throw std::invalid_argument("product worst-case profile needs positive item values");
        const MixedProfile item_eq =
            worst_case_equilibrium(SingleItemInstance({hi, lo}), grid_points);
        per_player[strong].push_back(item_eq.cdf(0, 0));
        per_player[1 - strong].push_back(item_eq.cdf(1, 0));
    }
    std::vector<PiecewiseCDF> tables;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < m; ++j) tables.push_back(per_player[i][j]);
    return MixedProfile(2, m, std::move(tables));
}

SimultaneousScenario parse_simultaneous_scenario(const nlohmann::json& scenario) {
    if (mechanism_at(scenario) != "simultaneous-allpay")
        throw SchemaError("/mechanism", "expected \"simultaneous-allpay\"");
    std::vector<XOSValuation> vs =
        parse_xos_valuations(require(scenario, "valuations", ""), "/valuations");
    const std::size_t m = vs.front().n_items();
    for (std::size_t i = 0; i < vs.size(); ++i)
        if (vs[i].n_items() != m)
            throw SchemaError("/valuations/" + std::to_string(i), "item count mismatch");
    const auto& profile = require(scenario, "profile", "");
    if (profile.is_string()) {
        if (profile.get<std::string>() != "product-bkv")
            throw SchemaError("/profile", "unknown profile family (expected \"product-bkv\")");
        try {
            return {vs, product_worst_case_profile(vs)};
        } catch (const std::invalid_argument& e) {
            throw SchemaError("/profile", e.what());
        }
    }
    Profile p = parse_profile_tables(profile, vs.size(), m, "/profile");
    return {std::move(vs), std::move(p)};
}

PsamScenario parse_psam_scenario(const nlohmann::json& scenario) {
    if (mechanism_at(scenario) != "psam") throw SchemaError("/mechanism", "expected \"psam\"");
    PsamScenario out;
    out.m = static_cast<int>(integer_at(require(scenario, "m", ""), "/m"));
    if (out.m < 1) throw SchemaError("/m", "must be at least 1");
    out.valuations = parse_multiunit_valuations(require(scenario, "valuations", ""), "/valuations");
    for (std::size_t i = 0; i < out.valuations.size(); ++i) {
        if (out.valuations[i].units() < out.m)
            throw SchemaError("/valuations/" + std::to_string(i) + "/multiunit",
                              "needs values up to m units");
        if (!out.valuations[i].is_submodular())
            throw SchemaError("/valuations/" + std::to_string(i) + "/multiunit",
                              "marginal values must be nonincreasing");
    }
    if (scenario.contains("profile") && scenario["profile"].is_object()) {
        out.bids = number_list(require(scenario["profile"], "bids", "/profile"), "/profile/bids");
        if (out.bids.size() != out.valuations.size())
            throw SchemaError("/profile/bids", "bid count must match the player count");
    }
    return out;
}

CertifyTask parse_verify_scenario(const nlohmann::json& scenario) {
    const std::string mech = mechanism_at(scenario);
    CertifyTask task;
    if (mech == "simultaneous-allpay") {
        SimultaneousScenario s = parse_simultaneous_scenario(scenario);
        task.mechanism = Mechanism::simultaneous_allpay;
        task.xos = std::move(s.valuations);
        task.profile = std::move(s.profile);
        return task;
    }
    if (mech == "psam") {
        PsamScenario s = parse_psam_scenario(scenario);
        task.mechanism = Mechanism::psam;
        task.multi = std::move(s.valuations);
        task.units = s.m;
        std::vector<double> bids =
            s.bids.empty() ? psam::pure_nash(task.multi, task.units) : std::move(s.bids);
        PureProfile rows;
        for (double b : bids) rows.push_back({b});
        task.profile = std::move(rows);
        return task;
    }
    if (mech == "single-allpay" || mech == "first-price") {
        task.mechanism = mech == "first-price" ? Mechanism::first_price : Mechanism::single_allpay;
        task.values = number_list(require(scenario, "values", ""), "/values");
        SingleItemInstance inst = [&] {
            try {
                return SingleItemInstance(task.values);
            } catch (const std::invalid_argument& e) {
                throw SchemaError("/values", e.what());
            }
        }();
        const std::string family = scenario.contains("profile") && scenario["profile"].is_string()
                                       ? scenario["profile"].get<std::string>()
                                       : std::string();
        if (scenario.contains("profile") && scenario["profile"].is_object()) {
            task.profile = parse_profile_tables(scenario["profile"], task.values.size(), 1, "/profile");
        } else if (task.mechanism == Mechanism::first_price) {
            if (!family.empty() && family != "all-bid-second")
                throw SchemaError("/profile", "unknown profile family for first-price");
            PureProfile rows;
            for (double b : first_price_worst_case(inst).bids) rows.push_back({b});
            task.profile = std::move(rows);
        } else {
            if (!family.empty() && family != "worst-case")
                throw SchemaError("/profile", "unknown profile family for single-allpay");
            try {
                task.profile = worst_case_equilibrium(inst);
            } catch (const std::invalid_argument& e) {
                throw SchemaError("/values", e.what());
            }
        }
        return task;
    }
    if (mech == "q-allpay") {
        task.mechanism = Mechanism::q_allpay;
        const double v = number_at(require(scenario, "v", ""), "/v");
        task.q1 = number_at(require(scenario, "q1", ""), "/q1");
        task.q2 = number_at(require(scenario, "q2", ""), "/q2");
        const std::size_t n = scenario.contains("n")
                                  ? static_cast<std::size_t>(integer_at(scenario["n"], "/n"))
                                  : 2;
        try {
            QEquilibrium eq = q_mechanism_equilibrium(v, PrizeVector(task.q1, task.q2), n);
            task.profile = std::move(eq.profile);
        } catch (const std::invalid_argument& e) {
            throw SchemaError("/q1", e.what());
        }
        task.values.assign(n, 0.0);
        task.values[0] = 1.0;
        task.values[1] = v;
        return task;
    }
    throw SchemaError("/mechanism", "unknown mechanism \"" + mech + "\"");
}

}  // namespace allpay::io
