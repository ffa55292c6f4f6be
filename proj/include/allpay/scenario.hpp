#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "allpay/profile.hpp"
#include "allpay/valuations.hpp"
#include "allpay/verify.hpp"

namespace allpay::io {

inline constexpr const char* kVersion = "0.1.0";

/// Scenario validation failure; `what()` starts with the JSON pointer of
/// the offending element.
class SchemaError : public std::invalid_argument {
  public:
    SchemaError(const std::string& pointer, const std::string& message)
        : std::invalid_argument(pointer + ": " + message) {}
};

nlohmann::json load_json_file(const std::string& path);

/// FNV-1a 64 of the canonical (sorted-key) dump, as fixed-width hex.
std::string scenario_hash(const nlohmann::json& scenario);

/// Result envelope carrying the provenance fields every result file needs.
nlohmann::json result_envelope(const nlohmann::json& scenario, std::uint64_t seed, int workers,
                               nlohmann::json results);

void write_json_file(const std::string& path, const nlohmann::json& payload);

/// CSV writer with shortest round-trip float formatting.
void write_csv_file(const std::string& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<double>>& rows);

std::string format_double(double x);

// ---- scenario element parsers (all report JSON-pointer paths) ----

std::vector<XOSValuation> parse_xos_valuations(const nlohmann::json& list, const std::string& pointer);
std::vector<MultiUnitValuation> parse_multiunit_valuations(const nlohmann::json& list,
                                                           const std::string& pointer);
PiecewiseCDF parse_cdf(const nlohmann::json& table, const std::string& pointer);

struct SimultaneousScenario {
    std::vector<XOSValuation> valuations;
    Profile profile;
};

/// {"mechanism":"simultaneous-allpay", "valuations":[{"xos":...}...],
///  "profile":"product-bkv" | {"cdfs":[[table...]...]} | {"pure":[[...]...]}}
SimultaneousScenario parse_simultaneous_scenario(const nlohmann::json& scenario);

struct PsamScenario {
    int m = 0;
    std::vector<MultiUnitValuation> valuations;
    std::vector<double> bids;  // empty: solve for the equilibrium
};

/// {"mechanism":"psam", "m":int, "valuations":[{"multiunit":[...]}...],
///  "profile" (optional): "pure-nash" | {"bids":[...]}}
PsamScenario parse_psam_scenario(const nlohmann::json& scenario);

/// Builds a full certification task from a scenario file; `mechanism`
/// selects among single-allpay / first-price / q-allpay / psam /
/// simultaneous-allpay with the profile families each supports.
CertifyTask parse_verify_scenario(const nlohmann::json& scenario);

/// The per-item worst-case product profile for two additive bidders: each
/// item runs the one-strong-bidder mixed equilibrium between the two
/// item values.
MixedProfile product_worst_case_profile(const std::vector<XOSValuation>& vs,
                                        std::size_t grid_points = 4097);

}  // namespace allpay::io
