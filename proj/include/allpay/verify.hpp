#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "allpay/profile.hpp"
#include "allpay/simultaneous.hpp"
#include "allpay/valuations.hpp"

namespace allpay {

enum class Mechanism { single_allpay, simultaneous_allpay, first_price, q_allpay, psam };

struct PlayerRegret {
    double regret = 0.0;
    double std_error = 0.0;
    std::size_t item = 0;        // argmax deviation item; == n_items for a full-row deviation
    double deviation_bid = 0.0;  // -1 when not a single-bid deviation
};

struct EquilibriumCertificate {
    std::vector<PlayerRegret> players;
    double max_regret = 0.0;
    double eps = 0.0;
    long samples = 0;
    std::uint64_t seed = 0;
    int grid_size = 0;
    std::string family;
    bool certified = false;  // refuted iff some regret exceeds eps + 3 sigma
};

/// One certification request. `profile` is n x 1 for the single-item
/// mechanisms and the psam bid vector is its pure single column.
struct CertifyTask {
    Mechanism mechanism = Mechanism::single_allpay;
    Profile profile;
    std::vector<double> values;             // single-item mechanisms: per-player value
    std::vector<XOSValuation> xos;          // simultaneous item bidding
    std::vector<MultiUnitValuation> multi;  // psam
    int units = 0;                          // psam m
    double q1 = 1.0, q2 = 0.0;              // rank prizes (q_allpay)
    double eps = -1.0;                      // < 0: per-mechanism default (1e-3 of the top
                                            // value for sampled mechanisms, 1e-8 for exact)
    long samples = 1000000;
    int grid_size = 400;
    std::uint64_t seed = 1;
    int workers = 1;
};

/// Empirical (or exact, where the mechanism allows it) epsilon-equilibrium
/// certificate: per-player regret against the deviation family, with the
/// verdict relative to that family only.
EquilibriumCertificate certify(const CertifyTask& task);

/// Monte Carlo probability that `bid` on `item` beats the sampled rivals
/// under lowest-index tie-breaking.
double win_probability(const MixedProfile& profile, std::size_t player, std::size_t item, double bid,
                       long samples, std::uint64_t seed);

/// Largest deviation between the empirical win frequency and the rivals'
/// max-bid CDF over a bid grid; the two coincide at atom-free equilibria.
double phi_divergence(const MixedProfile& profile, std::size_t player, std::size_t item, long samples,
                      std::uint64_t seed, int grid_points = 64);

struct AtomReport {
    struct Finding {
        std::size_t player;
        std::size_t item;
        std::size_t index;  // grid index where the jump starts
        double jump;
    };
    std::vector<Finding> findings;
    bool clean() const { return findings.empty(); }
};

/// Flags probability mass concentrated at a positive bid: a value jump
/// above 1e-6 across a grid step narrower than 1e-9 of the support.
/// Constructed equilibria must come out clean.
AtomReport atom_diagnostic(const MixedProfile& profile);
AtomReport atom_diagnostic(const Profile& profile);

}  // namespace allpay
