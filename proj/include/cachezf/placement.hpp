#pragma once

#include <algorithm>
#include <compare>
#include <stdexcept>
#include <string>
#include <vector>

#include "cachezf/combinat.hpp"
#include "cachezf/config.hpp"
#include "cachezf/rational.hpp"

namespace cachezf {

/// One base subfile W_{n,T,R}: the part of file n stored at exactly the
/// transmitters in T and the receivers in R.
struct BaseSubfileId {
    int file = 0;
    std::vector<int> tx_set;  // sorted, |tx_set| = t_T
    std::vector<int> rx_set;  // sorted, |rx_set| = t_R
    auto operator<=>(const BaseSubfileId&) const = default;
};

/// One deliverable subfile W_{d_j,T,pi,pi'}: a base subfile refined by the
/// ordered list of receivers that cache it (cached_at, length t_R) and the
/// ordered list of receivers it is zero-forced at (nulled_at, length t_T-1).
struct RefinedSubfileId {
    int file = 0;
    int intended_rx = 0;        // never in cached_at or nulled_at
    std::vector<int> tx_set;    // sorted, |tx_set| = t_T
    std::vector<int> cached_at;  // ordered, length t_R
    std::vector<int> nulled_at;  // ordered, length t_T - 1
    auto operator<=>(const RefinedSubfileId&) const = default;
};

/// How many refined parts each base subfile splits into for delivery:
/// t_R! * (K_R - t_R - 1)! / (K_R - t_R - t_T)!.
inline long long refinement_factor(const NetworkConfig& cfg) {
    const int t_t = cfg.t_t_int();
    const int t_r = cfg.t_r_int();
    if (t_t + t_r > cfg.k_r)
        throw std::domain_error("refinement_factor: t_T + t_R > K_R; saturate the config first");
    // (K_R - t_R - 1)! / (K_R - t_R - t_T)! is the count of ordered
    // (t_T - 1)-arrangements of the K_R - t_R - 1 remaining receivers.
    return combinat::factorial(t_r) * combinat::falling_factorial(cfg.k_r - t_r - 1, t_t - 1);
}

/// Smallest packet count per file that makes every subfile an exact integer
/// number of packets; any valid F is a multiple of this.
inline long long minimal_f(const NetworkConfig& cfg) {
    return combinat::binomial(cfg.k_t, cfg.t_t_int()) * combinat::binomial(cfg.k_r, cfg.t_r_int()) *
           refinement_factor(cfg);
}

/// F actually in force: the configured value, or minimal_f when unset.
inline long long effective_f(const NetworkConfig& cfg) {
    return cfg.f_packets > 0 ? cfg.f_packets : minimal_f(cfg);
}

namespace detail {
inline void require_divisible_f(const NetworkConfig& cfg) {
    const long long f = effective_f(cfg);
    const long long unit = minimal_f(cfg);
    if (f % unit != 0)
        throw std::invalid_argument("F = " + std::to_string(f) + " is not a multiple of the minimal F " +
                                    std::to_string(unit));
}
}  // namespace detail

/// Splits one file into its C(K_T,t_T) * C(K_R,t_R) base subfiles, covering
/// every (T, R) pair once, in lexicographic order.
inline std::vector<BaseSubfileId> split_file(int file, const NetworkConfig& cfg) {
    cfg.validate();
    if (file < 1 || file > cfg.n_files) throw std::invalid_argument("split_file: file index out of range");
    detail::require_divisible_f(cfg);
    const auto tx_sets = combinat::k_subsets(cfg.k_t, cfg.t_t_int());
    const auto rx_sets = combinat::k_subsets(cfg.k_r, cfg.t_r_int());
    std::vector<BaseSubfileId> out;
    out.reserve(tx_sets.size() * rx_sets.size());
    for (const auto& t : tx_sets)
        for (const auto& r : rx_sets) out.push_back({file, t, r});
    return out;
}

/// Rule-based cache contents: P_i holds every subfile with i in T, Q_j every
/// subfile with j in R. Sets are materialized only on demand; membership is
/// the defining predicate.
struct CachePlacement {
    NetworkConfig cfg;
    long long packets_per_base_subfile = 0;

    bool tx_caches(int tx, const BaseSubfileId& id) const {
        return std::binary_search(id.tx_set.begin(), id.tx_set.end(), tx);
    }
    bool rx_caches(int rx, const BaseSubfileId& id) const {
        return std::binary_search(id.rx_set.begin(), id.rx_set.end(), rx);
    }

    std::vector<BaseSubfileId> tx_cache(int tx) const {
        std::vector<BaseSubfileId> out;
        for (int n = 1; n <= cfg.n_files; ++n)
            for (auto& id : split_file(n, cfg))
                if (tx_caches(tx, id)) out.push_back(std::move(id));
        return out;
    }
    std::vector<BaseSubfileId> rx_cache(int rx) const {
        std::vector<BaseSubfileId> out;
        for (int n = 1; n <= cfg.n_files; ++n)
            for (auto& id : split_file(n, cfg))
                if (rx_caches(rx, id)) out.push_back(std::move(id));
        return out;
    }
};

inline CachePlacement build_placement(const NetworkConfig& cfg) {
    cfg.validate();
    detail::require_divisible_f(cfg);
    const long long per_base =
        effective_f(cfg) / (combinat::binomial(cfg.k_t, cfg.t_t_int()) * combinat::binomial(cfg.k_r, cfg.t_r_int()));
    return {cfg, per_base};
}

/// All refined parts of a base subfile headed for intended_rx: one per
/// (ordering pi of rx_set, ordered (t_T-1)-arrangement pi' of the receivers
/// outside rx_set and intended_rx).
inline std::vector<RefinedSubfileId> refine_subfile(const BaseSubfileId& base, int intended_rx,
                                                    const NetworkConfig& cfg) {
    if (std::binary_search(base.rx_set.begin(), base.rx_set.end(), intended_rx))
        throw std::domain_error("refine_subfile: intended receiver already caches this subfile");
    const int t_t = cfg.t_t_int();
    std::vector<int> others;
    for (int j = 1; j <= cfg.k_r; ++j)
        if (j != intended_rx && !std::binary_search(base.rx_set.begin(), base.rx_set.end(), j)) others.push_back(j);
    std::vector<RefinedSubfileId> out;
    for (const auto& pi : combinat::permutations_of(base.rx_set))
        for (const auto& pi_prime : combinat::arrangements(others, t_t - 1))
            out.push_back({base.file, intended_rx, base.tx_set, pi, pi_prime});
    return out;
}

/// Per-node cached-packet counts against the M_T*F / M_R*F budgets.
struct BudgetReport {
    std::vector<long long> tx_packets;  // indexed by transmitter - 1
    std::vector<long long> rx_packets;  // indexed by receiver - 1
    Rational tx_budget{0};              // M_T * F
    Rational rx_budget{0};              // M_R * F
    bool ok = true;
    std::vector<std::string> violations;
};

inline BudgetReport audit_budgets(const CachePlacement& p, const NetworkConfig& cfg) {
    BudgetReport report;
    report.tx_budget = cfg.m_t * Rational(effective_f(cfg));
    report.rx_budget = cfg.m_r * Rational(effective_f(cfg));
    report.tx_packets.assign(cfg.k_t, 0);
    report.rx_packets.assign(cfg.k_r, 0);
    for (int n = 1; n <= cfg.n_files; ++n) {
        for (const auto& id : split_file(n, cfg)) {
            for (int i : id.tx_set) report.tx_packets[i - 1] += p.packets_per_base_subfile;
            for (int j : id.rx_set) report.rx_packets[j - 1] += p.packets_per_base_subfile;
        }
    }
    for (int i = 1; i <= cfg.k_t; ++i)
        if (Rational(report.tx_packets[i - 1]) > report.tx_budget) {
            report.ok = false;
            report.violations.push_back("transmitter " + std::to_string(i) + " over budget");
        }
    for (int j = 1; j <= cfg.k_r; ++j)
        if (Rational(report.rx_packets[j - 1]) > report.rx_budget) {
            report.ok = false;
            report.violations.push_back("receiver " + std::to_string(j) + " over budget");
        }
    return report;
}

}  // namespace cachezf
