#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "cachezf/combinat.hpp"
#include "cachezf/config.hpp"
#include "cachezf/phy.hpp"
#include "cachezf/placement.hpp"
#include "cachezf/rational.hpp"
#include "cachezf/scheduler.hpp"

namespace cachezf {

/// One demanded packet on the converse side: who caches it (transmitters
/// T_l, receivers R_l) and who wants it. Placement-agnostic: any caching
/// realization reduces to a list of these.
struct PacketInstance {
    int file = 0;
    int packet = 0;               // index within the file, informational
    std::vector<int> tx_holders;  // sorted, nonempty
    std::vector<int> rx_holders;  // sorted
    int intended_rx = 0;          // not in rx_holders

    void validate() const {
        if (tx_holders.empty()) throw std::invalid_argument("packet cached at no transmitter");
        if (std::binary_search(rx_holders.begin(), rx_holders.end(), intended_rx))
            throw std::invalid_argument("packet already cached at its intended receiver");
    }
    auto operator<=>(const PacketInstance&) const = default;
};

/// A set of packets fits into one block iff its size is at most
/// min_l(|T_l| + |R_l|) and the intended receivers are pairwise distinct.
inline bool group_feasible(const std::vector<PacketInstance>& group) {
    const int size = static_cast<int>(group.size());
    std::set<int> receivers;
    for (const auto& p : group) {
        if (!receivers.insert(p.intended_rx).second) return false;
        if (size > static_cast<int>(p.tx_holders.size() + p.rx_holders.size())) return false;
    }
    return true;
}

struct NumericFeasibility {
    bool feasible = false;
    double max_residual = 0.0;  // least-squares residual over the per-packet systems
};

/// Numeric counterpart of group_feasible: builds each packet's nulling
/// system under a concrete channel (unit gain at the intended receiver, zero
/// at every other scheduled receiver that does not cache the packet) and
/// reports the worst least-squares residual. Overdetermined systems of
/// cardinality-infeasible groups stay bounded away from zero for generic
/// channels.
inline NumericFeasibility group_feasible_numeric(const std::vector<PacketInstance>& group, const ChannelMatrix& h,
                                                 double tol = 1e-8) {
    std::set<int> receivers;
    for (const auto& p : group)
        if (!receivers.insert(p.intended_rx).second)
            return {false, std::numeric_limits<double>::infinity()};

    double max_residual = 0.0;
    for (const auto& p : group) {
        std::vector<int> null_at;
        for (int j : receivers)
            if (j != p.intended_rx && !std::binary_search(p.rx_holders.begin(), p.rx_holders.end(), j))
                null_at.push_back(j);
        const int unknowns = static_cast<int>(p.tx_holders.size());
        const int equations = 1 + static_cast<int>(null_at.size());
        Eigen::MatrixXcd mat(equations, unknowns);
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(equations);
        rhs(0) = Complex(1.0, 0.0);
        for (int c = 0; c < unknowns; ++c) mat(0, c) = h.gain(p.intended_rx, p.tx_holders[c]);
        for (std::size_t r = 0; r < null_at.size(); ++r)
            for (int c = 0; c < unknowns; ++c)
                mat(static_cast<Eigen::Index>(r) + 1, c) = h.gain(null_at[r], p.tx_holders[c]);
        Eigen::VectorXcd v = mat.completeOrthogonalDecomposition().solve(rhs);
        max_residual = std::max(max_residual, (mat * v - rhs).norm());
    }
    return {max_residual < tol, max_residual};
}

inline constexpr int kDefaultExactCap = 20;

namespace detail {

struct PartitionInstance {
    std::vector<int> cap;  // |T_l| + |R_l| per packet
    std::vector<int> rx;   // intended receiver per packet
    int n = 0;
    int max_group_size = 1;

    explicit PartitionInstance(const std::vector<PacketInstance>& packets) {
        n = static_cast<int>(packets.size());
        cap.reserve(n);
        rx.reserve(n);
        for (const auto& p : packets) {
            p.validate();
            cap.push_back(static_cast<int>(p.tx_holders.size() + p.rx_holders.size()));
            rx.push_back(p.intended_rx);
        }
        for (int c : cap) max_group_size = std::max(max_group_size, c);
    }
};

/// Branch-and-bound over feasible first groups: the group must contain the
/// lowest remaining packet (canonical, avoids revisiting permuted
/// partitions), hold distinct receivers, and stay within every member's
/// cardinality cap. States memoize on the remaining-packet bitmask.
///
/// Contract of solve(mask, budget): the exact optimum when it is <= budget,
/// kInfeasible otherwise. Only exact optima enter the memo; a result that
/// merely exceeded the budget is recomputed if a later caller affords more.
class ExactPartitionSolver {
public:
    explicit ExactPartitionSolver(const PartitionInstance& inst) : inst_(inst) {}

    int solve(std::uint32_t mask, int budget) {
        if (mask == 0) return budget >= 0 ? 0 : kInfeasible;
        if (auto it = memo_.find(mask); it != memo_.end()) return it->second <= budget ? it->second : kInfeasible;
        const int remaining = std::popcount(mask);
        const int lower = (remaining + inst_.max_group_size - 1) / inst_.max_group_size;
        if (lower > budget) return kInfeasible;

        const int first = std::countr_zero(mask);
        int best = kInfeasible;
        std::vector<int> group{first};
        search_groups(mask, first, group, inst_.cap[first], best, budget);
        // When best <= budget every cheaper candidate was explored (pruning
        // only discards candidates above min(budget, best)), so it is exact.
        if (best <= budget) {
            memo_[mask] = best;
            return best;
        }
        return kInfeasible;
    }

    static constexpr int kInfeasible = std::numeric_limits<int>::max() / 2;

private:
    void search_groups(std::uint32_t mask, int last, std::vector<int>& group, int min_cap, int& best, int budget) {
        // Every prefix with distinct receivers and size <= min cap is itself
        // a feasible group; recurse on the complement before growing.
        std::uint32_t group_mask = 0;
        for (int g : group) group_mask |= (1u << g);
        const int rest = solve(mask ^ group_mask, std::min(budget, best) - 1);
        if (rest != kInfeasible) best = std::min(best, 1 + rest);

        if (static_cast<int>(group.size()) >= min_cap) return;  // cannot grow further
        for (int q = last + 1; q < inst_.n; ++q) {
            if (!(mask & (1u << q))) continue;
            const int new_cap = std::min(min_cap, inst_.cap[q]);
            if (static_cast<int>(group.size()) + 1 > new_cap) continue;
            bool rx_clash = false;
            for (int g : group)
                if (inst_.rx[g] == inst_.rx[q]) {
                    rx_clash = true;
                    break;
                }
            if (rx_clash) continue;
            group.push_back(q);
            search_groups(mask, q, group, new_cap, best, budget);
            group.pop_back();
        }
    }

    const PartitionInstance& inst_;
    std::unordered_map<std::uint32_t, int> memo_;
};

}  // namespace detail

/// Upper bound on the optimum of the min-block program by repeatedly
/// extracting a maximum-size feasible group from the remaining packets.
inline int min_blocks_greedy(const std::vector<PacketInstance>& packets) {
    if (packets.empty()) return 0;
    detail::PartitionInstance inst(packets);
    std::vector<int> remaining(inst.n);
    for (int i = 0; i < inst.n; ++i) remaining[i] = i;

    int blocks = 0;
    while (!remaining.empty()) {
        // DFS for a maximum-cardinality feasible subset of `remaining`.
        std::vector<int> best_group, group;
        auto grow = [&](auto&& self, std::size_t from, int min_cap) -> void {
            if (group.size() > best_group.size()) best_group = group;
            for (std::size_t k = from; k < remaining.size(); ++k) {
                const int q = remaining[k];
                const int new_cap = std::min(min_cap, inst.cap[q]);
                if (static_cast<int>(group.size()) + 1 > new_cap) continue;
                bool rx_clash = false;
                for (int g : group)
                    if (inst.rx[g] == inst.rx[q]) {
                        rx_clash = true;
                        break;
                    }
                if (rx_clash) continue;
                group.push_back(q);
                self(self, k + 1, new_cap);
                group.pop_back();
            }
        };
        grow(grow, 0, inst.max_group_size);
        std::vector<int> next;
        for (int q : remaining)
            if (std::find(best_group.begin(), best_group.end(), q) == best_group.end()) next.push_back(q);
        remaining = std::move(next);
        ++blocks;
    }
    return blocks;
}

/// Exact minimum number of blocks needed to deliver the packets, i.e. the
/// optimum of the min-block integer program under the cardinality
/// feasibility rule. Memoized branch-and-bound over the packet bitmask;
/// refuses instances above `cap` packets.
inline int min_blocks_exact(const std::vector<PacketInstance>& packets, int cap = kDefaultExactCap) {
    if (packets.empty()) return 0;
    if (static_cast<int>(packets.size()) > cap)
        throw std::invalid_argument("min_blocks_exact: instance exceeds the exact-solve cap of " +
                                    std::to_string(cap) + " packets; use min_blocks_greedy");
    if (packets.size() > 32) throw std::invalid_argument("min_blocks_exact: bitmask solver handles at most 32 packets");
    detail::PartitionInstance inst(packets);
    detail::ExactPartitionSolver solver(inst);
    const int budget = min_blocks_greedy(packets);  // greedy is always achievable
    const std::uint32_t full = inst.n == 32 ? ~0u : ((1u << inst.n) - 1);
    const int result = solver.solve(full, budget);
    if (result == detail::ExactPartitionSolver::kInfeasible)
        throw std::logic_error("min_blocks_exact: no feasible partition found");  // cannot happen: singletons work
    return result;
}

/// Packet counts a_{n,T,R} of an arbitrary caching realization, keyed by
/// (file, transmitter mask, receiver mask). Masks use bit i-1 for node i.
struct PlacementProfile {
    int k_t = 0;
    int k_r = 0;
    int n_files = 0;
    long long f_packets = 0;
    std::map<std::tuple<int, std::uint32_t, std::uint32_t>, long long> counts;

    long long count(int file, std::uint32_t tx_mask, std::uint32_t rx_mask) const {
        auto it = counts.find({file, tx_mask, rx_mask});
        return it == counts.end() ? 0 : it->second;
    }
};

inline std::uint32_t mask_of(const std::vector<int>& set) {
    std::uint32_t m = 0;
    for (int i : set) m |= (1u << (i - 1));
    return m;
}

inline std::vector<int> set_of(std::uint32_t mask) {
    std::vector<int> out;
    for (int i = 0; mask >> i; ++i)
        if (mask & (1u << i)) out.push_back(i + 1);
    return out;
}

/// The profile induced by the combinatorial placement: every (T, R) pair
/// with |T| = t_T, |R| = t_R holds the same number of packets of each file.
inline PlacementProfile profile_from_placement(const NetworkConfig& cfg) {
    const CachePlacement placement = build_placement(cfg);
    PlacementProfile profile;
    profile.k_t = cfg.k_t;
    profile.k_r = cfg.k_r;
    profile.n_files = cfg.n_files;
    profile.f_packets = effective_f(cfg);
    for (int n = 1; n <= cfg.n_files; ++n)
        for (const auto& id : split_file(n, cfg))
            profile.counts[{n, mask_of(id.tx_set), mask_of(id.rx_set)}] = placement.packets_per_base_subfile;
    return profile;
}

/// Budget check of a profile against the averaged-program constraints:
/// per-file totals equal F, per-transmitter and per-receiver totals fit the
/// cache sizes. Exact rational comparisons.
struct ProfileAudit {
    bool ok = true;
    std::vector<std::string> violations;
};

inline ProfileAudit validate_profile(const PlacementProfile& profile, const NetworkConfig& cfg) {
    ProfileAudit audit;
    std::vector<long long> per_file(profile.n_files + 1, 0);
    std::vector<long long> per_tx(profile.k_t + 1, 0);
    std::vector<long long> per_rx(profile.k_r + 1, 0);
    for (const auto& [key, count] : profile.counts) {
        const auto& [file, tx_mask, rx_mask] = key;
        if (count < 0) audit.violations.push_back("negative count");
        if (tx_mask == 0) audit.violations.push_back("packet cached at no transmitter");
        per_file[file] += count;
        for (int i = 1; i <= profile.k_t; ++i)
            if (tx_mask & (1u << (i - 1))) per_tx[i] += count;
        for (int j = 1; j <= profile.k_r; ++j)
            if (rx_mask & (1u << (j - 1))) per_rx[j] += count;
    }
    const Rational f(profile.f_packets);
    for (int n = 1; n <= profile.n_files; ++n)
        if (Rational(per_file[n]) != f) audit.violations.push_back("file " + std::to_string(n) + " total != F");
    for (int i = 1; i <= profile.k_t; ++i)
        if (Rational(per_tx[i]) > cfg.m_t * f)
            audit.violations.push_back("transmitter " + std::to_string(i) + " over budget");
    for (int j = 1; j <= profile.k_r; ++j)
        if (Rational(per_rx[j]) > cfg.m_r * f)
            audit.violations.push_back("receiver " + std::to_string(j) + " over budget");
    audit.ok = audit.violations.empty();
    return audit;
}

/// The min-block instance a profile induces for one demand vector: for each
/// receiver, every packet of its file not already in its cache.
inline std::vector<PacketInstance> packets_for_demand(const PlacementProfile& profile, const DemandVector& d) {
    std::vector<PacketInstance> out;
    for (int j = 1; j <= profile.k_r; ++j) {
        const int file = d[j];
        int next_packet = 1;
        for (const auto& [key, count] : profile.counts) {
            const auto& [n, tx_mask, rx_mask] = key;
            if (n != file || count == 0) continue;
            if (rx_mask & (1u << (j - 1))) continue;  // already cached at j
            for (long long c = 0; c < count; ++c)
                out.push_back({file, next_packet++, set_of(tx_mask), set_of(rx_mask), j});
        }
    }
    return out;
}

/// Mean of min_blocks_exact over all N!/(N-K_R)! distinct-demand vectors.
inline Rational average_min_blocks(const PlacementProfile& profile, const NetworkConfig& cfg,
                                   int cap = kDefaultExactCap) {
    if (profile.n_files != cfg.n_files || profile.k_t != cfg.k_t || profile.k_r != cfg.k_r)
        throw std::invalid_argument("average_min_blocks: profile and config dimensions disagree");
    if (profile.n_files < profile.k_r)
        throw std::invalid_argument("average_min_blocks: needs N >= K_R for distinct demands");
    long long total = 0;
    long long count = 0;
    std::vector<int> demand(profile.k_r);
    std::vector<bool> used(profile.n_files + 1, false);
    auto recurse = [&](auto&& self, int pos) -> void {
        if (pos == profile.k_r) {
            total += min_blocks_exact(packets_for_demand(profile, DemandVector{demand}), cap);
            ++count;
            return;
        }
        for (int n = 1; n <= profile.n_files; ++n) {
            if (used[n]) continue;
            used[n] = true;
            demand[pos] = n;
            self(self, pos + 1);
            used[n] = false;
        }
    };
    recurse(recurse, 0);
    return Rational(total, count);
}

/// Closed-form lower bound on the averaged minimum block count:
/// K_R * N * F * (1 - M_R/N)^2 / (K_T*M_T + K_R*M_R).
inline Rational analytic_block_lb(const NetworkConfig& cfg, long long f) {
    const Rational one_minus = Rational(1) - cfg.m_r / Rational(cfg.n_files);
    return Rational(cfg.k_r) * Rational(cfg.n_files) * Rational(f) * one_minus * one_minus /
           (Rational(cfg.k_t) * cfg.m_t + Rational(cfg.k_r) * cfg.m_r);
}

inline Rational analytic_block_lb(const NetworkConfig& cfg) {
    long long f = cfg.f_packets;
    if (f == 0) f = cfg.integral_t() && cfg.t_t() + cfg.t_r() <= Rational(cfg.k_r) ? minimal_f(cfg) : 1;
    return analytic_block_lb(cfg, f);
}

/// Order-(r, r') cache-mass aggregates b_{r,r'} = (K_R - r') * total packets
/// stored at exactly r transmitters and r' receivers; diagnostic for the
/// aggregate budget inequality below.
inline std::vector<std::vector<long long>> order_aggregates(const PlacementProfile& profile) {
    std::vector<std::vector<long long>> b(profile.k_t + 1, std::vector<long long>(profile.k_r, 0));
    for (const auto& [key, count] : profile.counts) {
        const auto& [n, tx_mask, rx_mask] = key;
        const int r = std::popcount(tx_mask);
        const int r_prime = std::popcount(rx_mask);
        if (r_prime >= profile.k_r) continue;  // the r' = K_R mass never needs delivery
        b[r][r_prime] += (profile.k_r - r_prime) * count;
    }
    return b;
}

/// The aggregate cache-size inequality the analytic bound rests on:
/// (K_T*M_T + K_R*M_R) * F >= sum_{r,r'} (r + r') / (K_R - r') * b_{r,r'}.
inline bool check_aggregate_budget(const PlacementProfile& profile, const NetworkConfig& cfg) {
    const auto b = order_aggregates(profile);
    Rational rhs(0);
    for (int r = 1; r <= profile.k_t; ++r)
        for (int r_prime = 0; r_prime < profile.k_r; ++r_prime)
            rhs += Rational(r + r_prime, profile.k_r - r_prime) * Rational(b[r][r_prime]);
    const Rational lhs = (Rational(cfg.k_t) * cfg.m_t + Rational(cfg.k_r) * cfg.m_r) * Rational(profile.f_packets);
    return lhs >= rhs;
}

/// Achievable and converse sum-DoF for a config, with the factor-2 gap.
struct BoundsReport {
    Rational dof_lower{0};        // min{(K_T*M_T + K_R*M_R)/N, K_R}
    Rational dof_upper{0};        // min{(K_T*M_T + K_R*M_R)/(N - M_R), 2*lower-numerator/N, K_R}
    Rational gap_ratio{0};        // dof_upper / dof_lower
    Rational analytic_blocks{0};  // closed-form block lower bound at this config's F
    bool no_delivery = false;     // M_R = N: receivers already hold everything
};

inline BoundsReport dof_bounds(const NetworkConfig& cfg) {
    cfg.validate();
    BoundsReport report;
    const Rational aggregate = Rational(cfg.k_t) * cfg.m_t + Rational(cfg.k_r) * cfg.m_r;
    const Rational n(cfg.n_files);
    const Rational k_r(cfg.k_r);

    report.dof_lower = std::min(aggregate / n, k_r);
    report.dof_upper = std::min(Rational(2) * aggregate / n, k_r);
    if (cfg.m_r < n) report.dof_upper = std::min(report.dof_upper, aggregate / (n - cfg.m_r));
    report.no_delivery = cfg.m_r == n;
    report.gap_ratio = report.dof_upper / report.dof_lower;
    report.analytic_blocks = analytic_block_lb(cfg);
    return report;
}

}  // namespace cachezf
