#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cachezf/combinat.hpp"
#include "cachezf/config.hpp"
#include "cachezf/placement.hpp"
#include "cachezf/rational.hpp"

namespace cachezf {

/// One requested file index per receiver; repetitions are allowed.
struct DemandVector {
    std::vector<int> demands;  // length K_R, entries in [1, N]

    void validate(const NetworkConfig& cfg) const {
        if (static_cast<int>(demands.size()) != cfg.k_r)
            throw std::invalid_argument("demand vector must have one entry per receiver");
        for (int d : demands)
            if (d < 1 || d > cfg.n_files) throw std::invalid_argument("demand out of library range");
    }
    int operator[](int rx) const { return demands[rx - 1]; }  // 1-based receiver index
};

/// One communication step: a base transmitter set T, a receiver set R of
/// size t_T + t_R, and a circular permutation pi of R in canonical rotation.
struct DeliveryGroup {
    std::vector<int> base_tx_set;  // sorted, size t_T
    std::vector<int> rx_set;       // sorted, size t_T + t_R
    std::vector<int> circ_perm;    // permutation of rx_set, starts at min
    auto operator<=>(const DeliveryGroup&) const = default;
};

/// One packet within a delivery group: slot l serves receiver pi(l) with the
/// subfile determined by the cyclic window rules.
struct PacketAssignment {
    int slot = 0;  // l in [1, t_T + t_R]
    int rx = 0;    // pi(l)
    RefinedSubfileId subfile;
    auto operator<=>(const PacketAssignment&) const = default;
};

/// A full delivery plan: groups in enumeration order plus their expanded
/// packet assignments. Each group spans blocks_per_group channel blocks.
struct Schedule {
    NetworkConfig cfg;
    DemandVector demand;
    std::vector<DeliveryGroup> groups;
    std::vector<std::vector<PacketAssignment>> assignments;  // aligned with groups
    long long blocks_per_group = 0;
    long long delivered = 0;  // total packets over all blocks

    long long total_blocks() const { return static_cast<long long>(groups.size()) * blocks_per_group; }
};

/// Every refined subfile that must go over the air for demand d: for each
/// receiver j, all refinements of the base subfiles of W_{d_j} that j does
/// not cache.
inline std::vector<RefinedSubfileId> needed_subfiles(const DemandVector& d, const NetworkConfig& cfg) {
    d.validate(cfg);
    const int t_t = cfg.t_t_int();
    const int t_r = cfg.t_r_int();
    if (t_t + t_r > cfg.k_r) throw std::domain_error("needed_subfiles: t_T + t_R > K_R; saturate first");
    std::vector<RefinedSubfileId> out;
    for (int j = 1; j <= cfg.k_r; ++j) {
        for (const auto& base : split_file(d[j], cfg)) {
            if (std::binary_search(base.rx_set.begin(), base.rx_set.end(), j)) continue;
            for (auto& refined : refine_subfile(base, j, cfg)) out.push_back(std::move(refined));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// All delivery groups for a config, independent of the demand:
/// C(K_T,t_T) * C(K_R,t_T+t_R) * (t_T+t_R-1)! of them, in deterministic
/// (T, R, pi) lexicographic order.
inline std::vector<DeliveryGroup> enumerate_groups(const NetworkConfig& cfg) {
    const int t_t = cfg.t_t_int();
    const int t_r = cfg.t_r_int();
    if (t_t + t_r > cfg.k_r) throw std::domain_error("enumerate_groups: t_T + t_R > K_R; saturate first");
    std::vector<DeliveryGroup> out;
    for (const auto& t : combinat::k_subsets(cfg.k_t, t_t))
        for (const auto& r : combinat::k_subsets(cfg.k_r, t_t + t_r))
            for (const auto& pi : combinat::circular_permutations(r)) out.push_back({t, r, pi});
    return out;
}

/// Expands a group to its t_T + t_R packet assignments. Slot l serves
/// receiver pi(l) with the subfile of W_{d_pi(l)} held by the shifted
/// transmitter set T (+) (l-1), cached at the next t_R receivers around the
/// circle and zero-forced at the t_T - 1 after those.
inline std::vector<PacketAssignment> expand_group(const DeliveryGroup& g, const DemandVector& d,
                                                  const NetworkConfig& cfg) {
    const int t_t = cfg.t_t_int();
    const int t_r = cfg.t_r_int();
    const int group_size = t_t + t_r;
    std::vector<PacketAssignment> out;
    out.reserve(group_size);
    for (int l = 1; l <= group_size; ++l) {
        const int rx = g.circ_perm[l - 1];
        RefinedSubfileId subfile;
        subfile.file = d[rx];
        subfile.intended_rx = rx;
        subfile.tx_set = combinat::shift_set(g.base_tx_set, l - 1, cfg.k_t);
        subfile.cached_at = combinat::perm_window(g.circ_perm, l + 1, l + t_r);
        subfile.nulled_at = combinat::perm_window(g.circ_perm, l + t_r + 1, l + t_r + t_t - 1);
        out.push_back({l, rx, std::move(subfile)});
    }
    return out;
}

/// Builds the full delivery schedule and verifies the partition property:
/// the expanded assignments must equal needed_subfiles(d, cfg) exactly, with
/// no duplicates and no omissions. A mismatch is an internal bug, never an
/// expected outcome.
inline Schedule schedule(const DemandVector& d, const NetworkConfig& cfg) {
    d.validate(cfg);
    Schedule s;
    s.cfg = cfg;
    s.demand = d;
    s.groups = enumerate_groups(cfg);
    s.assignments.reserve(s.groups.size());
    std::vector<RefinedSubfileId> scheduled;
    for (const auto& g : s.groups) {
        auto expanded = expand_group(g, d, cfg);
        for (const auto& a : expanded) scheduled.push_back(a.subfile);
        s.assignments.push_back(std::move(expanded));
    }
    std::sort(scheduled.begin(), scheduled.end());
    if (std::adjacent_find(scheduled.begin(), scheduled.end()) != scheduled.end())
        throw std::logic_error("schedule: a refined subfile was assigned twice");
    if (scheduled != needed_subfiles(d, cfg))
        throw std::logic_error("schedule: expanded assignments do not partition the needed subfiles");

    s.blocks_per_group = effective_f(cfg) / minimal_f(cfg);
    s.delivered = static_cast<long long>(scheduled.size()) * s.blocks_per_group;
    return s;
}

/// Delivered packets per block. Empty schedules (nothing to deliver) return
/// nullopt rather than a number.
inline std::optional<Rational> measured_dof(const Schedule& s) {
    if (s.total_blocks() == 0 && s.delivered == 0) return std::nullopt;
    return Rational(s.delivered, s.total_blocks());
}

/// Which side's caches to shrink first when a config is oversized.
enum class SaturationOrder {
    kReceiverFirst,     // default: keep the stronger transmit zero-forcing
    kTransmitterFirst,  // keep the receiver-side cancellation instead
};

/// Shrinks cache sizes of an oversized config (t_T + t_R > K_R) until
/// t'_T + t'_R = K_R: serving more than K_R receivers at once is impossible,
/// so the surplus memory is deliberately unused.
inline NetworkConfig saturate(const NetworkConfig& cfg,
                              SaturationOrder order = SaturationOrder::kReceiverFirst) {
    cfg.validate();
    const Rational n(cfg.n_files), k_r(cfg.k_r);
    if (cfg.t_t() + cfg.t_r() <= k_r) throw std::domain_error("saturate: config is not oversized");
    NetworkConfig out = cfg;
    if (order == SaturationOrder::kReceiverFirst) {
        if (cfg.t_t() <= k_r) {
            // Keeping M_T intact, the receiver share that still fits is
            // M'_R = (N*K_R - K_T*M_T) / K_R, floored at zero.
            out.m_r = std::max((n * k_r - Rational(cfg.k_t) * cfg.m_t) / k_r, Rational(0));
        } else {
            out.m_t = n * k_r / Rational(cfg.k_t);
            out.m_r = Rational(0);
        }
    } else {
        if (k_r - cfg.t_r() >= Rational(1)) {
            // Keeping M_R intact, shrink M_T until t'_T = K_R - t_R >= 1.
            out.m_t = k_r * (n - cfg.m_r) / Rational(cfg.k_t);
        } else {
            // Even the minimum transmitter share t'_T = 1 forces a trim of M_R.
            out.m_t = n / Rational(cfg.k_t);
            out.m_r = n * (k_r - Rational(1)) / k_r;
        }
    }
    out.validate();
    return out;
}

/// One integer-replication corner of a memory-sharing decomposition.
/// A corner whose f_share rounds to zero receives no packets at the given F
/// and is skipped during delivery; it still participates in the weight
/// reconstruction identity.
struct MemoryShare {
    Rational weight{0};        // fraction of the library handled by this corner
    NetworkConfig sub_config;  // integral t_T, t_R
    long long f_share = 0;     // packets per file, rounded to the corner's minimal F
    Rational rounding_slack{0};  // f_share - weight * F, zero when F divides evenly
};

/// Decomposes a config with fractional replication factors into at most four
/// integer corners (floor/ceil of t_T cross floor/ceil of t_R) with bilinear
/// weights. The weighted corner t values reconstruct the originals exactly;
/// packet shares are rounded to each corner's own granularity and the slack
/// is reported.
inline std::vector<MemoryShare> plan_memory_sharing(const NetworkConfig& cfg) {
    cfg.validate();
    if (cfg.t_t() + cfg.t_r() > Rational(cfg.k_r))
        throw std::domain_error("plan_memory_sharing: saturate the config first");
    const Rational t_t = cfg.t_t();
    const Rational t_r = cfg.t_r();
    const long long a0 = rat_floor(t_t), a1 = rat_ceil(t_t);
    const long long b0 = rat_floor(t_r), b1 = rat_ceil(t_r);
    const Rational alpha = t_t - Rational(a0);
    const Rational beta = t_r - Rational(b0);

    const Rational total_f(cfg.f_packets > 0 ? cfg.f_packets : 0);
    struct Corner {
        long long tt, tr;
        Rational weight;
    };
    const Corner corners[] = {
        {a0, b0, (Rational(1) - alpha) * (Rational(1) - beta)},
        {a1, b0, alpha * (Rational(1) - beta)},
        {a0, b1, (Rational(1) - alpha) * beta},
        {a1, b1, alpha * beta},
    };
    std::vector<MemoryShare> out;
    for (const auto& c : corners) {
        if (c.weight == Rational(0)) continue;
        MemoryShare share;
        share.weight = c.weight;
        share.sub_config.k_t = cfg.k_t;
        share.sub_config.k_r = cfg.k_r;
        share.sub_config.n_files = cfg.n_files;
        share.sub_config.m_t = Rational(c.tt) * Rational(cfg.n_files) / Rational(cfg.k_t);
        share.sub_config.m_r = Rational(c.tr) * Rational(cfg.n_files) / Rational(cfg.k_r);
        // A ceiling corner may overshoot K_R; it is delivered through its
        // saturated form, whose granularity applies.
        const bool fits = c.tt + c.tr <= cfg.k_r;
        const long long unit = minimal_f(fits ? share.sub_config : saturate(share.sub_config));
        if (total_f > Rational(0)) {
            const Rational ideal = c.weight * total_f;
            share.f_share = rat_round(ideal / Rational(unit)) * unit;
            share.rounding_slack = Rational(share.f_share) - ideal;
        } else {
            share.f_share = unit;
            share.rounding_slack = Rational(0);
        }
        share.sub_config.f_packets = share.f_share;
        out.push_back(std::move(share));
    }
    return out;
}

}  // namespace cachezf
