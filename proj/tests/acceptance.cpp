// Acceptance suite: end-to-end checks of the delivery scheme against its
// known-good worked-example structure and of the converse machinery against
// independent oracles. Prints one PASS/FAIL line per criterion; exit code is the number
// of failures. Usage: acceptance [data-dir] (default: ./data).

#include <bit>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "cachezf/converse.hpp"
#include "cachezf/json_io.hpp"
#include "cachezf/phy.hpp"
#include "cachezf/scheduler.hpp"

using namespace cachezf;

namespace {

struct CriterionResult {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

// The integer-replication sweep shared by criteria 2, 3, and 8:
// K_T, K_R in [1..4], all integer (t_T, t_R), realized with N = K_T * K_R.
struct SweepEntry {
    NetworkConfig cfg;
    int t_t, t_r;
    bool oversized;  // t_T + t_R > K_R, routed through saturate
};

std::vector<SweepEntry> integer_sweep(bool include_oversized) {
    std::vector<SweepEntry> out;
    for (int k_t = 1; k_t <= 4; ++k_t)
        for (int k_r = 1; k_r <= 4; ++k_r)
            for (int t_t = 1; t_t <= k_t; ++t_t)
                for (int t_r = 0; t_r <= k_r; ++t_r) {
                    const bool oversized = t_t + t_r > k_r;
                    if (oversized && !include_oversized) continue;
                    out.push_back({{k_t, k_r, k_t * k_r, Rational(t_t * k_r), Rational(t_r * k_t), 0},
                                   t_t, t_r, oversized});
                }
    return out;
}

DemandVector random_demand(const NetworkConfig& cfg, std::mt19937_64& rng) {
    DemandVector d;
    for (int j = 0; j < cfg.k_r; ++j) d.demands.push_back(1 + static_cast<int>(rng() % cfg.n_files));
    return d;
}

// ---------------------------------------------------------------------------
// Independent min-block oracle: exhaustive memoized dynamic program over the
// packet bitmask. Enumerates every feasible first group and recurses on the
// complement; no greedy seeding, no lower bound, no branch-and-bound.
class DpOracle {
public:
    explicit DpOracle(const std::vector<PacketInstance>& packets) {
        n_ = static_cast<int>(packets.size());
        for (const auto& p : packets) {
            cap_.push_back(static_cast<int>(p.tx_holders.size() + p.rx_holders.size()));
            rx_.push_back(p.intended_rx);
        }
    }

    int solve(std::uint32_t mask) {
        if (mask == 0) return 0;
        if (auto it = memo_.find(mask); it != memo_.end()) return it->second;
        const int first = std::countr_zero(mask);
        int best = std::numeric_limits<int>::max() / 2;
        std::vector<int> group{first};
        enumerate(mask, first, group, cap_[first], best);
        memo_[mask] = best;
        return best;
    }

    int run() { return n_ == 0 ? 0 : solve((1u << n_) - 1); }

private:
    void enumerate(std::uint32_t mask, int last, std::vector<int>& group, int min_cap, int& best) {
        std::uint32_t group_mask = 0;
        for (int g : group) group_mask |= (1u << g);
        best = std::min(best, 1 + solve(mask ^ group_mask));
        if (static_cast<int>(group.size()) >= min_cap) return;
        for (int q = last + 1; q < n_; ++q) {
            if (!(mask & (1u << q))) continue;
            const int new_cap = std::min(min_cap, cap_[q]);
            if (static_cast<int>(group.size()) + 1 > new_cap) continue;
            bool clash = false;
            for (int g : group) clash = clash || rx_[g] == rx_[q];
            if (clash) continue;
            group.push_back(q);
            enumerate(mask, q, group, new_cap, best);
            group.pop_back();
        }
    }

    int n_ = 0;
    std::vector<int> cap_, rx_;
    std::unordered_map<std::uint32_t, int> memo_;
};

// Literal partition enumeration for tiny instances: recursion over vectors,
// no bitmasks, no memoization.
int tiny_partition_oracle(const std::vector<PacketInstance>& packets) {
    if (packets.empty()) return 0;
    int best = std::numeric_limits<int>::max();
    const int n = static_cast<int>(packets.size());
    for (std::uint32_t bits = 0; bits < (1u << (n - 1)); ++bits) {
        std::vector<PacketInstance> group{packets[0]}, rest;
        for (int i = 1; i < n; ++i)
            (bits & (1u << (i - 1))) ? group.push_back(packets[i]) : rest.push_back(packets[i]);
        if (!group_feasible(group)) continue;
        best = std::min(best, 1 + tiny_partition_oracle(rest));
    }
    return best;
}

P1Instance load_instance(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open bundled instance: " + path);
    Json j;
    f >> j;
    return instance_from_json(j);
}

// ---------------------------------------------------------------- criteria

CriterionResult criterion_1_demo() {
    CriterionResult r;
    const NetworkConfig cfg{3, 3, 3, Rational(2), Rational(1), 9};
    const DemandVector d{{1, 2, 3}};

    for (int n = 1; n <= 3; ++n) r.require(split_file(n, cfg).size() == 9, "expected 9 base subfiles per file");
    r.require(needed_subfiles(d, cfg).size() == 18, "expected 18 needed subfiles");

    const auto s = schedule(d, cfg);
    r.require(s.groups.size() == 6, "expected 6 delivery groups");
    for (const auto& group : s.assignments) r.require(group.size() == 3, "expected groups of 3");

    // The canonical first step {A_{12,2}, B_{23,3}, C_{13,1}} must appear verbatim.
    using Triple = std::tuple<int, std::vector<int>, std::vector<int>>;
    const std::set<Triple> step_a = {{1, {1, 2}, {2}}, {2, {2, 3}, {3}}, {3, {1, 3}, {1}}};
    bool found = false;
    for (const auto& group : s.assignments) {
        std::set<Triple> got;
        for (const auto& a : group) got.insert({a.subfile.file, a.subfile.tx_set, a.subfile.cached_at});
        found = found || got == step_a;
    }
    r.require(found, "the canonical first delivery step does not appear");
    r.require(measured_dof(s) == Rational(3), "measured sum-DoF must be exactly 3");
    return r;
}

CriterionResult criterion_2_zero_forcing() {
    CriterionResult r;
    std::mt19937_64 rng(2024);
    for (const auto& entry : integer_sweep(false)) {
        for (int di = 0; di < 5; ++di) {
            const auto d = random_demand(entry.cfg, rng);
            const auto s = schedule(d, entry.cfg);
            for (std::uint64_t seed = 1; seed <= 5; ++seed) {
                const auto report = verify_schedule_seeded(s, d, seed, entry.cfg);
                std::ostringstream at;
                at << "K_T=" << entry.cfg.k_t << " K_R=" << entry.cfg.k_r << " t_T=" << entry.t_t
                   << " t_R=" << entry.t_r << " seed=" << seed;
                r.require(report.ok, "non-decodable block at " + at.str());
                r.require(report.max_post_cancel_residual < 1e-8, "post-cancel residual over 1e-8 at " + at.str());
                r.require(report.max_backsub_residual < 1e-10, "back-substitution residual over 1e-10 at " + at.str());
            }
        }
    }
    return r;
}

CriterionResult criterion_3_dof_formula() {
    CriterionResult r;
    std::mt19937_64 rng(2025);
    for (const auto& entry : integer_sweep(true)) {
        const NetworkConfig scheduled = entry.oversized ? saturate(entry.cfg) : entry.cfg;
        const auto d = random_demand(scheduled, rng);
        const auto dof = measured_dof(schedule(d, scheduled));
        const Rational expected =
            std::min(entry.cfg.t_t() + entry.cfg.t_r(), Rational(entry.cfg.k_r));
        std::ostringstream at;
        at << "K_T=" << entry.cfg.k_t << " K_R=" << entry.cfg.k_r << " t_T=" << entry.t_t
           << " t_R=" << entry.t_r;
        r.require(dof.has_value() && *dof == expected, "measured DoF != formula at " + at.str());
    }
    return r;
}

CriterionResult criterion_4_exact_converse(const std::string& data_dir) {
    CriterionResult r;
    const auto inst_3x3 = load_instance(data_dir + "/instances/p1_3x3.json");
    const auto inst_2x2 = load_instance(data_dir + "/instances/p1_2x2.json");
    const auto inst_mixed = load_instance(data_dir + "/instances/p1_mixed_small.json");

    for (const auto* inst : {&inst_3x3, &inst_2x2, &inst_mixed}) {
        r.require(inst->packets.size() <= 18, "bundled instance larger than 18 packets");
        const int exact = min_blocks_exact(inst->packets, 18);
        r.require(exact == DpOracle(inst->packets).run(), "exact solver disagrees with the exhaustive DP oracle");
        if (inst->packets.size() <= 8)
            r.require(exact == tiny_partition_oracle(inst->packets),
                      "exact solver disagrees with the literal partition enumeration");
        r.require(min_blocks_greedy(inst->packets) >= exact, "greedy fell below the exact optimum");
    }

    r.require(min_blocks_exact(inst_3x3.packets, 18) == 6, "3x3 instance optimum must be 6");
    r.require(min_blocks_exact(inst_2x2.packets, 18) == 2, "2x2 instance optimum must be 2");
    r.require(schedule(*inst_3x3.demand, *inst_3x3.config).total_blocks() == 6,
              "3x3 scheduler must attain 6 blocks");
    r.require(schedule(*inst_2x2.demand, *inst_2x2.config).total_blocks() == 2,
              "2x2 scheduler must attain 2 blocks");
    return r;
}

CriterionResult criterion_5_analytic_ordering(const std::string& data_dir) {
    CriterionResult r;
    for (const std::string name : {"p1_3x3", "p1_2x2", "p1_mixed_small"}) {
        const auto inst = load_instance(data_dir + "/instances/" + name + ".json");
        r.require(inst.config.has_value() && inst.profile.has_value(), name + ": missing config or profile");
        const Rational analytic = analytic_block_lb(*inst.config, inst.profile->f_packets);
        const Rational average = average_min_blocks(*inst.profile, *inst.config, 18);
        r.require(analytic <= average, name + ": analytic bound exceeds the averaged optimum");
        if (name == "p1_3x3")
            r.require(analytic == Rational(4) && average == Rational(6), "3x3 values must be 4 <= 6");
    }
    return r;
}

CriterionResult criterion_6_factor_two() {
    CriterionResult r;
    for (int k_t = 1; k_t <= 6; ++k_t)
        for (int k_r = 1; k_r <= 6; ++k_r)
            for (int n = 1; n <= 6; ++n)
                for (int m_t = (n + k_t - 1) / k_t; m_t <= n; ++m_t)
                    for (int m_r = 0; m_r <= n; ++m_r) {
                        const NetworkConfig cfg{k_t, k_r, n, Rational(m_t), Rational(m_r), 0};
                        const auto report = dof_bounds(cfg);
                        std::ostringstream at;
                        at << "K_T=" << k_t << " K_R=" << k_r << " N=" << n << " M_T=" << m_t
                           << " M_R=" << m_r;
                        r.require(report.dof_lower <= report.dof_upper, "bounds inverted at " + at.str());
                        r.require(report.dof_upper <= Rational(2) * report.dof_lower,
                                  "gap above 2 at " + at.str());
                    }
    return r;
}

CriterionResult criterion_7_necessity() {
    CriterionResult r;
    std::mt19937_64 rng(777);

    // 100 cardinality-infeasible groups: residual bounded away from zero.
    for (int trial = 0; trial < 100; ++trial) {
        const auto h = gen_channel(5000 + trial, 6, 6);
        const int size = 2 + static_cast<int>(rng() % 5);
        std::vector<PacketInstance> group;
        for (int i = 0; i < size; ++i) {
            std::vector<int> tx;
            const int tx_size = 1 + static_cast<int>(rng() % 3);
            while (static_cast<int>(tx.size()) < tx_size) {
                const int t = 1 + static_cast<int>(rng() % 6);
                if (std::find(tx.begin(), tx.end(), t) == tx.end()) tx.push_back(t);
            }
            std::sort(tx.begin(), tx.end());
            group.push_back({1, i + 1, tx, {}, i + 1});
        }
        // Force the cardinality violation through one weak member.
        group[rng() % size].tx_holders = {1 + static_cast<int>(rng() % 6)};
        group[rng() % size].rx_holders = {};
        bool violated = false;
        for (const auto& p : group)
            violated = violated || static_cast<int>(p.tx_holders.size() + p.rx_holders.size()) < size;
        if (!violated) group[0].tx_holders = {1};
        r.require(!group_feasible(group), "constructed group unexpectedly feasible");
        const auto numeric = group_feasible_numeric(group, h);
        r.require(!numeric.feasible && numeric.max_residual > 1e-6,
                  "infeasible group " + std::to_string(trial) + " has residual " +
                      std::to_string(numeric.max_residual));
    }

    // 100 groups built by the delivery scheme: exactly solvable.
    const auto entries = integer_sweep(false);
    for (int trial = 0; trial < 100; ++trial) {
        const auto& entry = entries[trial % entries.size()];
        const auto d = random_demand(entry.cfg, rng);
        const auto s = schedule(d, entry.cfg);
        const auto& group = s.assignments[rng() % s.assignments.size()];
        std::vector<PacketInstance> packets;
        for (const auto& a : group) {
            std::vector<int> rx = a.subfile.cached_at;
            std::sort(rx.begin(), rx.end());
            packets.push_back({a.subfile.file, a.slot, a.subfile.tx_set, rx, a.rx});
        }
        r.require(group_feasible(packets), "scheme group failed the cardinality rule");
        const auto numeric = group_feasible_numeric(packets, gen_channel(9000 + trial, entry.cfg));
        r.require(numeric.feasible && numeric.max_residual < 1e-10,
                  "scheme group " + std::to_string(trial) + " has residual " +
                      std::to_string(numeric.max_residual));
    }
    return r;
}

CriterionResult criterion_8_properties() {
    CriterionResult r;
    std::mt19937_64 rng(4096);
    for (const auto& entry : integer_sweep(false)) {
        const auto& cfg = entry.cfg;
        std::ostringstream at;
        at << "K_T=" << cfg.k_t << " K_R=" << cfg.k_r << " t_T=" << entry.t_t << " t_R=" << entry.t_r;

        // Counting identity: groups * (t_T + t_R) matches both closed forms.
        const auto groups = enumerate_groups(cfg);
        const long long per_group = entry.t_t + entry.t_r;
        const long long via_groups =
            combinat::binomial(cfg.k_t, entry.t_t) * combinat::binomial(cfg.k_r, per_group) *
            combinat::factorial(static_cast<int>(per_group) - 1) * per_group;
        const long long via_needs = static_cast<long long>(cfg.k_r) *
                                    combinat::binomial(cfg.k_t, entry.t_t) *
                                    combinat::binomial(cfg.k_r - 1, entry.t_r) * refinement_factor(cfg);
        r.require(static_cast<long long>(groups.size()) * per_group == via_groups,
                  "group count identity broken at " + at.str());
        r.require(via_groups == via_needs, "counting identity broken at " + at.str());

        // Partition property, re-checked independently of schedule().
        const auto d = random_demand(cfg, rng);
        std::vector<RefinedSubfileId> expanded;
        for (const auto& g : groups)
            for (const auto& a : expand_group(g, d, cfg)) expanded.push_back(a.subfile);
        std::sort(expanded.begin(), expanded.end());
        const bool no_dupes = std::adjacent_find(expanded.begin(), expanded.end()) == expanded.end();
        r.require(no_dupes, "duplicate scheduled subfile at " + at.str());
        r.require(expanded == needed_subfiles(d, cfg), "partition property broken at " + at.str());

        // Budget equality.
        const auto audit = audit_budgets(build_placement(cfg), cfg);
        r.require(audit.ok, "budget violation at " + at.str());
        for (long long packets : audit.tx_packets)
            r.require(Rational(packets) == audit.tx_budget, "transmitter budget not met with equality at " + at.str());
        for (long long packets : audit.rx_packets)
            r.require(Rational(packets) == audit.rx_budget, "receiver budget not met with equality at " + at.str());
    }

    // Memory-sharing weight reconstruction over all integer cache-size grids.
    for (int k_t = 1; k_t <= 4; ++k_t)
        for (int k_r = 1; k_r <= 4; ++k_r) {
            const int n = k_t * k_r;
            for (int m_t = (n + k_t - 1) / k_t; m_t <= n; ++m_t)
                for (int m_r = 0; m_r <= n; ++m_r) {
                    const NetworkConfig cfg{k_t, k_r, n, Rational(m_t), Rational(m_r), 0};
                    if (cfg.t_t() + cfg.t_r() > Rational(k_r)) continue;
                    const auto shares = plan_memory_sharing(cfg);
                    Rational weight(0), t_t(0), t_r(0);
                    for (const auto& share : shares) {
                        r.require(share.weight > Rational(0), "nonpositive memory-sharing weight");
                        weight += share.weight;
                        t_t += share.weight * share.sub_config.t_t();
                        t_r += share.weight * share.sub_config.t_r();
                    }
                    r.require(weight == Rational(1), "memory-sharing weights do not sum to 1");
                    r.require(t_t == cfg.t_t() && t_r == cfg.t_r(),
                              "memory-sharing does not reconstruct the replication factors");
                }
        }
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string data_dir = argc > 1 ? argv[1] : "data";

    struct Criterion {
        int id;
        std::string name;
        double budget_seconds;
        std::function<CriterionResult()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "3x3 worked example: subfiles, partition, sum-DoF 3", 1.0, criterion_1_demo},
        {2, "zero-forcing verification sweep (residuals under tolerance)", 60.0, criterion_2_zero_forcing},
        {3, "achievable DoF formula, saturated configs included", 60.0, criterion_3_dof_formula},
        {4, "exact min-block solver vs scheduler and exhaustive oracles", 120.0,
         [&] { return criterion_4_exact_converse(data_dir); }},
        {5, "analytic block bound below the averaged optimum", 120.0,
         [&] { return criterion_5_analytic_ordering(data_dir); }},
        {6, "factor-2 sandwich over the full parameter grid", 10.0, criterion_6_factor_two},
        {7, "cardinality-infeasible groups unsolvable, scheme groups solvable", 30.0, criterion_7_necessity},
        {8, "partition, counting, budget, and memory-sharing properties", 60.0, criterion_8_properties},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        CriterionResult result;
        try {
            result = c.run();
        } catch (const std::exception& e) {
            result.pass = false;
            result.detail = std::string("exception: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (seconds > c.budget_seconds) {
            result.pass = false;
            result.detail = "runtime " + std::to_string(seconds) + " s over budget";
        }
        std::printf("%s criterion %d: %s (%.2f s)%s%s\n", result.pass ? "PASS" : "FAIL", c.id,
                    c.name.c_str(), seconds, result.pass ? "" : " -- ", result.detail.c_str());
        failures += result.pass ? 0 : 1;
    }
    return failures;
}
