#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "cachezf/config.hpp"
#include "cachezf/scheduler.hpp"

namespace cachezf {

using Complex = std::complex<double>;

/// A generic channel draw is singular only through finite-precision flukes;
/// callers regenerate with seed + 1 and record the event.
class SingularChannelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fixed complex gains h_{ji} from every transmitter to every receiver, plus
/// the seed that produced them.
struct ChannelMatrix {
    Eigen::MatrixXcd gains;  // K_R x K_T
    std::uint64_t seed = 0;

    Complex gain(int rx, int tx) const { return gains(rx - 1, tx - 1); }
};

namespace detail {

/// Deterministic uniform in (0, 1); the generator sequence is pinned by the
/// standard, so identical seeds reproduce identical channels everywhere.
/// Never hits the endpoints, so the Box-Muller radius below stays nonzero.
inline double next_uniform(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline Complex next_cn01(std::mt19937_64& rng) {
    // Box-Muller; each component N(0, 1/2) so E|h|^2 = 1.
    const double u1 = next_uniform(rng);
    const double u2 = next_uniform(rng);
    const double radius = std::sqrt(-std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace detail

inline ChannelMatrix gen_channel(std::uint64_t seed, int k_r, int k_t) {
    std::mt19937_64 rng(seed);
    ChannelMatrix h;
    h.seed = seed;
    h.gains.resize(k_r, k_t);
    for (int j = 0; j < k_r; ++j)
        for (int i = 0; i < k_t; ++i) h.gains(j, i) = detail::next_cn01(rng);
    return h;
}

inline ChannelMatrix gen_channel(std::uint64_t seed, const NetworkConfig& cfg) {
    return gen_channel(seed, cfg.k_r, cfg.k_t);
}

struct PhyTolerances {
    double tol_zero = 1e-8;     // relative: residual interference vs desired magnitude
    double tol_signal = 1e-10;  // absolute floor on the desired coefficient
};

/// Solved zero-forcing coefficients for one delivery group: v(tx, slot) is
/// defined for the transmitters active in that slot and zero elsewhere.
struct BeamformingSolution {
    struct Slot {
        int slot = 0;
        std::vector<int> tx;      // active transmitters, sorted
        Eigen::VectorXcd coeffs;  // aligned with tx
    };
    std::vector<Slot> slots;
    double scale = 1.0;  // desired gain is normalized to 1 per slot
    double max_backsub_residual = 0.0;  // relative, over all slot systems

    Complex coeff(int tx, int slot) const {
        const auto& s = slots[slot - 1];
        for (std::size_t c = 0; c < s.tx.size(); ++c)
            if (s.tx[c] == tx) return s.coeffs(static_cast<Eigen::Index>(c));
        return {0.0, 0.0};
    }
};

/// Solves the per-group nulling system: for every slot l the active
/// transmitters T (+) (l-1) must combine to unit gain at the intended
/// receiver and zero gain at each receiver in the slot's nulled_at list.
/// That is t_T equations in t_T unknowns per slot, t_T * (t_T + t_R) overall.
inline BeamformingSolution solve_beamformers(const std::vector<PacketAssignment>& assignments,
                                             const ChannelMatrix& h) {
    BeamformingSolution sol;
    const int group_size = static_cast<int>(assignments.size());
    for (const auto& a : assignments) {
        const int unknowns = static_cast<int>(a.subfile.tx_set.size());
        const int equations = 1 + static_cast<int>(a.subfile.nulled_at.size());
        if (equations != unknowns)
            throw std::logic_error("solve_beamformers: slot system is not square (" +
                                   std::to_string(equations) + " eqs, " + std::to_string(unknowns) + " unknowns)");

        Eigen::MatrixXcd mat(equations, unknowns);
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(equations);
        rhs(0) = Complex(1.0, 0.0);
        for (int c = 0; c < unknowns; ++c) mat(0, c) = h.gain(a.rx, a.subfile.tx_set[c]);
        for (int r = 0; r < equations - 1; ++r)
            for (int c = 0; c < unknowns; ++c) mat(r + 1, c) = h.gain(a.subfile.nulled_at[r], a.subfile.tx_set[c]);

        Eigen::FullPivLU<Eigen::MatrixXcd> lu(mat);
        if (!lu.isInvertible())
            throw SingularChannelError("singular nulling system in slot " + std::to_string(a.slot) +
                                       " (channel seed " + std::to_string(h.seed) + ")");
        Eigen::VectorXcd v = lu.solve(rhs);
        const double denom = mat.cwiseAbs().maxCoeff();
        const double residual = (mat * v - rhs).cwiseAbs().maxCoeff() / denom;
        sol.max_backsub_residual = std::max(sol.max_backsub_residual, residual);
        sol.slots.push_back({a.slot, a.subfile.tx_set, std::move(v)});
    }
    if (static_cast<int>(sol.slots.size()) != group_size)
        throw std::logic_error("solve_beamformers: slot count mismatch");
    return sol;
}

/// What one receiver sees in a block: the desired coefficient, every
/// interference term with how it is dealt with, and what is left after the
/// receiver subtracts the packets it caches.
struct ReceiverReport {
    int rx = 0;
    double desired_magnitude = 0.0;
    struct Interference {
        int slot = 0;
        double magnitude = 0.0;
        bool cache_cancelled = false;  // true: receiver caches it; false: zero-forced
    };
    std::vector<Interference> interference;
    double post_cancel_residual = 0.0;  // relative to desired magnitude
    bool decodable = false;
};

struct BlockReport {
    std::vector<ReceiverReport> receivers;
    bool all_decodable = true;
    double max_residual = 0.0;
    double min_desired = 0.0;
};

/// Simulates one block noiselessly: combined coefficient of packet l at
/// receiver j is sum_{i in T_l} h_{ji} v_{i,l}. Cached packets subtract out
/// exactly; what remains beyond the desired term is the zero-forcing
/// residual.
inline BlockReport simulate_block(const std::vector<PacketAssignment>& assignments,
                                  const BeamformingSolution& solution, const ChannelMatrix& h,
                                  const PhyTolerances& tol = {}) {
    BlockReport report;
    report.min_desired = std::numeric_limits<double>::infinity();
    for (const auto& mine : assignments) {
        ReceiverReport rr;
        rr.rx = mine.rx;
        double residual_sum = 0.0;
        for (const auto& other : assignments) {
            Complex c(0.0, 0.0);
            for (std::size_t k = 0; k < other.subfile.tx_set.size(); ++k)
                c += h.gain(mine.rx, other.subfile.tx_set[k]) * solution.coeff(other.subfile.tx_set[k], other.slot);
            if (other.slot == mine.slot) {
                rr.desired_magnitude = std::abs(c);
                continue;
            }
            const auto& cached = other.subfile.cached_at;
            const bool cancellable = std::find(cached.begin(), cached.end(), mine.rx) != cached.end();
            rr.interference.push_back({other.slot, std::abs(c), cancellable});
            if (!cancellable) residual_sum += std::abs(c);
        }
        rr.post_cancel_residual = rr.desired_magnitude > 0 ? residual_sum / rr.desired_magnitude : residual_sum;
        rr.decodable = rr.desired_magnitude > tol.tol_signal && rr.post_cancel_residual < tol.tol_zero;
        report.all_decodable = report.all_decodable && rr.decodable;
        report.max_residual = std::max(report.max_residual, rr.post_cancel_residual);
        report.min_desired = std::min(report.min_desired, rr.desired_magnitude);
        report.receivers.push_back(std::move(rr));
    }
    return report;
}

struct VerificationReport {
    bool ok = true;
    int groups_checked = 0;
    double max_post_cancel_residual = 0.0;
    double max_backsub_residual = 0.0;
    double min_desired = std::numeric_limits<double>::infinity();
    std::uint64_t channel_seed = 0;
    int regenerated = 0;  // singular-channel retries consumed
    std::vector<std::string> failures;
};

/// Checks interference-free delivery of a whole schedule under one channel.
/// Throws SingularChannelError if the channel degenerates; see
/// verify_schedule_seeded for the retrying variant.
inline VerificationReport verify_schedule(const Schedule& s, const DemandVector& d, const ChannelMatrix& h,
                                          const NetworkConfig& cfg, const PhyTolerances& tol = {}) {
    d.validate(cfg);
    VerificationReport report;
    report.channel_seed = h.seed;
    for (std::size_t gi = 0; gi < s.groups.size(); ++gi) {
        const auto& assignments = s.assignments[gi];
        auto solution = solve_beamformers(assignments, h);
        auto block = simulate_block(assignments, solution, h, tol);
        report.max_backsub_residual = std::max(report.max_backsub_residual, solution.max_backsub_residual);
        report.max_post_cancel_residual = std::max(report.max_post_cancel_residual, block.max_residual);
        report.min_desired = std::min(report.min_desired, block.min_desired);
        ++report.groups_checked;
        if (!block.all_decodable) {
            report.ok = false;
            for (const auto& rr : block.receivers)
                if (!rr.decodable)
                    report.failures.push_back("group " + std::to_string(gi + 1) + ": receiver " +
                                              std::to_string(rr.rx) + " not decodable (residual " +
                                              std::to_string(rr.post_cancel_residual) + ")");
        }
    }
    return report;
}

/// verify_schedule under a freshly drawn channel, regenerating with seed + 1
/// on the (probability-zero, finite-precision) singular draws.
inline VerificationReport verify_schedule_seeded(const Schedule& s, const DemandVector& d, std::uint64_t seed,
                                                 const NetworkConfig& cfg, const PhyTolerances& tol = {},
                                                 int max_retries = 8) {
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
        try {
            auto report = verify_schedule(s, d, gen_channel(seed + attempt, cfg), cfg, tol);
            report.regenerated = attempt;
            return report;
        } catch (const SingularChannelError&) {
            if (attempt == max_retries) throw;
        }
    }
    throw std::logic_error("verify_schedule_seeded: unreachable");
}

}  // namespace cachezf
