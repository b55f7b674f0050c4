#pragma once

#include <stdexcept>
#include <string>

#include "cachezf/rational.hpp"

namespace cachezf {

/// Raised when an operation needs integer replication factors but the config
/// has fractional ones; the caller should decompose the config with
/// plan_memory_sharing() and run each integer corner separately.
class MemorySharingRequired : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// System parameters: K_T transmitters with caches of M_T files, K_R
/// receivers with caches of M_R files, a library of N files of F packets
/// each. Cache sizes are exact rationals so that memory-sharing corners and
/// saturated configs stay representable.
struct NetworkConfig {
    int k_t = 0;
    int k_r = 0;
    int n_files = 0;
    Rational m_t{0};
    Rational m_r{0};
    long long f_packets = 0;  // 0 = pick the minimal divisible F

    /// Transmitter-side replication factor t_T = K_T * M_T / N.
    Rational t_t() const { return Rational(k_t) * m_t / Rational(n_files); }
    /// Receiver-side replication factor t_R = K_R * M_R / N.
    Rational t_r() const { return Rational(k_r) * m_r / Rational(n_files); }

    bool integral_t() const { return is_integer(t_t()) && is_integer(t_r()); }

    int t_t_int() const {
        if (!is_integer(t_t())) throw MemorySharingRequired("t_T is fractional; memory-sharing required");
        return static_cast<int>(t_t().numerator());
    }
    int t_r_int() const {
        if (!is_integer(t_r())) throw MemorySharingRequired("t_R is fractional; memory-sharing required");
        return static_cast<int>(t_r().numerator());
    }

    void validate() const {
        if (k_t < 1 || k_r < 1 || n_files < 1)
            throw std::invalid_argument("config: node and file counts must be positive");
        if (m_t <= 0 || m_t > Rational(n_files))
            throw std::invalid_argument("config: need 0 < M_T <= N");
        if (m_r < 0 || m_r > Rational(n_files))
            throw std::invalid_argument("config: need 0 <= M_R <= N");
        if (Rational(k_t) * m_t < Rational(n_files))
            throw std::invalid_argument("config: need K_T * M_T >= N so every file is cached somewhere");
        if (f_packets < 0) throw std::invalid_argument("config: F must be nonnegative");
    }

    bool operator==(const NetworkConfig&) const = default;
};

}  // namespace cachezf
