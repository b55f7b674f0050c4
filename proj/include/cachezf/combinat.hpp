#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace cachezf::combinat {

// Index convention: every index at this interface is 1-based, matching the
// cyclic sum i (+) j = 1 + ((i + j - 1) mod m) that the scheduling rules are
// built on. Sets are sorted vectors of distinct indices; ordered windows and
// permutations are plain vectors.

/// Cyclic index addition on [1, m]: 1 + ((i + j - 1) mod m).
inline int mod_add(int i, long long j, int m) {
    if (m <= 0) throw std::domain_error("mod_add: modulus must be positive");
    if (i < 1 || i > m) throw std::domain_error("mod_add: index out of [1, m]");
    if (j < 0) throw std::domain_error("mod_add: shift must be nonnegative");
    return 1 + static_cast<int>((i + j - 1) % m);
}

/// Entry-wise cyclic shift of a set of indices; cardinality is preserved.
inline std::vector<int> shift_set(const std::vector<int>& t, long long j, int m) {
    std::vector<int> out;
    out.reserve(t.size());
    for (int i : t) out.push_back(mod_add(i, j, m));
    std::sort(out.begin(), out.end());
    return out;
}

/// All circular permutations of a set, one canonical representative each:
/// the rotation that starts at the minimum element. Exactly (|r|-1)! entries,
/// with the tail in lexicographic order.
inline std::vector<std::vector<int>> circular_permutations(const std::vector<int>& r) {
    if (r.empty()) throw std::domain_error("circular_permutations: empty set");
    std::vector<int> sorted = r;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> tail(sorted.begin() + 1, sorted.end());
    std::vector<std::vector<int>> out;
    do {
        std::vector<int> perm;
        perm.reserve(sorted.size());
        perm.push_back(sorted.front());
        perm.insert(perm.end(), tail.begin(), tail.end());
        out.push_back(std::move(perm));
    } while (std::next_permutation(tail.begin(), tail.end()));
    return out;
}

/// Cyclic window pi[i:j] = [pi(i (+) 0), pi(i (+) 1), ..., pi(i (+) (j-i))]
/// over a permutation pi of m elements. j = i - 1 yields the empty window.
inline std::vector<int> perm_window(const std::vector<int>& pi, int i, int j) {
    if (j < i - 1) throw std::domain_error("perm_window: j < i - 1");
    const int m = static_cast<int>(pi.size());
    if (m == 0) throw std::domain_error("perm_window: empty permutation");
    const int len = j - i + 1;
    if (len > m) throw std::domain_error("perm_window: window longer than the set");
    if (i < 1) throw std::domain_error("perm_window: start index must be >= 1");
    std::vector<int> out;
    out.reserve(len);
    const int start = 1 + (i - 1) % m;  // wrap the start into [1, m] first
    for (int k = 0; k < len; ++k) out.push_back(pi[mod_add(start, k, m) - 1]);
    return out;
}

/// All k-element subsets of [m] in lexicographic order.
inline std::vector<std::vector<int>> k_subsets(int m, int k) {
    if (m < 0 || k < 0 || k > m) throw std::domain_error("k_subsets: need 0 <= k <= m");
    std::vector<std::vector<int>> out;
    std::vector<int> cur(k);
    for (int i = 0; i < k; ++i) cur[i] = i + 1;
    while (true) {
        out.push_back(cur);
        int pos = k - 1;
        while (pos >= 0 && cur[pos] == m - (k - 1 - pos)) --pos;
        if (pos < 0) break;
        ++cur[pos];
        for (int i = pos + 1; i < k; ++i) cur[i] = cur[i - 1] + 1;
    }
    return out;
}

/// All |s|! orderings of a set, lexicographic. The empty set has one (empty)
/// ordering.
inline std::vector<std::vector<int>> permutations_of(std::vector<int> s) {
    std::sort(s.begin(), s.end());
    std::vector<std::vector<int>> out;
    do {
        out.push_back(s);
    } while (std::next_permutation(s.begin(), s.end()));
    return out;
}

/// All ordered arrangements of k elements drawn from s (the set Pi_{S,k}):
/// subsets in lexicographic order, each expanded to all orderings.
inline std::vector<std::vector<int>> arrangements(const std::vector<int>& s, int k) {
    if (k < 0 || k > static_cast<int>(s.size()))
        throw std::domain_error("arrangements: need 0 <= k <= |s|");
    std::vector<int> sorted = s;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::vector<int>> out;
    for (const auto& subset : k_subsets(static_cast<int>(sorted.size()), k)) {
        std::vector<int> chosen;
        chosen.reserve(k);
        for (int idx : subset) chosen.push_back(sorted[idx - 1]);
        for (auto& perm : permutations_of(chosen)) out.push_back(std::move(perm));
    }
    return out;
}

inline long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

inline long long factorial(int n) {
    if (n < 0) throw std::domain_error("factorial: negative argument");
    long long r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

/// n * (n-1) * ... * (n-k+1), the number of ordered k-arrangements of [n].
inline long long falling_factorial(int n, int k) {
    if (k < 0 || k > n) throw std::domain_error("falling_factorial: need 0 <= k <= n");
    long long r = 1;
    for (int i = 0; i < k; ++i) r *= (n - i);
    return r;
}

}  // namespace cachezf::combinat
