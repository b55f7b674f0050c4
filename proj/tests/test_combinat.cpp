#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>

#include "cachezf/combinat.hpp"

using namespace cachezf::combinat;

namespace {

// Independent canonicalizer: rotate a permutation until its minimum leads.
std::vector<int> rotate_min_first(std::vector<int> perm) {
    auto min_it = std::min_element(perm.begin(), perm.end());
    std::rotate(perm.begin(), min_it, perm.end());
    return perm;
}

// Brute-force set of circular permutations: all |r|! orderings, quotiented
// by rotation via the canonicalizer.
std::set<std::vector<int>> brute_force_circular(const std::vector<int>& r) {
    std::set<std::vector<int>> out;
    for (const auto& perm : permutations_of(r)) out.insert(rotate_min_first(perm));
    return out;
}

}  // namespace

TEST_CASE("mod_add matches the cyclic-sum formula") {
    CHECK(mod_add(3, 1, 3) == 1);
    CHECK(mod_add(1, 0, 5) == 1);
    CHECK(mod_add(2, 2, 3) == 1);
    CHECK(mod_add(1, 1, 1) == 1);

    CHECK_THROWS_AS(mod_add(0, 1, 3), std::domain_error);
    CHECK_THROWS_AS(mod_add(4, 1, 3), std::domain_error);
    CHECK_THROWS_AS(mod_add(1, 0, 0), std::domain_error);
}

TEST_CASE("mod_add is a bijection and composes additively") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const int m = 1 + static_cast<int>(rng() % 12);
        const long long j = rng() % 40;
        std::set<int> image;
        for (int i = 1; i <= m; ++i) image.insert(mod_add(i, j, m));
        CHECK(static_cast<int>(image.size()) == m);

        const long long a = rng() % 20, b = rng() % 20;
        const int i = 1 + static_cast<int>(rng() % m);
        CHECK(mod_add(mod_add(i, a, m), b, m) == mod_add(i, a + b, m));
    }
}

TEST_CASE("shift_set shifts entry-wise and preserves cardinality") {
    CHECK(shift_set({1, 2}, 1, 3) == std::vector<int>{2, 3});
    CHECK(shift_set({1, 2}, 2, 3) == std::vector<int>{1, 3});
    CHECK(shift_set({1, 2, 3}, 7, 3) == std::vector<int>{1, 2, 3});
    CHECK_THROWS_AS(shift_set({1, 5}, 1, 3), std::domain_error);
}

TEST_CASE("circular_permutations: canonical rotations, (|R|-1)! of them") {
    CHECK(circular_permutations({1, 2, 3}) ==
          std::vector<std::vector<int>>{{1, 2, 3}, {1, 3, 2}});
    CHECK(circular_permutations({5}) == std::vector<std::vector<int>>{{5}});
    CHECK_THROWS_AS(circular_permutations({}), std::domain_error);

    const auto four = circular_permutations({1, 2, 3, 4});
    CHECK(four.size() == 6);
    for (const auto& p : four) CHECK(p.front() == 1);
}

TEST_CASE("circular_permutations agree with the brute-force quotient up to |R| = 5") {
    const std::vector<std::vector<int>> sets = {{2}, {1, 4}, {1, 2, 3}, {2, 4, 5, 7}, {1, 3, 5, 7, 9}};
    for (const auto& r : sets) {
        const auto canonical = circular_permutations(r);
        CHECK(canonical.size() == static_cast<std::size_t>(factorial(static_cast<int>(r.size()) - 1)));
        const std::set<std::vector<int>> as_set(canonical.begin(), canonical.end());
        CHECK(as_set.size() == canonical.size());
        CHECK(as_set == brute_force_circular(r));
    }
}

TEST_CASE("perm_window evaluates cyclic windows") {
    CHECK(perm_window({1, 2, 3}, 2, 2) == std::vector<int>{2});
    CHECK(perm_window({1, 2, 3}, 4, 4) == std::vector<int>{1});
    CHECK(perm_window({2, 4, 5, 7}, 3, 5) == std::vector<int>{5, 7, 2});
    CHECK(perm_window({1, 2, 3}, 2, 1).empty());  // j = i - 1: empty by convention
    CHECK_THROWS_AS(perm_window({1, 2, 3}, 3, 1), std::domain_error);
    CHECK_THROWS_AS(perm_window({1, 2, 3}, 1, 4), std::domain_error);
}

TEST_CASE("full-cycle windows visit every element exactly once") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const int m = 1 + static_cast<int>(rng() % 6);
        std::vector<int> perm(m);
        for (int i = 0; i < m; ++i) perm[i] = i + 10;
        std::shuffle(perm.begin(), perm.end(), rng);
        const int start = 1 + static_cast<int>(rng() % (2 * m));
        auto window = perm_window(perm, start, start + m - 1);
        std::sort(window.begin(), window.end());
        std::vector<int> sorted = perm;
        std::sort(sorted.begin(), sorted.end());
        CHECK(window == sorted);
    }
}

TEST_CASE("k_subsets enumerates lexicographically") {
    CHECK(k_subsets(3, 2) == std::vector<std::vector<int>>{{1, 2}, {1, 3}, {2, 3}});
    CHECK(k_subsets(3, 0) == std::vector<std::vector<int>>{{}});
    CHECK(k_subsets(5, 3).size() == 10);  // C(5,3), computed independently
    CHECK_THROWS_AS(k_subsets(3, 4), std::domain_error);

    const auto subsets = k_subsets(6, 3);
    CHECK(std::is_sorted(subsets.begin(), subsets.end()));
    CHECK(static_cast<long long>(subsets.size()) == binomial(6, 3));
}

TEST_CASE("arrangements enumerate ordered k-subsets") {
    CHECK(arrangements({2, 3}, 1) == std::vector<std::vector<int>>{{2}, {3}});
    CHECK(arrangements({4, 5}, 2) == std::vector<std::vector<int>>{{4, 5}, {5, 4}});
    CHECK(arrangements({1, 2, 3}, 0) == std::vector<std::vector<int>>{{}});
    CHECK(static_cast<long long>(arrangements({1, 2, 3, 4}, 2).size()) == falling_factorial(4, 2));
}

TEST_CASE("counting helpers") {
    CHECK(binomial(3, 2) == 3);
    CHECK(binomial(6, 3) == 20);
    CHECK(binomial(4, 5) == 0);
    CHECK(factorial(0) == 1);
    CHECK(factorial(5) == 120);
    CHECK(falling_factorial(5, 2) == 20);
    CHECK(falling_factorial(4, 0) == 1);
}
