#include <catch_amalgamated.hpp>

#include <random>

#include "darklattice/basis.hpp"

using namespace darklattice;

namespace {

// Independent oracle: odometer over {0..total}^modes, filter on the sum.
std::uint64_t brute_force_count(int modes, int total) {
    std::vector<int> t(static_cast<std::size_t>(modes), 0);
    int sum = 0;
    std::uint64_t count = 0;
    while (true) {
        if (sum == total) ++count;
        int i = modes - 1;
        while (i >= 0 && t[static_cast<std::size_t>(i)] == total) {
            sum -= t[static_cast<std::size_t>(i)];
            t[static_cast<std::size_t>(i)] = 0;
            --i;
        }
        if (i < 0) break;
        ++t[static_cast<std::size_t>(i)];
        ++sum;
    }
    return count;
}

std::vector<std::vector<int>> brute_force_tuples(int modes, int total) {
    std::vector<std::vector<int>> out;
    std::vector<int> t(static_cast<std::size_t>(modes), 0);
    while (true) {
        int sum = 0;
        for (int v : t) sum += v;
        if (sum == total) out.push_back(t);
        int i = modes - 1;
        while (i >= 0 && t[static_cast<std::size_t>(i)] == total) {
            t[static_cast<std::size_t>(i)] = 0;
            --i;
        }
        if (i < 0) break;
        ++t[static_cast<std::size_t>(i)];
    }
    return out;
}

FockState g_state(std::vector<int> occ) { return {Atom::ground, std::move(occ)}; }
FockState e_state(std::vector<int> occ) { return {Atom::excited, std::move(occ)}; }

}  // namespace

TEST_CASE("sector dimensions match the combinatorial counts") {
    CHECK(upper_dimension({2, 3}) == 3);
    CHECK(upper_dimension({4, 3}) == 10);
    CHECK(upper_dimension({7, 1}) == 1);
    CHECK(lower_dimension({2, 1}) == 2);
    CHECK(lower_dimension({4, 3}) == 20);
    CHECK(lower_dimension({1, 5}) == 1);
}

TEST_CASE("dimension formulas against the brute-force oracle, N,n <= 8") {
    for (int modes = 1; modes <= 8; ++modes) {
        for (int n = 1; n <= 8; ++n) {
            const SubspaceSpec spec{modes, n};
            CHECK(upper_dimension(spec) == brute_force_count(modes, n - 1));
            CHECK(lower_dimension(spec) == brute_force_count(modes, n));
        }
    }
}

TEST_CASE("enumeration content matches the brute-force tuple set") {
    for (int modes = 1; modes <= 5; ++modes) {
        for (int n = 1; n <= 5; ++n) {
            auto got = enumerate_occupations(modes, n);
            auto expected = brute_force_tuples(modes, n);
            REQUIRE(got.size() == expected.size());
            auto sorted = got;
            std::sort(sorted.begin(), sorted.end());
            std::sort(expected.begin(), expected.end());
            CHECK(sorted == expected);
            // no duplicates
            CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
        }
    }
}

TEST_CASE("canonical order reproduces the explicit two-mode lists") {
    auto lower21 = enumerate_states({2, 1}, Sector::lower);
    REQUIRE(lower21 == std::vector<FockState>{g_state({1, 0}), g_state({0, 1})});
    auto upper23 = enumerate_states({2, 3}, Sector::upper);
    REQUIRE(upper23 == std::vector<FockState>{e_state({2, 0}), e_state({1, 1}), e_state({0, 2})});
    auto lower23 = enumerate_states({2, 3}, Sector::lower);
    REQUIRE(lower23 == std::vector<FockState>{g_state({3, 0}), g_state({2, 1}), g_state({1, 2}),
                                              g_state({0, 3})});
}

TEST_CASE("canonical order reproduces the explicit three-mode lists") {
    auto lower31 = enumerate_states({3, 1}, Sector::lower);
    REQUIRE(lower31 ==
            std::vector<FockState>{g_state({1, 0, 0}), g_state({0, 1, 0}), g_state({0, 0, 1})});
    auto lower32 = enumerate_states({3, 2}, Sector::lower);
    REQUIRE(lower32 == std::vector<FockState>{g_state({2, 0, 0}), g_state({1, 1, 0}),
                                              g_state({1, 0, 1}), g_state({0, 2, 0}),
                                              g_state({0, 1, 1}), g_state({0, 0, 2})});
    auto upper33 = enumerate_states({3, 3}, Sector::upper);
    REQUIRE(upper33 == std::vector<FockState>{e_state({2, 0, 0}), e_state({1, 1, 0}),
                                              e_state({1, 0, 1}), e_state({0, 2, 0}),
                                              e_state({0, 1, 1}), e_state({0, 0, 2})});
    auto lower33 = enumerate_states({3, 3}, Sector::lower);
    REQUIRE(lower33 ==
            std::vector<FockState>{g_state({3, 0, 0}), g_state({2, 1, 0}), g_state({2, 0, 1}),
                                   g_state({1, 2, 0}), g_state({1, 1, 1}), g_state({1, 0, 2}),
                                   g_state({0, 3, 0}), g_state({0, 2, 1}), g_state({0, 1, 2}),
                                   g_state({0, 0, 3})});
}

TEST_CASE("canonical order reproduces the explicit four-mode lists") {
    auto lower41 = enumerate_states({4, 1}, Sector::lower);
    REQUIRE(lower41 == std::vector<FockState>{g_state({1, 0, 0, 0}), g_state({0, 1, 0, 0}),
                                              g_state({0, 0, 1, 0}), g_state({0, 0, 0, 1})});
    auto lower42 = enumerate_states({4, 2}, Sector::lower);
    REQUIRE(lower42 ==
            std::vector<FockState>{g_state({2, 0, 0, 0}), g_state({1, 1, 0, 0}), g_state({1, 0, 1, 0}),
                                   g_state({1, 0, 0, 1}), g_state({0, 2, 0, 0}), g_state({0, 1, 1, 0}),
                                   g_state({0, 1, 0, 1}), g_state({0, 0, 2, 0}), g_state({0, 0, 1, 1}),
                                   g_state({0, 0, 0, 2})});
}

TEST_CASE("single-mode and single-excitation edge cases") {
    auto upper12 = enumerate_states({1, 2}, Sector::upper);
    REQUIRE(upper12 == std::vector<FockState>{e_state({1})});
    const SubspaceBasis basis(SubspaceSpec{5, 1});
    CHECK(basis.state_at(Sector::upper, 0) == e_state({0, 0, 0, 0, 0}));
}

TEST_CASE("index_of and state_at are inverse") {
    const SubspaceBasis b32(SubspaceSpec{3, 2});
    CHECK(b32.index_of(g_state({1, 0, 1})) == StateIndex{Sector::lower, 2});
    CHECK(b32.state_at(Sector::lower, 5) == g_state({0, 0, 2}));
    const SubspaceBasis b21(SubspaceSpec{2, 1});
    CHECK(b21.index_of(e_state({0, 0})) == StateIndex{Sector::upper, 0});
    const SubspaceBasis b22(SubspaceSpec{2, 2});
    CHECK(b22.state_at(Sector::lower, 0) == g_state({2, 0}));

    // exhaustive round-trip on a mid-size subspace
    const SubspaceBasis b44(SubspaceSpec{4, 4});
    for (std::size_t i = 0; i < b44.upper_size(); ++i)
        CHECK(b44.index_of(b44.state_at(Sector::upper, i)) == StateIndex{Sector::upper, i});
    for (std::size_t i = 0; i < b44.lower_size(); ++i)
        CHECK(b44.index_of(b44.state_at(Sector::lower, i)) == StateIndex{Sector::lower, i});

    // randomized round-trip on a larger one
    const SubspaceBasis b66(SubspaceSpec{6, 6});
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<std::size_t> pick(0, b66.lower_size() - 1);
    for (int k = 0; k < 200; ++k) {
        const std::size_t i = pick(rng);
        CHECK(b66.index_of(b66.state_at(Sector::lower, i)).position == i);
    }
}

TEST_CASE("every enumerated state carries the right excitation number") {
    for (int modes = 1; modes <= 6; ++modes) {
        for (int n = 1; n <= 5; ++n) {
            for (const auto& s : enumerate_states({modes, n}, Sector::upper))
                REQUIRE(s.excitation() == n);
            for (const auto& s : enumerate_states({modes, n}, Sector::lower))
                REQUIRE(s.excitation() == n);
        }
    }
}

TEST_CASE("error paths: invalid specs, foreign states, capacity, overflow") {
    CHECK_THROWS_AS(upper_dimension({0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(lower_dimension({2, 0}), std::invalid_argument);

    const SubspaceBasis b32(SubspaceSpec{3, 2});
    CHECK_THROWS_AS(b32.index_of(g_state({1, 0, 0})), std::domain_error);  // wrong excitation
    CHECK_THROWS_AS(b32.index_of(g_state({1, 1})), std::domain_error);     // wrong mode count
    CHECK_THROWS_AS(b32.state_at(Sector::upper, 99), std::out_of_range);

    CHECK_THROWS_AS(SubspaceBasis(SubspaceSpec{25, 10}), std::length_error);
    CHECK_THROWS_AS(SubspaceBasis(SubspaceSpec{3, 3}, 5), std::length_error);
    CHECK_NOTHROW(SubspaceBasis(SubspaceSpec{3, 3}, 10));

    CHECK_THROWS_AS(lower_dimension({400, 200}), std::overflow_error);
}

TEST_CASE("state strings render in the documented format") {
    CHECK(g_state({2, 0, 0}).str() == "g:2,0,0");
    CHECK(e_state({1, 0}).str() == "e:1,0");
}
