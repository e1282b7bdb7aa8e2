#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "darklattice/dark_states.hpp"
#include "darklattice/hamiltonian.hpp"
#include "golden_states.hpp"
#include "helpers.hpp"

using namespace darklattice;
using test_helpers::detuned_params;
using test_helpers::diff_up_to_sign;
using test_helpers::random_couplings;
using test_helpers::resonant_params;

namespace {

/// Assemble a lower-sector vector from (coefficient, occupations) terms.
Eigen::VectorXd lower_vector(const SubspaceBasis& basis,
                             const std::vector<std::pair<double, std::vector<int>>>& terms) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.lower_size()));
    for (const auto& [coeff, occ] : terms) v(static_cast<Eigen::Index>(basis.lower_index(occ))) = coeff;
    return v;
}

BlockHamiltonian resonant_block(int modes, int n, const std::vector<double>& g) {
    const SubspaceBasis basis(SubspaceSpec{modes, n});
    return assemble_blocks(basis, resonant_params(g));
}

}  // namespace

TEST_CASE("dark-state counting law") {
    for (int n = 1; n <= 8; ++n) CHECK(dark_state_count(2, n) == 1);
    CHECK(dark_state_count(3, 3) == 4);
    CHECK(dark_state_count(4, 3) == 10);
    const std::uint64_t table[3][3] = {{1, 1, 1}, {2, 3, 4}, {3, 6, 10}};
    for (int modes = 2; modes <= 4; ++modes)
        for (int n = 1; n <= 3; ++n)
            CHECK(dark_state_count(modes, n) == table[modes - 2][n - 1]);
    CHECK(dark_state_count(1, 5) == 0);
    CHECK_THROWS_AS(dark_state_count(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(dark_state_count(2, 0), std::invalid_argument);
}

TEST_CASE("numeric solve spans the known subspaces") {
    const double g1 = 1.3, g2 = 0.7, g3 = 1.9;
    {
        const auto bh = resonant_block(2, 1, {g1, g2});
        const auto ds = solve_dark_states(bh);
        REQUIRE(ds.vectors.size() == 1);
        CHECK(diff_up_to_sign(ds.vectors.vectors[0],
                              Eigen::Vector2d(g2, -g1).normalized()) < 1e-12);
        // phase convention: largest-magnitude coefficient positive
        Eigen::Index imax = 0;
        ds.vectors.vectors[0].cwiseAbs().maxCoeff(&imax);
        CHECK(ds.vectors.vectors[0](imax) > 0);
    }
    {
        const SubspaceBasis basis(SubspaceSpec{3, 2});
        const auto bh = assemble_blocks(basis, resonant_params({g1, g2, g3}));
        const auto ds = solve_dark_states(bh);
        REQUIRE(ds.vectors.size() == 3);
        VectorSet span32;
        span32.dim = 6;
        span32.vectors = golden::d_3_2(g1, g2, g3);
        CHECK(subspace_projector_distance(ds.vectors, span32).spectral <= 1e-12);
    }
}

TEST_CASE("numeric solve rejects out-of-theory inputs") {
    CHECK_THROWS_AS(solve_dark_states(resonant_block(2, 1, {1.0, 0.0})), std::invalid_argument);

    const SubspaceBasis basis(SubspaceSpec{2, 2});
    ModelParams p = resonant_params({1.0, 0.8});
    p.omegas[1] += 0.3;  // unequal detunings
    const auto bh = assemble_blocks(basis, p);
    CHECK_THROWS_AS(solve_dark_states(bh), std::invalid_argument);

    const auto ds = solve_dark_states(bh, {}, {true});
    REQUIRE(ds.vectors.size() == 1);
    CHECK((bh.coupling * ds.vectors.vectors[0]).norm() <= 1e-10);
}

TEST_CASE("nullity equals the counting law over a parameter sweep") {
    std::mt19937_64 rng(101);
    for (int modes = 2; modes <= 5; ++modes) {
        for (int n = 1; n <= 4; ++n) {
            const auto bh = resonant_block(modes, n, random_couplings(modes, rng));
            const auto ds = solve_dark_states(bh);
            CHECK(ds.vectors.size() == dark_state_count(modes, n));
        }
    }
}

TEST_CASE("two-mode closed form matches the printed double- and triple-excitation states") {
    const double g1 = 1.3, g2 = 0.7;
    {
        const auto ds = two_mode_closed_form(2, {g1, g2});
        CHECK((ds.vectors.vectors[0] - golden::d221(g1, g2)).cwiseAbs().maxCoeff() < 1e-14);
    }
    {
        const auto ds = two_mode_closed_form(3, {g1, g2});
        CHECK((ds.vectors.vectors[0] - golden::d231(g1, g2)).cwiseAbs().maxCoeff() < 1e-14);
    }
    {
        // decoupled second mode: the dark state collapses to +-|g,0,n>
        const auto ds = two_mode_closed_form(4, {1.7, 0.0});
        const auto& v = ds.vectors.vectors[0];
        CHECK(std::abs(v(4)) == 1.0);
        CHECK(v.head(4).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK_THROWS_AS(two_mode_closed_form(3, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("mixing-angle form equals the coupling form at theta = atan(g2/g1)") {
    std::mt19937_64 rng(7);
    for (int n = 1; n <= 8; ++n) {
        const auto g = random_couplings(2, rng);
        const auto ds = two_mode_closed_form(n, g);
        const Eigen::VectorXd theta_form = two_mode_mixing_angle_form(n, std::atan2(g[1], g[0]));
        CHECK((ds.vectors.vectors[0] - theta_form).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("three-mode closed form at n = 1 equals the hand-evaluated sums") {
    const double g1 = 1.3, g2 = 0.7, g3 = 1.9;
    const auto cf0 = three_mode_closed_form(1, 0, {g1, g2, g3});
    CHECK((cf0.coefficients - Eigen::Vector3d(-g2, g1, 0)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(cf0.label == 1);
    const auto cf1 = three_mode_closed_form(1, 1, {g1, g2, g3});
    CHECK((cf1.coefficients - Eigen::Vector3d(-g3, 0, g1)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(cf1.label == 2);
    CHECK(std::abs(cf0.norm - cf0.coefficients.norm()) == 0.0);
    CHECK_THROWS_AS(three_mode_closed_form(2, 3, {g1, g2, g3}), std::out_of_range);
}

TEST_CASE("three-mode triple-excitation family matches the printed vectors") {
    const double g1 = 1.3, g2 = 0.7, g3 = 1.9;
    const auto golden33 = golden::d33(g1, g2, g3);
    const auto family = three_mode_closed_form_family(3, {g1, g2, g3});
    REQUIRE(family.vectors.size() == 4);
    for (std::size_t p = 0; p < 4; ++p) {
        CHECK(family.labels[p].p == static_cast<int>(p) + 1);
        CHECK(diff_up_to_sign(family.vectors.vectors[p].normalized(), golden33[p].normalized()) <=
              1e-12);
    }
    // the family spans the numeric null space
    const auto bh = resonant_block(3, 3, {g1, g2, g3});
    const auto numeric = solve_dark_states(bh);
    CHECK(subspace_projector_distance(family.vectors, numeric.vectors).spectral <= 1e-10);
}

TEST_CASE("three-mode mixing-angle parameterization is proportional to the coupling form") {
    std::mt19937_64 rng(23);
    for (int n = 1; n <= 5; ++n) {
        const auto g = random_couplings(3, rng);
        for (int s3 = 0; s3 <= n; ++s3) {
            const auto cf = three_mode_closed_form(n, s3, g);
            const Eigen::VectorXd theta = three_mode_mixing_angle_form(
                n, s3, std::atan2(g[1], g[0]), std::atan2(g[2], g[0]));
            CHECK((cf.coefficients.normalized() - theta.normalized()).cwiseAbs().maxCoeff() <=
                  1e-12);
        }
    }
}

TEST_CASE("four-mode closed form at n = 1 reduces to the two-mode-like pattern") {
    const double g1 = 1.3, g2 = 0.7, g3 = 1.9, g4 = 1.1;
    const auto cf = four_mode_closed_form(1, 0, 0, {g1, g2, g3, g4});
    CHECK((cf.coefficients - Eigen::Vector4d(-g2, g1, 0, 0)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(cf.label == 1);
    CHECK_THROWS_AS(four_mode_closed_form(2, 1, 2, {g1, g2, g3, g4}), std::out_of_range);
}

TEST_CASE("four-mode double-excitation family matches the six printed states") {
    const double g1 = 1.3, g2 = 0.7, g3 = 1.9, g4 = 1.1;
    const auto golden42 = golden::d42(g1, g2, g3, g4);
    const auto family = four_mode_closed_form_family(2, {g1, g2, g3, g4});
    REQUIRE(family.vectors.size() == 6);
    int expected_label = 1;
    for (std::size_t p = 0; p < 6; ++p) {
        CHECK(family.labels[p].p == expected_label++);
        CHECK(diff_up_to_sign(family.vectors.vectors[p].normalized(), golden42[p].normalized()) <=
              1e-12);
    }
    const auto numeric = solve_dark_states(resonant_block(4, 2, {g1, g2, g3, g4}));
    CHECK(subspace_projector_distance(family.vectors, numeric.vectors).spectral <= 1e-10);
}

TEST_CASE("four-mode triple-excitation family matches the ten printed states") {
    const double g1 = 1.3, g2 = 0.7, g3 = 1.9, g4 = 1.1;
    const auto golden43 = golden::d43(g1, g2, g3, g4);
    const auto family = four_mode_closed_form_family(3, {g1, g2, g3, g4});
    REQUIRE(family.vectors.size() == 10);
    for (std::size_t p = 0; p < 10; ++p) {
        CHECK(family.labels[p].p == static_cast<int>(p) + 1);
        CHECK(diff_up_to_sign(family.vectors.vectors[p].normalized(), golden43[p].normalized()) <=
              1e-12);
    }
    const auto numeric = solve_dark_states(resonant_block(4, 3, {g1, g2, g3, g4}));
    CHECK(subspace_projector_distance(family.vectors, numeric.vectors).spectral <= 1e-10);
}

TEST_CASE("four-mode mixing-angle parameterization is proportional to the coupling form") {
    std::mt19937_64 rng(31);
    const auto g = random_couplings(4, rng);
    for (int s3 = 0; s3 <= 3; ++s3) {
        for (int s4 = 0; s4 <= s3; ++s4) {
            const auto cf = four_mode_closed_form(3, s3, s4, g);
            const Eigen::VectorXd theta =
                four_mode_mixing_angle_form(3, s3, s4, std::atan2(g[1], g[0]),
                                            std::atan2(g[2], g[0]), std::atan2(g[3], g[0]));
            CHECK((cf.coefficients.normalized() - theta.normalized()).cwiseAbs().maxCoeff() <=
                  1e-12);
        }
    }
}

TEST_CASE("N-mode single-excitation states match the nested closed forms") {
    const double g1 = 1.3, g2 = 0.7, g3 = 1.9, g4 = 1.1;
    {
        const auto ds = n_mode_single_excitation_closed_form(3, {g1, g2, g3});
        REQUIRE(ds.vectors.size() == 2);
        const double n2 = std::hypot(g1, g2);
        const double n3 = std::sqrt(g1 * g1 + g2 * g2 + g3 * g3);
        CHECK((ds.vectors.vectors[0] - Eigen::Vector3d(g2, -g1, 0) / n2).cwiseAbs().maxCoeff() <
              1e-14);
        CHECK((ds.vectors.vectors[1] -
               Eigen::Vector3d(g1 * g3, g2 * g3, -n2 * n2) / (n2 * n3))
                  .cwiseAbs()
                  .maxCoeff() < 1e-14);
    }
    {
        const auto ds = n_mode_single_excitation_closed_form(4, {g1, g2, g3, g4});
        REQUIRE(ds.vectors.size() == 3);
        const double n3 = std::sqrt(g1 * g1 + g2 * g2 + g3 * g3);
        const double n4 = std::sqrt(g1 * g1 + g2 * g2 + g3 * g3 + g4 * g4);
        CHECK((ds.vectors.vectors[2] -
               Eigen::Vector4d(g4 * g1, g2 * g4, g3 * g4, -n3 * n3) / (n3 * n4))
                  .cwiseAbs()
                  .maxCoeff() < 1e-14);
    }
    CHECK_THROWS_AS(n_mode_single_excitation_closed_form(3, {1.0, 0.0, 1.0}),
                    std::invalid_argument);
}

TEST_CASE("N = 5 single-excitation set equals Gram-Schmidt of the raw pair differences") {
    std::mt19937_64 rng(47);
    const auto g = random_couplings(5, rng);
    VectorSet raw;
    raw.dim = 5;
    for (int lp = 1; lp <= 4; ++lp) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(5);
        v(0) = g[static_cast<std::size_t>(lp)];
        v(lp) = -g[0];
        raw.vectors.push_back(v.normalized());
    }
    const auto gs = gram_schmidt(raw);
    const auto closed = n_mode_single_excitation_closed_form(5, g);
    for (std::size_t k = 0; k < 4; ++k)
        CHECK((gs.vectors[k] - closed.vectors.vectors[k]).cwiseAbs().maxCoeff() <= 1e-12);
    // orthonormality across a spread of sizes
    for (int modes = 2; modes <= 8; ++modes) {
        const auto ds = n_mode_single_excitation_closed_form(modes, random_couplings(modes, rng));
        const Eigen::MatrixXd m = ds.vectors.as_matrix();
        CHECK((m.transpose() * m - Eigen::MatrixXd::Identity(modes - 1, modes - 1))
                  .cwiseAbs()
                  .maxCoeff() <= 1e-12);
    }
}

TEST_CASE("Gram-Schmidt of the double-excitation family gives the nested orthonormal set") {
    const double g1 = 1.3, g2 = 0.7, g3 = 1.9;
    const double r2 = std::sqrt(2.0);
    const SubspaceBasis basis(SubspaceSpec{3, 2});
    const double n2sq = g1 * g1 + g2 * g2;
    const double n3 = std::sqrt(g1 * g1 + g2 * g2 + g3 * g3);
    const double n3sq = n3 * n3;
    VectorSet raw;
    raw.dim = 6;
    raw.vectors = golden::d_3_2(g1, g2, g3);
    const auto ortho = gram_schmidt(raw);

    const Eigen::VectorXd t1 = lower_vector(basis, {{g2 * g2 / n2sq, {2, 0, 0}},
                                                    {-r2 * g1 * g2 / n2sq, {1, 1, 0}},
                                                    {g1 * g1 / n2sq, {0, 2, 0}}});
    const Eigen::VectorXd t2 =
        lower_vector(basis, {{r2 * g1 * g2 * g3, {2, 0, 0}},
                             {g3 * (g2 * g2 - g1 * g1), {1, 1, 0}},
                             {-n2sq * g2, {1, 0, 1}},
                             {-r2 * g1 * g2 * g3, {0, 2, 0}},
                             {n2sq * g1, {0, 1, 1}}}) /
        (n2sq * n3);
    const Eigen::VectorXd t3 = lower_vector(basis, {{g1 * g1 * g3 * g3, {2, 0, 0}},
                                                    {r2 * g1 * g2 * g3 * g3, {1, 1, 0}},
                                                    {-r2 * n2sq * g1 * g3, {1, 0, 1}},
                                                    {g2 * g2 * g3 * g3, {0, 2, 0}},
                                                    {-r2 * n2sq * g2 * g3, {0, 1, 1}},
                                                    {n2sq * n2sq, {0, 0, 2}}}) /
                                (n2sq * n3sq);
    CHECK((ortho.vectors[0] - t1).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((ortho.vectors[1] - t2).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((ortho.vectors[2] - t3).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("darkness verification accepts dark vectors and flags perturbed ones") {
    std::mt19937_64 rng(59);
    {
        const auto g = random_couplings(2, rng);
        const auto bh = resonant_block(2, 4, g);
        const auto ds = two_mode_closed_form(4, g);
        const auto rep = verify_dark(bh, ds);
        CHECK(rep.annihilation_residual <= 1e-10);
        CHECK(rep.gram_deviation <= 1e-12);
        CHECK(rep.upper_leakage == 0.0);
        CHECK(rep.pass());
    }
    {
        const auto g = random_couplings(2, rng);
        const auto bh = resonant_block(2, 3, g);
        auto ds = two_mode_closed_form(3, g);
        ds.vectors.vectors[0](0) += 0.05;  // deliberate perturbation
        const auto rep = verify_dark(bh, ds);
        CHECK_FALSE(rep.annihilation_pass);
    }
}

TEST_CASE("equal detunings make dark states eigenvectors with eigenvalue -n*Delta") {
    std::mt19937_64 rng(61);
    const double delta = 0.7;
    for (int modes = 2; modes <= 4; ++modes) {
        for (int n = 1; n <= 3; ++n) {
            const SubspaceBasis basis(SubspaceSpec{modes, n});
            const auto bh =
                assemble_blocks(basis, detuned_params(random_couplings(modes, rng), delta));
            const auto ds = solve_dark_states(bh);
            const auto rep = verify_dark(bh, ds);
            CHECK(rep.detunings_degenerate);
            CHECK(std::abs(rep.expected_eigenvalue + n * delta) < 1e-13);
            CHECK(rep.eigen_residual <= 1e-9);
            CHECK(rep.pass());
        }
    }
}

TEST_CASE("unequal detunings: annihilation survives, eigenstate property fails") {
    const SubspaceBasis basis(SubspaceSpec{2, 2});
    ModelParams p = resonant_params({1.1, 0.9});
    p.omegas[0] -= 0.4;
    p.omegas[1] -= 0.9;  // distinct detunings
    const auto bh = assemble_blocks(basis, p);
    const auto ds = solve_dark_states(bh, {}, {true});
    const auto rep = verify_dark(bh, ds);
    CHECK(rep.annihilation_pass);
    CHECK_FALSE(rep.detunings_degenerate);
    CHECK_FALSE(rep.eigen_pass);
}

TEST_CASE("dark projectors are invariant under positive coupling scaling") {
    std::mt19937_64 rng(67);
    const auto g = random_couplings(3, rng);
    std::vector<double> scaled = g;
    for (auto& v : scaled) v *= 37.5;
    const auto a = three_mode_closed_form_family(4, g);
    const auto b = three_mode_closed_form_family(4, scaled);
    CHECK(subspace_projector_distance(a.vectors, b.vectors).spectral <= 1e-12);
}

TEST_CASE("closed-form families agree with the numeric solver over random draws") {
    std::mt19937_64 rng(71);
    for (int rep = 0; rep < 20; ++rep) {
        {
            const auto g = random_couplings(2, rng);
            const auto numeric = solve_dark_states(resonant_block(2, 5, g));
            const auto closed = two_mode_closed_form(5, g);
            CHECK(subspace_projector_distance(numeric.vectors, closed.vectors).spectral <= 1e-9);
        }
        {
            const auto g = random_couplings(3, rng);
            const auto numeric = solve_dark_states(resonant_block(3, 4, g));
            const auto family = three_mode_closed_form_family(4, g);
            CHECK(subspace_projector_distance(numeric.vectors, family.vectors).spectral <= 1e-9);
        }
        {
            const auto g = random_couplings(4, rng);
            const auto numeric = solve_dark_states(resonant_block(4, 3, g));
            const auto family = four_mode_closed_form_family(3, g);
            CHECK(subspace_projector_distance(numeric.vectors, family.vectors).spectral <= 1e-9);
        }
        {
            const auto g = random_couplings(6, rng);
            const auto numeric = solve_dark_states(resonant_block(6, 1, g));
            const auto closed = n_mode_single_excitation_closed_form(6, g);
            CHECK(subspace_projector_distance(numeric.vectors, closed.vectors).spectral <= 1e-9);
        }
    }
}
