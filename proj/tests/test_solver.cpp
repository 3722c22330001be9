#include <doctest.h>

#include "beltrami/solver.hpp"
#include "test_support.hpp"

using namespace beltrami;
using namespace beltrami::testing;

namespace {

cd radial_stretch_principal(cd z, double K) {
    double r = std::abs(z);
    if (r >= 1.0) return z;
    return r == 0.0 ? cd{} : z * std::pow(r, K - 1.0);
}

// Sup error of the normalized solution values against the closed form,
// relative to the closed form's scale, over the support disk.
double radial_value_error(const PrincipalSolution& sol, double K) {
    const GridSpec& s = sol.omega.spec;
    cd f0 = sol.value(cd(0, 0));
    double err = 0.0, scale = 0.0;
    for (int j = 0; j < s.n; ++j) {
        for (int k = 0; k < s.n; ++k) {
            cd z = s.point(j, k);
            if (std::abs(z) > s.support_radius) continue;
            cd want = radial_stretch_principal(z, K);
            cd got = sol.w_infinity * z + sol.f_values.at(j, k) - f0;
            err = std::max(err, std::abs(got - want));
            scale = std::max(scale, std::abs(want));
        }
    }
    return err / scale;
}

ComplexGrid radial_mu_grid(const GridSpec& s, double k0) {
    return ComplexGrid::from_function(s, [&](cd z) {
        double r = std::abs(z);
        return (r > 0.0 && r < 1.0) ? k0 * z / std::conj(z) : cd{};
    });
}

}  // namespace

TEST_SUITE_BEGIN("beltrami_solver");

TEST_CASE("zero structure function gives the conformal map in one step") {
    GridSpec s{64, 4.0, 2.0};
    auto ops = make_operators(s);
    PrincipalSolution sol = solve_nonlinear(make_zero(), cd(1, 2), ops, {});
    CHECK(sol.iterations == 1);
    CHECK(sol.residual == 0.0);
    CHECK(sol.omega.sup_abs() == 0.0);
    CHECK(sol.f_values.sup_abs() == 0.0);
    CHECK(sol.value(cd(0.5, 0.25)) == cd(1, 2) * cd(0.5, 0.25));
}

TEST_CASE("radial oracle: nonlinear route reproduces z|z| at n=256") {
    const double k0 = 1.0 / 3.0;
    GridSpec s{256, 4.0, 2.0};
    auto ops = make_operators(s);
    PrincipalSolution sol = solve_nonlinear(make_radial(k0), cd(1, 0), ops, {});
    CHECK(radial_value_error(sol, 2.0) <= 0.008);  // measured 0.0052
    CHECK(sol.residual <= 1e-9);                   // measured 8e-11
    CHECK(sol.contraction_ratio <= k0 + 0.02);
    CHECK(min_jacobian_disk(sol, s.support_radius) > 0.0);
    // omega supported in the unit disk, and dzbar_f is omega by construction.
    for (int j = 0; j < s.n; ++j)
        for (int k = 0; k < s.n; ++k)
            if (std::abs(s.point(j, k)) >= 1.0)
                CHECK(sol.omega.at(j, k) == cd{});
    CHECK(&sol.dzbar_f() == &sol.omega);
}

TEST_CASE("radial oracle: linear route through solve_rlinear") {
    GridSpec s{256, 4.0, 2.0};
    auto ops = make_operators(s);
    LinearSolveProblem p{radial_mu_grid(s, 1.0 / 3.0), ComplexGrid(s), cd(1, 0),
                         std::nullopt};
    PrincipalSolution sol = solve_rlinear(p, ops, {});
    CHECK(radial_value_error(sol, 2.0) <= 0.008);
    CHECK(sol.residual <= 1e-9);
}

TEST_CASE("trivial R-linear problem returns the identity slope map") {
    GridSpec s{64, 4.0, 2.0};
    auto ops = make_operators(s);
    LinearSolveProblem p{ComplexGrid(s), ComplexGrid(s), cd(1, 0), std::nullopt};
    PrincipalSolution sol = solve_rlinear(p, ops, {});
    CHECK(sol.omega.sup_abs() == 0.0);
    CHECK(sol.value(cd(0.7, -0.3)) == cd(0.7, -0.3));
}

TEST_CASE("R-linear solutions for e = 1 and e = i are R-independent") {
    GridSpec s{128, 4.0, 2.0};
    auto ops = make_operators(s);
    ComplexGrid mu = radial_mu_grid(s, 1.0 / 3.0);
    LinearSolveProblem p1{mu, ComplexGrid(s), cd(1, 0), std::nullopt};
    LinearSolveProblem pi{mu, ComplexGrid(s), cd(0, 1), std::nullopt};
    PrincipalSolution g1 = solve_rlinear(p1, ops, {});
    PrincipalSolution gi = solve_rlinear(pi, ops, {});
    double inf = std::numeric_limits<double>::infinity();
    for (int j = 0; j < s.n; ++j)
        for (int k = 0; k < s.n; ++k) {
            if (std::abs(s.point(j, k)) > s.support_radius) continue;
            inf = std::min(inf, std::abs(std::imag(g1.dz_f.at(j, k) *
                                                   std::conj(gi.dz_f.at(j, k)))));
        }
    CHECK(inf > 0.0);
}

TEST_CASE("contraction certificate: geometric decay of iterate distances") {
    GridSpec s{128, 4.0, 2.0};
    auto ops = make_operators(s);
    StructureFunction H = make_clin(cd(0.3, 0.0));
    std::vector<double> hist;
    SolveOptions opts;
    opts.distance_history = &hist;
    PrincipalSolution sol = solve_nonlinear(H, cd(1, -1), ops, opts);
    REQUIRE(hist.size() >= 3);
    CHECK(sol.contraction_ratio <= H.k_bound + 0.02);
    // Banach chain: d_m <= k^m d_0 certifies ||omega_m - omega*|| <=
    // k^m ||omega_1|| / (1 - k).
    for (std::size_t m = 1; m < hist.size(); ++m) {
        if (hist[m] < 1e-13) break;  // rounding floor
        CHECK(hist[m] <= hist[0] * std::pow(H.k_bound, double(m)) * 1.05);
    }
}

TEST_CASE("residual recomputation is independent and sensitive") {
    GridSpec s{128, 4.0, 2.0};
    auto ops = make_operators(s);
    StructureFunction H = make_radial(1.0 / 3.0);
    PrincipalSolution sol = solve_nonlinear(H, cd(1, 0), ops, {});
    CHECK(residual_of(H, sol) == sol.residual);

    // Corrupt omega by 1e-3 noise on the support and rebuild the gradient.
    Rng rng(41);
    PrincipalSolution bad = sol;
    for (int j = 0; j < s.n; ++j)
        for (int k = 0; k < s.n; ++k)
            if (std::abs(s.point(j, k)) < 1.0)
                bad.omega.at(j, k) += 1e-3 * rng.unit_phase();
    bad.dz_f = ops.beurling(bad.omega);
    for (cd& v : bad.dz_f.values) v += bad.w_infinity;
    CHECK(residual_of(H, bad) >= 1e-4);
}

TEST_CASE("distortion check") {
    GridSpec s{128, 4.0, 2.0};
    auto ops = make_operators(s);

    SUBCASE("zero member has zero distortion") {
        PrincipalSolution sol = solve_nonlinear(make_zero(), cd(1, 0), ops, {});
        CHECK(distortion_check(sol).max_ratio == 0.0);
    }
    SUBCASE("radial member sits exactly at k0") {
        PrincipalSolution sol =
            solve_nonlinear(make_radial(1.0 / 3.0), cd(1, 0), ops, {});
        DistortionReport rep = distortion_check(sol);
        CHECK(std::abs(rep.max_ratio - 1.0 / 3.0) <= 1e-3);
        CHECK(rep.flagged == 0);
    }
    SUBCASE("constant R-linear coefficients stay under |mu| + |nu|") {
        PrincipalSolution sol = solve_nonlinear(
            make_rlin(cd(0.2, 0.0), cd(0.1, 0.0)), cd(1, 0), ops, {});
        CHECK(distortion_check(sol).max_ratio <= 0.3 + 1e-3);
    }
}

TEST_CASE("difference of two solutions is quasiregular with the same k") {
    GridSpec s{128, 4.0, 2.0};
    auto ops = make_operators(s);
    StructureFunction H = make_smooth(0.3, 0.5);
    PrincipalSolution f1 = solve_nonlinear(H, cd(1, 0), ops, {});
    PrincipalSolution f2 = solve_nonlinear(H, cd(0.6, 0.3), ops, {});
    double slack = f1.residual + f2.residual + 1e-9 * 2.0;
    for (std::size_t i = 0; i < f1.omega.values.size(); ++i) {
        double lhs = std::abs(f1.omega.values[i] - f2.omega.values[i]);
        double rhs = H.k_bound *
                         std::abs(f1.dz_f.values[i] - f2.dz_f.values[i]) +
                     slack;
        CHECK(lhs <= rhs);
    }
}

TEST_CASE("warm starts shorten nearby solves") {
    GridSpec s{128, 4.0, 2.0};
    auto ops = make_operators(s);
    StructureFunction H = make_radial(1.0 / 3.0);
    PrincipalSolution cold = solve_nonlinear(H, cd(1, 0), ops, {});
    SolveOptions warm;
    warm.warm_start = &cold.omega;
    PrincipalSolution near = solve_nonlinear(H, cd(1.02, 0), ops, warm);
    CHECK(near.iterations < cold.iterations);
    CHECK(near.residual <= 1e-9);
}

TEST_CASE("non-convergence is reported with the measured ratio") {
    GridSpec s{64, 4.0, 2.0};
    auto ops = make_operators(s);
    SolveOptions opts;
    opts.max_iter = 2;
    try {
        solve_nonlinear(make_smooth(0.3, 0.5), cd(1, 0), ops, opts);
        FAIL("expected NonConvergence");
    } catch (const NonConvergence& e) {
        CHECK(e.iterations == 2);
    }
}

TEST_CASE("understated k_bound trips the ellipticity guard") {
    GridSpec s{64, 4.0, 2.0};
    auto ops = make_operators(s);
    StructureFunction lying = make_clin(cd(0.5, 0.0));
    lying.k_bound = 0.2;
    CHECK_THROWS_AS(solve_nonlinear(lying, cd(1, 0), ops, {}), EllipticityViolation);
}

TEST_CASE("k_bound >= 1 is rejected up front") {
    GridSpec s{64, 4.0, 2.0};
    auto ops = make_operators(s);
    CHECK_THROWS_AS(solve_nonlinear(make_clin(cd(1.1, 0.0)), cd(1, 0), ops, {}),
                    EllipticityViolation);
}

TEST_CASE("linear problems validate ellipticity and support") {
    GridSpec s{64, 4.0, 2.0};
    auto ops = make_operators(s);
    SUBCASE("pointwise |mu| + |nu| >= 1") {
        ComplexGrid mu = ComplexGrid::from_function(
            s, [](cd z) { return std::abs(z) < 1.0 ? cd(0.7, 0) : cd{}; });
        ComplexGrid nu = ComplexGrid::from_function(
            s, [](cd z) { return std::abs(z) < 1.0 ? cd(0.4, 0) : cd{}; });
        LinearSolveProblem p{mu, nu, cd(1, 0), std::nullopt};
        CHECK_THROWS_AS(solve_rlinear(p, ops, {}), EllipticityViolation);
    }
    SUBCASE("coefficients beyond the support radius") {
        ComplexGrid mu = ComplexGrid::from_function(
            s, [](cd) { return cd(0.3, 0); });  // no compact support
        LinearSolveProblem p{mu, ComplexGrid(s), cd(1, 0), std::nullopt};
        CHECK_THROWS_AS(solve_rlinear(p, ops, {}), SpecError);
    }
}

TEST_SUITE_END();
