#include <doctest.h>

#include "beltrami/spectral.hpp"
#include "test_support.hpp"

using namespace beltrami;
using namespace beltrami::testing;

TEST_SUITE_BEGIN("planar_grid");

TEST_CASE("make_operators validates and tabulates") {
    CHECK_NOTHROW(make_operators((GridSpec{16, 4.0, 2.0})));
    CHECK_THROWS_AS(make_operators((GridSpec{16, 4.0, 3.0})), SpecError);
    auto ops = make_operators(GridSpec{16, 4.0, 2.0});
    CHECK(ops.beurling_multiplier().size() == 256);
}

TEST_CASE("beurling multiplier is unimodular away from zero") {
    auto ops = make_operators(GridSpec{256, 4.0, 2.0});
    const auto& mult = ops.beurling_multiplier();
    CHECK(mult[0] == cd(0.0, 0.0));
    double dev = 0.0;
    for (std::size_t i = 1; i < mult.size(); ++i)
        dev = std::max(dev, std::abs(std::abs(mult[i]) - 1.0));
    CHECK(dev <= 1e-15);  // zero up to one rounding of the division
    CHECK(ops.cauchy_multiplier()[0] == cd(0.0, 0.0));
}

TEST_CASE("derivatives are spectrally exact on a pure Fourier mode") {
    GridSpec s{64, 4.0, 2.0};
    auto ops = make_operators(s);
    const double L = s.half_width;
    ComplexGrid g = ComplexGrid::from_function(
        s, [&](cd z) { return std::exp(cd(0, M_PI / L) * z.real()); });
    ComplexGrid want = g;
    want *= cd(0, M_PI / (2.0 * L));
    CHECK(rel_sup_error(ops.d_z(g), want) <= 1e-12);
    // The mode depends on x only, so both Wirtinger derivatives are dx/2.
    CHECK(rel_sup_error(ops.d_zbar(g), want) <= 1e-12);
}

TEST_CASE("derivatives of a constant vanish") {
    GridSpec s{32, 4.0, 2.0};
    auto ops = make_operators(s);
    ComplexGrid g = ComplexGrid::from_function(s, [](cd) { return cd(2.5, -1.0); });
    CHECK(ops.d_z(g).sup_abs() <= 1e-14);
    CHECK(ops.d_zbar(g).sup_abs() <= 1e-14);
}

TEST_CASE("derivative of a supported bump has zero mean") {
    GridSpec s{128, 4.0, 2.0};
    auto ops = make_operators(s);
    ComplexGrid g = ComplexGrid::from_function(s, [&](cd z) {
        double r = std::abs(z) / s.support_radius;
        return r < 1.0 ? cd(std::exp(1.0 - 1.0 / (1.0 - r * r)), 0.0) : cd{};
    });
    double area = std::pow(2.0 * s.half_width, 2);
    CHECK(std::abs(ops.d_zbar(g).mean()) * area <= 1e-12);
}

TEST_CASE("cauchy of zero is zero, with clean diagnostics") {
    GridSpec s{32, 4.0, 2.0};
    auto ops = make_operators(s);
    CauchyStats stats;
    ComplexGrid out = ops.cauchy(ComplexGrid(s), &stats);
    CHECK(out.sup_abs() == 0.0);
    CHECK(stats.discarded_mean_abs == 0.0);
    CHECK_FALSE(stats.warned);
}

TEST_CASE("large discarded mean raises the warning diagnostic") {
    GridSpec s{32, 4.0, 2.0};
    auto ops = make_operators(s);
    ComplexGrid g = ComplexGrid::from_function(s, [](cd) { return cd(1.0, 0.0); });
    CauchyStats stats;
    ops.cauchy(g, &stats);
    CHECK(stats.discarded_mean_abs == doctest::Approx(1.0));
    CHECK(stats.warned);
}

TEST_CASE("dzbar after cauchy restores a mean-zero field") {
    GridSpec s{64, 4.0, 2.0};
    auto ops = make_operators(s);
    Rng rng(11);
    ComplexGrid g = random_smooth(s, rng);
    ComplexGrid back = ops.d_zbar(ops.cauchy(g));
    CHECK(rel_l2_error(back, g) <= 1e-10);
}

TEST_CASE("cauchy of the disk indicator matches the closed form inside") {
    // The input is the mean-subtracted indicator of the unit disk; the
    // corresponding closed form inside the disk is (1 - m) conj(z) with m
    // the subtracted mean, up to an additive constant and the lattice tail.
    GridSpec s{512, 4.0, 2.0};
    auto ops = make_operators(s);
    ComplexGrid chi = ComplexGrid::from_function(
        s, [](cd z) { return std::abs(z) < 1.0 ? cd(1, 0) : cd(0, 0); });
    cd m = chi.mean();
    ComplexGrid g = chi;
    for (cd& v : g.values) v -= m;
    ComplexGrid u = ops.cauchy(g);
    cd offset = bilinear(u, cd(0, 0));  // fix the constant at z = 0
    double err = 0.0, scale = 0.0;
    for (int j = 0; j < s.n; ++j) {
        for (int k = 0; k < s.n; ++k) {
            cd z = s.point(j, k);
            if (std::abs(z) >= 0.9) continue;
            cd want = (1.0 - m) * std::conj(z);
            err = std::max(err, std::abs(u.at(j, k) - offset - want));
            scale = std::max(scale, std::abs(want));
        }
    }
    CHECK(err / scale <= 0.02);
}

TEST_CASE("beurling of zero is zero") {
    GridSpec s{32, 4.0, 2.0};
    auto ops = make_operators(s);
    CHECK(ops.beurling(ComplexGrid(s)).sup_abs() == 0.0);
}

TEST_CASE("beurling isometry on mean-zero data") {
    GridSpec s{128, 4.0, 2.0};
    auto ops = make_operators(s);
    Rng rng(3);
    for (int trial = 0; trial < 4; ++trial) {
        ComplexGrid g = random_smooth(s, rng, 8, false);
        cd m = g.mean();
        ComplexGrid centered = g;
        for (cd& v : centered.values) v -= m;
        double n0 = centered.norm_l2();
        double n1 = ops.beurling(g).norm_l2();
        CHECK(std::abs(n1 - n0) <= 1e-12 * n0);
    }
}

TEST_CASE("beurling of the disk indicator matches -1/z^2 outside") {
    // Relative L2 over the annulus: the sup norm is dominated by the
    // pixelized disk edge (an O(h) layer at |z| = 1) rather than by the
    // transform itself.
    GridSpec s{512, 4.0, 2.0};
    auto ops = make_operators(s);
    ComplexGrid chi = ComplexGrid::from_function(
        s, [](cd z) { return std::abs(z) < 1.0 ? cd(1, 0) : cd(0, 0); });
    cd m = chi.mean();
    for (cd& v : chi.values) v -= m;
    ComplexGrid sg = ops.beurling(chi);
    double err2 = 0.0, scale2 = 0.0;
    for (int j = 0; j < s.n; ++j) {
        for (int k = 0; k < s.n; ++k) {
            cd z = s.point(j, k);
            double r = std::abs(z);
            if (r <= 1.1 || r >= 1.9) continue;
            cd want = -1.0 / (z * z);
            err2 += std::norm(sg.at(j, k) - want);
            scale2 += std::norm(want);
        }
    }
    CHECK(std::sqrt(err2 / scale2) <= 0.03);
}

TEST_CASE("beurling commutes: S dzbar = d_z on smooth grids") {
    GridSpec s{64, 4.0, 2.0};
    auto ops = make_operators(s);
    Rng rng(19);
    ComplexGrid g = random_smooth(s, rng);
    CHECK(rel_l2_error(ops.beurling(ops.d_zbar(g)), ops.d_z(g)) <= 1e-10);
}

TEST_CASE("operations reject mismatched specs") {
    auto ops = make_operators(GridSpec{32, 4.0, 2.0});
    ComplexGrid g(GridSpec{64, 4.0, 2.0});
    CHECK_THROWS_AS(ops.d_z(g), SpecError);
}

TEST_SUITE_END();
