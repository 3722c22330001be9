#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "beltrami/reconstruction.hpp"
#include "test_support.hpp"

using namespace beltrami;
using namespace beltrami::testing;

namespace {

AValueSet small_annulus_set() {
    return make_annulus_disk_set({0.5, 1.0, 2.0}, 16, 3, 1.5);
}

}  // namespace

TEST_SUITE_BEGIN("reconstruction");

TEST_CASE("annulus-plus-disk pattern contains the origin and ordered rings") {
    AValueSet set = make_annulus_disk_set({0.5, 1.0}, 8, 3, 1.0);
    CHECK(set.circles.size() == 2);
    CHECK(set.circles[0].size() == 8);
    CHECK(set.interior.front() == cd(0, 0));
    CHECK(set.all().size() == 8 + 8 + set.interior.size());
}

TEST_CASE("zero-member chart: identity map diagnostics") {
    GridSpec s{64, 4.0, 2.0};
    auto ops = make_operators(s);
    GradientChart chart =
        gradient_chart(make_zero(), cd(0.3, 0.2), small_annulus_set(), ops, {});
    CHECK(chart.failures == 0);
    CHECK(chart.injectivity_violations == 0);
    for (int w : chart.windings) CHECK(w == 1);
    CHECK(chart.ratio_min == doctest::Approx(1.0));
    CHECK(chart.ratio_max == doctest::Approx(1.0));
    // Image circles grow with |a|: the divergence shadow at a = infinity.
    CHECK(chart.circle_min_abs_F[0] < chart.circle_min_abs_F[1]);
    CHECK(chart.circle_min_abs_F[1] < chart.circle_min_abs_F[2]);
}

TEST_CASE("zero-member inversion returns a = w immediately") {
    GridSpec s{64, 4.0, 2.0};
    auto ops = make_operators(s);
    GradientChart chart =
        gradient_chart(make_zero(), cd(0.3, 0.2), small_annulus_set(), ops, {});
    InversionResult inv = invert_gradient(make_zero(), chart, cd(0.7, -0.4), ops, {});
    CHECK(std::abs(inv.a - cd(0.7, -0.4)) <= 1e-9);
    CHECK(inv.newton_steps <= 1);  // the map is exactly linear
    CHECK(std::abs(inv.dzbar_at_probe) <= 1e-12);
}

TEST_CASE("targets outside the sampled annulus are refused") {
    GridSpec s{64, 4.0, 2.0};
    auto ops = make_operators(s);
    GradientChart chart =
        gradient_chart(make_zero(), cd(0.3, 0.2), small_annulus_set(), ops, {});
    CHECK_THROWS_AS(invert_gradient(make_zero(), chart, cd(50, 0), ops, {}),
                    OutsideChart);
}

TEST_CASE("w = 0 inverts to the zero map exactly") {
    GridSpec s{64, 4.0, 2.0};
    auto ops = make_operators(s);
    GradientChart chart = gradient_chart(make_smooth(0.3, 0.5), cd(0.2, 0.1),
                                         small_annulus_set(), ops, {});
    InversionResult inv =
        invert_gradient(make_smooth(0.3, 0.5), chart, cd(0, 0), ops, {});
    CHECK(inv.a == cd(0, 0));
    CHECK(inv.dzbar_at_probe == cd(0, 0));
}

TEST_CASE("C-linear member reconstructs mu(z) w through the pipeline") {
    GridSpec s{128, 4.0, 2.0};
    auto ops = make_operators(s);
    StructureFunction C = make_clin(cd(0.25, 0.05));
    cd zp(0.25, 0.25), w(0.8, 0.3);
    GradientChart chart = gradient_chart(C, zp, small_annulus_set(), ops, {});
    cd rec = reconstruct_H(C, zp, w, ops, chart, {});
    CHECK(std::abs(rec - cd(0.25, 0.05) * w) / std::abs(w) <= 1e-6);
}

TEST_CASE("R-linear member: gradient map is affine in a, winding +-1") {
    GridSpec s{128, 4.0, 2.0};
    auto ops = make_operators(s);
    StructureFunction L = make_rlin(cd(0.2, 0.0), cd(0.1, 0.0), Profile::Bump);
    cd zp(0.3, 0.2);
    // Central second difference over a collinear equally spaced triple.
    FieldSample g1 = solve_for_a(L, cd(0.5, 0), ops, {});
    FieldSample g2 = solve_for_a(L, cd(1.0, 0), ops, {});
    FieldSample g3 = solve_for_a(L, cd(1.5, 0), ops, {});
    CHECK(std::abs(g1.dz(zp) + g3.dz(zp) - 2.0 * g2.dz(zp)) <= 1e-9);

    GradientChart chart = gradient_chart(L, zp, small_annulus_set(), ops, {});
    CHECK(chart.injectivity_violations == 0);
    for (int w : chart.windings) CHECK(std::abs(w) == 1);
}

TEST_CASE("smooth member chart at the example probe") {
    GridSpec s{128, 4.0, 2.0};
    auto ops = make_operators(s);
    AValueSet set = make_annulus_disk_set({2.0}, 64, 0, 0.0);
    GradientChart chart =
        gradient_chart(make_smooth(0.3, 0.5), cd(0.2, 0.1), set, ops, {});
    CHECK(chart.failures == 0);
    REQUIRE(chart.windings.size() == 1);
    CHECK(std::abs(chart.windings[0]) == 1);
    CHECK(chart.injectivity_violations == 0);
}

TEST_CASE("inversion round-trips the chart's own samples") {
    GridSpec s{128, 4.0, 2.0};
    auto ops = make_operators(s);
    StructureFunction S = make_smooth(0.3, 0.5);
    GradientChart chart =
        gradient_chart(S, cd(0.2, 0.1), small_annulus_set(), ops, {});
    for (std::size_t i = 0; i < chart.samples.size(); i += 9) {
        const ChartSample& cs = chart.samples[i];
        if (!cs.ok || std::abs(cs.a) < 1e-12) continue;
        InversionResult inv = invert_gradient(S, chart, cs.F, ops, {});
        CHECK(std::abs(inv.a - cs.a) <= 1e-8);
    }
}

TEST_CASE("inverse map is continuous in w (bounded difference quotients)") {
    GridSpec s{128, 4.0, 2.0};
    auto ops = make_operators(s);
    StructureFunction S = make_smooth(0.3, 0.5);
    GradientChart chart =
        gradient_chart(S, cd(0.2, 0.1), small_annulus_set(), ops, {});
    cd w0(0.9, 0.2);
    InversionResult base = invert_gradient(S, chart, w0, ops, {});
    for (cd dw : {cd(1e-3, 0), cd(0, 1e-3), cd(-7e-4, 7e-4)}) {
        InversionResult moved = invert_gradient(S, chart, w0 + dw, ops, {});
        double quotient = std::abs(moved.a - base.a) / std::abs(dw);
        CHECK(quotient <= 10.0);  // measured chart slope ~ 1/|F'| ~ 1
        CHECK(quotient > 0.0);
    }
}

TEST_CASE("radial member reconstructs its closed form at a probed gradient") {
    GridSpec s{128, 4.0, 2.0};
    auto ops = make_operators(s);
    StructureFunction R = make_radial(1.0 / 3.0);
    cd zp(0.3, 0.2);
    GradientChart chart = gradient_chart(R, zp, small_annulus_set(), ops, {});
    FieldSample f1 = solve_for_a(R, cd(1, 0), ops, {});
    cd w = f1.dz(zp);
    cd rec = reconstruct_H(R, zp, w, ops, chart, {});
    cd want = (1.0 / 3.0) * (zp / std::conj(zp)) * std::abs(w);
    CHECK(std::abs(rec - want) / std::abs(w) <= 0.01);  // measured 3.2e-3
}

TEST_CASE("round trip: zero member has zero error everywhere") {
    GridSpec s{64, 4.0, 2.0};
    auto ops = make_operators(s);
    std::vector<cd> zp = {cd(0.2, 0.1), cd(-0.3, 0.3)};
    std::vector<cd> wp = {cd(0.6, 0), cd(0, 0.9), cd(-0.5, 0.5)};
    RoundTripReport rep = round_trip(make_zero(), zp, wp, ops, small_annulus_set(), {});
    CHECK(rep.failures == 0);
    CHECK(rep.sup_abs_err == 0.0);
    CHECK(rep.h_zero_max == 0.0);
    CHECK(rep.probes.size() == 6);
}

TEST_CASE("round trip: R-linear member at modest resolution") {
    GridSpec s{128, 4.0, 2.0};
    auto ops = make_operators(s);
    StructureFunction L = make_rlin(cd(0.2, 0.0), cd(0.1, 0.0), Profile::Bump);
    std::vector<cd> zp = {cd(0.2, 0.1), cd(-0.3, 0.25), cd(0.4, -0.3)};
    AValueSet set = small_annulus_set();
    auto charts = gradient_charts(L, zp, set, ops, {});
    std::vector<cd> wp = w_probe_window(charts, 3, 4);
    RoundTripOptions opts;
    opts.threads = 2;
    RoundTripReport rep = round_trip(L, zp, wp, ops, set, opts);
    CHECK(rep.failures == 0);
    CHECK(rep.sup_rel_err <= 5e-3);  // measured 7e-4 at n=128
    // Reconstructed values stay k-Lipschitz in w and vanish at w = 0.
    CHECK(rep.lipschitz_w_quotient_max <= L.k_bound + 1e-3);
    CHECK(rep.h_zero_max == 0.0);
    // Holder-in-z quotients of the reconstruction stay near the source's.
    double source_quotient = 0.0;
    for (const auto& p1 : rep.probes)
        for (const auto& p2 : rep.probes) {
            if (p1.w != p2.w || std::abs(p1.z - p2.z) < 1e-9) continue;
            source_quotient = std::max(
                source_quotient,
                std::abs(L.evaluate(p1.z, p1.w) - L.evaluate(p2.z, p1.w)) /
                    std::pow(std::abs(p1.z - p2.z), rep.holder_exponent));
        }
    CHECK(rep.holder_z_quotient_max <= 2.0 * source_quotient + 1e-6);
}

TEST_CASE("round-trip CSV export") {
    GridSpec s{64, 4.0, 2.0};
    auto ops = make_operators(s);
    std::vector<cd> zp = {cd(0.2, 0.1)};
    std::vector<cd> wp = {cd(0.5, 0)};
    RoundTripReport rep = round_trip(make_zero(), zp, wp, ops, small_annulus_set(), {});
    write_round_trip_csv(rep, "rt_test.csv");
    std::ifstream in("rt_test.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "re_z,im_z,re_w,im_w,abs_err,rel_err");
    in.close();
    std::remove("rt_test.csv");
}

TEST_SUITE_END();
