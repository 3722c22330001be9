#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "beltrami/grid.hpp"
#include "test_support.hpp"

using namespace beltrami;
using namespace beltrami::testing;

TEST_SUITE_BEGIN("planar_grid");

TEST_CASE("grid spec validation") {
    CHECK_NOTHROW((GridSpec{16, 4.0, 2.0}).validate());
    CHECK_THROWS_AS((GridSpec{24, 4.0, 2.0}).validate(), SpecError);  // not 2^k
    CHECK_THROWS_AS((GridSpec{8, 4.0, 2.0}).validate(), SpecError);   // too small
    CHECK_THROWS_AS((GridSpec{16, 4.0, 3.0}).validate(), SpecError);  // rho > L/2
    CHECK_THROWS_AS((GridSpec{16, -1.0, 2.0}).validate(), SpecError);
    CHECK_THROWS_AS((GridSpec{16, 4.0, 0.0}).validate(), SpecError);
}

TEST_CASE("sample coordinates and origin on the lattice") {
    GridSpec s{16, 4.0, 2.0};
    CHECK(s.point(0, 0) == cd(-4.0, -4.0));
    CHECK(s.point(8, 8) == cd(0.0, 0.0));
    CHECK(s.step() == doctest::Approx(0.5));
}

TEST_CASE("arithmetic requires matching specs") {
    ComplexGrid a(GridSpec{16, 4.0, 2.0});
    ComplexGrid b(GridSpec{32, 4.0, 2.0});
    CHECK_THROWS_AS(a += b, SpecError);
}

TEST_CASE("bilinear interpolation is exact at nodes and on affine data") {
    GridSpec s{32, 4.0, 2.0};
    ComplexGrid g = ComplexGrid::from_function(
        s, [](cd z) { return cd(2.0, -1.0) * z.real() + cd(0.5, 3.0) * z.imag(); });
    CHECK(bilinear(g, s.point(5, 7)) == g.at(5, 7));
    cd z(0.33, -1.21);  // strictly inside a cell
    cd want = cd(2.0, -1.0) * z.real() + cd(0.5, 3.0) * z.imag();
    CHECK(std::abs(bilinear(g, z) - want) < 1e-12);
}

TEST_CASE("restrict_to_disk") {
    GridSpec s{256, 4.0, 2.0};
    ComplexGrid g(s);

    SUBCASE("R = 0 returns the sample nearest the origin") {
        auto samples = restrict_to_disk(g, 0.0);
        REQUIRE(samples.size() == 1);
        CHECK(samples[0].z == cd(0.0, 0.0));
    }
    SUBCASE("R beyond the support radius is rejected") {
        CHECK_THROWS_AS(restrict_to_disk(g, 2.5), SpecError);
    }
    SUBCASE("lattice count of the unit disk matches its area") {
        auto samples = restrict_to_disk(g, 1.0);
        double expected = M_PI * std::pow(s.n / (2.0 * s.half_width), 2);
        CHECK(std::abs(double(samples.size()) - expected) <= 0.02 * expected);
    }
    SUBCASE("R = rho keeps every sample in the support disk") {
        auto samples = restrict_to_disk(g, s.support_radius);
        std::size_t count = 0;
        for (int j = 0; j < s.n; ++j)
            for (int k = 0; k < s.n; ++k)
                if (std::abs(s.point(j, k)) <= s.support_radius) ++count;
        CHECK(samples.size() == count);
    }
}

TEST_CASE("binary container round-trips bit-exactly") {
    GridSpec s{16, 4.0, 2.0};
    Rng rng(7);
    ComplexGrid g = random_smooth(s, rng, 3, false);
    std::stringstream buf;
    write_grid(g, buf);

    SUBCASE("header layout") {
        std::string bytes = buf.str();
        CHECK(bytes.substr(0, 4) == "BELT");
        CHECK(bytes.size() == 4 + 4 + 4 + 8 + 8 + g.values.size() * 16);
    }
    SUBCASE("payload identity") {
        ComplexGrid back = read_grid(buf);
        CHECK(back.spec == g.spec);
        for (std::size_t i = 0; i < g.values.size(); ++i)
            CHECK(back.values[i] == g.values[i]);
    }
}

TEST_CASE("corrupt container is rejected") {
    std::stringstream buf("NOPE");
    CHECK_THROWS_AS(read_grid(buf), Error);
}

TEST_CASE("csv export shape") {
    GridSpec s{16, 4.0, 2.0};
    ComplexGrid g(s);
    g.at(0, 0) = cd(1.5, -2.5);
    std::string path = "test_grid_export.csv";
    write_grid_csv(g, path);
    std::ifstream in(path);
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header == "j,k,re_z,im_z,re_g,im_g");
    CHECK(first == "0,0,-4,-4,1.5,-2.5");
    in.close();
    std::remove(path.c_str());
}

TEST_SUITE_END();
