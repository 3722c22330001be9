#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "beltrami/grid.hpp"

namespace beltrami::cli {

// Exit-code contract: 0 = all checks pass, 1 = check failures,
// 2 = configuration error, 3 = solver non-convergence.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNonConvergence = 3;

struct ExperimentConfig {
    std::string structure = "zero";

    int n = 256;
    double half_width = 4.0;
    double support_radius = 2.0;

    double tol = 1e-10;
    int max_iter = 500;
    double newton_tol = 1e-9;
    int max_newton = 40;

    std::string w = "1+0i";      // solve slope
    std::string a_set = "circle:r=1,n=8";
    std::string a = "1+0i";      // tangent base point
    std::string e = "1+0i";      // tangent direction
    double t_step = 0.02;        // tangent ladder base step

    int z_probes = 4;
    int w_radii = 4;
    int w_angles = 4;

    std::string out_dir = "out";
    std::uint64_t seed = 42;
    int threads = 1;
    bool deterministic = true;
    bool write_grids = false;
    bool write_png = false;

    GridSpec grid_spec() const;
    /// Full key=value echo; identical configs print identically.
    void echo(std::ostream& out) const;
};

struct PlotConfig {
    std::string input;         // .belt container
    std::string sidecar;       // optional JSON with the slope w
    std::string output = "plot.png";
    std::string mode = "heat";       // heat | grid
    std::string component = "abs";   // abs | re | im
    int lines = 17;
    int pixels = 512;
};

int run_solve(const ExperimentConfig& cfg);
int run_field(const ExperimentConfig& cfg);
int run_tangent(const ExperimentConfig& cfg);
int run_reconstruct(const ExperimentConfig& cfg);
int run_verify(const ExperimentConfig& cfg);
int run_plot(const PlotConfig& cfg);

}  // namespace beltrami::cli
