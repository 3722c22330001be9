#include <CLI11.hpp>

#include "commands.hpp"

using namespace beltrami::cli;

namespace {

void add_common(CLI::App* cmd, ExperimentConfig& cfg) {
    cmd->add_option("--H", cfg.structure,
                    "structure function id, e.g. radial:k=0.3333");
    cmd->add_option("--n", cfg.n, "grid samples per side (power of two)");
    cmd->add_option("--L", cfg.half_width, "grid half-width");
    cmd->add_option("--rho", cfg.support_radius, "coefficient support radius");
    cmd->add_option("--tol", cfg.tol, "solver L2 stopping tolerance");
    cmd->add_option("--max-iter", cfg.max_iter, "solver iteration cap");
    cmd->add_option("--newton-tol", cfg.newton_tol, "field Newton tolerance");
    cmd->add_option("--max-newton", cfg.max_newton, "field Newton step cap");
    cmd->add_option("--threads", cfg.threads, "worker pool size");
    cmd->add_option("--out", cfg.out_dir, "output directory");
    cmd->add_option("--seed", cfg.seed, "deterministic probe seed");
    cmd->add_flag("--deterministic,!--no-deterministic", cfg.deterministic,
                  "bit-reproducible mode (default on)");
    cmd->set_config("--config", "", "key=value config file");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "beltrami: nonlinear Beltrami solver, quasiconformal field builder, "
        "and structure-function reconstruction toolkit"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    PlotConfig plot;

    CLI::App* solve = app.add_subcommand("solve", "solve one principal solution");
    add_common(solve, cfg);
    solve->add_option("--w", cfg.w, "asymptotic slope");
    solve->add_flag("--write-grids", cfg.write_grids, "also export CSV grids");

    CLI::App* field = app.add_subcommand("field", "sweep field members phi_a");
    add_common(field, cfg);
    field->add_option("--a", cfg.a_set,
                      "a-set: circle:r=1,n=16 | grid:re=[-2,2],im=[-2,2],n=9 | "
                      "list:1+0i;0.5-0.2i");
    field->add_flag("--write-grids", cfg.write_grids,
                    "write one value grid per sample");

    CLI::App* tangent = app.add_subcommand(
        "tangent", "directional derivatives and linearized coefficients");
    add_common(tangent, cfg);
    tangent->add_option("--a", cfg.a, "base point a");
    tangent->add_option("--e", cfg.e, "direction e");
    tangent->add_option("--t", cfg.t_step, "finite-difference step ladder base");

    CLI::App* reconstruct = app.add_subcommand(
        "reconstruct", "invert the gradient map and rebuild the nonlinearity");
    add_common(reconstruct, cfg);
    reconstruct->add_option("--z-probes", cfg.z_probes, "number of probe points");
    reconstruct->add_option("--w-radii", cfg.w_radii, "w-probe radii count");
    reconstruct->add_option("--w-angles", cfg.w_angles, "w-probe angles count");
    reconstruct->add_flag("--png", cfg.write_png, "emit an error heat map");

    CLI::App* verify = app.add_subcommand(
        "verify", "run the property suite and print a pass/fail table");
    add_common(verify, cfg);
    verify->add_option("--t", cfg.t_step, "tangent ladder base step");

    CLI::App* plot_cmd = app.add_subcommand("plot", "render a grid container");
    plot_cmd->add_option("--in", plot.input, "input .belt grid")->required();
    plot_cmd->add_option("--sidecar", plot.sidecar, "solution JSON for --mode grid");
    plot_cmd->add_option("--out-file", plot.output, "output PNG path");
    plot_cmd->add_option("--mode", plot.mode, "heat | grid");
    plot_cmd->add_option("--component", plot.component, "abs | re | im");
    plot_cmd->add_option("--lines", plot.lines, "coordinate lines per direction");
    plot_cmd->add_option("--pixels", plot.pixels, "raster side length");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfigError;
    }

    if (solve->parsed()) return run_solve(cfg);
    if (field->parsed()) return run_field(cfg);
    if (tangent->parsed()) return run_tangent(cfg);
    if (reconstruct->parsed()) return run_reconstruct(cfg);
    if (verify->parsed()) return run_verify(cfg);
    if (plot_cmd->parsed()) return run_plot(plot);
    return kExitConfigError;
}
