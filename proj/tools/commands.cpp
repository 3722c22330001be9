#include "commands.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "beltrami/png.hpp"
#include "beltrami/reconstruction.hpp"

namespace beltrami::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

GridSpec ExperimentConfig::grid_spec() const {
    return GridSpec{n, half_width, support_radius};
}

void ExperimentConfig::echo(std::ostream& out) const {
    out << "structure=" << structure << "\n";
    out << "n=" << n << "\n";
    out << "L=" << half_width << "\n";
    out << "rho=" << support_radius << "\n";
    out << "tol=" << tol << "\n";
    out << "max_iter=" << max_iter << "\n";
    out << "newton_tol=" << newton_tol << "\n";
    out << "max_newton=" << max_newton << "\n";
    out << "w=" << w << "\n";
    out << "a_set=" << a_set << "\n";
    out << "a=" << a << "\n";
    out << "e=" << e << "\n";
    out << "t_step=" << t_step << "\n";
    out << "z_probes=" << z_probes << "\n";
    out << "w_radii=" << w_radii << "\n";
    out << "w_angles=" << w_angles << "\n";
    out << "out=" << out_dir << "\n";
    out << "seed=" << seed << "\n";
    out << "threads=" << threads << "\n";
    out << "deterministic=" << (deterministic ? 1 : 0) << "\n";
    out << "write_grids=" << (write_grids ? 1 : 0) << "\n";
    out << "write_png=" << (write_png ? 1 : 0) << "\n";
}

namespace {

ordered_json json_complex(cd v) { return ordered_json::array({v.real(), v.imag()}); }

ordered_json json_spec(const GridSpec& s) {
    ordered_json j;
    j["n"] = s.n;
    j["L"] = s.half_width;
    j["rho"] = s.support_radius;
    return j;
}

void prepare_out_dir(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    std::ofstream echo(fs::path(cfg.out_dir) / "config.txt");
    cfg.echo(echo);
}

StructureFunction load_structure(const ExperimentConfig& cfg) {
    StructureFunction H = parse_structure(cfg.structure);
    if (!(H.k_bound < 1.0))
        throw ConfigError("structure function " + H.id +
                          " violates the ellipticity gate (k_bound = " +
                          std::to_string(H.k_bound) + " >= 1)");
    if (H.support_radius > cfg.support_radius + 1e-12)
        throw ConfigError("structure support exceeds the grid support radius");
    return H;
}

SolveOptions solver_options(const ExperimentConfig& cfg) {
    SolveOptions so;
    so.tol = cfg.tol;
    so.max_iter = cfg.max_iter;
    return so;
}

FieldOptions field_options(const ExperimentConfig& cfg) {
    FieldOptions fo;
    fo.newton_tol = cfg.newton_tol;
    fo.max_newton = cfg.max_newton;
    fo.solver = solver_options(cfg);
    return fo;
}

// Probe points inside the coefficient support, deterministic in the seed.
std::vector<cd> make_z_probes(const ExperimentConfig& cfg, double radius) {
    Rng rng(cfg.seed);
    std::vector<cd> probes;
    for (int i = 0; i < cfg.z_probes; ++i) probes.push_back(rng.in_disk(radius));
    return probes;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const SpecError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const NonConvergence& e) {
        std::cerr << "solver did not converge: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailed;
    }
}

// Closed-form radial stretch oracle block for the solve command.
ordered_json radial_oracle_block(const StructureFunction& H,
                                 const PrincipalSolution& sol, double k0) {
    const GridSpec& s = sol.omega.spec;
    const double K = (1.0 + k0) / (1.0 - k0);
    cd f0 = sol.value(cd(0, 0));
    double err = 0.0, scale = 0.0;
    for (int j = 0; j < s.n; ++j) {
        for (int k = 0; k < s.n; ++k) {
            cd z = s.point(j, k);
            if (std::abs(z) > s.support_radius) continue;
            double r = std::abs(z);
            cd want = r >= 1.0 ? z : (r == 0.0 ? cd{} : z * std::pow(r, K - 1.0));
            want *= sol.w_infinity;  // the stretch scales with the slope
            cd got = sol.w_infinity * z + sol.f_values.at(j, k) - f0;
            err = std::max(err, std::abs(got - want));
            scale = std::max(scale, std::abs(want));
        }
    }
    ordered_json j;
    j["oracle"] = "radial-stretch closed form";
    j["distortion_K"] = K;
    j["sup_error"] = err;
    j["sup_scale"] = scale;
    j["relative_sup_error"] = scale > 0 ? err / scale : 0.0;
    (void)H;
    return j;
}

}  // namespace

int run_solve(const ExperimentConfig& cfg) {
    return guarded([&] {
        prepare_out_dir(cfg);
        StructureFunction H = load_structure(cfg);
        auto ops = make_operators(cfg.grid_spec());
        cd w = parse_complex(cfg.w);
        PrincipalSolution sol = solve_nonlinear(H, w, ops, solver_options(cfg));

        fs::path dir(cfg.out_dir);
        write_grid(sol.f_values, (dir / "correction.belt").string());
        write_grid(sol.omega, (dir / "omega.belt").string());
        if (cfg.write_grids) {
            write_grid_csv(sol.f_values, (dir / "correction.csv").string());
            write_grid_csv(sol.omega, (dir / "omega.csv").string());
        }

        ordered_json j;
        j["w"] = json_complex(sol.w_infinity);
        j["residual"] = sol.residual;
        j["iterations"] = sol.iterations;
        j["k_bound"] = H.k_bound;
        j["spec"] = json_spec(ops.spec());
        j["contraction_ratio"] = sol.contraction_ratio;
        j["discarded_mean"] = sol.discarded_mean;
        j["distortion_max"] = distortion_check(sol).max_ratio;
        if (H.id.rfind("radial", 0) == 0) {
            double k0 = H.k_bound;
            j["oracle_comparison"] = radial_oracle_block(H, sol, k0);
        }
        std::ofstream out(dir / "solution.json");
        out << j.dump(2) << "\n";
        std::cout << "solved " << H.id << " at w=" << format_complex(w)
                  << ": residual " << sol.residual << " in " << sol.iterations
                  << " iterations\n";
        return kExitOk;
    });
}

int run_field(const ExperimentConfig& cfg) {
    return guarded([&] {
        prepare_out_dir(cfg);
        StructureFunction H = load_structure(cfg);
        auto ops = make_operators(cfg.grid_spec());
        std::vector<cd> a_values = parse_a_set(cfg.a_set);

        SweepOptions so;
        so.field = field_options(cfg);
        so.warm_start = cfg.threads <= 1;
        so.threads = cfg.threads;

        fs::path dir(cfg.out_dir);
        std::vector<SweepRecord> records;
        if (cfg.write_grids) {
            records = field_sweep(H, a_values, ops, so,
                                  [&](int i, const FieldSample& s) {
                                      write_grid(s.value_grid(),
                                                 (dir / ("phi_" + std::to_string(i) +
                                                         ".belt")).string());
                                  });
        } else {
            records = field_sweep(H, a_values, ops, so);
        }

        std::ofstream out(dir / "field.jsonl");
        long failures = 0;
        for (const SweepRecord& r : records) {
            ordered_json j;
            j["a"] = json_complex(r.a);
            j["w"] = json_complex(r.w);
            j["residual"] = r.residual;
            j["newton_iters"] = r.newton_iters;
            j["min_jacobian"] = r.min_jacobian;
            j["ok"] = r.ok;
            if (!r.ok) {
                j["error"] = r.error;
                ++failures;
            }
            out << j.dump() << "\n";
        }
        std::cout << "field sweep: " << records.size() - failures << "/"
                  << records.size() << " samples solved\n";
        return failures == 0 ? kExitOk : kExitNonConvergence;
    });
}

int run_tangent(const ExperimentConfig& cfg) {
    return guarded([&] {
        prepare_out_dir(cfg);
        StructureFunction H = load_structure(cfg);
        auto ops = make_operators(cfg.grid_spec());
        cd a = parse_complex(cfg.a);
        cd e = parse_complex(cfg.e);

        LinearizationReport lin = verify_linearization(
            H, a, e, cfg.t_step, ops, 2, field_options(cfg));

        TangentOptions topt;
        topt.t = cfg.t_step;
        topt.field = field_options(cfg);
        TangentData td = compute_tangent(H, a, ops, topt);
        WronskianField wf = wronskian_coefficients(td.eta_1, td.eta_i);
        double coeff_gap = 0.0;
        const GridSpec& s = ops.spec();
        for (int j = 0; j < s.n; ++j)
            for (int k = 0; k < s.n; ++k) {
                if (std::abs(s.point(j, k)) > s.support_radius) continue;
                coeff_gap = std::max(coeff_gap, std::abs(wf.mu.at(j, k) -
                                                         td.coeffs.mu.at(j, k)));
                coeff_gap = std::max(coeff_gap, std::abs(wf.nu.at(j, k) -
                                                         td.coeffs.nu.at(j, k)));
            }
        NondegeneracyReport nd = nondegeneracy_report(
            H, a, cfg.t_step, ops, cfg.support_radius, topt);

        ordered_json j;
        j["a"] = json_complex(a);
        j["e"] = json_complex(e);
        j["t_ladder"] = lin.t_ladder;
        j["residuals"] = lin.residuals;
        j["w12_gaps"] = lin.w12_gaps;
        j["cross_gap_sup"] = lin.cross_gap_sup;
        j["coeff_gap_sup"] = coeff_gap;
        j["det_min"] = nd.det_min_abs;
        j["det_sign"] = nd.det_sign;
        j["slope_ratio_minmax"] =
            ordered_json::array({nd.slope_ratio_min, nd.slope_ratio_max});
        std::ofstream out(fs::path(cfg.out_dir) / "tangent.json");
        out << j.dump(2) << "\n";
        std::cout << "tangent at a=" << format_complex(a)
                  << ": residual ladder [" << lin.residuals[0] << ", "
                  << lin.residuals[1] << ", " << lin.residuals[2]
                  << "], coeff gap " << coeff_gap << "\n";
        return kExitOk;
    });
}

int run_reconstruct(const ExperimentConfig& cfg) {
    return guarded([&] {
        prepare_out_dir(cfg);
        StructureFunction H = load_structure(cfg);
        auto ops = make_operators(cfg.grid_spec());

        AValueSet a_set = make_annulus_disk_set({0.5, 1.0, 2.0}, 24, 3, 1.5);
        std::vector<cd> zp = make_z_probes(cfg, 0.6 * H.support_radius);
        ChartOptions copt;
        copt.field = field_options(cfg);
        copt.threads = cfg.threads;
        auto charts = gradient_charts(H, zp, a_set, ops, copt);
        std::vector<cd> wp = w_probe_window(charts, cfg.w_radii, cfg.w_angles);

        RoundTripOptions rto;
        rto.chart = copt;
        rto.invert.solver = solver_options(cfg);
        rto.threads = cfg.threads;
        RoundTripReport rep = round_trip(H, zp, wp, ops, a_set, rto);

        fs::path dir(cfg.out_dir);
        write_round_trip_csv(rep, (dir / "round_trip.csv").string());

        ordered_json j;
        j["structure"] = H.id;
        j["sup_abs_err"] = rep.sup_abs_err;
        j["mean_abs_err"] = rep.mean_abs_err;
        j["sup_rel_err"] = rep.sup_rel_err;
        j["failures"] = rep.failures;
        j["lipschitz_w_quotient_max"] = rep.lipschitz_w_quotient_max;
        j["holder_z_quotient_max"] = rep.holder_z_quotient_max;
        j["holder_exponent"] = rep.holder_exponent;
        j["h_zero_max"] = rep.h_zero_max;
        ordered_json charts_json = ordered_json::array();
        for (const auto& chart : charts) {
            ordered_json c;
            c["z_probe"] = json_complex(chart.z_probe);
            c["windings"] = chart.windings;
            c["injectivity_violations"] = chart.injectivity_violations;
            c["ratio_min"] = chart.ratio_min;
            c["ratio_max"] = chart.ratio_max;
            charts_json.push_back(c);
        }
        j["charts"] = charts_json;
        std::ofstream out(dir / "round_trip.json");
        out << j.dump(2) << "\n";

        if (cfg.write_png) {
            // Nearest-probe raster of the relative error over the w-plane
            // at the first z-probe.
            const int px = 256;
            GridSpec raster{px, 1.0, 0.5};
            double wmax = 0.0;
            for (cd v : wp) wmax = std::max(wmax, std::abs(v));
            raster.half_width = 1.2 * wmax;
            raster.support_radius = 0.5 * raster.half_width;
            std::vector<double> vals(raster.size(), 0.0);
            for (int jj = 0; jj < px; ++jj)
                for (int kk = 0; kk < px; ++kk) {
                    cd wq = raster.point(jj, kk);
                    double best = 1e300, val = 0.0;
                    for (std::size_t p = 0; p < wp.size(); ++p) {
                        const ProbeRecord& pr = rep.probes[p];
                        double d = std::abs(pr.w - wq);
                        if (d < best && pr.ok) {
                            best = d;
                            val = pr.rel_err;
                        }
                    }
                    vals[raster.index(jj, kk)] = val;
                }
            render_heat_map(raster, vals, (dir / "round_trip_error.png").string());
        }
        std::cout << "round trip " << H.id << ": sup relative error "
                  << rep.sup_rel_err << " over " << rep.probes.size()
                  << " probes (" << rep.failures << " failures)\n";
        return rep.failures == 0 ? kExitOk : kExitCheckFailed;
    });
}

int run_plot(const PlotConfig& cfg) {
    return guarded([&] {
        if (cfg.input.empty()) throw ConfigError("plot needs --in FILE.belt");
        ComplexGrid g = read_grid(cfg.input);
        if (cfg.mode == "heat") {
            HeatComponent comp = HeatComponent::Abs;
            if (cfg.component == "re") comp = HeatComponent::Real;
            else if (cfg.component == "im") comp = HeatComponent::Imag;
            else if (cfg.component != "abs")
                throw ConfigError("unknown component: " + cfg.component);
            render_heat_map(g, comp, cfg.output);
        } else if (cfg.mode == "grid") {
            cd w(1.0, 0.0);
            if (!cfg.sidecar.empty()) {
                std::ifstream in(cfg.sidecar);
                if (!in) throw ConfigError("cannot open sidecar " + cfg.sidecar);
                auto j = nlohmann::json::parse(in);
                w = cd(j.at("w")[0].get<double>(), j.at("w")[1].get<double>());
            }
            // Total map values: w z + correction, renormalized at 0.
            cd offset = bilinear(g, cd(0, 0));
            ComplexGrid phi = ComplexGrid::from_function(
                g.spec,
                [&](cd z) { return w * z - offset; });
            for (std::size_t i = 0; i < phi.values.size(); ++i)
                phi.values[i] += g.values[i];
            render_deformed_grid(phi, cfg.lines, cfg.pixels, cfg.output);
        } else {
            throw ConfigError("unknown plot mode: " + cfg.mode);
        }
        std::cout << "wrote " << cfg.output << "\n";
        return kExitOk;
    });
}

}  // namespace beltrami::cli
