#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "beltrami/parallel.hpp"
#include "beltrami/reconstruction.hpp"
#include "commands.hpp"

namespace beltrami::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

struct CheckRow {
    std::string name;
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

// One verify pass = the full property battery for a single configured
// structure function, pass/fail per theorem.
class VerifySuite {
  public:
    VerifySuite(const ExperimentConfig& cfg, const StructureFunction& H,
                const SpectralOperators& ops)
        : cfg_(cfg), H_(H), ops_(ops), rng_(cfg.seed) {}

    std::vector<CheckRow> run() {
        std::vector<CheckRow> rows;
        rows.push_back(check_h1());
        rows.push_back(check_spectral());
        rows.push_back(check_contraction());
        rows.push_back(check_bilipschitz());
        rows.push_back(check_linearization());
        rows.push_back(check_coefficient_recovery());
        rows.push_back(check_jacobian_positivity());
        rows.push_back(check_nondegeneracy());
        rows.push_back(check_homeomorphism());
        rows.push_back(check_round_trip());
        return rows;
    }

  private:
    FieldOptions field_opts() const {
        FieldOptions fo;
        fo.newton_tol = cfg_.newton_tol;
        fo.max_newton = cfg_.max_newton;
        fo.solver.tol = cfg_.tol;
        fo.solver.max_iter = cfg_.max_iter;
        return fo;
    }

    CheckRow check_h1() {
        EllipticityReport rep = verify_H1(H_, rng_, 10000);
        bool pass = !rep.k_bound_violated && rep.uniqueness_threshold_ok;
        return {"h1-lipschitz-ellipticity", pass,
                "measured k " + fmt(rep.measured_k) + " <= bound " +
                    fmt(H_.k_bound) + ", tail " + fmt(rep.tail_k)};
    }

    CheckRow check_spectral() {
        // Beurling isometry + inversion identity on a random smooth field.
        ComplexGrid g(ops_.spec());
        const double L = ops_.spec().half_width;
        std::vector<std::pair<cd, cd>> modes;
        for (int m = 0; m < 24; ++m)
            modes.push_back({cd(rng_.uniform(-4, 4), rng_.uniform(-4, 4)),
                             cd(rng_.uniform(-1, 1), rng_.uniform(-1, 1))});
        for (int j = 0; j < ops_.spec().n; ++j)
            for (int k = 0; k < ops_.spec().n; ++k) {
                cd z = ops_.spec().point(j, k);
                cd acc{};
                for (auto& [fr, c] : modes)
                    acc += c * std::exp(cd(0, M_PI / L) *
                                        (std::round(fr.real()) * z.real() +
                                         std::round(fr.imag()) * z.imag()));
                g.at(j, k) = acc;
            }
        cd m = g.mean();
        ComplexGrid centered = g;
        for (cd& v : centered.values) v -= m;
        double iso =
            std::abs(ops_.beurling(g).norm_l2() - centered.norm_l2()) /
            std::max(1e-300, centered.norm_l2());
        double inv = 0.0;
        {
            ComplexGrid back = ops_.d_zbar(ops_.cauchy(g));
            double err = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < back.values.size(); ++i) {
                err += std::norm(back.values[i] - centered.values[i]);
                scale += std::norm(centered.values[i]);
            }
            inv = std::sqrt(err / scale);
        }
        bool pass = iso <= 1e-12 && inv <= 1e-10;
        return {"spectral-kernel (isometry + inversion)", pass,
                "isometry defect " + fmt(iso) + ", inversion " + fmt(inv)};
    }

    CheckRow check_contraction() {
        double worst = 0.0;
        for (cd w : {cd(1, 0), cd(0, 1), cd(0.7, -0.4)}) {
            SolveOptions so;
            so.tol = cfg_.tol;
            so.max_iter = cfg_.max_iter;
            PrincipalSolution sol = solve_nonlinear(H_, w, ops_, so);
            worst = std::max(worst, sol.contraction_ratio);
        }
        bool pass = worst <= H_.k_bound + 0.02;
        return {"contraction-certificate", pass,
                "max iterate ratio " + fmt(worst) + " <= " +
                    fmt(H_.k_bound + 0.02)};
    }

    CheckRow check_bilipschitz() {
        // Pair-independent ratio spreads (factor 2) + exact normalization.
        const double R = std::min(2.0, ops_.spec().support_radius);
        double max_of_max = 0.0, min_of_max = 1e300;
        double max_of_l2 = 0.0, min_of_l2 = 1e300;
        double worst_norm = 0.0;
        for (int i = 0; i < 6; ++i) {
            cd a = rng_.in_disk(2.0), b = rng_.in_disk(2.0);
            if (std::abs(a - b) < 0.1) b += cd(0.5, 0.5);
            BilipReport rep = bilip_report(H_, a, b, R, ops_, field_opts());
            max_of_max = std::max(max_of_max, rep.max_ratio_disk);
            min_of_max = std::min(min_of_max, rep.max_ratio_disk);
            max_of_l2 = std::max(max_of_l2, rep.l2_ratio);
            min_of_l2 = std::min(min_of_l2, rep.l2_ratio);
            FieldSample fa = solve_for_a(H_, a, ops_, field_opts());
            double scale = std::max(1.0, std::abs(a));
            worst_norm = std::max(
                worst_norm,
                std::max(std::abs(fa.value(cd(0, 0))),
                         std::abs(fa.value(cd(1, 0)) - a)) / scale);
        }
        bool pass = max_of_max <= 2.0 * min_of_max &&
                    max_of_l2 <= 2.0 * min_of_l2 && worst_norm <= 1e-8;
        return {"bilipschitz-parameter-dependence", pass,
                "value spread x" + fmt(max_of_max / min_of_max) +
                    ", L2 spread x" + fmt(max_of_l2 / min_of_l2) +
                    ", normalization " + fmt(worst_norm)};
    }

    CheckRow check_linearization() {
        cd a = H_.tags.is_linear_R ? cd(1.2, 0.3) : cd(1, 0);
        LinearizationReport rep = verify_linearization(
            H_, a, cd(1, 0), cfg_.t_step, ops_, 2, field_opts());
        bool pass;
        std::string detail;
        const double floor = 1e-7 * std::max(1.0, std::abs(a));
        if (*std::max_element(rep.residuals.begin(), rep.residuals.end()) <=
            floor) {
            // Linear members (and 1-homogeneous ones along radial rays) are
            // their own linearization: the residual sits at the solver floor
            // for every t, which is the strongest form of r(t) -> 0.
            pass = true;
            detail = "residuals at solver floor (max " +
                     fmt(rep.residuals.front()) + ")";
        } else {
            pass = rep.residuals[1] / rep.residuals[0] <= 0.75 &&
                   rep.residuals[2] / rep.residuals[1] <= 0.75;
            detail = "ladder ratios " + fmt(rep.residuals[1] / rep.residuals[0]) +
                     ", " + fmt(rep.residuals[2] / rep.residuals[1]);
        }
        double cross_tol = 5.0 * std::max(rep.t_ladder.back() * rep.t_ladder.back(),
                                          rep.grid_error_scale);
        pass = pass && rep.cross_gap_sup <= cross_tol;
        detail += ", cross gap " + fmt(rep.cross_gap_sup) + " <= " + fmt(cross_tol);
        return {"tangent-linearization", pass, detail};
    }

    CheckRow check_coefficient_recovery() {
        TangentOptions topt;
        topt.t = 1e-3;
        topt.field = field_opts();
        cd a(1, 0);
        TangentData td = compute_tangent(H_, a, ops_, topt);
        WronskianField wf = wronskian_coefficients(td.eta_1, td.eta_i);
        const GridSpec& s = ops_.spec();
        double gap = 0.0;
        for (int j = 0; j < s.n; ++j)
            for (int k = 0; k < s.n; ++k) {
                if (std::abs(s.point(j, k)) > s.support_radius) continue;
                gap = std::max(gap, std::abs(wf.mu.at(j, k) - td.coeffs.mu.at(j, k)));
                gap = std::max(gap, std::abs(wf.nu.at(j, k) - td.coeffs.nu.at(j, k)));
            }
        double tol = std::max(2.0 * td.t, 1e-4);
        return {"wronskian-coefficient-recovery", gap <= tol,
                "sup gap " + fmt(gap) + " <= " + fmt(tol)};
    }

    CheckRow check_jacobian_positivity() {
        std::vector<cd> sweep;
        for (int i = 0; i < 8; ++i) {
            double th = 2.0 * M_PI * i / 8;
            sweep.emplace_back(1.3 * std::cos(th), 1.3 * std::sin(th));
        }
        SweepOptions so;
        so.field = field_opts();
        auto recs = field_sweep(H_, sweep, ops_, so);
        double minJ = 1e300;
        bool ok = true;
        for (const auto& r : recs) {
            ok = ok && r.ok;
            minJ = std::min(minJ, r.min_jacobian);
        }
        return {"jacobian-positivity", ok && minJ > 0.0,
                "min J over sweep " + fmt(minJ)};
    }

    CheckRow check_nondegeneracy() {
        int sign = 0;
        double min_det = 1e300;
        bool consistent = true;
        for (cd a : {cd(1, 0), cd(0, 1.2), cd(-0.8, 0.5), cd(0.6, -1.1)}) {
            TangentOptions topt;
            topt.field = field_opts();
            NondegeneracyReport rep =
                nondegeneracy_report(H_, a, cfg_.t_step, ops_,
                                     ops_.spec().support_radius, topt);
            consistent = consistent && rep.sign_constant;
            if (sign == 0) sign = rep.det_sign;
            consistent = consistent && rep.det_sign == sign;
            min_det = std::min(min_det, rep.det_min_abs);
        }
        return {"nondegeneracy-determinant", consistent && min_det > 0.0,
                "min |det| " + fmt(min_det) + ", sign " + std::to_string(sign)};
    }

    CheckRow check_homeomorphism() {
        AValueSet set = make_annulus_disk_set({0.5, 1.0, 2.0}, 16, 3, 1.5);
        std::vector<cd> zp = {rng_.in_disk(0.5 * H_.support_radius),
                              rng_.in_disk(0.5 * H_.support_radius)};
        ChartOptions copt;
        copt.field = field_opts();
        copt.threads = cfg_.threads;
        charts_ = gradient_charts(H_, zp, set, ops_, copt);
        bool pass = true;
        double c = 0.0;
        long viol = 0;
        for (const auto& chart : charts_) {
            for (int w : chart.windings) pass = pass && std::abs(w) == 1;
            viol += chart.injectivity_violations;
            pass = pass && chart.failures == 0;
            c = std::max({c, chart.ratio_max,
                          chart.ratio_min > 0 ? 1.0 / chart.ratio_min : 1e300});
        }
        pass = pass && viol == 0 && c <= 10.0;
        return {"gradient-homeomorphism", pass,
                "windings +-1, injectivity violations " + std::to_string(viol) +
                    ", growth constant c " + fmt(c)};
    }

    CheckRow check_round_trip() {
        if (charts_.empty())
            return {"structure-function-roundtrip", false, "no charts built"};
        std::vector<cd> wp = w_probe_window(charts_, 3, 4);
        RoundTripOptions rto;
        rto.invert.solver.tol = cfg_.tol;
        rto.threads = cfg_.threads;
        RoundTripReport rep = round_trip(H_, charts_, wp, ops_, rto);
        // Tolerance by member class; grid-limited below n = 256.
        double tol = 0.05;
        if (H_.k_bound == 0.0) tol = 1e-10;
        else if (H_.tags.is_linear_R) tol = 0.01;
        else if (H_.tags.is_homogeneous_1) tol = 0.02;
        if (ops_.spec().n < 256) tol = std::max(tol, tol * 256.0 / ops_.spec().n);
        bool pass = rep.failures == 0 && rep.sup_rel_err <= tol &&
                    rep.lipschitz_w_quotient_max <= H_.k_bound + 1e-3 &&
                    rep.h_zero_max <= 1e-10;
        return {"structure-function-roundtrip", pass,
                "sup relative error " + fmt(rep.sup_rel_err) + " <= " + fmt(tol) +
                    ", w-Lipschitz " + fmt(rep.lipschitz_w_quotient_max)};
    }

    const ExperimentConfig& cfg_;
    const StructureFunction& H_;
    const SpectralOperators& ops_;
    Rng rng_;
    std::vector<GradientChart> charts_;
};

}  // namespace

int run_verify(const ExperimentConfig& cfg) {
    try {
        fs::create_directories(cfg.out_dir);
        {
            std::ofstream echo(fs::path(cfg.out_dir) / "config.txt");
            cfg.echo(echo);
        }
        StructureFunction H = parse_structure(cfg.structure);
        if (!(H.k_bound < 1.0))
            throw ConfigError("structure function " + H.id +
                              " violates the ellipticity gate");
        auto ops = make_operators(cfg.grid_spec());

        VerifySuite suite(cfg, H, ops);
        std::vector<CheckRow> rows = suite.run();

        std::ostringstream table;
        int failures = 0;
        for (const CheckRow& row : rows) {
            if (!row.pass) ++failures;
            table << (row.pass ? "[PASS] " : "[FAIL] ") << std::left
                  << std::setw(38) << row.name << " " << row.detail << "\n";
        }
        table << (failures == 0 ? "all checks passed"
                                : std::to_string(failures) + " check(s) failed")
              << " for " << H.id << " at n=" << cfg.n << "\n";
        std::cout << table.str();

        ordered_json j;
        j["structure"] = H.id;
        j["n"] = cfg.n;
        j["seed"] = cfg.seed;
        ordered_json checks = ordered_json::array();
        for (const CheckRow& row : rows) {
            ordered_json r;
            r["name"] = row.name;
            r["pass"] = row.pass;
            r["detail"] = row.detail;
            checks.push_back(r);
        }
        j["checks"] = checks;
        j["failures"] = failures;
        std::ofstream out(fs::path(cfg.out_dir) / "verify_report.json");
        out << j.dump(2) << "\n";

        return failures == 0 ? kExitOk : kExitCheckFailed;
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

}  // namespace beltrami::cli
