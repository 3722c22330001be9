#include "beltrami/tangent.hpp"

#include <cmath>
#include <limits>

namespace beltrami {

namespace {

// eta = (sp - sm) / span as value/derivative grids; the value grids are
// built from the stored corrections so only the smooth part is combined.
TangentField combine(cd a, cd e, double t, bool central, const FieldSample& sp,
                     const FieldSample& sm, double span) {
    const GridSpec& spec = sp.solution.omega.spec;
    TangentField out;
    out.a = a;
    out.e = e;
    out.t = t;
    out.central = central;
    out.eta = ComplexGrid(spec);
    out.d_eta = ComplexGrid(spec);
    out.dbar_eta = ComplexGrid(spec);
    const cd dw = (sp.w - sm.w) / span;
    const cd doff = (sp.value_offset - sm.value_offset) / span;
    for (int j = 0; j < spec.n; ++j) {
        for (int k = 0; k < spec.n; ++k) {
            cd z = spec.point(j, k);
            std::size_t i = spec.index(j, k);
            out.eta.values[i] =
                dw * z +
                (sp.solution.f_values.values[i] - sm.solution.f_values.values[i]) / span -
                doff;
            out.d_eta.values[i] =
                (sp.solution.dz_f.values[i] - sm.solution.dz_f.values[i]) / span;
            out.dbar_eta.values[i] =
                (sp.solution.omega.values[i] - sm.solution.omega.values[i]) / span;
        }
    }
    return out;
}

}  // namespace

TangentField directional_derivative(const StructureFunction& H, cd a, cd e,
                                    double t, const SpectralOperators& ops,
                                    bool central, const FieldOptions& field) {
    if (!(t > 0.0)) throw Error("directional derivative needs t > 0");
    if (std::abs(e) == 0.0) throw Error("direction e must be nonzero");
    PeriodMap pm(H, ops, field.solver);
    FieldOptions fo = field;
    FieldSample sp = solve_for_a(H, a + t * e, ops, pm, fo);
    if (central) {
        fo.seed = sp.w - 2.0 * t * e;
        FieldSample sm = solve_for_a(H, a - t * e, ops, pm, fo);
        return combine(a, e, t, true, sp, sm, 2.0 * t);
    }
    fo.seed = sp.w - t * e;
    FieldSample s0 = solve_for_a(H, a, ops, pm, fo);
    return combine(a, e, t, false, sp, s0, t);
}

CoefficientField linearized_coefficients(const StructureFunction& H,
                                         const FieldSample& base) {
    const GridSpec& spec = base.solution.dz_f.spec;
    CoefficientField out;
    out.mu = ComplexGrid(spec);
    out.nu = ComplexGrid(spec);
    const double floor =
        H.smooth_in_w_at_zero ? 0.0 : 1e-8 * base.solution.dz_f.sup_abs();
    for (int j = 0; j < spec.n; ++j) {
        for (int k = 0; k < spec.n; ++k) {
            cd z = spec.point(j, k);
            if (std::abs(z) > H.support_radius) continue;
            cd w0 = base.solution.dz_f.at(j, k);
            if (!H.smooth_in_w_at_zero && std::abs(w0) <= floor) {
                ++out.flagged;
                continue;
            }
            WGradient g = H.w_gradient(z, w0);
            out.mu.at(j, k) = g.dw;
            out.nu.at(j, k) = g.dwbar;
            out.sup_sum = std::max(out.sup_sum, g.sum_abs());
        }
    }
    if (out.sup_sum > H.k_bound + 1e-6)
        throw EllipticityViolation(
            "linearized coefficients exceed the declared k_bound of " + H.id);
    return out;
}

TangentData compute_tangent(const StructureFunction& H, cd a,
                            const SpectralOperators& ops,
                            const TangentOptions& opts) {
    const double t = opts.t * std::max(1.0, std::abs(a));
    TangentData out;
    out.a = a;
    out.t = t;
    out.eta_1 =
        directional_derivative(H, a, cd(1, 0), t, ops, opts.central, opts.field);
    out.eta_i =
        directional_derivative(H, a, cd(0, 1), t, ops, opts.central, opts.field);
    FieldSample base = solve_for_a(H, a, ops, opts.field);
    out.coeffs = linearized_coefficients(H, base);
    const GridSpec& spec = ops.spec();
    out.det_grid.resize(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i)
        out.det_grid[i] = std::imag(out.eta_1.d_eta.values[i] *
                                    std::conj(out.eta_i.d_eta.values[i]));
    return out;
}

namespace {

WronskianField wronskian_from_grids(const ComplexGrid& d1,
                                    const ComplexGrid& db1,
                                    const ComplexGrid& di,
                                    const ComplexGrid& dbi) {
    const GridSpec& spec = d1.spec;
    WronskianField out;
    out.mu = ComplexGrid(spec);
    out.nu = ComplexGrid(spec);
    std::vector<double> denom_im(spec.size());
    double denom_sup = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        denom_im[i] = std::imag(d1.values[i] * std::conj(di.values[i]));
        denom_sup = std::max(denom_sup, std::abs(denom_im[i]));
    }
    out.denom_floor = 1e-6 * denom_sup;
    out.denom_min_abs = std::numeric_limits<double>::infinity();
    for (int j = 0; j < spec.n; ++j) {
        for (int k = 0; k < spec.n; ++k) {
            std::size_t i = spec.index(j, k);
            double dn = denom_im[i];
            if (std::abs(dn) <= out.denom_floor) {  // catches an all-zero pair
                out.degenerate.emplace_back(j, k);
                continue;
            }
            if (std::abs(spec.point(j, k)) <= spec.support_radius)
                out.denom_min_abs = std::min(out.denom_min_abs, std::abs(dn));
            cd denom(0.0, 2.0 * dn);
            out.mu.values[i] = (db1.values[i] * std::conj(di.values[i]) -
                                dbi.values[i] * std::conj(d1.values[i])) /
                               denom;
            out.nu.values[i] =
                (d1.values[i] * dbi.values[i] - di.values[i] * db1.values[i]) /
                denom;
        }
    }
    return out;
}

}  // namespace

WronskianField wronskian_coefficients(const TangentField& eta1,
                                      const TangentField& etai) {
    return wronskian_from_grids(eta1.d_eta, eta1.dbar_eta, etai.d_eta,
                                etai.dbar_eta);
}

WronskianField wronskian_coefficients(const ComplexGrid& eta1_values,
                                      const ComplexGrid& etai_values,
                                      const SpectralOperators& ops) {
    return wronskian_from_grids(ops.d_z(eta1_values), ops.d_zbar(eta1_values),
                                ops.d_z(etai_values), ops.d_zbar(etai_values));
}

namespace {

double linearization_residual(const TangentField& eta,
                              const CoefficientField& c, double rho) {
    const GridSpec& spec = eta.eta.spec;
    double acc = 0.0;
    for (int j = 0; j < spec.n; ++j) {
        for (int k = 0; k < spec.n; ++k) {
            if (std::abs(spec.point(j, k)) > rho) continue;
            std::size_t i = spec.index(j, k);
            cd r = eta.dbar_eta.values[i] - c.mu.values[i] * eta.d_eta.values[i] -
                   c.nu.values[i] * std::conj(eta.d_eta.values[i]);
            acc += std::norm(r);
        }
    }
    return std::sqrt(acc) * spec.step();
}

}  // namespace

LinearizationReport verify_linearization(const StructureFunction& H, cd a,
                                         cd e, double t,
                                         const SpectralOperators& ops,
                                         int halvings,
                                         const FieldOptions& field) {
    const GridSpec& spec = ops.spec();
    const double rho = spec.support_radius;
    LinearizationReport rep;
    rep.a = a;
    rep.e = e;
    rep.grid_error_scale =
        spec.step() * spec.step() * std::max({1.0, std::abs(a), std::abs(e)});

    FieldSample base = solve_for_a(H, a, ops, field);
    CoefficientField coeffs = linearized_coefficients(H, base);

    std::vector<TangentField> etas;
    double tj = t;
    for (int j = 0; j <= halvings; ++j, tj /= 2.0) {
        etas.push_back(directional_derivative(H, a, e, tj, ops, true, field));
        rep.t_ladder.push_back(tj);
        rep.residuals.push_back(linearization_residual(etas.back(), coeffs, rho));
    }
    for (std::size_t j = 0; j + 1 < etas.size(); ++j) {
        double acc = 0.0;
        for (int jj = 0; jj < spec.n; ++jj)
            for (int kk = 0; kk < spec.n; ++kk) {
                if (std::abs(spec.point(jj, kk)) > rho) continue;
                std::size_t i = spec.index(jj, kk);
                cd dd = etas[j].d_eta.values[i] - etas[j + 1].d_eta.values[i];
                cd db = etas[j].dbar_eta.values[i] - etas[j + 1].dbar_eta.values[i];
                acc += std::norm(dd) + std::norm(db);
            }
        rep.w12_gaps.push_back(std::sqrt(acc) * spec.step());
    }

    // Direct route: solve the R-linear equation with the same coefficients
    // for slopes 1 and i, then match the (0 -> 0, 1 -> e) normalization by
    // a real-linear combination (solutions scale only over R).
    LinearSolveProblem p1{coeffs.mu, coeffs.nu, cd(1, 0), std::nullopt};
    LinearSolveProblem pi{coeffs.mu, coeffs.nu, cd(0, 1), std::nullopt};
    SolveOptions so = field.solver;
    PrincipalSolution g1 = solve_rlinear(p1, ops, so);
    PrincipalSolution gi = solve_rlinear(pi, ops, so);
    cd A1 = period_of(g1), Ai = period_of(gi);
    // alpha A1 + beta Ai = e with real alpha, beta.
    double det = A1.real() * Ai.imag() - Ai.real() * A1.imag();
    if (std::abs(det) < 1e-12)
        throw NewtonStall("R-linear period matrix is singular", a);
    double alpha = (e.real() * Ai.imag() - Ai.real() * e.imag()) / det;
    double beta = (A1.real() * e.imag() - e.real() * A1.imag()) / det;
    cd off1 = bilinear(g1.f_values, cd(0, 0)), offi = bilinear(gi.f_values, cd(0, 0));
    const TangentField& eta_min = etas.back();
    double gap = 0.0;
    for (int j = 0; j < spec.n; ++j) {
        for (int k = 0; k < spec.n; ++k) {
            cd z = spec.point(j, k);
            if (std::abs(z) > rho) continue;
            std::size_t i = spec.index(j, k);
            cd ge = alpha * (g1.w_infinity * z + g1.f_values.values[i] - off1) +
                    beta * (gi.w_infinity * z + gi.f_values.values[i] - offi);
            gap = std::max(gap, std::abs(eta_min.eta.values[i] - ge));
        }
    }
    rep.cross_gap_sup = gap;
    return rep;
}

NondegeneracyReport nondegeneracy_report(const StructureFunction& H, cd a,
                                         double t, const SpectralOperators& ops,
                                         double R, const TangentOptions& opts) {
    const GridSpec& spec = ops.spec();
    if (R > spec.support_radius + 1e-12)
        throw SpecError("nondegeneracy radius exceeds the support radius");
    TangentOptions to = opts;
    to.t = t;
    TangentData data = compute_tangent(H, a, ops, to);
    FieldSample base = solve_for_a(H, a, ops, opts.field);

    NondegeneracyReport rep;
    rep.a = a;
    rep.t = data.t;
    rep.R = R;
    rep.det_min_abs = std::numeric_limits<double>::infinity();
    rep.slope_ratio_min = std::numeric_limits<double>::infinity();
    bool pos = false, neg = false;
    const double aa = std::abs(a);
    for (int j = 0; j < spec.n; ++j) {
        for (int k = 0; k < spec.n; ++k) {
            cd z = spec.point(j, k);
            std::size_t i = spec.index(j, k);
            if (std::abs(z) <= spec.support_radius) {
                double d = data.det_grid[i];
                rep.det_min_abs = std::min(rep.det_min_abs, std::abs(d));
                rep.det_max_abs = std::max(rep.det_max_abs, std::abs(d));
                (d >= 0.0 ? pos : neg) = true;
            }
            if (aa > 0.0 && std::abs(z) <= R) {
                double ratio = std::abs(base.solution.dz_f.values[i]) / aa;
                rep.slope_ratio_min = std::min(rep.slope_ratio_min, ratio);
                rep.slope_ratio_max = std::max(rep.slope_ratio_max, ratio);
            }
        }
    }
    rep.sign_constant = pos != neg;
    rep.det_sign = rep.sign_constant ? (pos ? 1 : -1) : 0;
    return rep;
}

}  // namespace beltrami
