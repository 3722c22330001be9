#include "beltrami/solver.hpp"

#include <algorithm>
#include <cmath>

namespace beltrami {

namespace {

struct IterationResult {
    ComplexGrid omega;
    int iterations = 0;
    double max_ratio = 0.0;
};

// Contraction iteration omega <- H(z, slope + S omega) starting from zero
// (or a warm seed). With the Beurling isometry the L2 distance of
// successive iterates contracts with ratio <= the Lipschitz bound of H.
template <typename Update>
IterationResult iterate_omega(const SpectralOperators& ops, cd slope,
                              double k_bound,
                              const SolveOptions& opts, Update&& update) {
    const GridSpec& spec = ops.spec();
    ComplexGrid omega =
        opts.warm_start ? *opts.warm_start : ComplexGrid(spec);
    if (opts.warm_start) require_same_spec(opts.warm_start->spec, spec);

    const double stop = opts.tol * std::max(1.0, std::abs(slope));
    IterationResult res;
    double prev_dist = -1.0;
    for (int m = 1; m <= opts.max_iter; ++m) {
        ComplexGrid grad = ops.beurling(omega);
        for (cd& v : grad.values) v += slope;
        ComplexGrid next(spec);
        update(grad, next);
        double dist = 0.0;
        for (std::size_t i = 0; i < next.values.size(); ++i)
            dist += std::norm(next.values[i] - omega.values[i]);
        dist = std::sqrt(dist) * spec.step();
        if (opts.distance_history) opts.distance_history->push_back(dist);
        if (prev_dist > stop && dist > 0.0)
            res.max_ratio = std::max(res.max_ratio, dist / prev_dist);
        prev_dist = dist;
        omega = std::move(next);
        res.iterations = m;
        if (dist <= stop) {
            res.omega = std::move(omega);
            return res;
        }
    }
    throw NonConvergence(
        "contraction iteration did not reach tol (k_bound = " +
            std::to_string(k_bound) + ")",
        res.max_ratio, res.iterations);
}

PrincipalSolution finish_solution(const SpectralOperators& ops, cd slope,
                                  IterationResult&& it) {
    PrincipalSolution sol;
    sol.w_infinity = slope;
    sol.iterations = it.iterations;
    sol.contraction_ratio = it.max_ratio;
    sol.omega = std::move(it.omega);
    sol.dz_f = ops.beurling(sol.omega);
    for (cd& v : sol.dz_f.values) v += slope;
    CauchyStats stats;
    sol.f_values = ops.cauchy(sol.omega, &stats);
    sol.discarded_mean = stats.discarded_mean_abs;
    return sol;
}

}  // namespace

PrincipalSolution solve_nonlinear(const StructureFunction& H, cd w,
                                  const SpectralOperators& ops,
                                  const SolveOptions& opts) {
    if (!(H.k_bound < 1.0))
        throw EllipticityViolation("structure function " + H.id +
                                   " has k_bound >= 1");
    if (!(std::isfinite(w.real()) && std::isfinite(w.imag())))
        throw Error("slope w must be finite");
    const GridSpec& spec = ops.spec();
    if (H.support_radius > spec.support_radius + 1e-12)
        throw SpecError("structure support exceeds the grid support radius");

    auto update = [&](const ComplexGrid& grad, ComplexGrid& next) {
        const double slack = 1e-9;
        for (int j = 0; j < spec.n; ++j) {
            for (int k = 0; k < spec.n; ++k) {
                cd z = spec.point(j, k);
                if (std::abs(z) > H.support_radius) continue;
                cd v = grad.at(j, k);
                cd h = H.evaluate(z, v);
                if (std::abs(h) > H.k_bound * std::abs(v) * (1.0 + slack))
                    throw EllipticityViolation(
                        "sampled |H| exceeds k_bound * |w| during iteration "
                        "of " + H.id);
                next.at(j, k) = h;
            }
        }
    };
    auto it = iterate_omega(ops, w, H.k_bound, opts, update);
    PrincipalSolution sol = finish_solution(ops, w, std::move(it));
    sol.residual = residual_of(H, sol);
    return sol;
}

double LinearSolveProblem::validate() const {
    require_same_spec(mu.spec, nu.spec);
    if (source) require_same_spec(mu.spec, source->spec);
    const GridSpec& spec = mu.spec;
    double kb = 0.0;
    for (int j = 0; j < spec.n; ++j) {
        for (int k = 0; k < spec.n; ++k) {
            double s = std::abs(mu.at(j, k)) + std::abs(nu.at(j, k));
            kb = std::max(kb, s);
            if (std::abs(spec.point(j, k)) > spec.support_radius) {
                bool src = source && std::abs(source->at(j, k)) > 0.0;
                if (s > 0.0 || src)
                    throw SpecError(
                        "linear coefficients must vanish outside the support "
                        "radius");
            }
        }
    }
    if (!(kb < 1.0))
        throw EllipticityViolation(
            "linear problem violates pointwise |mu| + |nu| < 1");
    return kb;
}

PrincipalSolution solve_rlinear(const LinearSolveProblem& p,
                                const SpectralOperators& ops,
                                const SolveOptions& opts) {
    require_same_spec(p.mu.spec, ops.spec());
    double kb = p.validate();
    auto update = [&](const ComplexGrid& grad, ComplexGrid& next) {
        for (std::size_t i = 0; i < next.values.size(); ++i) {
            cd v = grad.values[i];
            cd h = p.mu.values[i] * v + p.nu.values[i] * std::conj(v);
            if (p.source) h += p.source->values[i];
            next.values[i] = h;
        }
    };
    auto it = iterate_omega(ops, p.slope, kb, opts, update);
    PrincipalSolution sol = finish_solution(ops, p.slope, std::move(it));
    // Residual of the R-linear relation, recomputed from grids.
    double r = 0.0;
    for (std::size_t i = 0; i < sol.omega.values.size(); ++i) {
        cd v = sol.dz_f.values[i];
        cd h = p.mu.values[i] * v + p.nu.values[i] * std::conj(v);
        if (p.source) h += p.source->values[i];
        r = std::max(r, std::abs(sol.omega.values[i] - h));
    }
    sol.residual = r;
    return sol;
}

double residual_of(const StructureFunction& H, const PrincipalSolution& sol) {
    const GridSpec& spec = sol.omega.spec;
    double r = 0.0;
    for (int j = 0; j < spec.n; ++j) {
        for (int k = 0; k < spec.n; ++k) {
            cd z = spec.point(j, k);
            cd h = H.evaluate(z, sol.dz_f.at(j, k));
            r = std::max(r, std::abs(sol.omega.at(j, k) - h));
        }
    }
    return r;
}

DistortionReport distortion_check(const PrincipalSolution& sol) {
    DistortionReport rep;
    double max_dz = sol.dz_f.sup_abs();
    double max_om = sol.omega.sup_abs();
    rep.floor = 1e-8 * max_dz;
    for (std::size_t i = 0; i < sol.omega.values.size(); ++i) {
        double denom = std::abs(sol.dz_f.values[i]);
        double num = std::abs(sol.omega.values[i]);
        if (denom <= rep.floor) {
            if (num > 1e-8 * max_om) ++rep.flagged;
            continue;
        }
        rep.max_ratio = std::max(rep.max_ratio, num / denom);
    }
    return rep;
}

double min_jacobian_disk(const ComplexGrid& dz_f, const ComplexGrid& dzbar_f,
                         double R) {
    require_same_spec(dz_f.spec, dzbar_f.spec);
    const GridSpec& spec = dz_f.spec;
    double mn = std::numeric_limits<double>::infinity();
    for (int j = 0; j < spec.n; ++j) {
        for (int k = 0; k < spec.n; ++k) {
            if (std::abs(spec.point(j, k)) > R) continue;
            double J = std::norm(dz_f.at(j, k)) - std::norm(dzbar_f.at(j, k));
            mn = std::min(mn, J);
        }
    }
    return mn;
}

double min_jacobian_disk(const PrincipalSolution& sol, double R) {
    return min_jacobian_disk(sol.dz_f, sol.omega, R);
}

double holder_quotient_sup(const ComplexGrid& g, double R, double gamma,
                           int subsample_budget) {
    const GridSpec& spec = g.spec;
    std::vector<GridSample> disk = restrict_to_disk(g, R);
    double sup = 0.0;
    // Near-neighbor pairs over the whole disk set capture the small-scale
    // quotients that dominate for gamma < 1.
    const int reach = 4;
    for (const GridSample& s : disk) {
        for (int dj = 0; dj <= reach; ++dj) {
            for (int dk = (dj == 0 ? 1 : -reach); dk <= reach; ++dk) {
                int j2 = s.j + dj, k2 = s.k + dk;
                if (j2 < 0 || j2 >= spec.n || k2 < 0 || k2 >= spec.n) continue;
                cd z2 = spec.point(j2, k2);
                if (std::abs(z2) > R) continue;
                double dist = std::abs(z2 - s.z);
                double q = std::abs(g.at(j2, k2) - s.value) /
                           std::pow(dist, gamma);
                sup = std::max(sup, q);
            }
        }
    }
    // Strided subsample, all pairs, for the large-separation regime.
    std::size_t stride = std::max<std::size_t>(
        1, disk.size() / static_cast<std::size_t>(subsample_budget));
    std::vector<const GridSample*> sub;
    for (std::size_t i = 0; i < disk.size(); i += stride) sub.push_back(&disk[i]);
    for (std::size_t i = 0; i < sub.size(); ++i) {
        for (std::size_t l = i + 1; l < sub.size(); ++l) {
            double dist = std::abs(sub[i]->z - sub[l]->z);
            if (dist < 1e-14) continue;
            double q = std::abs(sub[i]->value - sub[l]->value) /
                       std::pow(dist, gamma);
            sup = std::max(sup, q);
        }
    }
    return sup;
}

}  // namespace beltrami
