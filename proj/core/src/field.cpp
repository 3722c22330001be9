#include "beltrami/field.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "beltrami/parallel.hpp"

namespace beltrami {

ComplexGrid FieldSample::value_grid() const {
    const GridSpec& spec = solution.f_values.spec;
    ComplexGrid out(spec);
    for (int j = 0; j < spec.n; ++j)
        for (int k = 0; k < spec.n; ++k)
            out.at(j, k) =
                w * spec.point(j, k) + solution.f_values.at(j, k) - value_offset;
    return out;
}

cd period_of(const PrincipalSolution& sol) {
    return sol.value(cd(1.0, 0.0)) - sol.value(cd(0.0, 0.0));
}

cd period(const StructureFunction& H, cd w, const SpectralOperators& ops,
          double tol) {
    SolveOptions opts;
    opts.tol = tol;
    return period_of(solve_nonlinear(H, w, ops, opts));
}

PeriodMap::PeriodMap(const StructureFunction& H, const SpectralOperators& ops,
                     SolveOptions solver)
    : H_(&H), ops_(&ops), solver_(solver) {}

cd PeriodMap::evaluate(cd w) {
    SolveOptions opts = solver_;
    if (have_warm_) opts.warm_start = &warm_;
    last_ = solve_nonlinear(*H_, w, *ops_, opts);
    last_w_ = w;
    warm_ = last_->omega;
    have_warm_ = true;
    cd A = period_of(*last_);
    samples_.emplace_back(w, A);
    return A;
}

const PrincipalSolution& PeriodMap::last_solution() const {
    if (!last_) throw Error("PeriodMap has no solves yet");
    return *last_;
}

std::vector<PeriodMap::InjectivityViolation> PeriodMap::injectivity_violations(
    double tol) const {
    std::vector<InjectivityViolation> out;
    for (std::size_t i = 0; i < samples_.size(); ++i)
        for (std::size_t j = i + 1; j < samples_.size(); ++j) {
            auto [w1, A1] = samples_[i];
            auto [w2, A2] = samples_[j];
            if (std::abs(A1 - A2) < tol && std::abs(w1 - w2) > tol)
                out.push_back({w1, w2, A1, A2});
        }
    return out;
}

namespace {

FieldSample finish_sample(cd a, PeriodMap& pm, int steps) {
    FieldSample out;
    out.a = a;
    out.w = pm.last_w();
    out.solution = pm.last_solution();
    out.value_offset = bilinear(out.solution.f_values, cd(0.0, 0.0));
    out.newton_iterations = steps;
    return out;
}

}  // namespace

FieldSample solve_for_a(const StructureFunction& H, cd a,
                        const SpectralOperators& ops, PeriodMap& pm,
                        const FieldOptions& opts) {
    if (&pm.structure() != &H || &pm.operators() != &ops)
        throw Error("PeriodMap belongs to a different structure/operators");
    if (!(std::isfinite(a.real()) && std::isfinite(a.imag())))
        throw Error("field parameter a must be finite");
    const double tol = opts.newton_tol * std::max(1.0, std::abs(a));

    cd w = opts.seed.value_or(a);
    cd G = pm.evaluate(w) - a;
    int steps = 0;
    while (std::abs(G) > tol) {
        if (steps >= opts.max_newton)
            throw NonConvergence("period-map Newton did not converge for a = " +
                                     format_complex(a),
                                 std::abs(G), steps);
        // Central-difference 2x2 real Jacobian of w -> A(w).
        double h = 1e-5 * std::max(1.0, std::abs(w));
        cd Axp = pm.evaluate(w + h), Axm = pm.evaluate(w - h);
        cd Ayp = pm.evaluate(w + cd(0, h)), Aym = pm.evaluate(w - cd(0, h));
        cd col_x = (Axp - Axm) / (2.0 * h);
        cd col_y = (Ayp - Aym) / (2.0 * h);
        double det = col_x.real() * col_y.imag() - col_y.real() * col_x.imag();
        double scale = std::abs(col_x) * std::abs(col_y) + 1e-300;
        if (std::abs(det) < 1e-12 * scale)
            throw NewtonStall(
                "period-map Jacobian is numerically singular at w = " +
                    format_complex(w),
                w);
        // delta solves J delta = -G in real coordinates.
        cd delta(-(G.real() * col_y.imag() - G.imag() * col_y.real()) / det,
                 -(col_x.real() * G.imag() - col_x.imag() * G.real()) / det);
        cd G_new{};
        cd w_new{};
        bool accepted = false;
        for (int halving = 0; halving < 8; ++halving) {
            w_new = w + delta;
            G_new = pm.evaluate(w_new) - a;
            if (std::abs(G_new) < std::abs(G) || std::abs(G_new) <= tol) {
                accepted = true;
                break;
            }
            delta *= 0.5;
        }
        if (!accepted)
            throw NonConvergence(
                "damped Newton stalled on the period map for a = " +
                    format_complex(a),
                std::abs(G_new) / std::abs(G), steps);
        w = w_new;
        G = G_new;
        ++steps;
    }
    if (pm.last_w() != w) pm.evaluate(w);
    return finish_sample(a, pm, steps);
}

FieldSample solve_for_a(const StructureFunction& H, cd a,
                        const SpectralOperators& ops,
                        const FieldOptions& opts) {
    PeriodMap pm(H, ops, opts.solver);
    return solve_for_a(H, a, ops, pm, opts);
}

double eta_modulus(double K, double C, double t) {
    return C * std::max(std::pow(t, K), std::pow(t, 1.0 / K));
}

BilipReport bilip_report(const StructureFunction& H, cd a, cd b, double R,
                         const SpectralOperators& ops, const FieldOptions& opts,
                         double C_eta) {
    if (a == b) throw Error("bilip_report needs a != b");
    const GridSpec& spec = ops.spec();
    if (R > spec.support_radius + 1e-12)
        throw SpecError("bilip radius exceeds the support radius");

    FieldSample fa = solve_for_a(H, a, ops, opts);
    FieldOptions opts_b = opts;
    opts_b.seed = fa.w + (b - a);  // neighbors in a are neighbors in w
    FieldSample fb = solve_for_a(H, b, ops, opts_b);

    BilipReport rep;
    rep.a = a;
    rep.b = b;
    rep.R = R;
    const double ab = std::abs(a - b);
    double min_ann = std::numeric_limits<double>::infinity();
    double l2 = 0.0;
    double minJ = std::numeric_limits<double>::infinity();
    ComplexGrid ga = fa.value_grid(), gb = fb.value_grid();
    for (int j = 0; j < spec.n; ++j) {
        for (int k = 0; k < spec.n; ++k) {
            cd z = spec.point(j, k);
            double r = std::abs(z);
            if (r > R) continue;
            double ratio = std::abs(ga.at(j, k) - gb.at(j, k)) / ab;
            rep.max_ratio_disk = std::max(rep.max_ratio_disk, ratio);
            if (r >= 1.0 / R) {
                min_ann = std::min(min_ann, ratio);
                rep.max_ratio_annulus = std::max(rep.max_ratio_annulus, ratio);
            }
            cd d_dz = fa.solution.dz_f.at(j, k) - fb.solution.dz_f.at(j, k);
            cd d_dzb = fa.solution.omega.at(j, k) - fb.solution.omega.at(j, k);
            double dnorm = std::abs(d_dz) + std::abs(d_dzb);
            l2 += dnorm * dnorm;
            minJ = std::min(minJ, std::norm(d_dz) - std::norm(d_dzb));
        }
    }
    rep.min_ratio_annulus = min_ann;
    rep.l2_ratio = std::sqrt(l2) * spec.step() / ab;
    rep.min_diff_jacobian = minJ / (ab * ab);
    rep.K_used = (1.0 + H.k_bound) / (1.0 - H.k_bound);
    rep.C_used = C_eta;
    rep.eta_upper = eta_modulus(rep.K_used, C_eta, R);
    rep.eta_lower = 1.0 / eta_modulus(rep.K_used, C_eta, 1.0 / R);
    return rep;
}

std::vector<SweepRecord> field_sweep(
    const StructureFunction& H, const std::vector<cd>& a_set,
    const SpectralOperators& ops, const SweepOptions& opts,
    const std::function<void(int, const FieldSample&)>& visit) {
    if (a_set.empty()) throw Error("field_sweep needs a nonempty a-set");
    std::vector<SweepRecord> records(a_set.size());

    auto run_one = [&](int i, PeriodMap* pm, const std::optional<cd>& seed) {
        SweepRecord& rec = records[i];
        rec.a = a_set[i];
        try {
            FieldOptions fo = opts.field;
            if (seed) fo.seed = seed;
            FieldSample s =
                pm ? solve_for_a(H, a_set[i], ops, *pm, fo)
                   : solve_for_a(H, a_set[i], ops, fo);
            rec.w = s.w;
            rec.residual = s.solution.residual;
            rec.newton_iters = s.newton_iterations;
            rec.min_jacobian =
                min_jacobian_disk(s.solution, ops.spec().support_radius);
            rec.ok = true;
            if (visit) visit(i, s);
        } catch (const Error& e) {
            rec.ok = false;
            rec.error = e.what();
        }
    };

    if (opts.warm_start) {
        PeriodMap pm(H, ops, opts.field.solver);
        std::optional<cd> seed;
        for (std::size_t i = 0; i < a_set.size(); ++i) {
            run_one(static_cast<int>(i), &pm, seed);
            if (records[i].ok)
                seed = records[i].w +
                       (i + 1 < a_set.size() ? a_set[i + 1] - a_set[i] : cd{});
            else
                seed.reset();
        }
    } else {
        parallel_for(opts.threads, static_cast<int>(a_set.size()),
                     [&](int i) { run_one(i, nullptr, std::nullopt); });
    }
    return records;
}

std::vector<cd> parse_a_set(const std::string& text) {
    auto colon = text.find(':');
    std::string kind = text.substr(0, colon);
    std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
    std::vector<cd> out;
    if (kind == "circle") {
        double r = 1.0;
        int n = 8;
        std::stringstream ss(args);
        std::string item;
        while (std::getline(ss, item, ',')) {
            auto eq = item.find('=');
            if (eq == std::string::npos)
                throw ConfigError("bad a-set item: " + item);
            std::string key = item.substr(0, eq), val = item.substr(eq + 1);
            if (key == "r") r = std::stod(val);
            else if (key == "n") n = std::stoi(val);
            else throw ConfigError("unknown circle key: " + key);
        }
        if (n < 1 || !(r > 0)) throw ConfigError("bad circle a-set");
        for (int i = 0; i < n; ++i) {
            double th = 2.0 * M_PI * i / n;
            out.emplace_back(r * std::cos(th), r * std::sin(th));
        }
        return out;
    }
    if (kind == "grid") {
        double re0 = -1, re1 = 1, im0 = -1, im1 = 1;
        int n = 3;
        std::stringstream ss(args);
        std::string item;
        auto parse_range = [](const std::string& v, double& lo, double& hi) {
            if (v.size() < 5 || v.front() != '[' || v.back() != ']')
                throw ConfigError("bad range: " + v);
            auto comma = v.find(',');
            lo = std::stod(v.substr(1, comma - 1));
            hi = std::stod(v.substr(comma + 1, v.size() - comma - 2));
        };
        // '[' ranges contain commas, so split on ',' only outside brackets.
        std::vector<std::string> items;
        int depth = 0;
        std::string cur;
        for (char c : args) {
            if (c == '[') depth++;
            if (c == ']') depth--;
            if (c == ',' && depth == 0) {
                items.push_back(cur);
                cur.clear();
            } else cur.push_back(c);
        }
        if (!cur.empty()) items.push_back(cur);
        for (const std::string& it : items) {
            auto eq = it.find('=');
            if (eq == std::string::npos)
                throw ConfigError("bad a-set item: " + it);
            std::string key = it.substr(0, eq), val = it.substr(eq + 1);
            if (key == "re") parse_range(val, re0, re1);
            else if (key == "im") parse_range(val, im0, im1);
            else if (key == "n") n = std::stoi(val);
            else throw ConfigError("unknown grid key: " + key);
        }
        if (n < 1) throw ConfigError("grid a-set needs n >= 1");
        int side = static_cast<int>(std::round(std::sqrt(double(n))));
        if (side * side != n)
            throw ConfigError("grid a-set n must be a perfect square");
        for (int iy = 0; iy < side; ++iy)
            for (int ix = 0; ix < side; ++ix)
                out.emplace_back(
                    side == 1 ? (re0 + re1) / 2 : re0 + (re1 - re0) * ix / (side - 1),
                    side == 1 ? (im0 + im1) / 2 : im0 + (im1 - im0) * iy / (side - 1));
        return out;
    }
    if (kind == "list") {
        std::stringstream ss(args);
        std::string item;
        while (std::getline(ss, item, ';'))
            if (!item.empty()) out.push_back(parse_complex(item));
        if (out.empty()) throw ConfigError("empty a-set list");
        return out;
    }
    throw ConfigError("unknown a-set kind: " + kind);
}

}  // namespace beltrami
