#include "beltrami/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "beltrami/parallel.hpp"

namespace beltrami {

std::vector<cd> AValueSet::all() const {
    std::vector<cd> out;
    for (const auto& ring : circles) out.insert(out.end(), ring.begin(), ring.end());
    out.insert(out.end(), interior.begin(), interior.end());
    return out;
}

AValueSet make_annulus_disk_set(const std::vector<double>& radii,
                                int per_circle, int interior_side,
                                double interior_half_width) {
    AValueSet set;
    set.circle_radii = radii;
    set.per_circle = per_circle;
    for (double r : radii) {
        std::vector<cd> ring;
        ring.reserve(per_circle);
        for (int i = 0; i < per_circle; ++i) {
            double th = 2.0 * M_PI * i / per_circle;
            ring.emplace_back(r * std::cos(th), r * std::sin(th));
        }
        set.circles.push_back(std::move(ring));
    }
    set.interior.emplace_back(0.0, 0.0);
    for (int iy = 0; iy < interior_side; ++iy) {
        for (int ix = 0; ix < interior_side; ++ix) {
            if (interior_side < 2) break;
            cd a(-interior_half_width +
                     2.0 * interior_half_width * ix / (interior_side - 1),
                 -interior_half_width +
                     2.0 * interior_half_width * iy / (interior_side - 1));
            if (std::abs(a) > 1e-12) set.interior.push_back(a);
        }
    }
    return set;
}

const ChartSample& GradientChart::nearest(cd w) const {
    const ChartSample* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const ChartSample& s : samples) {
        if (!s.ok) continue;
        double d = std::abs(s.F - w);
        if (d < best_d) {
            best_d = d;
            best = &s;
        }
    }
    if (!best) throw OutsideChart("chart has no usable samples");
    return *best;
}

bool GradientChart::covers(cd w, double margin) const {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const ChartSample& s : samples) {
        if (!s.ok) continue;
        double m = std::abs(s.F);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    double m = std::abs(w);
    return m <= hi * (1.0 + margin) && (m >= lo * (1.0 - margin) || m <= 1e-14);
}

namespace {

int winding_about_zero(const std::vector<cd>& loop) {
    double total = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        cd z0 = loop[i];
        cd z1 = loop[(i + 1) % loop.size()];
        if (std::abs(z0) == 0.0 || std::abs(z1) == 0.0) return 0;
        total += std::arg(z1 / z0);
    }
    return static_cast<int>(std::lround(total / (2.0 * M_PI)));
}

void finish_chart(GradientChart& chart, const AValueSet& a_set) {
    chart.circle_radii = a_set.circle_radii;
    std::size_t idx = 0;
    for (const auto& ring : a_set.circles) {
        std::vector<cd> image;
        bool complete = true;
        double min_abs = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < ring.size(); ++i, ++idx) {
            const ChartSample& s = chart.samples[idx];
            if (!s.ok) {
                complete = false;
                continue;
            }
            image.push_back(s.F);
            min_abs = std::min(min_abs, std::abs(s.F));
        }
        chart.windings.push_back(complete ? winding_about_zero(image) : 0);
        chart.circle_min_abs_F.push_back(complete ? min_abs : 0.0);
    }
    chart.ratio_min = std::numeric_limits<double>::infinity();
    for (const ChartSample& s : chart.samples) {
        if (!s.ok) {
            ++chart.failures;
            continue;
        }
        double aa = std::abs(s.a);
        if (aa > 1e-12) {
            double ratio = std::abs(s.F) / aa;
            chart.ratio_min = std::min(chart.ratio_min, ratio);
            chart.ratio_max = std::max(chart.ratio_max, ratio);
        }
    }
    // Discrete injectivity: distinct a's may not collide in F.
    const double tol = chart.injectivity_tol;
    for (std::size_t i = 0; i < chart.samples.size(); ++i) {
        for (std::size_t j = i + 1; j < chart.samples.size(); ++j) {
            const ChartSample& si = chart.samples[i];
            const ChartSample& sj = chart.samples[j];
            if (!si.ok || !sj.ok) continue;
            if (std::abs(si.F - sj.F) < tol && std::abs(si.a - sj.a) > tol)
                ++chart.injectivity_violations;
        }
    }
}

}  // namespace

std::vector<GradientChart> gradient_charts(const StructureFunction& H,
                                           const std::vector<cd>& z_probes,
                                           const AValueSet& a_set,
                                           const SpectralOperators& ops,
                                           const ChartOptions& opts) {
    std::vector<cd> all_a = a_set.all();
    std::vector<GradientChart> charts(z_probes.size());
    for (std::size_t p = 0; p < z_probes.size(); ++p) {
        charts[p].z_probe = z_probes[p];
        charts[p].injectivity_tol = opts.injectivity_tol;
        charts[p].samples.resize(all_a.size());
    }
    SweepOptions so;
    so.field = opts.field;
    so.warm_start = opts.threads <= 1;
    so.threads = opts.threads;
    auto records = field_sweep(H, all_a, ops, so, [&](int i, const FieldSample& s) {
        for (std::size_t p = 0; p < z_probes.size(); ++p) {
            ChartSample& cs = charts[p].samples[i];
            cs.a = s.a;
            cs.w_slope = s.w;
            cs.F = s.dz(z_probes[p]);
            cs.dzbar_value = s.dzbar(z_probes[p]);
            cs.residual = s.solution.residual;
            cs.ok = true;
        }
    });
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!records[i].ok)
            for (auto& chart : charts) {
                chart.samples[i].a = all_a[i];
                chart.samples[i].error = records[i].error;
            }
    }
    for (auto& chart : charts) finish_chart(chart, a_set);
    return charts;
}

GradientChart gradient_chart(const StructureFunction& H, cd z_probe,
                             const AValueSet& a_set,
                             const SpectralOperators& ops,
                             const ChartOptions& opts) {
    return gradient_charts(H, {z_probe}, a_set, ops, opts).front();
}

InversionResult invert_gradient(const StructureFunction& H,
                                const GradientChart& chart, cd w,
                                const SpectralOperators& ops,
                                const InvertOptions& opts) {
    InversionResult out;
    if (std::abs(w) <= 1e-14) {
        // F_z(0) = 0 exactly: phi_0 is the zero map.
        return out;
    }
    if (!chart.covers(w, opts.coverage_margin))
        throw OutsideChart("w = " + format_complex(w) +
                           " lies outside the sampled gradient range");
    const cd zp = chart.z_probe;
    const double tol = opts.tol * std::max(1.0, std::abs(w));

    PeriodMap pm(H, ops, opts.solver);
    cd s = opts.seed_slope.value_or(chart.nearest(w).w_slope);
    auto F_of = [&](cd slope) {
        pm.evaluate(slope);  // keeps the solution cached for the accessors
        return bilinear(pm.last_solution().dz_f, zp);
    };
    cd G = F_of(s) - w;
    int steps = 0;
    while (std::abs(G) > tol) {
        if (steps >= opts.max_steps)
            throw NonConvergence("gradient inversion did not converge at w = " +
                                     format_complex(w),
                                 std::abs(G), steps);
        double h = 1e-5 * std::max(1.0, std::abs(s));
        cd Gx = (F_of(s + h) - w - G) / h;
        cd Gy = (F_of(s + cd(0, h)) - w - G) / h;
        double det = Gx.real() * Gy.imag() - Gy.real() * Gx.imag();
        double scale = std::abs(Gx) * std::abs(Gy) + 1e-300;
        if (std::abs(det) < 1e-12 * scale)
            throw NewtonStall(
                "degenerate gradient-map Jacobian near w = " + format_complex(w),
                s);
        cd delta(-(G.real() * Gy.imag() - G.imag() * Gy.real()) / det,
                 -(Gx.real() * G.imag() - Gx.imag() * G.real()) / det);
        bool accepted = false;
        cd G_new{}, s_new{};
        for (int halving = 0; halving < 8; ++halving) {
            s_new = s + delta;
            G_new = F_of(s_new) - w;
            if (std::abs(G_new) < std::abs(G) || std::abs(G_new) <= tol) {
                accepted = true;
                break;
            }
            delta *= 0.5;
        }
        if (!accepted)
            throw NonConvergence("damped gradient inversion stalled at w = " +
                                     format_complex(w),
                                 std::abs(G_new) / std::abs(G), steps);
        s = s_new;
        G = G_new;
        ++steps;
    }
    if (pm.last_w() != s) F_of(s);
    out.w_slope = s;
    out.a = period_of(pm.last_solution());
    out.dzbar_at_probe = bilinear(pm.last_solution().omega, zp);
    out.newton_steps = steps;
    out.residual = std::abs(G);
    return out;
}

cd reconstruct_H(const StructureFunction& H_source, cd z_probe, cd w,
                 const SpectralOperators& ops, const GradientChart& chart,
                 const InvertOptions& opts) {
    if (chart.z_probe != z_probe)
        throw Error("chart was built for a different probe point");
    return invert_gradient(H_source, chart, w, ops, opts).dzbar_at_probe;
}

std::vector<cd> w_probe_window(const std::vector<GradientChart>& charts,
                               int n_radii, int n_angles, double margin) {
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (const GradientChart& chart : charts) {
        double clo = std::numeric_limits<double>::infinity(), chi = 0.0;
        for (const ChartSample& s : chart.samples) {
            if (!s.ok) continue;
            double m = std::abs(s.F);
            if (m > 1e-12) clo = std::min(clo, m);
            chi = std::max(chi, m);
        }
        lo = std::max(lo, clo);
        hi = std::min(hi, chi);
    }
    if (!(hi > lo)) throw OutsideChart("charts have no common w-annulus");
    double r0 = lo * (1.0 + margin), r1 = hi * (1.0 - margin);
    if (!(r1 > r0)) {
        r0 = lo + 0.25 * (hi - lo);
        r1 = hi - 0.25 * (hi - lo);
    }
    std::vector<cd> probes;
    for (int ir = 0; ir < n_radii; ++ir) {
        double r = n_radii == 1 ? 0.5 * (r0 + r1)
                                : r0 + (r1 - r0) * ir / (n_radii - 1);
        for (int ia = 0; ia < n_angles; ++ia) {
            double th = 2.0 * M_PI * (ia + 0.5 * (ir % 2)) / n_angles;
            probes.emplace_back(r * std::cos(th), r * std::sin(th));
        }
    }
    return probes;
}

RoundTripReport round_trip(const StructureFunction& H,
                           const std::vector<cd>& z_probes,
                           const std::vector<cd>& w_probes,
                           const SpectralOperators& ops,
                           const AValueSet& a_set,
                           const RoundTripOptions& opts) {
    return round_trip(H, gradient_charts(H, z_probes, a_set, ops, opts.chart),
                      w_probes, ops, opts);
}

RoundTripReport round_trip(const StructureFunction& H,
                           const std::vector<GradientChart>& charts,
                           const std::vector<cd>& w_probes,
                           const SpectralOperators& ops,
                           const RoundTripOptions& opts) {
    std::vector<cd> z_probes;
    for (const GradientChart& chart : charts) z_probes.push_back(chart.z_probe);

    RoundTripReport rep;
    rep.holder_exponent = opts.holder_exponent;
    const std::size_t nz = z_probes.size(), nw = w_probes.size();
    rep.probes.resize(nz * nw);

    std::vector<double> h_zero(nz, 0.0);
    parallel_for(opts.threads, static_cast<int>(nz), [&](int iz) {
        InvertOptions io = opts.invert;
        for (std::size_t iw = 0; iw < nw; ++iw) {
            ProbeRecord& pr = rep.probes[iz * nw + iw];
            pr.z = z_probes[iz];
            pr.w = w_probes[iw];
            try {
                InversionResult inv =
                    invert_gradient(H, charts[iz], pr.w, ops, io);
                pr.H_reconstructed = inv.dzbar_at_probe;
                pr.a = inv.a;
                pr.H_generating = H.evaluate(pr.z, pr.w);
                pr.abs_err = std::abs(pr.H_reconstructed - pr.H_generating);
                pr.rel_err = pr.abs_err / std::abs(pr.w);
                pr.ok = true;
                io.seed_slope = inv.w_slope;  // warm seed for the next w
            } catch (const Error& e) {
                pr.ok = false;
                pr.error = e.what();
                io.seed_slope.reset();
            }
        }
        // H_F(z, 0) = 0 comes from phi_0 = 0; exercised explicitly.
        InversionResult zero =
            invert_gradient(H, charts[iz], cd{}, ops, opts.invert);
        h_zero[iz] = std::abs(zero.dzbar_at_probe);
    });
    for (double v : h_zero) rep.h_zero_max = std::max(rep.h_zero_max, v);

    double sum = 0.0;
    long n_ok = 0;
    for (const ProbeRecord& pr : rep.probes) {
        if (!pr.ok) {
            ++rep.failures;
            continue;
        }
        ++n_ok;
        sum += pr.abs_err;
        rep.sup_abs_err = std::max(rep.sup_abs_err, pr.abs_err);
        rep.sup_rel_err = std::max(rep.sup_rel_err, pr.rel_err);
    }
    rep.mean_abs_err = n_ok > 0 ? sum / n_ok : 0.0;

    // Lipschitz-in-w over same-z pairs; Holder-in-z over same-w pairs.
    for (std::size_t iz = 0; iz < nz; ++iz) {
        for (std::size_t i = 0; i < nw; ++i) {
            for (std::size_t j = i + 1; j < nw; ++j) {
                const ProbeRecord& p1 = rep.probes[iz * nw + i];
                const ProbeRecord& p2 = rep.probes[iz * nw + j];
                if (!p1.ok || !p2.ok) continue;
                double dw = std::abs(p1.w - p2.w);
                if (dw < 1e-12) continue;
                rep.lipschitz_w_quotient_max = std::max(
                    rep.lipschitz_w_quotient_max,
                    std::abs(p1.H_reconstructed - p2.H_reconstructed) / dw);
            }
        }
    }
    for (std::size_t iw = 0; iw < nw; ++iw) {
        for (std::size_t i = 0; i < nz; ++i) {
            for (std::size_t j = i + 1; j < nz; ++j) {
                const ProbeRecord& p1 = rep.probes[i * nw + iw];
                const ProbeRecord& p2 = rep.probes[j * nw + iw];
                if (!p1.ok || !p2.ok) continue;
                double dz = std::abs(p1.z - p2.z);
                if (dz < 1e-12) continue;
                rep.holder_z_quotient_max =
                    std::max(rep.holder_z_quotient_max,
                             std::abs(p1.H_reconstructed - p2.H_reconstructed) /
                                 std::pow(dz, opts.holder_exponent));
            }
        }
    }
    return rep;
}

void write_round_trip_csv(const RoundTripReport& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << "re_z,im_z,re_w,im_w,abs_err,rel_err\n";
    out.precision(17);
    for (const ProbeRecord& pr : rep.probes) {
        if (!pr.ok) continue;
        out << pr.z.real() << ',' << pr.z.imag() << ',' << pr.w.real() << ','
            << pr.w.imag() << ',' << pr.abs_err << ',' << pr.rel_err << '\n';
    }
}

}  // namespace beltrami
