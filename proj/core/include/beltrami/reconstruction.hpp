#pragma once

#include "beltrami/tangent.hpp"

namespace beltrami {

/// a-values for chart construction: concentric circles (ordered per circle,
/// winding-testable) plus a coarse interior grid including 0.
struct AValueSet {
    std::vector<double> circle_radii;
    int per_circle = 64;
    std::vector<std::vector<cd>> circles;  // one ring per radius, in order
    std::vector<cd> interior;              // includes a = 0

    std::vector<cd> all() const;
};

AValueSet make_annulus_disk_set(const std::vector<double>& radii,
                                int per_circle, int interior_side,
                                double interior_half_width);

struct ChartSample {
    cd a{};
    cd w_slope{};
    cd F{};            // dz phi_a at the probe
    cd dzbar_value{};  // dzbar phi_a at the probe
    double residual = 0.0;
    bool ok = false;
    std::string error;
};

/// Sampled view of F_z : a -> dz phi_a(z_probe), with the homeomorphism
/// diagnostics: winding of each boundary circle image about F_z(0) = 0,
/// discrete injectivity, and the linear-growth ratios |F_z(a)| / |a|.
struct GradientChart {
    cd z_probe{};
    std::vector<ChartSample> samples;
    std::vector<double> circle_radii;
    std::vector<int> windings;             // per circle, +-1 for a homeomorphism
    std::vector<double> circle_min_abs_F;  // min |F| per circle (divergence probe)
    long injectivity_violations = 0;
    double injectivity_tol = 1e-6;
    double ratio_min = 0.0;  // min |F(a)|/|a| over samples with a != 0
    double ratio_max = 0.0;
    long failures = 0;

    const ChartSample& nearest(cd w) const;
    /// Measured image annulus, widened by the given relative margin.
    bool covers(cd w, double margin = 0.25) const;
};

struct ChartOptions {
    FieldOptions field;
    int threads = 1;
    double injectivity_tol = 1e-6;
};

GradientChart gradient_chart(const StructureFunction& H, cd z_probe,
                             const AValueSet& a_set,
                             const SpectralOperators& ops,
                             const ChartOptions& opts = {});

/// One field sweep shared across all probes.
std::vector<GradientChart> gradient_charts(const StructureFunction& H,
                                           const std::vector<cd>& z_probes,
                                           const AValueSet& a_set,
                                           const SpectralOperators& ops,
                                           const ChartOptions& opts = {});

struct InversionResult {
    cd a{};
    cd w_slope{};
    cd dzbar_at_probe{};  // dzbar phi_a(z_probe) = the reconstructed value
    int newton_steps = 0;
    double residual = 0.0;  // |F_z(a) - w|
};

struct InvertOptions {
    double tol = 1e-9;  // scaled by max(1, |w|)
    int max_steps = 40;
    double coverage_margin = 0.25;
    SolveOptions solver;
    std::optional<cd> seed_slope;  // overrides the nearest-sample seed
};

/// Newton on the slope s of the underlying principal solution, solving
/// dz f^s(z_probe) = w; a is recovered from the period of the final solve.
/// Every iterate is a fresh field solve (warm-started).
InversionResult invert_gradient(const StructureFunction& H,
                                const GradientChart& chart, cd w,
                                const SpectralOperators& ops,
                                const InvertOptions& opts = {});

/// H_F(z, w) = dzbar phi_a(z) at a = a(z, w), computed from field data
/// only; the generating H is used solely inside the solves.
cd reconstruct_H(const StructureFunction& H_source, cd z_probe, cd w,
                 const SpectralOperators& ops, const GradientChart& chart,
                 const InvertOptions& opts = {});

struct ProbeRecord {
    cd z{}, w{};
    cd H_reconstructed{};
    cd H_generating{};
    double abs_err = 0.0;
    double rel_err = 0.0;  // abs_err / |w|
    bool ok = false;
    std::string error;
    cd a{};
};

struct RoundTripReport {
    std::vector<ProbeRecord> probes;
    double sup_abs_err = 0.0;
    double mean_abs_err = 0.0;
    double sup_rel_err = 0.0;
    long failures = 0;
    // Lipschitz of the reconstructed values in w over same-z probe pairs.
    double lipschitz_w_quotient_max = 0.0;
    // Holder-in-z quotients of the reconstructed values over same-w pairs.
    double holder_z_quotient_max = 0.0;
    double holder_exponent = 0.0;
    double h_zero_max = 0.0;  // sup over probes z of |H_F(z, 0)|
};

struct RoundTripOptions {
    InvertOptions invert;
    ChartOptions chart;
    double holder_exponent = 0.75;
    int threads = 1;
};

/// Full error report of H -> F_H -> H_F over the probe rectangle; failures
/// are recorded per probe, never thrown.
RoundTripReport round_trip(const StructureFunction& H,
                           const std::vector<cd>& z_probes,
                           const std::vector<cd>& w_probes,
                           const SpectralOperators& ops,
                           const AValueSet& a_set,
                           const RoundTripOptions& opts = {});

/// Same, reusing charts already built for these probes (one per z).
RoundTripReport round_trip(const StructureFunction& H,
                           const std::vector<GradientChart>& charts,
                           const std::vector<cd>& w_probes,
                           const SpectralOperators& ops,
                           const RoundTripOptions& opts = {});

/// Polar probe grid inside the measured linear-growth window of the charts
/// (shrunk by the margin on both sides).
std::vector<cd> w_probe_window(const std::vector<GradientChart>& charts,
                               int n_radii, int n_angles,
                               double margin = 0.15);

void write_round_trip_csv(const RoundTripReport& rep, const std::string& path);

}  // namespace beltrami
