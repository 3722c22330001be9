#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "beltrami/grid.hpp"
#include "beltrami/rng.hpp"

namespace beltrami {

/// Wirtinger gradient of H in the gradient slot: (dH/dw, dH/dwbar).
struct WGradient {
    cd dw{};
    cd dwbar{};
    double sum_abs() const { return std::abs(dw) + std::abs(dwbar); }
};

/// Spatial profile modulating the coefficients of the built-in members.
/// Disk is the sharp indicator of the unit disk (Lipschitz-only work);
/// Taper ramps it down smoothly over [0.9, 1]; Bump is a C-infinity bump.
enum class Profile { Disk, Taper, Bump };

std::string profile_name(Profile p);
double profile_value(Profile p, cd z);  // supported in |z| < 1, peak 1

struct StructureTags {
    bool is_linear_C = false;
    bool is_linear_R = false;
    bool is_homogeneous_1 = false;
    bool is_regular = false;
    bool has_uniqueness_property = false;
    std::string provenance;  // one-line note on why the flags hold
};

/// The nonlinearity H(z, w) of the equation dzbar f = H(z, dz f), with its
/// Lipschitz budget in w (k_bound < 1 away from degeneracy), pointwise
/// profile k(z), optional Holder-in-z exponent, and compact z-support.
struct StructureFunction {
    std::string id;
    std::function<cd(cd, cd)> evaluate;                  // H(z, w)
    std::function<WGradient(cd, cd)> analytic_gradient;  // null -> FD fallback
    double k_bound = 0.0;
    std::function<double(cd)> k_profile;  // pointwise Lipschitz constant
    std::optional<double> holder_alpha;
    double support_radius = 1.0;  // H(z, .) = 0 for |z| > support_radius
    bool smooth_in_w_at_zero = true;
    StructureTags tags;

    cd operator()(cd z, cd w) const { return evaluate(z, w); }

    /// Analytic gradient when available, otherwise central differences.
    WGradient w_gradient(cd z, cd w, double h_scale = 1e-4) const;
};

/// Central-difference Wirtinger gradient with step h_w (absolute).
WGradient w_gradient_fd(const StructureFunction& H, cd z, cd w, double h_w);

StructureFunction make_zero();
StructureFunction make_clin(cd mu0, Profile profile = Profile::Disk);
StructureFunction make_rlin(cd mu0, cd nu0, Profile profile = Profile::Disk);
StructureFunction make_radial(double k0);
StructureFunction make_smooth(double k0, double eps);

/// Built-in members with default parameters, in catalog order.
std::vector<StructureFunction> catalog();

/// Parses ids like "zero", "clin:mu=0.3", "rlin:mu=0.2+0.1i,nu=0.1,profile=bump",
/// "radial:k=0.3333", "smooth:k=0.3,eps=0.5".
StructureFunction parse_structure(const std::string& id);

cd parse_complex(const std::string& text);
std::string format_complex(cd v);

struct LipschitzWitness {
    cd z, w1, w2;
    double quotient = 0.0;
};

/// Sampled certificate for the k-Lipschitz bound and the ellipticity tail.
struct EllipticityReport {
    double measured_k = 0.0;
    double measured_alpha_constant = 0.0;
    double tail_k = 0.0;  // sup k(z) outside the probe radius
    bool uniqueness_threshold_ok = false;  // tail_k < 3 - 2*sqrt(2)
    bool k_bound_violated = false;
    LipschitzWitness worst;
    long trials = 0;
};

/// Threshold from the ellipticity-at-infinity uniqueness criterion.
inline constexpr double uniqueness_tail_threshold() {
    return 3.0 - 2.0 * 1.41421356237309504880168872420969808;
}

EllipticityReport verify_H1(const StructureFunction& H, Rng& rng, long trials);

}  // namespace beltrami
