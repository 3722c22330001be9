#pragma once

#include <optional>

#include "beltrami/spectral.hpp"
#include "beltrami/structure.hpp"

namespace beltrami {

struct SolveOptions {
    double tol = 1e-10;  // L2 iterate-distance stop, scaled by max(1, |slope|)
    int max_iter = 500;
    const ComplexGrid* warm_start = nullptr;        // seed for omega
    std::vector<double>* distance_history = nullptr;  // iterate distances out
};

/// Principal solution f of dzbar f = H(z, dz f) with f(z) ~ w z near the
/// collar. Stored as the compactly supported omega = dzbar f plus the
/// periodic correction C(omega) = f - w z; dz f = w + S omega. The dzbar
/// grid IS omega by construction; the residual is recomputed from grids.
struct PrincipalSolution {
    cd w_infinity{};
    ComplexGrid omega;     // dzbar f
    ComplexGrid f_values;  // f - w z (mean-zero periodic correction)
    ComplexGrid dz_f;      // w + S omega
    double residual = 0.0;
    int iterations = 0;
    double contraction_ratio = 0.0;  // max measured iterate-distance ratio
    double discarded_mean = 0.0;     // |mean omega| dropped by C and S

    const ComplexGrid& dzbar_f() const { return omega; }

    // Off-grid accessors interpolate only the periodic correction; the
    // conformal part w z is exact.
    cd value(cd z) const { return w_infinity * z + bilinear(f_values, z); }
    cd dz(cd z) const { return bilinear(dz_f, z); }
    cd dzbar(cd z) const { return bilinear(omega, z); }
};

/// R-linear problem dzbar g = mu dz g + nu conj(dz g) + source with
/// principal slope e. Coefficients must vanish outside the support radius
/// and satisfy |mu| + |nu| <= k < 1 pointwise.
struct LinearSolveProblem {
    ComplexGrid mu;
    ComplexGrid nu;
    cd slope{1.0, 0.0};
    std::optional<ComplexGrid> source;

    /// Sup of pointwise |mu| + |nu|; throws unless < 1 and supported.
    double validate() const;
};

PrincipalSolution solve_nonlinear(const StructureFunction& H, cd w,
                                  const SpectralOperators& ops,
                                  const SolveOptions& opts = {});

PrincipalSolution solve_rlinear(const LinearSolveProblem& p,
                                const SpectralOperators& ops,
                                const SolveOptions& opts = {});

/// Recomputes sup |dzbar f - H(z, dz f)| from the stored grids,
/// independently of the iteration history.
double residual_of(const StructureFunction& H, const PrincipalSolution& sol);

struct DistortionReport {
    double max_ratio = 0.0;  // max |dzbar f| / |dz f| where dz f is nonzero
    long flagged = 0;        // samples with dz f ~ 0 but dzbar f not
    double floor = 0.0;      // |dz f| threshold used
};

DistortionReport distortion_check(const PrincipalSolution& sol);

/// Minimum of J(z, f) = |dz f|^2 - |dzbar f|^2 over samples |z| <= R.
double min_jacobian_disk(const PrincipalSolution& sol, double R);
double min_jacobian_disk(const ComplexGrid& dz_f, const ComplexGrid& dzbar_f,
                         double R);

/// Sup of |g(z1) - g(z2)| / |z1 - z2|^gamma over sample pairs in |z| <= R:
/// all near-neighbor lattice pairs plus all pairs of a deterministic
/// subsample (at most subsample_budget points).
double holder_quotient_sup(const ComplexGrid& g, double R, double gamma,
                           int subsample_budget = 1500);

}  // namespace beltrami
