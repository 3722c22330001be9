#pragma once

#include "beltrami/field.hpp"

namespace beltrami {

/// Finite-difference directional derivative of a -> phi_a in direction e,
/// with its Wirtinger derivative grids taken from the solved samples (no
/// extra transforms). Central differencing by default; the one-sided
/// variant mirrors the t -> 0+ definition.
struct TangentField {
    cd a{}, e{};
    double t = 0.0;
    bool central = true;
    ComplexGrid eta;       // (phi_{a+te} - phi_{a-te}) / 2t, normalized
    ComplexGrid d_eta;     // dz of eta
    ComplexGrid dbar_eta;  // dzbar of eta
};

struct TangentOptions {
    double t = 1e-3;  // scaled by max(1, |a|)
    bool central = true;
    FieldOptions field;
};

TangentField directional_derivative(const StructureFunction& H, cd a, cd e,
                                    double t, const SpectralOperators& ops,
                                    bool central = true,
                                    const FieldOptions& field = {});

struct CoefficientField {
    ComplexGrid mu, nu;
    long flagged = 0;     // samples where the gradient slot is singular
    double sup_sum = 0.0; // sup |mu| + |nu|
};

/// mu_a = dH/dw, nu_a = dH/dwbar evaluated along dz phi_a. Samples where H
/// is not differentiable (|dz phi_a| under the floor for members that are
/// non-smooth at w = 0) are zeroed and counted.
CoefficientField linearized_coefficients(const StructureFunction& H,
                                         const FieldSample& base);

struct TangentData {
    cd a{};
    double t = 0.0;
    TangentField eta_1, eta_i;
    CoefficientField coeffs;         // the dH/dw route
    std::vector<double> det_grid;    // Im(dz eta_1 * conj(dz eta_i)), row-major
};

TangentData compute_tangent(const StructureFunction& H, cd a,
                            const SpectralOperators& ops,
                            const TangentOptions& opts = {});

struct WronskianField {
    ComplexGrid mu, nu;
    std::vector<std::pair<int, int>> degenerate;  // (j, k) under the floor
    double denom_min_abs = 0.0;  // over non-degenerate samples in the support
    double denom_floor = 0.0;
};

/// Coefficient recovery from a tangent pair:
///   mu = (dzbar e1 conj(dz ei) - dzbar ei conj(dz e1)) / (2i Im(dz e1 conj(dz ei)))
///   nu = (dz e1 dzbar ei - dz ei dzbar e1) / (2i Im(dz e1 conj(dz ei)))
/// Degenerate samples (denominator under 1e-6 of its sup) are zeroed and
/// reported with their coordinates.
WronskianField wronskian_coefficients(const TangentField& eta1,
                                      const TangentField& etai);
WronskianField wronskian_coefficients(const ComplexGrid& eta1_values,
                                      const ComplexGrid& etai_values,
                                      const SpectralOperators& ops);

struct LinearizationReport {
    cd a{}, e{};
    std::vector<double> t_ladder;
    std::vector<double> residuals;  // r(t) = L2-residual of the linearized
                                    // equation over |z| <= rho
    std::vector<double> w12_gaps;   // ||D eta(t_j) - D eta(t_{j+1})||_L2
    double cross_gap_sup = 0.0;     // sup |eta(t_min) - g_e| over |z| <= rho
    double grid_error_scale = 0.0;  // h^2 max(1, |a|, |e|)
};

/// Residual ladder r(t), r(t/2), ..., plus the cross-check against the
/// directly solved R-linear field member with the matching normalization.
LinearizationReport verify_linearization(const StructureFunction& H, cd a,
                                         cd e, double t,
                                         const SpectralOperators& ops,
                                         int halvings = 2,
                                         const FieldOptions& field = {});

struct NondegeneracyReport {
    cd a{};
    double t = 0.0;
    double R = 0.0;
    double det_min_abs = 0.0;  // over |z| <= rho
    double det_max_abs = 0.0;
    int det_sign = 0;          // sign of every sample, 0 if mixed
    bool sign_constant = false;
    double slope_ratio_min = 0.0;  // |dz phi_a| / |a| over |z| <= R
    double slope_ratio_max = 0.0;
};

NondegeneracyReport nondegeneracy_report(const StructureFunction& H, cd a,
                                         double t, const SpectralOperators& ops,
                                         double R,
                                         const TangentOptions& opts = {});

}  // namespace beltrami
