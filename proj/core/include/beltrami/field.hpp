#pragma once

#include <functional>
#include <optional>

#include "beltrami/solver.hpp"

namespace beltrami {

struct FieldOptions {
    double newton_tol = 1e-9;  // |A(w) - a| <= newton_tol * max(1, |a|)
    int max_newton = 40;
    std::optional<cd> seed;  // Newton seed, defaults to a
    SolveOptions solver;
};

/// One member phi_a of the field: phi_a(0) = 0, phi_a(1) = a, realized as a
/// principal solution with slope w shifted by its own value at the origin.
struct FieldSample {
    cd a{};
    cd w{};
    PrincipalSolution solution;
    cd value_offset{};  // interpolated correction at z = 0
    int newton_iterations = 0;

    cd value(cd z) const { return solution.value(z) - value_offset; }
    cd dz(cd z) const { return solution.dz(z); }
    cd dzbar(cd z) const { return solution.dzbar(z); }

    /// phi_a sampled on the grid (w z + correction - offset).
    ComplexGrid value_grid() const;
};

/// Normalization gap between the principal and the field parametrization:
/// A(w) = f^w(1) - f^w(0).
cd period_of(const PrincipalSolution& sol);
cd period(const StructureFunction& H, cd w, const SpectralOperators& ops,
          double tol = 1e-10);

/// Caches solves along a Newton run on w -> A(w), warm-starting each solve
/// from the previous omega and recording the sampled (w, A(w)) pairs.
class PeriodMap {
  public:
    PeriodMap(const StructureFunction& H, const SpectralOperators& ops,
              SolveOptions solver = {});

    cd evaluate(cd w);  // solves (warm started) and returns A(w)

    const StructureFunction& structure() const { return *H_; }
    const SpectralOperators& operators() const { return *ops_; }

    const std::vector<std::pair<cd, cd>>& samples() const { return samples_; }
    const PrincipalSolution& last_solution() const;
    cd last_w() const { return last_w_; }

    struct InjectivityViolation {
        cd w1, w2, A1, A2;
    };
    /// Pairs with |A1 - A2| below tol while |w1 - w2| above it.
    std::vector<InjectivityViolation> injectivity_violations(double tol) const;

  private:
    const StructureFunction* H_;
    const SpectralOperators* ops_;
    SolveOptions solver_;
    ComplexGrid warm_;
    bool have_warm_ = false;
    std::optional<PrincipalSolution> last_;
    cd last_w_{};
    std::vector<std::pair<cd, cd>> samples_;
};

/// Newton on w -> A(w) - a with a central-difference 2x2 real Jacobian and
/// step-halving damping; seeded at w0 = a unless options say otherwise.
FieldSample solve_for_a(const StructureFunction& H, cd a,
                        const SpectralOperators& ops,
                        const FieldOptions& opts = {});

/// Same, reusing a caller-provided PeriodMap (keeps warm starts across a's).
FieldSample solve_for_a(const StructureFunction& H, cd a,
                        const SpectralOperators& ops, PeriodMap& period_map,
                        const FieldOptions& opts = {});

struct BilipReport {
    cd a{}, b{};
    double R = 0.0;
    // |phi_a(z) - phi_b(z)| / |a - b| over the annulus 1/R <= |z| <= R and
    // the full disk |z| <= R.
    double min_ratio_annulus = 0.0;
    double max_ratio_annulus = 0.0;
    double max_ratio_disk = 0.0;
    // ||D phi_a - D phi_b||_L2(|z|<=R) / |a - b| with |D| = |dz| + |dzbar|.
    double l2_ratio = 0.0;
    // Quasisymmetry envelope eta_K(t) = C max(t^K, t^(1/K)).
    double eta_upper = 0.0;  // eta_K(R)
    double eta_lower = 0.0;  // 1 / eta_K(1/R)
    double K_used = 1.0;
    double C_used = 1.0;
    // min J(z, (phi_a - phi_b)/|a-b|) over |z| <= R; sign equals the sign
    // of the unnormalized difference Jacobian.
    double min_diff_jacobian = 0.0;
};

double eta_modulus(double K, double C, double t);

BilipReport bilip_report(const StructureFunction& H, cd a, cd b, double R,
                         const SpectralOperators& ops,
                         const FieldOptions& opts = {}, double C_eta = 1.0);

struct SweepRecord {
    cd a{};
    cd w{};
    double residual = 0.0;
    int newton_iters = 0;
    double min_jacobian = 0.0;  // over |z| <= support radius
    bool ok = false;
    std::string error;
};

struct SweepOptions {
    FieldOptions field;
    bool warm_start = true;  // sequential, seeded along the path
    int threads = 1;         // used only in cold-start mode
};

/// Visits every successfully solved sample with its a-set index (streaming:
/// the sample dies after the visit; in cold-start mode the visitor runs on
/// worker threads and must only touch state owned by that index).
/// Per-a failures are recorded, not thrown.
std::vector<SweepRecord> field_sweep(
    const StructureFunction& H, const std::vector<cd>& a_set,
    const SpectralOperators& ops, const SweepOptions& opts = {},
    const std::function<void(int, const FieldSample&)>& visit = {});

/// Parses "circle:r=1,n=16", "grid:re=[-2,2],im=[-2,2],n=9", or
/// "list:1+0i;0.5-0.2i".
std::vector<cd> parse_a_set(const std::string& text);

}  // namespace beltrami
