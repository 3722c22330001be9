#pragma once

#include <memory>

#include "beltrami/grid.hpp"

namespace beltrami {

/// Diagnostic for the zero-frequency component discarded by the Cauchy
/// transform (and by the Beurling transform). The transforms are only exact
/// inverses/isometries on mean-zero data; a large discarded mean means the
/// caller handed in data outside the mean-zero convention.
struct CauchyStats {
    double discarded_mean_abs = 0.0;
    bool warned = false;
};

/// Frequency-multiplier realization of the Wirtinger derivatives and the
/// Cauchy/Beurling singular integrals on the periodic square.
///
/// Conventions (fixed for reproducibility): forward FFT unnormalized,
/// inverse divided by n^2; integer frequencies wrap with the Nyquist mode
/// assigned to the negative side; with zeta = (pi/L)(m_x + i m_y),
///   d_z      -> (i/2) conj(zeta)
///   d_zbar   -> (i/2) zeta
///   cauchy   -> -2i / zeta       (0 at zeta = 0)
///   beurling -> conj(zeta)/zeta  (0 at zeta = 0)
/// The Beurling multiplier is unimodular away from zero, so S is an
/// isometry on mean-zero grids and S d_zbar = d_z.
class SpectralOperators {
  public:
    explicit SpectralOperators(const GridSpec& spec);
    ~SpectralOperators();

    SpectralOperators(const SpectralOperators&) = delete;
    SpectralOperators& operator=(const SpectralOperators&) = delete;
    SpectralOperators(SpectralOperators&&) noexcept;
    SpectralOperators& operator=(SpectralOperators&&) noexcept;

    const GridSpec& spec() const;

    ComplexGrid d_z(const ComplexGrid& g) const;
    ComplexGrid d_zbar(const ComplexGrid& g) const;
    ComplexGrid cauchy(const ComplexGrid& g, CauchyStats* stats = nullptr) const;
    ComplexGrid beurling(const ComplexGrid& g) const;

    /// Multiplier tables, row-major over wrapped frequencies.
    const std::vector<cd>& dz_multiplier() const;
    const std::vector<cd>& dzbar_multiplier() const;
    const std::vector<cd>& cauchy_multiplier() const;
    const std::vector<cd>& beurling_multiplier() const;

    double mean_warn_tolerance() const;
    void set_mean_warn_tolerance(double tol);

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

SpectralOperators make_operators(const GridSpec& spec);

ComplexGrid d_z(const ComplexGrid& g, const SpectralOperators& ops);
ComplexGrid d_zbar(const ComplexGrid& g, const SpectralOperators& ops);
ComplexGrid cauchy(const ComplexGrid& g, const SpectralOperators& ops,
                   CauchyStats* stats = nullptr);
ComplexGrid beurling(const ComplexGrid& g, const SpectralOperators& ops);

}  // namespace beltrami
