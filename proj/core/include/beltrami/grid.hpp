#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "beltrami/errors.hpp"

namespace beltrami {

using cd = std::complex<double>;

/// Square periodic raster covering [-L, L)^2 with n samples per side.
/// All equation coefficients must vanish outside |z| <= support_radius,
/// which leaves a coefficient-free collar of width >= L/2 absorbing the
/// periodic wrap-around of the singular integrals.
struct GridSpec {
    int n = 0;                    // samples per side, power of two, >= 16
    double half_width = 0.0;      // L
    double support_radius = 0.0;  // rho, 0 < rho <= L/2

    void validate() const;
    bool valid() const noexcept;

    double step() const { return 2.0 * half_width / n; }

    /// Sample coordinate: z(j,k) = -L + step*(k + i*j). Row j = Im index.
    cd point(int j, int k) const {
        return {-half_width + step() * k, -half_width + step() * j};
    }

    std::size_t index(int j, int k) const {
        return static_cast<std::size_t>(j) * n + static_cast<std::size_t>(k);
    }
    std::size_t size() const { return static_cast<std::size_t>(n) * n; }

    bool operator==(const GridSpec&) const = default;
};

/// n x n complex samples of a planar function on a GridSpec raster.
struct ComplexGrid {
    GridSpec spec;
    std::vector<cd> values;

    ComplexGrid() = default;
    explicit ComplexGrid(const GridSpec& s) : spec(s), values(s.size(), cd{}) {
        spec.validate();
    }

    static ComplexGrid from_function(const GridSpec& s,
                                     const std::function<cd(cd)>& f);

    cd& at(int j, int k) { return values[spec.index(j, k)]; }
    const cd& at(int j, int k) const { return values[spec.index(j, k)]; }

    cd mean() const;
    /// Area-weighted discrete L2 norm: sqrt(h^2 * sum |g|^2).
    double norm_l2() const;
    double sup_abs() const;
    bool all_finite() const;

    ComplexGrid& operator+=(const ComplexGrid& o);
    ComplexGrid& operator-=(const ComplexGrid& o);
    ComplexGrid& operator*=(cd s);
};

ComplexGrid operator+(ComplexGrid a, const ComplexGrid& b);
ComplexGrid operator-(ComplexGrid a, const ComplexGrid& b);
ComplexGrid operator*(cd s, ComplexGrid g);

void require_same_spec(const GridSpec& a, const GridSpec& b);

/// Periodic bilinear interpolation of the sampled grid at an arbitrary point.
cd bilinear(const ComplexGrid& g, cd z);

/// One retained sample of a disk restriction, with its lattice coordinates.
struct GridSample {
    int j, k;
    cd z;
    cd value;
};

/// Samples with |z| <= R. R may not exceed the support radius: the collar
/// is excluded from every norm measurement. R = 0 yields the sample nearest
/// the origin.
std::vector<GridSample> restrict_to_disk(const ComplexGrid& g, double R);

/// Area-weighted L2 norm over |z| <= R.
double norm_l2_disk(const ComplexGrid& g, double R);
double sup_abs_disk(const ComplexGrid& g, double R);

// Flat binary container: header (magic "BELT", version u32, n u32, L f64,
// rho f64), payload n^2 complex samples as little-endian f64 (re, im) pairs,
// row-major.
void write_grid(const ComplexGrid& g, const std::string& path);
ComplexGrid read_grid(const std::string& path);
void write_grid(const ComplexGrid& g, std::ostream& out);
ComplexGrid read_grid(std::istream& in);

/// CSV export for plotting: j,k,Re z,Im z,Re g,Im g.
void write_grid_csv(const ComplexGrid& g, const std::string& path);

}  // namespace beltrami
