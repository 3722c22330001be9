#pragma once

#include <cmath>

#include "beltrami/rng.hpp"
#include "beltrami/spectral.hpp"

namespace beltrami::testing {

inline GridSpec small_spec(int n = 64, double L = 4.0, double rho = 2.0) {
    return GridSpec{n, L, rho};
}

/// Random band-limited periodic field: modes |m| <= band with decaying
/// random coefficients. Smooth by construction.
inline ComplexGrid random_smooth(const GridSpec& spec, Rng& rng, int band = 6,
                                 bool zero_mean = true) {
    struct Mode {
        int mx, my;
        cd c;
    };
    std::vector<Mode> modes;
    for (int my = -band; my <= band; ++my)
        for (int mx = -band; mx <= band; ++mx) {
            if (zero_mean && mx == 0 && my == 0) continue;
            double decay = std::exp(-0.3 * (mx * mx + my * my));
            modes.push_back({mx, my,
                             decay * cd(rng.uniform(-1, 1), rng.uniform(-1, 1))});
        }
    const double L = spec.half_width;
    return ComplexGrid::from_function(spec, [&](cd z) {
        cd acc{};
        for (const Mode& m : modes)
            acc += m.c * std::exp(cd(0, M_PI / L) *
                                  (m.mx * z.real() + m.my * z.imag()));
        return acc;
    });
}

/// Sup-norm relative error over the whole grid.
inline double rel_sup_error(const ComplexGrid& got, const ComplexGrid& want) {
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < got.values.size(); ++i) {
        err = std::max(err, std::abs(got.values[i] - want.values[i]));
        scale = std::max(scale, std::abs(want.values[i]));
    }
    return scale > 0 ? err / scale : err;
}

inline double rel_l2_error(const ComplexGrid& got, const ComplexGrid& want) {
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < got.values.size(); ++i) {
        err += std::norm(got.values[i] - want.values[i]);
        scale += std::norm(want.values[i]);
    }
    return scale > 0 ? std::sqrt(err / scale) : std::sqrt(err);
}

}  // namespace beltrami::testing
