#include "beltrami/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace beltrami {

namespace {

// FFTW's planner is not thread-safe; plan execution on caller buffers is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

struct SpectralOperators::Impl {
    GridSpec spec;
    std::vector<cd> mult_dz, mult_dzbar, mult_cauchy, mult_beurling;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    double mean_warn_tol = 1e-6;

    explicit Impl(const GridSpec& s) : spec(s) {
        spec.validate();
        build_multipliers();
        std::lock_guard<std::mutex> lock(planner_mutex());
        std::vector<cd> probe(spec.size());
        auto* p = reinterpret_cast<fftw_complex*>(probe.data());
        // FFTW_UNALIGNED lets the plans run on any caller-owned buffer.
        forward = fftw_plan_dft_2d(spec.n, spec.n, p, p, FFTW_FORWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
        backward = fftw_plan_dft_2d(spec.n, spec.n, p, p, FFTW_BACKWARD,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!forward || !backward) throw Error("fftw plan creation failed");
    }

    ~Impl() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
    }

    void build_multipliers() {
        const int n = spec.n;
        const double L = spec.half_width;
        mult_dz.resize(spec.size());
        mult_dzbar.resize(spec.size());
        mult_cauchy.resize(spec.size());
        mult_beurling.resize(spec.size());
        for (int j = 0; j < n; ++j) {
            int mj = j < n / 2 ? j : j - n;  // Nyquist lands on the negative side
            for (int k = 0; k < n; ++k) {
                int mk = k < n / 2 ? k : k - n;
                cd zeta(M_PI * mk / L, M_PI * mj / L);
                std::size_t i = spec.index(j, k);
                if (mj == 0 && mk == 0) {
                    mult_dz[i] = mult_dzbar[i] = 0.0;
                    mult_cauchy[i] = mult_beurling[i] = 0.0;  // mean-zero convention
                    continue;
                }
                mult_dz[i] = cd(0.0, 0.5) * std::conj(zeta);
                mult_dzbar[i] = cd(0.0, 0.5) * zeta;
                mult_cauchy[i] = cd(0.0, -2.0) / zeta;
                mult_beurling[i] = std::conj(zeta) / zeta;
            }
        }
    }

    ComplexGrid apply(const ComplexGrid& g, const std::vector<cd>& mult,
                      double* mean_out) const {
        require_same_spec(g.spec, spec);
        ComplexGrid out = g;
        auto* buf = reinterpret_cast<fftw_complex*>(out.values.data());
        fftw_execute_dft(forward, buf, buf);
        if (mean_out)
            *mean_out = std::abs(out.values[0]) / static_cast<double>(spec.size());
        const double inv_n2 = 1.0 / static_cast<double>(spec.size());
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] *= mult[i] * inv_n2;
        fftw_execute_dft(backward, buf, buf);
        return out;
    }
};

SpectralOperators::SpectralOperators(const GridSpec& spec)
    : impl_(std::make_unique<Impl>(spec)) {}
SpectralOperators::~SpectralOperators() = default;
SpectralOperators::SpectralOperators(SpectralOperators&&) noexcept = default;
SpectralOperators& SpectralOperators::operator=(SpectralOperators&&) noexcept =
    default;

const GridSpec& SpectralOperators::spec() const { return impl_->spec; }

ComplexGrid SpectralOperators::d_z(const ComplexGrid& g) const {
    return impl_->apply(g, impl_->mult_dz, nullptr);
}

ComplexGrid SpectralOperators::d_zbar(const ComplexGrid& g) const {
    return impl_->apply(g, impl_->mult_dzbar, nullptr);
}

ComplexGrid SpectralOperators::cauchy(const ComplexGrid& g,
                                      CauchyStats* stats) const {
    double mean_abs = 0.0;
    ComplexGrid out = impl_->apply(g, impl_->mult_cauchy, &mean_abs);
    if (stats) {
        stats->discarded_mean_abs = mean_abs;
        stats->warned = mean_abs > impl_->mean_warn_tol;
    }
    return out;
}

ComplexGrid SpectralOperators::beurling(const ComplexGrid& g) const {
    return impl_->apply(g, impl_->mult_beurling, nullptr);
}

const std::vector<cd>& SpectralOperators::dz_multiplier() const {
    return impl_->mult_dz;
}
const std::vector<cd>& SpectralOperators::dzbar_multiplier() const {
    return impl_->mult_dzbar;
}
const std::vector<cd>& SpectralOperators::cauchy_multiplier() const {
    return impl_->mult_cauchy;
}
const std::vector<cd>& SpectralOperators::beurling_multiplier() const {
    return impl_->mult_beurling;
}

double SpectralOperators::mean_warn_tolerance() const {
    return impl_->mean_warn_tol;
}
void SpectralOperators::set_mean_warn_tolerance(double tol) {
    impl_->mean_warn_tol = tol;
}

SpectralOperators make_operators(const GridSpec& spec) {
    return SpectralOperators(spec);
}

ComplexGrid d_z(const ComplexGrid& g, const SpectralOperators& ops) {
    return ops.d_z(g);
}
ComplexGrid d_zbar(const ComplexGrid& g, const SpectralOperators& ops) {
    return ops.d_zbar(g);
}
ComplexGrid cauchy(const ComplexGrid& g, const SpectralOperators& ops,
                   CauchyStats* stats) {
    return ops.cauchy(g, stats);
}
ComplexGrid beurling(const ComplexGrid& g, const SpectralOperators& ops) {
    return ops.beurling(g);
}

}  // namespace beltrami
