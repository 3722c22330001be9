#include "beltrami/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "beltrami/rng.hpp"

namespace beltrami {

namespace {

bool is_power_of_two(int n) {
    return n > 0 && std::has_single_bit(static_cast<unsigned>(n));
}

}  // namespace

void GridSpec::validate() const {
    if (!is_power_of_two(n) || n < 16)
        throw SpecError("grid n must be a power of two >= 16, got " +
                        std::to_string(n));
    if (!(half_width > 0.0))
        throw SpecError("grid half_width must be positive");
    if (!(support_radius > 0.0) || support_radius > half_width / 2.0 + 1e-12)
        throw SpecError("support_radius must satisfy 0 < rho <= L/2");
}

bool GridSpec::valid() const noexcept {
    return is_power_of_two(n) && n >= 16 && half_width > 0.0 &&
           support_radius > 0.0 && support_radius <= half_width / 2.0 + 1e-12;
}

ComplexGrid ComplexGrid::from_function(const GridSpec& s,
                                       const std::function<cd(cd)>& f) {
    ComplexGrid g(s);
    for (int j = 0; j < s.n; ++j)
        for (int k = 0; k < s.n; ++k) g.at(j, k) = f(s.point(j, k));
    return g;
}

cd ComplexGrid::mean() const {
    cd acc{};
    for (const cd& v : values) acc += v;
    return acc / static_cast<double>(values.size());
}

double ComplexGrid::norm_l2() const {
    double acc = 0.0;
    for (const cd& v : values) acc += std::norm(v);
    return std::sqrt(acc) * spec.step();
}

double ComplexGrid::sup_abs() const {
    double m = 0.0;
    for (const cd& v : values) m = std::max(m, std::abs(v));
    return m;
}

bool ComplexGrid::all_finite() const {
    for (const cd& v : values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

void require_same_spec(const GridSpec& a, const GridSpec& b) {
    if (!(a == b)) throw SpecError("grid spec mismatch between operands");
}

ComplexGrid& ComplexGrid::operator+=(const ComplexGrid& o) {
    require_same_spec(spec, o.spec);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
    return *this;
}

ComplexGrid& ComplexGrid::operator-=(const ComplexGrid& o) {
    require_same_spec(spec, o.spec);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
    return *this;
}

ComplexGrid& ComplexGrid::operator*=(cd s) {
    for (cd& v : values) v *= s;
    return *this;
}

ComplexGrid operator+(ComplexGrid a, const ComplexGrid& b) { return a += b; }
ComplexGrid operator-(ComplexGrid a, const ComplexGrid& b) { return a -= b; }
ComplexGrid operator*(cd s, ComplexGrid g) { return g *= s; }

cd bilinear(const ComplexGrid& g, cd z) {
    const GridSpec& s = g.spec;
    const double h = s.step();
    double u = (z.real() + s.half_width) / h;
    double v = (z.imag() + s.half_width) / h;
    double fu = std::floor(u), fv = std::floor(v);
    double du = u - fu, dv = v - fv;
    auto wrap = [&](long long m) {
        long long r = m % s.n;
        return static_cast<int>(r < 0 ? r + s.n : r);
    };
    int k0 = wrap(static_cast<long long>(fu)), k1 = wrap(static_cast<long long>(fu) + 1);
    int j0 = wrap(static_cast<long long>(fv)), j1 = wrap(static_cast<long long>(fv) + 1);
    return (1 - du) * (1 - dv) * g.at(j0, k0) + du * (1 - dv) * g.at(j0, k1) +
           (1 - du) * dv * g.at(j1, k0) + du * dv * g.at(j1, k1);
}

std::vector<GridSample> restrict_to_disk(const ComplexGrid& g, double R) {
    const GridSpec& s = g.spec;
    if (R > s.support_radius + 1e-12)
        throw SpecError("restriction radius exceeds support radius");
    std::vector<GridSample> out;
    double best = std::numeric_limits<double>::infinity();
    GridSample nearest{};
    for (int j = 0; j < s.n; ++j) {
        for (int k = 0; k < s.n; ++k) {
            cd z = s.point(j, k);
            double r = std::abs(z);
            if (r <= R) out.push_back({j, k, z, g.at(j, k)});
            if (r < best) {
                best = r;
                nearest = {j, k, z, g.at(j, k)};
            }
        }
    }
    if (out.empty()) out.push_back(nearest);
    return out;
}

double norm_l2_disk(const ComplexGrid& g, double R) {
    const GridSpec& s = g.spec;
    double acc = 0.0;
    for (int j = 0; j < s.n; ++j)
        for (int k = 0; k < s.n; ++k)
            if (std::abs(s.point(j, k)) <= R) acc += std::norm(g.at(j, k));
    return std::sqrt(acc) * s.step();
}

double sup_abs_disk(const ComplexGrid& g, double R) {
    const GridSpec& s = g.spec;
    double m = 0.0;
    for (int j = 0; j < s.n; ++j)
        for (int k = 0; k < s.n; ++k)
            if (std::abs(s.point(j, k)) <= R)
                m = std::max(m, std::abs(g.at(j, k)));
    return m;
}

namespace {

constexpr char kMagic[4] = {'B', 'E', 'L', 'T'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(buf, buf + sizeof(T));
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
    unsigned char buf[sizeof(T)];
    in.read(reinterpret_cast<char*>(buf), sizeof(T));
    if (!in) throw Error("truncated grid container");
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(buf, buf + sizeof(T));
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}

}  // namespace

void write_grid(const ComplexGrid& g, std::ostream& out) {
    out.write(kMagic, 4);
    put_le<std::uint32_t>(out, kVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.spec.n));
    put_le<double>(out, g.spec.half_width);
    put_le<double>(out, g.spec.support_radius);
    for (const cd& v : g.values) {
        put_le<double>(out, v.real());
        put_le<double>(out, v.imag());
    }
}

ComplexGrid read_grid(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw Error("not a BELT grid container");
    auto version = get_le<std::uint32_t>(in);
    if (version != kVersion)
        throw Error("unsupported grid container version " +
                    std::to_string(version));
    GridSpec spec;
    spec.n = static_cast<int>(get_le<std::uint32_t>(in));
    spec.half_width = get_le<double>(in);
    spec.support_radius = get_le<double>(in);
    spec.validate();
    ComplexGrid g(spec);
    for (cd& v : g.values) {
        double re = get_le<double>(in);
        double im = get_le<double>(in);
        v = {re, im};
    }
    return g;
}

void write_grid(const ComplexGrid& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    write_grid(g, out);
}

ComplexGrid read_grid(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    return read_grid(in);
}

void write_grid_csv(const ComplexGrid& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << "j,k,re_z,im_z,re_g,im_g\n";
    out.precision(17);
    for (int j = 0; j < g.spec.n; ++j) {
        for (int k = 0; k < g.spec.n; ++k) {
            cd z = g.spec.point(j, k);
            cd v = g.at(j, k);
            out << j << ',' << k << ',' << z.real() << ',' << z.imag() << ','
                << v.real() << ',' << v.imag() << '\n';
        }
    }
}

double Rng::log_uniform(double lo, double hi) {
    return lo * std::exp(uniform() * std::log(hi / lo));
}

cd Rng::unit_phase() {
    double t = uniform() * 2.0 * M_PI;
    return {std::cos(t), std::sin(t)};
}

cd Rng::in_disk(double radius) {
    return radius * std::sqrt(uniform()) * unit_phase();
}

cd Rng::in_square(double half_width) {
    return {uniform(-half_width, half_width), uniform(-half_width, half_width)};
}

cd Rng::in_annulus(double r_lo, double r_hi) {
    double r2 = uniform(r_lo * r_lo, r_hi * r_hi);
    return std::sqrt(r2) * unit_phase();
}

}  // namespace beltrami
