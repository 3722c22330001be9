#include "beltrami/png.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace beltrami {

namespace {

void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void write_chunk(std::ofstream& f, const char type[4],
                 const std::vector<std::uint8_t>& data) {
    std::vector<std::uint8_t> head;
    put_u32_be(head, static_cast<std::uint32_t>(data.size()));
    f.write(reinterpret_cast<const char*>(head.data()), 4);
    f.write(type, 4);
    if (!data.empty())
        f.write(reinterpret_cast<const char*>(data.data()),
                static_cast<std::streamsize>(data.size()));
    std::uint32_t crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(type), 4);
    if (!data.empty())
        crc = crc32(crc, data.data(), static_cast<uInt>(data.size()));
    std::vector<std::uint8_t> tail;
    put_u32_be(tail, crc);
    f.write(reinterpret_cast<const char*>(tail.data()), 4);
}

}  // namespace

void write_png_rgb(const std::string& path, int width, int height,
                   const std::vector<std::uint8_t>& rgb) {
    if (rgb.size() != static_cast<std::size_t>(width) * height * 3)
        throw Error("pixel buffer size mismatch");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path + " for writing");
    static const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    f.write(reinterpret_cast<const char*>(sig), 8);

    std::vector<std::uint8_t> ihdr;
    put_u32_be(ihdr, static_cast<std::uint32_t>(width));
    put_u32_be(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(2);  // color type RGB
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    write_chunk(f, "IHDR", ihdr);

    // Filter byte 0 per scanline.
    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(height) * (width * 3 + 1));
    for (int y = 0; y < height; ++y) {
        raw.push_back(0);
        const std::uint8_t* row = rgb.data() + static_cast<std::size_t>(y) * width * 3;
        raw.insert(raw.end(), row, row + width * 3);
    }
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> deflated(bound);
    if (compress2(deflated.data(), &bound, raw.data(),
                  static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw Error("zlib compression failed");
    deflated.resize(bound);
    write_chunk(f, "IDAT", deflated);
    write_chunk(f, "IEND", {});
}

namespace {

// Blue-white-red diverging ramp on [-1, 1].
void diverging_color(double x, std::uint8_t* px) {
    x = std::clamp(x, -1.0, 1.0);
    double r = x > 0 ? 1.0 : 1.0 + x;
    double b = x < 0 ? 1.0 : 1.0 - x;
    double g = 1.0 - std::abs(x);
    px[0] = static_cast<std::uint8_t>(std::lround(255 * r));
    px[1] = static_cast<std::uint8_t>(std::lround(255 * g));
    px[2] = static_cast<std::uint8_t>(std::lround(255 * b));
}

}  // namespace

void render_heat_map(const GridSpec& spec, const std::vector<double>& values,
                     const std::string& path) {
    if (values.size() != spec.size()) throw Error("value buffer size mismatch");
    double lo = 0.0, hi = 0.0;
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double scale = std::max(std::abs(lo), std::abs(hi));
    if (scale == 0.0) scale = 1.0;
    std::vector<std::uint8_t> rgb(spec.size() * 3);
    for (int j = 0; j < spec.n; ++j) {
        // Flip so increasing Im z points up in the image.
        int row = spec.n - 1 - j;
        for (int k = 0; k < spec.n; ++k) {
            double v = values[spec.index(j, k)] / scale;
            diverging_color(v, &rgb[(static_cast<std::size_t>(row) * spec.n + k) * 3]);
        }
    }
    write_png_rgb(path, spec.n, spec.n, rgb);
}

void render_heat_map(const ComplexGrid& g, HeatComponent component,
                     const std::string& path) {
    std::vector<double> vals(g.spec.size());
    for (std::size_t i = 0; i < vals.size(); ++i) {
        switch (component) {
            case HeatComponent::Abs: vals[i] = std::abs(g.values[i]); break;
            case HeatComponent::Real: vals[i] = g.values[i].real(); break;
            case HeatComponent::Imag: vals[i] = g.values[i].imag(); break;
        }
    }
    render_heat_map(g.spec, vals, path);
}

void render_deformed_grid(const ComplexGrid& phi_values, int lines, int pixels,
                          const std::string& path) {
    const GridSpec& spec = phi_values.spec;
    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(pixels) * pixels * 3,
                                  255);
    // Viewport: image of the support disk fits with a small margin.
    double extent = 0.0;
    for (int j = 0; j < spec.n; ++j)
        for (int k = 0; k < spec.n; ++k) {
            cd z = spec.point(j, k);
            if (std::abs(z) <= spec.support_radius * 1.2) {
                cd v = phi_values.at(j, k);
                extent = std::max({extent, std::abs(v.real()), std::abs(v.imag())});
            }
        }
    if (extent == 0.0) extent = 1.0;
    extent *= 1.05;

    auto to_px = [&](cd v) {
        int x = static_cast<int>(std::lround((v.real() / extent + 1.0) * 0.5 *
                                             (pixels - 1)));
        int y = static_cast<int>(std::lround((1.0 - v.imag() / extent) * 0.5 *
                                             (pixels - 1)));
        return std::pair<int, int>(x, y);
    };
    auto put = [&](int x, int y) {
        if (x < 0 || x >= pixels || y < 0 || y >= pixels) return;
        std::size_t i = (static_cast<std::size_t>(y) * pixels + x) * 3;
        rgb[i] = rgb[i + 1] = rgb[i + 2] = 32;
    };
    auto segment = [&](cd v0, cd v1) {
        auto [x0, y0] = to_px(v0);
        auto [x1, y1] = to_px(v1);
        int steps = std::max({std::abs(x1 - x0), std::abs(y1 - y0), 1});
        for (int s = 0; s <= steps; ++s) {
            double t = static_cast<double>(s) / steps;
            put(static_cast<int>(std::lround(x0 + t * (x1 - x0))),
                static_cast<int>(std::lround(y0 + t * (y1 - y0))));
        }
    };

    const double R = spec.support_radius * 1.2;
    const int samples = 16 * lines;
    for (int l = 0; l < lines; ++l) {
        double c = -R + 2.0 * R * l / (lines - 1);
        for (int s = 0; s + 1 <= samples; ++s) {
            double t0 = -R + 2.0 * R * s / samples;
            double t1 = -R + 2.0 * R * (s + 1) / samples;
            segment(bilinear(phi_values, cd(t0, c)), bilinear(phi_values, cd(t1, c)));
            segment(bilinear(phi_values, cd(c, t0)), bilinear(phi_values, cd(c, t1)));
        }
    }
    write_png_rgb(path, pixels, pixels, rgb);
}

}  // namespace beltrami
