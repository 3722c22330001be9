#include "beltrami/structure.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

namespace beltrami {

std::string profile_name(Profile p) {
    switch (p) {
        case Profile::Disk: return "disk";
        case Profile::Taper: return "taper";
        case Profile::Bump: return "bump";
    }
    return "?";
}

double profile_value(Profile p, cd z) {
    double r = std::abs(z);
    if (r >= 1.0) return 0.0;
    switch (p) {
        case Profile::Disk:
            return 1.0;
        case Profile::Taper: {
            if (r <= 0.9) return 1.0;
            // C^2 ramp 1 -> 0 over [0.9, 1].
            double x = (r - 0.9) / 0.1;
            return 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
        }
        case Profile::Bump:
            return std::exp(1.0 - 1.0 / (1.0 - r * r));
    }
    return 0.0;
}

WGradient StructureFunction::w_gradient(cd z, cd w, double h_scale) const {
    if (analytic_gradient) return analytic_gradient(z, w);
    return w_gradient_fd(*this, z, w, h_scale * std::max(1.0, std::abs(w)));
}

WGradient w_gradient_fd(const StructureFunction& H, cd z, cd w, double h_w) {
    if (!(h_w > 0.0)) throw Error("w_gradient_fd requires a positive step");
    if (!H.smooth_in_w_at_zero && std::abs(w) < 4.0 * h_w)
        throw Error("structure function " + H.id +
                    " is not differentiable near w = 0");
    cd du = (H.evaluate(z, w + h_w) - H.evaluate(z, w - h_w)) / (2.0 * h_w);
    cd dv = (H.evaluate(z, w + cd(0, h_w)) - H.evaluate(z, w - cd(0, h_w))) /
            (2.0 * h_w);
    return {0.5 * (du - cd(0, 1) * dv), 0.5 * (du + cd(0, 1) * dv)};
}

StructureFunction make_zero() {
    StructureFunction H;
    H.id = "zero";
    H.evaluate = [](cd, cd) { return cd{}; };
    H.analytic_gradient = [](cd, cd) { return WGradient{}; };
    H.k_bound = 0.0;
    H.k_profile = [](cd) { return 0.0; };
    H.holder_alpha = 1.0;
    H.support_radius = 1.0;
    H.tags = {true, true, true, true, true, "identically zero"};
    return H;
}

StructureFunction make_clin(cd mu0, Profile profile) {
    StructureFunction H;
    H.id = "clin:mu=" + format_complex(mu0) + ",profile=" + profile_name(profile);
    H.evaluate = [mu0, profile](cd z, cd w) {
        return mu0 * profile_value(profile, z) * w;
    };
    H.analytic_gradient = [mu0, profile](cd z, cd) {
        return WGradient{mu0 * profile_value(profile, z), 0.0};
    };
    H.k_bound = std::abs(mu0);
    H.k_profile = [mu0, profile](cd z) {
        return std::abs(mu0) * profile_value(profile, z);
    };
    if (profile != Profile::Disk) H.holder_alpha = 1.0;
    H.support_radius = 1.0;
    H.tags = {true, true, true, profile != Profile::Disk, true,
              "C-linear; uniqueness from linearity"};
    return H;
}

StructureFunction make_rlin(cd mu0, cd nu0, Profile profile) {
    StructureFunction H;
    H.id = "rlin:mu=" + format_complex(mu0) + ",nu=" + format_complex(nu0) +
           ",profile=" + profile_name(profile);
    H.evaluate = [mu0, nu0, profile](cd z, cd w) {
        double c = profile_value(profile, z);
        return c * (mu0 * w + nu0 * std::conj(w));
    };
    H.analytic_gradient = [mu0, nu0, profile](cd z, cd) {
        double c = profile_value(profile, z);
        return WGradient{c * mu0, c * nu0};
    };
    H.k_bound = std::abs(mu0) + std::abs(nu0);
    H.k_profile = [mu0, nu0, profile](cd z) {
        return (std::abs(mu0) + std::abs(nu0)) * profile_value(profile, z);
    };
    if (profile != Profile::Disk) H.holder_alpha = 1.0;
    H.support_radius = 1.0;
    H.tags = {false, true, true, profile != Profile::Disk, true,
              "R-linear; uniqueness from linearity"};
    return H;
}

StructureFunction make_radial(double k0) {
    if (!(k0 >= 0.0 && k0 < 1.0))
        throw ConfigError("radial member needs 0 <= k < 1");
    StructureFunction H;
    H.id = "radial:k=" + std::to_string(k0);
    H.evaluate = [k0](cd z, cd w) {
        double r = std::abs(z);
        if (r <= 0.0 || r >= 1.0) return cd{};
        return k0 * (z / std::conj(z)) * std::abs(w);
    };
    // |w| has Wirtinger derivatives (wbar, w)/(2|w|) away from w = 0.
    H.analytic_gradient = [k0](cd z, cd w) {
        double r = std::abs(z);
        double aw = std::abs(w);
        if (r <= 0.0 || r >= 1.0) return WGradient{};
        if (aw == 0.0)
            throw Error("radial member has no w-gradient at w = 0");
        cd phase = k0 * (z / std::conj(z));
        return WGradient{phase * std::conj(w) / (2.0 * aw),
                         phase * w / (2.0 * aw)};
    };
    H.k_bound = k0;
    H.k_profile = [k0](cd z) {
        double r = std::abs(z);
        return (r > 0.0 && r < 1.0) ? k0 : 0.0;
    };
    H.support_radius = 1.0;
    H.smooth_in_w_at_zero = false;
    H.tags = {false, false, true, false, true,
              "1-homogeneous in w; uniqueness from homogeneity"};
    return H;
}

StructureFunction make_smooth(double k0, double eps) {
    if (!(eps > 0.0)) throw ConfigError("smooth member needs eps > 0");
    StructureFunction H;
    {
        std::ostringstream os;
        os << "smooth:k=" << k0 << ",eps=" << eps;
        H.id = os.str();
    }
    auto bump = [](cd z) { return profile_value(Profile::Bump, z); };
    H.evaluate = [k0, eps, bump](cd z, cd w) {
        double b = bump(z);
        if (b == 0.0) return cd{};
        return k0 * b * w * w / std::sqrt(eps * eps + std::norm(w));
    };
    // With s = sqrt(eps^2 + |w|^2):
    //   dH/dw    = k0 b w (4 eps^2 + 3|w|^2) / (2 s^3)
    //   dH/dwbar = -k0 b w^3 / (2 s^3)
    // so |dH/dw| + |dH/dwbar| = 2 k0 b |w| / s <= 2 k0 b.
    H.analytic_gradient = [k0, eps, bump](cd z, cd w) {
        double b = bump(z);
        if (b == 0.0) return WGradient{};
        double s2 = eps * eps + std::norm(w);
        double s3 = s2 * std::sqrt(s2);
        cd dw = k0 * b * w * (4.0 * eps * eps + 3.0 * std::norm(w)) / (2.0 * s3);
        cd dwbar = -k0 * b * w * w * w / (2.0 * s3);
        return WGradient{dw, dwbar};
    };
    // Conservative symbolic budget; the sharp constant 2*k0*sup|b| is
    // certified empirically by verify_H1.
    H.k_bound = 3.0 * k0;
    H.k_profile = [k0, bump](cd z) { return 2.0 * k0 * bump(z); };
    H.holder_alpha = 1.0;
    H.support_radius = 1.0;
    H.tags = {false, false, false, true, true,
              "smooth compact support; tail k = 0 under the ellipticity "
              "threshold"};
    return H;
}

std::vector<StructureFunction> catalog() {
    return {make_zero(), make_clin(cd(0.3, 0.0)), make_rlin(cd(0.2, 0.0), cd(0.1, 0.0)),
            make_radial(1.0 / 3.0), make_smooth(0.3, 0.5)};
}

cd parse_complex(const std::string& text) {
    // Accepts "0.3", "-1.5i", "0.2+0.1i", "1-2i".
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw ConfigError("empty complex literal");
    std::size_t split = std::string::npos;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E')
            split = i;  // last sign not part of an exponent
    }
    auto parse_part = [](const std::string& part, bool expect_imag) -> double {
        std::string body = part;
        if (expect_imag) {
            if (body.empty() || body.back() != 'i')
                throw ConfigError("bad complex literal part: " + part);
            body.pop_back();
            if (body.empty() || body == "+") body += "1";
            if (body == "-") body = "-1";
        }
        try {
            std::size_t used = 0;
            double v = std::stod(body, &used);
            if (used != body.size())
                throw ConfigError("bad complex literal part: " + part);
            return v;
        } catch (const std::logic_error&) {
            throw ConfigError("bad complex literal part: " + part);
        }
    };
    if (s.back() == 'i') {
        if (split == std::string::npos) return {0.0, parse_part(s, true)};
        return {parse_part(s.substr(0, split), false),
                parse_part(s.substr(split), true)};
    }
    if (split != std::string::npos)
        throw ConfigError("bad complex literal: " + text);
    return {parse_part(s, false), 0.0};
}

std::string format_complex(cd v) {
    std::ostringstream os;
    os << v.real();
    if (v.imag() >= 0.0) os << "+";
    os << v.imag() << "i";
    return os.str();
}

namespace {

double to_double(const std::string& text) {
    try {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size()) throw ConfigError("bad number: " + text);
        return v;
    } catch (const std::logic_error&) {
        throw ConfigError("bad number: " + text);
    }
}

std::map<std::string, std::string> parse_kv(const std::string& args) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(args);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key=value in structure id, got: " + item);
        kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return kv;
}

Profile parse_profile(const std::map<std::string, std::string>& kv) {
    auto it = kv.find("profile");
    if (it == kv.end()) return Profile::Disk;
    if (it->second == "disk") return Profile::Disk;
    if (it->second == "taper") return Profile::Taper;
    if (it->second == "bump") return Profile::Bump;
    throw ConfigError("unknown profile: " + it->second);
}

}  // namespace

StructureFunction parse_structure(const std::string& id) {
    auto colon = id.find(':');
    std::string name = id.substr(0, colon);
    std::string args = colon == std::string::npos ? "" : id.substr(colon + 1);
    auto kv = parse_kv(args);
    auto need = [&](const char* key) -> std::string {
        auto it = kv.find(key);
        if (it == kv.end())
            throw ConfigError("structure id '" + id + "' is missing " + key);
        return it->second;
    };
    if (name == "zero") return make_zero();
    if (name == "clin") return make_clin(parse_complex(need("mu")), parse_profile(kv));
    if (name == "rlin")
        return make_rlin(parse_complex(need("mu")), parse_complex(need("nu")),
                         parse_profile(kv));
    if (name == "radial") return make_radial(to_double(need("k")));
    if (name == "smooth")
        return make_smooth(to_double(need("k")), to_double(need("eps")));
    throw ConfigError("unknown structure function: " + name);
}

EllipticityReport verify_H1(const StructureFunction& H, Rng& rng, long trials) {
    if (trials < 1) throw Error("verify_H1 needs at least one trial");
    EllipticityReport rep;
    rep.trials = trials;
    const double probe = H.support_radius * 1.25;
    for (long i = 0; i < trials; ++i) {
        cd z = rng.in_square(probe);
        double scale = rng.log_uniform(1e-3, 1e3);
        cd w1 = scale * rng.unit_phase();
        cd w2 = w1 + scale * rng.uniform(1e-6, 1.0) * rng.unit_phase();
        double dw = std::abs(w1 - w2);
        if (dw == 0.0) continue;
        double q = std::abs(H.evaluate(z, w1) - H.evaluate(z, w2)) / dw;
        if (q > rep.measured_k) {
            rep.measured_k = q;
            rep.worst = {z, w1, w2, q};
        }
        // Normalization H(z, 0) = 0 makes |H(z,w)|/|w| a quotient too.
        double q0 = std::abs(H.evaluate(z, w1)) / std::abs(w1);
        if (q0 > rep.measured_k) {
            rep.measured_k = q0;
            rep.worst = {z, w1, cd{}, q0};
        }
        if (H.holder_alpha) {
            cd z2 = rng.in_square(probe);
            double dz = std::abs(z - z2);
            if (dz > 1e-12) {
                double qa = std::abs(H.evaluate(z, w1) - H.evaluate(z2, w1)) /
                            (std::pow(dz, *H.holder_alpha) * std::abs(w1));
                rep.measured_alpha_constant =
                    std::max(rep.measured_alpha_constant, qa);
            }
        }
    }
    // The built-ins are compactly supported, so the tail is exactly the
    // profile beyond the support radius; sample a ring to be thorough.
    for (int i = 0; i < 256; ++i) {
        cd z = rng.in_annulus(H.support_radius, 4.0 * H.support_radius);
        rep.tail_k = std::max(rep.tail_k, H.k_profile ? H.k_profile(z) : 0.0);
    }
    rep.uniqueness_threshold_ok = rep.tail_k < uniqueness_tail_threshold();
    rep.k_bound_violated = rep.measured_k > H.k_bound * (1.0 + 1e-9) + 1e-15;
    return rep;
}

}  // namespace beltrami
