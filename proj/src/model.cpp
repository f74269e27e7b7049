#include "thinfilm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace thinfilm {

void ModelParams::validate() const {
    if (!(alpha > 1.0)) {
        throw ConfigError("ModelParams: alpha must exceed 1, got " + std::to_string(alpha));
    }
    if (!(sigma >= 0.0)) {
        throw ConfigError("ModelParams: sigma must be non-negative, got " + std::to_string(sigma));
    }
}

double SteadyStateParams::margin() const {
    return h_bar - std::hypot(kappa_m1, kappa_1);
}

void SteadyStateParams::validate() const {
    if (!(margin() > 0.0)) {
        throw ConfigError("SteadyStateParams: film touches zero, h_bar - |kappa| = " +
                          std::to_string(margin()));
    }
}

double psi(double s, double alpha) {
    if (s == 0.0) return 0.0;
    return std::pow(std::abs(s), alpha - 1.0) * s;
}

double psi_sigma(double s, const ModelParams& p) {
    if (p.sigma == 0.0) return psi(s, p.alpha);
    return std::pow(s * s + p.sigma * p.sigma, 0.5 * (p.alpha - 1.0)) * s;
}

PeriodicField w_field(const PeriodicField& h) {
    auto coeffs = h.grid().forward(h.values());
    const int nyq = h.grid().max_mode();
    // Coefficients below the transform's roundoff floor are noise; the
    // n(1-n²) multiplier would amplify them by up to O(N³), so drop them
    // before differentiating (keeps steady films exact equilibria).
    double peak = 0.0;
    for (const auto& c : coeffs) peak = std::max(peak, std::abs(c));
    const double floor = 32.0 * std::numeric_limits<double>::epsilon() * peak;
    for (int n = 0; n <= nyq; ++n) {
        auto& c = coeffs[static_cast<size_t>(n)];
        if (std::abs(c) < floor) {
            c = 0.0;
            continue;
        }
        const double dn = n;
        c *= std::complex<double>(0.0, dn * (1.0 - dn * dn));
    }
    coeffs[static_cast<size_t>(nyq)] = 0.0;  // odd operator
    return PeriodicField(h.grid_ptr(), h.grid().backward(coeffs));
}

namespace {

void require_positive(const PeriodicField& h, const char* who) {
    if (!(h.min() > 0.0)) {
        throw DegeneracyError(std::string(who) + ": field is not strictly positive (min = " +
                              std::to_string(h.min()) + ")");
    }
}

}  // namespace

PeriodicField flux(const PeriodicField& h, const ModelParams& p) {
    p.validate();
    require_positive(h, "flux");
    PeriodicField w = w_field(h);
    std::vector<double> values(static_cast<size_t>(h.size()));
    for (int j = 0; j < h.size(); ++j) {
        values[static_cast<size_t>(j)] =
            std::pow(h[j], p.alpha + 2.0) * psi_sigma(w[j], p);
    }
    return PeriodicField(h.grid_ptr(), std::move(values));
}

PeriodicField rhs(const PeriodicField& h, const ModelParams& p) {
    auto coeffs = h.grid().forward(flux(h, p).values());
    const int nyq = h.grid().max_mode();
    const int cutoff = h.grid().dealias_cutoff();
    for (int n = 0; n <= nyq; ++n) {
        if (n > cutoff) {
            coeffs[static_cast<size_t>(n)] = 0.0;
        } else {
            // -∂_θ: multiply by -i n.
            coeffs[static_cast<size_t>(n)] *= std::complex<double>(0.0, -static_cast<double>(n));
        }
    }
    coeffs[static_cast<size_t>(nyq)] = 0.0;
    return PeriodicField(h.grid_ptr(), h.grid().backward(coeffs));
}

PeriodicField steady_state(const SteadyStateParams& p, const GridPtr& grid) {
    p.validate();
    return sample(grid, [&](double theta) {
        return p.h_bar + p.kappa_m1 * std::cos(theta) + p.kappa_1 * std::sin(theta);
    });
}

std::pair<double, double> kappa_from_modes(std::complex<double> h_m1,
                                           std::complex<double> h_1) {
    const double scale = std::max(1.0, std::abs(h_1));
    if (std::abs(h_m1 - std::conj(h_1)) > 1e-10 * scale) {
        throw std::invalid_argument("kappa_from_modes: modes are not a conjugate pair");
    }
    const std::complex<double> i(0.0, 1.0);
    const double kappa_m1 = (h_m1 + h_1).real();
    const double kappa_1 = (i * (h_1 - h_m1)).real();
    return {kappa_m1, kappa_1};
}

PeriodicField circle_embed(const SteadyStateParams& p, double epsilon,
                           const GridPtr& grid) {
    if (!(epsilon > 0.0 && epsilon < 0.5)) {
        throw ConfigError("circle_embed: epsilon must lie in (0, 1/2)");
    }
    const double kappa = std::hypot(p.kappa_m1, p.kappa_1);
    if (!(kappa < p.h_bar)) {
        throw ConfigError("circle_embed: need sqrt(kappa_m1^2 + kappa_1^2) < h_bar");
    }
    const double radius = 1.0 + epsilon * p.h_bar;
    const double d = epsilon * kappa;
    const double phase = (kappa == 0.0) ? 0.0 : std::atan2(p.kappa_1, p.kappa_m1);
    return sample(grid, [&](double theta) {
        const double c = std::cos(theta - phase);
        return d * c + std::sqrt(d * d * c * c + radius * radius - d * d);
    });
}

}  // namespace thinfilm
