#include "afc/analytic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace afc {

namespace {
constexpr double kLn2 = std::numbers::ln2;
constexpr double kPi = std::numbers::pi;
}

void CombParams::validate() const {
    if (!(d >= 0)) throw std::invalid_argument("comb params: d must be >= 0");
    if (!(gamma_khz > 0)) throw std::invalid_argument("comb params: gamma must be positive");
    if (!(gamma_khz * 1e-3 < delta_mhz))
        throw std::invalid_argument("comb params: gamma must be below delta (finesse > 1)");
}

double effective_depth(const CombParams& p) {
    p.validate();
    return p.d / p.finesse();
}

double transmission(double d_tilde) {
    if (d_tilde < 0) throw std::invalid_argument("transmission: d_tilde must be >= 0");
    return std::exp(-d_tilde);
}

double dephasing_factor(double finesse) {
    if (!(finesse > 0)) throw std::invalid_argument("dephasing_factor: finesse must be positive");
    return std::exp(-kPi * kPi / (4.0 * kLn2 * finesse * finesse));
}

double echo_efficiency_effective(double d_tilde, double finesse) {
    if (d_tilde < 0) throw std::invalid_argument("echo efficiency: d_tilde must be >= 0");
    return d_tilde * d_tilde * std::exp(-d_tilde) * dephasing_factor(finesse);
}

double echo_efficiency(const CombParams& p) {
    return echo_efficiency_effective(effective_depth(p), p.finesse());
}

double amplitude_decay(double t_us, double gamma_khz) {
    if (t_us < 0) throw std::invalid_argument("amplitude_decay: t must be >= 0");
    if (!(gamma_khz > 0)) throw std::invalid_argument("amplitude_decay: gamma must be positive");
    // angular width of one Gaussian peak, rad/us
    const double gtilde = 2.0 * kPi * gamma_khz * 1e-3 / std::sqrt(8.0 * kLn2);
    const double x = t_us * gtilde;
    return std::exp(-0.5 * x * x);
}

Optimum optimal_depth(double finesse) {
    if (!(finesse > 1)) throw std::invalid_argument("optimal_depth: finesse must exceed 1");
    // The dephasing factor does not depend on d_tilde, so the maximizer of
    // d~^2 exp(-d~) is d~ = 2 for every finesse.
    return Optimum{2.0, 4.0 * std::exp(-2.0) * dephasing_factor(finesse)};
}

}  // namespace afc
