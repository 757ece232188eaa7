#include "latfront/dispersion.hpp"

#include <cmath>
#include <sstream>

#include "latfront/errors.hpp"

namespace latfront {

namespace {

// First-order condition g(mu) = mu(e^mu - e^-mu) - (e^mu + e^-mu - 2 + lambda).
// g is strictly increasing with g(0+) = -lambda < 0, so its root is the
// dispersion minimizer.
double foc(double lambda_least, double mu) {
    return mu * (std::exp(mu) - std::exp(-mu)) -
           (std::exp(mu) + std::exp(-mu) - 2.0 + lambda_least);
}

double foc_derivative(double mu) {
    return mu * (std::exp(mu) + std::exp(-mu));
}

} // namespace

double wave_speed_curve(double lambda_least, double mu) {
    if (!(mu > 0.0)) throw ConfigError("wave_speed_curve: mu must be > 0");
    return (std::exp(mu) + std::exp(-mu) - 2.0 + lambda_least) / mu;
}

SpeedReport critical_speed(double lambda_least, double tol) {
    if (!(lambda_least > 0.0)) {
        std::ostringstream os;
        os << "critical_speed: lambda_least = " << lambda_least
           << " must be positive";
        throw HypothesisError(os.str());
    }
    double lo = 1e-4;
    double hi = 20.0;
    while (foc(lambda_least, lo) > 0.0) lo *= 0.5;
    while (foc(lambda_least, hi) < 0.0) hi *= 2.0;

    // Bisection to a safe Newton basin, then Newton polish.
    for (int i = 0; i < 80 && hi - lo > 1e-6; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (foc(lambda_least, mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    double mu = 0.5 * (lo + hi);
    for (int i = 0; i < 60; ++i) {
        const double g = foc(lambda_least, mu);
        const double step = g / foc_derivative(mu);
        mu -= step;
        if (std::abs(g) < 0.1 * tol && std::abs(step) < 1e-15 + 1e-12 * mu) break;
    }

    SpeedReport rep;
    rep.lambda_least = lambda_least;
    rep.mu_star = mu;
    rep.c0 = wave_speed_curve(lambda_least, mu);
    rep.foc_residual = std::abs(foc(lambda_least, mu));
    rep.bracket_lo = lo;
    rep.bracket_hi = hi;
    rep.tol = tol;
    return rep;
}

DecayPair decay_rates_for_speed(double lambda_least, double gamma, double tol) {
    const SpeedReport crit = critical_speed(lambda_least, tol);
    if (!(gamma > crit.c0 + tol)) {
        std::ostringstream os;
        os << "decay_rates_for_speed: no supercritical root, gamma = " << gamma
           << " <= c0 = " << crit.c0;
        throw AnsatzError(os.str());
    }

    auto curve = [lambda_least](double mu) {
        return wave_speed_curve(lambda_least, mu);
    };
    // d/dmu of the curve, used for the Newton polish on both branches.
    auto curve_slope = [lambda_least](double mu) {
        const double em = std::exp(mu), emm = std::exp(-mu);
        return ((em - emm) * mu - (em + emm - 2.0 + lambda_least)) / (mu * mu);
    };
    // Bisection on one monotone branch, then a bracket-clamped Newton polish.
    auto refine = [&](double lo, double hi, bool increasing) {
        for (int i = 0; i < 100 && hi - lo > 1e-12 * std::max(1.0, hi); ++i) {
            const double mid = 0.5 * (lo + hi);
            const bool above = curve(mid) > gamma;
            if (above == increasing)
                hi = mid;
            else
                lo = mid;
        }
        double mu = 0.5 * (lo + hi);
        for (int i = 0; i < 8; ++i) {
            const double s = curve_slope(mu);
            if (s == 0.0) break;
            const double next = mu - (curve(mu) - gamma) / s;
            if (next <= lo || next >= hi) break;
            mu = next;
        }
        return mu;
    };

    DecayPair pair;
    pair.gamma = gamma;

    // Decreasing branch (0, mu_star): curve(0+) = +inf > gamma > c0.
    double lo = crit.mu_star;
    while (curve(lo) < gamma) lo *= 0.5;
    pair.mu_minus = refine(lo, crit.mu_star, false);

    // Increasing branch (mu_star, inf).
    double hi = 2.0 * crit.mu_star;
    while (curve(hi) < gamma) hi *= 2.0;
    pair.mu_plus = refine(crit.mu_star, hi, true);
    return pair;
}

double select_mu_tilde(double mu, double mu_star) {
    const double cap = std::min(2.0 * mu, mu_star);
    return cap - 0.05 * (cap - mu);
}

double instantaneous_speed(const Medium& medium, const EquilibriumPath& v_star,
                           double mu, double t) {
    if (!(mu > 0.0)) throw ConfigError("instantaneous_speed: mu must be > 0");
    const double lam = medium.channel(Channel::A1, t) -
                       medium.channel(Channel::C1, t) * v_star(t);
    return (std::exp(mu) + std::exp(-mu) - 2.0 + lam) / mu;
}

double speed_integral(const Medium& medium, const EquilibriumPath& v_star, double mu,
                      double t0, double t1, double tol) {
    if (!(mu > 0.0)) throw ConfigError("speed_integral: mu must be > 0");
    const double dispersal = (std::exp(mu) + std::exp(-mu) - 2.0) * (t1 - t0);
    const double lam_int = integrate_adaptive(
        [&medium, &v_star](double t) {
            return medium.channel(Channel::A1, t) -
                   medium.channel(Channel::C1, t) * v_star(t);
        },
        t0, t1, tol);
    return (dispersal + lam_int) / mu;
}

} // namespace latfront
