#pragma once

#include "latfront/equilibria.hpp"
#include "latfront/medium.hpp"

namespace latfront {

inline constexpr double kDefaultOptTol = 1e-10;

// c0 = inf_{mu>0} (e^mu + e^-mu - 2 + lambda_least)/mu and its minimizer.
struct SpeedReport {
    double lambda_least = 0.0;
    double c0 = 0.0;
    double mu_star = 0.0;
    double foc_residual = 0.0; // |mu(e^mu - e^-mu) - (e^mu + e^-mu - 2 + lambda)|
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    double tol = kDefaultOptTol;
};

// The two positive decay rates with wave_speed_curve(mu) = gamma, gamma > c0.
struct DecayPair {
    double gamma = 0.0;
    double mu_minus = 0.0; // in (0, mu_star)
    double mu_plus = 0.0;  // in (mu_star, inf)
};

// (e^mu + e^-mu - 2 + lambda_least)/mu; rejects mu <= 0.
double wave_speed_curve(double lambda_least, double mu);

SpeedReport critical_speed(double lambda_least, double tol = kDefaultOptTol);

DecayPair decay_rates_for_speed(double lambda_least, double gamma,
                                double tol = kDefaultOptTol);

// mu_tilde for the sub-solution ansatz: strictly inside (mu, min(2mu, mu_star)).
double select_mu_tilde(double mu, double mu_star);

// c(t; omega, mu) = (e^mu + e^-mu - 2 + a1(t) - c1(t) v*(t)) / mu.
double instantaneous_speed(const Medium& medium, const EquilibriumPath& v_star,
                           double mu, double t);

// Quadrature of the instantaneous speed over [t0, t1].
double speed_integral(const Medium& medium, const EquilibriumPath& v_star, double mu,
                      double t0, double t1, double tol = kDefaultQuadTol);

} // namespace latfront
