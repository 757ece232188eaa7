#include "latfront/kernels.hpp"

namespace latfront {

namespace {

inline double lap(std::span<const double> x, std::size_t i, double left,
                  double right, std::size_t n) {
    const double xm = i == 0 ? left : x[i - 1];
    const double xp = i + 1 == n ? right : x[i + 1];
    return xp - 2.0 * x[i] + xm;
}

} // namespace

void competition_rhs(const CoefficientSet& c, std::span<const double> u,
                     std::span<const double> v, const GhostPair& g,
                     std::span<double> du, std::span<double> dv, Exec exec) {
    const std::size_t n = u.size();
    auto site = [&](std::size_t i) {
        const double ui = u[i];
        const double vi = v[i];
        du[i] = lap(u, i, g.u_left, g.u_right, n) +
                ui * (c.a1 - c.b1 * ui - c.c1 * vi);
        dv[i] = lap(v, i, g.v_left, g.v_right, n) +
                vi * (c.a2 - c.b2 * ui - c.c2 * vi);
    };
    if (exec == Exec::OpenMP) {
#pragma omp parallel for schedule(static)
        for (std::size_t i = 0; i < n; ++i) site(i);
    } else {
        for (std::size_t i = 0; i < n; ++i) site(i);
    }
}

void cooperative_rhs(const CoefficientSet& c, double v_star,
                     std::span<const double> u, std::span<const double> v,
                     const GhostPair& g, std::span<double> du,
                     std::span<double> dv, Exec exec) {
    const std::size_t n = u.size();
    auto site = [&](std::size_t i) {
        const double ui = u[i];
        const double vi = v[i];
        du[i] = lap(u, i, g.u_left, g.u_right, n) +
                ui * (c.a1 - c.b1 * ui - c.c1 * (v_star - vi));
        dv[i] = lap(v, i, g.v_left, g.v_right, n) +
                c.b2 * (v_star - vi) * ui +
                vi * (c.a2 - 2.0 * c.c2 * v_star + c.c2 * vi);
    };
    if (exec == Exec::OpenMP) {
#pragma omp parallel for schedule(static)
        for (std::size_t i = 0; i < n; ++i) site(i);
    } else {
        for (std::size_t i = 0; i < n; ++i) site(i);
    }
}

void linearized_u_rhs(const CoefficientSet& c, double v_star,
                      std::span<const double> u, const GhostPair& g,
                      std::span<double> du, Exec exec) {
    const std::size_t n = u.size();
    const double lam = c.a1 - c.c1 * v_star;
    auto site = [&](std::size_t i) {
        du[i] = lap(u, i, g.u_left, g.u_right, n) + lam * u[i];
    };
    if (exec == Exec::OpenMP) {
#pragma omp parallel for schedule(static)
        for (std::size_t i = 0; i < n; ++i) site(i);
    } else {
        for (std::size_t i = 0; i < n; ++i) site(i);
    }
}

} // namespace latfront
