#pragma once

#include <cstddef>
#include <span>

#include "latfront/medium.hpp"

namespace latfront {

enum class Exec { Serial, OpenMP };

// Ghost values injected beyond the window ends.
struct GhostPair {
    double u_left = 0.0, v_left = 0.0;
    double u_right = 0.0, v_right = 0.0;
};

// Right-hand sides of the lattice systems on one window. Each site is
// independent given the frozen stage vector, so the OpenMP lane is a plain
// parallel-for and matches the serial lane bit for bit.
//
// Competition: du = Hu + u(a1 - b1 u - c1 v), dv = Hv + v(a2 - b2 u - c2 v).
void competition_rhs(const CoefficientSet& c, std::span<const double> u,
                     std::span<const double> v, const GhostPair& ghosts,
                     std::span<double> du, std::span<double> dv,
                     Exec exec = Exec::Serial);

// Cooperative: du = Hu + u(a1 - b1 u - c1 (v* - v)),
//              dv = Hv + b2 (v* - v) u + v(a2 - 2 c2 v* + c2 v).
void cooperative_rhs(const CoefficientSet& c, double v_star,
                     std::span<const double> u, std::span<const double> v,
                     const GhostPair& ghosts, std::span<double> du,
                     std::span<double> dv, Exec exec = Exec::Serial);

// u-equation linearized at (0, v*): du = Hu + (a1 - c1 v*) u, dv = 0.
void linearized_u_rhs(const CoefficientSet& c, double v_star,
                      std::span<const double> u, const GhostPair& ghosts,
                      std::span<double> du, Exec exec = Exec::Serial);

} // namespace latfront
