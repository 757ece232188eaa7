#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "latfront/equilibria.hpp"

namespace latfront {

inline constexpr double kDefaultStateTol = 1e-8;

enum class Frame { Competition, Cooperative };

// Finite window of a lattice configuration. Site j sits at position
// first_index + j + phase; phase in [0,1) selects the sublattice.
struct LatticeState {
    Frame frame = Frame::Cooperative;
    double phase = 0.0;
    long first_index = 0;
    double time = 0.0;
    std::vector<double> u;
    std::vector<double> v;

    std::size_t size() const { return u.size(); }
    double site_pos(std::size_t j) const {
        return static_cast<double>(first_index + static_cast<long>(j)) + phase;
    }
};

double discrete_laplacian(const std::vector<double>& values, std::size_t i);

struct OrderCheck {
    bool leq = false;
    double max_violation = 0.0; // max over components of (A - B)+
    std::size_t arg_site = 0;
};

// Componentwise A <= B on matching windows; rejects mismatched geometry.
OrderCheck order_leq(const LatticeState& a, const LatticeState& b);

// The change of variables v -> v*(t) - v (u unchanged); its own inverse up
// to the frame flag.
LatticeState to_cooperative(const LatticeState& s, const EquilibriumPath& v_star);
LatticeState from_cooperative(const LatticeState& s, const EquilibriumPath& v_star);

} // namespace latfront
