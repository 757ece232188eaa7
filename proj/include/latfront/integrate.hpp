#pragma once

#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "latfront/kernels.hpp"
#include "latfront/lattice.hpp"
#include "latfront/medium.hpp"

namespace latfront {

enum class SystemKind { Competition, Cooperative, LinearizedU };

// Ghost sampler: (t, ghost position) -> (u, v).
using GhostFn = std::function<std::pair<double, double>(double t, double x)>;

struct BoundarySpec {
    GhostFn left;
    GhostFn right;
};

// Left ghosts clamp to the invaded-state equilibrium of the frame, right
// ghosts to the extinct state.
BoundarySpec equilibrium_boundary(SystemKind kind, const EquilibriumPath* u_star,
                                  const EquilibriumPath* v_star);

struct LatticeSystem {
    SystemKind kind = SystemKind::Cooperative;
    Medium medium;
    const EquilibriumPath* v_star = nullptr; // needed except for Competition
    BoundarySpec boundary;

    Frame frame() const {
        return kind == SystemKind::Competition ? Frame::Competition
                                               : Frame::Cooperative;
    }
};

struct IntegratorOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    double max_step = 0.5;
    double state_tol = kDefaultStateTol;
    bool dense_output = true;
    Exec exec = Exec::Serial;
    std::size_t max_steps = 200000000;
    // With no upper bound on v available (competition runs without v*), only
    // nonnegativity is enforced.
    bool enforce_invariants = true;
};

struct StepStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evals = 0;
    double min_step = std::numeric_limits<double>::infinity();
    double max_step = 0.0;
};

struct Trajectory {
    std::vector<LatticeState> snapshots;
    StepStats stats;
};

using FamilySnapshotFn =
    std::function<void(double t, const std::vector<LatticeState>&)>;

// Steps every member with one shared step sequence (the error norm runs over
// the union), so order relations between members survive discretization.
StepStats integrate_family(const LatticeSystem& system,
                           std::vector<LatticeState>& states, double t1,
                           const std::vector<double>& output_times,
                           const IntegratorOptions& opts,
                           const FamilySnapshotFn& on_snapshot = {});

Trajectory integrate(const LatticeSystem& system, const LatticeState& state0,
                     double t1, const std::vector<double>& output_times,
                     const IntegratorOptions& opts = {});

// m decoupled sublattices at phases k/m covering the same window of the
// space-continuous system; profiles interleave to spacing 1/m.
std::vector<Trajectory> integrate_offset_family(
    const LatticeSystem& system, const std::function<double(double)>& u0,
    const std::function<double(double)>& v0, long first_index, std::size_t sites,
    std::size_t m, double t0, double t1, const std::vector<double>& output_times,
    const IntegratorOptions& opts = {});

} // namespace latfront
