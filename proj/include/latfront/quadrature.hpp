#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace latfront {

using RealPath = std::function<double(double)>;

inline constexpr double kDefaultQuadTol = 1e-9;
inline constexpr double kDefaultGridStep = 1e-2;

// Adaptive Simpson with absolute tolerance. Signed interval allowed.
double integrate_adaptive(const RealPath& f, double a, double b,
                          double abs_tol = kDefaultQuadTol);

// Uniform-grid prefix integral of a path: P(t) = \int_{t0}^{t} f.
// Nodes carry values accumulated cell by cell with Simpson on each cell, so
// P is additive on grid nodes by construction. Off-node queries use the node
// prefix plus a Simpson correction on the partial cell.
class PathTable {
public:
    PathTable() = default;
    PathTable(RealPath f, double t0, double t1, double step = kDefaultGridStep);

    double t0() const { return t0_; }
    double t1() const { return t0_ + step_ * static_cast<double>(n_cells_); }
    double step() const { return step_; }
    std::size_t cells() const { return n_cells_; }

    // f at grid node i (cached).
    double node_value(std::size_t i) const { return values_[i]; }
    double node_time(std::size_t i) const { return t0_ + step_ * static_cast<double>(i); }
    // P at grid node i.
    double node_prefix(std::size_t i) const { return prefix_[i]; }

    double value(double t) const;      // f(t), direct call
    double prefix(double t) const;     // P(t)
    double integral(double s, double t) const { return prefix(t) - prefix(s); }

    double min_node_value() const;
    double max_node_value() const;

private:
    RealPath f_;
    double t0_ = 0.0;
    double step_ = kDefaultGridStep;
    std::size_t n_cells_ = 0;
    std::vector<double> values_;    // f at nodes, n_cells_+1
    std::vector<double> half_values_; // f at cell midpoints, n_cells_
    std::vector<double> prefix_;    // P at nodes, n_cells_+1
};

enum class MeanMode { Least, Greatest };

struct MeanWindow {
    double start = 0.0;
    double length = 0.0;
    double average = 0.0;
};

// Sliding-window mean extremum over all windows [s,t] in the table horizon
// with t-s >= r, endpoints on the table grid. A window of length >= 2r always
// contains a sub-window of length in [r,2r) with an average at least as
// extreme, so scanning lengths in [r, 2r) yields the exact grid optimum.
struct MeanEstimate {
    double value = 0.0;
    double window_r = 0.0;
    double horizon_t0 = 0.0;
    double horizon_t1 = 0.0;
    MeanMode mode = MeanMode::Least;
    MeanWindow arg;                      // attaining window
    std::vector<MeanWindow> trace;       // best window per scanned length
};

MeanEstimate window_mean_extremum(const PathTable& table, double r, MeanMode mode);

} // namespace latfront
