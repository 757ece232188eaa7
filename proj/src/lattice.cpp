#include "latfront/lattice.hpp"

#include <cmath>

#include "latfront/errors.hpp"

namespace latfront {

double discrete_laplacian(const std::vector<double>& values, std::size_t i) {
    if (i == 0 || i + 1 >= values.size())
        throw ConfigError("discrete_laplacian: site is not interior to the window");
    return values[i + 1] - 2.0 * values[i] + values[i - 1];
}

OrderCheck order_leq(const LatticeState& a, const LatticeState& b) {
    if (a.size() != b.size() || a.first_index != b.first_index ||
        a.phase != b.phase || a.frame != b.frame)
        throw ConfigError("order_leq: mismatched lattice windows");
    OrderCheck res;
    res.leq = true;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double du = a.u[j] - b.u[j];
        const double dv = a.v[j] - b.v[j];
        const double viol = std::max(du, dv);
        if (viol > res.max_violation) {
            res.max_violation = viol;
            res.arg_site = j;
        }
        if (du > 0.0 || dv > 0.0) res.leq = false;
    }
    return res;
}

namespace {

LatticeState reflect_v(const LatticeState& s, const EquilibriumPath& v_star,
                       Frame target) {
    LatticeState out = s;
    out.frame = target;
    const double vs = v_star(s.time);
    for (double& x : out.v) x = vs - x;
    return out;
}

} // namespace

LatticeState to_cooperative(const LatticeState& s, const EquilibriumPath& v_star) {
    if (s.frame != Frame::Competition)
        throw ConfigError("to_cooperative: state is not in the competition frame");
    return reflect_v(s, v_star, Frame::Cooperative);
}

LatticeState from_cooperative(const LatticeState& s, const EquilibriumPath& v_star) {
    if (s.frame != Frame::Cooperative)
        throw ConfigError("from_cooperative: state is not in the cooperative frame");
    return reflect_v(s, v_star, Frame::Competition);
}

} // namespace latfront
