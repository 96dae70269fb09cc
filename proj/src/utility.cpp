#include "treedual/utility.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace treedual {
namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

UtilityField UtilityField::log_utility(int n_nodes, double beta) {
    UtilityField f;
    f.family = UtilityFamily::Log;
    f.beta.assign(static_cast<size_t>(n_nodes), beta);
    return f;
}

UtilityField UtilityField::power_utility(int n_nodes, double gamma, double beta) {
    if (!(gamma < 1.0) || gamma == 0.0)
        throw std::invalid_argument("power utility requires gamma in (-inf,0) u (0,1)");
    UtilityField f;
    f.family = UtilityFamily::Power;
    f.gamma = gamma;
    f.beta.assign(static_cast<size_t>(n_nodes), beta);
    return f;
}

double UtilityField::sup_value() const {
    if (family == UtilityFamily::Log) return kInf;
    return gamma > 0.0 ? kInf : 0.0;
}

double UtilityField::value_at_zero(int node) const {
    (void)node;
    if (family == UtilityFamily::Log) return -kInf;
    return gamma > 0.0 ? 0.0 : -kInf;
}

std::vector<Violation> validate_field(const UtilityField& field,
                                      const MarketScenario& scenario) {
    std::vector<Violation> out;
    const int n = scenario.tree.size();
    if (static_cast<int>(field.beta.size()) != n) {
        out.push_back({"beta", -1, "one weight per node required"});
        return out;
    }
    if (field.family == UtilityFamily::Power &&
        (!(field.gamma < 1.0) || field.gamma == 0.0)) {
        out.push_back({"gamma", -1, "gamma must lie in (-inf,0) u (0,1)"});
        return out;
    }
    for (int i = 0; i < n; ++i) {
        if (scenario.clock.increments[i] > 0.0 && !(field.beta[i] > 0.0))
            out.push_back({"beta", i, "beta must be positive where the clock charges"});
        if (!(field.beta[i] > 0.0)) continue;
        // Inada conditions, evaluated at the probe points
        if (!(marginal(field, i, 1e-12) > 1e6))
            out.push_back({"Inada at 0", i, "U'(0+) must diverge"});
        if (!(marginal(field, i, 1e12) < 1e-6))
            out.push_back({"Inada at infinity", i, "U'(inf) must vanish"});
        // strict concavity, sampled
        double prev = kInf;
        for (double x : {0.5, 1.0, 2.0, 4.0}) {
            double m = marginal(field, i, x);
            if (!(m < prev)) {
                out.push_back({"strict concavity", i, "U' not strictly decreasing"});
                break;
            }
            prev = m;
        }
    }
    return out;
}

double eval_U(const UtilityField& field, int node, double x) {
    if (x < 0.0) throw std::invalid_argument("eval_U: negative consumption");
    const double b = field.beta[node];
    if (x == 0.0) return field.value_at_zero(node);
    if (field.family == UtilityFamily::Log) return b * std::log(x);
    return b * std::pow(x, field.gamma) / field.gamma;
}

double eval_V(const UtilityField& field, int node, double y) {
    if (y < 0.0) throw std::invalid_argument("eval_V: negative argument");
    const double b = field.beta[node];
    if (y == 0.0) return field.sup_value();
    if (field.family == UtilityFamily::Log) return b * std::log(b / y) - b;
    const double g = field.gamma;
    return std::pow(b, 1.0 / (1.0 - g)) * (1.0 - g) / g * std::pow(y, g / (g - 1.0));
}

double marginal(const UtilityField& field, int node, double x) {
    if (!(x > 0.0)) throw std::invalid_argument("marginal: x must be positive");
    const double b = field.beta[node];
    if (field.family == UtilityFamily::Log) return b / x;
    return b * std::pow(x, field.gamma - 1.0);
}

double marginal_inverse(const UtilityField& field, int node, double y) {
    if (!(y > 0.0)) throw std::invalid_argument("marginal_inverse: y must be positive");
    const double b = field.beta[node];
    if (field.family == UtilityFamily::Log) return b / y;
    return std::pow(y / b, 1.0 / (field.gamma - 1.0));
}

double marginal_inverse_derivative(const UtilityField& field, int node, double y) {
    const double b = field.beta[node];
    if (field.family == UtilityFamily::Log) return -b / (y * y);
    return marginal_inverse(field, node, y) / ((field.gamma - 1.0) * y);
}

double conjugate_second_derivative(const UtilityField& field, int node, double y) {
    return -marginal_inverse_derivative(field, node, y);
}

}  // namespace treedual
