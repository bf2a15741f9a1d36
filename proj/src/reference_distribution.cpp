#include "nnad/reference_distribution.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>

#include "nnad/dataset.hpp"
#include "nnad/error.hpp"

namespace nnad {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

std::size_t component_dim(const DistributionComponent& c) {
    return std::visit(overloaded{[](const UniformInterval&) -> std::size_t { return 1; },
                                 [](const UniformBall& b) { return b.center.size(); },
                                 [](const PointMass& p) { return p.location.size(); }},
                      c);
}

// Mass of B(x, r) under the uniform distribution on B(c, R), as a fraction of vol B(c, R).
double ball_intersection_fraction(std::size_t dim, double t, double r, double R) {
    if (r <= 0.0) return 0.0;
    if (t >= r + R) return 0.0;
    if (t + r <= R) return std::pow(r / R, static_cast<double>(dim));
    if (t + R <= r) return 1.0;
    // Lens: the radical plane sits at distance a from c and t - a from x.
    const double a = (t * t + R * R - r * r) / (2.0 * t);
    const double cap_big = ball_cap_fraction(dim, R, R - a);
    const double cap_small = ball_cap_fraction(dim, r, r - (t - a));
    return cap_big + std::pow(r / R, static_cast<double>(dim)) * cap_small;
}

}  // namespace

double ball_cap_fraction(std::size_t dim, double radius, double height) {
    if (height <= 0.0) return 0.0;
    if (height >= 2.0 * radius) return 1.0;
    if (height > radius) return 1.0 - ball_cap_fraction(dim, radius, 2.0 * radius - height);
    const double u = height / radius;
    const double arg = std::clamp(2.0 * u - u * u, 0.0, 1.0);
    return 0.5 * boost::math::ibeta((static_cast<double>(dim) + 1.0) / 2.0, 0.5, arg);
}

ReferenceDistribution::ReferenceDistribution(std::vector<Part> parts) : parts_(std::move(parts)) {
    dim_ = component_dim(parts_.front().component);
    for (const auto& p : parts_) {
        if (component_dim(p.component) != dim_) throw InvalidArgument("mixture components differ in dimension");
    }
}

ReferenceDistribution ReferenceDistribution::uniform_interval(double lo, double hi) {
    if (!(hi > lo)) throw InvalidArgument("uniform interval requires lo < hi");
    return ReferenceDistribution({{1.0, UniformInterval{lo, hi}}});
}

ReferenceDistribution ReferenceDistribution::uniform_ball(std::vector<double> center, double radius) {
    if (center.empty()) throw InvalidArgument("ball center must have dimension >= 1");
    if (!(radius > 0.0)) throw InvalidArgument("ball radius must be positive");
    return ReferenceDistribution({{1.0, UniformBall{std::move(center), radius}}});
}

ReferenceDistribution ReferenceDistribution::point_mass(std::vector<double> location) {
    if (location.empty()) throw InvalidArgument("point mass location must have dimension >= 1");
    return ReferenceDistribution({{1.0, PointMass{std::move(location)}}});
}

ReferenceDistribution ReferenceDistribution::huber_mixture(const ReferenceDistribution& normal,
                                                           const ReferenceDistribution& anomaly, double epsilon) {
    if (!(epsilon >= 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in [0, 1)");
    std::vector<Part> parts;
    for (const auto& p : normal.parts_) parts.push_back({(1.0 - epsilon) * p.weight, p.component});
    if (epsilon > 0.0) {
        for (const auto& p : anomaly.parts_) parts.push_back({epsilon * p.weight, p.component});
    }
    return ReferenceDistribution(std::move(parts));
}

double ReferenceDistribution::ball_mass(std::span<const double> x, double r) const {
    if (x.size() != dim_) throw InvalidArgument("point dimension does not match distribution");
    if (r < 0.0) return 0.0;
    double mass = 0.0;
    for (const auto& part : parts_) {
        const double m = std::visit(
            overloaded{[&](const UniformInterval& u) {
                           const double len = std::min(x[0] + r, u.hi) - std::max(x[0] - r, u.lo);
                           return std::max(0.0, len) / (u.hi - u.lo);
                       },
                       [&](const UniformBall& b) {
                           return ball_intersection_fraction(dim_, std::sqrt(squared_distance(x, b.center)), r,
                                                             b.radius);
                       },
                       [&](const PointMass& p) { return squared_distance(x, p.location) <= r * r ? 1.0 : 0.0; }},
            part.component);
        mass += part.weight * m;
    }
    return std::min(1.0, mass);
}

bool ReferenceDistribution::in_support(std::span<const double> x) const {
    for (const auto& part : parts_) {
        const bool inside = std::visit(
            overloaded{[&](const UniformInterval& u) { return x[0] >= u.lo && x[0] <= u.hi; },
                       [&](const UniformBall& b) { return squared_distance(x, b.center) <= b.radius * b.radius; },
                       [&](const PointMass& p) { return squared_distance(x, p.location) == 0.0; }},
            part.component);
        if (inside) return true;
    }
    return false;
}

double ReferenceDistribution::boundary_distance(std::span<const double> x) const {
    if (parts_.size() != 1) throw InvalidArgument("boundary distance needs a single-component distribution");
    return std::visit(
        overloaded{[&](const UniformInterval& u) { return std::min(x[0] - u.lo, u.hi - x[0]); },
                   [&](const UniformBall& b) { return b.radius - std::sqrt(squared_distance(x, b.center)); },
                   [&](const PointMass& p) { return -std::sqrt(squared_distance(x, p.location)); }},
        parts_.front().component);
}

double ReferenceDistribution::max_distance(std::span<const double> x) const {
    double out = 0.0;
    for (const auto& part : parts_) {
        const double d = std::visit(
            overloaded{[&](const UniformInterval& u) { return std::max(std::abs(x[0] - u.lo), std::abs(x[0] - u.hi)); },
                       [&](const UniformBall& b) { return std::sqrt(squared_distance(x, b.center)) + b.radius; },
                       [&](const PointMass& p) { return std::sqrt(squared_distance(x, p.location)); }},
            part.component);
        out = std::max(out, d);
    }
    return out;
}

}  // namespace nnad
