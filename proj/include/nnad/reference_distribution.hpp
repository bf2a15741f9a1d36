#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace nnad {

struct UniformInterval {
    double lo, hi;
};
struct UniformBall {
    std::vector<double> center;
    double radius;
};
struct PointMass {
    std::vector<double> location;
};
using DistributionComponent = std::variant<UniformInterval, UniformBall, PointMass>;

/**
 * A finite mixture of components whose closed-ball masses P(B(x, r)) have
 * closed forms. Used as the population oracle for radii and DTM values.
 */
class ReferenceDistribution {
public:
    struct Part {
        double weight;
        DistributionComponent component;
    };

    static ReferenceDistribution uniform_interval(double lo, double hi);
    static ReferenceDistribution uniform_ball(std::vector<double> center, double radius);
    static ReferenceDistribution point_mass(std::vector<double> location);
    /// (1 - epsilon) * normal + epsilon * anomaly.
    static ReferenceDistribution huber_mixture(const ReferenceDistribution& normal, const ReferenceDistribution& anomaly,
                                               double epsilon);

    std::size_t dim() const noexcept { return dim_; }
    const std::vector<Part>& parts() const noexcept { return parts_; }

    /// P(B(x, r)) for the closed ball; r < 0 gives 0.
    double ball_mass(std::span<const double> x, double r) const;

    /// Whether x lies in the support (union of component supports).
    bool in_support(std::span<const double> x) const;

    /// Distance from x to the boundary of the support of a single-component
    /// distribution (0 for a point mass); negative outside the support.
    double boundary_distance(std::span<const double> x) const;

    /// Largest distance from x to any support point, an upper bracket for radii.
    double max_distance(std::span<const double> x) const;

private:
    explicit ReferenceDistribution(std::vector<Part> parts);

    std::vector<Part> parts_;
    std::size_t dim_ = 1;
};

/// Fraction of a d-ball's volume inside a cap of height h (0 <= h <= 2R), via the regularized incomplete beta.
double ball_cap_fraction(std::size_t dim, double radius, double height);

}  // namespace nnad
