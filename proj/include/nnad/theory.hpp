#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nnad/reference_distribution.hpp"

namespace nnad {

/// Inputs to the finite-sample bounds and separation thresholds.
struct TheoryInputs {
    std::size_t n = 1000;
    std::size_t d = 1;
    double delta = 0.05;   ///< failure probability
    double m = 0.03;       ///< mass parameter
    double C = 1.0;        ///< regularity constant linking mass and radius perturbations
    double epsilon = 0.0;  ///< contamination proportion
    std::optional<double> eta;  ///< support separation
    double h = 0.0;        ///< buffer
    double a0 = 1.0;       ///< (a,b)-condition constant at the boundary
    double b = 1.0;        ///< intrinsic dimension
    double q = 2.0;        ///< DTM order (q_infinity allowed)

    bool operator==(const TheoryInputs&) const = default;
};

/// sqrt((4/n)((d+1) log 2n + log(8/delta))): uniform radius deviation scale over all of R^d.
double beta_n(std::size_t n, std::size_t d, double delta);

/// sqrt((4/(n-1))(log 2(n-1) + log(8n/delta))): deviation scale over the sample points only.
double alpha_n(std::size_t n, double delta);

/// C (beta_n^2 + beta_n sqrt(p)). `p` must equal k/n for an integer 1 <= k <= n.
double radius_bound(std::size_t n, std::size_t d, double delta, double p, double C);

/// C (alpha_n^2 + alpha_n sqrt(p') + 1/n) with p' = (k-1)/(n-1), k = p n.
double radius_bound_sample(std::size_t n, double delta, double p, double C);

/// C beta_n (beta_n + sqrt(m)), valid for every order q.
double dtm_bound(std::size_t n, std::size_t d, double delta, double m, double C);

/// C alpha_n (alpha_n + sqrt(m)) over the sample points.
double dtm_bound_sample(std::size_t n, double delta, double m, double C);

/// Density level g0 that the safety zone must reach. Requires m > epsilon and a
/// positive separation term; throws InvalidArgument otherwise.
double g0_threshold(double m, double epsilon, double eta, double h, double b, double q);

/// Smallest separation eta for which g0_threshold(..., eta, ...) equals a0, so the
/// whole normal support is safe when its density is bounded below by a0.
double full_support_eta(double m, double epsilon, double a0, double b, double q, double h);

/// C* = deviation / (alpha_n (alpha_n + sqrt(m))): the smallest constant for which
/// dtm_bound_sample covers an observed deviation.
double calibrate_constant(double observed_deviation, std::size_t n, double delta, double m);

/// r_p(x) = inf { r > 0 : P(B(x, r)) >= p } for p in (0, 1].
double population_radius(const ReferenceDistribution& dist, std::span<const double> x, double p);

/// ((1/m) int_0^m r_p(x)^q dp)^(1/q), by adaptive Simpson to relative error 1e-9; r_m(x) when q is infinite.
double population_dtm(const ReferenceDistribution& dist, std::span<const double> x, double m, double q);

/// inf { z >= 0 : g(z) >= level } searched on [0, z_max]; infinity when g stays below the level.
double inverse_level(const std::function<double(double)>& g, double level, double z_max);

struct SeparationSetup {
    ReferenceDistribution normal;   ///< P0, single component
    ReferenceDistribution anomaly;  ///< P1
    double epsilon = 0.0;
    double m = 0.1;
    double q = 2.0;
    double h = 0.0;
    double b = 1.0;
    /// a(x) = g(distance from x to the boundary of the normal support); non-decreasing.
    std::function<double(double)> g;
    double zone_search_limit = 1e6;
};

struct SeparationReport {
    double eta = 0.0;                  ///< min distance between the S0 and S1 candidates
    std::optional<double> g0;          ///< absent when the separation term is non-positive
    double zone_depth = 0.0;           ///< g^{-1}(g0); infinity when no point qualifies
    std::size_t zone_count = 0;        ///< candidates in the safety zone
    std::size_t support_count = 0;     ///< candidates in S0
    std::size_t anomaly_count = 0;     ///< candidates in S1
    std::optional<double> zone_sup;    ///< sup of population DTM over the zone
    std::optional<double> support_sup; ///< sup over all S0 candidates
    std::optional<double> anomaly_inf; ///< inf over S1 candidates
    bool holds = false;                ///< zone_sup + h < anomaly_inf (false when either set is empty)
    bool full_support_holds = false;   ///< support_sup + h < anomaly_inf
    std::string note;
};

/// Evaluates the population DTM of (1 - epsilon) P0 + epsilon P1 at the candidates
/// and checks the safety-zone separation inequality. Requires m > epsilon.
SeparationReport separation_check(const SeparationSetup& setup, const std::vector<std::vector<double>>& candidates);

/// A computed quantity, or the reason it is undefined for the given inputs.
struct TheoryQuantity {
    std::string name;
    std::optional<double> value;
    std::string reason;
};

struct TheoryReport {
    TheoryInputs inputs;
    std::size_t k = 0;  ///< ceil(m n)
    std::vector<TheoryQuantity> quantities;

    const TheoryQuantity* find(const std::string& name) const;
};

/// Every bound and threshold whose preconditions hold for `inputs`.
TheoryReport compute_theory_report(const TheoryInputs& inputs);

}  // namespace nnad
