#include "nnad/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nnad/dataset.hpp"
#include "nnad/detectors.hpp"
#include "nnad/error.hpp"

namespace nnad {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

void check_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
}

void check_mass(double m) {
    if (!(m > 0.0 && m < 1.0)) throw InvalidArgument("m must lie in (0, 1)");
}

void check_separation_inputs(double m, double epsilon, double b, double q) {
    check_mass(m);
    if (!(epsilon >= 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in [0, 1)");
    if (!(m > epsilon)) throw InvalidArgument("requires m > epsilon: the mass must exceed the contamination level");
    if (!(b > 0.0)) throw InvalidArgument("b must be positive");
    if (!(q >= 1.0)) throw InvalidArgument("q must be >= 1");
}

// k such that p == k / n, or InvalidArgument.
std::size_t count_for_fraction(double p, std::size_t n) {
    const double x = p * static_cast<double>(n);
    const double k = std::round(x);
    if (!(std::abs(x - k) <= 1e-9 * std::max(1.0, x)) || k < 1.0 || k > static_cast<double>(n))
        throw InvalidArgument("p = " + std::to_string(p) + " is not of the form k/n with 1 <= k <= n = " +
                              std::to_string(n));
    return static_cast<std::size_t>(k);
}

// Closed form of r_p for a single uniform interval.
double interval_radius(const UniformInterval& u, double x, double p) {
    const double length = u.hi - u.lo;
    const double target = p * length;
    if (x < u.lo) return (u.lo - x) + target;
    if (x > u.hi) return (x - u.hi) + target;
    const double near = std::min(x - u.lo, u.hi - x);
    if (target <= 2.0 * near) return target / 2.0;
    return target - near;
}

struct Simpson {
    const std::function<double(double)>& f;
    double tolerance;
    double min_width;
    double unresolved = 0.0;  // bound on the error of intervals accepted at min_width

    double step(double a, double b, double fa, double fm, double fb, double whole, double eps) {
        const double mid = 0.5 * (a + b);
        const double lm = 0.5 * (a + mid), rm = 0.5 * (mid + b);
        const double flm = f(lm), frm = f(rm);
        const double left = (mid - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - mid) / 6.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        if (std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
        if (b - a <= min_width) {
            // The integrand is monotone, so the exact value lies within width * (fb - fa) of the estimate.
            unresolved += (b - a) * std::abs(fb - fa);
            return left + right;
        }
        return step(a, mid, fa, flm, fm, left, eps / 2.0) + step(mid, b, fm, frm, fb, right, eps / 2.0);
    }
};

}  // namespace

double beta_n(std::size_t n, std::size_t d, double delta) {
    if (n < 1 || d < 1) throw InvalidArgument("beta_n requires n >= 1 and d >= 1");
    check_delta(delta);
    const double nn = static_cast<double>(n);
    return std::sqrt((4.0 / nn) * ((static_cast<double>(d) + 1.0) * std::log(2.0 * nn) + std::log(8.0 / delta)));
}

double alpha_n(std::size_t n, double delta) {
    if (n < 2) throw InvalidArgument("alpha_n requires n >= 2");
    check_delta(delta);
    const double n1 = static_cast<double>(n - 1);
    return std::sqrt((4.0 / n1) * (std::log(2.0 * n1) + std::log(8.0 * static_cast<double>(n) / delta)));
}

double radius_bound(std::size_t n, std::size_t d, double delta, double p, double C) {
    count_for_fraction(p, n);
    const double b = beta_n(n, d, delta);
    return C * (b * b + b * std::sqrt(p));
}

double radius_bound_sample(std::size_t n, double delta, double p, double C) {
    const std::size_t k = count_for_fraction(p, n);
    const double a = alpha_n(n, delta);
    const double p_prime = static_cast<double>(k - 1) / static_cast<double>(n - 1);
    return C * (a * a + a * std::sqrt(p_prime) + 1.0 / static_cast<double>(n));
}

double dtm_bound(std::size_t n, std::size_t d, double delta, double m, double C) {
    check_mass(m);
    const double b = beta_n(n, d, delta);
    return C * b * (b + std::sqrt(m));
}

double dtm_bound_sample(std::size_t n, double delta, double m, double C) {
    check_mass(m);
    const double a = alpha_n(n, delta);
    return C * a * (a + std::sqrt(m));
}

double g0_threshold(double m, double epsilon, double eta, double h, double b, double q) {
    check_separation_inputs(m, epsilon, b, q);
    if (!(eta >= 0.0) || !(h >= 0.0)) throw InvalidArgument("eta and h must be non-negative");
    const double scale = m / (1.0 - epsilon);
    if (std::isinf(q)) {
        if (!(eta > h)) throw InvalidArgument("separation too small for this h: need eta > h");
        return scale * std::pow(eta - h, -b);
    }
    const double inner = (m - epsilon) / m * std::pow(eta, q) - h;
    if (!(inner > 0.0))
        throw InvalidArgument("separation too small for this h: (m - epsilon)/m * eta^q - h must be positive");
    return scale * std::pow((b + q) / b * inner, -b / q);
}

double full_support_eta(double m, double epsilon, double a0, double b, double q, double h) {
    check_separation_inputs(m, epsilon, b, q);
    if (!(a0 > 0.0)) throw InvalidArgument("a0 must be positive");
    if (!(h >= 0.0)) throw InvalidArgument("h must be non-negative");
    const double level = m / (a0 * (1.0 - epsilon));
    if (std::isinf(q)) return std::pow(level, 1.0 / b) + h;
    return std::pow(m / (m - epsilon) * (b / (b + q) * std::pow(level, q / b) + h), 1.0 / q);
}

double calibrate_constant(double observed_deviation, std::size_t n, double delta, double m) {
    if (!(observed_deviation >= 0.0)) throw InvalidArgument("observed deviation must be non-negative");
    return observed_deviation / dtm_bound_sample(n, delta, m, 1.0);
}

double population_radius(const ReferenceDistribution& dist, std::span<const double> x, double p) {
    if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("p must lie in (0, 1]");
    if (x.size() != dist.dim()) throw InvalidArgument("point dimension does not match distribution");
    if (dist.parts().size() == 1) {
        const auto& c = dist.parts().front().component;
        if (const auto* u = std::get_if<UniformInterval>(&c)) return interval_radius(*u, x[0], p);
        if (const auto* pm = std::get_if<PointMass>(&c)) return std::sqrt(squared_distance(x, pm->location));
    }
    if (dist.ball_mass(x, 0.0) >= p) return 0.0;
    double lo = 0.0;
    double hi = dist.max_distance(x);
    while (dist.ball_mass(x, hi) < p) hi = 2.0 * hi + 1.0;  // guards rounding in the mass sum
    for (int it = 0; it < 400 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (dist.ball_mass(x, mid) >= p ? hi : lo) = mid;
    }
    return hi;
}

double population_dtm(const ReferenceDistribution& dist, std::span<const double> x, double m, double q) {
    check_mass(m);
    if (!(q >= 1.0)) throw InvalidArgument("q must be >= 1");
    if (std::isinf(q)) return population_radius(dist, x, m);

    const std::function<double(double)> f = [&](double p) {
        return p <= 0.0 ? 0.0 : std::pow(population_radius(dist, x, p), q);
    };
    // Coarse composite pass to set the absolute tolerance.
    constexpr int panels = 16;
    double coarse = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double a = m * i / panels, b = m * (i + 1) / panels;
        coarse += (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
    }
    if (coarse == 0.0 && f(m) == 0.0) return 0.0;
    const double tolerance = 1e-9 * std::max(std::abs(coarse), 1e-300);
    Simpson simpson{f, tolerance, m * 0x1.0p-48};
    double integral = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double a = m * i / panels, b = m * (i + 1) / panels;
        const double fa = f(a), fm = f(0.5 * (a + b)), fb = f(b);
        integral += simpson.step(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tolerance / panels);
    }
    if (simpson.unresolved > tolerance)
        throw ConvergenceError("DTM quadrature did not reach relative error 1e-9");
    return std::pow(std::max(0.0, integral) / m, 1.0 / q);
}

double inverse_level(const std::function<double(double)>& g, double level, double z_max) {
    if (g(0.0) >= level) return 0.0;
    if (g(z_max) < level) return inf;
    double lo = 0.0, hi = z_max;
    for (int it = 0; it < 400 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) >= level ? hi : lo) = mid;
    }
    return hi;
}

SeparationReport separation_check(const SeparationSetup& setup, const std::vector<std::vector<double>>& candidates) {
    check_separation_inputs(setup.m, setup.epsilon, setup.b, setup.q);
    if (!setup.g) throw InvalidArgument("separation check needs the density profile g");
    const auto mixture = ReferenceDistribution::huber_mixture(setup.normal, setup.anomaly, setup.epsilon);

    std::vector<const std::vector<double>*> normals, anomalies;
    for (const auto& c : candidates) {
        if (c.size() != mixture.dim()) throw InvalidArgument("candidate dimension does not match distribution");
        if (setup.normal.in_support(c))
            normals.push_back(&c);
        else if (setup.anomaly.in_support(c))
            anomalies.push_back(&c);
    }

    SeparationReport report;
    report.support_count = normals.size();
    report.anomaly_count = anomalies.size();
    report.eta = inf;
    for (const auto* a : normals) {
        for (const auto* b : anomalies) report.eta = std::min(report.eta, std::sqrt(squared_distance(*a, *b)));
    }
    if (normals.empty() || anomalies.empty()) {
        report.note = "no candidates in the normal or anomalous support";
        report.zone_depth = inf;
        return report;
    }

    try {
        report.g0 = g0_threshold(setup.m, setup.epsilon, report.eta, setup.h, setup.b, setup.q);
        report.zone_depth = inverse_level(setup.g, *report.g0, setup.zone_search_limit);
    } catch (const InvalidArgument& e) {
        report.zone_depth = inf;
        report.note = e.what();
    }

    for (const auto* y : anomalies) {
        const double v = population_dtm(mixture, *y, setup.m, setup.q);
        report.anomaly_inf = std::min(report.anomaly_inf.value_or(inf), v);
    }
    for (const auto* x : normals) {
        const double v = population_dtm(mixture, *x, setup.m, setup.q);
        report.support_sup = std::max(report.support_sup.value_or(0.0), v);
        if (setup.normal.boundary_distance(*x) >= report.zone_depth) {
            ++report.zone_count;
            report.zone_sup = std::max(report.zone_sup.value_or(0.0), v);
        }
    }
    report.full_support_holds = *report.support_sup + setup.h < *report.anomaly_inf;
    if (report.zone_count == 0) {
        if (report.note.empty()) report.note = "safety zone contains no candidates";
    } else {
        report.holds = *report.zone_sup + setup.h < *report.anomaly_inf;
    }
    return report;
}

const TheoryQuantity* TheoryReport::find(const std::string& name) const {
    for (const auto& q : quantities) {
        if (q.name == name) return &q;
    }
    return nullptr;
}

TheoryReport compute_theory_report(const TheoryInputs& in) {
    if (in.n < 1 || in.d < 1) throw InvalidArgument("n and d must be >= 1");
    check_delta(in.delta);
    check_mass(in.m);
    if (!(in.C > 0.0)) throw InvalidArgument("C must be positive");
    if (!(in.epsilon >= 0.0 && in.epsilon < 1.0)) throw InvalidArgument("epsilon must lie in [0, 1)");
    if (!(in.h >= 0.0) || !(in.a0 > 0.0) || !(in.b > 0.0) || !(in.q >= 1.0))
        throw InvalidArgument("need h >= 0, a0 > 0, b > 0 and q >= 1");
    if (in.eta && !(*in.eta >= 0.0)) throw InvalidArgument("eta must be non-negative");

    TheoryReport report;
    report.inputs = in;
    report.k = k_from_mass(in.m, in.n);
    const double p = static_cast<double>(report.k) / static_cast<double>(in.n);

    auto add = [&](const std::string& name, auto&& compute) {
        TheoryQuantity q{name, std::nullopt, {}};
        try {
            q.value = compute();
        } catch (const InvalidArgument& e) {
            q.reason = e.what();
        }
        report.quantities.push_back(std::move(q));
    };
    const std::string needs_mass = "requires m > epsilon";

    add("beta_n", [&] { return beta_n(in.n, in.d, in.delta); });
    add("alpha_n", [&] { return alpha_n(in.n, in.delta); });
    add("p", [&] { return p; });
    add("radius_bound", [&] { return radius_bound(in.n, in.d, in.delta, p, in.C); });
    add("radius_bound_sample", [&] { return radius_bound_sample(in.n, in.delta, p, in.C); });
    add("dtm_bound", [&] { return dtm_bound(in.n, in.d, in.delta, in.m, in.C); });
    add("dtm_bound_sample", [&] { return dtm_bound_sample(in.n, in.delta, in.m, in.C); });
    add("bound_buffer", [&] { return 2.0 * dtm_bound_sample(in.n, in.delta, in.m, in.C); });

    const bool separable = in.m > in.epsilon;
    auto separation = [&](const std::string& name, auto&& compute) {
        if (separable)
            add(name, compute);
        else
            report.quantities.push_back({name, std::nullopt, needs_mass});
    };
    separation("full_support_eta", [&] { return full_support_eta(in.m, in.epsilon, in.a0, in.b, in.q, in.h); });
    separation("full_support_eta_bound_buffer", [&] {
        const double h = 2.0 * dtm_bound_sample(in.n, in.delta, in.m, in.C);
        return full_support_eta(in.m, in.epsilon, in.a0, in.b, in.q, h);
    });
    if (in.eta) {
        separation("g0", [&] { return g0_threshold(in.m, in.epsilon, *in.eta, in.h, in.b, in.q); });
    } else {
        report.quantities.push_back({"g0", std::nullopt, "requires eta"});
    }
    return report;
}

}  // namespace nnad
