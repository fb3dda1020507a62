#include "affine/dynamics.hpp"
#include "affine/errors.hpp"

#include <cmath>
#include <numbers>

namespace affine {

namespace {

constexpr double kThreshold = 1e-12;
constexpr double kSearchLimit = 1e3;

double bisect(auto&& f, double lo, double hi) {
    double flo = f(lo);
    for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::string_view to_string(PlanarVerdict v) {
    switch (v) {
        case PlanarVerdict::Bounded: return "Bounded";
        case PlanarVerdict::Unbounded: return "Unbounded";
        case PlanarVerdict::Threshold: return "Threshold";
    }
    return "?";
}

double planar_effective_potential(double m, double n_coupling, double A, double x) {
    if (A == 0.0) throw DomainError("planar potential needs A != 0");
    const double ch = std::cosh(0.5 * x);
    double v = -n_coupling * n_coupling / (16.0 * A * ch * ch);
    if (m != 0.0) {
        if (x == 0.0) throw DegenerateInertia("planar potential singular at x = 0 with m != 0");
        const double sh = std::sinh(0.5 * x);
        v += m * m / (16.0 * A * sh * sh);
    }
    return v;
}

double planar_potential_minimum(double m, double n_coupling, double A) {
    if (!(std::abs(m) < std::abs(n_coupling))) throw DomainError("planar potential has no minimum unless |m| < |n|");
    (void)A;
    return 2.0 * std::atanh(std::sqrt(std::abs(m) / std::abs(n_coupling)));
}

PlanarClassification classify_planar(double m, double n_coupling, std::optional<double> energy, double A) {
    PlanarClassification out{PlanarVerdict::Unbounded, m, n_coupling, std::nullopt};
    const double gap = std::abs(m) - std::abs(n_coupling);
    if (std::abs(gap) <= kThreshold)
        out.verdict = PlanarVerdict::Threshold;
    else if (gap < 0.0)
        out.verdict = PlanarVerdict::Bounded;
    if (out.verdict != PlanarVerdict::Bounded || !energy) return out;

    const double E = *energy;
    const double xm = planar_potential_minimum(m, n_coupling, A);
    auto excess = [&](double x) { return planar_effective_potential(m, n_coupling, A, x) - E; };
    if (!(excess(xm) < 0.0)) return out;

    double hi = std::max(1.0, 2.0 * xm);
    while (excess(hi) < 0.0 && hi < kSearchLimit) hi *= 2.0;
    if (excess(hi) < 0.0) return out;
    const double outer = bisect(excess, xm, hi);

    double inner = -outer;
    if (m != 0.0) {
        double lo = 0.5 * xm;
        while (excess(lo) < 0.0) lo *= 0.5;
        inner = bisect(excess, lo, xm);
    }
    out.turning_points = std::make_pair(inner, outer);
    return out;
}

double planar_period(double m, double n_coupling, double A, double energy) {
    const PlanarClassification c = classify_planar(m, n_coupling, energy, A);
    if (!c.turning_points) throw DomainError("no closed orbit at this energy");
    const auto [lo, hi] = *c.turning_points;
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    // x = mid + half sin(u) removes the inverse-square-root endpoint singularities.
    constexpr int nodes = 4000;
    const double du = std::numbers::pi / nodes;
    double sum = 0.0;
    for (int i = 0; i < nodes; ++i) {
        const double u = -0.5 * std::numbers::pi + (i + 0.5) * du;
        const double x = mid + half * std::sin(u);
        const double gap = energy - planar_effective_potential(m, n_coupling, A, x);
        if (gap > 0.0) sum += std::sqrt(A / gap) * half * std::cos(u) * du;
    }
    return sum;
}

}  // namespace affine
