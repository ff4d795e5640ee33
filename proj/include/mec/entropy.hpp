#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "mec/coupling.hpp"
#include "mec/enumerate.hpp"
#include "mec/errors.hpp"
#include "mec/rational.hpp"

namespace mec {

struct Shannon {
    double base = 2.0;
};

struct Renyi {
    double alpha;
    double base = 2.0;
};

struct Tsallis {
    double alpha;
};

/// Generic (Phi, h)-entropy H(p) = phi(sum h(p_i)). The monotonicity
/// requirements on the pair are the caller's responsibility; see
/// check_phi_h for a sampled spot-check.
struct PhiH {
    std::function<double(double)> phi;
    std::function<double(double)> h;
};

using EntropyFunctional = std::variant<Shannon, Renyi, Tsallis, PhiH>;

namespace detail {

inline void require_alpha(double alpha) {
    if (alpha == 1.0) throw AlphaIsOne("alpha = 1 is excluded for Renyi/Tsallis");
    if (alpha < 0.0) throw AlphaIsOne("alpha must be >= 0, got " + std::to_string(alpha));
}

inline double log_base(double x, double base) {
    return base == 2.0 ? std::log2(x) : std::log(x) / std::log(base);
}

} // namespace detail

/// Entropy of an exact value vector; rational-to-float conversion
/// happens here and nowhere earlier. Zero cells contribute nothing to
/// the built-in functionals (0 log 0 = 0, h(0) = 0); a generic PhiH is
/// evaluated over every cell including zeros.
inline double evaluate(const EntropyFunctional& f, const std::vector<Rational>& values) {
    const double out = std::visit(
        [&](const auto& fn) -> double {
            using T = std::decay_t<decltype(fn)>;
            if constexpr (std::is_same_v<T, Shannon>) {
                double acc = 0.0;
                for (const auto& v : values) {
                    if (v.sign() <= 0) continue;
                    const double x = v.to_double();
                    acc -= x * detail::log_base(x, fn.base);
                }
                return acc;
            } else if constexpr (std::is_same_v<T, Renyi>) {
                detail::require_alpha(fn.alpha);
                double acc = 0.0;
                for (const auto& v : values)
                    if (v.sign() > 0) acc += std::pow(v.to_double(), fn.alpha);
                return detail::log_base(acc, fn.base) / (1.0 - fn.alpha);
            } else if constexpr (std::is_same_v<T, Tsallis>) {
                detail::require_alpha(fn.alpha);
                double acc = 0.0;
                for (const auto& v : values)
                    if (v.sign() > 0) acc += std::pow(v.to_double(), fn.alpha);
                return (acc - 1.0) / (1.0 - fn.alpha);
            } else {
                double acc = 0.0;
                for (const auto& v : values) acc += fn.h(v.to_double());
                return fn.phi(acc);
            }
        },
        f);
    if (!std::isfinite(out)) throw NonFiniteResult("entropy evaluated to a non-finite value");
    return out;
}

inline double evaluate(const EntropyFunctional& f, const Coupling& p) {
    return evaluate(f, p.flat());
}

/// Samples the monotonicity conditions on a (Phi, h) pair and returns
/// human-readable warnings for every violated sub-condition. A sampled
/// check, not a proof.
inline std::vector<std::string> check_phi_h(const PhiH& f, int samples_per_condition = 1000) {
    std::vector<std::string> warnings;
    const int n = std::max(4, samples_per_condition);

    // range of sums phi will see, estimated from h over [0, 1]
    double h_lo = 0.0, h_hi = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double v = f.h(static_cast<double>(k) / n);
        h_lo = std::min(h_lo, v);
        h_hi = std::max(h_hi, v);
    }
    const double lo = std::min(h_lo * 2, -1.0), hi = std::max(h_hi * 2, 1.0);
    int up = 0, down = 0;
    for (int k = 0; k < n; ++k) {
        const double a = f.phi(lo + (hi - lo) * k / n);
        const double b = f.phi(lo + (hi - lo) * (k + 1) / n);
        if (a < b) ++up;
        if (a > b) ++down;
    }
    if (up && down)
        warnings.push_back("phi is not monotone on [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
    if (!up && !down) warnings.push_back("phi looks constant; it must be strictly monotone");

    const int grid = std::max(2, static_cast<int>(std::sqrt(static_cast<double>(n))));
    bool hc_bad = false, comp_bad = false;
    for (int ci = 1; ci <= grid && !(hc_bad && comp_bad); ++ci) {
        const double c = static_cast<double>(ci) / grid;
        int hup = 0, hdown = 0, cup = 0, cdown = 0;
        for (int k = 0; k < grid; ++k) {
            const double x0 = c / 2 * k / grid;
            const double x1 = c / 2 * (k + 1) / grid;
            const double a = f.h(x0) + f.h(c - x0);
            const double b = f.h(x1) + f.h(c - x1);
            if (a < b) ++hup;
            if (a > b) ++hdown;
            if (f.phi(a) < f.phi(b)) ++cup;
            if (f.phi(a) > f.phi(b)) ++cdown;
        }
        if (hup && hdown && !hc_bad) {
            warnings.push_back("h_c is not monotone on [0, c/2] at c = " + std::to_string(c));
            hc_bad = true;
        }
        if (cdown && !comp_bad) {
            warnings.push_back("phi(h_c) is not increasing on [0, c/2] at c = " +
                               std::to_string(c));
            comp_bad = true;
        }
    }
    return warnings;
}

/// Minimization outcome over an extreme point set: the least value, all
/// points within the tie tolerance of it (ordered by first witness
/// rank), and whether the tied minimizers share one exact value profile.
struct MinimizationReport {
    double minimum = 0.0;
    std::vector<std::size_t> minimizer_indices;
    std::vector<double> values; // H_k per extreme point
    bool exact_profile_tie = false;
};

inline MinimizationReport min_entropy(const EntropyFunctional& f, const ExtremePointSet& e,
                                      double tie_tol = 1e-9) {
    if (e.size() == 0) throw EmptySet("min_entropy over an empty extreme point set");
    MinimizationReport report;
    report.values.reserve(e.size());
    for (const auto& p : e.points()) report.values.push_back(evaluate(f, p.values));
    report.minimum = *std::min_element(report.values.begin(), report.values.end());
    for (std::size_t k = 0; k < report.values.size(); ++k)
        if (report.values[k] <= report.minimum + tie_tol)
            report.minimizer_indices.push_back(k);

    auto profile = [&](std::size_t k) {
        std::vector<Rational> v = e.points()[k].values;
        std::sort(v.begin(), v.end());
        return v;
    };
    report.exact_profile_tie = true;
    const auto first = profile(report.minimizer_indices.front());
    for (std::size_t j = 1; j < report.minimizer_indices.size(); ++j)
        if (profile(report.minimizer_indices[j]) != first) {
            report.exact_profile_tie = false;
            break;
        }
    return report;
}

} // namespace mec
