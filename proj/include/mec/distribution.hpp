#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "mec/errors.hpp"
#include "mec/rational.hpp"

namespace mec {

/// Strictly positive exact probability vector (an element of P+_m).
/// Zero entries are rejected; callers must strip them explicitly.
class Distribution {
public:
    /// Checks the P+ invariants: length >= 2, every weight > 0, exact sum 1.
    static Distribution validate(std::vector<Rational> raw) {
        if (raw.size() < 2)
            throw LengthMismatch("distribution needs at least 2 entries, got " +
                                 std::to_string(raw.size()));
        Rational sum;
        for (std::size_t k = 0; k < raw.size(); ++k) {
            if (raw[k].sign() <= 0)
                throw NonPositiveEntry("NonPositiveEntry: entry " + std::to_string(k + 1) +
                                       " is " + raw[k].fraction_str());
            sum += raw[k];
        }
        if (!(sum == Rational(1))) {
            const Rational deficit = Rational(1) - sum;
            throw SumNotOne("SumNotOne: deficit " + deficit.fraction_str());
        }
        return Distribution(std::move(raw));
    }

    static Distribution parse(const std::vector<std::string>& texts) {
        std::vector<Rational> w;
        w.reserve(texts.size());
        for (const auto& t : texts) w.push_back(Rational::parse(t));
        return validate(std::move(w));
    }

    std::size_t size() const { return w_.size(); }
    const Rational& operator[](std::size_t k) const { return w_[k]; }
    const std::vector<Rational>& weights() const { return w_; }

    auto begin() const { return w_.begin(); }
    auto end() const { return w_.end(); }

    friend bool operator==(const Distribution& a, const Distribution& b) {
        return a.w_ == b.w_;
    }

private:
    explicit Distribution(std::vector<Rational> w) : w_(std::move(w)) {}
    std::vector<Rational> w_;
};

enum class MajorizationOrder { Equal, StrictlyBelow, StrictlyAbove, Incomparable };

inline const char* to_string(MajorizationOrder o) {
    switch (o) {
        case MajorizationOrder::Equal: return "Equal";
        case MajorizationOrder::StrictlyBelow: return "StrictlyBelow";
        case MajorizationOrder::StrictlyAbove: return "StrictlyAbove";
        default: return "Incomparable";
    }
}

/// Compares sorted-descending prefix sums: StrictlyBelow means x is
/// strictly majorized by y (x < y in the majorization order).
inline MajorizationOrder majorizes(std::vector<Rational> x, std::vector<Rational> y) {
    if (x.size() != y.size())
        throw LengthMismatch("majorizes: lengths " + std::to_string(x.size()) + " vs " +
                             std::to_string(y.size()));
    Rational sx, sy;
    for (const auto& v : x) sx += v;
    for (const auto& v : y) sy += v;
    if (!(sx == sy))
        throw SumMismatch("majorizes: totals " + sx.fraction_str() + " vs " +
                          sy.fraction_str());
    std::sort(x.begin(), x.end(), std::greater<>());
    std::sort(y.begin(), y.end(), std::greater<>());
    if (x == y) return MajorizationOrder::Equal;
    bool below = true, above = true;
    Rational fx, fy;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        fx += x[i];
        fy += y[i];
        if (fx > fy) below = false;
        if (fx < fy) above = false;
    }
    if (below) return MajorizationOrder::StrictlyBelow;
    if (above) return MajorizationOrder::StrictlyAbove;
    return MajorizationOrder::Incomparable;
}

struct KappaResult {
    int value = 1;
    // Witness arrangements: sigma[i] is the 1-based index into p placed at
    // position i, likewise pi for q; common holds the shared prefix sums.
    std::vector<int> sigma;
    std::vector<int> pi;
    std::vector<Rational> common;
};

namespace detail {

// All distinct proper-prefix-sum chains over arrangements of the weights,
// each with one witness arrangement (1-based source indices).
inline std::vector<std::pair<std::vector<Rational>, std::vector<int>>>
prefix_chains(const Distribution& d) {
    std::vector<std::pair<Rational, int>> items;
    for (std::size_t k = 0; k < d.size(); ++k) items.emplace_back(d[k], static_cast<int>(k + 1));
    std::sort(items.begin(), items.end());
    std::vector<std::pair<std::vector<Rational>, std::vector<int>>> out;
    std::set<std::vector<Rational>> seen;
    // next_permutation over (value, index) pairs walks every distinct
    // arrangement; chains depend only on values, so dedup on the chain.
    do {
        std::vector<Rational> chain;
        chain.reserve(items.size() - 1);
        Rational acc;
        for (std::size_t k = 0; k + 1 < items.size(); ++k) {
            acc += items[k].first;
            chain.push_back(acc);
        }
        std::sort(chain.begin(), chain.end());
        if (seen.insert(chain).second) {
            std::vector<int> arrangement;
            arrangement.reserve(items.size());
            for (const auto& it : items) arrangement.push_back(it.second);
            out.emplace_back(std::move(chain), std::move(arrangement));
        }
    } while (std::next_permutation(items.begin(), items.end()));
    return out;
}

inline std::uint64_t factorial_capped(std::size_t n, std::uint64_t cap) {
    std::uint64_t f = 1;
    for (std::size_t k = 2; k <= n; ++k) {
        if (f > cap / k) return cap + 1;
        f *= k;
    }
    return f;
}

} // namespace detail

inline constexpr std::uint64_t kKappaDefaultBudget = 1625702400; // 8! * 8!

/// Structure constant: 1 + the largest number of common prefix-sum values
/// over all permutation pairs of the marginals. Brute force over distinct
/// prefix chains; TooLarge when m! * n! exceeds the budget.
inline KappaResult kappa_with_witness(const Distribution& p, const Distribution& q,
                                      std::uint64_t budget = kKappaDefaultBudget) {
    const std::uint64_t fp = detail::factorial_capped(p.size(), budget);
    const std::uint64_t fq = detail::factorial_capped(q.size(), budget);
    if (fp > budget || fq > budget || fp > budget / fq)
        throw TooLarge("kappa: m! * n! exceeds budget " + std::to_string(budget));
    const auto chains_p = detail::prefix_chains(p);
    const auto chains_q = detail::prefix_chains(q);
    KappaResult best;
    const int max_common =
        static_cast<int>(std::min(p.size(), q.size())) - 1;
    for (const auto& [cp, ap] : chains_p) {
        for (const auto& [cq, aq] : chains_q) {
            std::vector<Rational> common;
            std::set_intersection(cp.begin(), cp.end(), cq.begin(), cq.end(),
                                  std::back_inserter(common));
            if (static_cast<int>(common.size()) + 1 > best.value) {
                best.value = static_cast<int>(common.size()) + 1;
                best.sigma = ap;
                best.pi = aq;
                best.common = common;
                if (static_cast<int>(common.size()) == max_common) return best;
            }
        }
    }
    if (best.sigma.empty()) {
        best.sigma = chains_p.front().second;
        best.pi = chains_q.front().second;
    }
    return best;
}

inline int kappa(const Distribution& p, const Distribution& q,
                 std::uint64_t budget = kKappaDefaultBudget) {
    return kappa_with_witness(p, q, budget).value;
}

} // namespace mec
