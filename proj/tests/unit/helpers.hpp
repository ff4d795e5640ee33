#pragma once

#include <random>
#include <vector>

#include "mec/coupling.hpp"
#include "mec/distribution.hpp"
#include "mec/rational.hpp"

namespace testutil {

using mec::Distribution;
using mec::Rational;

// Random strictly positive exact distribution with denominator <= len * max_weight.
inline Distribution random_distribution(std::mt19937& rng, int len, int max_weight = 60) {
    std::uniform_int_distribution<int> pick(1, max_weight);
    std::vector<long> w(len);
    long total = 0;
    for (auto& v : w) {
        v = pick(rng);
        total += v;
    }
    std::vector<Rational> r;
    r.reserve(len);
    for (long v : w) r.emplace_back(v, total);
    return Distribution::validate(std::move(r));
}

// Random coupling: a random positive tensor normalized to mass one,
// paired with its own exact marginals.
inline mec::Coupling random_coupling(std::mt19937& rng, const std::vector<int>& dims,
                                     int zero_percent = 30) {
    const auto n = mec::cell_count(dims);
    std::uniform_int_distribution<int> pick(1, 50);
    std::uniform_int_distribution<int> coin(0, 99);
    for (;;) {
        std::vector<long> w(n, 0);
        long total = 0;
        for (auto& v : w) {
            if (coin(rng) >= zero_percent) {
                v = pick(rng);
                total += v;
            }
        }
        if (total == 0) continue;
        std::vector<Rational> values;
        values.reserve(n);
        for (long v : w) values.emplace_back(v, total);
        const auto sums = mec::marginals_of(values, dims);
        bool positive = true;
        for (const auto& axis : sums)
            for (const auto& s : axis)
                if (s.sign() <= 0) positive = false;
        if (!positive) continue; // marginals must be strictly positive
        std::vector<Distribution> marginals;
        for (auto& axis : sums) marginals.push_back(Distribution::validate(axis));
        return mec::Coupling::create(dims, values, marginals);
    }
}

} // namespace testutil
