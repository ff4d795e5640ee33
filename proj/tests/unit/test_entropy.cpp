#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "mec/entropy.hpp"
#include "mec/local_opt.hpp"

using Catch::Matchers::WithinAbs;
using mec::Coupling;
using mec::Distribution;
using mec::EntropyFunctional;
using mec::Rational;

namespace {

std::vector<Rational> rats(const std::vector<const char*>& texts) {
    std::vector<Rational> out;
    for (const char* t : texts) out.push_back(Rational::parse(t));
    return out;
}

const std::vector<Rational> kExample51 = rats({"0.5", "0.2", "0.2", "0.1"});
const std::vector<Rational> kExample57c1 =
    rats({"0.35", "0.15", "0.25", "0.05", "0.08", "0.06", "0.01", "0.05"});

} // namespace

TEST_CASE("shannon entropy on pinned values") {
    CHECK_THAT(mec::evaluate(mec::Shannon{}, rats({"1/2", "1/2", "0", "0"})),
               WithinAbs(1.0, 1e-12));
    CHECK_THAT(mec::evaluate(mec::Shannon{}, kExample51), WithinAbs(1.760964, 1e-6));
    // base change
    CHECK_THAT(mec::evaluate(mec::Shannon{std::exp(1.0)}, rats({"1/2", "1/2"})),
               WithinAbs(std::log(2.0), 1e-12));
    // degenerate distribution has zero entropy
    CHECK(mec::evaluate(mec::Shannon{}, rats({"1", "0", "0"})) == 0.0);
}

TEST_CASE("renyi and tsallis on pinned table values") {
    CHECK_THAT(mec::evaluate(mec::Renyi{2.0}, kExample57c1), WithinAbs(2.167475, 1e-5));
    CHECK_THAT(mec::evaluate(mec::Tsallis{0.5}, kExample57c1), WithinAbs(3.107823, 1e-5));
    CHECK_THAT(mec::evaluate(mec::Renyi{0.1}, kExample57c1), WithinAbs(2.935792, 1e-5));
    CHECK_THROWS_AS(mec::evaluate(mec::Renyi{1.0}, kExample51), mec::AlphaIsOne);
    CHECK_THROWS_AS(mec::evaluate(mec::Tsallis{1.0}, kExample51), mec::AlphaIsOne);
}

TEST_CASE("built-ins agree with their phi-h form") {
    const mec::PhiH renyi_like{[](double x) { return std::log2(x) / (1.0 - 2.0); },
                               [](double x) { return x * x; }};
    const mec::PhiH shannon_like{[](double x) { return x; },
                                 [](double x) { return x > 0 ? -x * std::log2(x) : 0.0; }};
    CHECK_THAT(mec::evaluate(EntropyFunctional(renyi_like), kExample57c1),
               WithinAbs(mec::evaluate(mec::Renyi{2.0}, kExample57c1), 1e-12));
    CHECK_THAT(mec::evaluate(EntropyFunctional(shannon_like), kExample51),
               WithinAbs(mec::evaluate(mec::Shannon{}, kExample51), 1e-12));
    CHECK(mec::check_phi_h(shannon_like).empty());
    CHECK(mec::check_phi_h(renyi_like).empty());
    // a pair violating monotonicity draws a warning
    const mec::PhiH bad{[](double x) { return x * x; }, [](double x) { return x; }};
    CHECK_FALSE(mec::check_phi_h(bad).empty());
}

TEST_CASE("entropy is symmetric and bounded") {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        auto values = testutil::random_coupling(rng, {3, 3}).flat();
        const double h = mec::evaluate(mec::Shannon{}, values);
        CHECK(h >= 0.0);
        CHECK(h <= std::log2(9.0) + 1e-12);
        std::shuffle(values.begin(), values.end(), rng);
        CHECK_THAT(mec::evaluate(mec::Shannon{}, values), WithinAbs(h, 1e-9));
    }
}

TEST_CASE("renyi and tsallis approach shannon as alpha approaches one") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const auto d = testutil::random_distribution(rng, 5, 30);
        const std::vector<Rational> v(d.begin(), d.end());
        const double shannon = mec::evaluate(mec::Shannon{}, v);
        for (const double alpha : {1.0 - 1e-4, 1.0 + 1e-4}) {
            CHECK_THAT(mec::evaluate(mec::Renyi{alpha}, v), WithinAbs(shannon, 0.01));
            // Tsallis converges to Shannon in nats
            CHECK_THAT(mec::evaluate(mec::Tsallis{alpha}, v) / std::log(2.0),
                       WithinAbs(shannon, 0.01));
        }
    }
}

TEST_CASE("schur concavity: strict majorization order reverses entropy order") {
    std::mt19937 rng(41);
    int hits = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const auto a = testutil::random_coupling(rng, {2, 3}).flat();
        const auto b = testutil::random_coupling(rng, {2, 3}).flat();
        if (mec::majorizes(a, b) != mec::MajorizationOrder::StrictlyBelow) continue;
        ++hits;
        for (const EntropyFunctional& f :
             {EntropyFunctional(mec::Shannon{}), EntropyFunctional(mec::Renyi{0.5}),
              EntropyFunctional(mec::Renyi{2.0}), EntropyFunctional(mec::Tsallis{0.5}),
              EntropyFunctional(mec::Tsallis{2.0})}) {
            CHECK(mec::evaluate(f, b) <= mec::evaluate(f, a) + 1e-12);
        }
    }
    CHECK(hits > 20);
}

TEST_CASE("lemma-1 moves never raise any built-in entropy") {
    std::mt19937 rng(43);
    for (int trial = 0; trial < 200; ++trial) {
        const Coupling c = testutil::random_coupling(rng, {3, 3});
        const auto w = c.matrix();
        mec::RatMatrix sub(2, 2);
        sub.at(0, 0) = w.at(0, 1);
        sub.at(0, 1) = w.at(0, 2);
        sub.at(1, 0) = w.at(1, 1);
        sub.at(1, 1) = w.at(1, 2);
        const auto moved = mec::lemma1_transform(sub);
        if (!moved || moved->second.sign() == 0) continue;
        std::vector<Rational> after = c.flat();
        after[1] = moved->first.at(0, 0);
        after[2] = moved->first.at(0, 1);
        after[4] = moved->first.at(1, 0);
        after[5] = moved->first.at(1, 1);
        for (const EntropyFunctional& f :
             {EntropyFunctional(mec::Shannon{}), EntropyFunctional(mec::Renyi{2.0}),
              EntropyFunctional(mec::Tsallis{0.5})}) {
            CHECK(mec::evaluate(f, after) <= mec::evaluate(f, c.flat()) + 1e-12);
        }
    }
}

TEST_CASE("min_entropy reports all tied minimizers in witness order") {
    const auto u = Distribution::parse({"1/2", "1/2"});
    const auto e = mec::enumerate_extremes({u, u});
    const auto rep = mec::min_entropy(mec::Shannon{}, e);
    CHECK_THAT(rep.minimum, WithinAbs(1.0, 1e-12));
    REQUIRE(rep.minimizer_indices.size() == 2);
    CHECK(rep.exact_profile_tie);
    CHECK(rep.minimizer_indices[0] < rep.minimizer_indices[1]);
    CHECK(rep.values.size() == 2);
}

TEST_CASE("min_entropy on an empty set is an error") {
    const auto u = Distribution::parse({"1/2", "1/2"});
    const auto e = mec::enumerate_extremes({u, u});
    mec::ExtremePointSet empty(e.dims(), e.marginals(), {}, {});
    CHECK_THROWS_AS(mec::min_entropy(mec::Shannon{}, empty), mec::EmptySet);
}
