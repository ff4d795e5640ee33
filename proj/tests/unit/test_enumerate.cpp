#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "helpers.hpp"
#include "mec/enumerate.hpp"
#include "mec/support_graph.hpp"

using mec::Cell;
using mec::Distribution;
using mec::Rational;

TEST_CASE("cell linearization follows the row-major layout") {
    CHECK(mec::linearize({2, 2}, {3, 3}) == 5);
    CHECK(mec::delinearize(5, {3, 3}) == Cell{2, 2});
    CHECK(mec::delinearize(1, {4, 7}) == Cell{1, 1});
    CHECK(mec::delinearize(1, {2, 3, 4}) == Cell{1, 1, 1});
    CHECK(mec::linearize({2, 1, 3}, {2, 3, 4}) == 15);
    CHECK_THROWS_AS(mec::linearize({0, 1}, {2, 2}), mec::OutOfBounds);
    CHECK_THROWS_AS(mec::linearize({1, 3}, {2, 2}), mec::OutOfBounds);
    CHECK_THROWS_AS(mec::delinearize(0, {2, 2}), mec::OutOfBounds);
    CHECK_THROWS_AS(mec::delinearize(5, {2, 2}), mec::OutOfBounds);
}

TEST_CASE("linearize round trip") {
    for (const auto& dims : std::vector<std::vector<int>>{{2, 2}, {3, 4}, {2, 3, 4}, {2, 2, 2, 2}}) {
        for (std::int64_t i = 1; i <= mec::cell_count(dims); ++i)
            CHECK(mec::linearize(mec::delinearize(i, dims), dims) == i);
    }
}

TEST_CASE("subset unranking in lexicographic order") {
    CHECK(mec::unrank_subset(1, 4, 3) == std::vector<int>{1, 2, 3});
    CHECK(mec::unrank_subset(4, 4, 3) == std::vector<int>{2, 3, 4});
    CHECK(mec::unrank_subset(3, 5, 2) == std::vector<int>{1, 4});
    CHECK_THROWS_AS(mec::unrank_subset(0, 4, 3), mec::RankOutOfRange);
    CHECK_THROWS_AS(mec::unrank_subset(5, 4, 3), mec::RankOutOfRange);
}

TEST_CASE("unrank, rank and successor agree over a full scan") {
    const int N = 9, s = 5;
    std::vector<int> sub = mec::unrank_subset(1, N, s);
    const auto total = mec::binomial(N, s).get_ui();
    std::vector<int> prev;
    for (std::uint64_t r = 1; r <= total; ++r) {
        CHECK(mec::unrank_subset(r, N, s) == sub);
        CHECK(mec::rank_subset(sub, N) == r);
        if (!prev.empty()) CHECK(prev < sub);
        prev = sub;
        const bool more = mec::next_subset(sub, N);
        CHECK(more == (r != total));
    }
}

TEST_CASE("structure matrix on pinned examples") {
    const auto a = mec::build_structure_matrix({1, 2, 3}, {2, 2});
    const std::vector<std::vector<int>> want{{1, 1, 0}, {1, 1, 1}, {1, 0, 1}};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(a.at(i, j) == Rational(want[i][j]));

    // the 4-cycle {(1,1),(1,2),(2,1),(2,2)} of the 2x3 grid is singular
    const auto b = mec::build_structure_matrix({1, 2, 4, 5}, {2, 3});
    CHECK(determinant(b) == Rational(0));

    // d = 3 row layout: (axis-1 coords, total row, axis-2, axis-3)
    const auto c = mec::build_structure_matrix({1, 2, 3, 5}, {2, 2, 2});
    // cells (1,1,1),(1,1,2),(1,2,1),(2,1,1)
    const std::vector<std::vector<int>> want3{
        {1, 1, 1, 0}, {1, 1, 1, 1}, {1, 1, 0, 1}, {1, 0, 1, 1}};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) CHECK(c.at(i, j) == Rational(want3[i][j]));

    CHECK_THROWS_AS(mec::build_structure_matrix({1, 2}, {2, 2}), mec::SizeMismatch);
}

TEST_CASE("every structure-matrix column covers its constraint rows") {
    std::mt19937 rng(3);
    for (const auto& dims :
         std::vector<std::vector<int>>{{2, 2}, {3, 4}, {5, 5}, {2, 2, 2}, {2, 3, 4}}) {
        const int N = static_cast<int>(mec::cell_count(dims));
        const int s = static_cast<int>(mec::structure_order(dims));
        std::uniform_int_distribution<std::uint64_t> pick(
            1, mec::binomial(N, s).get_ui());
        const auto subset = mec::unrank_subset(pick(rng), N, s);
        const auto a = mec::build_structure_matrix(subset, dims);
        for (int k = 0; k < s; ++k) {
            const Cell cell = mec::delinearize(subset[k], dims);
            int expect = 1; // total-mass row
            for (std::size_t t = 0; t < dims.size(); ++t)
                if (cell[t] < dims[t]) ++expect;
            Rational sum;
            for (int r = 0; r < s; ++r) sum += a.at(r, k);
            CHECK(sum == Rational(expect));
        }
    }
}

TEST_CASE("candidate solves on pinned examples") {
    const auto p = Distribution::parse({"0.6", "0.4"});
    const auto q = Distribution::parse({"0.7", "0.3"});

    const auto ok = mec::candidate_from_subset({1, 2, 3}, {p, q});
    REQUIRE(ok.status == mec::CandidateResult::Status::Accepted);
    CHECK(ok.coupling->at({1, 1}) == Rational(3, 10));
    CHECK(ok.coupling->at({1, 2}) == Rational(3, 10));
    CHECK(ok.coupling->at({2, 1}) == Rational(2, 5));
    CHECK(ok.coupling->at({2, 2}) == Rational(0));

    const auto bad = mec::candidate_from_subset({2, 3, 4}, {p, q});
    CHECK(bad.status == mec::CandidateResult::Status::Infeasible);

    const auto p23 = Distribution::parse({"0.5", "0.5"});
    const auto q23 = Distribution::parse({"0.2", "0.3", "0.5"});
    const auto sing = mec::candidate_from_subset({1, 2, 4, 5}, {p23, q23});
    CHECK(sing.status == mec::CandidateResult::Status::Singular);
}

TEST_CASE("tree criterion: det nonzero iff spanning tree, exhaustively for d = 2") {
    for (const auto& dims : std::vector<std::vector<int>>{
             {2, 2}, {2, 3}, {3, 2}, {2, 4}, {2, 5}, {3, 3}, {2, 6}, {3, 4}, {4, 3}, {6, 2}}) {
        const int N = static_cast<int>(mec::cell_count(dims));
        const int s = static_cast<int>(mec::structure_order(dims));
        std::vector<int> sub = mec::unrank_subset(1, N, s);
        int trees = 0;
        do {
            std::vector<Cell> cells;
            for (int i : sub) cells.push_back(mec::delinearize(i, dims));
            const bool tree = mec::classify(mec::SupportSet::of(dims, cells)).is_tree;
            const bool nonsingular =
                determinant(mec::build_structure_matrix(sub, dims)) != Rational(0);
            REQUIRE(tree == nonsingular);
            trees += tree;
        } while (mec::next_subset(sub, N));
        // Cayley-style count of spanning trees of K_{m,n}
        std::int64_t expected = 1;
        for (int i = 1; i < dims[0]; ++i) expected *= dims[1];
        for (int j = 1; j < dims[1]; ++j) expected *= dims[0];
        CHECK(trees == expected);
    }
}

TEST_CASE("d >= 3: completeness is necessary and trees are nonsingular") {
    for (const auto& dims : std::vector<std::vector<int>>{{2, 2, 2}, {2, 2, 3}}) {
        const int N = static_cast<int>(mec::cell_count(dims));
        const int s = static_cast<int>(mec::structure_order(dims));
        std::vector<int> sub = mec::unrank_subset(1, N, s);
        do {
            std::vector<Cell> cells;
            for (int i : sub) cells.push_back(mec::delinearize(i, dims));
            const auto cls = mec::classify(mec::SupportSet::of(dims, cells));
            const bool nonsingular =
                determinant(mec::build_structure_matrix(sub, dims)) != Rational(0);
            if (nonsingular) {
                CHECK(cls.is_complete);
                CHECK(cls.is_forest);
            }
            if (cls.is_tree && cls.is_complete) CHECK(nonsingular);
        } while (mec::next_subset(sub, N));
    }
}

TEST_CASE("enumeration on pinned examples") {
    const auto u = Distribution::parse({"1/2", "1/2"});
    const auto e1 = mec::enumerate_extremes({u, u});
    REQUIRE(e1.size() == 2);
    CHECK(e1.contains({Rational(1, 2), Rational(0), Rational(0), Rational(1, 2)}));
    CHECK(e1.contains({Rational(0), Rational(1, 2), Rational(1, 2), Rational(0)}));

    const auto p = Distribution::parse({"0.6", "0.4"});
    const auto q = Distribution::parse({"0.7", "0.3"});
    const auto e2 = mec::enumerate_extremes({p, q});
    REQUIRE(e2.size() == 2);
    CHECK(e2.contains({Rational::parse("0.6"), Rational(0), Rational::parse("0.1"),
                       Rational::parse("0.3")}));
    CHECK(e2.contains({Rational::parse("0.3"), Rational::parse("0.3"),
                       Rational::parse("0.4"), Rational(0)}));

    const auto third = Distribution::parse({"1/3", "1/3", "1/3"});
    const auto e3 = mec::enumerate_extremes({third, third});
    CHECK(e3.size() == 6); // scaled permutation matrices
    for (const auto& pt : e3.points()) {
        int nonzero = 0;
        for (const auto& v : pt.values) {
            if (v.sign() > 0) {
                CHECK(v == Rational(1, 3));
                ++nonzero;
            }
        }
        CHECK(nonzero == 3);
    }
}

TEST_CASE("budget rejection reports the exact count") {
    std::mt19937 rng(13);
    const auto u6 = testutil::random_distribution(rng, 6, 10);
    mec::EnumerateOptions opt;
    opt.budget = 1000;
    try {
        mec::enumerate_extremes({u6, u6}, opt);
        FAIL("expected BudgetExceeded");
    } catch (const mec::BudgetExceeded& e) {
        CHECK(std::string(e.what()).find("600805296") != std::string::npos);
    }
}

TEST_CASE("enumeration is invariant under prefilter and worker count") {
    std::mt19937 rng(171);
    const auto p = testutil::random_distribution(rng, 3, 10);
    const auto q = testutil::random_distribution(rng, 4, 10);
    mec::EnumerateOptions base;
    const auto reference = mec::enumerate_extremes({p, q}, base);
    for (const bool prefilter : {true, false}) {
        for (const int threads : {1, 2, 3, 7}) {
            mec::EnumerateOptions opt;
            opt.prefilter = prefilter;
            opt.threads = threads;
            const auto run = mec::enumerate_extremes({p, q}, opt);
            REQUIRE(run.size() == reference.size());
            CHECK(run.counts().scanned == reference.counts().scanned);
            CHECK(run.counts().nonsingular == reference.counts().nonsingular);
            CHECK(run.counts().feasible == reference.counts().feasible);
            for (std::size_t k = 0; k < run.size(); ++k) {
                CHECK(run.points()[k].values == reference.points()[k].values);
                CHECK(run.points()[k].witness_ranks == reference.points()[k].witness_ranks);
            }
        }
    }
    // multi-marginal instance as well
    const auto r = testutil::random_distribution(rng, 2, 10);
    const auto m1 = mec::enumerate_extremes({r, p, q});
    mec::EnumerateOptions off;
    off.prefilter = false;
    off.threads = 3;
    const auto m2 = mec::enumerate_extremes({r, p, q}, off);
    REQUIRE(m1.size() == m2.size());
    for (std::size_t k = 0; k < m1.size(); ++k)
        CHECK(m1.points()[k].values == m2.points()[k].values);
}

TEST_CASE("enumerated supports are complete forests within the size window") {
    std::mt19937 rng(333);
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = testutil::random_distribution(rng, 3, 12);
        const auto q = testutil::random_distribution(rng, 4, 12);
        const auto e = mec::enumerate_extremes({p, q});
        const int k = mec::kappa(p, q);
        for (std::size_t i = 0; i < e.size(); ++i) {
            const auto support = e.coupling_at(i).support();
            const auto cls = mec::classify(support);
            CHECK(cls.is_forest);
            CHECK(cls.is_complete);
            CHECK(mec::forest_cardinality_check(support));
            const auto sz = static_cast<std::int64_t>(support.size());
            CHECK(sz >= 3 + 4 - k);
            CHECK(sz <= 3 + 4 - 1);
        }
    }
}

TEST_CASE("dedup stores one point with every witness rank") {
    // kappa = 2 marginals: the two-component forest support arises from
    // several spanning trees, all consistent with the same coupling
    const auto u = Distribution::parse({"1/2", "1/2"});
    const auto e = mec::enumerate_extremes({u, u});
    std::set<std::uint64_t> seen;
    for (const auto& pt : e.points()) {
        CHECK(pt.witness_ranks.size() == 2); // each diagonal sits inside 2 trees
        for (const auto r : pt.witness_ranks) CHECK(seen.insert(r).second);
        CHECK(std::is_sorted(pt.witness_ranks.begin(), pt.witness_ranks.end()));
    }
    CHECK(seen.size() == 4);
}
