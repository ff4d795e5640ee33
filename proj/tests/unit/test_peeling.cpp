#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"
#include "mec/enumerate.hpp"
#include "mec/peeling.hpp"

using mec::Cell;
using mec::Distribution;
using mec::Rational;
using mec::SupportSet;

TEST_CASE("peeling on pinned examples") {
    const auto p = Distribution::parse({"0.6", "0.4"});
    const auto q = Distribution::parse({"0.7", "0.3"});

    const auto ok = mec::peel_coupling(SupportSet::of({2, 2}, {{1, 1}, {1, 2}, {2, 1}}), {p, q});
    REQUIRE(ok.has_value());
    CHECK(ok->at({1, 1}) == Rational(3, 10));
    CHECK(ok->at({1, 2}) == Rational(3, 10));
    CHECK(ok->at({2, 1}) == Rational(2, 5));

    const auto bad =
        mec::peel_coupling(SupportSet::of({2, 2}, {{1, 2}, {2, 1}, {2, 2}}), {p, q});
    CHECK_FALSE(bad.has_value());

    CHECK_THROWS_AS(mec::peel_coupling(SupportSet::of({2, 2}, {{1, 1}, {2, 2}}), {p, q}),
                    mec::NotATree);
}

namespace {

// walks every size-s subset, returning those classified as spanning trees
std::vector<std::vector<int>> spanning_trees(const std::vector<int>& dims) {
    const int N = static_cast<int>(mec::cell_count(dims));
    const int s = static_cast<int>(mec::structure_order(dims));
    std::vector<std::vector<int>> out;
    std::vector<int> sub = mec::unrank_subset(1, N, s);
    do {
        std::vector<Cell> cells;
        for (int i : sub) cells.push_back(mec::delinearize(i, dims));
        if (mec::classify(SupportSet::of(dims, cells)).is_tree) out.push_back(sub);
    } while (mec::next_subset(sub, N));
    return out;
}

SupportSet support_of(const std::vector<int>& subset, const std::vector<int>& dims) {
    std::vector<Cell> cells;
    for (int i : subset) cells.push_back(mec::delinearize(i, dims));
    return SupportSet::of(dims, cells);
}

} // namespace

TEST_CASE("peeling agrees with the linear solve on every spanning tree") {
    std::mt19937 rng(555);
    const std::vector<std::vector<int>> grids{{2, 2}, {2, 3}, {3, 3}, {2, 5},
                                              {2, 2, 2}, {2, 2, 3}};
    for (const auto& dims : grids) {
        const auto trees = spanning_trees(dims);
        for (int round = 0; round < 4; ++round) {
            std::vector<Distribution> marginals;
            for (int m : dims) marginals.push_back(testutil::random_distribution(rng, m, 20));
            for (const auto& tree : trees) {
                const auto solved = mec::candidate_from_subset(tree, marginals);
                const auto peeled = mec::peel_coupling(support_of(tree, dims), marginals);
                if (solved.status == mec::CandidateResult::Status::Accepted) {
                    REQUIRE(peeled.has_value());
                    CHECK(peeled->flat() == solved.coupling->flat());
                } else {
                    CHECK_FALSE(peeled.has_value());
                }
            }
        }
    }
}

TEST_CASE("incomplete d = 3 trees are infeasible on both routes") {
    // a spanning-size tree of the 2x2x3 lattice missing the z=3 hyperplane
    const SupportSet t = SupportSet::of(
        {2, 2, 3}, {{1, 1, 1}, {1, 1, 2}, {1, 2, 1}, {2, 1, 2}, {2, 2, 1}});
    REQUIRE(mec::classify(t).is_tree);
    REQUIRE_FALSE(mec::classify(t).is_complete);
    std::mt19937 rng(9);
    std::vector<Distribution> marginals;
    for (int m : std::vector<int>{2, 2, 3})
        marginals.push_back(testutil::random_distribution(rng, m, 10));
    CHECK_FALSE(mec::peel_coupling(t, marginals).has_value());
    std::vector<int> subset;
    for (const auto& c : t.cells) subset.push_back(static_cast<int>(mec::linearize(c, t.dims)));
    std::sort(subset.begin(), subset.end());
    CHECK(mec::candidate_from_subset(subset, marginals).status ==
          mec::CandidateResult::Status::Singular);
}

TEST_CASE("peeled value is independent of the peeling order") {
    // reverse-order peeling oracle, same rules with the largest peelable cell
    const auto peel_reverse = [](const SupportSet& tree,
                                 const std::vector<Distribution>& marginals)
        -> std::optional<std::vector<Rational>> {
        const auto& dims = tree.dims;
        std::vector<std::vector<Rational>> residual(dims.size());
        std::vector<std::vector<int>> line_cells(dims.size());
        for (std::size_t t = 0; t < dims.size(); ++t) {
            residual[t].assign(marginals[t].begin(), marginals[t].end());
            line_cells[t].assign(dims[t], 0);
        }
        for (const Cell& c : tree.cells)
            for (std::size_t t = 0; t < dims.size(); ++t) ++line_cells[t][c[t] - 1];
        std::vector<char> done(tree.size(), 0);
        std::vector<Rational> values(mec::cell_count(dims), Rational(0));
        for (std::size_t step = 0; step < tree.size(); ++step) {
            std::size_t pick = tree.size();
            std::size_t axis = 0;
            for (std::size_t k = tree.size(); k-- > 0;) {
                if (done[k]) continue;
                for (std::size_t t = dims.size(); t-- > 0;)
                    if (line_cells[t][tree.cells[k][t] - 1] == 1) {
                        pick = k;
                        axis = t;
                        break;
                    }
                if (pick != tree.size()) break;
            }
            if (pick == tree.size()) return std::nullopt;
            const Cell& c = tree.cells[pick];
            const Rational v = residual[axis][c[axis] - 1];
            if (v.sign() < 0) return std::nullopt;
            done[pick] = 1;
            values[mec::linearize(c, dims) - 1] = v;
            for (std::size_t t = 0; t < dims.size(); ++t) {
                residual[t][c[t] - 1] -= v;
                --line_cells[t][c[t] - 1];
            }
        }
        for (const auto& axis_res : residual)
            for (const auto& r : axis_res)
                if (r.sign() != 0) return std::nullopt;
        return values;
    };

    std::mt19937 rng(808);
    for (const auto& dims : std::vector<std::vector<int>>{{3, 3}, {2, 2, 2}}) {
        const auto trees = spanning_trees(dims);
        std::vector<Distribution> marginals;
        for (int m : dims) marginals.push_back(testutil::random_distribution(rng, m, 15));
        for (const auto& tree : trees) {
            const auto a = mec::peel_coupling(support_of(tree, dims), marginals);
            const auto b = peel_reverse(support_of(tree, dims), marginals);
            CHECK(a.has_value() == b.has_value());
            if (a && b) CHECK(a->flat() == *b);
        }
    }
}
