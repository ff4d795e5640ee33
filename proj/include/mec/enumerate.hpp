#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "mec/cells.hpp"
#include "mec/coupling.hpp"
#include "mec/distribution.hpp"
#include "mec/errors.hpp"
#include "mec/rational.hpp"
#include "mec/support_graph.hpp"

namespace mec {

inline mpz_class binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) return 0;
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return b;
}

/// The rank-th (1-based) s-subset of [N] in lexicographic order,
/// returned as ascending 1-based elements.
inline std::vector<int> unrank_subset(std::uint64_t rank, int N, int s) {
    const mpz_class total = binomial(N, s);
    if (rank < 1 || mpz_class(static_cast<unsigned long>(rank)) > total)
        throw RankOutOfRange("subset rank " + std::to_string(rank) + " outside [1, " +
                             total.get_str() + "]");
    std::vector<int> out;
    out.reserve(s);
    mpz_class rem(static_cast<unsigned long>(rank - 1));
    int c = 1;
    for (int pos = 0; pos < s; ++pos) {
        for (;; ++c) {
            const mpz_class block = binomial(N - c, s - pos - 1);
            if (rem < block) break;
            rem -= block;
        }
        out.push_back(c++);
    }
    return out;
}

/// Inverse of unrank_subset.
inline std::uint64_t rank_subset(const std::vector<int>& subset, int N) {
    const int s = static_cast<int>(subset.size());
    mpz_class rank = 1;
    int prev = 0;
    for (int pos = 0; pos < s; ++pos) {
        if (subset[pos] <= prev || subset[pos] > N)
            throw RankOutOfRange("rank_subset: elements must be ascending in [1, N]");
        for (int c = prev + 1; c < subset[pos]; ++c)
            rank += binomial(N - c, s - pos - 1);
        prev = subset[pos];
    }
    return rank.get_ui();
}

/// Advances to the lexicographic successor; false at the last subset.
inline bool next_subset(std::vector<int>& subset, int N) {
    const int s = static_cast<int>(subset.size());
    int i = s - 1;
    while (i >= 0 && subset[i] == N - (s - 1 - i)) --i;
    if (i < 0) return false;
    ++subset[i];
    for (int j = i + 1; j < s; ++j) subset[j] = subset[j - 1] + 1;
    return true;
}

inline std::int64_t structure_order(const std::vector<int>& dims) {
    std::int64_t s = 1 - static_cast<std::int64_t>(dims.size());
    for (int m : dims) s += m;
    return s;
}

/// The 0/1 structure matrix of a candidate subset. Rows are the axis-1
/// hyperplanes 1..m_1-1, then the all-ones total-mass row, then the
/// axis-t hyperplanes 1..m_t-1 for t = 2..d; the column of a cell has a
/// 1 in every row whose hyperplane contains it plus the total row.
/// For d = 2 this reduces to rows (p_1..p_{m-1}, total, q_1..q_{n-1}).
inline RatMatrix build_structure_matrix(const std::vector<int>& subset,
                                        const std::vector<int>& dims) {
    const std::int64_t order = structure_order(dims);
    if (static_cast<std::int64_t>(subset.size()) != order)
        throw SizeMismatch("structure matrix: subset size " + std::to_string(subset.size()) +
                           ", expected " + std::to_string(order));
    RatMatrix a(order, order);
    std::vector<std::int64_t> row_offset(dims.size());
    row_offset[0] = 0;
    for (std::size_t t = 1; t < dims.size(); ++t)
        row_offset[t] = (t == 1 ? dims[0] : row_offset[t - 1] + dims[t - 1] - 1);
    const std::int64_t total_row = dims[0] - 1;
    for (std::size_t k = 0; k < subset.size(); ++k) {
        const Cell cell = delinearize(subset[k], dims);
        a.at(total_row, k) = 1;
        if (cell[0] < dims[0]) a.at(cell[0] - 1, k) = 1;
        for (std::size_t t = 1; t < dims.size(); ++t)
            if (cell[t] < dims[t]) a.at(row_offset[t] + cell[t] - 1, k) = 1;
    }
    return a;
}

/// Right-hand side matching the structure-matrix row layout:
/// (p^1_1..p^1_{m_1-1}, 1, p^2_1..p^2_{m_2-1}, ..., p^d_1..p^d_{m_d-1}).
inline std::vector<Rational> structure_rhs(const std::vector<Distribution>& marginals) {
    std::vector<Rational> y;
    for (std::size_t k = 0; k + 1 < marginals[0].size(); ++k) y.push_back(marginals[0][k]);
    y.push_back(Rational(1));
    for (std::size_t t = 1; t < marginals.size(); ++t)
        for (std::size_t k = 0; k + 1 < marginals[t].size(); ++k) y.push_back(marginals[t][k]);
    return y;
}

struct CandidateResult {
    enum class Status { Accepted, Singular, Infeasible };
    Status status;
    std::optional<Coupling> coupling; // engaged iff Accepted
};

inline std::vector<int> dims_of(const std::vector<Distribution>& marginals) {
    if (marginals.size() < 2) throw ShapeMismatch("need at least two marginals");
    std::vector<int> dims;
    dims.reserve(marginals.size());
    for (const auto& m : marginals) dims.push_back(static_cast<int>(m.size()));
    return dims;
}

/// Solves the structure system for one candidate subset: accepted when
/// the matrix is nonsingular and the exact solution is componentwise
/// nonnegative; the coupling then takes value x_k at the k-th cell.
inline CandidateResult candidate_from_subset(const std::vector<int>& subset,
                                             const std::vector<Distribution>& marginals) {
    const std::vector<int> dims = dims_of(marginals);
    const RatMatrix a = build_structure_matrix(subset, dims);
    const auto x = solve_linear(a, structure_rhs(marginals));
    if (!x) return {CandidateResult::Status::Singular, std::nullopt};
    for (const auto& v : *x)
        if (v.sign() < 0) return {CandidateResult::Status::Infeasible, std::nullopt};
    std::vector<std::pair<std::int64_t, Rational>> cells;
    cells.reserve(subset.size());
    for (std::size_t k = 0; k < subset.size(); ++k)
        cells.emplace_back(subset[k], (*x)[k]);
    return {CandidateResult::Status::Accepted,
            Coupling::from_cells(dims, cells, marginals)};
}

struct EnumerateOptions {
    bool prefilter = true;       // skip subsets that are not spanning trees
    int threads = 1;
    std::uint64_t budget = 100'000'000; // max candidate ranks scanned
};

struct ExtremePoint {
    std::vector<Rational> values;            // dense tensor
    std::vector<std::uint64_t> witness_ranks; // ascending subset ranks
};

struct EnumerationCounts {
    std::uint64_t scanned = 0;
    std::uint64_t nonsingular = 0;
    std::uint64_t feasible = 0;
};

/// The deduplicated extreme point set C_e, each point carrying every
/// witness subset rank that produced it.
class ExtremePointSet {
public:
    ExtremePointSet(std::vector<int> dims, std::vector<Distribution> marginals,
                    std::vector<ExtremePoint> points, EnumerationCounts counts)
        : dims_(std::move(dims)), marginals_(std::move(marginals)),
          points_(std::move(points)), counts_(counts) {}

    const std::vector<int>& dims() const { return dims_; }
    const std::vector<Distribution>& marginals() const { return marginals_; }
    const std::vector<ExtremePoint>& points() const { return points_; }
    const EnumerationCounts& counts() const { return counts_; }
    std::size_t size() const { return points_.size(); }

    Coupling coupling_at(std::size_t k) const {
        return Coupling::create(dims_, points_[k].values, marginals_);
    }

    bool contains(const std::vector<Rational>& values) const {
        for (const auto& p : points_)
            if (p.values == values) return true;
        return false;
    }

private:
    std::vector<int> dims_;
    std::vector<Distribution> marginals_;
    std::vector<ExtremePoint> points_;
    EnumerationCounts counts_;
};

namespace detail {

struct RangeResult {
    std::vector<std::pair<std::uint64_t, std::vector<Rational>>> accepted;
    std::uint64_t nonsingular = 0;
    std::uint64_t feasible = 0;
};

// Scans the contiguous rank range [lo, hi]; pure function of the range.
inline RangeResult scan_rank_range(std::uint64_t lo, std::uint64_t hi, int N, int s,
                                   const std::vector<int>& dims,
                                   const std::vector<Distribution>& marginals,
                                   bool prefilter) {
    RangeResult out;
    std::vector<Cell> coords(N + 1);
    for (int i = 1; i <= N; ++i) coords[i] = delinearize(i, dims);
    std::vector<int> subset = unrank_subset(lo, N, s);
    for (std::uint64_t r = lo; r <= hi; ++r, next_subset(subset, N)) {
        if (prefilter) {
            // d = 2: size-s subsets are nonsingular exactly when complete and
            // acyclic (the tree criterion). d >= 3 keeps only the provably
            // necessary completeness test; singular subsets that slip through
            // are rejected by the exact solve.
            LineGraph g(dims);
            const bool full_criterion = dims.size() == 2;
            for (int i : subset) {
                g.add_cell(coords[i]);
                if (full_criterion && g.cyclic) break;
            }
            if (!g.complete() || (full_criterion && g.cyclic)) continue;
        }
        CandidateResult res = candidate_from_subset(subset, marginals);
        if (res.status == CandidateResult::Status::Singular) continue;
        ++out.nonsingular;
        if (res.status == CandidateResult::Status::Infeasible) continue;
        ++out.feasible;
        out.accepted.emplace_back(r, res.coupling->flat());
    }
    return out;
}

} // namespace detail

/// Scans all binom(N, s) candidate subsets (optionally prefiltered by
/// the tree test), collects every accepted coupling and deduplicates by
/// exact tensor equality. The result is independent of worker count.
inline ExtremePointSet enumerate_extremes(const std::vector<Distribution>& marginals,
                                          const EnumerateOptions& options = {}) {
    const std::vector<int> dims = dims_of(marginals);
    const std::int64_t n_cells = cell_count(dims);
    const std::int64_t s = structure_order(dims);
    const mpz_class total_z = binomial(n_cells, s);
    if (total_z > mpz_class(static_cast<unsigned long>(options.budget)))
        throw BudgetExceeded("enumeration would scan " + total_z.get_str() +
                             " candidate ranks, budget is " + std::to_string(options.budget));
    const std::uint64_t total = total_z.get_ui();
    const int N = static_cast<int>(n_cells);

    const int workers = std::max(1, std::min<int>(options.threads,
                                                  static_cast<int>(std::min<std::uint64_t>(
                                                      total, 1u << 10))));
    std::vector<detail::RangeResult> results(workers);
    if (workers == 1) {
        results[0] = detail::scan_rank_range(1, total, N, static_cast<int>(s), dims,
                                             marginals, options.prefilter);
    } else {
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (total + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const std::uint64_t lo = 1 + chunk * w;
            const std::uint64_t hi = std::min<std::uint64_t>(total, chunk * (w + 1));
            if (lo > hi) continue;
            pool.emplace_back([&, w, lo, hi] {
                results[w] = detail::scan_rank_range(lo, hi, N, static_cast<int>(s), dims,
                                                     marginals, options.prefilter);
            });
        }
        for (auto& t : pool) t.join();
    }

    EnumerationCounts counts;
    counts.scanned = total;
    std::vector<ExtremePoint> points;
    std::map<std::vector<Rational>, std::size_t> index;
    for (const auto& r : results) {
        counts.nonsingular += r.nonsingular;
        counts.feasible += r.feasible;
        for (const auto& [rank, values] : r.accepted) {
            auto [it, inserted] = index.try_emplace(values, points.size());
            if (inserted)
                points.push_back(ExtremePoint{values, {rank}});
            else
                points[it->second].witness_ranks.push_back(rank);
        }
    }
    return ExtremePointSet(dims, marginals, std::move(points), counts);
}

} // namespace mec
