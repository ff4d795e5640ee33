#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mec/coupling.hpp"
#include "mec/distribution.hpp"
#include "mec/errors.hpp"
#include "mec/rational.hpp"
#include "mec/support_graph.hpp"

namespace mec {

enum class TransformKind { Lemma1, Lemma2, Lemma2xN };

struct TransformStep {
    TransformKind kind;
    std::vector<int> rows; // 1-based rows touched
    std::vector<int> cols; // 1-based columns touched
    Rational b;            // transferred mass
    std::string note;      // relabeling applied, if any
};

namespace detail {

inline RatMatrix mat2(const Rational& a00, const Rational& a01, const Rational& a10,
                      const Rational& a11) {
    RatMatrix m(2, 2);
    m.at(0, 0) = a00;
    m.at(0, 1) = a01;
    m.at(1, 0) = a10;
    m.at(1, 1) = a11;
    return m;
}

inline void require_2x2(const RatMatrix& a, const char* who) {
    if (a.rows() != 2 || a.cols() != 2)
        throw SizeMismatch(std::string(who) + " needs a 2x2 matrix");
}

} // namespace detail

/// Lemma-1 move on a 2x2 block: when one diagonal dominates
/// (max over it >= max over the other), transfer b = min of the other
/// diagonal onto it. Entropy never increases; strictly decreases when
/// b > 0. The dominant diagonal is chosen by larger b, ties to the main
/// diagonal.
inline std::optional<std::pair<RatMatrix, Rational>>
lemma1_transform(const RatMatrix& a) {
    detail::require_2x2(a, "lemma1_transform");
    const bool main_ok = max(a.at(0, 0), a.at(1, 1)) >= max(a.at(0, 1), a.at(1, 0));
    const bool anti_ok = max(a.at(0, 1), a.at(1, 0)) >= max(a.at(0, 0), a.at(1, 1));
    const Rational b_main = min(a.at(0, 1), a.at(1, 0));
    const Rational b_anti = min(a.at(0, 0), a.at(1, 1));
    const bool use_main = main_ok && (!anti_ok || b_main >= b_anti);
    if (!use_main && !anti_ok) return std::nullopt;
    if (use_main) {
        return std::make_pair(detail::mat2(a.at(0, 0) + b_main, a.at(0, 1) - b_main,
                                           a.at(1, 0) - b_main, a.at(1, 1) + b_main),
                              b_main);
    }
    return std::make_pair(detail::mat2(a.at(0, 0) - b_anti, a.at(0, 1) + b_anti,
                                       a.at(1, 0) + b_anti, a.at(1, 1) - b_anti),
                          b_anti);
}

/// Lemma-2 move on a 2x2 block: under some dihedral relabeling the
/// labeled matrix satisfies row1 >= row2, col1 >= col2 and a12 >= a21;
/// then b = a21 moves onto the labeled diagonal. Applies the first
/// relabeling (identity, column swap, row swap, both, then the same
/// four transposed) whose preconditions hold.
inline std::optional<std::pair<RatMatrix, Rational>>
lemma2_transform(const RatMatrix& a) {
    detail::require_2x2(a, "lemma2_transform");
    for (int tr = 0; tr < 2; ++tr)
        for (int rs = 0; rs < 2; ++rs)
            for (int cs = 0; cs < 2; ++cs) {
                auto orig = [&](int i, int j) -> const Rational& {
                    if (rs) i = 1 - i;
                    if (cs) j = 1 - j;
                    if (tr) std::swap(i, j);
                    return a.at(i, j);
                };
                if (!(orig(0, 0) + orig(0, 1) >= orig(1, 0) + orig(1, 1))) continue;
                if (!(orig(0, 0) + orig(1, 0) >= orig(0, 1) + orig(1, 1))) continue;
                if (!(orig(0, 1) >= orig(1, 0))) continue;
                const Rational b = orig(1, 0);
                // the labeled diagonal is the main one iff row/col swaps cancel
                const Rational s = rs == cs ? 1 : -1;
                return std::make_pair(detail::mat2(a.at(0, 0) + s * b, a.at(0, 1) - s * b,
                                                   a.at(1, 0) - s * b, a.at(1, 1) + s * b),
                                      b);
            }
    return std::nullopt;
}

/// 2xn move: one row is zero except a single entry a21 with
/// tail <= a21 <= full row sum of the other row (tail = that sum minus
/// the shared column). Merges the full row into the shared column and
/// drops its tail onto the sparse row.
inline std::optional<RatMatrix> lemma_2xn_transform(const RatMatrix& a) {
    if (a.rows() != 2 || a.cols() < 2)
        throw SizeMismatch("lemma_2xn_transform needs a 2 x n matrix, n >= 2");
    const std::size_t n = a.cols();
    for (std::size_t single : {std::size_t{1}, std::size_t{0}}) {
        const std::size_t full = 1 - single;
        std::size_t j0 = n;
        bool one_positive = true;
        for (std::size_t j = 0; j < n; ++j) {
            if (a.at(single, j).sign() > 0) {
                if (j0 != n) { one_positive = false; break; }
                j0 = j;
            }
        }
        if (!one_positive || j0 == n) continue;
        Rational tail;
        for (std::size_t j = 0; j < n; ++j)
            if (j != j0) tail += a.at(full, j);
        const Rational& pivot = a.at(single, j0);
        if (!(tail <= pivot && pivot <= tail + a.at(full, j0))) continue;
        RatMatrix out(2, n);
        out.at(full, j0) = a.at(full, j0) + tail;
        out.at(single, j0) = pivot - tail;
        for (std::size_t j = 0; j < n; ++j)
            if (j != j0) out.at(single, j) = a.at(full, j);
        return out;
    }
    return std::nullopt;
}

/// Greedy coupling: repeatedly match the largest remaining row mass
/// with the largest remaining column mass (ties to the smallest index).
/// Always lands on an extreme point.
inline Coupling greedy_coupling(const Distribution& p, const Distribution& q) {
    std::vector<Rational> rp(p.begin(), p.end());
    std::vector<Rational> rq(q.begin(), q.end());
    const auto argmax = [](const std::vector<Rational>& v) {
        std::size_t best = v.size();
        for (std::size_t k = 0; k < v.size(); ++k)
            if (v[k].sign() > 0 && (best == v.size() || v[k] > v[best])) best = k;
        return best;
    };
    std::vector<std::pair<std::int64_t, Rational>> cells;
    const std::vector<int> dims{static_cast<int>(p.size()), static_cast<int>(q.size())};
    for (;;) {
        const std::size_t i = argmax(rp);
        const std::size_t j = argmax(rq);
        if (i == rp.size() || j == rq.size()) break;
        const Rational v = min(rp[i], rq[j]);
        cells.emplace_back(linearize({static_cast<int>(i + 1), static_cast<int>(j + 1)}, dims), v);
        rp[i] -= v;
        rq[j] -= v;
    }
    return Coupling::from_cells(dims, cells, {p, q});
}

namespace detail {

// A candidate move is committed only when it strictly decreases every
// strictly Schur-concave entropy, which the exact majorization order
// decides: the moved matrix must strictly majorize the original.
inline bool strictly_improves(const std::vector<Rational>& before,
                              const std::vector<Rational>& after) {
    return majorizes(before, after) == MajorizationOrder::StrictlyBelow;
}

inline std::vector<Rational> flat_of(const RatMatrix& m) { return m.entries(); }

// Every distinct b > 0 transfer authorized by some Lemma-2 relabeling;
// at most one per diagonal.
inline std::vector<std::pair<RatMatrix, Rational>> lemma2_candidates(const RatMatrix& a) {
    std::vector<std::pair<RatMatrix, Rational>> out;
    bool seen_main = false, seen_anti = false;
    for (int tr = 0; tr < 2; ++tr)
        for (int rs = 0; rs < 2; ++rs)
            for (int cs = 0; cs < 2; ++cs) {
                auto orig = [&](int i, int j) -> const Rational& {
                    if (rs) i = 1 - i;
                    if (cs) j = 1 - j;
                    if (tr) std::swap(i, j);
                    return a.at(i, j);
                };
                if (!(orig(0, 0) + orig(0, 1) >= orig(1, 0) + orig(1, 1))) continue;
                if (!(orig(0, 0) + orig(1, 0) >= orig(0, 1) + orig(1, 1))) continue;
                if (!(orig(0, 1) >= orig(1, 0))) continue;
                const Rational b = orig(1, 0);
                if (b.sign() <= 0) continue;
                const bool main_diag = rs == cs;
                if ((main_diag && seen_main) || (!main_diag && seen_anti)) continue;
                (main_diag ? seen_main : seen_anti) = true;
                const Rational s = main_diag ? 1 : -1;
                out.emplace_back(mat2(a.at(0, 0) + s * b, a.at(0, 1) - s * b,
                                      a.at(1, 0) - s * b, a.at(1, 1) + s * b),
                                 b);
            }
    return out;
}

} // namespace detail

/// Applies strict Lemma-1 / Lemma-2 / 2xn moves in a fixed scan order
/// (restarting after each committed move) until none applies. Each
/// committed move strictly raises the value profile in the majorization
/// order, so the loop terminates; max_steps guards it regardless.
inline std::pair<Coupling, std::vector<TransformStep>>
local_optimize(const Coupling& input, int max_steps = 10000) {
    if (input.d() != 2) throw NotTwoMarginal("local_optimize handles d = 2 only");
    RatMatrix w = input.matrix();
    const std::size_t m = w.rows(), n = w.cols();
    std::vector<TransformStep> steps;

    const auto sub2 = [&](std::size_t i1, std::size_t i2, std::size_t j1, std::size_t j2) {
        return detail::mat2(w.at(i1, j1), w.at(i1, j2), w.at(i2, j1), w.at(i2, j2));
    };
    const auto put2 = [&](std::size_t i1, std::size_t i2, std::size_t j1, std::size_t j2,
                          const RatMatrix& a) {
        w.at(i1, j1) = a.at(0, 0);
        w.at(i1, j2) = a.at(0, 1);
        w.at(i2, j1) = a.at(1, 0);
        w.at(i2, j2) = a.at(1, 1);
    };

    bool moved = true;
    while (moved) {
        if (static_cast<int>(steps.size()) > max_steps)
            throw StepLimitExceeded("local_optimize exceeded " + std::to_string(max_steps) +
                                    " steps");
        moved = false;

        for (int pass = 0; pass < 2 && !moved; ++pass) {
            const bool lemma1 = pass == 0;
            for (std::size_t i1 = 0; i1 < m && !moved; ++i1)
                for (std::size_t i2 = i1 + 1; i2 < m && !moved; ++i2)
                    for (std::size_t j1 = 0; j1 < n && !moved; ++j1)
                        for (std::size_t j2 = j1 + 1; j2 < n && !moved; ++j2) {
                            const RatMatrix a = sub2(i1, i2, j1, j2);
                            std::vector<std::pair<RatMatrix, Rational>> candidates;
                            if (lemma1) {
                                const auto r = lemma1_transform(a);
                                if (r && r->second.sign() > 0) candidates.push_back(*r);
                            } else {
                                candidates = detail::lemma2_candidates(a);
                            }
                            const std::vector<Rational> before = detail::flat_of(w);
                            const Rational saved[4] = {w.at(i1, j1), w.at(i1, j2),
                                                       w.at(i2, j1), w.at(i2, j2)};
                            for (const auto& [next, b] : candidates) {
                                put2(i1, i2, j1, j2, next);
                                if (detail::strictly_improves(before, detail::flat_of(w))) {
                                    steps.push_back(
                                        {lemma1 ? TransformKind::Lemma1 : TransformKind::Lemma2,
                                         {static_cast<int>(i1 + 1), static_cast<int>(i2 + 1)},
                                         {static_cast<int>(j1 + 1), static_cast<int>(j2 + 1)},
                                         b,
                                         ""});
                                    moved = true;
                                    break;
                                }
                                w.at(i1, j1) = saved[0];
                                w.at(i1, j2) = saved[1];
                                w.at(i2, j1) = saved[2];
                                w.at(i2, j2) = saved[3];
                            }
                        }
        }
        if (moved) continue;

        // 2xn moves, rows then columns
        for (int transposed = 0; transposed < 2 && !moved; ++transposed) {
            const std::size_t rows = transposed ? n : m;
            const std::size_t cols = transposed ? m : n;
            const auto val = [&](std::size_t i, std::size_t j) -> Rational& {
                return transposed ? w.at(j, i) : w.at(i, j);
            };
            for (std::size_t is = 0; is < rows && !moved; ++is)
                for (std::size_t ifull = 0; ifull < rows && !moved; ++ifull) {
                    if (is == ifull) continue;
                    for (std::size_t j0 = 0; j0 < cols && !moved; ++j0) {
                        if (val(is, j0).sign() <= 0) continue;
                        std::vector<std::size_t> cand;
                        for (std::size_t j = 0; j < cols; ++j)
                            if (j != j0 && val(ifull, j).sign() > 0 && val(is, j).sign() == 0)
                                cand.push_back(j);
                        if (cand.empty()) continue;
                        const std::size_t limit = std::size_t{1} << cand.size();
                        for (std::size_t mask = 1; mask < limit && !moved; ++mask) {
                            Rational tail;
                            for (std::size_t k = 0; k < cand.size(); ++k)
                                if (mask & (std::size_t{1} << k)) tail += val(ifull, cand[k]);
                            const Rational& pivot = val(is, j0);
                            if (!(tail <= pivot && pivot <= tail + val(ifull, j0))) continue;
                            if (tail.sign() == 0 || pivot == tail + val(ifull, j0)) continue;
                            const std::vector<Rational> before = detail::flat_of(w);
                            val(ifull, j0) += tail;
                            val(is, j0) -= tail;
                            std::vector<int> touched_cols{static_cast<int>(j0 + 1)};
                            for (std::size_t k = 0; k < cand.size(); ++k)
                                if (mask & (std::size_t{1} << k)) {
                                    val(is, cand[k]) = val(ifull, cand[k]);
                                    val(ifull, cand[k]) = 0;
                                    touched_cols.push_back(static_cast<int>(cand[k] + 1));
                                }
                            // strict by construction: tail > 0 and pivot < full sum
                            steps.push_back({TransformKind::Lemma2xN,
                                             {static_cast<int>(ifull + 1),
                                              static_cast<int>(is + 1)},
                                             touched_cols, tail,
                                             transposed ? "columns" : "rows"});
                            moved = true;
                            if (!detail::strictly_improves(before, detail::flat_of(w)))
                                throw Error("2xn move failed to improve strictly");
                        }
                    }
                }
        }
    }
    return {Coupling::create(input.dims(), detail::flat_of(w), input.marginals()), steps};
}

struct CheckResult {
    bool ok = true;
    std::string witness;
};

struct LocalOptReport {
    CheckResult complete_forest; // support is a complete forest (tree when kappa = 1)
    CheckResult row_dichotomy;   // Theorem item 2 on every qualifying row submatrix
    CheckResult col_dichotomy;   // same on the transpose
    CheckResult support_size;    // m + n - kappa <= |V| <= m + n - 1
    bool all_ok() const {
        return complete_forest.ok && row_dichotomy.ok && col_dichotomy.ok && support_size.ok;
    }
};

namespace detail {

// Dichotomy over every 2 x n1 one-positive-row submatrix, taken as the
// exact condition the theorem's proof needs: no column subset S of the
// full row may put the sparse row's entry a21 inside the strict merge
// window [tail_S, tail_S + a11) with tail_S > 0.
inline CheckResult dichotomy_check(const RatMatrix& w, bool transposed) {
    const std::size_t rows = transposed ? w.cols() : w.rows();
    const std::size_t cols = transposed ? w.rows() : w.cols();
    const auto val = [&](std::size_t i, std::size_t j) -> const Rational& {
        return transposed ? w.at(j, i) : w.at(i, j);
    };
    for (std::size_t ifull = 0; ifull < rows; ++ifull)
        for (std::size_t is = 0; is < rows; ++is) {
            if (is == ifull) continue;
            for (std::size_t j0 = 0; j0 < cols; ++j0) {
                if (val(is, j0).sign() <= 0) continue;
                std::vector<std::size_t> tail_cols;
                for (std::size_t j = 0; j < cols; ++j)
                    if (j != j0 && val(ifull, j).sign() > 0 && val(is, j).sign() == 0)
                        tail_cols.push_back(j);
                if (tail_cols.empty()) continue;
                const Rational& pivot = val(is, j0);
                const Rational upper_gap = val(ifull, j0); // a11
                const std::size_t limit = std::size_t{1} << tail_cols.size();
                for (std::size_t mask = 1; mask < limit; ++mask) {
                    Rational tail;
                    for (std::size_t k = 0; k < tail_cols.size(); ++k)
                        if (mask & (std::size_t{1} << k)) tail += val(ifull, tail_cols[k]);
                    if (tail <= pivot && pivot < tail + upper_gap) {
                        const char* what = transposed ? "columns" : "rows";
                        return {false,
                                std::string("strict 2xn move on ") + what + " (" +
                                    std::to_string(ifull + 1) + "," + std::to_string(is + 1) +
                                    ") sharing line " + std::to_string(j0 + 1)};
                    }
                }
            }
        }
    return {true, ""};
}

} // namespace detail

/// Checks the structural characterization of local optimality:
/// complete-forest support (tree when kappa = 1), the 2 x n1 dichotomy
/// on rows and columns, and the support-size window from the structure
/// constant.
inline LocalOptReport verify_local_optimal(const Coupling& p, int kappa_value) {
    if (p.d() != 2) throw NotTwoMarginal("verify_local_optimal handles d = 2 only");
    const RatMatrix w = p.matrix();
    const SupportSet support = p.support();
    const Classification cls = classify(support);
    LocalOptReport report;

    if (!cls.is_forest)
        report.complete_forest = {false, "support contains a circuit"};
    else if (!cls.is_complete)
        report.complete_forest = {false, "support misses a row or column"};
    else if (kappa_value == 1 && !cls.is_tree)
        report.complete_forest = {false, "kappa = 1 but support is disconnected"};

    report.row_dichotomy = detail::dichotomy_check(w, false);
    report.col_dichotomy = detail::dichotomy_check(w, true);

    const std::int64_t size = static_cast<std::int64_t>(support.size());
    const std::int64_t mn = w.rows() + w.cols();
    if (size < mn - kappa_value || size > mn - 1)
        report.support_size = {false, "|V| = " + std::to_string(size) + " outside [" +
                                          std::to_string(mn - kappa_value) + ", " +
                                          std::to_string(mn - 1) + "]"};
    return report;
}

} // namespace mec
