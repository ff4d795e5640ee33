#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mec/cells.hpp"
#include "mec/coupling.hpp"
#include "mec/distribution.hpp"
#include "mec/errors.hpp"
#include "mec/support_graph.hpp"

namespace mec {

/// Reconstructs the unique coupling consistent with a spanning tree by
/// iterated peeling: a cell that is the sole remaining cell on one of
/// its lines is forced to that line's residual mass. Infeasible as soon
/// as a forced value is negative. Independent of the linear-solve path
/// and used to cross-validate it.
inline std::optional<Coupling> peel_coupling(const SupportSet& tree,
                                             const std::vector<Distribution>& marginals) {
    const std::vector<int>& dims = tree.dims;
    if (marginals.size() != dims.size())
        throw ShapeMismatch("peel_coupling: marginal count does not match axes");
    for (std::size_t t = 0; t < dims.size(); ++t)
        if (static_cast<std::size_t>(dims[t]) != marginals[t].size())
            throw ShapeMismatch("peel_coupling: marginal length does not match axis size");
    const Classification cls = classify(tree);
    std::int64_t want = 1 - static_cast<std::int64_t>(dims.size());
    for (int m : dims) want += m;
    if (!cls.is_tree || static_cast<std::int64_t>(tree.size()) != want)
        throw NotATree("peel_coupling needs a spanning tree of size " + std::to_string(want));

    // residual[t][z]: mass still to place on line (axis t, coordinate z)
    std::vector<std::vector<Rational>> residual(dims.size());
    std::vector<std::vector<int>> line_cells(dims.size());
    for (std::size_t t = 0; t < dims.size(); ++t) {
        residual[t].assign(marginals[t].begin(), marginals[t].end());
        line_cells[t].assign(dims[t], 0);
    }
    for (const Cell& c : tree.cells)
        for (std::size_t t = 0; t < dims.size(); ++t) ++line_cells[t][c[t] - 1];

    std::vector<char> done(tree.size(), 0);
    std::vector<std::pair<std::int64_t, Rational>> assigned;
    assigned.reserve(tree.size());
    for (std::size_t step = 0; step < tree.size(); ++step) {
        // cells are sorted, so the first peelable hit is the lexicographically
        // smallest one; a sole-cell line always exists on a tree
        std::size_t pick = tree.size();
        std::size_t axis = 0;
        for (std::size_t k = 0; k < tree.size() && pick == tree.size(); ++k) {
            if (done[k]) continue;
            const Cell& c = tree.cells[k];
            for (std::size_t t = 0; t < dims.size(); ++t)
                if (line_cells[t][c[t] - 1] == 1) {
                    pick = k;
                    axis = t;
                    break;
                }
        }
        // A stall means no line ever pins the remaining cells down. For
        // d >= 3 that happens exactly on incomplete trees, which cannot
        // carry strictly positive marginals, so the tree is infeasible.
        if (pick == tree.size()) return std::nullopt;
        const Cell& c = tree.cells[pick];
        const Rational value = residual[axis][c[axis] - 1];
        if (value.sign() < 0) return std::nullopt; // Infeasible
        done[pick] = 1;
        for (std::size_t t = 0; t < dims.size(); ++t) {
            residual[t][c[t] - 1] -= value;
            --line_cells[t][c[t] - 1];
        }
        assigned.emplace_back(linearize(c, dims), value);
    }
    for (const auto& axis_res : residual)
        for (const auto& r : axis_res)
            if (r.sign() != 0) return std::nullopt;
    return Coupling::from_cells(dims, assigned, marginals);
}

} // namespace mec
