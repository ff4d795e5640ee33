#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "mec/cells.hpp"
#include "mec/errors.hpp"
#include "mec/rational.hpp"

namespace mec {

/// A set of lattice cells viewed as a subgraph of G_{m_1,...,m_d}:
/// two distinct cells are adjacent iff they agree on all but one
/// coordinate (collinear pairs at any distance).
struct SupportSet {
    std::vector<int> dims;
    std::vector<Cell> cells; // sorted lexicographically, unique

    static SupportSet of(std::vector<int> dims, std::vector<Cell> cells) {
        SupportSet s{std::move(dims), std::move(cells)};
        for (const auto& c : s.cells) linearize(c, s.dims); // bounds check
        std::sort(s.cells.begin(), s.cells.end());
        s.cells.erase(std::unique(s.cells.begin(), s.cells.end()), s.cells.end());
        return s;
    }

    std::size_t size() const { return cells.size(); }
};

struct Classification {
    bool is_forest = false;
    bool is_tree = false;
    bool is_complete = false;
    int component_count = 0;
};

namespace detail {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    }
    // Returns false when the two were already connected.
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};

// Incidence structure over the 1-dimensional lattice lines (fix all
// coordinates but one). Cells on a common line are pairwise adjacent,
// an adjacent pair shares exactly one line, and a circuit in the
// lattice sense exists iff some cell joins two lines that are already
// connected. For d = 2 the lines are the rows and columns.
struct LineGraph {
    std::vector<int> dims;
    std::vector<std::int64_t> line_offset;  // per axis, start of its line nodes
    std::vector<int> hyper_offset;          // per axis, start of its coordinate slots
    UnionFind uf;
    std::vector<char> line_used;
    std::vector<char> hyper_covered; // axis-coordinate occupancy, for completeness
    bool cyclic = false;

    explicit LineGraph(const std::vector<int>& dims_in)
        : dims(dims_in), line_offset(dims.size() + 1, 0),
          hyper_offset(dims.size() + 1, 0), uf(0) {
        const std::int64_t cells = cell_count(dims);
        for (std::size_t t = 0; t < dims.size(); ++t) {
            line_offset[t + 1] = line_offset[t] + cells / dims[t];
            hyper_offset[t + 1] = hyper_offset[t] + dims[t];
        }
        uf = UnionFind(static_cast<int>(line_offset.back()));
        line_used.assign(line_offset.back(), 0);
        hyper_covered.assign(hyper_offset.back(), 0);
    }

    // The axis-t line through a cell, indexed by the remaining coordinates.
    int line_node(const Cell& c, std::size_t axis) const {
        std::int64_t idx = 0;
        for (std::size_t u = 0; u < c.size(); ++u) {
            if (u == axis) continue;
            idx = idx * dims[u] + (c[u] - 1);
        }
        return static_cast<int>(line_offset[axis] + idx);
    }

    void add_cell(const Cell& c) {
        const int base = line_node(c, 0);
        line_used[base] = 1;
        hyper_covered[hyper_offset[0] + c[0] - 1] = 1;
        for (std::size_t t = 1; t < c.size(); ++t) {
            const int v = line_node(c, t);
            line_used[v] = 1;
            hyper_covered[hyper_offset[t] + c[t] - 1] = 1;
            if (!uf.unite(base, v)) cyclic = true;
        }
    }

    bool complete() const {
        return std::all_of(hyper_covered.begin(), hyper_covered.end(),
                           [](char v) { return v != 0; });
    }
};

} // namespace detail

inline Classification classify(const SupportSet& s) {
    detail::LineGraph g(s.dims);
    for (const auto& c : s.cells) g.add_cell(c);
    Classification r;
    r.is_forest = !g.cyclic;
    r.is_complete = g.complete();
    std::vector<int> roots;
    for (int v = 0; v < static_cast<int>(g.line_used.size()); ++v)
        if (g.line_used[v]) roots.push_back(g.uf.find(v));
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    r.component_count = static_cast<int>(roots.size());
    r.is_tree = r.is_forest && r.component_count == 1 && !s.cells.empty();
    return r;
}

/// Circuit test per the bipartite/incidence equivalence: collinear
/// triples do not close a circuit, two lines meeting twice do.
inline bool has_circuit(const SupportSet& s) { return !classify(s).is_forest; }

/// Checks the forest cardinality identity: for a forest with k
/// components, completeness holds iff |V| = sum(m_t) - d - k + 2.
/// Returns whether the two sides of the biconditional agree.
inline bool forest_cardinality_check(const SupportSet& s) {
    const Classification c = classify(s);
    if (!c.is_forest) throw NotForest("forest_cardinality_check on a cyclic support");
    std::int64_t expected = 2 - static_cast<std::int64_t>(s.dims.size()) - c.component_count;
    for (int m : s.dims) expected += m;
    return c.is_complete == (static_cast<std::int64_t>(s.size()) == expected);
}

/// The V1/V2/V3 split of a nonnegative matrix's support: isolated cells
/// carry their whole row and column, passable cells exactly one of the
/// two, turning cells neither.
struct VertexPartition {
    std::vector<Cell> isolated;     // V1
    std::vector<Cell> row_passable; // V2^r
    std::vector<Cell> col_passable; // V2^c
    std::vector<Cell> turning;      // V3
};

inline VertexPartition vertex_partition(const RatMatrix& values) {
    if (values.rows() < 1 || values.cols() < 1)
        throw NotTwoMarginal("vertex_partition needs a nonempty matrix");
    const std::size_t m = values.rows(), n = values.cols();
    std::vector<Rational> row_sum(m), col_sum(n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            row_sum[i] += values.at(i, j);
            col_sum[j] += values.at(i, j);
        }
    VertexPartition p;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const Rational& v = values.at(i, j);
            if (v.sign() <= 0) continue;
            const bool row_hit = row_sum[i] == v;
            const bool col_hit = col_sum[j] == v;
            Cell c{static_cast<int>(i + 1), static_cast<int>(j + 1)};
            if (row_hit && col_hit) p.isolated.push_back(c);
            else if (row_hit) p.row_passable.push_back(c);
            else if (col_hit) p.col_passable.push_back(c);
            else p.turning.push_back(c);
        }
    return p;
}

} // namespace mec
