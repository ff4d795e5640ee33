#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mec/errors.hpp"

namespace mec {

/// A cell of the lattice [m_1] x ... x [m_d], 1-based coordinates.
using Cell = std::vector<int>;

inline std::int64_t cell_count(const std::vector<int>& dims) {
    std::int64_t n = 1;
    for (int m : dims) n *= m;
    return n;
}

inline std::string cell_str(const Cell& c) {
    std::string s = "(";
    for (std::size_t t = 0; t < c.size(); ++t) {
        if (t) s += ",";
        s += std::to_string(c[t]);
    }
    return s + ")";
}

/// Row-major linearization of the cell lattice onto [1, prod(dims)].
/// For d = 2 this is i = (t-1)*n + r.
inline std::int64_t linearize(const Cell& cell, const std::vector<int>& dims) {
    if (cell.size() != dims.size())
        throw OutOfBounds("linearize: cell arity " + std::to_string(cell.size()) +
                          " vs " + std::to_string(dims.size()) + " axes");
    std::int64_t i = 0;
    for (std::size_t t = 0; t < dims.size(); ++t) {
        if (cell[t] < 1 || cell[t] > dims[t])
            throw OutOfBounds("linearize: coordinate " + std::to_string(cell[t]) +
                              " outside axis " + std::to_string(t + 1));
        i = i * dims[t] + (cell[t] - 1);
    }
    return i + 1;
}

inline Cell delinearize(std::int64_t i, const std::vector<int>& dims) {
    const std::int64_t n = cell_count(dims);
    if (i < 1 || i > n)
        throw OutOfBounds("delinearize: index " + std::to_string(i) +
                          " outside [1, " + std::to_string(n) + "]");
    Cell cell(dims.size());
    std::int64_t rem = i - 1;
    for (std::size_t t = dims.size(); t-- > 0;) {
        cell[t] = static_cast<int>(rem % dims[t]) + 1;
        rem /= dims[t];
    }
    return cell;
}

} // namespace mec
