#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mec/cells.hpp"
#include "mec/distribution.hpp"
#include "mec/errors.hpp"
#include "mec/support_graph.hpp"

namespace mec {

/// Axis marginals of a dense tensor: entry z of axis t is the sum over
/// the hyperplane {cells with coordinate t equal to z}.
inline std::vector<std::vector<Rational>> marginals_of(const std::vector<Rational>& values,
                                                       const std::vector<int>& dims) {
    const std::int64_t n = cell_count(dims);
    if (static_cast<std::int64_t>(values.size()) != n)
        throw ShapeMismatch("marginals_of: " + std::to_string(values.size()) +
                            " values for a lattice of " + std::to_string(n) + " cells");
    std::vector<std::vector<Rational>> out(dims.size());
    for (std::size_t t = 0; t < dims.size(); ++t) out[t].assign(dims[t], Rational(0));
    std::int64_t stride = n;
    for (std::size_t t = 0; t < dims.size(); ++t) {
        stride /= dims[t];
        for (std::int64_t i = 0; i < n; ++i)
            out[t][(i / stride) % dims[t]] += values[i];
    }
    return out;
}

/// Exact coupling of d >= 2 marginals: a dense nonnegative rational
/// tensor whose axis sums reproduce the marginals exactly.
class Coupling {
public:
    static Coupling create(std::vector<int> dims, std::vector<Rational> values,
                           std::vector<Distribution> marginals) {
        if (dims.size() < 2)
            throw ShapeMismatch("coupling needs d >= 2 axes");
        if (marginals.size() != dims.size())
            throw ShapeMismatch("coupling: " + std::to_string(marginals.size()) +
                                " marginals for " + std::to_string(dims.size()) + " axes");
        for (std::size_t t = 0; t < dims.size(); ++t)
            if (static_cast<std::size_t>(dims[t]) != marginals[t].size())
                throw ShapeMismatch("coupling: axis " + std::to_string(t + 1) +
                                    " size does not match its marginal");
        for (const auto& v : values)
            if (v.sign() < 0)
                throw MarginalMismatch("coupling holds a negative value " + v.fraction_str());
        const auto sums = marginals_of(values, dims);
        for (std::size_t t = 0; t < dims.size(); ++t)
            for (std::size_t z = 0; z < sums[t].size(); ++z)
                if (!(sums[t][z] == marginals[t][z]))
                    throw MarginalMismatch(
                        "coupling: axis " + std::to_string(t + 1) + " coordinate " +
                        std::to_string(z + 1) + " sums to " + sums[t][z].fraction_str() +
                        ", marginal says " + marginals[t][z].fraction_str());
        return Coupling(std::move(dims), std::move(values), std::move(marginals));
    }

    /// Builds the dense tensor from (1-based linear index, value) pairs,
    /// all other cells zero.
    static Coupling from_cells(std::vector<int> dims,
                               const std::vector<std::pair<std::int64_t, Rational>>& cells,
                               std::vector<Distribution> marginals) {
        std::vector<Rational> values(cell_count(dims));
        for (const auto& [i, v] : cells) {
            if (i < 1 || i > static_cast<std::int64_t>(values.size()))
                throw OutOfBounds("coupling cell index " + std::to_string(i));
            values[i - 1] += v;
        }
        return create(std::move(dims), std::move(values), std::move(marginals));
    }

    std::size_t d() const { return dims_.size(); }
    const std::vector<int>& dims() const { return dims_; }
    const std::vector<Rational>& flat() const { return values_; }
    const std::vector<Distribution>& marginals() const { return marginals_; }

    const Rational& at_linear(std::int64_t i) const { return values_[i - 1]; }
    const Rational& at(const Cell& c) const { return values_[linearize(c, dims_) - 1]; }

    SupportSet support() const {
        std::vector<Cell> cells;
        for (std::int64_t i = 1; i <= static_cast<std::int64_t>(values_.size()); ++i)
            if (values_[i - 1].sign() > 0) cells.push_back(delinearize(i, dims_));
        return SupportSet::of(dims_, std::move(cells));
    }

    /// The two-marginal value matrix; NotTwoMarginal for d > 2.
    RatMatrix matrix() const {
        if (d() != 2) throw NotTwoMarginal("matrix() on a d=" + std::to_string(d()) + " coupling");
        RatMatrix m(dims_[0], dims_[1]);
        for (std::size_t i = 0; i < values_.size(); ++i)
            m.at(i / dims_[1], i % dims_[1]) = values_[i];
        return m;
    }

    friend bool operator==(const Coupling& a, const Coupling& b) {
        return a.dims_ == b.dims_ && a.values_ == b.values_;
    }

private:
    Coupling(std::vector<int> dims, std::vector<Rational> values,
             std::vector<Distribution> marginals)
        : dims_(std::move(dims)), values_(std::move(values)), marginals_(std::move(marginals)) {}

    std::vector<int> dims_;
    std::vector<Rational> values_;
    std::vector<Distribution> marginals_;
};

} // namespace mec
