#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mec/errors.hpp"

namespace mec {

/// Exact rational scalar. Always held in canonical form: positive
/// denominator, gcd(|num|, den) == 1. All probability values and all
/// polytope linear algebra in this library use this type; floating
/// point only ever appears downstream in entropy evaluation.
class Rational {
public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {}          // NOLINT: implicit by design
    Rational(int n) : v_(n) {}           // NOLINT
    Rational(long num, long den) {
        if (den == 0) throw DivisionByZero("rational with zero denominator");
        v_ = mpq_class(num, den);
        v_.canonicalize();
    }
    Rational(const mpz_class& num, const mpz_class& den) {
        if (den == 0) throw DivisionByZero("rational with zero denominator");
        v_ = mpq_class(num, den);
        v_.canonicalize();
    }
    explicit Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

    /// Parses a decimal literal ("0.50", "-3", "+1.25") or a fraction
    /// ("7/20", "-1/3"). Anything else, including scientific notation,
    /// raises MalformedNumber. "0.50" and "1/2" yield identical values.
    static Rational parse(std::string_view text);

    const mpz_class& numerator() const { return v_.get_num(); }
    const mpz_class& denominator() const { return v_.get_den(); }

    double to_double() const { return v_.get_d(); }

    /// Canonical "num/den" form; integers print without the "/den" part.
    std::string fraction_str() const { return v_.get_str(); }

    /// Exact decimal expansion when the denominator is of the form
    /// 2^a * 5^b; std::nullopt otherwise.
    std::optional<std::string> decimal_str() const;

    int sign() const { return mpq_sgn(v_.get_mpq_t()); }
    Rational abs() const { return Rational(mpq_class(::abs(v_))); }

    Rational operator-() const { return Rational(mpq_class(-v_)); }
    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.sign() == 0) throw DivisionByZero("rational division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return mpq_equal(a.v_.get_mpq_t(), b.v_.get_mpq_t()) != 0;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const int c = mpq_cmp(a.v_.get_mpq_t(), b.v_.get_mpq_t());
        return c <=> 0;
    }

    friend Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
    friend Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

private:
    mpq_class v_;
};

inline Rational Rational::parse(std::string_view text) {
    const auto fail = [&] {
        throw MalformedNumber("MalformedNumber: '" + std::string(text) + "'");
    };
    std::size_t i = 0;
    bool neg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        neg = text[i] == '-';
        ++i;
    }
    const auto digits = [&](std::string& out) {
        const std::size_t start = i;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') out += text[i++];
        return i > start;
    };
    std::string head;
    if (!digits(head)) fail();
    mpz_class value;
    mpz_class scale = 1;
    if (i == text.size()) {
        value = mpz_class(head, 10);
    } else if (text[i] == '.') {
        ++i;
        std::string frac;
        if (!digits(frac) || i != text.size()) fail();
        value = mpz_class(head + frac, 10);
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    } else if (text[i] == '/') {
        ++i;
        std::string den;
        if (!digits(den) || i != text.size()) fail();
        value = mpz_class(head, 10);
        scale = mpz_class(den, 10);
        if (scale == 0) fail();
    } else {
        fail();
    }
    if (neg) value = -value;
    return Rational(value, scale);
}

inline std::optional<std::string> Rational::decimal_str() const {
    mpz_class den = denominator();
    unsigned long twos = 0;
    unsigned long fives = 0;
    while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
        mpz_divexact_ui(den.get_mpz_t(), den.get_mpz_t(), 2);
        ++twos;
    }
    while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
        mpz_divexact_ui(den.get_mpz_t(), den.get_mpz_t(), 5);
        ++fives;
    }
    if (den != 1) return std::nullopt;
    const unsigned long e = std::max(twos, fives);
    mpz_class scaled = ::abs(numerator());
    mpz_class pow;
    mpz_ui_pow_ui(pow.get_mpz_t(), 2, e - twos);
    scaled *= pow;
    mpz_ui_pow_ui(pow.get_mpz_t(), 5, e - fives);
    scaled *= pow;
    std::string s = scaled.get_str();
    if (s.size() <= e) s.insert(0, e + 1 - s.size(), '0');
    if (e > 0) s.insert(s.size() - e, ".");
    if (sign() < 0) s.insert(0, "-");
    return s;
}

/// Dense row-major matrix of exact rationals.
class RatMatrix {
public:
    RatMatrix() : rows_(0), cols_(0) {}
    RatMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}

    static RatMatrix identity(std::size_t n) {
        RatMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rational& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Rational& at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const std::vector<Rational>& entries() const { return data_; }

    friend bool operator==(const RatMatrix& a, const RatMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_, cols_;
    std::vector<Rational> data_;
};

namespace detail {

// Clears denominators of [M | rhs] row by row so that fraction-free
// elimination can run over integers; returns per-row scale factors.
inline void scale_rows_to_integers(const RatMatrix& m,
                                   const std::vector<Rational>* rhs,
                                   std::vector<std::vector<mpz_class>>& out,
                                   std::vector<mpz_class>& row_scales) {
    const std::size_t n = m.rows();
    const std::size_t cols = m.cols() + (rhs ? 1 : 0);
    out.assign(n, std::vector<mpz_class>(cols));
    row_scales.assign(n, mpz_class(1));
    for (std::size_t i = 0; i < n; ++i) {
        mpz_class l = 1;
        for (std::size_t j = 0; j < m.cols(); ++j)
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m.at(i, j).denominator().get_mpz_t());
        if (rhs)
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), (*rhs)[i].denominator().get_mpz_t());
        row_scales[i] = l;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            const Rational& e = m.at(i, j);
            out[i][j] = e.numerator() * (l / e.denominator());
        }
        if (rhs) {
            const Rational& e = (*rhs)[i];
            out[i][m.cols()] = e.numerator() * (l / e.denominator());
        }
    }
}

// Fraction-free (Bareiss) forward elimination on an integer matrix with
// ncols >= n columns. Returns the sign of the row permutation, or 0 when
// the leading n x n block is singular. On success a[n-1][n-1] holds
// sign * det of the scaled leading block.
inline int bareiss_forward(std::vector<std::vector<mpz_class>>& a, std::size_t n) {
    int sign = 1;
    mpz_class prev = 1;
    mpz_class t;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t r = k + 1;
            while (r < n && a[r][k] == 0) ++r;
            if (r == n) return 0;
            std::swap(a[k], a[r]);
            sign = -sign;
        }
        const std::size_t cols = a[k].size();
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < cols; ++j) {
                t = a[i][j] * a[k][k] - a[i][k] * a[k][j];
                mpz_divexact(a[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    if (a[n - 1][n - 1] == 0) return 0;
    return sign;
}

} // namespace detail

/// Exact determinant through fraction-free elimination.
inline Rational determinant(const RatMatrix& m) {
    if (m.rows() != m.cols()) throw NotSquare("determinant of non-square matrix");
    const std::size_t n = m.rows();
    if (n == 0) return 1;
    std::vector<std::vector<mpz_class>> a;
    std::vector<mpz_class> scales;
    detail::scale_rows_to_integers(m, nullptr, a, scales);
    const int sign = detail::bareiss_forward(a, n);
    if (sign == 0) return 0;
    mpz_class den = 1;
    for (const auto& s : scales) den *= s;
    mpz_class num = a[n - 1][n - 1];
    if (sign < 0) num = -num;
    return Rational(num, den);
}

/// Exact solution of M x = y, or std::nullopt when det(M) == 0.
inline std::optional<std::vector<Rational>> solve_linear(const RatMatrix& m,
                                                         const std::vector<Rational>& y) {
    if (m.rows() != m.cols()) throw NotSquare("solve_linear needs a square matrix");
    if (y.size() != m.rows())
        throw DimensionMismatch("solve_linear: rhs length " + std::to_string(y.size()) +
                                " does not match " + std::to_string(m.rows()) + " rows");
    const std::size_t n = m.rows();
    if (n == 0) return std::vector<Rational>{};
    std::vector<std::vector<mpz_class>> a;
    std::vector<mpz_class> scales;
    detail::scale_rows_to_integers(m, &y, a, scales);
    if (detail::bareiss_forward(a, n) == 0) return std::nullopt;
    std::vector<Rational> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        Rational acc(a[ii][n], 1);
        for (std::size_t j = ii + 1; j < n; ++j)
            acc -= Rational(a[ii][j], 1) * x[j];
        x[ii] = acc / Rational(a[ii][ii], 1);
    }
    return x;
}

} // namespace mec
