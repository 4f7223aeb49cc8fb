#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace elsh {

using Point = std::vector<double>;

/// Flat row-major storage for n points of dimension d.
class PointSet {
public:
    PointSet() = default;
    PointSet(std::size_t n, std::size_t d) : n_(n), d_(d), data_(n * d, 0.0) {
        if (d == 0) throw std::invalid_argument("PointSet: dimension must be >= 1");
    }

    std::size_t size() const { return n_; }
    std::size_t dim() const { return d_; }
    bool empty() const { return n_ == 0; }

    double* row(std::size_t i) { return data_.data() + i * d_; }
    const double* row(std::size_t i) const { return data_.data() + i * d_; }
    std::span<const double> operator[](std::size_t i) const { return {row(i), d_}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    void append(const double* p) {
        data_.insert(data_.end(), p, p + d_);
        ++n_;
    }
    void append(std::span<const double> p) {
        if (p.size() != d_) throw std::invalid_argument("PointSet::append: dimension mismatch");
        append(p.data());
    }

    void reserve(std::size_t n) { data_.reserve(n * d_); }

    /// An empty set that will accept rows of dimension d.
    static PointSet with_dim(std::size_t d) {
        PointSet s(1, d);
        s.data_.clear();
        s.n_ = 0;
        return s;
    }

private:
    std::size_t n_ = 0, d_ = 0;
    std::vector<double> data_;
};

// Dot products and distances with four independent accumulators: keeps the
// loops fast without float-reassociation flags, and bit-reproducible.
inline double dot(const double* a, const double* b, std::size_t d) {
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    std::size_t i = 0;
    for (; i + 4 <= d; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < d; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

inline double squared_distance(const double* a, const double* b, std::size_t d) {
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    std::size_t i = 0;
    for (; i + 4 <= d; i += 4) {
        const double t0 = a[i] - b[i], t1 = a[i + 1] - b[i + 1];
        const double t2 = a[i + 2] - b[i + 2], t3 = a[i + 3] - b[i + 3];
        s0 += t0 * t0;
        s1 += t1 * t1;
        s2 += t2 * t2;
        s3 += t3 * t3;
    }
    for (; i < d; ++i) {
        const double t = a[i] - b[i];
        s0 += t * t;
    }
    return (s0 + s1) + (s2 + s3);
}

inline double distance(const double* a, const double* b, std::size_t d) {
    return std::sqrt(squared_distance(a, b, d));
}

inline double distance(const Point& a, const Point& b) {
    if (a.size() != b.size()) throw std::invalid_argument("distance: dimension mismatch");
    return distance(a.data(), b.data(), a.size());
}

inline double norm(const double* a, std::size_t d) { return std::sqrt(dot(a, a, d)); }
inline double norm(const Point& a) { return norm(a.data(), a.size()); }

}  // namespace elsh
