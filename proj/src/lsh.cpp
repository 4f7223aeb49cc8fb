#include "elsh/lsh.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <stdexcept>

namespace elsh {

ProjectionHash new_projection(std::size_t d, double width, Rng& rng) {
    if (d == 0) throw std::invalid_argument("new_projection: d must be >= 1");
    if (!(width > 0.0)) throw std::invalid_argument("new_projection: width must be > 0");
    ProjectionHash h;
    h.width = width;
    h.direction.resize(d);
    for (std::size_t i = 0; i < d; ++i) h.direction[i] = rng.normal();
    h.shift = rng.uniform(0.0, width);
    return h;
}

CompositeHash new_composite(std::size_t d, std::size_t k, double width, HashMode mode,
                            Rng& rng) {
    if (k == 0) throw std::invalid_argument("new_composite: k must be >= 1");
    CompositeHash H;
    H.mode = mode;
    H.projections.reserve(k);
    for (std::size_t i = 0; i < k; ++i) H.projections.push_back(new_projection(d, width, rng));
    return H;
}

double project(const ProjectionHash& h, const double* p, std::size_t d) {
    if (d != h.direction.size()) throw std::invalid_argument("project: dimension mismatch");
    return dot(h.direction.data(), p, d);
}

double project(const ProjectionHash& h, const Point& p) {
    return project(h, p.data(), p.size());
}

std::int64_t interval_bucket(const ProjectionHash& h, const double* p, std::size_t d) {
    return bucket_of(project(h, p, d) + h.shift, h.width);
}

std::int64_t interval_bucket(const ProjectionHash& h, const Point& p) {
    return interval_bucket(h, p.data(), p.size());
}

int sign_bit(const ProjectionHash& h, const double* p, std::size_t d) {
    return project(h, p, d) >= 0.0 ? 1 : 0;
}

int sign_bit(const ProjectionHash& h, const Point& p) {
    return sign_bit(h, p.data(), p.size());
}

void composite_key_into(const CompositeHash& H, const double* p, std::size_t d,
                        CompositeKey& out) {
    out.resize(H.k());
    for (std::size_t i = 0; i < H.projections.size(); ++i) {
        const ProjectionHash& h = H.projections[i];
        out[i] = (H.mode == HashMode::interval) ? interval_bucket(h, p, d)
                                                : sign_bit(h, p, d);
    }
}

CompositeKey composite_key(const CompositeHash& H, const double* p, std::size_t d) {
    CompositeKey key;
    composite_key_into(H, p, d, key);
    return key;
}

CompositeKey composite_key(const CompositeHash& H, const Point& p) {
    return composite_key(H, p.data(), p.size());
}

ProjectedSampler::ProjectedSampler(const CompositeHash& H)
    : hash_(&H), k_(H.k()), d_(H.dim()) {
    if (k_ == 0) throw std::invalid_argument("ProjectedSampler: empty hash");
    if (d_ <= k_) return;  // explicit path handles low dimensions

    Eigen::MatrixXd gram(k_, k_);
    for (std::size_t i = 0; i < k_; ++i) {
        const double* di = H.projections[i].direction.data();
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = dot(di, H.projections[j].direction.data(), d_);
            gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) return;  // degenerate Gram matrix

    const Eigen::MatrixXd L = llt.matrixL();
    chol_.assign(k_ * k_, 0.0);
    for (std::size_t i = 0; i < k_; ++i)
        for (std::size_t j = 0; j <= i; ++j)
            chol_[i * k_ + j] = L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    fast_ = true;
}

void ProjectedSampler::sample(std::span<const double> base, double r, Rng& rng,
                              std::span<double> out) const {
    if (base.size() != k_ || out.size() != k_)
        throw std::invalid_argument("ProjectedSampler::sample: size mismatch");

    if (fast_) {
        thread_local std::vector<double> xi;
        xi.resize(k_);
        double q2 = 0.0;
        for (std::size_t i = 0; i < k_; ++i) {
            const double z = rng.normal();
            xi[i] = z;
            q2 += z * z;
        }
        const double y = rng.chi_square(static_cast<double>(d_ - k_));
        const double scale = r / std::sqrt(q2 + y);
        for (std::size_t i = 0; i < k_; ++i) {
            const double* row = chol_.data() + i * k_;
            double s0 = 0, s1 = 0;
            std::size_t j = 0;
            for (; j + 2 <= i + 1; j += 2) {
                s0 += row[j] * xi[j];
                s1 += row[j + 1] * xi[j + 1];
            }
            for (; j <= i; ++j) s0 += row[j] * xi[j];
            out[i] = base[i] + scale * (s0 + s1);
        }
        return;
    }

    // Explicit path: sample the unit vector in R^d and project it.
    thread_local std::vector<double> u;
    u.resize(d_);
    double n2 = 0.0;
    do {
        n2 = 0.0;
        for (std::size_t i = 0; i < d_; ++i) {
            const double z = rng.normal();
            u[i] = z;
            n2 += z * z;
        }
    } while (n2 == 0.0);
    const double scale = r / std::sqrt(n2);
    for (std::size_t i = 0; i < k_; ++i)
        out[i] = base[i] + scale * dot(hash_->projections[i].direction.data(), u.data(), d_);
}

}  // namespace elsh
