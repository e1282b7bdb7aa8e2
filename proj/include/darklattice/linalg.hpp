#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <stdexcept>
#include <vector>

namespace darklattice {

/// Numerical thresholds shared by the rank / null-space / verification paths.
struct TolerancePolicy {
    double rank_eps = 1e-12;      // relative singular-value cutoff
    double residual_eps = 1e-10;  // verification threshold

    void validate() const {
        if (!(rank_eps > 0 && rank_eps < 1e-3))
            throw std::invalid_argument("TolerancePolicy: rank_eps must be in (0, 1e-3)");
        if (!(residual_eps > 0 && residual_eps < 1e-3))
            throw std::invalid_argument("TolerancePolicy: residual_eps must be in (0, 1e-3)");
    }
};

/// An ordered set of equal-length real vectors, optionally orthonormal.
struct VectorSet {
    Eigen::Index dim = 0;
    std::vector<Eigen::VectorXd> vectors;
    bool orthonormal = false;

    std::size_t size() const { return vectors.size(); }

    Eigen::MatrixXd as_matrix() const {
        Eigen::MatrixXd m(dim, static_cast<Eigen::Index>(vectors.size()));
        for (std::size_t k = 0; k < vectors.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = vectors[k];
        return m;
    }

    static VectorSet from_matrix(const Eigen::MatrixXd& m, bool orthonormal = false) {
        VectorSet vs;
        vs.dim = m.rows();
        vs.orthonormal = orthonormal;
        vs.vectors.reserve(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index c = 0; c < m.cols(); ++c) vs.vectors.push_back(m.col(c));
        return vs;
    }
};

namespace detail {

inline void require_finite(const Eigen::MatrixXd& m, const char* who) {
    if (!m.allFinite()) throw std::invalid_argument(std::string(who) + ": non-finite entries");
}

inline Eigen::BDCSVD<Eigen::MatrixXd> svd_full_v(const Eigen::MatrixXd& m) {
    return Eigen::BDCSVD<Eigen::MatrixXd>(m, Eigen::ComputeFullV);
}

inline Eigen::Index rank_from_singular_values(const Eigen::VectorXd& sv, Eigen::Index rows,
                                              Eigen::Index cols, const TolerancePolicy& pol) {
    if (sv.size() == 0) return 0;
    const double cutoff = pol.rank_eps * sv(0) * static_cast<double>(std::max(rows, cols));
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > cutoff) ++r;
    return r;
}

/// Orthonormal basis of span(columns), rank-revealing via SVD.
inline Eigen::MatrixXd orthonormal_span(const Eigen::MatrixXd& m, const TolerancePolicy& pol) {
    if (m.cols() == 0) return Eigen::MatrixXd(m.rows(), 0);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
    const Eigen::Index r = rank_from_singular_values(svd.singularValues(), m.rows(), m.cols(), pol);
    return svd.matrixU().leftCols(r);
}

}  // namespace detail

/// Count of singular values above rank_eps * sigma_max * max(rows, cols).
inline Eigen::Index numerical_rank(const Eigen::MatrixXd& m, const TolerancePolicy& pol = {}) {
    pol.validate();
    detail::require_finite(m, "numerical_rank");
    if (m.rows() == 0 || m.cols() == 0) return 0;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    return detail::rank_from_singular_values(svd.singularValues(), m.rows(), m.cols(), pol);
}

/// Orthonormal basis of the right null space of m (SVD route).
inline VectorSet null_space_svd(const Eigen::MatrixXd& m, const TolerancePolicy& pol = {}) {
    pol.validate();
    detail::require_finite(m, "null_space_svd");
    VectorSet out;
    out.dim = m.cols();
    out.orthonormal = true;
    if (m.cols() == 0) return out;
    if (m.rows() == 0) {
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            out.vectors.push_back(Eigen::VectorXd::Unit(m.cols(), c));
        return out;
    }
    auto svd = detail::svd_full_v(m);
    const Eigen::Index r = detail::rank_from_singular_values(svd.singularValues(), m.rows(), m.cols(), pol);
    for (Eigen::Index c = r; c < m.cols(); ++c) out.vectors.push_back(svd.matrixV().col(c));
    return out;
}

/// Null space via the row-echelon free-column construction: the left
/// rows x rows part must be upper triangular with nonzero diagonal. One raw
/// vector per free column, built by setting that free coefficient to 1 and
/// back-substituting the pivot coefficients.
inline VectorSet null_space_echelon(const Eigen::MatrixXd& m, const TolerancePolicy& pol = {}) {
    pol.validate();
    detail::require_finite(m, "null_space_echelon");
    const Eigen::Index rows = m.rows(), cols = m.cols();
    if (rows > cols) throw std::invalid_argument("null_space_echelon: more rows than columns");
    const double scale = (rows > 0 && cols > 0) ? m.cwiseAbs().maxCoeff() : 0.0;
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < i; ++j)
            if (std::abs(m(i, j)) > pol.rank_eps * scale)
                throw std::invalid_argument("null_space_echelon: left block not upper triangular");
        if (std::abs(m(i, i)) <= pol.rank_eps * scale)
            throw std::invalid_argument("null_space_echelon: pivot breakdown at row " + std::to_string(i));
    }
    VectorSet out;
    out.dim = cols;
    out.orthonormal = false;
    const auto pivots = m.leftCols(rows).triangularView<Eigen::Upper>();
    for (Eigen::Index f = rows; f < cols; ++f) {
        Eigen::VectorXd x = pivots.solve(Eigen::VectorXd(-m.col(f)));
        Eigen::VectorXd v = Eigen::VectorXd::Zero(cols);
        v.head(rows) = x;
        v(f) = 1.0;
        out.vectors.push_back(std::move(v));
    }
    return out;
}

/// Modified Gram-Schmidt with one reorthogonalization pass. Preserves the
/// nested spans (k-th output lies in the span of the first k inputs).
inline VectorSet gram_schmidt(const VectorSet& vs) {
    VectorSet out;
    out.dim = vs.dim;
    out.orthonormal = true;
    for (std::size_t k = 0; k < vs.vectors.size(); ++k) {
        Eigen::VectorXd v = vs.vectors[k];
        if (v.size() != vs.dim) throw std::invalid_argument("gram_schmidt: inconsistent dimensions");
        const double norm0 = v.norm();
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : out.vectors) v -= q.dot(v) * q;
        if (v.norm() <= 1e-12 * norm0 || norm0 == 0.0)
            throw std::invalid_argument("gram_schmidt: input vectors are linearly dependent (vector " +
                                        std::to_string(k) + ")");
        out.vectors.push_back(v / v.norm());
    }
    return out;
}

struct ProjectorDistance {
    double spectral = 0.0;
    double frobenius = 0.0;
    bool size_mismatch_warning = false;  // exactly one side empty
};

/// Norm of the difference of the orthogonal projectors onto the two spans;
/// zero iff the spans coincide.
inline ProjectorDistance subspace_projector_distance(const VectorSet& a, const VectorSet& b,
                                                     const TolerancePolicy& pol = {}) {
    pol.validate();
    if (a.dim != b.dim) throw std::invalid_argument("subspace_projector_distance: dim mismatch");
    ProjectorDistance d;
    d.size_mismatch_warning = (a.vectors.empty() != b.vectors.empty());
    if (a.vectors.empty() && b.vectors.empty()) return d;
    const Eigen::MatrixXd qa = a.orthonormal ? a.as_matrix() : detail::orthonormal_span(a.as_matrix(), pol);
    const Eigen::MatrixXd qb = b.orthonormal ? b.as_matrix() : detail::orthonormal_span(b.as_matrix(), pol);
    Eigen::MatrixXd diff = qa * qa.transpose() - qb * qb.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(diff, Eigen::EigenvaluesOnly);
    d.spectral = es.eigenvalues().cwiseAbs().maxCoeff();
    d.frobenius = diff.norm();
    return d;
}

}  // namespace darklattice
