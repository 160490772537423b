#include "mmfl/cca.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <string>

namespace mmfl {

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
    Eigen::MatrixXd out(m.rows, m.cols);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
    return out;
}

Matrix from_eigen(const Eigen::MatrixXd& m) {
    Matrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = m(i, j);
    return out;
}

// Symmetric inverse square root via eigendecomposition. The ridge keeps all
// eigenvalues >= cca_reg, so the inverse root is well-defined.
Eigen::MatrixXd inverse_sqrt(const Eigen::MatrixXd& sym) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.info() != Eigen::Success) throw InternalError("cca: eigendecomposition failed");
    Eigen::VectorXd inv_root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().cwiseInverse();
    return es.eigenvectors() * inv_root.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

CcaResult cca_total_correlation(const Matrix& h_a, const Matrix& h_b, const DccaeConfig& cfg) {
    if (h_a.rows != h_b.rows)
        throw UsageError("cca: representation batches have different row counts");
    if (h_a.rows < 2) throw DataError("cca: need at least 2 rows to estimate covariances");
    if (cfg.cca_reg <= 0.0) throw ConfigError("cca: cca_reg must be positive");
    std::size_t k = cfg.resolved_dims(std::min(h_a.cols, h_b.cols));
    if (k < 1 || k > std::min(h_a.cols, h_b.cols))
        throw ConfigError("cca: cca_dims out of range [1, h_size]");

    const Eigen::Index n = static_cast<Eigen::Index>(h_a.rows);
    const double denom = static_cast<double>(n - 1);

    Eigen::MatrixXd A = to_eigen(h_a);
    Eigen::MatrixXd B = to_eigen(h_b);
    Eigen::MatrixXd Abar = A.rowwise() - A.colwise().mean();
    Eigen::MatrixXd Bbar = B.rowwise() - B.colwise().mean();

    Eigen::MatrixXd Saa = Abar.transpose() * Abar / denom;
    Eigen::MatrixXd Sbb = Bbar.transpose() * Bbar / denom;
    Saa.diagonal().array() += cfg.cca_reg;
    Sbb.diagonal().array() += cfg.cca_reg;
    Eigen::MatrixXd Sab = Abar.transpose() * Bbar / denom;

    Eigen::MatrixXd Wa = inverse_sqrt(Saa);
    Eigen::MatrixXd Wb = inverse_sqrt(Sbb);
    Eigen::MatrixXd T = Wa * Sab * Wb;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(T, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd s = svd.singularValues();  // sorted descending

    CcaResult res;
    Eigen::Index kk = static_cast<Eigen::Index>(k);
    res.corr = s.head(kk).sum();

    Eigen::MatrixXd Uk = svd.matrixU().leftCols(kk);
    Eigen::MatrixXd Vk = svd.matrixV().leftCols(kk);
    Eigen::VectorXd sk = s.head(kk);

    // Gradients of the singular value sum w.r.t. the covariance blocks.
    Eigen::MatrixXd WaU = Wa * Uk;  // Wa is symmetric
    Eigen::MatrixXd WbV = Wb * Vk;
    Eigen::MatrixXd d_Saa = -0.5 * WaU * sk.asDiagonal() * WaU.transpose();
    Eigen::MatrixXd d_Sbb = -0.5 * WbV * sk.asDiagonal() * WbV.transpose();
    Eigen::MatrixXd d_Sab = WaU * WbV.transpose();

    // Chain through the covariance estimates. Columns of these products are
    // spans of centered columns, so centering adds no further correction.
    Eigen::MatrixXd grad_a = (2.0 * Abar * d_Saa + Bbar * d_Sab.transpose()) / denom;
    Eigen::MatrixXd grad_b = (2.0 * Bbar * d_Sbb + Abar * d_Sab) / denom;

    res.grad_a = from_eigen(grad_a);
    res.grad_b = from_eigen(grad_b);
    ensure_finite(res.grad_a, "cca gradient");
    ensure_finite(res.grad_b, "cca gradient");
    return res;
}

}  // namespace mmfl
