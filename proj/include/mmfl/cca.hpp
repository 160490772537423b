#pragma once

#include <cstddef>

#include "mmfl/matrix.hpp"

namespace mmfl {

struct DccaeConfig {
    double lambda = 0.01;   // reconstruction weight in the combined objective
    double cca_reg = 1e-4;  // ridge added to both covariance matrices
    std::size_t cca_dims = 0;  // number of canonical directions; 0 means "all"

    std::size_t resolved_dims(std::size_t h_size) const {
        return cca_dims == 0 ? h_size : cca_dims;
    }
};

struct CcaResult {
    double corr = 0.0;  // sum of the top cca_dims canonical correlations
    Matrix grad_a;      // d corr / d h_a
    Matrix grad_b;      // d corr / d h_b
};

// Total canonical correlation between two aligned representation batches,
// evaluated at the optimal projection directions: the sum of the top
// cca_dims singular values of T = Saa^{-1/2} Sab Sbb^{-1/2}, where the
// covariances are mean-centered, scaled by 1/(n-1) and ridged by cca_reg.
// Gradients come from the SVD of T and flow back through the centering.
CcaResult cca_total_correlation(const Matrix& h_a, const Matrix& h_b, const DccaeConfig& cfg);

}  // namespace mmfl
