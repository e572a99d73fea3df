#pragma once

#include <Eigen/Dense>

#include <texcls/bayes.hpp>

namespace texcls {

/// Covariance PCA fitted on training rows. Components are orthonormal rows in
/// descending eigenvalue order; the largest-magnitude entry of each row is positive.
struct PcaModel {
    Eigen::RowVectorXd mean;
    Eigen::MatrixXd components; ///< k x d
    Eigen::VectorXd eigenvalues;
    double retained_variance = 0.0; ///< fraction of total variance kept
    double total_variance = 0.0;

    [[nodiscard]] Eigen::Index dimension() const noexcept { return components.rows(); }
};

/// How the covariance spectrum is computed. Gram works on the n x n matrix X X^T and
/// is chosen automatically when there are fewer rows than features.
enum class PcaRoute { Auto, Covariance, Gram };

struct Spectrum {
    Eigen::VectorXd eigenvalues; ///< descending, non-negative
    Eigen::MatrixXd vectors;     ///< columns are unit eigenvectors of the covariance
};

/// Eigen-decomposition of the sample covariance (divisor n - 1) of centered data.
Spectrum covariance_spectrum(const FeatureMatrix& centered, PcaRoute route = PcaRoute::Auto);

/// Keeps the smallest k whose cumulative eigenvalue fraction reaches `threshold`.
/// Throws DataError for fewer than two rows or non-finite input and NumericalError
/// when every feature has zero variance.
PcaModel pca_fit(const FeatureMatrix& x, double threshold = 0.95, PcaRoute route = PcaRoute::Auto);

/// (x - mean) * components^T, row by row.
FeatureMatrix pca_project(const PcaModel& model, const FeatureMatrix& x);
/// Single feature vector.
Eigen::VectorXd pca_project_one(const PcaModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

} // namespace texcls
