#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace texcls {

/// Rows are samples, columns are features.
using FeatureMatrix = Eigen::MatrixXd;

/// Gaussian naive Bayes parameters. Classes are kept in sorted order.
struct NbModel {
    std::vector<std::string> classes;
    Eigen::VectorXd priors;     ///< per class, sums to 1
    Eigen::MatrixXd means;      ///< class x feature
    Eigen::MatrixXd variances;  ///< class x feature, floored

    [[nodiscard]] Eigen::Index feature_count() const noexcept { return means.cols(); }
    /// Index of a class name, or -1.
    [[nodiscard]] int class_index(const std::string& name) const noexcept;
};

/// Per-feature variance floor is 1e-9 * (variance of that feature over the whole set + 1e-12).
inline constexpr double kVarianceSmoothing = 1e-9;

/// Class frequencies as priors; per-class mean and population variance of each feature.
/// Throws DataError for a class with fewer than two rows or a non-finite feature.
NbModel nb_fit(const FeatureMatrix& x, std::span<const std::string> labels);

/// log p(C_k) + sum_i log N(x_i; mu_ki, var_ki) for every class.
Eigen::VectorXd nb_log_posteriors(const NbModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Index of the highest log-posterior; ties go to the earlier class.
int nb_predict_index(const NbModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
const std::string& nb_predict(const NbModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// counts[true][predicted]; averaged matrices may hold fractional counts.
struct ConfusionMatrix {
    std::vector<std::string> classes;
    Eigen::MatrixXd counts;

    [[nodiscard]] double total() const { return counts.sum(); }
    [[nodiscard]] double trace() const { return counts.trace(); }
};

struct Evaluation {
    double success = 0.0; ///< correct / total, in [0, 1]
    ConfusionMatrix confusion;
};

/// Throws DataError when the test set is empty or holds a class unknown to the model.
Evaluation nb_evaluate(const NbModel& model, const FeatureMatrix& x, std::span<const std::string> labels);

} // namespace texcls
