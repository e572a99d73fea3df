#include <texcls/pca.hpp>

#include <cmath>
#include <limits>

#include <texcls/error.hpp>

namespace texcls {

namespace {

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) {
        v = -v;
    }
}

} // namespace

Spectrum covariance_spectrum(const FeatureMatrix& centered, PcaRoute route) {
    const Eigen::Index n = centered.rows();
    const Eigen::Index d = centered.cols();
    if (n < 2) {
        throw DataError("PCA needs at least two rows");
    }
    const double denom = static_cast<double>(n - 1);
    if (route == PcaRoute::Auto) {
        route = n < d ? PcaRoute::Gram : PcaRoute::Covariance;
    }
    Spectrum s;
    if (route == PcaRoute::Covariance) {
        const Eigen::MatrixXd cov = (centered.transpose() * centered) / denom;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
        if (eig.info() != Eigen::Success) {
            throw NumericalError("covariance eigen-decomposition failed");
        }
        s.eigenvalues = eig.eigenvalues().reverse().cwiseMax(0.0);
        s.vectors = eig.eigenvectors().rowwise().reverse();
    } else {
        const Eigen::MatrixXd gram = (centered * centered.transpose()) / denom;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
        if (eig.info() != Eigen::Success) {
            throw NumericalError("Gram eigen-decomposition failed");
        }
        const Eigen::VectorXd vals = eig.eigenvalues().reverse().cwiseMax(0.0);
        const Eigen::MatrixXd u = eig.eigenvectors().rowwise().reverse();
        // Only directions with non-negligible variance map back to feature space.
        const double cutoff = vals.size() > 0 ? vals(0) * 1e-12 : 0.0;
        Eigen::Index kept = 0;
        while (kept < vals.size() && vals(kept) > cutoff && vals(kept) > 0.0) {
            ++kept;
        }
        s.eigenvalues = vals.head(kept);
        s.vectors.resize(d, kept);
        for (Eigen::Index j = 0; j < kept; ++j) {
            Eigen::VectorXd v = centered.transpose() * u.col(j);
            s.vectors.col(j) = v / v.norm();
        }
    }
    for (Eigen::Index j = 0; j < s.vectors.cols(); ++j) {
        fix_sign(s.vectors.col(j));
    }
    return s;
}

PcaModel pca_fit(const FeatureMatrix& x, double threshold, PcaRoute route) {
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw ParameterError("PCA threshold must lie in (0, 1]");
    }
    if (x.rows() < 2) {
        throw DataError("PCA needs at least two training rows");
    }
    if (!x.allFinite()) {
        throw DataError("PCA input holds non-finite values");
    }
    PcaModel model;
    model.mean = x.colwise().mean();
    const FeatureMatrix centered = x.rowwise() - model.mean;
    model.total_variance = centered.array().square().sum() / static_cast<double>(x.rows() - 1);
    if (!(model.total_variance > 0.0)) {
        throw NumericalError("PCA input has zero variance in every feature");
    }
    const Spectrum s = covariance_spectrum(centered, route);
    const double top = s.eigenvalues.size() > 0 ? s.eigenvalues(0) : 0.0;
    Eigen::Index positive = 0;
    while (positive < s.eigenvalues.size() && s.eigenvalues(positive) > top * 1e-12 &&
           s.eigenvalues(positive) > 0.0) {
        ++positive;
    }
    if (positive == 0) {
        throw NumericalError("PCA found no direction with positive variance");
    }
    // Fractions are taken against the trace, which equals the eigenvalue sum.
    Eigen::Index k = 0;
    double cumulative = 0.0;
    while (k < positive) {
        cumulative += s.eigenvalues(k);
        ++k;
        if (cumulative / model.total_variance >= threshold - 1e-12) {
            break;
        }
    }
    model.components = s.vectors.leftCols(k).transpose();
    model.eigenvalues = s.eigenvalues.head(k);
    model.retained_variance = std::min(1.0, cumulative / model.total_variance);
    return model;
}

FeatureMatrix pca_project(const PcaModel& model, const FeatureMatrix& x) {
    if (x.cols() != model.mean.size()) {
        throw ContractError("pca_project: expected " + std::to_string(model.mean.size()) + " features, got " +
                            std::to_string(x.cols()));
    }
    return (x.rowwise() - model.mean) * model.components.transpose();
}

Eigen::VectorXd pca_project_one(const PcaModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (x.size() != model.mean.size()) {
        throw ContractError("pca_project_one: dimension mismatch");
    }
    return model.components * (x - model.mean.transpose());
}

} // namespace texcls
