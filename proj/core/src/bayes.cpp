#include <texcls/bayes.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <texcls/error.hpp>

namespace texcls {

int NbModel::class_index(const std::string& name) const noexcept {
    const auto it = std::lower_bound(classes.begin(), classes.end(), name);
    if (it == classes.end() || *it != name) {
        return -1;
    }
    return static_cast<int>(it - classes.begin());
}

NbModel nb_fit(const FeatureMatrix& x, std::span<const std::string> labels) {
    if (static_cast<std::size_t>(x.rows()) != labels.size()) {
        throw ContractError("nb_fit: row count does not match label count");
    }
    if (x.cols() == 0) {
        throw ContractError("nb_fit: no features");
    }
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        if (!x.col(c).allFinite()) {
            throw DataError("nb_fit: feature column " + std::to_string(c) + " holds a non-finite value");
        }
    }
    std::map<std::string, std::vector<Eigen::Index>> rows_by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        rows_by_class[labels[i]].push_back(static_cast<Eigen::Index>(i));
    }
    if (rows_by_class.size() < 2) {
        throw DataError("nb_fit: need at least two classes");
    }

    const Eigen::Index d = x.cols();
    const auto k = static_cast<Eigen::Index>(rows_by_class.size());
    const Eigen::RowVectorXd global_mean = x.colwise().mean();
    const Eigen::RowVectorXd global_var = (x.rowwise() - global_mean).array().square().colwise().mean();
    const Eigen::RowVectorXd floor = kVarianceSmoothing * (global_var.array() + 1e-12);

    NbModel model;
    model.priors.resize(k);
    model.means.resize(k, d);
    model.variances.resize(k, d);
    Eigen::Index ci = 0;
    for (const auto& [name, rows] : rows_by_class) {
        if (rows.size() < 2) {
            throw DataError("nb_fit: class '" + name + "' has fewer than two training samples");
        }
        model.classes.push_back(name);
        const auto n = static_cast<double>(rows.size());
        model.priors(ci) = n / static_cast<double>(labels.size());
        Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(d);
        for (auto r : rows) {
            mean += x.row(r);
        }
        mean /= n;
        Eigen::RowVectorXd var = Eigen::RowVectorXd::Zero(d);
        for (auto r : rows) {
            var += (x.row(r) - mean).array().square().matrix();
        }
        var /= n;
        model.means.row(ci) = mean;
        model.variances.row(ci) = var.cwiseMax(floor);
        ++ci;
    }
    return model;
}

Eigen::VectorXd nb_log_posteriors(const NbModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (x.size() != model.feature_count()) {
        throw ContractError("nb_predict: feature vector length " + std::to_string(x.size()) + " != model " +
                            std::to_string(model.feature_count()));
    }
    const auto k = static_cast<Eigen::Index>(model.classes.size());
    Eigen::VectorXd out(k);
    const double log_2pi = std::log(2.0 * std::numbers::pi);
    for (Eigen::Index c = 0; c < k; ++c) {
        const auto var = model.variances.row(c).transpose().array();
        const auto diff = x.array() - model.means.row(c).transpose().array();
        const double ll = -0.5 * ((diff.square() / var) + var.log() + log_2pi).sum();
        out(c) = std::log(model.priors(c)) + ll;
    }
    return out;
}

int nb_predict_index(const NbModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
    const Eigen::VectorXd lp = nb_log_posteriors(model, x);
    int best = 0;
    for (Eigen::Index c = 1; c < lp.size(); ++c) {
        if (lp(c) > lp(best)) {
            best = static_cast<int>(c);
        }
    }
    return best;
}

const std::string& nb_predict(const NbModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
    return model.classes[static_cast<std::size_t>(nb_predict_index(model, x))];
}

Evaluation nb_evaluate(const NbModel& model, const FeatureMatrix& x, std::span<const std::string> labels) {
    if (x.rows() == 0 || labels.empty()) {
        throw DataError("nb_evaluate: empty test set");
    }
    if (static_cast<std::size_t>(x.rows()) != labels.size()) {
        throw ContractError("nb_evaluate: row count does not match label count");
    }
    const auto k = static_cast<Eigen::Index>(model.classes.size());
    Evaluation ev;
    ev.confusion.classes = model.classes;
    ev.confusion.counts = Eigen::MatrixXd::Zero(k, k);
    std::size_t correct = 0;
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const int truth = model.class_index(labels[static_cast<std::size_t>(r)]);
        if (truth < 0) {
            throw DataError("nb_evaluate: class '" + labels[static_cast<std::size_t>(r)] + "' unknown to the model");
        }
        const int pred = nb_predict_index(model, x.row(r).transpose());
        ev.confusion.counts(truth, pred) += 1.0;
        correct += truth == pred ? 1 : 0;
    }
    ev.success = static_cast<double>(correct) / static_cast<double>(x.rows());
    return ev;
}

} // namespace texcls
