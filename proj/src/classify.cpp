#include "esnevo/classify.hpp"

#include "esnevo/errors.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace esnevo::classify {

std::string to_string(ClassifierKind k) {
    return k == ClassifierKind::ridge_ova ? "ridge" : "svm";
}

ClassifierKind classifier_from_string(const std::string& s) {
    if (s == "ridge" || s == "ridge_ova") return ClassifierKind::ridge_ova;
    if (s == "svm" || s == "linear_svm") return ClassifierKind::linear_svm;
    throw ConfigError("unknown classifier '" + s + "' (expected svm|ridge)");
}

namespace {

void standardize_params(const Eigen::MatrixXd& x, Eigen::VectorXd& mean, Eigen::VectorXd& stddev) {
    const double n = static_cast<double>(x.rows());
    mean = x.colwise().mean();
    stddev.resize(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double var = (x.col(j).array() - mean[j]).square().sum() / n;
        const double sd = std::sqrt(var);
        stddev[j] = sd > 0.0 ? sd : 1.0;  // zero-variance dims pass through
    }
}

Eigen::MatrixXd apply_standardization(const ClassifierModel& model, const Eigen::MatrixXd& x) {
    return (x.rowwise() - model.mean.transpose()).array().rowwise() /
           model.stddev.transpose().array();
}

// L1-hinge dual coordinate descent (one-vs-all, fixed visiting order so the
// result is deterministic). Bias handled by an appended constant feature.
// Returns the weight vector with the bias as its last entry.
Eigen::VectorXd train_svm_class(const Eigen::MatrixXd& x, const std::vector<double>& y, double c) {
    constexpr double kTol = 1e-4;
    constexpr int kMaxEpochs = 1000;
    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols();

    Eigen::VectorXd w = Eigen::VectorXd::Zero(d + 1);
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd q_diag(n);
    for (Eigen::Index i = 0; i < n; ++i) q_diag[i] = x.row(i).squaredNorm() + 1.0;

    for (int epoch = 0; epoch < kMaxEpochs; ++epoch) {
        double max_violation = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double margin = w.head(d).dot(x.row(i)) + w[d];
            const double grad = y[static_cast<std::size_t>(i)] * margin - 1.0;
            double projected = grad;
            if (alpha[i] <= 0.0)
                projected = std::min(grad, 0.0);
            else if (alpha[i] >= c)
                projected = std::max(grad, 0.0);
            max_violation = std::max(max_violation, std::abs(projected));
            if (projected == 0.0) continue;
            const double next = std::clamp(alpha[i] - grad / q_diag[i], 0.0, c);
            const double delta = next - alpha[i];
            if (delta == 0.0) continue;
            alpha[i] = next;
            w.head(d) += delta * y[static_cast<std::size_t>(i)] * x.row(i).transpose();
            w[d] += delta * y[static_cast<std::size_t>(i)];
        }
        if (max_violation < kTol) break;
    }
    return w;
}

}  // namespace

ClassifierModel train_classifier(const FeatureSet& train, ClassifierKind kind, double hyper) {
    const Eigen::Index n = train.features.rows();
    const Eigen::Index d = train.features.cols();
    if (n == 0 || static_cast<std::size_t>(n) != train.labels.size())
        throw ConfigError("train_classifier: features and labels disagree");
    const int num_classes = train.num_classes > 0
                                ? train.num_classes
                                : *std::max_element(train.labels.begin(), train.labels.end()) + 1;
    if (num_classes < 2) throw ConfigError("train_classifier: need at least two classes");
    std::vector<int> per_class(static_cast<std::size_t>(num_classes), 0);
    for (int label : train.labels) {
        if (label < 0 || label >= num_classes)
            throw ConfigError("train_classifier: label out of range");
        ++per_class[static_cast<std::size_t>(label)];
    }
    for (int c = 0; c < num_classes; ++c)
        if (per_class[static_cast<std::size_t>(c)] == 0)
            throw ConfigError("train_classifier: class " + std::to_string(c) +
                              " has no training examples");

    ClassifierModel model;
    model.kind = kind;
    model.num_classes = num_classes;
    standardize_params(train.features, model.mean, model.stddev);
    const Eigen::MatrixXd x = apply_standardization(model, train.features);

    model.weights.resize(num_classes, d);
    model.biases.resize(num_classes);

    if (kind == ClassifierKind::ridge_ova) {
        const double lambda = hyper;
        if (lambda < 0.0) throw ConfigError("train_classifier: ridge lambda must be >= 0");
        // closed form on the bias-augmented system
        Eigen::MatrixXd xa(n, d + 1);
        xa.leftCols(d) = x;
        xa.col(d).setOnes();
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d + 1, d + 1);
        gram.selfadjointView<Eigen::Lower>().rankUpdate(xa.transpose());
        gram.diagonal().array() += lambda;
        Eigen::MatrixXd targets = Eigen::MatrixXd::Constant(n, num_classes, -1.0);
        for (Eigen::Index i = 0; i < n; ++i)
            targets(i, train.labels[static_cast<std::size_t>(i)]) = 1.0;
        Eigen::LLT<Eigen::MatrixXd> llt(gram);
        const Eigen::MatrixXd sol = llt.solve(xa.transpose() * targets);
        if (llt.info() != Eigen::Success || !sol.allFinite())
            throw NumericalError("train_classifier: singular ridge system");
        model.weights = sol.topRows(d).transpose();
        model.biases = sol.row(d).transpose();
    } else {
        const double c = hyper;
        if (!(c > 0.0)) throw ConfigError("train_classifier: SVM C must be positive");
        std::vector<double> y(static_cast<std::size_t>(n));
        for (int cls = 0; cls < num_classes; ++cls) {
            for (Eigen::Index i = 0; i < n; ++i)
                y[static_cast<std::size_t>(i)] =
                    train.labels[static_cast<std::size_t>(i)] == cls ? 1.0 : -1.0;
            const Eigen::VectorXd w = train_svm_class(x, y, c);
            model.weights.row(cls) = w.head(d).transpose();
            model.biases[cls] = w[d];
        }
    }
    return model;
}

std::vector<int> predict(const ClassifierModel& model, const Eigen::MatrixXd& features) {
    if (model.num_classes < 2) throw ConfigError("predict: untrained model");
    if (features.cols() != model.weights.cols())
        throw ConfigError("predict: feature dimension does not match the model");
    const Eigen::MatrixXd x = apply_standardization(model, features);
    const Eigen::MatrixXd scores =
        (x * model.weights.transpose()).rowwise() + model.biases.transpose();
    std::vector<int> labels(static_cast<std::size_t>(features.rows()));
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        int best = 0;
        for (int c = 1; c < model.num_classes; ++c)
            if (scores(i, c) > scores(i, best)) best = c;  // ties keep the lowest id
        labels[static_cast<std::size_t>(i)] = best;
    }
    return labels;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& actual) {
    if (predicted.empty() || predicted.size() != actual.size())
        throw ConfigError("accuracy: empty or mismatched label lists");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        if (predicted[i] == actual[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

ConfusionMatrix confusion_matrix(const std::vector<int>& predicted,
                                 const std::vector<int>& actual, int num_classes) {
    if (predicted.empty() || predicted.size() != actual.size())
        throw ConfigError("confusion_matrix: empty or mismatched label lists");
    if (num_classes < 1) throw ConfigError("confusion_matrix: num_classes must be >= 1");
    ConfusionMatrix cm;
    cm.counts = Eigen::MatrixXi::Zero(num_classes, num_classes);
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const int a = actual[i];
        const int p = predicted[i];
        if (a < 0 || a >= num_classes || p < 0 || p >= num_classes)
            throw ConfigError("confusion_matrix: label out of range");
        ++cm.counts(a, p);
    }
    cm.total = static_cast<int>(predicted.size());
    return cm;
}

double ConfusionMatrix::overall_accuracy() const {
    return total > 0 ? static_cast<double>(counts.trace()) / total : 0.0;
}

double ConfusionMatrix::recall(int i) const {
    const int row_sum = counts.row(i).sum();
    return row_sum > 0 ? static_cast<double>(counts(i, i)) / row_sum : 0.0;
}

double ConfusionMatrix::precision(int j) const {
    const int col_sum = counts.col(j).sum();
    return col_sum > 0 ? static_cast<double>(counts(j, j)) / col_sum : 0.0;
}

std::string ConfusionMatrix::to_csv() const {
    const int c = static_cast<int>(counts.rows());
    std::ostringstream os;
    os << std::fixed << std::setprecision(1);
    os << "actual\\predicted";
    for (int j = 0; j < c; ++j) os << ",pred_" << j << ",pred_" << j << "_pct";
    os << ",recall_pct\n";
    for (int i = 0; i < c; ++i) {
        os << "actual_" << i;
        for (int j = 0; j < c; ++j)
            os << ',' << counts(i, j) << ',' << (total > 0 ? 100.0 * counts(i, j) / total : 0.0);
        os << ',' << 100.0 * recall(i) << '\n';
    }
    os << "precision_pct";
    for (int j = 0; j < c; ++j) os << ',' << 100.0 * precision(j) << ',';
    os << ',' << 100.0 * overall_accuracy() << '\n';
    return os.str();
}

}  // namespace esnevo::classify
