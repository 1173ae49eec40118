#pragma once

#include "esnevo/rae.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace esnevo::classify {

enum class ClassifierKind { ridge_ova, linear_svm };

std::string to_string(ClassifierKind k);
ClassifierKind classifier_from_string(const std::string& s);

/// One-vs-all linear model over z-scored features.
struct ClassifierModel {
    ClassifierKind kind = ClassifierKind::linear_svm;
    Eigen::MatrixXd weights;  ///< num_classes x feature_dim
    Eigen::VectorXd biases;   ///< num_classes
    Eigen::VectorXd mean;     ///< per-dimension train mean
    Eigen::VectorXd stddev;   ///< per-dimension train stddev (1 where zero variance)
    int num_classes = 0;
};

/// Trains a one-vs-all classifier on the training features. ridge_ova
/// solves the +-1 regression in closed form; linear_svm minimizes the
/// L2-regularized hinge loss by deterministic dual coordinate descent to
/// tolerance 1e-4. `hyper` is C for the SVM and lambda for ridge.
ClassifierModel train_classifier(const FeatureSet& train, ClassifierKind kind, double hyper);

/// argmax over per-class scores; ties pick the lowest class id.
std::vector<int> predict(const ClassifierModel& model, const Eigen::MatrixXd& features);

/// Fraction of matching labels.
double accuracy(const std::vector<int>& predicted, const std::vector<int>& actual);

/// Count matrix with entry (i, j) = patterns of actual class i predicted as
/// class j, plus the percentage summaries of the paper-style layout.
struct ConfusionMatrix {
    Eigen::MatrixXi counts;
    int total = 0;

    double overall_accuracy() const;
    /// Fraction of actual-class-i patterns classified correctly.
    double recall(int i) const;
    /// Fraction of predicted-class-j patterns that are correct.
    double precision(int j) const;
    /// CSV with counts, per-cell percentages and row/column summaries.
    std::string to_csv() const;
};

ConfusionMatrix confusion_matrix(const std::vector<int>& predicted,
                                 const std::vector<int>& actual, int num_classes);

}  // namespace esnevo::classify
