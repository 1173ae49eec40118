#pragma once

#include "esnevo/dataset.hpp"
#include "esnevo/esn.hpp"

#include <string>
#include <vector>

namespace esnevo {

/// How per-pattern layer-M states are pooled into one feature vector.
enum class Pooling { last, mean, concat };

std::string to_string(Pooling p);
Pooling pooling_from_string(const std::string& s);

/// Per-pattern feature vectors extracted from the M-th reservoir states.
struct FeatureSet {
    Eigen::MatrixXd features;  ///< one row per pattern
    std::vector<int> labels;
    Pooling pooling = Pooling::last;
    int num_classes = 0;
};

/// Trains the readout as a recurrent autoencoder: targets are the inputs
/// u(n) at every step n (washout steps dropped per pattern). Returns the
/// network with its readout trained at the given ridge strength.
EsnNetwork fit_rae(EsnNetwork net, const DatasetSplit& split, double lambda);

/// Reconstruction RMSE of a trained RAE over all steps of all patterns.
double reconstruction_rmse(const EsnNetwork& net, const DatasetSplit& split);

/// Runs every pattern and pools its layer-M states; does not require (or
/// touch) the readout. Pooling `last` keeps x^M(T), `mean` averages over
/// steps, `concat` flattens all T states step-major.
FeatureSet extract_features(const EsnNetwork& net, const DatasetSplit& split, Pooling pooling);

/// fit_rae followed by reconstruction_rmse on the same split, sharing one
/// recurrence pass; the optimizer fitness path. Bit-identical to calling the
/// two operations separately.
std::pair<EsnNetwork, double> fit_rae_with_rmse(EsnNetwork net, const DatasetSplit& split,
                                                double lambda);

namespace detail {
/// Reconstruction outputs per pattern (T x d each) from batched states;
/// shared by reconstruction_rmse and the optimizer fitness path so both see
/// bit-identical values.
std::vector<Eigen::MatrixXd> reconstruct_batch(const EsnNetwork& net, const DatasetSplit& split);
/// Stacked (N x size_M) states and (N x d) targets, washout removed,
/// pattern-major rows; the readout training layout.
void stack_states(const EsnNetwork& net, const DatasetSplit& split,
                  Eigen::MatrixXd& states, Eigen::MatrixXd& targets);
}  // namespace detail

}  // namespace esnevo
