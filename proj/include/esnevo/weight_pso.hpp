#pragma once

#include "esnevo/dataset.hpp"
#include "esnevo/esn.hpp"
#include "esnevo/mopso.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace esnevo::wpso {

/// Canonical weight genome of a network: the mask-true entries of W_in
/// (row-major), then each recurrent layer's unscaled values, then each
/// inter-layer matrix. unflatten(flatten(net)) reproduces the raw weights
/// exactly.
Eigen::VectorXd flatten(const EsnNetwork& net);

/// Writes genome values back at the mask positions of a structurally
/// identical template, rescales every recurrent layer to the spectral
/// radius target and clears the readout.
EsnNetwork unflatten(const Eigen::VectorXd& genome, const EsnNetwork& templ);

struct PsoParams {
    int population = 10;
    int iterations = 50;
    double inertia = 0.9;  ///< w
    double c1 = 0.1;
    double c2 = 0.2;
};

struct PsoResult {
    Eigen::VectorXd best_position;
    double best_value = 0.0;
    std::vector<double> trace;  ///< best-ever value per iteration (index 0 = initial)
};

/// Single-objective PSO over a fixed initial swarm (particle count =
/// initial_positions.size()). Deterministic in the seed; fitness
/// evaluations within an iteration run in parallel and must be pure.
PsoResult minimize(const std::function<double(const Eigen::VectorXd&)>& fitness,
                   const std::vector<Eigen::VectorXd>& initial_positions,
                   const mopso::Bounds& bounds, double velocity_clamp,
                   const PsoParams& params, std::uint64_t seed);

enum class WeightMode {
    full,          ///< every masked weight is a decision variable
    scaling_only,  ///< one multiplicative gain per weight matrix (2M dims)
};

/// Genomes above this dimension trigger a stderr warning suggesting
/// scaling_only mode.
inline constexpr int kFullModeWarnDims = 20000;

struct WeightPsoResult {
    EsnNetwork network;        ///< best-ever weights, readout retrained
    double train_rmse = 0.0;
    std::vector<double> trace;
};

/// Level-2 refinement of one archived solution: minimizes the training
/// reconstruction RMSE over the non-trained weights, swarm seeded with the
/// incumbent (particle 0) plus uniform perturbations of amplitude 0.1.
/// The result never degrades the incumbent's training RMSE.
WeightPsoResult run_weight_pso(const EsnNetwork& incumbent, const DatasetSplit& train,
                               const PsoParams& params, std::uint64_t seed,
                               WeightMode mode = WeightMode::full);

}  // namespace esnevo::wpso
