#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <span>
#include <vector>

namespace esnevo {

using BoolMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Structural parameters of a single- or multi-layer echo state network.
/// A basic ESN is the M = 1 special case.
struct EsnConfig {
    int num_layers = 1;                        ///< M
    std::vector<int> layer_sizes;              ///< M entries, each >= 1
    double input_connectivity = 1.0;           ///< fraction in (0, 1]
    std::vector<double> layer_connectivities;  ///< M entries in (0, 1]
    std::vector<double> inter_connectivities;  ///< M-1 entries in (0, 1]
    double spectral_radius_target = 0.9;
    double ridge_lambda = 1e-6;
    int washout = 0;
    std::uint64_t rng_seed = 0;

    /// Throws ConfigError when any invariant is violated.
    void validate() const;
};

/// A weight matrix with its sparsity mask. Low-density matrices carry a
/// sparse mirror so products can skip the zero structure; `values` stays
/// authoritative and the mirror always holds the same numbers.
struct WeightMatrix {
    Eigen::MatrixXd values;
    BoolMask mask;
    bool use_sparse = false;
    Eigen::SparseMatrix<double> sparse;

    std::int64_t nonzeros() const;
    double density() const;

    /// Rebuild the sparse mirror from values/mask; enables it below the
    /// density threshold.
    void refresh_mirror(double density_threshold);

    /// out = values * x, routed through the sparse mirror when enabled.
    void apply(const Eigen::MatrixXd& x, Eigen::MatrixXd& out) const;
    /// out += values * x
    void apply_add(const Eigen::MatrixXd& x, Eigen::MatrixXd& out) const;
};

/// A realized network: fixed random weights plus the trainable readout.
///
/// Recurrent matrices are stored twice: `layers[k].values` holds the
/// spectrally scaled weights used by the dynamics, `layers_raw[k]` the
/// pre-scale values in [-1, 1] that weight-level optimization operates on.
struct EsnNetwork {
    EsnConfig config;
    int input_dim = 0;

    WeightMatrix input;                      ///< size_1 x input_dim
    std::vector<WeightMatrix> layers;        ///< scaled, size_k x size_k
    std::vector<Eigen::MatrixXd> layers_raw; ///< unscaled values, same masks
    std::vector<WeightMatrix> inter;         ///< size_{k+1} x size_k
    std::vector<double> layer_scales;        ///< factor applied to each layer
    std::vector<bool> layer_unscaled;        ///< true when left unscaled (radius ~ 0)

    Eigen::MatrixXd w_out;                   ///< output_dim x size_M; 0x0 until trained

    bool readout_trained() const { return w_out.size() > 0; }
    int last_layer_size() const { return config.layer_sizes.back(); }
};

/// Per-layer state sequences of one input pattern; layers[k] is T x size_k.
struct StateTrajectory {
    std::vector<Eigen::MatrixXd> layers;
    const Eigen::MatrixXd& last_layer() const { return layers.back(); }
};

/// Layer-M states of a whole batch of equally long patterns, advanced in
/// lockstep. Column n * num_patterns + p holds pattern p at step n+1.
struct BatchStates {
    Eigen::MatrixXd last;                  ///< size_M x (T * P)
    std::vector<Eigen::MatrixXd> all;      ///< per layer, size_k x (T * P); optional
    int seq_len = 0;
    int num_patterns = 0;

    Eigen::Ref<const Eigen::MatrixXd> step(int n) const {
        return last.middleCols(static_cast<Eigen::Index>(n) * num_patterns, num_patterns);
    }
};

/// Builds a network from `config`: masks with round(connectivity * entries)
/// non-zeros (at least one), values uniform in [-1, 1], each recurrent
/// matrix scaled to the target spectral radius. Deterministic in rng_seed.
EsnNetwork build_network(const EsnConfig& config, int input_dim);

/// Runs the reservoir dynamics on one pattern (T x input_dim), states
/// initialized to zero. Returns all layer states for n = 1..T.
StateTrajectory run_sequence(const EsnNetwork& net, const Eigen::MatrixXd& inputs);

/// Batched run over patterns that share T; all patterns advance together so
/// each step is one matrix product per weight matrix. Column p of step n
/// matches run_sequence on pattern p exactly (zero reset per pattern).
BatchStates run_batch(const EsnNetwork& net, std::span<const Eigen::MatrixXd> inputs,
                      bool collect_all_layers = false);

/// Ridge regression of the readout: W_out = argmin |W X^T - Y^T|^2 + lambda |W|^2
/// via the normal equations and an SPD solve. `states` is N x size_M (one
/// state per row), `targets` N x output_dim. Returns the updated network.
EsnNetwork train_readout(EsnNetwork net, const Eigen::MatrixXd& states,
                         const Eigen::MatrixXd& targets, double lambda);

/// y = W_out * x_M (identity output activation).
Eigen::VectorXd readout(const EsnNetwork& net, const Eigen::VectorXd& state);

/// Root mean square error over matching collections; the denominator is the
/// total number of scalar comparisons (patterns x steps x dims).
double rmse(std::span<const Eigen::MatrixXd> targets, std::span<const Eigen::MatrixXd> outputs);

/// Largest eigenvalue magnitude, Arnoldi iteration with deterministic
/// restarts; exact 0 for the zero matrix and ~0 for nilpotent ones.
double spectral_radius(const Eigen::MatrixXd& m);
double spectral_radius(const Eigen::SparseMatrix<double>& m);

namespace detail {
/// Density below which sparse mirrors are enabled.
inline constexpr double kSparseDensityThreshold = 0.25;
/// Recurrent matrices with spectral radius below this are left unscaled.
inline constexpr double kUnscalableRadius = 1e-12;

/// Rebuilds scaled layers, scales and sparse mirrors from layers_raw and the
/// masks; clears the readout. Shared by build_network and weight updates.
void finalize_network(EsnNetwork& net);
}  // namespace detail

}  // namespace esnevo
