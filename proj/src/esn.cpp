#include "esnevo/esn.hpp"

#include "esnevo/errors.hpp"
#include "esnevo/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>

namespace esnevo {

void EsnConfig::validate() const {
    if (num_layers < 1) throw ConfigError("num_layers must be >= 1");
    if (static_cast<int>(layer_sizes.size()) != num_layers)
        throw ConfigError("layer_sizes must have num_layers entries");
    if (static_cast<int>(layer_connectivities.size()) != num_layers)
        throw ConfigError("layer_connectivities must have num_layers entries");
    if (static_cast<int>(inter_connectivities.size()) != num_layers - 1)
        throw ConfigError("inter_connectivities must have num_layers - 1 entries");
    for (int s : layer_sizes)
        if (s < 1) throw ConfigError("layer sizes must be >= 1");
    auto check_conn = [](double c, const char* which) {
        if (!(c > 0.0) || c > 1.0) {
            std::ostringstream os;
            os << which << " connectivity must be in (0, 1], got " << c;
            throw ConfigError(os.str());
        }
    };
    check_conn(input_connectivity, "input");
    for (double c : layer_connectivities) check_conn(c, "layer");
    for (double c : inter_connectivities) check_conn(c, "inter-layer");
    if (!(spectral_radius_target > 0.0))
        throw ConfigError("spectral_radius_target must be positive");
    if (ridge_lambda < 0.0) throw ConfigError("ridge_lambda must be non-negative");
    if (washout < 0) throw ConfigError("washout must be non-negative");
}

std::int64_t WeightMatrix::nonzeros() const {
    return static_cast<std::int64_t>(mask.count());
}

double WeightMatrix::density() const {
    const auto total = static_cast<double>(mask.size());
    return total > 0 ? static_cast<double>(nonzeros()) / total : 0.0;
}

void WeightMatrix::refresh_mirror(double density_threshold) {
    use_sparse = density() <= density_threshold;
    if (!use_sparse) {
        sparse.resize(0, 0);
        return;
    }
    sparse.resize(values.rows(), values.cols());
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(nonzeros()));
    for (Eigen::Index c = 0; c < values.cols(); ++c)
        for (Eigen::Index r = 0; r < values.rows(); ++r)
            if (mask(r, c)) trips.emplace_back(r, c, values(r, c));
    sparse.setFromTriplets(trips.begin(), trips.end());
    sparse.makeCompressed();
}

void WeightMatrix::apply(const Eigen::MatrixXd& x, Eigen::MatrixXd& out) const {
    if (use_sparse)
        out.noalias() = sparse * x;
    else
        out.noalias() = values * x;
}

void WeightMatrix::apply_add(const Eigen::MatrixXd& x, Eigen::MatrixXd& out) const {
    if (use_sparse)
        out.noalias() += sparse * x;
    else
        out.noalias() += values * x;
}

namespace {

// Sampled mask with round(connectivity * entries) true cells, at least one.
BoolMask sample_mask(Eigen::Index rows, Eigen::Index cols, double connectivity, Rng& rng) {
    const std::int64_t total = static_cast<std::int64_t>(rows) * cols;
    std::int64_t nnz = std::llround(connectivity * static_cast<double>(total));
    nnz = std::clamp<std::int64_t>(nnz, 1, total);

    std::vector<std::int64_t> idx(static_cast<std::size_t>(total));
    std::iota(idx.begin(), idx.end(), 0);
    for (std::int64_t i = 0; i < nnz; ++i) {
        std::uniform_int_distribution<std::int64_t> pick(i, total - 1);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
    }
    std::sort(idx.begin(), idx.begin() + nnz);

    BoolMask mask = BoolMask::Constant(rows, cols, false);
    for (std::int64_t i = 0; i < nnz; ++i) {
        const std::int64_t flat = idx[static_cast<std::size_t>(i)];
        mask(flat / cols, flat % cols) = true;  // row-major flat index
    }
    return mask;
}

// Values uniform in [-1, 1] at mask positions, drawn in row-major order.
Eigen::MatrixXd sample_values(const BoolMask& mask, Rng& rng) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Eigen::MatrixXd values = Eigen::MatrixXd::Zero(mask.rows(), mask.cols());
    for (Eigen::Index r = 0; r < mask.rows(); ++r)
        for (Eigen::Index c = 0; c < mask.cols(); ++c)
            if (mask(r, c)) values(r, c) = uni(rng);
    return values;
}

// Arnoldi factorization A V_m = V_m H_m + h e_m^T restarted on the dominant
// Ritz vector. MatVec: void(const VectorXd&, VectorXd&).
template <typename MatVec>
double arnoldi_spectral_radius(Eigen::Index n, const MatVec& matvec) {
    if (n == 0) return 0.0;
    constexpr double kTol = 1e-10;
    constexpr int kMaxRestarts = 60;
    const int m = static_cast<int>(std::min<Eigen::Index>(n, 64));

    Eigen::VectorXd v0 = Eigen::VectorXd::Ones(n);
    v0.normalize();

    double prev_estimate = -1.0;
    int stable = 0;
    Eigen::MatrixXd basis(n, m + 1);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd w(n);

    for (int restart = 0; restart < kMaxRestarts; ++restart) {
        basis.col(0) = v0;
        hess.setZero();
        int steps = 0;
        bool breakdown = false;
        for (int j = 0; j < m; ++j) {
            matvec(basis.col(j), w);
            // modified Gram-Schmidt with one reorthogonalization pass
            for (int pass = 0; pass < 2; ++pass) {
                for (int i = 0; i <= j; ++i) {
                    const double h = basis.col(i).dot(w);
                    if (pass == 0)
                        hess(i, j) = h;
                    else
                        hess(i, j) += h;
                    w -= h * basis.col(i);
                }
            }
            const double hnext = w.norm();
            hess(j + 1, j) = hnext;
            steps = j + 1;
            if (hnext < 1e-14) {
                breakdown = true;  // exact invariant subspace
                break;
            }
            basis.col(j + 1) = w / hnext;
        }

        const Eigen::MatrixXd h_square = hess.topLeftCorner(steps, steps);
        Eigen::EigenSolver<Eigen::MatrixXd> es(h_square, /*computeEigenvectors=*/true);
        double estimate = 0.0;
        int lead = 0;
        for (int i = 0; i < steps; ++i) {
            const double mag = std::abs(es.eigenvalues()[i]);
            if (mag > estimate) {
                estimate = mag;
                lead = i;
            }
        }
        if (breakdown || steps == n) return estimate;  // projection is exact

        if (prev_estimate >= 0.0 &&
            std::abs(estimate - prev_estimate) <= kTol * std::max(estimate, 1e-300)) {
            if (++stable >= 2) return estimate;
        } else {
            stable = 0;
        }
        prev_estimate = estimate;

        // restart from the leading Ritz vector (real part for complex pairs)
        Eigen::VectorXd next = basis.leftCols(steps) * es.eigenvectors().col(lead).real();
        const double norm = next.norm();
        if (norm < 1e-14 || !next.allFinite()) {
            next = basis.leftCols(steps) * es.eigenvectors().col(lead).imag();
            if (next.norm() < 1e-14 || !next.allFinite()) return estimate;
        }
        v0 = next.normalized();
    }
    return prev_estimate;
}

}  // namespace

double spectral_radius(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw ConfigError("spectral_radius requires a square matrix");
    if (m.size() == 0) return 0.0;
    if (m.rows() == 1) return std::abs(m(0, 0));
    if (m.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    return arnoldi_spectral_radius(m.rows(), [&](const auto& x, Eigen::VectorXd& out) {
        out.noalias() = m * x;
    });
}

double spectral_radius(const Eigen::SparseMatrix<double>& m) {
    if (m.rows() != m.cols()) throw ConfigError("spectral_radius requires a square matrix");
    if (m.size() == 0) return 0.0;
    if (m.rows() == 1) return std::abs(m.coeff(0, 0));
    if (m.nonZeros() == 0) return 0.0;
    return arnoldi_spectral_radius(m.rows(), [&](const auto& x, Eigen::VectorXd& out) {
        out.noalias() = m * x;
    });
}

namespace detail {

void finalize_network(EsnNetwork& net) {
    const int m_layers = net.config.num_layers;
    net.layer_scales.assign(static_cast<std::size_t>(m_layers), 1.0);
    net.layer_unscaled.assign(static_cast<std::size_t>(m_layers), false);
    for (int k = 0; k < m_layers; ++k) {
        auto& layer = net.layers[static_cast<std::size_t>(k)];
        const auto& raw = net.layers_raw[static_cast<std::size_t>(k)];
        const double radius = spectral_radius(raw);
        if (radius < kUnscalableRadius) {
            net.layer_unscaled[static_cast<std::size_t>(k)] = true;
            layer.values = raw;
        } else {
            const double scale = net.config.spectral_radius_target / radius;
            net.layer_scales[static_cast<std::size_t>(k)] = scale;
            layer.values = raw * scale;
        }
        layer.refresh_mirror(kSparseDensityThreshold);
    }
    net.input.refresh_mirror(kSparseDensityThreshold);
    for (auto& w : net.inter) w.refresh_mirror(kSparseDensityThreshold);
    net.w_out.resize(0, 0);
}

}  // namespace detail

EsnNetwork build_network(const EsnConfig& config, int input_dim) {
    config.validate();
    if (input_dim < 1) throw ConfigError("input_dim must be >= 1");

    EsnNetwork net;
    net.config = config;
    net.input_dim = input_dim;
    Rng rng(config.rng_seed);

    // Sampling order is fixed: input, then each layer, then each inter matrix.
    net.input.mask = sample_mask(config.layer_sizes[0], input_dim, config.input_connectivity, rng);
    net.input.values = sample_values(net.input.mask, rng);

    net.layers.resize(static_cast<std::size_t>(config.num_layers));
    net.layers_raw.resize(static_cast<std::size_t>(config.num_layers));
    for (int k = 0; k < config.num_layers; ++k) {
        const int s = config.layer_sizes[static_cast<std::size_t>(k)];
        auto& layer = net.layers[static_cast<std::size_t>(k)];
        layer.mask = sample_mask(s, s, config.layer_connectivities[static_cast<std::size_t>(k)], rng);
        net.layers_raw[static_cast<std::size_t>(k)] = sample_values(layer.mask, rng);
    }
    net.inter.resize(static_cast<std::size_t>(config.num_layers - 1));
    for (int k = 0; k + 1 < config.num_layers; ++k) {
        auto& w = net.inter[static_cast<std::size_t>(k)];
        w.mask = sample_mask(config.layer_sizes[static_cast<std::size_t>(k) + 1],
                             config.layer_sizes[static_cast<std::size_t>(k)],
                             config.inter_connectivities[static_cast<std::size_t>(k)], rng);
        w.values = sample_values(w.mask, rng);
    }

    detail::finalize_network(net);
    return net;
}

BatchStates run_batch(const EsnNetwork& net, std::span<const Eigen::MatrixXd> inputs,
                      bool collect_all_layers) {
    if (inputs.empty()) throw ConfigError("run_batch: empty input batch");
    const auto seq_len = inputs[0].rows();
    const int num_patterns = static_cast<int>(inputs.size());
    for (const auto& u : inputs) {
        if (u.cols() != net.input_dim)
            throw ConfigError("input dimension does not match W_in columns");
        if (u.rows() != seq_len)
            throw ConfigError("run_batch requires equally long patterns");
    }

    const int m_layers = net.config.num_layers;
    std::vector<Eigen::MatrixXd> state(static_cast<std::size_t>(m_layers));
    for (int k = 0; k < m_layers; ++k)
        state[static_cast<std::size_t>(k)] =
            Eigen::MatrixXd::Zero(net.config.layer_sizes[static_cast<std::size_t>(k)], num_patterns);

    BatchStates out;
    out.seq_len = static_cast<int>(seq_len);
    out.num_patterns = num_patterns;
    out.last.resize(net.last_layer_size(), seq_len * num_patterns);
    if (collect_all_layers) {
        out.all.resize(static_cast<std::size_t>(m_layers));
        for (int k = 0; k < m_layers; ++k)
            out.all[static_cast<std::size_t>(k)].resize(
                net.config.layer_sizes[static_cast<std::size_t>(k)], seq_len * num_patterns);
    }

    Eigen::MatrixXd u_step(net.input_dim, num_patterns);
    Eigen::MatrixXd pre;
    for (Eigen::Index n = 0; n < seq_len; ++n) {
        for (int p = 0; p < num_patterns; ++p)
            u_step.col(p) = inputs[static_cast<std::size_t>(p)].row(n).transpose();

        net.input.apply(u_step, pre);
        net.layers[0].apply_add(state[0], pre);
        state[0] = pre.array().tanh();
        for (int k = 1; k < m_layers; ++k) {
            // layer k is driven by layer k-1's state at the same step
            net.inter[static_cast<std::size_t>(k) - 1].apply(state[static_cast<std::size_t>(k) - 1], pre);
            net.layers[static_cast<std::size_t>(k)].apply_add(state[static_cast<std::size_t>(k)], pre);
            state[static_cast<std::size_t>(k)] = pre.array().tanh();
        }

        out.last.middleCols(n * num_patterns, num_patterns) = state[static_cast<std::size_t>(m_layers) - 1];
        if (collect_all_layers)
            for (int k = 0; k < m_layers; ++k)
                out.all[static_cast<std::size_t>(k)].middleCols(n * num_patterns, num_patterns) =
                    state[static_cast<std::size_t>(k)];
    }
    return out;
}

StateTrajectory run_sequence(const EsnNetwork& net, const Eigen::MatrixXd& inputs) {
    std::vector<Eigen::MatrixXd> batch_input(1, inputs);
    BatchStates batch = run_batch(net, batch_input, /*collect_all_layers=*/true);
    StateTrajectory traj;
    traj.layers.reserve(batch.all.size());
    for (const auto& layer_states : batch.all)
        traj.layers.push_back(layer_states.transpose());  // T x size_k
    return traj;
}

EsnNetwork train_readout(EsnNetwork net, const Eigen::MatrixXd& states,
                         const Eigen::MatrixXd& targets, double lambda) {
    if (states.rows() != targets.rows())
        throw ConfigError("train_readout: states and targets count mismatch");
    if (states.rows() == 0) throw ConfigError("train_readout: empty training set");
    if (states.cols() != net.last_layer_size())
        throw ConfigError("train_readout: state width does not match layer M size");
    if (lambda < 0.0) throw ConfigError("train_readout: lambda must be non-negative");

    const Eigen::Index s = states.cols();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(s, s);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(states.transpose());
    gram.diagonal().array() += lambda;

    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    Eigen::MatrixXd rhs = states.transpose() * targets;        // s x out
    Eigen::MatrixXd w_out_t = llt.solve(rhs);
    if (llt.info() != Eigen::Success || !w_out_t.allFinite())
        throw NumericalError("train_readout: normal equations are ill-conditioned (singular system with lambda = "
                             + std::to_string(lambda) + ")");
    net.w_out = w_out_t.transpose();
    return net;
}

Eigen::VectorXd readout(const EsnNetwork& net, const Eigen::VectorXd& state) {
    if (!net.readout_trained()) throw ConfigError("readout: W_out is untrained");
    if (state.size() != net.w_out.cols())
        throw ConfigError("readout: state size does not match W_out");
    return net.w_out * state;
}

double rmse(std::span<const Eigen::MatrixXd> targets, std::span<const Eigen::MatrixXd> outputs) {
    if (targets.size() != outputs.size())
        throw ConfigError("rmse: collections differ in pattern count");
    if (targets.empty()) throw ConfigError("rmse: empty input");
    double sum_sq = 0.0;
    std::int64_t count = 0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i].rows() != outputs[i].rows() || targets[i].cols() != outputs[i].cols())
            throw ConfigError("rmse: shape mismatch");
        sum_sq += (targets[i] - outputs[i]).squaredNorm();
        count += targets[i].size();
    }
    if (count == 0) throw ConfigError("rmse: empty input");
    return std::sqrt(sum_sq / static_cast<double>(count));
}

}  // namespace esnevo
