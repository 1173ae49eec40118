#include "esnevo/rae.hpp"

#include "esnevo/errors.hpp"

#include <algorithm>
#include <vector>

namespace esnevo {

std::string to_string(Pooling p) {
    switch (p) {
        case Pooling::last: return "last";
        case Pooling::mean: return "mean";
        case Pooling::concat: return "concat";
    }
    return "last";
}

Pooling pooling_from_string(const std::string& s) {
    if (s == "last") return Pooling::last;
    if (s == "mean") return Pooling::mean;
    if (s == "concat") return Pooling::concat;
    throw ConfigError("unknown pooling '" + s + "' (expected last|mean|concat)");
}

namespace {

BatchStates run_split(const EsnNetwork& net, const DatasetSplit& split) {
    if (split.empty()) throw ConfigError("empty dataset split");
    std::vector<Eigen::MatrixXd> seqs;
    seqs.reserve(split.size());
    for (const auto& p : split) seqs.push_back(p.sequence);
    return run_batch(net, seqs);
}

void stack_from_batch(const EsnNetwork& net, const DatasetSplit& split, const BatchStates& batch,
                      Eigen::MatrixXd& states, Eigen::MatrixXd& targets) {
    const int t_total = batch.seq_len;
    const int washout = net.config.washout;
    const int t_kept = t_total - washout;
    if (t_kept <= 0) throw ConfigError("washout leaves no training rows");

    const int num_patterns = batch.num_patterns;
    const Eigen::Index s = net.last_layer_size();
    const Eigen::Index d = net.input_dim;
    states.resize(static_cast<Eigen::Index>(num_patterns) * t_kept, s);
    targets.resize(static_cast<Eigen::Index>(num_patterns) * t_kept, d);
    for (int n = washout; n < t_total; ++n) {
        const auto step = batch.step(n);
        for (int p = 0; p < num_patterns; ++p) {
            const Eigen::Index row = static_cast<Eigen::Index>(p) * t_kept + (n - washout);
            states.row(row) = step.col(p).transpose();
            targets.row(row) = split[static_cast<std::size_t>(p)].sequence.row(n);
        }
    }
}

std::vector<Eigen::MatrixXd> reconstruct_from_batch(const EsnNetwork& net,
                                                    const BatchStates& batch) {
    if (!net.readout_trained()) throw ConfigError("reconstruction requires a trained readout");
    const Eigen::Index d = net.w_out.rows();
    std::vector<Eigen::MatrixXd> outputs(static_cast<std::size_t>(batch.num_patterns));
    for (auto& o : outputs) o.resize(batch.seq_len, d);
    Eigen::MatrixXd y_step;
    for (int n = 0; n < batch.seq_len; ++n) {
        y_step.noalias() = net.w_out * batch.step(n);
        for (int p = 0; p < batch.num_patterns; ++p)
            outputs[static_cast<std::size_t>(p)].row(n) = y_step.col(p).transpose();
    }
    return outputs;
}

double rmse_against_inputs(const DatasetSplit& split, const std::vector<Eigen::MatrixXd>& outputs) {
    std::vector<Eigen::MatrixXd> targets;
    targets.reserve(split.size());
    for (const auto& p : split) targets.push_back(p.sequence);
    return rmse(targets, outputs);
}

}  // namespace

namespace detail {

void stack_states(const EsnNetwork& net, const DatasetSplit& split,
                  Eigen::MatrixXd& states, Eigen::MatrixXd& targets) {
    stack_from_batch(net, split, run_split(net, split), states, targets);
}

std::vector<Eigen::MatrixXd> reconstruct_batch(const EsnNetwork& net, const DatasetSplit& split) {
    return reconstruct_from_batch(net, run_split(net, split));
}

}  // namespace detail

EsnNetwork fit_rae(EsnNetwork net, const DatasetSplit& split, double lambda) {
    if (!split.empty() && split.front().sequence.cols() != net.input_dim)
        throw ConfigError("fit_rae: dataset dimension does not match the network input");
    Eigen::MatrixXd states, targets;
    detail::stack_states(net, split, states, targets);
    return train_readout(std::move(net), states, targets, lambda);
}

double reconstruction_rmse(const EsnNetwork& net, const DatasetSplit& split) {
    return rmse_against_inputs(split, detail::reconstruct_batch(net, split));
}

std::pair<EsnNetwork, double> fit_rae_with_rmse(EsnNetwork net, const DatasetSplit& split,
                                                double lambda) {
    if (!split.empty() && split.front().sequence.cols() != net.input_dim)
        throw ConfigError("fit_rae: dataset dimension does not match the network input");
    // One recurrence pass serves both the readout fit and the reported error;
    // run_batch is deterministic, so this equals fit_rae + reconstruction_rmse
    // bit for bit.
    const BatchStates batch = run_split(net, split);
    Eigen::MatrixXd states, targets;
    stack_from_batch(net, split, batch, states, targets);
    net = train_readout(std::move(net), states, targets, lambda);
    const double err = rmse_against_inputs(split, reconstruct_from_batch(net, batch));
    return {std::move(net), err};
}

FeatureSet extract_features(const EsnNetwork& net, const DatasetSplit& split, Pooling pooling) {
    const BatchStates batch = run_split(net, split);
    const Eigen::Index s = net.last_layer_size();
    const int t_total = batch.seq_len;
    const int num_patterns = batch.num_patterns;

    FeatureSet fs;
    fs.pooling = pooling;
    fs.labels.reserve(split.size());
    for (const auto& p : split) fs.labels.push_back(p.label);
    fs.num_classes = fs.labels.empty() ? 0 : *std::max_element(fs.labels.begin(), fs.labels.end()) + 1;

    switch (pooling) {
        case Pooling::last: {
            fs.features.resize(num_patterns, s);
            const auto step = batch.step(t_total - 1);
            for (int p = 0; p < num_patterns; ++p)
                fs.features.row(p) = step.col(p).transpose();
            break;
        }
        case Pooling::mean: {
            Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(s, num_patterns);
            for (int n = 0; n < t_total; ++n) sum += batch.step(n);
            sum /= static_cast<double>(t_total);
            fs.features = sum.transpose();
            break;
        }
        case Pooling::concat: {
            fs.features.resize(num_patterns, static_cast<Eigen::Index>(t_total) * s);
            for (int n = 0; n < t_total; ++n) {
                const auto step = batch.step(n);
                for (int p = 0; p < num_patterns; ++p)
                    fs.features.row(p).segment(static_cast<Eigen::Index>(n) * s, s) =
                        step.col(p).transpose();
            }
            break;
        }
    }
    return fs;
}

}  // namespace esnevo
