#include "esnevo/weight_pso.hpp"

#include "esnevo/errors.hpp"
#include "esnevo/rae.hpp"
#include "esnevo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

namespace esnevo::wpso {

namespace {

std::int64_t genome_length(const EsnNetwork& net) {
    std::int64_t n = net.input.nonzeros();
    for (const auto& layer : net.layers) n += layer.nonzeros();
    for (const auto& w : net.inter) n += w.nonzeros();
    return n;
}

template <typename Fn>
void for_each_masked(const BoolMask& mask, Fn&& fn) {
    for (Eigen::Index r = 0; r < mask.rows(); ++r)
        for (Eigen::Index c = 0; c < mask.cols(); ++c)
            if (mask(r, c)) fn(r, c);
}

}  // namespace

Eigen::VectorXd flatten(const EsnNetwork& net) {
    Eigen::VectorXd genome(genome_length(net));
    Eigen::Index pos = 0;
    for_each_masked(net.input.mask,
                    [&](Eigen::Index r, Eigen::Index c) { genome[pos++] = net.input.values(r, c); });
    for (std::size_t k = 0; k < net.layers.size(); ++k)
        for_each_masked(net.layers[k].mask, [&](Eigen::Index r, Eigen::Index c) {
            genome[pos++] = net.layers_raw[k](r, c);
        });
    for (const auto& w : net.inter)
        for_each_masked(w.mask,
                        [&](Eigen::Index r, Eigen::Index c) { genome[pos++] = w.values(r, c); });
    return genome;
}

EsnNetwork unflatten(const Eigen::VectorXd& genome, const EsnNetwork& templ) {
    if (genome.size() != genome_length(templ))
        throw ConfigError("unflatten: genome length does not match the template masks");
    EsnNetwork net = templ;
    Eigen::Index pos = 0;
    net.input.values.setZero();
    for_each_masked(net.input.mask,
                    [&](Eigen::Index r, Eigen::Index c) { net.input.values(r, c) = genome[pos++]; });
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        net.layers_raw[k].setZero();
        for_each_masked(net.layers[k].mask, [&](Eigen::Index r, Eigen::Index c) {
            net.layers_raw[k](r, c) = genome[pos++];
        });
    }
    for (auto& w : net.inter) {
        w.values.setZero();
        for_each_masked(w.mask,
                        [&](Eigen::Index r, Eigen::Index c) { w.values(r, c) = genome[pos++]; });
    }
    detail::finalize_network(net);
    return net;
}

PsoResult minimize(const std::function<double(const Eigen::VectorXd&)>& fitness,
                   const std::vector<Eigen::VectorXd>& initial_positions,
                   const mopso::Bounds& bounds, double velocity_clamp,
                   const PsoParams& params, std::uint64_t seed) {
    if (initial_positions.empty()) throw ConfigError("minimize: empty initial swarm");
    if (params.iterations < 0) throw ConfigError("minimize: iterations must be >= 0");
    const Eigen::Index dim = initial_positions.front().size();
    for (const auto& p : initial_positions)
        if (p.size() != dim) throw ConfigError("minimize: inconsistent particle dimensions");
    if (bounds.lower.size() != dim || bounds.upper.size() != dim)
        throw ConfigError("minimize: bounds do not match the particle dimension");

    const int pop = static_cast<int>(initial_positions.size());
    std::vector<Eigen::VectorXd> positions = initial_positions;
    std::vector<Eigen::VectorXd> velocities(static_cast<std::size_t>(pop),
                                            Eigen::VectorXd::Zero(dim));
    std::vector<double> values(static_cast<std::size_t>(pop));

    auto evaluate_all = [&]() {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < pop; ++i) {
            try {
                values[static_cast<std::size_t>(i)] = fitness(positions[static_cast<std::size_t>(i)]);
            } catch (...) {
                values[static_cast<std::size_t>(i)] = std::numeric_limits<double>::infinity();
            }
        }
    };

    evaluate_all();
    std::vector<Eigen::VectorXd> best_positions = positions;
    std::vector<double> best_values = values;
    int global_best = 0;
    for (int i = 1; i < pop; ++i)
        if (best_values[static_cast<std::size_t>(i)] < best_values[static_cast<std::size_t>(global_best)])
            global_best = i;

    PsoResult result;
    result.best_position = best_positions[static_cast<std::size_t>(global_best)];
    result.best_value = best_values[static_cast<std::size_t>(global_best)];
    result.trace.push_back(result.best_value);

    Rng rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int it = 1; it <= params.iterations; ++it) {
        for (int i = 0; i < pop; ++i) {
            auto& v = velocities[static_cast<std::size_t>(i)];
            auto& p = positions[static_cast<std::size_t>(i)];
            const auto& lbp = best_positions[static_cast<std::size_t>(i)];
            for (Eigen::Index d = 0; d < dim; ++d) {
                const double r1 = uni(rng);
                const double r2 = uni(rng);
                const double vel = mopso::pso_velocity(v[d], p[d], lbp[d],
                                                       result.best_position[d], params.inertia,
                                                       params.c1, params.c2, r1, r2);
                v[d] = std::clamp(vel, -velocity_clamp, velocity_clamp);
                p[d] = std::clamp(p[d] + v[d], bounds.lower[d], bounds.upper[d]);
            }
        }

        evaluate_all();
        for (int i = 0; i < pop; ++i) {
            if (values[static_cast<std::size_t>(i)] < best_values[static_cast<std::size_t>(i)]) {
                best_values[static_cast<std::size_t>(i)] = values[static_cast<std::size_t>(i)];
                best_positions[static_cast<std::size_t>(i)] = positions[static_cast<std::size_t>(i)];
            }
            if (best_values[static_cast<std::size_t>(i)] < result.best_value) {
                result.best_value = best_values[static_cast<std::size_t>(i)];
                result.best_position = best_positions[static_cast<std::size_t>(i)];
            }
        }
        result.trace.push_back(result.best_value);
    }
    return result;
}

namespace {

// One gain per weight matrix: layers, then inter matrices, then the input.
EsnNetwork apply_gains(const Eigen::VectorXd& gains, const EsnNetwork& templ) {
    const int m = templ.config.num_layers;
    EsnNetwork net = templ;
    for (int k = 0; k < m; ++k) net.layers_raw[static_cast<std::size_t>(k)] *= gains[k];
    for (int k = 0; k + 1 < m; ++k) net.inter[static_cast<std::size_t>(k)].values *= gains[m + k];
    net.input.values *= gains[2 * m - 1];
    detail::finalize_network(net);
    return net;
}

}  // namespace

WeightPsoResult run_weight_pso(const EsnNetwork& incumbent, const DatasetSplit& train,
                               const PsoParams& params, std::uint64_t seed, WeightMode mode) {
    if (train.empty()) throw ConfigError("run_weight_pso: empty training split");
    const double lambda = incumbent.config.ridge_lambda;

    if (params.iterations == 0) {
        auto [net, err] = fit_rae_with_rmse(incumbent, train, lambda);
        return {std::move(net), err, {err}};
    }

    Eigen::VectorXd seed_genome;
    std::function<EsnNetwork(const Eigen::VectorXd&)> realize;
    mopso::Bounds bounds;
    if (mode == WeightMode::full) {
        seed_genome = flatten(incumbent);
        if (seed_genome.size() > kFullModeWarnDims)
            std::cerr << "run_weight_pso: " << seed_genome.size()
                      << " weight dimensions; consider WeightMode::scaling_only\n";
        bounds.lower = Eigen::VectorXd::Constant(seed_genome.size(), -1.0);
        bounds.upper = Eigen::VectorXd::Constant(seed_genome.size(), 1.0);
        realize = [&incumbent](const Eigen::VectorXd& g) { return unflatten(g, incumbent); };
    } else {
        seed_genome = Eigen::VectorXd::Ones(2 * incumbent.config.num_layers);
        bounds.lower = Eigen::VectorXd::Constant(seed_genome.size(), -2.0);
        bounds.upper = Eigen::VectorXd::Constant(seed_genome.size(), 2.0);
        realize = [&incumbent](const Eigen::VectorXd& g) { return apply_gains(g, incumbent); };
    }

    const auto fitness = [&](const Eigen::VectorXd& genome) {
        return fit_rae_with_rmse(realize(genome), train, lambda).second;
    };

    // incumbent first, then perturbed copies: the best-ever fitness can never
    // exceed the incumbent's
    Rng init_rng(derive_seed(seed, 1));
    std::uniform_real_distribution<double> noise(-0.1, 0.1);
    std::vector<Eigen::VectorXd> swarm;
    swarm.reserve(static_cast<std::size_t>(std::max(params.population, 1)));
    swarm.push_back(seed_genome);
    for (int i = 1; i < params.population; ++i) {
        Eigen::VectorXd p = seed_genome;
        for (Eigen::Index d = 0; d < p.size(); ++d)
            p[d] = std::clamp(p[d] + noise(init_rng), bounds.lower[d], bounds.upper[d]);
        swarm.push_back(std::move(p));
    }

    PsoResult pso = minimize(fitness, swarm, bounds, /*velocity_clamp=*/2.0, params,
                             derive_seed(seed, 2));

    auto [net, err] = fit_rae_with_rmse(realize(pso.best_position), train, lambda);
    return {std::move(net), err, std::move(pso.trace)};
}

}  // namespace esnevo::wpso
