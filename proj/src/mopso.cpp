#include "esnevo/mopso.hpp"

#include "esnevo/errors.hpp"
#include "esnevo/rae.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

namespace esnevo::mopso {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFailure = std::numeric_limits<double>::max();
constexpr double kConnEps = 1e-9;  // keeps connectivity dims strictly above the open lower bound
}  // namespace

bool dominates(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size()) throw ConfigError("dominates: objective length mismatch");
    if (u.empty()) throw ConfigError("dominates: empty objective vectors");
    bool strictly_better = false;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] > v[i]) return false;
        if (u[i] < v[i]) strictly_better = true;
    }
    return strictly_better;
}

std::vector<int> pareto_filter(const std::vector<std::vector<double>>& points) {
    if (points.empty()) throw ConfigError("pareto_filter: empty input");
    const std::size_t n = points.size();
    const std::size_t m = points[0].size();
    for (const auto& p : points)
        if (p.size() != m) throw ConfigError("pareto_filter: inconsistent objective lengths");

    // Lexicographic order: any dominator of a point sorts before it, so only
    // the sorted prefix has to be checked.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (points[static_cast<std::size_t>(a)] != points[static_cast<std::size_t>(b)])
            return points[static_cast<std::size_t>(a)] < points[static_cast<std::size_t>(b)];
        return a < b;
    });

    std::vector<int> kept;
    if (m == 2) {
        // sweep on f1; a point is dominated by the best f2 of strictly
        // smaller f1, or by a strictly smaller f2 at equal f1
        double best_before = kInf;
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            const double f1 = points[static_cast<std::size_t>(order[i])][0];
            double group_min = kInf;
            while (j < n && points[static_cast<std::size_t>(order[j])][0] == f1) {
                group_min = std::min(group_min, points[static_cast<std::size_t>(order[j])][1]);
                ++j;
            }
            for (std::size_t k = i; k < j; ++k) {
                const double f2 = points[static_cast<std::size_t>(order[k])][1];
                if (best_before <= f2) continue;
                if (group_min < f2) continue;
                kept.push_back(order[k]);
            }
            best_before = std::min(best_before, group_min);
            i = j;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const auto& p = points[static_cast<std::size_t>(order[i])];
            bool dominated = false;
            for (std::size_t j = 0; j < i && !dominated; ++j)
                dominated = dominates(points[static_cast<std::size_t>(order[j])], p);
            if (!dominated) kept.push_back(order[i]);
        }
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

std::vector<double> crowding_distances(const std::vector<std::vector<double>>& objectives) {
    const std::size_t n = objectives.size();
    std::vector<double> dist(n, 0.0);
    if (n == 0) return dist;
    const std::size_t m = objectives[0].size();
    if (n <= 2) {
        std::fill(dist.begin(), dist.end(), kInf);
        return dist;
    }
    std::vector<int> order(n);
    for (std::size_t obj = 0; obj < m; ++obj) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return objectives[static_cast<std::size_t>(a)][obj] <
                   objectives[static_cast<std::size_t>(b)][obj];
        });
        const double lo = objectives[static_cast<std::size_t>(order.front())][obj];
        const double hi = objectives[static_cast<std::size_t>(order.back())][obj];
        dist[static_cast<std::size_t>(order.front())] = kInf;
        dist[static_cast<std::size_t>(order.back())] = kInf;
        if (hi == lo) continue;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double gap = objectives[static_cast<std::size_t>(order[i + 1])][obj] -
                               objectives[static_cast<std::size_t>(order[i - 1])][obj];
            dist[static_cast<std::size_t>(order[i])] += gap / (hi - lo);
        }
    }
    return dist;
}

double hypervolume2d(const std::vector<std::vector<double>>& front,
                     const std::vector<double>& ref_point) {
    if (ref_point.size() != 2) throw ConfigError("hypervolume2d: reference point must be 2-D");
    std::vector<std::vector<double>> pts;
    pts.reserve(front.size());
    for (const auto& p : front) {
        if (p.size() != 2) throw ConfigError("hypervolume2d: front points must be 2-D");
        if (p[0] > ref_point[0] || p[1] > ref_point[1])
            throw ConfigError("hypervolume2d: point outside the reference box");
        pts.push_back(p);
    }
    if (pts.empty()) return 0.0;
    std::sort(pts.begin(), pts.end());
    double area = 0.0;
    double best_f2 = kInf;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        best_f2 = std::min(best_f2, pts[i][1]);
        const double next_f1 = (i + 1 < pts.size()) ? pts[i + 1][0] : ref_point[0];
        if (next_f1 > pts[i][0]) area += (next_f1 - pts[i][0]) * (ref_point[1] - best_f2);
    }
    return area;
}

std::vector<double> failure_objectives(std::size_t m) {
    return std::vector<double>(m, kFailure);
}

bool is_failure(const std::vector<double>& objectives) {
    if (objectives.empty()) return true;
    for (double v : objectives)
        if (!std::isfinite(v) || v == kFailure) return true;
    return false;
}

ParetoArchive::ParetoArchive(int capacity) : capacity_(capacity) {
    if (capacity < 1) throw ConfigError("ParetoArchive capacity must be >= 1");
}

bool ParetoArchive::insert(ArchiveEntry entry) {
    if (is_failure(entry.objectives)) return false;
    for (const auto& e : entries_) {
        if (e.objectives == entry.objectives) return false;  // keep the earlier duplicate
        if (dominates(e.objectives, entry.objectives)) return false;
    }
    entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                  [&](const ArchiveEntry& e) {
                                      return dominates(entry.objectives, e.objectives);
                                  }),
                   entries_.end());
    entries_.push_back(std::move(entry));
    if (static_cast<int>(entries_.size()) > capacity_) truncate();
    return true;
}

void ParetoArchive::truncate() {
    while (static_cast<int>(entries_.size()) > capacity_) {
        std::vector<std::vector<double>> objs;
        objs.reserve(entries_.size());
        for (const auto& e : entries_) objs.push_back(e.objectives);
        const std::vector<double> dist = crowding_distances(objs);
        std::size_t evict = 0;
        for (std::size_t i = 1; i < dist.size(); ++i)
            if (dist[i] <= dist[evict]) evict = i;  // ties evict the later entry
        entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(evict));
    }
}

const ArchiveEntry& ParetoArchive::select_leader(Rng& rng) const {
    if (entries_.empty()) throw ConfigError("select_leader: empty archive");
    if (entries_.size() == 1) return entries_.front();

    std::vector<std::vector<double>> objs;
    objs.reserve(entries_.size());
    for (const auto& e : entries_) objs.push_back(e.objectives);
    std::vector<double> weight = crowding_distances(objs);
    double max_finite = 0.0;
    for (double d : weight)
        if (std::isfinite(d)) max_finite = std::max(max_finite, d);
    for (double& d : weight) {
        if (!std::isfinite(d)) d = max_finite > 0.0 ? 2.0 * max_finite : 1.0;
        else if (max_finite == 0.0) d = 1.0;
    }
    const double total = std::accumulate(weight.begin(), weight.end(), 0.0);
    std::uniform_real_distribution<double> uni(0.0, total);
    double ticket = uni(rng);
    for (std::size_t i = 0; i < weight.size(); ++i) {
        ticket -= weight[i];
        if (ticket <= 0.0) return entries_[i];
    }
    return entries_.back();
}

double pso_velocity(double v, double p, double local_best, double leader, double inertia,
                    double c1, double c2, double r1, double r2) {
    return inertia * v + c1 * r1 * (local_best - p) + c2 * r2 * (leader - p);
}

void update_velocity(Eigen::VectorXd& velocity, const Eigen::VectorXd& position,
                     const Eigen::VectorXd& local_best, const Eigen::VectorXd& leader,
                     const MopsoParams& params, const Bounds& bounds, Rng& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (Eigen::Index d = 0; d < velocity.size(); ++d) {
        const double r1 = uni(rng);
        const double r2 = uni(rng);
        const double v = pso_velocity(velocity[d], position[d], local_best[d], leader[d],
                                      params.inertia, params.c1, params.c2, r1, r2);
        const double span = bounds.upper[d] - bounds.lower[d];
        velocity[d] = std::clamp(v, -span, span);
    }
}

void update_position(Eigen::VectorXd& position, const Eigen::VectorXd& velocity,
                     const Bounds& bounds) {
    for (Eigen::Index d = 0; d < position.size(); ++d)
        position[d] = std::clamp(position[d] + velocity[d], bounds.lower[d], bounds.upper[d]);
}

void mutate(Eigen::VectorXd& position, int iteration, int max_iterations, double mutation_rate,
            const Bounds& bounds, Rng& rng) {
    if (max_iterations <= 0) return;
    const double decay = 1.0 - static_cast<double>(iteration) / static_cast<double>(max_iterations);
    const double probability = mutation_rate * decay;
    if (probability <= 0.0) return;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    if (uni(rng) >= probability) return;
    for (Eigen::Index d = 0; d < position.size(); ++d) {
        const double half_window = 0.5 * (bounds.upper[d] - bounds.lower[d]) * decay;
        std::uniform_real_distribution<double> window(position[d] - half_window,
                                                      position[d] + half_window);
        position[d] = std::clamp(window(rng), bounds.lower[d], bounds.upper[d]);
    }
}

namespace {

std::vector<std::vector<double>> evaluate_all(const MultiObjective& objective,
                                              const std::vector<Eigen::VectorXd>& positions) {
    std::vector<std::vector<double>> result(positions.size());
    const int n = static_cast<int>(positions.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        try {
            result[static_cast<std::size_t>(i)] = objective(positions[static_cast<std::size_t>(i)]);
        } catch (...) {
            result[static_cast<std::size_t>(i)].clear();  // treated as a failed evaluation
        }
    }
    return result;
}

std::vector<std::vector<double>> archive_objectives(const ParetoArchive& archive) {
    std::vector<std::vector<double>> objs;
    objs.reserve(archive.size());
    for (const auto& e : archive.entries()) objs.push_back(e.objectives);
    return objs;
}

}  // namespace

MopsoResult run_mopso(const MultiObjective& objective, const Bounds& bounds,
                      const MopsoParams& params, std::uint64_t seed) {
    if (params.population < 1) throw ConfigError("run_mopso: population must be >= 1");
    if (params.iterations < 0) throw ConfigError("run_mopso: iterations must be >= 0");
    if (bounds.lower.size() != bounds.upper.size() || bounds.lower.size() == 0)
        throw ConfigError("run_mopso: invalid bounds");
    for (Eigen::Index d = 0; d < bounds.lower.size(); ++d)
        if (!(bounds.lower[d] <= bounds.upper[d])) throw ConfigError("run_mopso: lower > upper bound");

    const Eigen::Index dim = bounds.lower.size();
    Rng rng(seed);
    std::vector<Eigen::VectorXd> positions(static_cast<std::size_t>(params.population));
    std::vector<Eigen::VectorXd> velocities(static_cast<std::size_t>(params.population),
                                            Eigen::VectorXd::Zero(dim));
    for (auto& p : positions) {
        p.resize(dim);
        for (Eigen::Index d = 0; d < dim; ++d) {
            std::uniform_real_distribution<double> uni(bounds.lower[d], bounds.upper[d]);
            p[d] = uni(rng);
        }
    }

    std::vector<std::vector<double>> objectives = evaluate_all(objective, positions);
    std::vector<Eigen::VectorXd> best_positions = positions;
    std::vector<std::vector<double>> best_objectives = objectives;

    ParetoArchive archive(params.leaders);
    for (std::size_t i = 0; i < positions.size(); ++i)
        archive.insert({positions[i], objectives[i]});

    MopsoResult result;
    result.trace.push_back(archive_objectives(archive));

    for (int it = 1; it <= params.iterations; ++it) {
        for (std::size_t i = 0; i < positions.size(); ++i) {
            const Eigen::VectorXd leader =
                archive.empty() ? best_positions[i] : archive.select_leader(rng).position;
            update_velocity(velocities[i], positions[i], best_positions[i], leader, params,
                            bounds, rng);
            update_position(positions[i], velocities[i], bounds);
            mutate(positions[i], it - 1, params.iterations, params.mutation_rate, bounds, rng);
        }

        objectives = evaluate_all(objective, positions);

        std::uniform_int_distribution<int> coin(0, 1);
        for (std::size_t i = 0; i < positions.size(); ++i) {
            const bool cand_failed = is_failure(objectives[i]);
            const bool best_failed = is_failure(best_objectives[i]);
            bool replace = false;
            if (cand_failed) {
                replace = false;
            } else if (best_failed) {
                replace = true;
            } else if (dominates(objectives[i], best_objectives[i])) {
                replace = true;
            } else if (!dominates(best_objectives[i], objectives[i])) {
                replace = coin(rng) == 1;  // mutually non-dominated
            }
            if (replace) {
                best_positions[i] = positions[i];
                best_objectives[i] = objectives[i];
            }
        }

        for (std::size_t i = 0; i < positions.size(); ++i)
            archive.insert({positions[i], objectives[i]});
        result.trace.push_back(archive_objectives(archive));
    }

    result.archive = archive.entries();
    return result;
}

// ---- ESN architecture search -------------------------------------------

void ArchSearchSpace::validate() const {
    if (num_layers < 1) throw ConfigError("ArchSearchSpace: num_layers must be >= 1");
    if (static_cast<int>(max_sizes.size()) != num_layers)
        throw ConfigError("ArchSearchSpace: max_sizes must have num_layers entries");
    for (int s : max_sizes)
        if (s < 1) throw ConfigError("ArchSearchSpace: max sizes must be >= 1");
    if (!(conn_lower >= 0.0) || !(conn_upper <= 1.0) || !(conn_lower < conn_upper))
        throw ConfigError("ArchSearchSpace: connectivity bounds must satisfy 0 <= lb < ub <= 1");
}

Bounds ArchSearchSpace::bounds() const {
    validate();
    const int m = num_layers;
    const int len = genome_length();
    Bounds b;
    b.lower.resize(len);
    b.upper.resize(len);
    const double conn_lo = conn_lower + kConnEps;  // open lower bound
    for (int i = 0; i < 2 * m; ++i) {               // layer, inter and input connectivities
        b.lower[i] = conn_lo;
        b.upper[i] = conn_upper;
    }
    for (int k = 0; k < m; ++k) {
        b.lower[2 * m + k] = 1.0;
        b.upper[2 * m + k] = static_cast<double>(max_sizes[static_cast<std::size_t>(k)]);
    }
    return b;
}

EsnConfig decode(const Eigen::VectorXd& genome, const ArchSearchSpace& space,
                 const EsnDefaults& defaults, std::uint64_t rng_seed) {
    space.validate();
    if (genome.size() != space.genome_length())
        throw ConfigError("decode: genome length must be 3 * num_layers");
    const int m = space.num_layers;
    EsnConfig config;
    config.num_layers = m;
    config.layer_connectivities.assign(genome.data(), genome.data() + m);
    config.inter_connectivities.assign(genome.data() + m, genome.data() + (2 * m - 1));
    config.input_connectivity = genome[2 * m - 1];
    config.layer_sizes.resize(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
        const long rounded = std::lround(genome[2 * m + k]);
        config.layer_sizes[static_cast<std::size_t>(k)] = static_cast<int>(
            std::clamp<long>(rounded, 1, space.max_sizes[static_cast<std::size_t>(k)]));
    }
    config.spectral_radius_target = defaults.spectral_radius;
    config.ridge_lambda = defaults.ridge_lambda;
    config.washout = defaults.washout;
    config.rng_seed = rng_seed;
    return config;
}

std::vector<double> evaluate_genome(const Eigen::VectorXd& genome, const ArchSearchSpace& space,
                                    const EsnDefaults& defaults, const DatasetSplit& train,
                                    ObjectiveMode mode, std::uint64_t eval_seed) {
    const std::size_t m_obj = mode == ObjectiveMode::tri ? 3 : 2;
    try {
        if (train.empty()) throw ConfigError("evaluate_genome: empty training split");
        const EsnConfig config = decode(genome, space, defaults, eval_seed);
        EsnNetwork net = build_network(config, static_cast<int>(train.front().sequence.cols()));
        auto [fitted, train_rmse] = fit_rae_with_rmse(std::move(net), train, defaults.ridge_lambda);
        (void)fitted;

        const int m = space.num_layers;
        const double arcr = genome.head(m).mean();
        std::vector<double> objectives{train_rmse, arcr};
        if (mode == ObjectiveMode::tri) {
            double size_sum = 0.0;
            int max_allowed = 1;
            for (int k = 0; k < m; ++k) {
                size_sum += config.layer_sizes[static_cast<std::size_t>(k)];
                max_allowed = std::max(max_allowed, space.max_sizes[static_cast<std::size_t>(k)]);
            }
            objectives.push_back(size_sum / m / static_cast<double>(max_allowed));
        }
        if (is_failure(objectives)) return failure_objectives(m_obj);
        return objectives;
    } catch (const std::exception& e) {
#pragma omp critical(esnevo_eval_log)
        std::cerr << "evaluate_genome failed: " << e.what() << "\n";
        return failure_objectives(m_obj);
    }
}

EsnMopsoResult run_mopso_esn(const DatasetSplit& train, const ArchSearchSpace& space,
                             const EsnDefaults& defaults, const MopsoParams& params,
                             ObjectiveMode mode, std::uint64_t master_seed) {
    space.validate();
    if (train.empty()) throw ConfigError("run_mopso_esn: empty training split");
    const int t_kept = static_cast<int>(train.front().sequence.rows()) - defaults.washout;
    if (t_kept <= 0) throw ConfigError("run_mopso_esn: washout leaves no training rows");
    if (defaults.ridge_lambda == 0.0) {
        const long rows = static_cast<long>(t_kept) * static_cast<long>(train.size());
        const int max_size = *std::max_element(space.max_sizes.begin(), space.max_sizes.end());
        if (rows < max_size)
            throw ConfigError("run_mopso_esn: fewer state rows than the readout can stabilize "
                              "with ridge_lambda = 0; increase the data or set ridge_lambda > 0");
    }

    const std::uint64_t eval_seed = derive_seed(master_seed, 0xE5EED);
    const std::uint64_t swarm_seed = derive_seed(master_seed, 0x5A327);
    const MultiObjective objective = [&](const Eigen::VectorXd& genome) {
        return evaluate_genome(genome, space, defaults, train, mode, eval_seed);
    };

    MopsoResult engine = run_mopso(objective, space.bounds(), params, swarm_seed);

    EsnMopsoResult result;
    result.trace = std::move(engine.trace);
    result.front.reserve(engine.archive.size());
    for (auto& e : engine.archive) {
        EsnArchiveEntry entry;
        entry.config = decode(e.position, space, defaults, eval_seed);
        entry.genome = std::move(e.position);
        entry.objectives = std::move(e.objectives);
        entry.eval_seed = eval_seed;
        result.front.push_back(std::move(entry));
    }
    return result;
}

}  // namespace esnevo::mopso
