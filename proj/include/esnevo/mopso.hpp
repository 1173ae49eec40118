#pragma once

#include "esnevo/dataset.hpp"
#include "esnevo/esn.hpp"
#include "esnevo/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace esnevo::mopso {

/// Pareto dominance for minimization: u dominates v iff u is no worse in
/// every coordinate and u != v.
bool dominates(const std::vector<double>& u, const std::vector<double>& v);

/// Indices of the points not dominated by any other point. Duplicates of a
/// non-dominated point are all kept (a point never dominates itself).
std::vector<int> pareto_filter(const std::vector<std::vector<double>>& points);

/// NSGA-II crowding distance per point; boundary points get +infinity.
std::vector<double> crowding_distances(const std::vector<std::vector<double>>& objectives);

/// Exact hypervolume of a 2-D minimization front against a reference point
/// weakly dominated by every front point (sweep over f1).
double hypervolume2d(const std::vector<std::vector<double>>& front,
                     const std::vector<double>& ref_point);

struct ArchiveEntry {
    Eigen::VectorXd position;
    std::vector<double> objectives;
};

/// Bounded repository of mutually non-dominated solutions. Insertion keeps
/// the invariant; overflow evicts the most crowded entry (smallest crowding
/// distance). Entries with identical objectives keep the earlier one.
class ParetoArchive {
public:
    explicit ParetoArchive(int capacity);

    /// Returns true when the candidate enters the archive. Dominated members
    /// are removed first, then the archive is truncated to capacity.
    bool insert(ArchiveEntry entry);

    const std::vector<ArchiveEntry>& entries() const { return entries_; }
    int capacity() const { return capacity_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    /// Roulette selection weighted by crowding distance; boundary entries
    /// weigh twice the largest finite distance so sparse regions and the
    /// extremes stay preferred.
    const ArchiveEntry& select_leader(Rng& rng) const;

private:
    void truncate();

    int capacity_;
    std::vector<ArchiveEntry> entries_;
};

struct Bounds {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
};

struct MopsoParams {
    int population = 20;
    int iterations = 50;
    double inertia = 0.5;   ///< w
    double c1 = 0.1;        ///< cognitive factor
    double c2 = 0.2;        ///< social factor
    int leaders = 10;       ///< archive capacity
    double mutation_rate = 0.5;
};

/// One dimension of the Eq-8 rule, unclamped:
/// v' = w v + c1 r1 (lbp - p) + c2 r2 (leader - p).
double pso_velocity(double v, double p, double local_best, double leader, double inertia,
                    double c1, double c2, double r1, double r2);

/// Eq-8 velocity update for one particle, per-dimension uniform r1/r2 drawn
/// from `rng`; velocity clamped to +-(upper - lower).
void update_velocity(Eigen::VectorXd& velocity, const Eigen::VectorXd& position,
                     const Eigen::VectorXd& local_best, const Eigen::VectorXd& leader,
                     const MopsoParams& params, const Bounds& bounds, Rng& rng);

/// Eq-9 position update with clamping to the bounds.
void update_position(Eigen::VectorXd& position, const Eigen::VectorXd& velocity,
                     const Bounds& bounds);

/// Decaying uniform mutation: with probability rate * (1 - it/it_max) every
/// dimension is resampled inside a window of width (ub - lb) * (1 - it/it_max)
/// centered at the current value, clamped to the bounds.
void mutate(Eigen::VectorXd& position, int iteration, int max_iterations, double mutation_rate,
            const Bounds& bounds, Rng& rng);

using MultiObjective = std::function<std::vector<double>(const Eigen::VectorXd&)>;

struct MopsoResult {
    std::vector<ArchiveEntry> archive;
    /// Archive objective vectors after every iteration (index 0 = initial).
    std::vector<std::vector<std::vector<double>>> trace;
};

/// Generic MOPSO with an external leader repository. The objective must be
/// pure and thread-safe; evaluations within an iteration run in parallel,
/// all random draws happen serially, so the result is deterministic in the
/// seed regardless of thread count. Objective vectors holding the failure
/// sentinel (+DBL_MAX) never enter the archive.
MopsoResult run_mopso(const MultiObjective& objective, const Bounds& bounds,
                      const MopsoParams& params, std::uint64_t seed);

/// Failure sentinel for objective evaluations.
std::vector<double> failure_objectives(std::size_t m);
bool is_failure(const std::vector<double>& objectives);

// ---- ESN architecture search -------------------------------------------

enum class ObjectiveMode { bi, tri };

/// Box constraints of the architecture genome (Table 2 layout). The genome
/// packs [layer_conn x M, inter_conn x M-1, input_conn, size_raw x M],
/// 3M dimensions in total.
struct ArchSearchSpace {
    int num_layers = 2;                  ///< M
    std::vector<int> max_sizes{500, 500};///< R_s^k per layer
    double conn_lower = 0.0;             ///< exclusive lower bound
    double conn_upper = 1.0;

    int genome_length() const { return 3 * num_layers; }
    Bounds bounds() const;
    void validate() const;
};

/// Non-architecture ESN settings shared by every evaluated genome.
struct EsnDefaults {
    double spectral_radius = 0.9;
    double ridge_lambda = 1e-6;
    int washout = 0;
};

/// Genome -> EsnConfig: sizes rounded and clamped to [1, R_s^k],
/// connectivities passed through.
EsnConfig decode(const Eigen::VectorXd& genome, const ArchSearchSpace& space,
                 const EsnDefaults& defaults, std::uint64_t rng_seed);

/// Builds the network, fits the RAE on the train split and returns
/// [train RMSE, ARCR] (bi) or [train RMSE, ARCR, ARS_norm] (tri), where
/// ARCR is the mean layer connectivity and ARS_norm the mean decoded size
/// over max_k R_s^k. Failures yield the sentinel vector.
std::vector<double> evaluate_genome(const Eigen::VectorXd& genome, const ArchSearchSpace& space,
                                    const EsnDefaults& defaults, const DatasetSplit& train,
                                    ObjectiveMode mode, std::uint64_t eval_seed);

struct EsnArchiveEntry {
    Eigen::VectorXd genome;
    std::vector<double> objectives;
    std::uint64_t eval_seed = 0;
    EsnConfig config;
};

struct EsnMopsoResult {
    std::vector<EsnArchiveEntry> front;
    std::vector<std::vector<std::vector<double>>> trace;
};

/// Level-1 architecture optimization on a training split (Algorithm 1 over
/// the genome space). Deterministic given master_seed; the reservoir seed is
/// fixed per run so the optimizer sees a noise-free landscape.
EsnMopsoResult run_mopso_esn(const DatasetSplit& train, const ArchSearchSpace& space,
                             const EsnDefaults& defaults, const MopsoParams& params,
                             ObjectiveMode mode, std::uint64_t master_seed);

}  // namespace esnevo::mopso
