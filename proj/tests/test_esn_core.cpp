#include "esnevo/esn.hpp"

#include "esnevo/errors.hpp"
#include "esnevo/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace esnevo;

namespace {

EsnConfig small_config(std::uint64_t seed) {
    EsnConfig c;
    c.num_layers = 2;
    c.layer_sizes = {12, 9};
    c.layer_connectivities = {0.4, 0.6};
    c.inter_connectivities = {0.5};
    c.input_connectivity = 0.8;
    c.rng_seed = seed;
    return c;
}

bool networks_identical(const EsnNetwork& a, const EsnNetwork& b) {
    if ((a.input.values.array() != b.input.values.array()).any()) return false;
    for (std::size_t k = 0; k < a.layers.size(); ++k) {
        if ((a.layers[k].values.array() != b.layers[k].values.array()).any()) return false;
        if ((a.layers_raw[k].array() != b.layers_raw[k].array()).any()) return false;
        if ((a.layers[k].mask != b.layers[k].mask).any()) return false;
    }
    for (std::size_t k = 0; k < a.inter.size(); ++k)
        if ((a.inter[k].values.array() != b.inter[k].values.array()).any()) return false;
    return true;
}

}  // namespace

TEST_SUITE("esn_core") {

TEST_CASE("config validation rejects bad inputs") {
    EsnConfig c = small_config(1);
    CHECK_NOTHROW(c.validate());
    c.layer_sizes = {12, 0};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small_config(1);
    c.layer_connectivities = {0.0, 0.5};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small_config(1);
    c.layer_connectivities = {1.5, 0.5};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small_config(1);
    c.inter_connectivities = {};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK_THROWS_AS(build_network(small_config(1), 0), ConfigError);
}

TEST_CASE("1x1 network: the single entry lands exactly on the target radius") {
    EsnConfig c;
    c.num_layers = 1;
    c.layer_sizes = {1};
    c.layer_connectivities = {1.0};
    c.input_connectivity = 1.0;
    c.rng_seed = 7;
    const EsnNetwork net = build_network(c, 1);
    CHECK(std::abs(net.layers[0].values(0, 0)) == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("mask densities honor round(connectivity * entries)") {
    EsnConfig c;
    c.num_layers = 2;
    c.layer_sizes = {10, 10};
    c.layer_connectivities = {0.3, 0.7};
    c.inter_connectivities = {0.5};
    c.input_connectivity = 1.0;
    c.rng_seed = 3;
    const EsnNetwork net = build_network(c, 4);
    CHECK(net.inter[0].nonzeros() == 50);
    CHECK(net.layers[0].nonzeros() == 30);
    CHECK(net.layers[1].nonzeros() == 70);
    CHECK(net.input.nonzeros() == 40);

    // density invariant within 1/(rows*cols) of the configured rate
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        EsnNetwork n = build_network(small_config(seed), 3);
        for (std::size_t k = 0; k < n.layers.size(); ++k) {
            const double total = static_cast<double>(n.layers[k].mask.size());
            CHECK(std::abs(n.layers[k].density() - n.config.layer_connectivities[k]) <=
                  1.0 / total + 1e-12);
        }
    }
}

TEST_CASE("connectivity epsilon still yields at least one connection") {
    EsnConfig c;
    c.num_layers = 1;
    c.layer_sizes = {20};
    c.layer_connectivities = {1e-6};
    c.input_connectivity = 1e-6;
    c.rng_seed = 5;
    const EsnNetwork net = build_network(c, 2);
    CHECK(net.layers[0].nonzeros() == 1);
    CHECK(net.input.nonzeros() == 1);
}

TEST_CASE("same config and seed build bit-identical networks") {
    const EsnNetwork a = build_network(small_config(99), 3);
    const EsnNetwork b = build_network(small_config(99), 3);
    CHECK(networks_identical(a, b));
    const EsnNetwork c = build_network(small_config(100), 3);
    CHECK_FALSE(networks_identical(a, c));
}

TEST_CASE("weights vanish outside the masks and raw values stay in [-1, 1]") {
    const EsnNetwork net = build_network(small_config(11), 3);
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        const auto& layer = net.layers[k];
        for (Eigen::Index r = 0; r < layer.values.rows(); ++r)
            for (Eigen::Index col = 0; col < layer.values.cols(); ++col) {
                if (!layer.mask(r, col)) {
                    CHECK(layer.values(r, col) == 0.0);
                    CHECK(net.layers_raw[k](r, col) == 0.0);
                } else {
                    CHECK(std::abs(net.layers_raw[k](r, col)) <= 1.0);
                }
            }
    }
}

TEST_CASE("scaled layers hit the spectral radius target against the dense oracle") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const EsnNetwork net = build_network(small_config(seed), 3);
        for (const auto& layer : net.layers) {
            const double rho = oracles::dense_spectral_radius(layer.values);
            CHECK(rho == doctest::Approx(0.9).epsilon(1e-6));
        }
    }
}

TEST_CASE("nilpotent layer is left unscaled and flagged") {
    EsnConfig c;
    c.num_layers = 1;
    c.layer_sizes = {4};
    c.layer_connectivities = {0.5};
    c.input_connectivity = 1.0;
    c.rng_seed = 13;
    EsnNetwork net = build_network(c, 1);
    // force a strictly upper-triangular (nilpotent) raw matrix
    net.layers_raw[0].setZero();
    net.layers[0].mask.setConstant(false);
    net.layers_raw[0](0, 1) = 0.5;
    net.layers_raw[0](1, 2) = -0.25;
    net.layers[0].mask(0, 1) = true;
    net.layers[0].mask(1, 2) = true;
    detail::finalize_network(net);
    CHECK(net.layer_unscaled[0]);
    CHECK(net.layer_scales[0] == 1.0);
    CHECK(net.layers[0].values(0, 1) == 0.5);
}

TEST_CASE("scalar hand evaluation of the state update") {
    EsnConfig c;
    c.num_layers = 1;
    c.layer_sizes = {1};
    c.layer_connectivities = {1.0};
    c.input_connectivity = 1.0;
    c.rng_seed = 0;
    EsnNetwork net = build_network(c, 1);
    net.input.values(0, 0) = 0.5;
    net.input.refresh_mirror(detail::kSparseDensityThreshold);
    net.layers_raw[0](0, 0) = 0.0;
    net.layers[0].mask(0, 0) = true;
    detail::finalize_network(net);

    Eigen::MatrixXd u(1, 1);
    u(0, 0) = 1.0;
    const StateTrajectory traj = run_sequence(net, u);
    CHECK(traj.last_layer()(0, 0) == doctest::Approx(std::tanh(0.5)).epsilon(1e-12));
    CHECK(traj.last_layer()(0, 0) == doctest::Approx(0.46212).epsilon(1e-4));
}

TEST_CASE("zero input from zero state stays exactly zero") {
    const EsnNetwork net = build_network(small_config(21), 3);
    const Eigen::MatrixXd u = Eigen::MatrixXd::Zero(17, 3);
    const StateTrajectory traj = run_sequence(net, u);
    for (const auto& layer : traj.layers) CHECK(layer.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("states stay within the tanh range on wild inputs") {
    const EsnNetwork net = build_network(small_config(22), 3);
    Rng rng(5);
    std::uniform_real_distribution<double> uni(-50.0, 50.0);
    Eigen::MatrixXd u(25, 3);
    for (Eigen::Index i = 0; i < u.size(); ++i) u.data()[i] = uni(rng);
    const StateTrajectory traj = run_sequence(net, u);
    for (const auto& layer : traj.layers) {
        CHECK(layer.maxCoeff() <= 1.0);
        CHECK(layer.minCoeff() >= -1.0);
    }
}

TEST_CASE("input dimension mismatch is rejected") {
    const EsnNetwork net = build_network(small_config(23), 3);
    CHECK_THROWS_AS(run_sequence(net, Eigen::MatrixXd::Zero(5, 2)), ConfigError);
}

TEST_CASE("batched run equals per-pattern runs concatenated") {
    const EsnNetwork net = build_network(small_config(31), 2);
    Rng rng(77);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<Eigen::MatrixXd> patterns;
    for (int p = 0; p < 4; ++p) {
        Eigen::MatrixXd u(9, 2);
        for (Eigen::Index i = 0; i < u.size(); ++i) u.data()[i] = uni(rng);
        patterns.push_back(u);
    }
    const BatchStates batch = run_batch(net, patterns, true);
    for (int p = 0; p < 4; ++p) {
        const StateTrajectory solo = run_sequence(net, patterns[static_cast<std::size_t>(p)]);
        for (int n = 0; n < batch.seq_len; ++n)
            for (std::size_t k = 0; k < batch.all.size(); ++k) {
                const auto batch_col = batch.all[k].col(static_cast<Eigen::Index>(n) * 4 + p);
                const auto solo_row = solo.layers[k].row(n).transpose();
                CHECK((batch_col.array() == solo_row.array()).all());
            }
    }
}

TEST_CASE("ridge readout: exact interpolation on an identity basis") {
    EsnConfig c;
    c.num_layers = 1;
    c.layer_sizes = {5};
    c.layer_connectivities = {1.0};
    c.input_connectivity = 1.0;
    c.rng_seed = 2;
    EsnNetwork net = build_network(c, 1);
    const Eigen::MatrixXd states = Eigen::MatrixXd::Identity(5, 5);
    net = train_readout(std::move(net), states, states, 0.0);
    CHECK((net.w_out - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ridge readout: huge lambda shrinks the weights toward zero") {
    EsnConfig c;
    c.num_layers = 1;
    c.layer_sizes = {4};
    c.layer_connectivities = {1.0};
    c.input_connectivity = 1.0;
    c.rng_seed = 3;
    EsnNetwork net = build_network(c, 1);
    Rng rng(8);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Eigen::MatrixXd states(30, 4), targets(30, 2);
    for (Eigen::Index i = 0; i < states.size(); ++i) states.data()[i] = uni(rng);
    for (Eigen::Index i = 0; i < targets.size(); ++i) targets.data()[i] = uni(rng);
    net = train_readout(std::move(net), states, targets, 1e12);
    CHECK(net.w_out.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("ridge readout matches the SVD pseudo-inverse oracle") {
    EsnConfig c;
    c.num_layers = 1;
    c.layer_sizes = {5};
    c.layer_connectivities = {1.0};
    c.input_connectivity = 1.0;
    c.rng_seed = 4;
    Rng rng(123);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int rep = 0; rep < 5; ++rep) {
        Eigen::MatrixXd states(20, 5), targets(20, 3);
        for (Eigen::Index i = 0; i < states.size(); ++i) states.data()[i] = uni(rng);
        for (Eigen::Index i = 0; i < targets.size(); ++i) targets.data()[i] = uni(rng);
        EsnNetwork net = build_network(c, 1);
        net = train_readout(std::move(net), states, targets, 1e-6);
        const Eigen::MatrixXd expected = oracles::ridge_pinv(states, targets, 1e-6);
        CHECK((net.w_out - expected).norm() / expected.norm() < 1e-8);
    }
}

TEST_CASE("ridge readout: singular system with lambda 0 reports ill-conditioning") {
    EsnConfig c;
    c.num_layers = 1;
    c.layer_sizes = {3};
    c.layer_connectivities = {1.0};
    c.input_connectivity = 1.0;
    c.rng_seed = 5;
    EsnNetwork net = build_network(c, 1);
    Eigen::MatrixXd states = Eigen::MatrixXd::Ones(10, 3);  // rank 1
    Eigen::MatrixXd targets(10, 1);
    for (int i = 0; i < 10; ++i) targets(i, 0) = i;
    CHECK_THROWS_AS(train_readout(std::move(net), states, targets, 0.0), NumericalError);
}

TEST_CASE("ridge readout: count mismatch is a contract error") {
    EsnConfig c;
    c.num_layers = 1;
    c.layer_sizes = {3};
    c.layer_connectivities = {1.0};
    c.input_connectivity = 1.0;
    EsnNetwork net = build_network(c, 1);
    CHECK_THROWS_AS(train_readout(std::move(net), Eigen::MatrixXd::Zero(4, 3),
                                  Eigen::MatrixXd::Zero(5, 1), 1e-6),
                    ConfigError);
}

TEST_CASE("ridge consistency: the fit never loses to the zero readout") {
    Rng rng(31);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    EsnConfig c;
    c.num_layers = 1;
    c.layer_sizes = {6};
    c.layer_connectivities = {1.0};
    c.input_connectivity = 1.0;
    for (int rep = 0; rep < 8; ++rep) {
        Eigen::MatrixXd states(40, 6), targets(40, 2);
        for (Eigen::Index i = 0; i < states.size(); ++i) states.data()[i] = uni(rng);
        for (Eigen::Index i = 0; i < targets.size(); ++i) targets.data()[i] = uni(rng);
        c.rng_seed = static_cast<std::uint64_t>(rep);
        EsnNetwork net = build_network(c, 1);
        net = train_readout(std::move(net), states, targets, 1e-8);
        const double fit_residual = (states * net.w_out.transpose() - targets).squaredNorm();
        CHECK(fit_residual <= targets.squaredNorm() + 1e-9);
    }
}

TEST_CASE("readout examples") {
    EsnConfig c;
    c.num_layers = 1;
    c.layer_sizes = {2};
    c.layer_connectivities = {1.0};
    c.input_connectivity = 1.0;
    EsnNetwork net = build_network(c, 1);
    CHECK_THROWS_AS(readout(net, Eigen::Vector2d(1.0, 2.0)), ConfigError);  // untrained

    net.w_out = Eigen::MatrixXd::Zero(2, 2);
    CHECK(readout(net, Eigen::Vector2d(1.0, 2.0)).cwiseAbs().maxCoeff() == 0.0);

    net.w_out = Eigen::MatrixXd::Identity(2, 2);
    CHECK((readout(net, Eigen::Vector2d(0.3, -0.7)) - Eigen::Vector2d(0.3, -0.7)).norm() == 0.0);

    net.w_out.resize(2, 2);
    net.w_out << 1.0, 2.0, -0.5, 0.25;  // hand 2x2 case
    const Eigen::VectorXd y = readout(net, Eigen::Vector2d(3.0, -1.0));
    CHECK(y(0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(y(1) == doctest::Approx(-1.75).epsilon(1e-15));
}

TEST_CASE("rmse examples") {
    std::vector<Eigen::MatrixXd> a{Eigen::MatrixXd::Zero(2, 1)};
    std::vector<Eigen::MatrixXd> b{Eigen::MatrixXd::Ones(2, 1)};
    CHECK(rmse(a, a) == 0.0);
    CHECK(rmse(a, b) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(rmse(b, a) == rmse(a, b));

    Eigen::MatrixXd t(2, 1);
    t << 0.0, 2.0;
    std::vector<Eigen::MatrixXd> targets{t};
    std::vector<Eigen::MatrixXd> outputs{Eigen::MatrixXd::Zero(2, 1)};
    CHECK(rmse(targets, outputs) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    CHECK_THROWS_AS(rmse(std::vector<Eigen::MatrixXd>{}, std::vector<Eigen::MatrixXd>{}),
                    ConfigError);
    CHECK_THROWS_AS(rmse(targets, std::vector<Eigen::MatrixXd>{Eigen::MatrixXd::Zero(3, 1)}),
                    ConfigError);
}

TEST_CASE("spectral radius: diagonal, zero and error cases") {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 0.3;
    d(1, 1) = -0.9;
    CHECK(spectral_radius(d) == doctest::Approx(0.9).epsilon(1e-10));
    CHECK(spectral_radius(Eigen::MatrixXd::Zero(5, 5)) == 0.0);
    CHECK_THROWS_AS(spectral_radius(Eigen::MatrixXd::Zero(2, 3)), ConfigError);
}

TEST_CASE("spectral radius matches the dense eigen oracle on random matrices") {
    Rng rng(2024);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 2 + static_cast<int>(rng() % 40);
        Eigen::MatrixXd m(n, n);
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uni(rng);
        const double expected = oracles::dense_spectral_radius(m);
        CHECK(spectral_radius(m) == doctest::Approx(expected).epsilon(1e-6));
    }
    // larger than the Krylov block, exercising restarts
    for (int rep = 0; rep < 3; ++rep) {
        Eigen::MatrixXd m(150, 150);
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uni(rng);
        const double expected = oracles::dense_spectral_radius(m);
        CHECK(spectral_radius(m) == doctest::Approx(expected).epsilon(1e-6));
    }
}

TEST_CASE("echo-state contraction probe: trajectories forget their start") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        EsnConfig c;
        c.num_layers = 1;
        c.layer_sizes = {30};
        c.layer_connectivities = {0.3};
        c.input_connectivity = 1.0;
        c.spectral_radius_target = 0.9;
        c.rng_seed = seed;
        const EsnNetwork net = build_network(c, 1);

        Rng rng(seed + 1000);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        Eigen::MatrixXd u(100, 1);
        for (int i = 0; i < 100; ++i) u(i, 0) = uni(rng);

        // manual rollouts from two different initial states on the same input
        Eigen::VectorXd xa = Eigen::VectorXd::Zero(30);
        Eigen::VectorXd xb(30);
        for (int i = 0; i < 30; ++i) xb[i] = uni(rng);
        double d1 = 0.0, d100 = 0.0;
        for (int n = 0; n < 100; ++n) {
            xa = (net.input.values * u.row(n).transpose() + net.layers[0].values * xa)
                     .array()
                     .tanh();
            xb = (net.input.values * u.row(n).transpose() + net.layers[0].values * xb)
                     .array()
                     .tanh();
            const double dist = (xa - xb).cwiseAbs().maxCoeff();
            if (n == 0) d1 = dist;
            if (n == 99) d100 = dist;
        }
        CHECK(d100 < d1);
    }
}

}  // TEST_SUITE
