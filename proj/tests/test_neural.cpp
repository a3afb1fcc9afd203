#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "reasonlab/diagnostics.hpp"
#include "reasonlab/dynamics.hpp"
#include "reasonlab/neural/system.hpp"

using namespace reasonlab;
using namespace reasonlab::neural;

namespace {

// Central finite differences of the full training objective; the oracle the
// analytic gradients are judged against.
Gradients numeric_gradients(LinearAutoencoder model, const MatrixXd& batch,
                            double reg_weight, double h = 1e-5) {
    Gradients g;
    g.enc = MatrixXd::Zero(model.code_dim(), model.input_dim());
    g.dec = MatrixXd::Zero(model.input_dim(), model.code_dim());
    for (int r = 0; r < model.w_enc.rows(); ++r) {
        for (int c = 0; c < model.w_enc.cols(); ++c) {
            const double saved = model.w_enc(r, c);
            model.w_enc(r, c) = saved + h;
            const double up = training_objective(model, batch, reg_weight);
            model.w_enc(r, c) = saved - h;
            const double down = training_objective(model, batch, reg_weight);
            model.w_enc(r, c) = saved;
            g.enc(r, c) = (up - down) / (2 * h);
        }
    }
    for (int r = 0; r < model.w_dec.rows(); ++r) {
        for (int c = 0; c < model.w_dec.cols(); ++c) {
            const double saved = model.w_dec(r, c);
            model.w_dec(r, c) = saved + h;
            const double up = training_objective(model, batch, reg_weight);
            model.w_dec(r, c) = saved - h;
            const double down = training_objective(model, batch, reg_weight);
            model.w_dec(r, c) = saved;
            g.dec(r, c) = (up - down) / (2 * h);
        }
    }
    return g;
}

double max_relative_error(const MatrixXd& analytic, const MatrixXd& numeric) {
    double worst = 0.0;
    for (int r = 0; r < analytic.rows(); ++r)
        for (int c = 0; c < analytic.cols(); ++c) {
            const double scale =
                std::max({std::abs(analytic(r, c)), std::abs(numeric(r, c)), 1e-8});
            worst = std::max(worst, std::abs(analytic(r, c) - numeric(r, c)) / scale);
        }
    return worst;
}

MatrixXd batch_from(const std::vector<VectorXd>& samples) {
    MatrixXd out(samples[0].size(), static_cast<int>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i)
        out.col(static_cast<int>(i)) = samples[i];
    return out;
}

} // namespace

TEST_CASE("identity encoder leaves inputs unchanged") {
    LinearAutoencoder model;
    model.w_enc = MatrixXd::Identity(3, 3);
    model.w_dec = MatrixXd::Identity(3, 3);
    VectorXd x(3);
    x << 1.0, -2.0, 0.5;
    REQUIRE((encode(model, x) - x).norm() == 0.0);
    REQUIRE((decode(model, x) - x).norm() == 0.0);
}

TEST_CASE("zero encoder produces the zero code for every input") {
    LinearAutoencoder model;
    model.w_enc = MatrixXd::Zero(2, 4);
    model.w_dec = MatrixXd::Zero(4, 2);
    Rng rng(kDefaultSeed);
    for (int i = 0; i < 10; ++i) {
        VectorXd x(4);
        for (int j = 0; j < 4; ++j) x[j] = rng.normal();
        REQUIRE(encode(model, x).norm() == 0.0);
    }
}

TEST_CASE("orthonormal encoder preserves norms and inverts through its transpose") {
    const double angle = 0.7;
    LinearAutoencoder model;
    model.w_enc = MatrixXd(2, 2);
    model.w_enc << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    model.w_dec = model.w_enc.transpose();

    Rng rng(kDefaultSeed);
    for (int i = 0; i < 20; ++i) {
        VectorXd x(2);
        x << rng.normal(), rng.normal();
        const VectorXd z = encode(model, x);
        REQUIRE(z.norm() == Catch::Approx(x.norm()).margin(1e-12));
        REQUIRE((decode(model, z) - x).norm() <= 1e-12);
    }
}

TEST_CASE("dimension mismatches are rejected") {
    LinearAutoencoder model;
    model.w_enc = MatrixXd::Zero(2, 4);
    model.w_dec = MatrixXd::Zero(4, 2);
    REQUIRE_THROWS_AS(encode(model, VectorXd::Zero(3)), DimensionMismatch);
    REQUIRE_THROWS_AS(decode(model, VectorXd::Zero(3)), DimensionMismatch);
    REQUIRE_THROWS_AS(gradient_step(model, MatrixXd::Zero(3, 2)), DimensionMismatch);
}

TEST_CASE("model validation enforces the dimension and finiteness invariants") {
    LinearAutoencoder model;
    model.w_enc = MatrixXd::Zero(4, 2); // k > n
    model.w_dec = MatrixXd::Zero(2, 4);
    REQUIRE_THROWS_AS(model.validate(), ConfigError);
}

TEST_CASE("analytic gradients agree with central finite differences") {
    Rng seeds(kDefaultSeed);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 3 + static_cast<int>(seeds.below(3));
        const int k = 1 + static_cast<int>(seeds.below(n));
        auto model = random_autoencoder(n, k, seeds.next(), 0.5);
        const auto data = isotropic_gaussian(n);
        const MatrixXd batch = batch_from(data.sample(seeds.next(), 6));
        const double reg_weight = trial % 2 == 0 ? 0.0 : 0.1;

        const Gradients analytic = loss_gradients(model, batch, reg_weight);
        const Gradients numeric = numeric_gradients(model, batch, reg_weight);
        REQUIRE(max_relative_error(analytic.enc, numeric.enc) <= 1e-4);
        REQUIRE(max_relative_error(analytic.dec, numeric.dec) <= 1e-4);
    }
}

TEST_CASE("a stationary point stays fixed under gradient steps") {
    LinearAutoencoder model;
    model.w_enc = MatrixXd::Identity(3, 3);
    model.w_dec = MatrixXd::Identity(3, 3);
    const MatrixXd batch = MatrixXd::Random(3, 5);
    const MatrixXd enc_before = model.w_enc;
    gradient_step(model, batch, 0.0); // perfect reconstruction: zero gradient
    REQUIRE((model.w_enc - enc_before).norm() == 0.0);
}

TEST_CASE("one step from zero weights decreases the loss on nonzero data") {
    auto model = random_autoencoder(4, 2, kDefaultSeed, 0.1);
    const auto data = isotropic_gaussian(4);
    const MatrixXd batch = batch_from(data.sample(kDefaultSeed, 8));
    const double before = reconstruction_loss(model, batch);
    gradient_step(model, batch);
    REQUIRE(reconstruction_loss(model, batch) < before);
}

TEST_CASE("weight norms are clipped to the bound after every step") {
    auto model = random_autoencoder(4, 2, kDefaultSeed, 1.0);
    model.norm_bound = 0.5;
    model.step = 0.2;
    const auto data = isotropic_gaussian(4);
    const MatrixXd batch = batch_from(data.sample(kDefaultSeed, 8));
    for (int round = 0; round < 20; ++round) {
        gradient_step(model, batch);
        REQUIRE(model.w_enc.norm() <= 0.5 + 1e-12);
        REQUIRE(model.w_dec.norm() <= 0.5 + 1e-12);
    }
}

TEST_CASE("non-finite updates are rejected without corrupting the model") {
    auto model = random_autoencoder(4, 2, kDefaultSeed, 1.0);
    model.step = 1e300;
    model.norm_bound = 1e30;
    const auto data = isotropic_gaussian(4);
    const MatrixXd batch = batch_from(data.sample(kDefaultSeed, 4));
    const MatrixXd enc_before = model.w_enc;
    bool threw = false;
    for (int round = 0; round < 50 && !threw; ++round) {
        try {
            gradient_step(model, batch);
        } catch (const NonFiniteUpdate&) {
            threw = true;
        }
    }
    REQUIRE(threw);
    REQUIRE(model.w_enc.allFinite());
    REQUIRE(model.w_dec.allFinite());
}

TEST_CASE("training is deterministic given the seed") {
    for (int run = 0; run < 2; ++run) {
        static MatrixXd first_enc;
        NeuralSystemConfig cfg;
        cfg.input_dim = 4;
        cfg.code_dim = 2;
        cfg.data_rank = 2;
        auto bundle = make_neural_system(cfg);
        AdaptationPolicy<VectorXd> policy;
        policy.max_rounds = 40;
        adapt(bundle.system, policy, kDefaultSeed, 12);
        if (run == 0)
            first_enc = bundle.model->w_enc;
        else
            REQUIRE((bundle.model->w_enc - first_enc).norm() == 0.0);
    }
}

TEST_CASE("trained 2-1-2 autoencoder reconstructs rank-1 data to 1e-3") {
    NeuralSystemConfig cfg;
    cfg.input_dim = 2;
    cfg.code_dim = 1;
    cfg.data_rank = 1;
    cfg.step = 0.1;
    cfg.init_scale = 0.1;
    auto bundle = make_neural_system(cfg);

    AdaptationPolicy<VectorXd> policy;
    policy.max_rounds = 3000;
    auto summary = adapt(bundle.system, policy, kDefaultSeed, 16);
    REQUIRE(summary.after_mean_delta < summary.before_mean_delta);
    REQUIRE(summary.after_mean_delta < 1e-3);

    // Frozen snapshot keeps the trained behavior and is stateless.
    auto frozen = snapshot(bundle);
    REQUIRE_FALSE(frozen.stateful);
    for (const auto& x : bundle.system.adapter->calibration) {
        auto rec = roundtrip_discrepancy(frozen, x);
        REQUIRE(*rec.delta < 1e-3);
    }
}

TEST_CASE("mean delta strictly decreases over gradient rounds on rank-1 data") {
    NeuralSystemConfig cfg;
    cfg.input_dim = 4;
    cfg.code_dim = 2;
    cfg.data_rank = 1;
    cfg.step = 0.05;
    auto bundle = make_neural_system(cfg);

    AdaptationPolicy<VectorXd> policy;
    policy.max_rounds = 50;
    auto summary = adapt(bundle.system, policy, kDefaultSeed, 16);
    REQUIRE(summary.round_mean_deltas.size() == 50);
    for (std::size_t i = 1; i < summary.round_mean_deltas.size(); ++i)
        REQUIRE(summary.round_mean_deltas[i] < summary.round_mean_deltas[i - 1]);
}

TEST_CASE("converged autoencoder approaches the fixed-point idealization") {
    NeuralSystemConfig cfg;
    cfg.input_dim = 3;
    cfg.code_dim = 2;
    cfg.data_rank = 2;
    cfg.step = 0.1;
    cfg.init_scale = 0.1;
    auto bundle = make_neural_system(cfg);
    AdaptationPolicy<VectorXd> policy;
    policy.max_rounds = 4000;
    adapt(bundle.system, policy, kDefaultSeed, 24);

    ToleranceConfig tol;
    tol.fixedpoint_tol = 1e-3;
    auto report = check_fixed_point(snapshot(bundle), kDefaultSeed, 20, tol);
    REQUIRE(report.pass);
    REQUIRE(*report.worst_forward_residual < 1e-3);
    REQUIRE(*report.worst_backward_residual < 1e-3);
}

TEST_CASE("overfitting on three samples triggers the documented label") {
    NeuralSystemConfig cfg;
    cfg.input_dim = 8;
    cfg.code_dim = 8; // full-capacity model
    cfg.data_rank = 8;
    cfg.step = 0.1;
    auto bundle = make_neural_system(cfg);

    AdaptationPolicy<VectorXd> policy;
    policy.local_scope = bundle.data.calibration_samples(kDefaultSeed, 3);
    policy.max_rounds = 4000;
    auto summary = adapt(bundle.system, policy, kDefaultSeed, 3);
    REQUIRE(summary.after_mean_delta < 0.1); // memorized the calibration set

    FailureClassifierConfig classifier;
    classifier.overfit_gap_threshold = 0.5;
    classifier.underfit_floor = 0.5;
    auto diagnoses = classify_failures(bundle.system, kDefaultSeed, 30, classifier);
    for (const auto& d : diagnoses) {
        REQUIRE(d.has(FailureKind::Overfitting));
        REQUIRE_FALSE(d.has(FailureKind::Underfitting));
    }
}

TEST_CASE("a near-zero norm bound forces underfitting") {
    NeuralSystemConfig cfg;
    cfg.input_dim = 8;
    cfg.code_dim = 4;
    cfg.data_rank = 8;
    cfg.norm_bound = 0.01; // k = 0 equivalent: weights are clipped to nothing
    auto bundle = make_neural_system(cfg);

    AdaptationPolicy<VectorXd> policy;
    policy.max_rounds = 200;
    adapt(bundle.system, policy, kDefaultSeed, 16);

    FailureClassifierConfig classifier;
    classifier.overfit_gap_threshold = 0.5;
    classifier.underfit_floor = 0.5;
    auto diagnoses = classify_failures(bundle.system, kDefaultSeed, 30, classifier);
    for (const auto& d : diagnoses) {
        REQUIRE(d.has(FailureKind::Underfitting));
        REQUIRE_FALSE(d.has(FailureKind::Overfitting));
    }
}

TEST_CASE("the zero encoder is a deadlocked system") {
    NeuralSystemConfig cfg;
    cfg.input_dim = 4;
    cfg.code_dim = 2;
    cfg.zero_encoder = true;
    auto bundle = make_neural_system(cfg);

    FailureClassifierConfig classifier;
    classifier.deadlock_constancy_fraction = 1.0;
    auto diagnoses = classify_failures(bundle.system, kDefaultSeed, 20, classifier);
    REQUIRE(diagnoses.size() == 20);
    for (const auto& d : diagnoses) REQUIRE(d.has(FailureKind::Deadlock));
}

TEST_CASE("norm principles hold after training and penalty reflects weights") {
    NeuralSystemConfig cfg;
    cfg.input_dim = 4;
    cfg.code_dim = 2;
    auto bundle = make_neural_system(cfg);
    AdaptationPolicy<VectorXd> policy;
    policy.max_rounds = 100;
    adapt(bundle.system, policy, kDefaultSeed, 8);

    auto x = bundle.data.sample(kDefaultSeed, 1)[0];
    auto e = infer(bundle.system, x);
    auto report = satisfies(bundle.system.principles, *e, &x);
    REQUIRE(report.overall_sound); // hard bound enforced by clipping
    REQUIRE(report.soft_penalty_total == 1.0); // nonzero weights incur the penalty
}

TEST_CASE("regularized training shrinks weight norms relative to unregularized") {
    NeuralSystemConfig cfg;
    cfg.input_dim = 4;
    cfg.code_dim = 2;
    cfg.data_rank = 2;

    auto plain = make_neural_system(cfg);
    auto regularized = make_neural_system(cfg);
    AdaptationPolicy<VectorXd> policy;
    policy.max_rounds = 500;
    adapt(plain.system, policy, kDefaultSeed, 12);
    policy.regularization_weight = 0.05;
    adapt(regularized.system, policy, kDefaultSeed, 12);

    REQUIRE(regularized.model->w_enc.norm() < plain.model->w_enc.norm());
}

TEST_CASE("weight snapshots round-trip through the block format") {
    auto model = random_autoencoder(4, 2, kDefaultSeed, 1.0);
    const std::string text = format_weights(model);

    auto restored = random_autoencoder(4, 2, 1, 1.0);
    load_weights(restored, text);
    REQUIRE((restored.w_enc - model.w_enc).norm() == 0.0);
    REQUIRE((restored.w_dec - model.w_dec).norm() == 0.0);

    REQUIRE_THROWS_AS(load_weights(restored, "W_enc 2 4\n0 0 0 0\n0 0 0 0\n"),
                      ConfigError);
}

TEST_CASE("divergent training classifies as collapsing via the run log") {
    NeuralSystemConfig cfg;
    cfg.input_dim = 4;
    cfg.code_dim = 2;
    cfg.step = 10.0; // far beyond stability
    cfg.norm_bound = 1e30;
    cfg.init_scale = 1.0;
    auto bundle = make_neural_system(cfg);

    RunLog log;
    AdaptationPolicy<VectorXd> policy;
    policy.max_rounds = 200;
    for (int epoch = 0; epoch < 2; ++epoch) {
        EpochStats stats;
        stats.principle_version = bundle.system.principles.version();
        try {
            auto summary = adapt(bundle.system, policy, kDefaultSeed, 8);
            stats.mean_delta = summary.after_mean_delta;
        } catch (const NonFiniteUpdate&) {
            stats.non_finite_update = true;
        }
        log.epochs.push_back(stats);
    }
    REQUIRE(classify_response_mode(log) == ResponseMode::Collapsing);
}
