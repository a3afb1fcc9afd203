#pragma once

// The neural reasoning system: encoding as inference, decoding as generation,
// weight-norm principles, and a gradient adapter hook. The live bundle shares
// one mutable model (stateful, single writer during training); snapshot()
// freezes the weights into an independent stateless system for diagnostics.

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "reasonlab/core.hpp"
#include "reasonlab/io/block_format.hpp"
#include "reasonlab/neural/autoencoder.hpp"
#include "reasonlab/neural/data.hpp"

namespace reasonlab::neural {

struct NeuralSystemConfig {
    int input_dim = 8;
    int code_dim = 4;
    int data_rank = 4;
    double noise_sigma = 0.0;
    double step = 0.05;
    double norm_bound = 10.0;
    double init_scale = 0.01;
    std::uint64_t init_seed = kDefaultSeed;
    double calibration_fraction = 0.5;
    bool zero_encoder = false; // constant-f deadlock configuration
};

using NeuralSystem = ReasoningSystem<VectorXd, VectorXd>;

struct NeuralBundle {
    NeuralSystem system;
    std::shared_ptr<LinearAutoencoder> model;
    DataDistribution data;
};

namespace detail {

inline NeuralSystem wrap_model(std::shared_ptr<LinearAutoencoder> model,
                               const DataDistribution& data, bool stateful) {
    NeuralSystem system;
    system.id = "neural";
    system.stateful = stateful;

    const int n = model->input_dim();
    system.phenomena.id = "neural.inputs";
    system.phenomena.admissible = [n](const VectorXd& x) {
        return x.size() == n && x.allFinite();
    };
    system.phenomena.distance = [](const VectorXd& a, const VectorXd& b) {
        return (a - b).norm();
    };
    system.phenomena.sample = [data](std::uint64_t seed, int count) {
        return data.sample(seed, count);
    };
    system.phenomena.perturb = [](const VectorXd& x, double radius, Rng& rng) {
        VectorXd direction(x.size());
        for (int j = 0; j < x.size(); ++j) direction[j] = rng.normal();
        if (direction.norm() == 0) return x;
        return VectorXd(x + (radius * rng.uniform()) * direction.normalized());
    };

    system.explanations.id = "neural.codes";
    system.explanations.distance = system.phenomena.distance;
    system.explanations.is_trivial = [](const VectorXd& z) {
        return z.norm() < 1e-12;
    };

    system.infer_map = [model](const VectorXd& x) -> Partial<VectorXd> {
        return encode(*model, x);
    };
    system.generate_map = [model](const VectorXd& z) -> Partial<VectorXd> {
        return decode(*model, z);
    };

    const double bound = model->norm_bound;
    system.principles = PrincipleSystem<VectorXd, VectorXd>({
        Principle<VectorXd, VectorXd>::on_explanation(
            "weight_norm_bound", Severity::Hard,
            [model, bound](const VectorXd&) {
                const bool ok = model->w_enc.norm() <= bound * (1 + 1e-12) &&
                                model->w_dec.norm() <= bound * (1 + 1e-12);
                return ok ? Verdict::Satisfied : Verdict::Violated;
            }),
        Principle<VectorXd, VectorXd>::on_explanation(
            "weight_norm_penalty", Severity::Soft,
            [model](const VectorXd&) {
                const double total =
                    model->w_enc.squaredNorm() + model->w_dec.squaredNorm();
                return total > 0 ? Verdict::Violated : Verdict::Satisfied;
            },
            1.0),
    });
    return system;
}

} // namespace detail

inline NeuralBundle make_neural_system(const NeuralSystemConfig& cfg) {
    auto model = std::make_shared<LinearAutoencoder>(random_autoencoder(
        cfg.input_dim, cfg.code_dim, cfg.init_seed, cfg.init_scale));
    model->step = cfg.step;
    model->norm_bound = cfg.norm_bound;
    if (cfg.zero_encoder) model->w_enc.setZero();
    model->validate();

    DataDistribution data = rank_r_gaussian(cfg.input_dim, cfg.data_rank,
                                            cfg.noise_sigma);
    data.calibration_fraction = cfg.calibration_fraction;

    NeuralBundle bundle{detail::wrap_model(model, data, true), model, data};
    bundle.system.adapter = std::make_shared<Adapter<VectorXd>>();
    bundle.system.adapter->update_round = [model](const std::vector<VectorXd>& batch,
                                                  double reg_weight) {
        MatrixXd columns(model->input_dim(), static_cast<int>(batch.size()));
        for (std::size_t i = 0; i < batch.size(); ++i)
            columns.col(static_cast<int>(i)) = batch[i];
        gradient_step(*model, columns, reg_weight);
    };
    return bundle;
}

// Frozen copy of the current weights: an independent stateless system that is
// safe to share across diagnostic workers.
inline NeuralSystem snapshot(const NeuralBundle& bundle) {
    auto frozen = std::make_shared<LinearAutoencoder>(*bundle.model);
    return detail::wrap_model(frozen, bundle.data, false);
}

// Weight snapshots share the QP problem file's block format.
inline std::string format_weights(const LinearAutoencoder& model) {
    std::ostringstream out;
    io::write_block(out, "W_enc", model.w_enc);
    io::write_block(out, "W_dec", model.w_dec);
    return out.str();
}

inline void load_weights(LinearAutoencoder& model, const std::string& text) {
    auto blocks = io::read_blocks(text);
    if (!blocks.count("W_enc") || !blocks.count("W_dec"))
        throw ConfigError("weight snapshot needs W_enc and W_dec blocks");
    model.w_enc = blocks.at("W_enc");
    model.w_dec = blocks.at("W_dec");
    model.validate();
}

} // namespace reasonlab::neural
