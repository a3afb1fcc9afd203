#pragma once

// Linear autoencoder with hand-rolled analytic gradients. The loss is mean
// squared reconstruction error over a batch plus an optional weight-norm
// penalty; updates are plain gradient steps followed by Frobenius-norm
// clipping, so the norm bound holds by construction after every round.

#include <Eigen/Dense>
#include <cmath>

#include "reasonlab/errors.hpp"
#include "reasonlab/rng.hpp"

namespace reasonlab::neural {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct LinearAutoencoder {
    MatrixXd w_enc; // k x n
    MatrixXd w_dec; // n x k
    double step = 0.05;
    double norm_bound = 10.0;

    int input_dim() const { return static_cast<int>(w_enc.cols()); }
    int code_dim() const { return static_cast<int>(w_enc.rows()); }

    void validate() const {
        const int n = input_dim();
        const int k = code_dim();
        if (k < 1 || n < 1 || k > n || n > 32)
            throw ConfigError("autoencoder dims must satisfy 1 <= k <= n <= 32");
        if (w_dec.rows() != n || w_dec.cols() != k)
            throw DimensionMismatch("decoder must be n x k");
        if (!w_enc.allFinite() || !w_dec.allFinite())
            throw ConfigError("weights must be finite");
        if (step <= 0) throw ConfigError("step must be positive");
        if (norm_bound <= 0) throw ConfigError("norm_bound must be positive");
    }
};

inline LinearAutoencoder random_autoencoder(int input_dim, int code_dim,
                                            std::uint64_t seed,
                                            double init_scale = 0.01) {
    Rng rng(seed);
    LinearAutoencoder model;
    model.w_enc = MatrixXd(code_dim, input_dim);
    model.w_dec = MatrixXd(input_dim, code_dim);
    for (int r = 0; r < code_dim; ++r)
        for (int c = 0; c < input_dim; ++c) model.w_enc(r, c) = init_scale * rng.normal();
    for (int r = 0; r < input_dim; ++r)
        for (int c = 0; c < code_dim; ++c) model.w_dec(r, c) = init_scale * rng.normal();
    return model;
}

inline VectorXd encode(const LinearAutoencoder& model, const VectorXd& x) {
    if (x.size() != model.input_dim())
        throw DimensionMismatch("encode input must have n entries");
    return model.w_enc * x;
}

inline VectorXd decode(const LinearAutoencoder& model, const VectorXd& z) {
    if (z.size() != model.code_dim())
        throw DimensionMismatch("decode input must have k entries");
    return model.w_dec * z;
}

// Mean squared reconstruction error over the batch (columns of X).
inline double reconstruction_loss(const LinearAutoencoder& model, const MatrixXd& batch) {
    const MatrixXd residual = model.w_dec * (model.w_enc * batch) - batch;
    return residual.squaredNorm() / static_cast<double>(batch.cols());
}

// Loss plus the soft weight-norm penalty term scaled by reg_weight.
inline double training_objective(const LinearAutoencoder& model, const MatrixXd& batch,
                                 double reg_weight) {
    return reconstruction_loss(model, batch) +
           reg_weight * (model.w_enc.squaredNorm() + model.w_dec.squaredNorm());
}

struct Gradients {
    MatrixXd enc;
    MatrixXd dec;
};

inline Gradients loss_gradients(const LinearAutoencoder& model, const MatrixXd& batch,
                                double reg_weight) {
    const double m = static_cast<double>(batch.cols());
    const MatrixXd codes = model.w_enc * batch;            // k x m
    const MatrixXd residual = model.w_dec * codes - batch; // n x m
    Gradients g;
    g.dec = (2.0 / m) * residual * codes.transpose() + 2.0 * reg_weight * model.w_dec;
    g.enc = (2.0 / m) * model.w_dec.transpose() * residual * batch.transpose() +
            2.0 * reg_weight * model.w_enc;
    return g;
}

// One gradient round. A non-finite update is discarded before throwing, so
// the model never leaves its last good state.
inline void gradient_step(LinearAutoencoder& model, const MatrixXd& batch,
                          double reg_weight = 0.0) {
    if (batch.cols() < 1) throw ConfigError("batch must be non-empty");
    if (batch.rows() != model.input_dim())
        throw DimensionMismatch("batch rows must equal the input dimension");

    const Gradients g = loss_gradients(model, batch, reg_weight);
    MatrixXd next_enc = model.w_enc - model.step * g.enc;
    MatrixXd next_dec = model.w_dec - model.step * g.dec;
    if (!next_enc.allFinite() || !next_dec.allFinite())
        throw NonFiniteUpdate("gradient update produced non-finite weights");

    // Frobenius-norm clipping keeps the Hard norm principle satisfied.
    // stableNorm: the plain squared norm can overflow for large finite weights.
    if (const double norm = next_enc.stableNorm(); norm > model.norm_bound)
        next_enc *= model.norm_bound / norm;
    if (const double norm = next_dec.stableNorm(); norm > model.norm_bound)
        next_dec *= model.norm_bound / norm;

    model.w_enc = std::move(next_enc);
    model.w_dec = std::move(next_dec);
}

} // namespace reasonlab::neural
