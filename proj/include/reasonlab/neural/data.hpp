#pragma once

// Seeded data distribution for the neural instantiation: x = M z + sigma*eps
// with z standard normal of the mixing rank. Calibration and holdout draws
// come from disjoint seed streams.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "reasonlab/rng.hpp"

namespace reasonlab::neural {

struct DataDistribution {
    Eigen::MatrixXd mixing; // n x r
    double noise_sigma = 0.0;
    double calibration_fraction = 0.5;

    int dim() const { return static_cast<int>(mixing.rows()); }
    int rank() const { return static_cast<int>(mixing.cols()); }

    std::vector<Eigen::VectorXd> sample(std::uint64_t seed, int count) const {
        Rng rng(seed);
        std::vector<Eigen::VectorXd> out;
        out.reserve(count);
        for (int i = 0; i < count; ++i) {
            Eigen::VectorXd z(rank());
            for (int j = 0; j < rank(); ++j) z[j] = rng.normal();
            Eigen::VectorXd x = mixing * z;
            if (noise_sigma > 0)
                for (int j = 0; j < dim(); ++j) x[j] += noise_sigma * rng.normal();
            out.push_back(std::move(x));
        }
        return out;
    }

    std::vector<Eigen::VectorXd> calibration_samples(std::uint64_t seed, int count) const {
        return sample(derive_seed(seed, 0xCA11B), count);
    }

    std::vector<Eigen::VectorXd> holdout_samples(std::uint64_t seed, int count) const {
        return sample(derive_seed(seed, 0x801D0), count);
    }
};

// Identity mixing of the given rank embedded in n dimensions, unit variance
// per active coordinate.
inline DataDistribution rank_r_gaussian(int n, int r, double noise_sigma = 0.0) {
    DataDistribution data;
    data.mixing = Eigen::MatrixXd::Identity(n, r);
    data.noise_sigma = noise_sigma;
    return data;
}

// Full-rank isotropic unit-variance data.
inline DataDistribution isotropic_gaussian(int n) { return rank_r_gaussian(n, n); }

} // namespace reasonlab::neural
