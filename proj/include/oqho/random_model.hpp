#pragma once

#include <cstdint>
#include <random>

#include "oqho/model.hpp"

namespace oqho {

Mat random_gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols);

// (X + X^T) / sqrt(2) with standard normal X.
Mat random_symmetric(std::mt19937_64& rng, Eigen::Index n);

// X X^T / n, positive definite with probability one.
Mat random_psd(std::mt19937_64& rng, Eigen::Index n);

// Random nonsingular antisymmetric matrix (X - X^T) / 2.
Mat random_antisymmetric(std::mt19937_64& rng, Eigen::Index n);

// Canonical 1/2 J kron I_{n/2}.
Mat canonical_theta(Eigen::Index n);

// Samples R symmetric and M with unit-variance entries and
// rejects until the abscissa of A is below -min_decay (throws NoConvergence
// after max_tries). A negative min_decay accepts everything.
OqhoModel random_model(std::mt19937_64& rng, Eigen::Index n, Eigen::Index m, double min_decay = 0.0,
                       bool canonical = true, int max_tries = 200000);

}  // namespace oqho
