#pragma once

// Seeded generators for test and experiment inputs.

#include <cstdint>
#include <random>

#include "gbw/spd.hpp"

namespace gbw {

using Rng = std::mt19937_64;

Matrix gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols);
Vector gaussian_vector(Rng& rng, Eigen::Index n);

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, sign-fixed).
Matrix random_orthogonal(Rng& rng, Eigen::Index n);

/// Q diag(λ) Qᵀ with λ log-uniform in [lo, hi] and Haar Q.
SpdMatrix random_spd(Rng& rng, Eigen::Index n, double lo = 0.5, double hi = 2.0);

/// Symmetric matrix with N(0, scale²) entries on and above the diagonal.
SymMatrix random_sym(Rng& rng, Eigen::Index n, double scale = 1.0);

/// Random skew-symmetric matrix.
Matrix random_skew(Rng& rng, Eigen::Index n, double scale = 1.0);

double uniform(Rng& rng, double lo, double hi);

}  // namespace gbw
