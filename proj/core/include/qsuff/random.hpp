#pragma once

// Seeded generators for random test objects. Every function takes the
// generator explicitly; there is no global state.

#include <cstdint>
#include <random>
#include <vector>

#include "qsuff/matrix.hpp"

namespace qsuff {

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

class Rng {
 public:
  explicit Rng(std::uint64_t seed = kDefaultSeed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_(engine_); }
  Index index(Index n) { return static_cast<Index>(engine_() % static_cast<std::uint64_t>(n)); }
  Complex complex_normal() { return {normal(), normal()}; }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// rows x cols matrix with i.i.d. standard complex Gaussian entries.
Matrix random_ginibre(Index rows, Index cols, Rng& rng);

Matrix random_hermitian(Index d, Rng& rng);

/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
Matrix random_unitary(Index d, Rng& rng);

/// Density matrix G G* / Tr of a d x rank Ginibre matrix; faithful when rank = d.
Matrix random_density(Index d, Rng& rng, Index rank = -1);

/// Probability vector drawn uniformly from the simplex.
RealVector random_probability(Index n, Rng& rng);

/// Kraus operators (out x in) of a random trace-preserving map, Σ V*V = I.
std::vector<Matrix> random_trace_preserving_kraus(Index in_dim, Index out_dim, Index count, Rng& rng);

}  // namespace qsuff
