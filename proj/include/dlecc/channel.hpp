#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dlecc/rng.hpp"

namespace dlecc {

/// sigma = 10^(-snr_db / 20): noise standard deviation per real symbol for
/// unit average signal power.
double snr_db_to_sigma(double snr_db);

class AwgnChannel {
 public:
  explicit AwgnChannel(double sigma);

  double sigma() const noexcept { return sigma_; }

  /// out[i] = symbols[i] + sigma * g_i, g_i drawn from rng in index order.
  std::vector<double> transmit(std::span<const double> symbols, Rng& rng) const;

 private:
  double sigma_;
};

/// Memoryless channel given by P[i][j] = P(Y = i | X = j); rows are outputs.
class DiscreteChannel {
 public:
  /// Columns must be non-negative and sum to 1 within column_tolerance.
  explicit DiscreteChannel(std::vector<std::vector<double>> transition,
                           double column_tolerance = 1e-12);

  std::size_t num_inputs() const noexcept { return inputs_; }
  std::size_t num_outputs() const noexcept { return transition_.size(); }
  double p(std::size_t output, std::size_t input) const noexcept { return transition_[output][input]; }
  const std::vector<std::vector<double>>& transition() const noexcept { return transition_; }
  double column_tolerance() const noexcept { return tolerance_; }

  /// Samples an output index from column `input` (renormalized by its sum).
  std::size_t transmit(std::size_t input, Rng& rng) const;

  /// The 4x4 channel on which BER and BCE encoder minimizers disagree, with
  /// entries exactly as published; its last column sums to 0.999, so it is
  /// accepted with column tolerance 1e-3.
  static DiscreteChannel counterexample();

 private:
  std::vector<std::vector<double>> transition_;
  std::size_t inputs_ = 0;
  double tolerance_;
};

}  // namespace dlecc
