#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dlecc/channel.hpp"
#include "dlecc/codec.hpp"
#include "dlecc/rng.hpp"

namespace dlecc {

inline constexpr double kProbClamp = 1e-12;

/// Binary entropy in bits, with 0 lg 0 = 0.
double binary_entropy(double p);

/// Mean binary cross-entropy in bits; posteriors clamped to [1e-12, 1 - 1e-12].
double bce(std::span<const std::uint8_t> truth, std::span<const double> posteriors);
/// Fraction of hard decisions that disagree with truth; a posterior of
/// exactly 1/2 decides 0.
double ber(std::span<const std::uint8_t> truth, std::span<const double> posteriors);

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Accumulates per-block losses into the scalar and per-bit averages.
class LossAccumulator {
 public:
  explicit LossAccumulator(std::size_t k);

  void add(std::span<const std::uint8_t> truth, std::span<const double> posteriors);

  struct Report {
    double bce = 0.0;
    double ber = 0.0;
    std::vector<double> per_bit_bce;
    std::vector<double> per_bit_ber;
    std::size_t blocks_evaluated = 0;
    double std_error = 0.0;      // of the block-mean BCE
    double ber_std_error = 0.0;  // of the block-mean BER
  };
  Report report() const;

 private:
  std::size_t k_;
  std::size_t blocks_ = 0;
  std::vector<double> bit_bce_, bit_ber_;
  double sum_bce_ = 0.0, sum_bce2_ = 0.0, sum_ber_ = 0.0, sum_ber2_ = 0.0;
};

using LossReport = LossAccumulator::Report;

/// Mean and standard error of a sample.
Estimate mean_and_std_error(std::span<const double> samples);

/**
 * Monte Carlo estimate of (1/k) sum_i H(U_i | Y) for an encoder given by its
 * codebook over AWGN: draw u and noise, decode with the exact brute-force MAP
 * posterior, and average the cross-entropy against the truth. Sample s uses
 * the stream derive_seed(seed, {s}).
 */
Estimate conditional_entropy_estimate(const Codebook& codebook, const AwgnChannel& channel,
                                      std::size_t num_samples, std::uint64_t seed, unsigned threads = 1);

/// A one-bit encoder into the input alphabet of a discrete channel.
struct SmallEncoder {
  std::size_t symbol_of_zero = 0;
  std::size_t symbol_of_one = 1;

  friend bool operator==(const SmallEncoder&, const SmallEncoder&) = default;
};

struct BceBer {
  double bce;
  double ber;
};

/// Closed-form C(f) and B(f) for a one-bit encoder on a discrete channel,
/// evaluated directly from the two used columns of the transition matrix.
BceBer exact_discrete_bce_ber(const SmallEncoder& f, const DiscreteChannel& channel);

/// Monte Carlo counterpart of exact_discrete_bce_ber with the exact MAP
/// decoder; returns the BCE estimate.
Estimate discrete_bce_estimate(const SmallEncoder& f, const DiscreteChannel& channel,
                               std::size_t num_samples, std::uint64_t seed);

/// 2 ber - tol <= bce <= H2(ber) + tol.
bool check_two_sided_bound(double bce_i, double ber_i, double tol);

struct EncoderChannel {
  SmallEncoder encoder;
  DiscreteChannel channel;
};

/// Identity encoder on BSC(t): C = H2(B) = H2(t).
EncoderChannel tight_upper_channel(double t);
/// Injective encoder into a 3-output channel with C = 2B = 2t.
EncoderChannel tight_lower_channel(double t);

struct CounterexampleRow {
  SmallEncoder f;  // 0-based symbols
  double bce;
  double ber;
};

struct CounterexampleReport {
  std::vector<CounterexampleRow> rows;  // the 6 injective encoders, lexicographic
  std::vector<std::size_t> ber_argmin;  // row indices
  std::vector<std::size_t> bce_argmin;
  bool disjoint;
};

CounterexampleReport counterexample_sweep();

struct TightnessRow {
  double t;
  double upper_ber, upper_bce, upper_gap;  // gap = |bce - H2(ber)|
  double lower_ber, lower_bce, lower_gap;  // gap = |bce - 2 ber|
};

/// Both tight families on `points` evenly spaced t in [0, 1/2].
std::vector<TightnessRow> tightness_sweep(std::size_t points);

}  // namespace dlecc
