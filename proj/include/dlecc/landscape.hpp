#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "dlecc/boolfn.hpp"
#include "dlecc/codec.hpp"
#include "dlecc/metrics.hpp"

namespace dlecc {

inline constexpr int kThetaArity = 5;

/// Fourier parameters of the three constituent functions on 5 variables.
struct ThetaTriple {
  std::array<FourierSpectrum, 3> spectra;

  friend bool operator==(const ThetaTriple&, const ThetaTriple&) = default;
};

/// Each spectrum has a single unit coefficient at its mask.
ThetaTriple parity_triple(const std::array<SubsetMask, 3>& masks);

/// x1x2 XOR x3x4 placed on variables {1,2,3,4}, {2,3,4,5} and {1,2,4,5}.
ThetaTriple bent_triple();
/// x_a x_b XOR x_c x_d per stream, variables 1-based {a, b, c, d}.
ThetaTriple bent_triple(const std::array<std::array<int, 4>, 3>& variables);
/// The partner endpoint for bent probes: x_a x_c XOR x_b x_d on the same
/// subsets as bent_triple().
ThetaTriple bent_partner_triple();

/// Scales each spectrum to unit 2-norm; nullopt if some spectrum is zero.
std::optional<ThetaTriple> normalize(const ThetaTriple& theta);

/// (1 - lambda) A + lambda B, renormalized per block; nullopt when the
/// combination cancels a block.
std::optional<ThetaTriple> mix(const ThetaTriple& a, const ThetaTriple& b, double lambda);

/// Encoder whose tables are the inverse transforms of the spectra.
TurboEncoderParams encoder_of(const ThetaTriple& theta);

struct LossOptions {
  std::size_t k = 10;
  double snr_db = 1.0;
  std::size_t blocks = 10000;
  int iterations = 6;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Mean BCE of 6-iteration turbo decoding over `blocks` uniform inputs.
/// Block b draws its input and noise from derive_seed(seed, {b}), so the same
/// seed gives the same inputs and standard-normal noise for every theta.
Estimate loss_of_theta(const ThetaTriple& theta, const Interleaver& interleaver, const LossOptions& options);

/// Per-block losses behind loss_of_theta, for paired comparisons.
std::vector<double> block_losses(const ThetaTriple& theta, const Interleaver& interleaver,
                                 const LossOptions& options);

struct LineProbeResult {
  std::vector<double> lambdas;
  std::vector<double> losses;      // NaN where degenerate
  std::vector<double> std_errors;  // NaN where degenerate
  std::vector<bool> degenerate;
  std::uint64_t seed = 0;
  Interleaver interleaver;
};

/// 21 evenly spaced points in [0, 1].
std::vector<double> default_lambda_grid();

/// Loss along (1 - lambda) A + lambda B with per-block renormalization and
/// common random numbers. The interleaver is probe_interleaver(k, seed)
/// unless one is supplied.
LineProbeResult line_probe(const ThetaTriple& a, const ThetaTriple& b, const std::vector<double>& lambdas,
                           const LossOptions& options,
                           const std::optional<Interleaver>& interleaver = std::nullopt);

/// Interleaver used by line_probe for a given seed and block length.
Interleaver probe_interleaver(std::size_t k, std::uint64_t seed);

/// Columns: lambda,loss,std_error,degenerate_flag.
std::string line_probe_to_csv(const LineProbeResult& result);

}  // namespace dlecc
