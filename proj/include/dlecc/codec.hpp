#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dlecc/boolfn.hpp"
#include "dlecc/rng.hpp"

namespace dlecc {

/// out[i] = in[perm[i]].
class Interleaver {
 public:
  Interleaver() = default;
  explicit Interleaver(std::vector<std::size_t> perm);

  static Interleaver identity(std::size_t k);
  /// Uniform over all k! permutations (Fisher-Yates).
  static Interleaver random(std::size_t k, Rng& rng);

  std::size_t size() const noexcept { return perm_.size(); }
  const std::vector<std::size_t>& perm() const noexcept { return perm_; }
  const std::vector<std::size_t>& inverse() const noexcept { return inverse_; }

  template <class T>
  std::vector<T> interleave(std::span<const T> in) const {
    std::vector<T> out(perm_.size());
    for (std::size_t i = 0; i < perm_.size(); ++i) out[i] = in[perm_[i]];
    return out;
  }
  template <class T>
  std::vector<T> deinterleave(std::span<const T> in) const {
    std::vector<T> out(perm_.size());
    for (std::size_t i = 0; i < perm_.size(); ++i) out[perm_[i]] = in[i];
    return out;
  }

  friend bool operator==(const Interleaver&, const Interleaver&) = default;

 private:
  std::vector<std::size_t> perm_;
  std::vector<std::size_t> inverse_;
};

/**
 * Rate-1/3 non-recursive Turbo encoder given by three tables of arity w.
 *
 * Stream s at position i reads the window u_{i-w+1} .. u_i with table
 * variable j+1 (index bit j) holding u_{i-w+1+j}; the newest bit u_i is index
 * bit w-1. Positions before the block are zero. Streams 1 and 2 read u,
 * stream 3 reads the interleaved input.
 */
class TurboEncoderParams {
 public:
  TurboEncoderParams() = default;
  TurboEncoderParams(int window, std::array<PseudoBooleanTable, 3> tables);

  int window() const noexcept { return window_; }
  const PseudoBooleanTable& table(std::size_t s) const noexcept { return tables_[s]; }
  const std::array<PseudoBooleanTable, 3>& tables() const noexcept { return tables_; }

  friend bool operator==(const TurboEncoderParams&, const TurboEncoderParams&) = default;

 private:
  int window_ = 0;
  std::array<PseudoBooleanTable, 3> tables_;
};

struct Codeword {
  std::array<std::vector<double>, 3> streams;

  std::size_t length() const noexcept { return streams[0].size(); }
};

using Bits = std::vector<std::uint8_t>;

Codeword encode(const TurboEncoderParams& params, std::span<const std::uint8_t> bits,
                const Interleaver& interleaver);

/// Exact E[(1/3k) sum_s sum_i f_i^(s)(u)^2] over uniform inputs, with the
/// zero-padded boundary positions 1..w-1 handled separately.
double analytic_power(const TurboEncoderParams& params, std::size_t k);

/// C = (1/3k) sum_s sum_i E[f_i^(s)(u)], the shift minimizing the rescaling.
double optimal_center(const TurboEncoderParams& params, std::size_t k);

/// h <- (h - C) / S so that analytic_power(h, k) = 1.
TurboEncoderParams constrain_power(const TurboEncoderParams& params, std::size_t k);

/// Unterminated trellis of one constituent: state = previous w-1 inputs.
class Trellis {
 public:
  Trellis(int window, std::vector<PseudoBooleanTable> tables);

  int window() const noexcept { return window_; }
  std::size_t num_states() const noexcept { return std::size_t{1} << (window_ - 1); }
  std::size_t num_outputs() const noexcept { return tables_.size(); }

  std::size_t next_state(std::size_t state, unsigned bit) const noexcept {
    return (state | (std::size_t{bit} << (window_ - 1))) >> 1;
  }
  double output(std::size_t state, unsigned bit, std::size_t stream) const noexcept {
    return tables_[stream][static_cast<std::uint32_t>(state | (std::size_t{bit} << (window_ - 1)))];
  }

 private:
  int window_;
  std::vector<PseudoBooleanTable> tables_;
};

inline constexpr double kLlrClip = 50.0;

/// LLRs are log P(u=1)/P(u=0).
struct BcjrOutput {
  std::vector<double> posterior_llr;
  std::vector<double> extrinsic_llr;
};

/**
 * Exact log-domain forward-backward over one constituent trellis with
 * Gaussian likelihoods. `received` holds one span per trellis output stream.
 * The constituents are non-systematic, so the extrinsic output is
 * posterior - prior. Both outputs are clipped to +-kLlrClip.
 */
BcjrOutput bcjr_constituent(const Trellis& trellis, std::span<const std::span<const double>> received,
                            std::span<const double> prior_llr, double sigma);

struct SoftPosterior {
  std::vector<double> probs;  // P(U_i = 1 | Y = y)
};

double llr_to_prob(double llr) noexcept;

/// Iterative decoding: streams 1+2 on one trellis, then stream 3 on the
/// interleaved trellis, exchanging extrinsic LLRs.
SoftPosterior turbo_decode(const TurboEncoderParams& params, const Interleaver& interleaver,
                           const Codeword& received, double sigma, int iterations = 6);

/// All 2^k codewords of an encoder; bit i of the row index is input bit i.
class Codebook {
 public:
  Codebook(std::size_t k, std::size_t n, std::vector<double> words);

  std::size_t k() const noexcept { return k_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return std::size_t{1} << k_; }
  std::span<const double> word(std::size_t c) const noexcept { return {words_.data() + c * n_, n_}; }

 private:
  std::size_t k_, n_;
  std::vector<double> words_;
};

inline constexpr std::size_t kBruteForceMaxK = 20;

/// Stream-major layout: streams 1, 2, 3 each of length k.
Codebook turbo_codebook(const TurboEncoderParams& params, const Interleaver& interleaver);
/// Stream-major layout of one constituent's outputs.
Codebook trellis_codebook(const Trellis& trellis, std::size_t k);

/// Exact per-bit marginals under AWGN by enumerating all codewords, with
/// optional prior LLRs per input bit.
SoftPosterior brute_force_map(const Codebook& codebook, std::span<const double> received, double sigma,
                              std::span<const double> prior_llr = {});

SoftPosterior brute_force_map(const TurboEncoderParams& params, const Interleaver& interleaver,
                              const Codeword& received, double sigma);

}  // namespace dlecc
