#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dlecc/boolfn.hpp"
#include "dlecc/codec.hpp"
#include "dlecc/metrics.hpp"
#include "dlecc/rng.hpp"

namespace dlecc {

enum class InitKind { Normal, Parity };

struct TrainConfig {
  std::size_t k_enc = 16;
  int window = 5;
  std::size_t steps = 500;
  std::size_t batch_size = 64;
  double learning_rate = 5.0;  // plain SGD on the per-bit mean loss
  double snr_db = 1.0;
  std::uint64_t seed = 0;
  InitKind init = InitKind::Normal;
  std::size_t snapshot_every = 10;
  unsigned threads = 1;

  void validate() const;
};

struct TrainStep {
  std::size_t step;
  double loss;           // batch estimate of (1/k) sum_i H(U_i | Y)
  double loss_std_error;
  double gradient_norm;
  double power_residual;  // |analytic_power - 1| after the projection
};

struct Snapshot {
  std::size_t step;  // number of updates applied so far
  std::array<FourierSpectrum, 3> spectra;
};

struct TrainTrace {
  std::vector<TrainStep> steps;
  std::vector<Snapshot> snapshots;
};

/// Normal: i.i.d. N(0,1) table entries. Parity: one random parity per stream
/// whose support contains the newest bit (variable w). Both are projected with
/// constrain_power at cfg.k_enc.
TurboEncoderParams init_encoder(const TrainConfig& cfg, Rng& rng);

/// One training example: input bits and the standard-normal noise of all 3k
/// channel uses, stream-major.
struct Sample {
  Bits u;
  std::vector<double> noise;
};

struct LossAndGradient {
  double loss = 0.0;
  double loss_std_error = 0.0;
  std::array<std::vector<double>, 3> gradient;  // d loss / d table entry
};

/**
 * Batch-mean BCE of the brute-force MAP posterior with received word
 * y = x(u) + sigma * noise, and its exact derivative with respect to every
 * table entry (noise held fixed). Requires k within kBruteForceMaxK.
 */
LossAndGradient entropy_loss_and_gradient(const TurboEncoderParams& params, const Interleaver& interleaver,
                                          std::span<const Sample> batch, double sigma, unsigned threads = 1);

/// Draws a uniform input and noise of block length k.
Sample draw_sample(std::size_t k, Rng& rng);

/// Final params and the trace. A non-finite loss or gradient stops the run
/// early with `aborted` set; params and trace are those of the last good step.
struct TrainResult {
  TurboEncoderParams params;
  TrainTrace trace;
  bool aborted = false;
  std::string abort_reason;
};
TrainResult train_encoder(const TrainConfig& cfg);

/**
 * Held-out estimate of (1/k) sum_i H(U_i | Y): sample s draws a fresh uniform
 * interleaver, input and noise from derive_seed(seed, {s}) and scores the
 * brute-force posterior. The same seed gives the same draws for any params.
 */
Estimate conditional_entropy(const TurboEncoderParams& params, std::size_t k, double snr_db, std::size_t samples,
                             std::uint64_t seed, unsigned threads = 1);

/// Long format: step,stream,subset_mask,coefficient.
std::string fc_evolution_csv(const TrainTrace& trace);
/// step,loss,loss_std_error,gradient_norm,power_residual.
std::string learning_curve_csv(const TrainTrace& trace);

/// Q(x) = P(N(0,1) > x).
double gaussian_q(double x);

struct EvalRow {
  double snr_db;
  double ber;
  double ber_std_error;
  double bce;
  double bce_std_error;
  double uncoded_ber;  // Q(1/sigma)
  std::size_t blocks;
};

struct EvalOptions {
  std::size_t k_eval = 100;
  std::vector<double> snr_grid{-1.5, 0.0, 1.0, 2.0};
  std::size_t blocks = 100000;
  int iterations = 6;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct EvalReport {
  TurboEncoderParams params;  // re-constrained at k_eval
  Interleaver interleaver;
  std::vector<EvalRow> rows;
};

/// Re-projects at k_eval, fixes an interleaver from the seed, and runs the
/// turbo decoder over the SNR grid.
EvalReport evaluate_trained(const TurboEncoderParams& params, const EvalOptions& options);

/// snr_db,ber,ber_std_error,bce,bce_std_error,uncoded_ber,blocks.
std::string eval_csv(const EvalReport& report);

}  // namespace dlecc
