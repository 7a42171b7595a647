#include "dlecc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dlecc/error.hpp"
#include "dlecc/parallel.hpp"

namespace dlecc {
namespace {

double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

void check_lengths(std::span<const std::uint8_t> truth, std::span<const double> posteriors) {
  require(truth.size() == posteriors.size(), "length mismatch between bits and posteriors");
  require(!truth.empty(), "empty block");
}

double bit_bce(std::uint8_t u, double g) {
  const double p = std::clamp(g, kProbClamp, 1.0 - kProbClamp);
  return u ? -std::log2(p) : -std::log2(1.0 - p);
}

double bit_error(std::uint8_t u, double g) { return ((g > 0.5) != (u != 0)) ? 1.0 : 0.0; }

}  // namespace

double binary_entropy(double p) {
  require(p >= 0.0 && p <= 1.0, "binary_entropy: p must lie in [0, 1]");
  return -plogp(p) - plogp(1.0 - p);
}

double bce(std::span<const std::uint8_t> truth, std::span<const double> posteriors) {
  check_lengths(truth, posteriors);
  double acc = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) acc += bit_bce(truth[i], posteriors[i]);
  return acc / static_cast<double>(truth.size());
}

double ber(std::span<const std::uint8_t> truth, std::span<const double> posteriors) {
  check_lengths(truth, posteriors);
  double acc = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) acc += bit_error(truth[i], posteriors[i]);
  return acc / static_cast<double>(truth.size());
}

// ----------------------------------------------------------- accumulation

LossAccumulator::LossAccumulator(std::size_t k) : k_(k), bit_bce_(k, 0.0), bit_ber_(k, 0.0) {
  require(k >= 1, "LossAccumulator: block length must be positive");
}

void LossAccumulator::add(std::span<const std::uint8_t> truth, std::span<const double> posteriors) {
  check_lengths(truth, posteriors);
  require(truth.size() == k_, "LossAccumulator: block length mismatch");
  double c = 0.0, b = 0.0;
  for (std::size_t i = 0; i < k_; ++i) {
    const double ci = bit_bce(truth[i], posteriors[i]);
    const double bi = bit_error(truth[i], posteriors[i]);
    bit_bce_[i] += ci;
    bit_ber_[i] += bi;
    c += ci;
    b += bi;
  }
  c /= static_cast<double>(k_);
  b /= static_cast<double>(k_);
  sum_bce_ += c;
  sum_bce2_ += c * c;
  sum_ber_ += b;
  sum_ber2_ += b * b;
  ++blocks_;
}

LossAccumulator::Report LossAccumulator::report() const {
  Report r;
  r.blocks_evaluated = blocks_;
  if (blocks_ == 0) return r;
  const double n = static_cast<double>(blocks_);
  r.per_bit_bce.resize(k_);
  r.per_bit_ber.resize(k_);
  for (std::size_t i = 0; i < k_; ++i) {
    r.per_bit_bce[i] = bit_bce_[i] / n;
    r.per_bit_ber[i] = bit_ber_[i] / n;
  }
  r.bce = sum_bce_ / n;
  r.ber = sum_ber_ / n;
  if (blocks_ > 1) {
    r.std_error = std::sqrt(std::max(0.0, (sum_bce2_ - n * r.bce * r.bce) / (n - 1)) / n);
    r.ber_std_error = std::sqrt(std::max(0.0, (sum_ber2_ - n * r.ber * r.ber) / (n - 1)) / n);
  }
  return r;
}

Estimate mean_and_std_error(std::span<const double> samples) {
  Estimate e;
  if (samples.empty()) return e;
  const double n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double x : samples) sum += x;
  e.mean = sum / n;
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double x : samples) ss += (x - e.mean) * (x - e.mean);
    e.std_error = std::sqrt(ss / (n - 1) / n);
  }
  return e;
}

// ---------------------------------------------------------- entropy (AWGN)

Estimate conditional_entropy_estimate(const Codebook& codebook, const AwgnChannel& channel,
                                      std::size_t num_samples, std::uint64_t seed, unsigned threads) {
  require(num_samples >= 1, "conditional_entropy_estimate: need at least one sample");
  const std::size_t k = codebook.k();
  std::vector<double> losses(num_samples);
  parallel_for(num_samples, threads, [&](std::size_t s) {
    Rng rng(derive_seed(seed, {s}));
    Bits u(k);
    std::size_t c = 0;
    for (std::size_t i = 0; i < k; ++i) {
      u[i] = rng.bit() ? 1 : 0;
      c |= std::size_t{u[i]} << i;
    }
    const std::vector<double> y = channel.transmit(codebook.word(c), rng);
    const SoftPosterior post = brute_force_map(codebook, y, channel.sigma());
    losses[s] = bce(u, post.probs);
  });
  return mean_and_std_error(losses);
}

// --------------------------------------------------------- discrete exact

BceBer exact_discrete_bce_ber(const SmallEncoder& f, const DiscreteChannel& channel) {
  require(f.symbol_of_zero < channel.num_inputs() && f.symbol_of_one < channel.num_inputs(),
          "exact_discrete_bce_ber: encoder symbol outside the channel input alphabet");
  double b = 0.0, c = 0.0;
  for (std::size_t i = 0; i < channel.num_outputs(); ++i) {
    const double p1 = channel.p(i, f.symbol_of_one);
    const double p0 = channel.p(i, f.symbol_of_zero);
    b += std::min(p1, p0);
    c += plogp(p1) + plogp(p0) - plogp(p1 + p0);
  }
  return {-0.5 * c, 0.5 * b};
}

Estimate discrete_bce_estimate(const SmallEncoder& f, const DiscreteChannel& channel,
                               std::size_t num_samples, std::uint64_t seed) {
  require(num_samples >= 1, "discrete_bce_estimate: need at least one sample");
  Rng rng(seed);
  std::vector<double> losses(num_samples);
  for (auto& loss : losses) {
    const std::uint8_t u = rng.bit() ? 1 : 0;
    const std::size_t y = channel.transmit(u ? f.symbol_of_one : f.symbol_of_zero, rng);
    const double p1 = channel.p(y, f.symbol_of_one);
    const double p0 = channel.p(y, f.symbol_of_zero);
    const double g = p1 / (p1 + p0);
    const std::array<std::uint8_t, 1> truth{u};
    const std::array<double, 1> post{g};
    loss = bce(truth, post);
  }
  return mean_and_std_error(losses);
}

bool check_two_sided_bound(double bce_i, double ber_i, double tol) {
  require(ber_i >= 0.0 && ber_i <= 0.5, "check_two_sided_bound: ber must lie in [0, 1/2]");
  return 2.0 * ber_i - tol <= bce_i && bce_i <= binary_entropy(ber_i) + tol;
}

EncoderChannel tight_upper_channel(double t) {
  require(t >= 0.0 && t <= 0.5, "tight_upper_channel: t must lie in [0, 1/2]");
  return {SmallEncoder{0, 1}, DiscreteChannel({{t, 1.0 - t}, {1.0 - t, t}})};
}

EncoderChannel tight_lower_channel(double t) {
  require(t >= 0.0 && t <= 0.5, "tight_lower_channel: t must lie in [0, 1/2]");
  return {SmallEncoder{0, 1},
          DiscreteChannel({{1.0 - 2.0 * t, 0.0}, {0.0, 1.0 - 2.0 * t}, {2.0 * t, 2.0 * t}})};
}

CounterexampleReport counterexample_sweep() {
  const DiscreteChannel ch = DiscreteChannel::counterexample();
  CounterexampleReport rep;
  for (std::size_t a = 0; a < ch.num_inputs(); ++a)
    for (std::size_t b = a + 1; b < ch.num_inputs(); ++b) {
      const SmallEncoder f{a, b};
      const BceBer v = exact_discrete_bce_ber(f, ch);
      rep.rows.push_back({f, v.bce, v.ber});
    }

  constexpr double tie = 1e-12;
  double min_ber = rep.rows.front().ber, min_bce = rep.rows.front().bce;
  for (const auto& r : rep.rows) {
    min_ber = std::min(min_ber, r.ber);
    min_bce = std::min(min_bce, r.bce);
  }
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    if (rep.rows[i].ber <= min_ber + tie) rep.ber_argmin.push_back(i);
    if (rep.rows[i].bce <= min_bce + tie) rep.bce_argmin.push_back(i);
  }
  rep.disjoint = std::none_of(rep.ber_argmin.begin(), rep.ber_argmin.end(), [&](std::size_t i) {
    return std::find(rep.bce_argmin.begin(), rep.bce_argmin.end(), i) != rep.bce_argmin.end();
  });
  return rep;
}

std::vector<TightnessRow> tightness_sweep(std::size_t points) {
  require(points >= 2, "tightness_sweep: need at least two grid points");
  std::vector<TightnessRow> rows;
  for (std::size_t j = 0; j < points; ++j) {
    const double t = 0.5 * static_cast<double>(j) / static_cast<double>(points - 1);
    const auto up = tight_upper_channel(t);
    const auto lo = tight_lower_channel(t);
    const BceBer a = exact_discrete_bce_ber(up.encoder, up.channel);
    const BceBer b = exact_discrete_bce_ber(lo.encoder, lo.channel);
    rows.push_back({t, a.ber, a.bce, std::abs(a.bce - binary_entropy(a.ber)), b.ber, b.bce,
                    std::abs(b.bce - 2.0 * b.ber)});
  }
  return rows;
}

}  // namespace dlecc
