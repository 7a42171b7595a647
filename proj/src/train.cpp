#include "dlecc/train.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dlecc/channel.hpp"
#include "dlecc/error.hpp"
#include "dlecc/parallel.hpp"
#include "csv.hpp"

namespace dlecc {

using detail::Num;
namespace {

constexpr int kMaxTrainWindow = 8;
constexpr std::uint64_t kInitTag = 0x696E6974ULL;
constexpr std::uint64_t kStepTag = 0x73746570ULL;
constexpr std::uint64_t kEvalTag = 0x6576616CULL;

// Table index of every channel use of every codeword, stream-major.
class IndexBook {
 public:
  IndexBook(int w, const Interleaver& pi) : k_(pi.size()), n_(3 * pi.size()) {
    require(k_ >= 1 && k_ <= kBruteForceMaxK, "brute-force block length out of range");
    const std::size_t rows = std::size_t{1} << k_;
    idx_.resize(rows * n_);
    std::vector<std::uint8_t> u(k_), v(k_);
    const std::uint32_t mask = (std::uint32_t{1} << w) - 1;
    for (std::size_t c = 0; c < rows; ++c) {
      for (std::size_t i = 0; i < k_; ++i) u[i] = (c >> i) & 1u;
      for (std::size_t i = 0; i < k_; ++i) v[i] = u[pi.perm()[i]];
      std::uint8_t* row = idx_.data() + c * n_;
      std::uint32_t a = 0, b = 0;
      for (std::size_t i = 0; i < k_; ++i) {
        a = ((a >> 1) | (std::uint32_t{u[i]} << (w - 1))) & mask;
        b = ((b >> 1) | (std::uint32_t{v[i]} << (w - 1))) & mask;
        row[i] = static_cast<std::uint8_t>(a);
        row[k_ + i] = static_cast<std::uint8_t>(a);
        row[2 * k_ + i] = static_cast<std::uint8_t>(b);
      }
    }
  }

  std::size_t k() const noexcept { return k_; }
  std::size_t n() const noexcept { return n_; }
  const std::uint8_t* row(std::size_t c) const noexcept { return idx_.data() + c * n_; }
  std::size_t stream_of(std::size_t p) const noexcept { return p / k_; }

 private:
  std::size_t k_, n_;
  std::vector<std::uint8_t> idx_;
};

// All codewords as a dense 2^k x 3k matrix.
std::vector<double> codewords(const TurboEncoderParams& params, const IndexBook& book) {
  const std::size_t rows = std::size_t{1} << book.k();
  const std::size_t n = book.n(), k = book.k();
  std::vector<double> x(rows * n);
  for (std::size_t c = 0; c < rows; ++c) {
    const std::uint8_t* r = book.row(c);
    double* out = x.data() + c * n;
    for (std::size_t p = 0; p < n; ++p) out[p] = params.table(p / k)[r[p]];
  }
  return x;
}

std::size_t word_index(std::span<const std::uint8_t> u) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < u.size(); ++i) c |= std::size_t{u[i] != 0} << i;
  return c;
}

std::vector<double> received_word(std::span<const double> x, const Sample& s, double sigma) {
  std::vector<double> y(x.begin(), x.end());
  for (std::size_t p = 0; p < y.size(); ++p) y[p] += sigma * s.noise[p];
  return y;
}

// Softmax weights of all codewords given y.
std::vector<double> codeword_posterior(const std::vector<double>& x, std::size_t n, std::span<const double> y,
                                       double sigma) {
  const std::size_t rows = x.size() / n;
  std::vector<double> pi(rows);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < rows; ++c) {
    const double* xc = x.data() + c * n;
    double d = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const double e = y[p] - xc[p];
      d += e * e;
    }
    pi[c] = -d * inv;
    best = std::max(best, pi[c]);
  }
  double z = 0.0;
  for (double& v : pi) {
    v = std::exp(v - best);
    z += v;
  }
  for (double& v : pi) v /= z;
  return pi;
}

std::vector<double> bit_marginals(const std::vector<double>& pi, std::size_t k) {
  std::vector<double> p1(k, 0.0);
  for (std::size_t c = 0; c < pi.size(); ++c)
    for (std::size_t i = 0; i < k; ++i)
      if ((c >> i) & 1u) p1[i] += pi[c];
  return p1;
}

double sample_loss(std::span<const std::uint8_t> u, std::span<const double> p1) { return bce(u, p1); }

double power_residual(const TurboEncoderParams& params, std::size_t k) {
  return std::abs(analytic_power(params, k) - 1.0);
}

}  // namespace

void TrainConfig::validate() const {
  require(k_enc >= 1 && k_enc <= kBruteForceMaxK, "k_enc must lie in [1, 20]");
  require(window >= 2 && window <= kMaxTrainWindow, "window must lie in [2, 8]");
  require(k_enc >= static_cast<std::size_t>(window), "k_enc must be at least the window");
  require(batch_size >= 1, "batch size must be positive");
  require(std::isfinite(learning_rate) && learning_rate > 0.0, "learning rate must be positive");
  require(std::isfinite(snr_db), "snr must be finite");
  require(snapshot_every >= 1, "snapshot cadence must be positive");
}

TurboEncoderParams init_encoder(const TrainConfig& cfg, Rng& rng) {
  cfg.validate();
  const int w = cfg.window;
  const std::size_t n = std::size_t{1} << w;
  std::array<PseudoBooleanTable, 3> tables;
  for (auto& t : tables) {
    if (cfg.init == InitKind::Normal) {
      std::vector<double> v(n);
      for (double& x : v) x = rng.normal();
      t = PseudoBooleanTable(w, std::move(v));
    } else {
      const SubsetMask low = static_cast<SubsetMask>(rng.below(std::uint64_t{1} << (w - 1)));
      t = parity_table(w, low | (SubsetMask{1} << (w - 1)));
    }
  }
  return constrain_power(TurboEncoderParams(w, std::move(tables)), cfg.k_enc);
}

Sample draw_sample(std::size_t k, Rng& rng) {
  Sample s;
  s.u.resize(k);
  for (auto& b : s.u) b = rng.bit() ? 1 : 0;
  s.noise.resize(3 * k);
  for (double& z : s.noise) z = rng.normal();
  return s;
}

LossAndGradient entropy_loss_and_gradient(const TurboEncoderParams& params, const Interleaver& interleaver,
                                          std::span<const Sample> batch, double sigma, unsigned threads) {
  require(!batch.empty(), "empty batch");
  require(std::isfinite(sigma) && sigma > 0.0, "sigma must be positive");
  require(params.window() <= kMaxTrainWindow, "window too large for training");
  const IndexBook book(params.window(), interleaver);
  const std::size_t k = book.k(), n = book.n();
  const std::size_t entries = std::size_t{1} << params.window();
  for (const auto& s : batch)
    require(s.u.size() == k && s.noise.size() == n, "sample shape does not match the block length");

  const std::vector<double> x = codewords(params, book);
  const std::size_t rows = x.size() / n;
  const double inv_var = 1.0 / (sigma * sigma);
  const double scale = 1.0 / (static_cast<double>(k) * std::numbers::ln2);

  std::vector<double> losses(batch.size());
  std::vector<std::vector<double>> grads(batch.size());
  parallel_for(batch.size(), threads, [&](std::size_t b) {
    const Sample& s = batch[b];
    const std::size_t truth = word_index(s.u);
    const std::vector<double> y = received_word({x.data() + truth * n, n}, s, sigma);
    const std::vector<double> pi = codeword_posterior(x, n, y, sigma);
    const std::vector<double> p1 = bit_marginals(pi, k);
    losses[b] = sample_loss(s.u, p1);

    // 1/q_i for bits whose posterior is not clamped; zero otherwise.
    std::vector<double> inv_q(k, 0.0);
    std::vector<bool> active(k);
    for (std::size_t i = 0; i < k; ++i) {
      active[i] = p1[i] > kProbClamp && p1[i] < 1.0 - kProbClamp;
      if (active[i]) inv_q[i] = 1.0 / (s.u[i] ? p1[i] : 1.0 - p1[i]);
    }

    std::vector<double> g(3 * entries, 0.0);
    std::vector<double> dy(n, 0.0);
    for (std::size_t c = 0; c < rows; ++c) {
      if (pi[c] == 0.0) continue;
      double sum = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        if (!active[i]) continue;
        const bool agree = ((c >> i) & 1u) == s.u[i];
        sum += 1.0 - (agree ? inv_q[i] : 0.0);
      }
      const double a = pi[c] * scale * sum * inv_var;
      if (a == 0.0) continue;
      const double* xc = x.data() + c * n;
      const std::uint8_t* r = book.row(c);
      for (std::size_t p = 0; p < n; ++p) {
        const double gx = a * (y[p] - xc[p]);
        g[(p / k) * entries + r[p]] += gx;
        dy[p] -= gx;
      }
    }
    const std::uint8_t* r = book.row(truth);
    for (std::size_t p = 0; p < n; ++p) g[(p / k) * entries + r[p]] += dy[p];
    grads[b] = std::move(g);
  });

  LossAndGradient out;
  const Estimate e = mean_and_std_error(losses);
  out.loss = e.mean;
  out.loss_std_error = e.std_error;
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  for (std::size_t st = 0; st < 3; ++st) {
    out.gradient[st].assign(entries, 0.0);
    for (const auto& g : grads)
      for (std::size_t j = 0; j < entries; ++j) out.gradient[st][j] += g[st * entries + j];
    for (double& v : out.gradient[st]) v *= inv_b;
  }
  return out;
}

TrainResult train_encoder(const TrainConfig& cfg) {
  cfg.validate();
  TrainResult result;
  Rng init_rng(derive_seed(cfg.seed, {kInitTag}));
  result.params = init_encoder(cfg, init_rng);
  const double sigma = snr_db_to_sigma(cfg.snr_db);
  const int w = cfg.window;

  auto snapshot = [&](std::size_t step) {
    Snapshot s{step, {}};
    for (std::size_t t = 0; t < 3; ++t) s.spectra[t] = wht_forward(result.params.table(t));
    result.trace.snapshots.push_back(std::move(s));
  };
  snapshot(0);

  for (std::size_t step = 0; step < cfg.steps; ++step) {
    Rng rng(derive_seed(cfg.seed, {kStepTag, step}));
    const Interleaver pi = Interleaver::random(cfg.k_enc, rng);
    std::vector<Sample> batch(cfg.batch_size);
    for (auto& s : batch) s = draw_sample(cfg.k_enc, rng);

    const LossAndGradient lg = entropy_loss_and_gradient(result.params, pi, batch, sigma, cfg.threads);
    double norm2 = 0.0;
    for (const auto& g : lg.gradient)
      for (double v : g) norm2 += v * v;
    if (!std::isfinite(lg.loss) || !std::isfinite(norm2)) {
      result.aborted = true;
      result.abort_reason = "non-finite loss or gradient at step " + std::to_string(step);
      break;
    }

    std::array<PseudoBooleanTable, 3> next;
    for (std::size_t t = 0; t < 3; ++t) {
      std::vector<double> v(result.params.table(t).values().begin(), result.params.table(t).values().end());
      for (std::size_t j = 0; j < v.size(); ++j) v[j] -= cfg.learning_rate * lg.gradient[t][j];
      next[t] = PseudoBooleanTable(w, std::move(v));
    }
    try {
      result.params = constrain_power(TurboEncoderParams(w, std::move(next)), cfg.k_enc);
    } catch (const Error& e) {
      result.aborted = true;
      result.abort_reason = e.what();
      break;
    }
    result.trace.steps.push_back(
        {step, lg.loss, lg.loss_std_error, std::sqrt(norm2), power_residual(result.params, cfg.k_enc)});
    if ((step + 1) % cfg.snapshot_every == 0) snapshot(step + 1);
  }
  const std::size_t done = result.trace.steps.size();
  if (result.trace.snapshots.back().step != done) snapshot(done);
  return result;
}

Estimate conditional_entropy(const TurboEncoderParams& params, std::size_t k, double snr_db, std::size_t samples,
                             std::uint64_t seed, unsigned threads) {
  require(samples >= 1, "need at least one sample");
  require(k >= 1 && k <= kBruteForceMaxK, "brute-force block length out of range");
  const double sigma = snr_db_to_sigma(snr_db);
  std::vector<double> losses(samples);
  parallel_for(samples, threads, [&](std::size_t s) {
    Rng rng(derive_seed(seed, {s}));
    const Interleaver pi = Interleaver::random(k, rng);
    const Sample smp = draw_sample(k, rng);
    const IndexBook book(params.window(), pi);
    const std::vector<double> x = codewords(params, book);
    const std::size_t n = book.n();
    const std::vector<double> y = received_word({x.data() + word_index(smp.u) * n, n}, smp, sigma);
    const std::vector<double> p1 = bit_marginals(codeword_posterior(x, n, y, sigma), k);
    losses[s] = sample_loss(smp.u, p1);
  });
  return mean_and_std_error(losses);
}

std::string fc_evolution_csv(const TrainTrace& trace) {
  std::ostringstream os;
  os << "step,stream,subset_mask,coefficient\n";
  for (const auto& s : trace.snapshots)
    for (std::size_t t = 0; t < 3; ++t)
      for (std::size_t m = 0; m < s.spectra[t].size(); ++m)
        os << s.step << ',' << t + 1 << ',' << m << ',' << Num{s.spectra[t].coeffs()[m]} << '\n';
  return os.str();
}

std::string learning_curve_csv(const TrainTrace& trace) {
  std::ostringstream os;
  os << "step,loss,loss_std_error,gradient_norm,power_residual\n";
  for (const auto& s : trace.steps)
    os << s.step << ',' << Num{s.loss} << ',' << Num{s.loss_std_error} << ',' << Num{s.gradient_norm} << ','
       << Num{s.power_residual} << '\n';
  return os.str();
}

double gaussian_q(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

EvalReport evaluate_trained(const TurboEncoderParams& params, const EvalOptions& options) {
  require(options.k_eval >= static_cast<std::size_t>(params.window()), "k_eval must be at least the window");
  require(options.blocks >= 1, "need at least one block");
  require(!options.snr_grid.empty(), "empty SNR grid");
  EvalReport rep;
  rep.params = constrain_power(params, options.k_eval);
  Rng pi_rng(derive_seed(options.seed, {kEvalTag}));
  rep.interleaver = Interleaver::random(options.k_eval, pi_rng);
  const std::size_t k = options.k_eval;

  for (std::size_t j = 0; j < options.snr_grid.size(); ++j) {
    const double snr = options.snr_grid[j];
    const double sigma = snr_db_to_sigma(snr);
    std::vector<double> bces(options.blocks), bers(options.blocks);
    parallel_for(options.blocks, options.threads, [&](std::size_t b) {
      Rng rng(derive_seed(options.seed, {j, b}));
      Bits u(k);
      for (auto& bit : u) bit = rng.bit() ? 1 : 0;
      Codeword rx = encode(rep.params, u, rep.interleaver);
      for (auto& stream : rx.streams)
        for (double& y : stream) y += sigma * rng.normal();
      const SoftPosterior post = turbo_decode(rep.params, rep.interleaver, rx, sigma, options.iterations);
      bces[b] = bce(u, post.probs);
      bers[b] = ber(u, post.probs);
    });
    const Estimate c = mean_and_std_error(bces);
    const Estimate e = mean_and_std_error(bers);
    rep.rows.push_back({snr, e.mean, e.std_error, c.mean, c.std_error, gaussian_q(1.0 / sigma), options.blocks});
  }
  return rep;
}

std::string eval_csv(const EvalReport& report) {
  std::ostringstream os;
  os << "snr_db,ber,ber_std_error,bce,bce_std_error,uncoded_ber,blocks\n";
  for (const auto& r : report.rows)
    os << Num{r.snr_db} << ',' << Num{r.ber} << ',' << Num{r.ber_std_error} << ',' << Num{r.bce} << ','
       << Num{r.bce_std_error} << ',' << Num{r.uncoded_ber} << ',' << r.blocks << '\n';
  return os.str();
}

}  // namespace dlecc
