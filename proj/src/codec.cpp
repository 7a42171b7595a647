#include "dlecc/codec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dlecc/error.hpp"

namespace dlecc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) noexcept {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

double clip_llr(double x) noexcept { return std::clamp(x, -kLlrClip, kLlrClip); }

// Mean of g(h[x]) over windows whose `live` newest bits are uniform and the
// rest are zero padding.
template <class G>
double window_moment(const PseudoBooleanTable& h, int live, G g) {
  const int w = h.arity();
  live = std::min(live, w);
  const int shift = w - live;
  const std::uint32_t count = std::uint32_t{1} << live;
  double acc = 0.0;
  for (std::uint32_t r = 0; r < count; ++r) acc += g(h[r << shift]);
  return acc / count;
}

template <class G>
double per_symbol_expectation(const TurboEncoderParams& params, std::size_t k, G g) {
  require(k >= 1, "block length must be positive");
  const int w = params.window();
  const std::size_t boundary = std::min<std::size_t>(k, static_cast<std::size_t>(w - 1));
  double total = 0.0;
  for (const auto& h : params.tables()) {
    for (std::size_t i = 1; i <= boundary; ++i) total += window_moment(h, static_cast<int>(i), g);
    total += static_cast<double>(k - boundary) * window_moment(h, w, g);
  }
  return total / (3.0 * static_cast<double>(k));
}

}  // namespace

// -------------------------------------------------------------- Interleaver

Interleaver::Interleaver(std::vector<std::size_t> perm) : perm_(std::move(perm)), inverse_(perm_.size()) {
  std::vector<bool> seen(perm_.size(), false);
  for (std::size_t i = 0; i < perm_.size(); ++i) {
    require(perm_[i] < perm_.size() && !seen[perm_[i]], "Interleaver: not a permutation");
    seen[perm_[i]] = true;
    inverse_[perm_[i]] = i;
  }
}

Interleaver Interleaver::identity(std::size_t k) {
  std::vector<std::size_t> p(k);
  std::iota(p.begin(), p.end(), std::size_t{0});
  return Interleaver(std::move(p));
}

Interleaver Interleaver::random(std::size_t k, Rng& rng) {
  std::vector<std::size_t> p(k);
  std::iota(p.begin(), p.end(), std::size_t{0});
  for (std::size_t i = k; i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
  return Interleaver(std::move(p));
}

// ------------------------------------------------------------------ encoder

TurboEncoderParams::TurboEncoderParams(int window, std::array<PseudoBooleanTable, 3> tables)
    : window_(window), tables_(std::move(tables)) {
  require(window >= 1 && window <= kMaxArity, "TurboEncoderParams: bad window");
  for (const auto& t : tables_)
    require(t.arity() == window, "TurboEncoderParams: table arity must equal the window");
}

Codeword encode(const TurboEncoderParams& params, std::span<const std::uint8_t> bits,
                const Interleaver& interleaver) {
  const std::size_t k = bits.size();
  const int w = params.window();
  require(k >= static_cast<std::size_t>(w), "encode: block length shorter than the window");
  require(interleaver.size() == k, "encode: interleaver length mismatch");

  const std::vector<std::uint8_t> permuted = interleaver.interleave(bits);
  Codeword cw;
  for (auto& s : cw.streams) s.resize(k);
  std::uint32_t idx = 0, idx_pi = 0;
  for (std::size_t i = 0; i < k; ++i) {
    idx = (idx >> 1) | (std::uint32_t{bits[i] & 1u} << (w - 1));
    idx_pi = (idx_pi >> 1) | (std::uint32_t{permuted[i] & 1u} << (w - 1));
    cw.streams[0][i] = params.table(0)[idx];
    cw.streams[1][i] = params.table(1)[idx];
    cw.streams[2][i] = params.table(2)[idx_pi];
  }
  return cw;
}

double analytic_power(const TurboEncoderParams& params, std::size_t k) {
  return per_symbol_expectation(params, k, [](double v) { return v * v; });
}

double optimal_center(const TurboEncoderParams& params, std::size_t k) {
  return per_symbol_expectation(params, k, [](double v) { return v; });
}

TurboEncoderParams constrain_power(const TurboEncoderParams& params, std::size_t k) {
  const auto& t = params.tables();
  if (std::all_of(t.begin(), t.end(), [](const PseudoBooleanTable& h) { return h.is_constant(); }))
    fail(ErrorKind::Numerical, "zero-variance generator");

  const double center = optimal_center(params, k);
  std::array<PseudoBooleanTable, 3> centered;
  double scale_ref = 0.0;
  for (std::size_t s = 0; s < 3; ++s) {
    std::vector<double> v(t[s].values().begin(), t[s].values().end());
    for (double& x : v) {
      scale_ref = std::max(scale_ref, std::abs(x));
      x -= center;
    }
    centered[s] = PseudoBooleanTable(params.window(), std::move(v));
  }
  TurboEncoderParams shifted(params.window(), centered);
  const double scale = std::sqrt(analytic_power(shifted, k));
  if (!(scale > 1e-12 * std::max(1.0, scale_ref))) fail(ErrorKind::Numerical, "zero-variance generator");

  for (auto& h : centered) {
    std::vector<double> v(h.values().begin(), h.values().end());
    for (double& x : v) x /= scale;
    h = PseudoBooleanTable(params.window(), std::move(v));
  }
  return TurboEncoderParams(params.window(), std::move(centered));
}

// ------------------------------------------------------------------- BCJR

Trellis::Trellis(int window, std::vector<PseudoBooleanTable> tables)
    : window_(window), tables_(std::move(tables)) {
  require(window >= 1 && window <= kMaxArity, "Trellis: bad window");
  require(!tables_.empty(), "Trellis: needs at least one output table");
  for (const auto& t : tables_) require(t.arity() == window, "Trellis: table arity must equal the window");
}

double llr_to_prob(double llr) noexcept {
  return llr >= 0 ? 1.0 / (1.0 + std::exp(-llr)) : std::exp(llr) / (1.0 + std::exp(llr));
}

BcjrOutput bcjr_constituent(const Trellis& trellis, std::span<const std::span<const double>> received,
                            std::span<const double> prior_llr, double sigma) {
  require(std::isfinite(sigma) && sigma > 0.0, "bcjr_constituent: sigma must be positive");
  require(received.size() == trellis.num_outputs(), "bcjr_constituent: wrong number of received streams");
  const std::size_t k = prior_llr.size();
  for (const auto& r : received) require(r.size() == k, "bcjr_constituent: length mismatch");

  const std::size_t S = trellis.num_states();
  const std::size_t outs = trellis.num_outputs();
  const double inv2var = 1.0 / (2.0 * sigma * sigma);

  // gamma[t][s][b]
  std::vector<double> gamma(k * S * 2);
  for (std::size_t t = 0; t < k; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      for (unsigned b = 0; b < 2; ++b) {
        double metric = b ? prior_llr[t] : 0.0;
        for (std::size_t o = 0; o < outs; ++o) {
          const double d = received[o][t] - trellis.output(s, b, o);
          metric -= d * d * inv2var;
        }
        gamma[(t * S + s) * 2 + b] = metric;
      }
    }
  }

  std::vector<double> alpha((k + 1) * S, kNegInf);
  alpha[0] = 0.0;
  for (std::size_t t = 0; t < k; ++t) {
    double* next = &alpha[(t + 1) * S];
    const double* cur = &alpha[t * S];
    for (std::size_t s = 0; s < S; ++s) {
      if (cur[s] == kNegInf) continue;
      for (unsigned b = 0; b < 2; ++b) {
        const std::size_t ns = trellis.next_state(s, b);
        next[ns] = log_add(next[ns], cur[s] + gamma[(t * S + s) * 2 + b]);
      }
    }
    const double m = *std::max_element(next, next + S);
    for (std::size_t s = 0; s < S; ++s) next[s] -= m;
  }

  std::vector<double> beta((k + 1) * S, kNegInf);
  std::fill(beta.begin() + static_cast<std::ptrdiff_t>(k * S), beta.end(), 0.0);
  for (std::size_t t = k; t-- > 0;) {
    double* cur = &beta[t * S];
    const double* nxt = &beta[(t + 1) * S];
    for (std::size_t s = 0; s < S; ++s) {
      double acc = kNegInf;
      for (unsigned b = 0; b < 2; ++b)
        acc = log_add(acc, gamma[(t * S + s) * 2 + b] + nxt[trellis.next_state(s, b)]);
      cur[s] = acc;
    }
    const double m = *std::max_element(cur, cur + S);
    for (std::size_t s = 0; s < S; ++s) cur[s] -= m;
  }

  BcjrOutput out{std::vector<double>(k), std::vector<double>(k)};
  for (std::size_t t = 0; t < k; ++t) {
    double l0 = kNegInf, l1 = kNegInf;
    for (std::size_t s = 0; s < S; ++s) {
      const double a = alpha[t * S + s];
      if (a == kNegInf) continue;
      l0 = log_add(l0, a + gamma[(t * S + s) * 2 + 0] + beta[(t + 1) * S + trellis.next_state(s, 0)]);
      l1 = log_add(l1, a + gamma[(t * S + s) * 2 + 1] + beta[(t + 1) * S + trellis.next_state(s, 1)]);
    }
    const double post = l1 - l0;
    out.posterior_llr[t] = clip_llr(post);
    out.extrinsic_llr[t] = clip_llr(post - prior_llr[t]);
  }
  return out;
}

SoftPosterior turbo_decode(const TurboEncoderParams& params, const Interleaver& interleaver,
                           const Codeword& received, double sigma, int iterations) {
  require(iterations >= 1, "turbo_decode: iterations must be >= 1");
  const std::size_t k = received.length();
  require(interleaver.size() == k, "turbo_decode: interleaver length mismatch");
  for (const auto& s : received.streams) require(s.size() == k, "turbo_decode: ragged codeword");

  const Trellis first(params.window(), {params.table(0), params.table(1)});
  const Trellis second(params.window(), {params.table(2)});
  const std::array<std::span<const double>, 2> rx1{received.streams[0], received.streams[1]};
  const std::array<std::span<const double>, 1> rx2{received.streams[2]};

  std::vector<double> prior1(k, 0.0), prior2;
  BcjrOutput out2;
  for (int it = 0; it < iterations; ++it) {
    const BcjrOutput out1 = bcjr_constituent(first, rx1, prior1, sigma);
    prior2 = interleaver.interleave<double>(out1.extrinsic_llr);
    out2 = bcjr_constituent(second, rx2, prior2, sigma);
    prior1 = interleaver.deinterleave<double>(out2.extrinsic_llr);
  }
  const std::vector<double> llr = interleaver.deinterleave<double>(out2.posterior_llr);
  SoftPosterior post{std::vector<double>(k)};
  for (std::size_t i = 0; i < k; ++i) post.probs[i] = llr_to_prob(llr[i]);
  return post;
}

// -------------------------------------------------------------- brute force

Codebook::Codebook(std::size_t k, std::size_t n, std::vector<double> words)
    : k_(k), n_(n), words_(std::move(words)) {
  require(k_ >= 1 && k_ <= kBruteForceMaxK, "block length too large for brute force");
  require(words_.size() == (std::size_t{1} << k_) * n_, "Codebook: wrong number of entries");
}

Codebook turbo_codebook(const TurboEncoderParams& params, const Interleaver& interleaver) {
  const std::size_t k = interleaver.size();
  if (k > kBruteForceMaxK) fail(ErrorKind::InvalidArgument, "block length too large for brute force");
  const std::size_t n = 3 * k;
  std::vector<double> words((std::size_t{1} << k) * n);
  Bits u(k);
  for (std::size_t c = 0; c < (std::size_t{1} << k); ++c) {
    for (std::size_t i = 0; i < k; ++i) u[i] = (c >> i) & 1u;
    const Codeword cw = encode(params, u, interleaver);
    double* dst = &words[c * n];
    for (const auto& s : cw.streams) dst = std::copy(s.begin(), s.end(), dst);
  }
  return Codebook(k, n, std::move(words));
}

Codebook trellis_codebook(const Trellis& trellis, std::size_t k) {
  if (k > kBruteForceMaxK) fail(ErrorKind::InvalidArgument, "block length too large for brute force");
  const std::size_t outs = trellis.num_outputs();
  const std::size_t n = outs * k;
  std::vector<double> words((std::size_t{1} << k) * n);
  for (std::size_t c = 0; c < (std::size_t{1} << k); ++c) {
    std::size_t state = 0;
    for (std::size_t t = 0; t < k; ++t) {
      const unsigned b = (c >> t) & 1u;
      for (std::size_t o = 0; o < outs; ++o) words[c * n + o * k + t] = trellis.output(state, b, o);
      state = trellis.next_state(state, b);
    }
  }
  return Codebook(k, n, std::move(words));
}

SoftPosterior brute_force_map(const Codebook& codebook, std::span<const double> received, double sigma,
                              std::span<const double> prior_llr) {
  require(std::isfinite(sigma) && sigma > 0.0, "brute_force_map: sigma must be positive");
  require(received.size() == codebook.n(), "brute_force_map: received length mismatch");
  const std::size_t k = codebook.k();
  require(prior_llr.empty() || prior_llr.size() == k, "brute_force_map: prior length mismatch");
  const double inv2var = 1.0 / (2.0 * sigma * sigma);

  std::vector<double> l0(k, kNegInf), l1(k, kNegInf);
  for (std::size_t c = 0; c < codebook.size(); ++c) {
    const auto x = codebook.word(c);
    double metric = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double d = received[j] - x[j];
      metric -= d * d * inv2var;
    }
    if (!prior_llr.empty())
      for (std::size_t i = 0; i < k; ++i)
        if ((c >> i) & 1u) metric += prior_llr[i];
    for (std::size_t i = 0; i < k; ++i) {
      double& slot = ((c >> i) & 1u) ? l1[i] : l0[i];
      slot = log_add(slot, metric);
    }
  }
  SoftPosterior post{std::vector<double>(k)};
  for (std::size_t i = 0; i < k; ++i) post.probs[i] = llr_to_prob(l1[i] - l0[i]);
  return post;
}

SoftPosterior brute_force_map(const TurboEncoderParams& params, const Interleaver& interleaver,
                              const Codeword& received, double sigma) {
  const std::size_t k = received.length();
  if (k > kBruteForceMaxK) fail(ErrorKind::InvalidArgument, "block length too large for brute force");
  const Codebook book = turbo_codebook(params, interleaver);
  std::vector<double> y;
  y.reserve(3 * k);
  for (const auto& s : received.streams) y.insert(y.end(), s.begin(), s.end());
  return brute_force_map(book, y, sigma);
}

}  // namespace dlecc
