#include "dlecc/landscape.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dlecc/channel.hpp"
#include "dlecc/error.hpp"
#include "dlecc/parallel.hpp"
#include "csv.hpp"

namespace dlecc {

using detail::Num;
namespace {

constexpr std::uint64_t kInterleaverTag = 0x696E746C76ULL;  // "intlv"
constexpr double kDegenerateNorm = 1e-12;

FourierSpectrum scaled(const FourierSpectrum& s, double factor) {
  std::vector<double> v(s.coeffs().begin(), s.coeffs().end());
  for (double& x : v) x *= factor;
  return FourierSpectrum(s.arity(), std::move(v));
}

}  // namespace

ThetaTriple parity_triple(const std::array<SubsetMask, 3>& masks) {
  ThetaTriple t;
  for (std::size_t b = 0; b < 3; ++b) {
    require(masks[b] < (SubsetMask{1} << kThetaArity), "parity_triple: mask must fit in 5 variables");
    std::vector<double> v(std::size_t{1} << kThetaArity, 0.0);
    v[masks[b]] = 1.0;
    t.spectra[b] = FourierSpectrum(kThetaArity, std::move(v));
  }
  return t;
}

ThetaTriple bent_triple(const std::array<std::array<int, 4>, 3>& v) {
  ThetaTriple t;
  for (std::size_t b = 0; b < 3; ++b)
    t.spectra[b] = wht_forward(bent_table(kThetaArity, v[b][0], v[b][1], v[b][2], v[b][3]));
  return t;
}

ThetaTriple bent_triple() { return bent_triple({{{1, 2, 3, 4}, {2, 3, 4, 5}, {1, 2, 4, 5}}}); }

ThetaTriple bent_partner_triple() { return bent_triple({{{1, 3, 2, 4}, {2, 4, 3, 5}, {1, 4, 2, 5}}}); }

std::optional<ThetaTriple> normalize(const ThetaTriple& theta) {
  ThetaTriple out;
  for (std::size_t b = 0; b < 3; ++b) {
    const double norm = theta.spectra[b].norm();
    if (!(norm > kDegenerateNorm)) return std::nullopt;
    out.spectra[b] = scaled(theta.spectra[b], 1.0 / norm);
  }
  return out;
}

std::optional<ThetaTriple> mix(const ThetaTriple& a, const ThetaTriple& b, double lambda) {
  ThetaTriple out;
  const double wa = 1.0 - lambda;
  const double wb = lambda;
  for (std::size_t s = 0; s < 3; ++s) {
    require(a.spectra[s].size() == b.spectra[s].size(), "mix: arity mismatch");
    std::vector<double> v(a.spectra[s].size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = wa * a.spectra[s].coeffs()[j] + wb * b.spectra[s].coeffs()[j];
    out.spectra[s] = FourierSpectrum(a.spectra[s].arity(), std::move(v));
  }
  return normalize(out);
}

TurboEncoderParams encoder_of(const ThetaTriple& theta) {
  const int w = theta.spectra[0].arity();
  return TurboEncoderParams(w, {wht_inverse(theta.spectra[0]), wht_inverse(theta.spectra[1]),
                                wht_inverse(theta.spectra[2])});
}

std::vector<double> block_losses(const ThetaTriple& theta, const Interleaver& interleaver,
                                 const LossOptions& options) {
  require(options.blocks >= 1, "loss_of_theta: blocks must be >= 1");
  require(interleaver.size() == options.k, "loss_of_theta: interleaver length mismatch");
  const TurboEncoderParams params = encoder_of(theta);
  const double sigma = snr_db_to_sigma(options.snr_db);
  const std::size_t k = options.k;

  std::vector<double> losses(options.blocks);
  parallel_for(options.blocks, options.threads, [&](std::size_t blk) {
    Rng rng(derive_seed(options.seed, {blk}));
    Bits u(k);
    for (auto& bit : u) bit = rng.bit() ? 1 : 0;
    Codeword rx = encode(params, u, interleaver);
    for (auto& stream : rx.streams)
      for (double& y : stream) y += sigma * rng.normal();
    const SoftPosterior post = turbo_decode(params, interleaver, rx, sigma, options.iterations);
    losses[blk] = bce(u, post.probs);
  });
  return losses;
}

Estimate loss_of_theta(const ThetaTriple& theta, const Interleaver& interleaver, const LossOptions& options) {
  const std::vector<double> losses = block_losses(theta, interleaver, options);
  return mean_and_std_error(losses);
}

std::vector<double> default_lambda_grid() {
  std::vector<double> g(21);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = static_cast<double>(i) / 20.0;
  return g;
}

Interleaver probe_interleaver(std::size_t k, std::uint64_t seed) {
  Rng rng(derive_seed(seed, {kInterleaverTag}));
  return Interleaver::random(k, rng);
}

LineProbeResult line_probe(const ThetaTriple& a, const ThetaTriple& b, const std::vector<double>& lambdas,
                           const LossOptions& options, const std::optional<Interleaver>& interleaver) {
  bool has0 = false, has1 = false;
  for (double l : lambdas) {
    has0 = has0 || l == 0.0;
    has1 = has1 || l == 1.0;
  }
  require(has0 && has1, "line_probe: grid must contain 0 and 1");

  LineProbeResult r;
  r.lambdas = lambdas;
  r.seed = options.seed;
  r.interleaver = interleaver ? *interleaver : probe_interleaver(options.k, options.seed);
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  for (double lambda : lambdas) {
    const auto theta = mix(a, b, lambda);
    if (!theta) {
      r.losses.push_back(nan);
      r.std_errors.push_back(nan);
      r.degenerate.push_back(true);
      continue;
    }
    const Estimate e = loss_of_theta(*theta, r.interleaver, options);
    r.losses.push_back(e.mean);
    r.std_errors.push_back(e.std_error);
    r.degenerate.push_back(false);
  }
  return r;
}

std::string line_probe_to_csv(const LineProbeResult& result) {
  std::ostringstream os;
  os << "lambda,loss,std_error,degenerate_flag\n";
  for (std::size_t i = 0; i < result.lambdas.size(); ++i) {
    os << Num{result.lambdas[i]} << ',';
    if (result.degenerate[i]) os << "nan,nan,1\n";
    else os << Num{result.losses[i]} << ',' << Num{result.std_errors[i]} << ",0\n";
  }
  return os.str();
}

}  // namespace dlecc
