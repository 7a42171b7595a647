// One PASS/FAIL line per acceptance criterion. With --digest, prints only the
// digests of the seeded results, which the determinism check compares against
// a second execution of this binary.
#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dlecc/boolfn.hpp"
#include "dlecc/channel.hpp"
#include "dlecc/codec.hpp"
#include "dlecc/goldreich_levin.hpp"
#include "dlecc/landscape.hpp"
#include "dlecc/metrics.hpp"
#include "dlecc/train.hpp"

using namespace dlecc;

namespace {

// FNV-1a over the bytes of everything fed in.
class Digest {
 public:
  void add(const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) h_ = (h_ ^ b[i]) * 0x100000001B3ULL;
  }
  void add(double x) { add(&x, sizeof x); }
  void add(std::uint64_t x) { add(&x, sizeof x); }
  void add(const std::vector<double>& v) {
    for (double x : v) add(x);
  }
  void add(const GLResult& r) {
    add(static_cast<std::uint64_t>(r.sets.size()));
    for (const auto& s : r.sets) {
      for (std::size_t w = 0; w < s.mask.word_count(); ++w) add(s.mask.word(w));
      add(s.weight);
    }
    add(r.total_queries);
  }
  void add(const TurboEncoderParams& p) {
    for (const auto& t : p.tables()) add(std::vector<double>(t.values().begin(), t.values().end()));
  }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
    return buf;
  }

 private:
  std::uint64_t h_ = 0xCBF29CE484222325ULL;
};

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  std::string name;
  std::function<Outcome(Digest&)> run;
};

std::string fmt(double x, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << x;
  return os.str();
}

double pooled(double a, double b) { return std::sqrt(a * a + b * b); }

PseudoBooleanTable normal_table(int w, Rng& rng) {
  std::vector<double> v(std::size_t{1} << w);
  for (double& x : v) x = rng.normal();
  return PseudoBooleanTable(w, std::move(v));
}

TurboEncoderParams normal_params(int w, Rng& rng) {
  return TurboEncoderParams(w, {normal_table(w, rng), normal_table(w, rng), normal_table(w, rng)});
}

Bits random_bits(std::size_t k, Rng& rng) {
  Bits u(k);
  for (auto& b : u) b = rng.bit() ? 1 : 0;
  return u;
}

// ------------------------------------------------------------------ bounds

Outcome counterexample(Digest& d) {
  const auto rep = counterexample_sweep();
  const double bers[] = {0.4, 0.5, 0.40275, 0.4, 0.403, 0.40275};
  const double bces[] = {0.9694, 1.0, 0.9433, 0.9694, 0.9494, 0.9433};
  double worst = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    worst = std::max({worst, std::abs(rep.rows[i].ber - bers[i]), std::abs(rep.rows[i].bce - bces[i])});
    d.add(rep.rows[i].ber);
    d.add(rep.rows[i].bce);
  }
  const bool sets = rep.ber_argmin == std::vector<std::size_t>{0, 3} && rep.bce_argmin == std::vector<std::size_t>{2, 5};
  return {rep.rows.size() == 6 && worst <= 1e-3 && sets && rep.disjoint,
          "max deviation " + fmt(worst) + ", BER-min {[1,2],[2,3]}, BCE-min {[1,4],[3,4]}, disjoint=" +
              (rep.disjoint ? "yes" : "no")};
}

Outcome tightness(Digest& d) {
  double up = 0, lo = 0;
  for (const auto& r : tightness_sweep(50)) {
    up = std::max(up, r.upper_gap);
    lo = std::max(lo, r.lower_gap);
    d.add(r.upper_bce);
    d.add(r.lower_bce);
  }
  return {up <= 1e-12 && lo <= 1e-12, "max |C-H2(B)| " + fmt(up) + ", max |C-2B| " + fmt(lo)};
}

Outcome two_sided(Digest& d) {
  Rng rng(derive_seed(2024, {1}));
  int ok = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t inputs = 2 + rng.below(5), outputs = 2 + rng.below(7);
    std::vector<std::vector<double>> m(outputs, std::vector<double>(inputs));
    for (std::size_t j = 0; j < inputs; ++j) {
      double s = 0;
      for (std::size_t i = 0; i < outputs; ++i) s += (m[i][j] = rng.uniform() < 0.25 ? 0.0 : rng.uniform());
      if (s == 0) m[0][j] = s = 1;
      for (std::size_t i = 0; i < outputs; ++i) m[i][j] /= s;
    }
    const DiscreteChannel ch(m, 1e-9);
    const std::size_t a = rng.below(inputs);
    std::size_t b = rng.below(inputs - 1);
    if (b >= a) ++b;
    const auto e = exact_discrete_bce_ber({a, b}, ch);
    d.add(e.bce);
    ok += check_two_sided_bound(e.bce, e.ber, 1e-12);
  }
  return {ok == 1000, std::to_string(ok) + "/1000 instances satisfy 2B <= C <= H2(B)"};
}

// ----------------------------------------------------------- goldreich-levin

std::set<std::string> masks_of(const GLResult& r) {
  std::set<std::string> s;
  for (const auto& x : r.sets) s.insert(x.mask.to_hex());
  return s;
}

std::set<std::string> expected_sets(std::initializer_list<SubsetMask> small) {
  std::set<std::string> s;
  for (SubsetMask m : small) {
    BitVector b(100);
    for (int i = 0; i < 5; ++i)
      if ((m >> i) & 1u) b.set(i);
    s.insert(b.to_hex());
  }
  return s;
}

Outcome gl_fixtures(Digest& d) {
  const auto fx = expression_fixtures();
  const auto f2 = embed_table(fx.at("block2"), 100, 0);
  const auto f3 = embed_table(fx.at("block3"), 100, 0);
  const auto want2 = expected_sets({0b11101});
  const auto want3 = expected_sets({0b01011, 0b01111, 0b11011, 0b11111});
  int ok2 = 0, ok3 = 0;
  for (std::uint64_t r = 0; r < 100; ++r) {
    const auto a = goldreich_levin(f2, {.gamma = 0.9, .queries_per_estimate = 800, .seed = r});
    const auto b = goldreich_levin(f3, {.gamma = 0.45, .queries_per_estimate = 800, .seed = r});
    ok2 += masks_of(a) == want2;
    ok3 += masks_of(b) == want3;
    d.add(a);
    d.add(b);
  }
  return {ok2 >= 95 && ok3 >= 90,
          "block2 exact " + std::to_string(ok2) + "/100, block3 exact " + std::to_string(ok3) + "/100"};
}

Outcome gl_sweep(Digest& d) {
  const auto f3 = embed_table(expression_fixtures().at("block3"), 100, 0);
  const auto want = expected_sets({0b01011, 0b01111, 0b11011, 0b11111});
  const auto records = query_convergence_sweep(f3, 0.45, {10, 25, 800}, 10, 7);
  std::map<std::uint64_t, int> unresolved;
  std::map<std::uint64_t, std::set<std::set<std::string>>> distinct;
  for (const auto& r : records) {
    d.add(r.result);
    const auto got = masks_of(r.result);
    unresolved[r.queries] += got != want;
    distinct[r.queries].insert(got);
  }
  const bool small = unresolved[10] > 5 && unresolved[25] > 5;
  const bool big = unresolved[800] == 0 && distinct[800].size() == 1;
  return {small && big, "empty or wrong lists: budget 10 " + std::to_string(unresolved[10]) + "/10, budget 25 " +
                            std::to_string(unresolved[25]) + "/10, budget 800 " + std::to_string(unresolved[800]) +
                            "/10"};
}

// ------------------------------------------------------------------- codec

Outcome bcjr_vs_brute(Digest& d) {
  Rng rng(derive_seed(2024, {2}));
  double worst = 0;
  int cases = 0;
  for (int w = 1; w <= 4; ++w)
    for (std::size_t k = 1; k <= 10; ++k)
      for (int draw = 0; draw < 100; ++draw) {
        const std::size_t outputs = 1 + draw % 2;
        std::vector<PseudoBooleanTable> tables;
        for (std::size_t o = 0; o < outputs; ++o) tables.push_back(normal_table(w, rng));
        const Trellis tr(w, tables);
        const auto book = trellis_codebook(tr, k);
        const double sigma = 0.3 + 1.5 * rng.uniform();
        std::vector<double> prior(k);
        for (double& l : prior) l = draw % 3 == 0 ? 0.0 : rng.normal();
        const std::size_t c = rng.below(book.size());
        std::vector<double> y(book.n());
        for (std::size_t j = 0; j < y.size(); ++j) y[j] = book.word(c)[j] + sigma * rng.normal();
        std::vector<std::span<const double>> streams;
        for (std::size_t o = 0; o < outputs; ++o) streams.emplace_back(y.data() + o * k, k);
        const auto b = bcjr_constituent(tr, streams, prior, sigma);
        const auto ref = brute_force_map(book, y, sigma, prior);
        for (std::size_t i = 0; i < k; ++i) {
          const double p = llr_to_prob(b.posterior_llr[i]);
          worst = std::max(worst, std::abs(p - ref.probs[i]));
          d.add(p);
        }
        ++cases;
      }
  return {worst <= 1e-9, std::to_string(cases) + " cases, max |P_bcjr - P_map| " + fmt(worst)};
}

Outcome power(Digest& d) {
  Rng rng(derive_seed(2024, {3}));
  double worst_analytic = 0, worst_z = 0;
  int ok = 0, total = 0;
  for (int g = 0; g < 20; ++g) {
    const auto raw = normal_params(5, rng);
    for (std::size_t k : {16u, 100u}) {
      const auto p = constrain_power(raw, k);
      const double a = analytic_power(p, k);
      const auto pi = Interleaver::random(k, rng);
      const int n = 100000;
      double s = 0, s2 = 0;
      for (int i = 0; i < n; ++i) {
        const auto cw = encode(p, random_bits(k, rng), pi);
        double e = 0;
        for (const auto& st : cw.streams)
          for (double v : st) e += v * v;
        e /= 3.0 * static_cast<double>(k);
        s += e;
        s2 += e * e;
      }
      const double mean = s / n;
      const double se = std::sqrt((s2 / n - mean * mean) / (n - 1));
      const double z = std::abs(mean - a) / se;
      worst_analytic = std::max(worst_analytic, std::abs(a - 1.0));
      worst_z = std::max(worst_z, z);
      ok += std::abs(a - 1.0) <= 1e-9 && z <= 4.0;
      ++total;
      d.add(a);
      d.add(mean);
    }
  }
  return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " pass, max |P-1| " + fmt(worst_analytic) +
                           ", max |MC-P|/SE " + fmt(worst_z, 3)};
}

// ------------------------------------------------------------------- train

Outcome gradient(Digest& d) {
  Rng rng(derive_seed(2024, {4}));
  const std::size_t k = 8;
  const int w = 3;
  const double sigma = snr_db_to_sigma(1.0);
  const double h = 1e-5;
  double worst = 0;
  for (int inst = 0; inst < 10; ++inst) {
    const auto p = constrain_power(normal_params(w, rng), k);
    const auto pi = Interleaver::random(k, rng);
    std::vector<Sample> batch;
    for (int b = 0; b < 8; ++b) batch.push_back(draw_sample(k, rng));
    const auto lg = entropy_loss_and_gradient(p, pi, batch, sigma);
    for (std::size_t s = 0; s < 3; ++s)
      for (std::size_t j = 0; j < (std::size_t{1} << w); ++j) {
        auto shifted = [&](double delta) {
          auto t = p.tables();
          std::vector<double> v(t[s].values().begin(), t[s].values().end());
          v[j] += delta;
          t[s] = PseudoBooleanTable(w, v);
          return entropy_loss_and_gradient(TurboEncoderParams(w, t), pi, batch, sigma).loss;
        };
        const double fd = (shifted(h) - shifted(-h)) / (2 * h);
        const double g = lg.gradient[s][j];
        worst = std::max(worst, std::abs(g - fd) / std::max({std::abs(fd), std::abs(g), 1e-12}));
        d.add(g);
      }
  }
  return {worst <= 1e-4, "10 instances at k=8, max relative error " + fmt(worst, 3)};
}

// --------------------------------------------------------------- landscape

std::array<SubsetMask, 3> random_parity_masks(Rng& rng) {
  std::array<SubsetMask, 3> m;
  for (auto& x : m) x = 0b10000u | static_cast<SubsetMask>(rng.below(16));
  return m;
}

Outcome landscape(Digest& d) {
  LossOptions o;  // k = 10, 1 dB, 10^4 blocks, 6 iterations
  std::ostringstream detail;
  bool pass = true;
  for (std::uint64_t s = 1; s <= 3; ++s) {
    Rng rng(derive_seed(s, {0x70616972ULL}));
    const auto ma = random_parity_masks(rng);
    auto mb = random_parity_masks(rng);
    while (mb == ma) mb = random_parity_masks(rng);
    o.seed = s;
    const auto r = line_probe(parity_triple(ma), parity_triple(mb), {0.0, 0.1, 0.9, 1.0}, o);
    d.add(r.losses);
    const double left = (r.losses[1] - r.losses[0]) / pooled(r.std_errors[1], r.std_errors[0]);
    const double right = (r.losses[2] - r.losses[3]) / pooled(r.std_errors[2], r.std_errors[3]);
    pass = pass && left >= 3.0 && right >= 3.0;
    detail << "pair " << s << " rise " << fmt(left, 3) << "/" << fmt(right, 3) << " SE; ";
  }
  o.seed = 4;
  const auto grid = default_lambda_grid();
  const auto r = line_probe(bent_triple(), bent_partner_triple(), {grid[0], grid[1], grid.back()}, o);
  d.add(r.losses);
  const bool bent = r.losses[1] < r.losses[0];
  detail << "bent L(0)=" << fmt(r.losses[0]) << " L(0.05)=" << fmt(r.losses[1]);
  return {pass && bent, detail.str()};
}

// Training runs are shared by the descent and evaluation criteria.
struct TrainedRun {
  TrainResult result;
  TurboEncoderParams initial;
  Estimate h0, h200, h_final;
};

std::vector<TrainedRun>& trained_runs() {
  static std::vector<TrainedRun> runs = [] {
    std::vector<TrainedRun> out;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      TrainConfig cfg;
      cfg.k_enc = 12;
      cfg.seed = seed;
      TrainedRun run;
      run.result = train_encoder(cfg);
      auto params_at = [&](std::size_t step) {
        for (const auto& s : run.result.trace.snapshots)
          if (s.step == step)
            return TurboEncoderParams(cfg.window, {wht_inverse(s.spectra[0]), wht_inverse(s.spectra[1]),
                                                   wht_inverse(s.spectra[2])});
        return run.result.params;
      };
      run.initial = params_at(0);
      const std::uint64_t eval_seed = derive_seed(seed, {0x686F6C64ULL});
      run.h0 = conditional_entropy(run.initial, 12, cfg.snr_db, 4000, eval_seed);
      run.h200 = conditional_entropy(params_at(200), 12, cfg.snr_db, 4000, eval_seed);
      run.h_final = conditional_entropy(run.result.params, 12, cfg.snr_db, 4000, eval_seed);
      out.push_back(std::move(run));
    }
    return out;
  }();
  return runs;
}

std::size_t coefficients_for_95(const PseudoBooleanTable& t) {
  return energy_profile(wht_forward(t), 0.95).size();
}

Outcome training(Digest& d) {
  std::ostringstream detail;
  bool descent = true;
  int concentrated = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& r = trained_runs()[i];
    d.add(r.result.params);
    d.add(r.h_final.mean);
    const double drop = (r.h0.mean - r.h_final.mean) / pooled(r.h0.std_error, r.h_final.std_error);
    const double early = (r.h0.mean - r.h200.mean) / pooled(r.h0.std_error, r.h200.std_error);
    descent = descent && !r.result.aborted && drop >= 3.0 && early >= 3.0;
    std::size_t worst = 0;
    for (const auto& t : r.result.params.tables()) worst = std::max(worst, coefficients_for_95(t));
    concentrated += worst <= 8;
    detail << "seed " << i + 1 << " H " << fmt(r.h0.mean) << "->" << fmt(r.h200.mean) << "->"
           << fmt(r.h_final.mean) << " (" << fmt(drop, 3) << " SE), 95% in <=" << worst << "; ";
  }
  detail << "concentrated " << concentrated << "/3";
  return {descent && concentrated >= 2, detail.str()};
}

Outcome end_to_end(Digest& d) {
  EvalOptions o;
  o.snr_grid = {0.0, 1.0, 2.0};
  o.seed = 5;
  const auto rep = evaluate_trained(trained_runs()[0].result.params, o);
  bool pass = true;
  std::ostringstream detail;
  for (const auto& row : rep.rows) {
    d.add(row.ber);
    d.add(row.bce);
    pass = pass && row.ber < row.uncoded_ber;
    if (detail.tellp() > 0) detail << "; ";
    detail << fmt(row.snr_db, 2) << " dB BER " << fmt(row.ber) << " vs uncoded " << fmt(row.uncoded_ber);
  }
  return {pass, detail.str()};
}

std::vector<Criterion> criteria() {
  return {
      {"counterexample table", counterexample},
      {"bound tightness", tightness},
      {"two-sided bound", two_sided},
      {"goldreich-levin fixtures", gl_fixtures},
      {"goldreich-levin query sweep", gl_sweep},
      {"bcjr equals brute-force map", bcjr_vs_brute},
      {"power constraint", power},
      {"gradient check", gradient},
      {"landscape", landscape},
      {"training descent", training},
      {"end-to-end evaluation", end_to_end},
  };
}

std::string run_self_for_digests(const char* self) {
  const std::string cmd = std::string(self) + " --digest";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {};
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int status = pclose(p);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return {};
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const bool digest_only = argc > 1 && std::strcmp(argv[1], "--digest") == 0;
  std::ostringstream digests;
  int failed = 0;
  for (const auto& c : criteria()) {
    Digest d;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(d);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    digests << c.name << ' ' << d.hex() << '\n';
    if (digest_only) continue;
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << c.name << "  [" << o.detail << "] (" << fmt(secs, 3)
              << " s)" << std::endl;
  }
  if (digest_only) {
    std::cout << digests.str();
    return 0;
  }
  const std::string second = run_self_for_digests(std::filesystem::read_symlink("/proc/self/exe").c_str());
  const bool same = second == digests.str();
  failed += !same;
  std::cout << (same ? "PASS" : "FAIL") << "  determinism  [digests of " << criteria().size()
            << " seeded criteria " << (same ? "match" : "differ") << " across two executions]" << std::endl;
  std::cout << failed << " criterion(s) failed" << std::endl;
  return failed == 0 ? 0 : 1;
}
