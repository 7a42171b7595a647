#include "dlecc/goldreich_levin.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <sstream>

#include "dlecc/error.hpp"
#include "csv.hpp"

namespace dlecc {

using detail::Num;

// ---------------------------------------------------------------- BitVector

std::size_t BitVector::count() const noexcept {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::uint32_t BitVector::extract(std::size_t from, int width) const noexcept {
  std::uint32_t out = 0;
  for (int j = 0; j < width; ++j)
    if (test(from + static_cast<std::size_t>(j))) out |= std::uint32_t{1} << j;
  return out;
}

std::string BitVector::to_hex() const {
  static constexpr char digits[] = "0123456789abcdef";
  const std::size_t nibbles = std::max<std::size_t>(1, (size_ + 3) / 4);
  std::string s(nibbles, '0');
  for (std::size_t k = 0; k < nibbles; ++k) {
    unsigned v = 0;
    for (std::size_t b = 0; b < 4; ++b) {
      const std::size_t i = 4 * k + b;
      if (i < size_ && test(i)) v |= 1u << b;
    }
    s[nibbles - 1 - k] = digits[v];
  }
  return s;
}

BitVector BitVector::from_hex(std::size_t size, const std::string& hex) {
  BitVector out(size);
  const std::size_t n = hex.size();
  for (std::size_t k = 0; k < n; ++k) {
    const char c = hex[n - 1 - k];
    unsigned v;
    if (c >= '0' && c <= '9') v = static_cast<unsigned>(c - '0');
    else if (c >= 'a' && c <= 'f') v = static_cast<unsigned>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F') v = static_cast<unsigned>(c - 'A' + 10);
    else fail(ErrorKind::Parse, "BitVector::from_hex: bad digit");
    for (std::size_t b = 0; b < 4; ++b) {
      if (!((v >> b) & 1u)) continue;
      const std::size_t i = 4 * k + b;
      if (i >= size) fail(ErrorKind::Parse, "BitVector::from_hex: value exceeds size");
      out.set(i);
    }
  }
  return out;
}

std::uint64_t BitVector::hash() const noexcept {
  std::uint64_t h = splitmix64(size_);
  for (auto w : words_) h = splitmix64(h ^ w);
  return h;
}

bool operator<(const BitVector& a, const BitVector& b) noexcept {
  if (a.words_.size() != b.words_.size()) return a.words_.size() < b.words_.size();
  for (std::size_t w = a.words_.size(); w-- > 0;)
    if (a.words_[w] != b.words_[w]) return a.words_[w] < b.words_[w];
  return false;
}

// ------------------------------------------------------------ QueryFunction

QueryFunction::QueryFunction(std::size_t arity, Evaluator evaluator)
    : arity_(arity),
      evaluator_(std::move(evaluator)),
      counter_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
  require(arity_ >= 1, "QueryFunction: arity must be positive");
  require(static_cast<bool>(evaluator_), "QueryFunction: empty evaluator");
}

double QueryFunction::operator()(const BitVector& x) const {
  counter_->fetch_add(1, std::memory_order_relaxed);
  return evaluator_(x);
}

QueryFunction embed_table(PseudoBooleanTable table, std::size_t n, std::size_t position) {
  require(position + static_cast<std::size_t>(table.arity()) <= n,
          "embed_table: window does not fit in the input");
  const int w = table.arity();
  return QueryFunction(n, [table = std::move(table), position, w](const BitVector& x) {
    return table[x.extract(position, w)];
  });
}

// ----------------------------------------------------------- estimation

namespace {

struct PrefixMasks {
  std::vector<std::uint64_t> prefix;  // bits [0, k)
  std::vector<std::uint64_t> suffix;  // bits [k, n)
};

PrefixMasks make_masks(std::size_t n, std::size_t k) {
  const std::size_t words = (n + 63) / 64;
  PrefixMasks m{std::vector<std::uint64_t>(words, 0), std::vector<std::uint64_t>(words, 0)};
  for (std::size_t w = 0; w < words; ++w) {
    const std::size_t lo = 64 * w;
    const std::size_t hi = std::min(n, lo + 64);
    std::uint64_t valid = (hi - lo == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << (hi - lo)) - 1);
    std::uint64_t pre = 0;
    if (k >= hi) pre = valid;
    else if (k > lo) pre = (std::uint64_t{1} << (k - lo)) - 1;
    m.prefix[w] = pre;
    m.suffix[w] = valid & ~pre;
  }
  return m;
}

int pattern_parity(const BitVector& pattern, const BitVector& x) {
  unsigned p = 0;
  for (std::size_t w = 0; w < x.word_count(); ++w)
    p ^= static_cast<unsigned>(std::popcount(pattern.word(w) & x.word(w)));
  return (p & 1u) ? -1 : 1;
}

GLResult run_gl(const QueryFunction& f, const GLConfig& cfg) {
  require(cfg.gamma > 0.0 && cfg.gamma <= 1.0, "goldreich_levin: gamma must lie in (0, 1]");
  require(cfg.queries_per_estimate >= 1, "goldreich_levin: queries_per_estimate must be >= 1");
  const std::size_t n = f.arity();
  const double keep = cfg.gamma * cfg.gamma / 2.0;

  struct Live {
    BitVector pattern;
    double weight;
  };
  std::vector<Live> live{{BitVector(n), 1.0}};
  GLResult result;

  for (std::size_t depth = 1; depth <= n && !live.empty(); ++depth) {
    std::vector<Live> next;
    for (const auto& parent : live) {
      for (int a = 0; a < 2; ++a) {
        Bucket child{depth, parent.pattern};
        child.pattern.set(depth - 1, a == 1);
        Rng rng(derive_seed(cfg.seed, {depth, child.pattern.hash()}));
        const double w = estimate_bucket_weight(f, child, cfg.queries_per_estimate, rng);
        result.total_queries += cfg.queries_per_estimate;
        if (w >= keep) next.push_back({std::move(child.pattern), w});
      }
    }
    if (next.size() > cfg.max_buckets)
      fail(ErrorKind::Numerical, "goldreich_levin: bucket limit exceeded (gamma too small)");
    live = std::move(next);
  }

  for (auto& b : live) result.sets.push_back({std::move(b.pattern), b.weight});
  std::sort(result.sets.begin(), result.sets.end(),
            [](const GLSet& a, const GLSet& b) { return a.mask < b.mask; });
  return result;
}

}  // namespace

bool GLResult::same_sets(const GLResult& other) const {
  if (sets.size() != other.sets.size()) return false;
  for (std::size_t i = 0; i < sets.size(); ++i)
    if (!(sets[i].mask == other.sets[i].mask)) return false;
  return true;
}

double estimate_bucket_weight(const QueryFunction& f, const Bucket& bucket,
                              std::uint64_t samples, Rng& rng) {
  require(samples >= 1, "estimate_bucket_weight: need at least one sample");
  const std::size_t n = f.arity();
  require(bucket.fixed <= n && bucket.pattern.size() == n,
          "estimate_bucket_weight: bucket does not match function arity");
  const PrefixMasks masks = make_masks(n, bucket.fixed);
  const std::size_t words = masks.prefix.size();

  BitVector x(n), xp(n);
  double acc = 0.0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (std::size_t w = 0; w < words; ++w) {
      const std::uint64_t z = rng() & masks.suffix[w];
      x.word(w) = (rng() & masks.prefix[w]) | z;
      xp.word(w) = (rng() & masks.prefix[w]) | z;
    }
    const double term = f(x) * f(xp) * pattern_parity(bucket.pattern, x) *
                        pattern_parity(bucket.pattern, xp);
    acc += term;
  }
  return std::clamp(acc / static_cast<double>(samples), 0.0, 1.0);
}

GLResult goldreich_levin(const QueryFunction& f, const GLConfig& cfg) {
  return run_gl(f, cfg);
}

// ------------------------------------------------------------ gamma search

namespace {

struct GammaEval {
  GammaTrial trial;
  GLResult first;
};

std::uint64_t gamma_tag(double gamma) { return std::bit_cast<std::uint64_t>(gamma); }

GammaEval evaluate_gamma(const QueryFunction& f, double gamma, std::size_t runs,
                         std::uint64_t queries, std::uint64_t seed) {
  GammaEval ev{{gamma, true, false, 0}, {}};
  const double keep = gamma * gamma / 2.0;
  for (std::size_t r = 0; r < runs; ++r) {
    GLConfig cfg;
    cfg.gamma = gamma;
    cfg.queries_per_estimate = queries;
    cfg.seed = derive_seed(seed, {gamma_tag(gamma), r});
    GLResult res;
    try {
      res = goldreich_levin(f, cfg);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Numerical) throw;
      ev.trial.stable = false;
      ev.trial.flagged = true;
      continue;
    }
    // Re-estimate every returned set with a fresh stream.
    for (std::size_t i = 0; i < res.sets.size(); ++i) {
      Rng rng(derive_seed(seed, {gamma_tag(gamma), r, 0x5EE57ULL, i}));
      const double w = estimate_bucket_weight(f, Bucket{f.arity(), res.sets[i].mask}, queries, rng);
      if (w < keep) ev.trial.flagged = true;
    }
    if (r == 0) {
      ev.first = res;
      ev.trial.sets = res.sets.size();
    } else if (!res.same_sets(ev.first)) {
      ev.trial.stable = false;
    }
  }
  if (ev.first.sets.empty()) ev.trial.stable = false;
  ev.first.stable = ev.trial.stable;
  return ev;
}

}  // namespace

GammaSearchResult gamma_search(const QueryFunction& f, std::size_t runs_per_gamma,
                               std::uint64_t queries, const GammaSearchOptions& options) {
  require(runs_per_gamma >= 2, "gamma_search: runs_per_gamma must be >= 2");
  require(options.floor > 0.0 && options.floor < 0.5, "gamma_search: floor must lie in (0, 0.5)");
  require(options.resolution > 0.0, "gamma_search: resolution must be positive");
  GammaSearchResult out{0.0, {}, {}};

  for (double gamma : {0.9, 0.75, 0.5}) {
    GammaEval ev = evaluate_gamma(f, gamma, runs_per_gamma, queries, options.seed);
    out.trials.push_back(ev.trial);
    if (ev.trial.stable && !ev.trial.flagged && ev.first.sets.size() == 1) {
      out.gamma = gamma;
      out.result = std::move(ev.first);
      return out;
    }
  }

  double lo = 0.0, hi = 0.5;
  bool found = false;
  while (hi - lo > options.resolution) {
    const double mid = 0.5 * (lo + hi);
    if (mid < options.floor) break;
    GammaEval ev = evaluate_gamma(f, mid, runs_per_gamma, queries, options.seed);
    out.trials.push_back(ev.trial);
    if (ev.trial.flagged) {
      lo = mid;
    } else if (ev.trial.stable) {
      found = true;
      out.gamma = mid;
      out.result = std::move(ev.first);
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (!found) fail(ErrorKind::Numerical, "no stable threshold found");
  return out;
}

std::vector<SweepRecord> query_convergence_sweep(const QueryFunction& f, double gamma,
                                                 const std::vector<std::uint64_t>& query_grid,
                                                 std::size_t runs, std::uint64_t seed) {
  require(!query_grid.empty(), "query_convergence_sweep: empty query grid");
  require(std::is_sorted(query_grid.begin(), query_grid.end()),
          "query_convergence_sweep: query grid must be ascending");
  std::vector<SweepRecord> out;
  for (std::uint64_t q : query_grid) {
    for (std::size_t r = 0; r < runs; ++r) {
      GLConfig cfg;
      cfg.gamma = gamma;
      cfg.queries_per_estimate = q;
      cfg.seed = derive_seed(seed, {q, r});
      GLResult res;
      try {
        res = goldreich_levin(f, cfg);
      } catch (const Error& e) {
        // An exploding candidate list is recorded as an empty output.
        if (e.kind() != ErrorKind::Numerical) throw;
      }
      out.push_back({q, r, gamma, std::move(res)});
    }
  }
  return out;
}

std::string sweep_to_csv(const std::vector<SweepRecord>& records) {
  std::ostringstream os;
  os << "queries,run,gamma,set_mask,weight\n";
  for (const auto& rec : records) {
    if (rec.result.sets.empty()) {
      os << rec.queries << ',' << rec.run << ',' << Num{rec.gamma} << ",,\n";
      continue;
    }
    for (const auto& s : rec.result.sets)
      os << rec.queries << ',' << rec.run << ',' << Num{rec.gamma} << ',' << s.mask.to_hex() << ','
         << Num{s.weight} << '\n';
  }
  return os.str();
}

}  // namespace dlecc
