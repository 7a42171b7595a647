#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dlecc/boolfn.hpp"
#include "dlecc/rng.hpp"

namespace dlecc {

/// Fixed-length packed bit string. Used both for hypercube points (bit set
/// means x_i = -1) and for subsets of [n] (bit set means i in S).
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  std::size_t size() const noexcept { return size_; }
  std::size_t word_count() const noexcept { return words_.size(); }
  std::uint64_t word(std::size_t w) const noexcept { return words_[w]; }
  std::uint64_t& word(std::size_t w) noexcept { return words_[w]; }

  bool test(std::size_t i) const noexcept { return (words_[i / 64] >> (i % 64)) & 1u; }
  void set(std::size_t i, bool v = true) noexcept {
    const std::uint64_t m = std::uint64_t{1} << (i % 64);
    words_[i / 64] = v ? (words_[i / 64] | m) : (words_[i / 64] & ~m);
  }
  std::size_t count() const noexcept;

  /// Extracts `width` (<= 32) bits starting at position `from`.
  std::uint32_t extract(std::size_t from, int width) const noexcept;

  /// Lowercase hex, most significant nibble first, ceil(size/4) digits.
  std::string to_hex() const;
  static BitVector from_hex(std::size_t size, const std::string& hex);

  std::uint64_t hash() const noexcept;

  friend bool operator==(const BitVector&, const BitVector&) = default;
  /// Orders as unsigned integers (bit 0 least significant).
  friend bool operator<(const BitVector& a, const BitVector& b) noexcept;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Query access to a function {+-1}^n -> {+-1}, counting evaluations.
class QueryFunction {
 public:
  using Evaluator = std::function<double(const BitVector&)>;

  QueryFunction(std::size_t arity, Evaluator evaluator);

  std::size_t arity() const noexcept { return arity_; }
  double operator()(const BitVector& x) const;
  std::uint64_t queries() const noexcept { return counter_->load(std::memory_order_relaxed); }

 private:
  std::size_t arity_;
  Evaluator evaluator_;
  std::shared_ptr<std::atomic<std::uint64_t>> counter_;
};

/// Table variable j reads coordinate position + j - 1 of the n-bit input.
QueryFunction embed_table(PseudoBooleanTable table, std::size_t n, std::size_t position);

/**
 * Probes an external program over its standard streams. Each query writes one
 * line "s_1,...,s_n\n" with s_i in {1,-1} and reads back one line holding the
 * +-1 output. The child is started with /bin/sh -c command and terminated
 * when the last copy of the QueryFunction is destroyed.
 */
QueryFunction process_query(const std::string& command, std::size_t n);

struct Bucket {
  std::size_t fixed = 0;  // number of leading coordinates whose membership is decided
  BitVector pattern;      // membership of coordinates [0, fixed)
};

struct GLConfig {
  double gamma = 0.5;
  /// Recorded with results; the estimator accuracy is governed by
  /// queries_per_estimate rather than derived from delta.
  double delta = 0.1;
  std::uint64_t queries_per_estimate = 800;
  std::uint64_t seed = 0;
  /// More surviving buckets than this at any depth is Error(Numerical).
  std::size_t max_buckets = std::size_t{1} << 14;
};

struct GLSet {
  BitVector mask;
  double weight;

  friend bool operator==(const GLSet&, const GLSet&) = default;
};

struct GLResult {
  std::vector<GLSet> sets;  // ascending by mask
  std::uint64_t total_queries = 0;
  bool stable = false;

  bool same_sets(const GLResult& other) const;
};

/**
 * Unbiased estimate of W(B) = sum_{S consistent with B} f^(S)^2 from
 * `samples` pair samples: draw the free suffix z and two prefixes x, x' and
 * average f(x,z) f(x',z) chi_a(x) chi_a(x'). Each sample costs two
 * evaluations of f. The result is clamped to [0, 1].
 */
double estimate_bucket_weight(const QueryFunction& f, const Bucket& bucket,
                              std::uint64_t samples, Rng& rng);

/// Split-and-prune search for every S with |f^(S)| >= gamma. Coordinates are
/// split in order 0..n-1; each child estimate uses the stream
/// derive_seed(seed, {depth, pattern hash}). total_queries counts pair
/// samples: queries_per_estimate times the number of estimates.
GLResult goldreich_levin(const QueryFunction& f, const GLConfig& cfg);

struct GammaTrial {
  double gamma;
  bool stable;
  bool flagged;  // some re-estimated weight fell below gamma^2 / 2
  std::size_t sets;
};

struct GammaSearchResult {
  double gamma;
  GLResult result;
  std::vector<GammaTrial> trials;
};

struct GammaSearchOptions {
  std::uint64_t seed = 0;
  double floor = 0.05;
  /// Binary search stops once the bracket is at most this wide.
  double resolution = 1.0 / 16.0;
};

/**
 * Threshold heuristic: gamma in {0.9, 0.75, 0.5} is accepted when every run
 * returns the same single set (at most one coefficient can exceed 1/2 in
 * magnitude). Otherwise bisect (floor, 0.5): identical non-empty outputs
 * move the lower end up and are remembered; flagged outputs mean
 * gamma is too small; empty or shrinking outputs mean gamma is too large.
 * Throws Error(Numerical, "no stable threshold found") when nothing is stable.
 */
GammaSearchResult gamma_search(const QueryFunction& f, std::size_t runs_per_gamma,
                               std::uint64_t queries, const GammaSearchOptions& options = {});

struct SweepRecord {
  std::uint64_t queries;
  std::size_t run;
  double gamma;
  GLResult result;
};

std::vector<SweepRecord> query_convergence_sweep(const QueryFunction& f, double gamma,
                                                 const std::vector<std::uint64_t>& query_grid,
                                                 std::size_t runs, std::uint64_t seed);

/// Columns: queries,run,gamma,set_mask,weight. An empty output list is one
/// row with blank set_mask and weight.
std::string sweep_to_csv(const std::vector<SweepRecord>& records);

}  // namespace dlecc
