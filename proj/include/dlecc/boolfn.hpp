#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace dlecc {

/**
 * Sign convention used everywhere in the library:
 *
 *   F2 bit 0  <->  +1
 *   F2 bit 1  <->  -1
 *
 * A point of the hypercube {+-1}^w is stored as a w-bit index; bit i holds
 * variable x_{i+1}. A subset S of [w] is stored the same way (bit i set iff
 * x_{i+1} is in S), so chi_S(x) = (-1)^popcount(S & x).
 */
using SubsetMask = std::uint32_t;

inline constexpr int kMaxArity = 24;

constexpr double sign_of_bit(unsigned bit) noexcept { return bit ? -1.0 : 1.0; }

constexpr double character(SubsetMask set, std::uint32_t point) noexcept {
  return (std::popcount(set & point) & 1) ? -1.0 : 1.0;
}

/// A function {+-1}^w -> R as its 2^w values.
class PseudoBooleanTable {
 public:
  PseudoBooleanTable() = default;
  PseudoBooleanTable(int arity, std::vector<double> values);

  static PseudoBooleanTable from_function(int arity,
                                          const std::function<double(std::uint32_t)>& f);

  int arity() const noexcept { return arity_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::uint32_t point) const noexcept { return values_[point]; }

  bool is_constant() const noexcept;

  friend bool operator==(const PseudoBooleanTable&, const PseudoBooleanTable&) = default;

 private:
  int arity_ = 0;
  std::vector<double> values_;
};

/// Fourier coefficients f^(S), indexed by subset mask.
class FourierSpectrum {
 public:
  FourierSpectrum() = default;
  FourierSpectrum(int arity, std::vector<double> coeffs);

  int arity() const noexcept { return arity_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  double operator[](SubsetMask s) const noexcept { return coeffs_[s]; }

  /// Sum of squared coefficients.
  double energy() const noexcept;
  /// Euclidean norm of the coefficient vector.
  double norm() const noexcept;

  friend bool operator==(const FourierSpectrum&, const FourierSpectrum&) = default;

 private:
  int arity_ = 0;
  std::vector<double> coeffs_;
};

/// coeffs[S] = 2^-w sum_x f(x) chi_S(x), via the in-place butterfly.
FourierSpectrum wht_forward(const PseudoBooleanTable& table);
/// table[x] = sum_S coeffs[S] chi_S(x).
PseudoBooleanTable wht_inverse(const FourierSpectrum& spectrum);

struct EnergyEntry {
  SubsetMask mask;
  double weight;  // f^(S)^2

  friend bool operator==(const EnergyEntry&, const EnergyEntry&) = default;
};

/// Smallest prefix of coefficients, by descending weight (ties: ascending
/// mask), whose cumulative weight reaches threshold_fraction of the total.
std::vector<EnergyEntry> energy_profile(const FourierSpectrum& spectrum, double threshold_fraction);

/// chi_S as a +-1 table.
PseudoBooleanTable parity_table(int arity, SubsetMask set);

/// The bent function x_a x_b XOR x_c x_d (1-based variables) as a +-1 table.
PseudoBooleanTable bent_table(int arity, int a, int b, int c, int d);

/**
 * Exact and affine expressions of the TurboAE-binary non-boundary encoder
 * bits, as +-1 tables on 5 variables in table order: variable j of the table
 * is u_j (u_1 = x_{i+2}, ..., u_5 = x_{i-2}).
 *
 * Names: block1, block2, block3 (exact), block1_affine, block2_affine,
 * block3_affine_1 .. block3_affine_4, plus bent4 (x1x2 XOR x3x4 on 4
 * variables) and majority3.
 */
std::map<std::string, PseudoBooleanTable> expression_fixtures();

}  // namespace dlecc
