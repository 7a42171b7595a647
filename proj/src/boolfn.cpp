#include "dlecc/boolfn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dlecc/error.hpp"

namespace dlecc {
namespace {

void check_shape(int arity, std::size_t size, const char* what) {
  require(arity >= 1 && arity <= kMaxArity,
          std::string(what) + ": arity must be in [1, " + std::to_string(kMaxArity) + "]");
  require(size == (std::size_t{1} << arity),
          std::string(what) + ": expected 2^arity values, got " + std::to_string(size));
}

void check_finite(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) fail(ErrorKind::InvalidArgument, std::string(what) + ": non-finite value");
}

// Unnormalized Walsh-Hadamard butterfly: v[S] <- sum_x v[x] chi_S(x).
void butterfly(std::vector<double>& v) {
  const std::size_t n = v.size();
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = v[j];
        const double b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
}

unsigned f2(std::uint32_t point, int var) { return (point >> (var - 1)) & 1u; }

}  // namespace

PseudoBooleanTable::PseudoBooleanTable(int arity, std::vector<double> values)
    : arity_(arity), values_(std::move(values)) {
  check_shape(arity_, values_.size(), "PseudoBooleanTable");
  check_finite(values_, "PseudoBooleanTable");
}

PseudoBooleanTable PseudoBooleanTable::from_function(
    int arity, const std::function<double(std::uint32_t)>& f) {
  require(arity >= 1 && arity <= kMaxArity, "PseudoBooleanTable: bad arity");
  std::vector<double> v(std::size_t{1} << arity);
  for (std::uint32_t x = 0; x < v.size(); ++x) v[x] = f(x);
  return PseudoBooleanTable(arity, std::move(v));
}

bool PseudoBooleanTable::is_constant() const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [&](double v) { return v == values_.front(); });
}

FourierSpectrum::FourierSpectrum(int arity, std::vector<double> coeffs)
    : arity_(arity), coeffs_(std::move(coeffs)) {
  check_shape(arity_, coeffs_.size(), "FourierSpectrum");
  check_finite(coeffs_, "FourierSpectrum");
}

double FourierSpectrum::energy() const noexcept {
  return std::inner_product(coeffs_.begin(), coeffs_.end(), coeffs_.begin(), 0.0);
}

double FourierSpectrum::norm() const noexcept { return std::sqrt(energy()); }

FourierSpectrum wht_forward(const PseudoBooleanTable& table) {
  std::vector<double> v(table.values().begin(), table.values().end());
  butterfly(v);
  const double scale = std::ldexp(1.0, -table.arity());
  for (double& x : v) x *= scale;
  return FourierSpectrum(table.arity(), std::move(v));
}

PseudoBooleanTable wht_inverse(const FourierSpectrum& spectrum) {
  std::vector<double> v(spectrum.coeffs().begin(), spectrum.coeffs().end());
  butterfly(v);
  return PseudoBooleanTable(spectrum.arity(), std::move(v));
}

std::vector<EnergyEntry> energy_profile(const FourierSpectrum& spectrum, double threshold_fraction) {
  require(threshold_fraction > 0.0 && threshold_fraction <= 1.0,
          "energy_profile: threshold must lie in (0, 1]");
  const double total = spectrum.energy();
  if (!(total > 0.0)) fail(ErrorKind::Numerical, "degenerate spectrum");

  std::vector<EnergyEntry> entries;
  entries.reserve(spectrum.size());
  for (SubsetMask s = 0; s < spectrum.size(); ++s) entries.push_back({s, spectrum[s] * spectrum[s]});
  std::stable_sort(entries.begin(), entries.end(),
                   [](const EnergyEntry& a, const EnergyEntry& b) { return a.weight > b.weight; });

  // Relative slack absorbs rounding in the running sum, e.g. 0.25 + 0.25 vs 0.5.
  const double target = threshold_fraction * total * (1.0 - 1e-12);
  double cumulative = 0.0;
  std::size_t keep = entries.size();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    cumulative += entries[i].weight;
    if (cumulative >= target) {
      keep = i + 1;
      break;
    }
  }
  entries.resize(keep);
  return entries;
}

PseudoBooleanTable parity_table(int arity, SubsetMask set) {
  require(arity >= 1 && arity <= kMaxArity && set < (SubsetMask{1} << arity),
          "parity_table: mask out of range");
  return PseudoBooleanTable::from_function(arity, [set](std::uint32_t x) { return character(set, x); });
}

PseudoBooleanTable bent_table(int arity, int a, int b, int c, int d) {
  for (int v : {a, b, c, d}) require(v >= 1 && v <= arity, "bent_table: variable out of range");
  return PseudoBooleanTable::from_function(arity, [=](std::uint32_t x) {
    return sign_of_bit((f2(x, a) & f2(x, b)) ^ (f2(x, c) & f2(x, d)));
  });
}

std::map<std::string, PseudoBooleanTable> expression_fixtures() {
  std::map<std::string, PseudoBooleanTable> out;
  auto add = [&](const std::string& name, auto&& expr) {
    out.emplace(name, PseudoBooleanTable::from_function(5, [&](std::uint32_t x) {
                  auto u = [x](int j) { return f2(x, j); };
                  auto nu = [x](int j) { return 1u ^ f2(x, j); };
                  return sign_of_bit(expr(u, nu) & 1u);
                }));
  };

  // Exact expressions.
  add("block1", [](auto u, auto nu) {
    return 1u ^ u(1) ^ nu(2) ^ u(3) ^ nu(4) ^ u(5) ^ (nu(2) & u(3) & nu(4)) ^
           (u(1) & nu(2) & u(3) & nu(4) & u(5));
  });
  add("block2", [](auto u, auto) { return u(1) ^ u(3) ^ u(4) ^ u(5); });
  add("block3", [](auto u, auto nu) { return u(1) ^ u(2) ^ u(4) ^ (nu(3) & nu(5)); });

  // Best affine approximations.
  add("block1_affine", [](auto u, auto) { return 1u ^ u(1) ^ u(2) ^ u(3) ^ u(4) ^ u(5); });
  add("block2_affine", [](auto u, auto) { return u(1) ^ u(3) ^ u(4) ^ u(5); });
  add("block3_affine_1", [](auto u, auto) { return u(1) ^ u(2) ^ u(4); });
  add("block3_affine_2", [](auto u, auto) { return 1u ^ u(1) ^ u(2) ^ u(3) ^ u(4); });
  add("block3_affine_3", [](auto u, auto) { return 1u ^ u(1) ^ u(2) ^ u(4) ^ u(5); });
  add("block3_affine_4", [](auto u, auto) { return 1u ^ u(1) ^ u(2) ^ u(3) ^ u(4) ^ u(5); });

  out.emplace("bent4", bent_table(4, 1, 2, 3, 4));
  out.emplace("majority3", PseudoBooleanTable::from_function(3, [](std::uint32_t x) {
                return std::popcount(x) >= 2 ? -1.0 : 1.0;
              }));
  return out;
}

}  // namespace dlecc
