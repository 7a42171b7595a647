#include <doctest.h>

#include <cmath>

#include "dlecc/boolfn.hpp"
#include "dlecc/rng.hpp"

using namespace dlecc;

namespace {

// Direct O(4^w) definition of the coefficients.
std::vector<double> naive_spectrum(const PseudoBooleanTable& f) {
  const std::size_t n = f.size();
  std::vector<double> c(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t x = 0; x < n; ++x) {
      const int parity = std::popcount(static_cast<unsigned>(s & x)) & 1;
      c[s] += f[static_cast<std::uint32_t>(x)] * (parity ? -1.0 : 1.0);
    }
    c[s] /= static_cast<double>(n);
  }
  return c;
}

PseudoBooleanTable random_table(int w, Rng& rng) {
  std::vector<double> v(std::size_t{1} << w);
  for (double& x : v) x = rng.normal();
  return PseudoBooleanTable(w, std::move(v));
}

// x_i as a sign, 1-based.
double var(std::uint32_t x, int i) { return ((x >> (i - 1)) & 1u) ? -1.0 : 1.0; }

}  // namespace

TEST_SUITE("boolfn") {
  TEST_CASE("table validation") {
    CHECK_THROWS(PseudoBooleanTable(3, std::vector<double>(7, 0.0)));
    CHECK_THROWS(PseudoBooleanTable(1, {1.0, NAN}));
    CHECK_THROWS(FourierSpectrum(2, {0.0, 1.0, INFINITY, 0.0}));
    CHECK_THROWS(PseudoBooleanTable(0, {2.0}));
  }

  TEST_CASE("constant function has only the empty coefficient") {
    const auto s = wht_forward(PseudoBooleanTable(3, std::vector<double>(8, 1.0)));
    CHECK(s[0] == doctest::Approx(1.0));
    for (SubsetMask m = 1; m < 8; ++m) CHECK(s[m] == 0.0);
  }

  TEST_CASE("parity is its own spectrum") {
    const auto s = wht_forward(parity_table(2, 0b11));
    CHECK(s[0b11] == 1.0);
    CHECK(s[0] == 0.0);
    CHECK(s[1] == 0.0);
    CHECK(s[2] == 0.0);
  }

  TEST_CASE("majority on three variables") {
    const auto maj = PseudoBooleanTable::from_function(3, [](std::uint32_t x) {
      const double s = var(x, 1) + var(x, 2) + var(x, 3);
      return s > 0 ? 1.0 : -1.0;
    });
    const auto s = wht_forward(maj);
    const auto oracle = naive_spectrum(maj);
    for (SubsetMask m = 0; m < 8; ++m) CHECK(s[m] == doctest::Approx(oracle[m]).epsilon(1e-12));
    CHECK(s[0b001] == doctest::Approx(0.5));
    CHECK(s[0b010] == doctest::Approx(0.5));
    CHECK(s[0b100] == doctest::Approx(0.5));
    CHECK(s[0b111] == doctest::Approx(-0.5));
    CHECK(s[0b011] == doctest::Approx(0.0));
    CHECK(expression_fixtures().at("majority3") == maj);
  }

  TEST_CASE("bent function has flat spectrum of magnitude 1/4") {
    const auto s = wht_forward(bent_table(4, 1, 2, 3, 4));
    for (SubsetMask m = 0; m < 16; ++m) CHECK(std::abs(s[m]) == doctest::Approx(0.25));
    const auto oracle = PseudoBooleanTable::from_function(4, [](std::uint32_t x) {
      const unsigned b = ((x & 1u) & ((x >> 1) & 1u)) ^ (((x >> 2) & 1u) & ((x >> 3) & 1u));
      return b ? -1.0 : 1.0;
    });
    CHECK(bent_table(4, 1, 2, 3, 4) == oracle);
  }

  TEST_CASE("fast transform matches the definition for random tables") {
    Rng rng(1);
    for (int w = 1; w <= 8; ++w) {
      const auto f = random_table(w, rng);
      const auto fast = wht_forward(f);
      const auto slow = naive_spectrum(f);
      for (std::size_t m = 0; m < slow.size(); ++m)
        CHECK(fast.coeffs()[m] == doctest::Approx(slow[m]).epsilon(1e-12).scale(1.0));
    }
  }

  TEST_CASE("involution and Parseval") {
    Rng rng(2);
    for (int w : {1, 3, 5, 9, 12}) {
      const auto f = random_table(w, rng);
      const auto s = wht_forward(f);
      const auto back = wht_inverse(s);
      double energy = 0;
      for (std::size_t x = 0; x < f.size(); ++x) {
        CHECK(std::abs(back.values()[x] - f.values()[x]) < 1e-12);
        energy += f.values()[x] * f.values()[x];
      }
      CHECK(std::abs(s.energy() - energy / static_cast<double>(f.size())) < 1e-12);
    }
  }

  TEST_CASE("spectrum round trip and inverse of a single coefficient") {
    Rng rng(3);
    std::vector<double> c(32);
    for (double& x : c) x = rng.normal();
    const FourierSpectrum s(5, c);
    const auto again = wht_forward(wht_inverse(s));
    for (std::size_t m = 0; m < 32; ++m) CHECK(std::abs(again.coeffs()[m] - c[m]) < 1e-12);

    std::vector<double> one(8, 0.0);
    one[0b101] = 1.0;
    CHECK(wht_inverse(FourierSpectrum(3, one)) == parity_table(3, 0b101));
    CHECK(wht_inverse(FourierSpectrum(3, std::vector<double>(8, 0.0))) ==
          PseudoBooleanTable(3, std::vector<double>(8, 0.0)));
  }

  TEST_CASE("plus-minus one functions have unit energy") {
    for (const auto& [name, t] : expression_fixtures()) {
      CAPTURE(name);
      CHECK(std::abs(wht_forward(t).energy() - 1.0) < 1e-12);
    }
  }

  TEST_CASE("energy profile") {
    const auto p = energy_profile(wht_forward(parity_table(5, 0b10110)), 0.95);
    REQUIRE(p.size() == 1);
    CHECK(p[0].mask == 0b10110);
    CHECK(p[0].weight == doctest::Approx(1.0));

    const auto bent = energy_profile(wht_forward(bent_table(4, 1, 2, 3, 4)), 0.95);
    CHECK(bent.size() == 16);
    for (std::size_t i = 1; i < bent.size(); ++i) CHECK(bent[i - 1].mask < bent[i].mask);

    const auto maj = energy_profile(wht_forward(expression_fixtures().at("majority3")), 0.5);
    REQUIRE(maj.size() == 2);
    CHECK(maj[0].mask == 0b001);
    CHECK(maj[1].mask == 0b010);

    Rng rng(4);
    const auto s = wht_forward(random_table(6, rng));
    const auto prof = energy_profile(s, 0.8);
    double acc = 0;
    for (std::size_t i = 0; i < prof.size(); ++i) {
      if (i > 0) CHECK(prof[i - 1].weight >= prof[i].weight);
      if (i + 1 < prof.size()) CHECK(acc + prof[i].weight < 0.8 * s.energy());
      acc += prof[i].weight;
    }
    CHECK(acc >= 0.8 * s.energy() * (1 - 1e-12));

    CHECK_THROWS(energy_profile(FourierSpectrum(2, {0, 0, 0, 0}), 0.9));
    CHECK_THROWS(energy_profile(s, 1.5));
  }

  TEST_CASE("block fixtures") {
    const auto fx = expression_fixtures();
    const auto& b2 = fx.at("block2");
    CHECK(b2[0] == 1.0);
    const auto s2 = wht_forward(b2);
    CHECK(s2[0b11101] == doctest::Approx(1.0));
    CHECK(s2.energy() == doctest::Approx(1.0));

    const auto s3 = wht_forward(fx.at("block3"));
    const SubsetMask heavy[] = {0b01011, 0b01111, 0b11011, 0b11111};
    double heavy_energy = 0;
    for (SubsetMask m : heavy) {
      CHECK(std::abs(s3[m]) == doctest::Approx(0.5));
      heavy_energy += s3[m] * s3[m];
    }
    CHECK(heavy_energy == doctest::Approx(1.0));
    CHECK(s3[0b01011] > 0);
  }
}
