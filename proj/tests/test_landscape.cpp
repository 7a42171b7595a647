#include <doctest.h>

#include <cmath>

#include "dlecc/landscape.hpp"

using namespace dlecc;

namespace {

LossOptions small_options() {
  LossOptions o;
  o.k = 8;
  o.blocks = 200;
  o.seed = 11;
  return o;
}

double norm(const FourierSpectrum& s) {
  double e = 0;
  for (double c : s.coeffs()) e += c * c;
  return std::sqrt(e);
}

}  // namespace

TEST_SUITE("landscape") {
  TEST_CASE("parity triple") {
    const auto t = parity_triple({0b10000, 0b10011, 0b11111});
    CHECK(t.spectra[1][0b10011] == 1.0);
    CHECK(t.spectra[1].energy() == 1.0);
    const auto p = encoder_of(t);
    CHECK(p.window() == 5);
    CHECK(p.table(1) == parity_table(5, 0b10011));
  }

  TEST_CASE("bent triple spectra are flat on their subsets") {
    const auto t = bent_triple();
    const SubsetMask supports[] = {0b01111, 0b11110, 0b11011};
    for (std::size_t s = 0; s < 3; ++s) {
      for (SubsetMask m = 0; m < 32; ++m) {
        const bool inside = (m & ~supports[s]) == 0;
        CHECK(std::abs(t.spectra[s][m]) == doctest::Approx(inside ? 0.25 : 0.0));
      }
      // values are +-1
      const auto p = encoder_of(t);
      for (double v : p.table(s).values()) CHECK(std::abs(v) == doctest::Approx(1.0));
    }
    // x1 x2 XOR x3 x4 with 0 -> +1 is +1 at the all-zero point and -1 at 1111
    CHECK(encoder_of(t).table(0)[0] == doctest::Approx(1.0));
    CHECK(encoder_of(t).table(0)[0b01111] == doctest::Approx(1.0));
    CHECK(encoder_of(t).table(0)[0b00011] == doctest::Approx(-1.0));
    const auto partner = bent_partner_triple();
    CHECK(partner != t);
    CHECK(encoder_of(partner).table(0)[0b00101] == doctest::Approx(-1.0));
    CHECK(encoder_of(partner).table(0)[0b00011] == doctest::Approx(1.0));
  }

  TEST_CASE("normalize and mix") {
    const auto a = parity_triple({1, 2, 4});
    const auto b = parity_triple({8, 16, 3});
    CHECK(*mix(a, b, 0.0) == a);
    CHECK(*mix(a, b, 1.0) == b);
    const auto m = *mix(a, b, 0.5);
    for (const auto& s : m.spectra) CHECK(norm(s) == doctest::Approx(1.0));
    CHECK(m.spectra[0][1] == doctest::Approx(std::sqrt(0.5)));
    CHECK(m.spectra[0][8] == doctest::Approx(std::sqrt(0.5)));
    // scale does not matter after renormalization
    ThetaTriple big = a;
    for (auto& s : big.spectra) {
      std::vector<double> v(s.coeffs().begin(), s.coeffs().end());
      for (double& c : v) c *= 7;
      s = FourierSpectrum(5, v);
    }
    CHECK(*normalize(big) == a);

    ThetaTriple neg = a;
    std::vector<double> v(a.spectra[2].coeffs().begin(), a.spectra[2].coeffs().end());
    for (double& c : v) c = -c;
    neg.spectra[2] = FourierSpectrum(5, v);
    CHECK_FALSE(mix(a, neg, 0.5).has_value());
    CHECK(mix(a, neg, 0.25).has_value());
  }

  TEST_CASE("common random numbers") {
    const auto o = small_options();
    const auto pi = probe_interleaver(o.k, o.seed);
    CHECK(pi == probe_interleaver(o.k, o.seed));
    CHECK(pi.size() == 8);
    const auto a = parity_triple({0b10000, 0b10011, 0b10101});
    // the same theta at the same seed gives identical block losses
    CHECK(block_losses(a, pi, o) == block_losses(*mix(a, a, 0.3), pi, o));
    auto threaded = o;
    threaded.threads = 3;
    CHECK(block_losses(a, pi, o) == block_losses(a, pi, threaded));
    auto other = o;
    other.seed = 12;
    CHECK(block_losses(a, pi, o) != block_losses(a, pi, other));
  }

  TEST_CASE("strong code has small loss at high snr") {
    auto o = small_options();
    o.snr_db = 12;
    const auto pi = probe_interleaver(o.k, o.seed);
    const auto e = loss_of_theta(parity_triple({0b10000, 0b11001, 0b10111}), pi, o);
    CHECK(e.mean < 1e-3);
    o.snr_db = -20;
    CHECK(loss_of_theta(parity_triple({0b10000, 0b11001, 0b10111}), pi, o).mean > 0.9);
  }

  TEST_CASE("line probe") {
    const auto a = parity_triple({0b10000, 0b10011, 0b10101});
    const auto b = parity_triple({0b10001, 0b10110, 0b11001});
    const auto grid = default_lambda_grid();
    REQUIRE(grid.size() == 21);
    CHECK(grid[10] == 0.5);
    auto o = small_options();
    o.blocks = 50;
    const auto r = line_probe(a, b, {0.0, 0.5, 1.0}, o);
    CHECK(r.lambdas.size() == 3);
    CHECK(r.interleaver == probe_interleaver(o.k, o.seed));
    CHECK(r.losses[0] == loss_of_theta(a, r.interleaver, o).mean);
    CHECK(r.losses[2] == loss_of_theta(b, r.interleaver, o).mean);
    // reversing the endpoints mirrors the curve
    const auto back = line_probe(b, a, {0.0, 0.5, 1.0}, o);
    CHECK(back.losses[0] == r.losses[2]);
    CHECK(back.losses[1] == doctest::Approx(r.losses[1]).epsilon(1e-12));
    CHECK_THROWS(line_probe(a, b, {0.0, 0.5}, o));

    const auto csv = line_probe_to_csv(r);
    CHECK(csv.rfind("lambda,loss,std_error,degenerate_flag\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  }

  TEST_CASE("degenerate points are flagged") {
    const auto a = parity_triple({0b10000, 0b10011, 0b10101});
    ThetaTriple neg = a;
    for (auto& s : neg.spectra) {
      std::vector<double> v(s.coeffs().begin(), s.coeffs().end());
      for (double& c : v) c = -c;
      s = FourierSpectrum(5, v);
    }
    auto o = small_options();
    o.blocks = 10;
    const auto r = line_probe(a, neg, {0.0, 0.5, 1.0}, o);
    CHECK(r.degenerate == std::vector<bool>{false, true, false});
    CHECK(std::isnan(r.losses[1]));
    CHECK(line_probe_to_csv(r).find("0.5,nan,nan,1") != std::string::npos);
  }
}
