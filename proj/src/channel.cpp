#include "dlecc/channel.hpp"

#include <cmath>
#include <string>

#include "dlecc/error.hpp"

namespace dlecc {

double snr_db_to_sigma(double snr_db) { return std::pow(10.0, -snr_db / 20.0); }

AwgnChannel::AwgnChannel(double sigma) : sigma_(sigma) {
  require(std::isfinite(sigma) && sigma > 0.0, "AwgnChannel: sigma must be positive");
}

std::vector<double> AwgnChannel::transmit(std::span<const double> symbols, Rng& rng) const {
  std::vector<double> out(symbols.begin(), symbols.end());
  for (double& y : out) y += sigma_ * rng.normal();
  return out;
}

DiscreteChannel::DiscreteChannel(std::vector<std::vector<double>> transition, double column_tolerance)
    : transition_(std::move(transition)), tolerance_(column_tolerance) {
  require(!transition_.empty() && !transition_.front().empty(),
          "DiscreteChannel: transition matrix is empty");
  inputs_ = transition_.front().size();
  for (const auto& row : transition_)
    require(row.size() == inputs_, "DiscreteChannel: ragged transition matrix");
  for (std::size_t j = 0; j < inputs_; ++j) {
    double sum = 0.0;
    for (const auto& row : transition_) {
      require(std::isfinite(row[j]) && row[j] >= 0.0, "DiscreteChannel: entries must be non-negative");
      sum += row[j];
    }
    if (std::abs(sum - 1.0) > tolerance_ * (1.0 + 1e-9))
      fail(ErrorKind::InvalidArgument,
           "DiscreteChannel: column " + std::to_string(j) + " is not stochastic (sum " +
               std::to_string(sum) + ")");
  }
}

std::size_t DiscreteChannel::transmit(std::size_t input, Rng& rng) const {
  require(input < inputs_, "DiscreteChannel::transmit: input symbol out of range");
  double total = 0.0;
  for (const auto& row : transition_) total += row[input];
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < transition_.size(); ++i) {
    acc += transition_[i][input];
    if (u < acc) return i;
  }
  // Rounding at the top of the cumulative sum: return the last reachable output.
  for (std::size_t i = transition_.size(); i-- > 0;)
    if (transition_[i][input] > 0.0) return i;
  return transition_.size() - 1;
}

DiscreteChannel DiscreteChannel::counterexample() {
  return DiscreteChannel({{0.24, 0.15, 0.24, 0.056},
                          {0.26, 0.15, 0.26, 0.343},
                          {0.2605, 0.35, 0.2605, 0.25},
                          {0.2395, 0.35, 0.2395, 0.35}},
                         1e-3);
}

}  // namespace dlecc
