#include "nmfinit/rank.hpp"

#include <stdexcept>
#include <string>

#include "nmfinit/errors.hpp"

namespace nmfinit {

RankChoice choose_rank(std::span<const double> sigma, double threshold) {
  if (sigma.empty()) {
    throw std::invalid_argument("choose_rank: empty spectrum");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("choose_rank: threshold " +
                                std::to_string(threshold) +
                                " outside (0, 1)");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (sigma[i] < 0.0) {
      throw std::invalid_argument("choose_rank: negative singular value at " +
                                  std::to_string(i));
    }
    if (i > 0 && sigma[i] > sigma[i - 1]) {
      throw std::invalid_argument(
          "choose_rank: spectrum not descending at index " + std::to_string(i));
    }
    total += sigma[i];
  }
  if (total == 0.0) {
    throw DegenerateInputError("choose_rank: all singular values are zero");
  }

  RankChoice choice;
  double extracted = 0.0;
  while (extracted / total < threshold && choice.p < sigma.size()) {
    extracted += sigma[choice.p];
    ++choice.p;
  }
  choice.energy_ratio = extracted / total;
  return choice;
}

RankChoice choose_rank_for_shape(std::span<const double> sigma, std::size_t m,
                                 std::size_t n, double threshold) {
  RankChoice choice = choose_rank(sigma, threshold);
  choice.satisfies_basic_rule = basic_rule_check(m, n, choice.p);
  return choice;
}

bool basic_rule_check(std::size_t m, std::size_t n, std::size_t p) {
  return (m + n) * p < m * n;
}

}  // namespace nmfinit
