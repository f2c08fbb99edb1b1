#pragma once

#include <cstddef>
#include <vector>

#include "causaldr/linalg.hpp"

namespace causaldr {

// One analysis sample: covariates, binary treatment, continuous outcome.
struct Dataset {
  linalg::Matrix x;
  std::vector<int> a;
  std::vector<double> y;

  std::size_t n() const { return a.size(); }

  std::size_t n_treated() const {
    std::size_t c = 0;
    for (int v : a) c += static_cast<std::size_t>(v);
    return c;
  }

  bool both_arms_present() const {
    const std::size_t t = n_treated();
    return t > 0 && t < n();
  }

  bool operator==(const Dataset&) const = default;
};

}  // namespace causaldr
