#pragma once

#include <cstdint>
#include <string>

#include "autocore/types.hpp"

namespace autocore {

struct SyntheticSpec {
  std::string generator;  // "blobs" | "linear" | "mixture"
  Eigen::Index n = 100;
  Eigen::Index d = 2;
  double noise = 1.0;
  int k = 3;              // mixture components
  double balance = 0.5;   // fraction of the +1 class for blobs
  double separation = 8.0;
};

Dataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace autocore
