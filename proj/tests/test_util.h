#pragma once

#include <cmath>
#include <cstdlib>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "cascade_stab/model.h"

namespace cascade_stab {
namespace testing {

inline const double kPi = std::acos(-1.0);

inline std::string data_path(const std::string& name) {
  return std::string(CASCADE_STAB_DATA_DIR) + "/" + name;
}

/// The 3x3 benchmark plant on [0, pi] with indicator actuators.
inline PlantSpec example_spec() {
  PlantSpec spec;
  spec.m = 3;
  spec.D = Eigen::Vector3d(4, 5, 6);
  spec.Q.resize(3, 3);
  spec.Q << 10, 4, 8, 1, 10, 2, 0, 1, 20;
  spec.L = kPi;
  spec.gamma1 = 1.0;
  spec.gamma2 = 0.0;
  for (int j = 1; j <= 3; ++j) spec.shapes.push_back({Indicator{0.1 * j, 0.1 * j + 0.1}});
  return spec;
}

inline ValidatedPlant example_plant() { return validate_plant(example_spec()); }

/// Base seed for randomized tests; CASCADE_STAB_SEED overrides it.
inline unsigned base_seed() {
  const char* env = std::getenv("CASCADE_STAB_SEED");
  return env ? static_cast<unsigned>(std::strtoul(env, nullptr, 10)) : 20240601u;
}

/// A valid cascade plant: unit-scale upper Hessenberg Q with subdiagonal
/// entries bounded away from zero, positive diffusions in [0.5, 5] where the
/// trailing block is sometimes equal so that every sigma occurs.
inline PlantSpec random_spec(std::mt19937& rng, int m) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> diff(0.5, 5.0);
  std::uniform_real_distribution<double> sub(0.5, 1.5);
  std::uniform_int_distribution<int> sigma_pick(1, m);
  std::bernoulli_distribution coin(0.5);

  PlantSpec spec;
  spec.m = m;
  spec.D.resize(m);
  const int sigma = sigma_pick(rng);
  const double tail = diff(rng);
  for (int i = 0; i < m; ++i) {
    double d = i + 1 >= sigma ? tail : diff(rng);
    if (i + 2 == sigma) {
      while (d == tail) d = diff(rng);
    }
    spec.D(i) = d;
  }
  spec.Q = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = std::max(0, i - 1); j < m; ++j) spec.Q(i, j) = unit(rng);
  for (int i = 1; i < m; ++i) spec.Q(i, i - 1) = (coin(rng) ? 1.0 : -1.0) * sub(rng);
  spec.L = kPi;
  spec.gamma1 = 1.0;
  spec.gamma2 = 0.0;
  return spec;
}

}  // namespace testing
}  // namespace cascade_stab
