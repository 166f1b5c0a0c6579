#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "dgoursat/linalg2.hpp"

namespace testutil {

inline dgoursat::C2x2 random_matrix(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    return {{U(rng), U(rng)}, {U(rng), U(rng)}, {U(rng), U(rng)}, {U(rng), U(rng)}};
}

/// exp of a random su(2) element
inline dgoursat::C2x2 random_su2(std::mt19937_64& rng) {
    std::normal_distribution<double> N;
    double q[4] = {N(rng), N(rng), N(rng), N(rng)};
    const double s = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
    for (double& v : q) v /= s;
    return {{q[0], q[1]}, {q[2], q[3]}, {-q[2], q[3]}, {q[0], -q[1]}};
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("dgoursat_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace testutil
