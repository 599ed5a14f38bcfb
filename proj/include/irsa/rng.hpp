#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "irsa/types.hpp"

namespace irsa {

using Rng = std::mt19937_64;

/// Derives an independent generator from a base seed and a stream key such as
/// (axis index, trial index). Identical inputs always yield the same stream.
Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> key = {});

/// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
Complex complex_normal(Rng& rng, double variance);

/// rows x cols matrix of i.i.d. CN(0, variance) entries.
CMatrix complex_normal_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double variance);

}  // namespace irsa
