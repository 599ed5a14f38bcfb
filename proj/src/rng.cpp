#include "irsa/rng.hpp"

#include <cmath>

namespace irsa {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> key) {
    std::uint64_t state = splitmix64(seed);
    for (std::uint64_t k : key) state = splitmix64(state ^ splitmix64(k + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(state), static_cast<std::uint32_t>(state >> 32),
                      static_cast<std::uint32_t>(key.size())};
    return Rng(seq);
}

Complex complex_normal(Rng& rng, double variance) {
    std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

CMatrix complex_normal_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double variance) {
    std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
    CMatrix out(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = n(rng);
            const double im = n(rng);
            out(i, j) = Complex(re, im);
        }
    return out;
}

}  // namespace irsa
