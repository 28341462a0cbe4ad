/**
 * @file sampling.hpp
 * @brief Reproducible sample points: shifted Halton sequences over a chart's
 *        box, and a splittable seed scheme for parallel sweeps.
 */
#pragma once

#include <gaugeforge/expr.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace gaugeforge {

/// Derives independent child seeds from a root seed (splitmix64 finalizer).
class SeedSequence {
public:
    explicit SeedSequence(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    SeedSequence split(std::uint64_t stream) const { return SeedSequence(mix(seed_ ^ mix(stream + 0x9e3779b97f4a7c15ULL))); }

    std::mt19937_64 engine() const { return std::mt19937_64(seed_); }

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t seed_;
};

inline double radical_inverse(std::uint64_t i, unsigned base) {
    double inv = 1.0 / base, f = inv, r = 0.0;
    while (i) {
        r += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return r;
}

struct SampleSet {
    std::vector<Point> points;
    int rejected = 0;
};

/// `count` admissible points from a Halton sequence in bases 2, 3, 5, 7 with
/// a seeded Cranley-Patterson rotation. `accept` may veto further points
/// (e.g. a signature check); vetoed and excluded candidates are counted.
inline SampleSet sample_points(const CoordinateChart& chart, int count, std::uint64_t seed,
                               const std::function<bool(const Point&)>& accept = {}, int max_candidates = 0) {
    static constexpr std::array<unsigned, kDim> kBases{2, 3, 5, 7};
    auto rng = SeedSequence(seed).split(0x5a3d).engine();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::array<double, kDim> shift{};
    for (auto& s : shift) s = unit(rng);
    if (max_candidates <= 0) max_candidates = 50 * count + 100;

    SampleSet out;
    for (std::uint64_t i = 1; static_cast<int>(out.points.size()) < count; ++i) {
        if (static_cast<int>(i) > max_candidates) break;
        Point p{};
        for (int a = 0; a < kDim; ++a) {
            double u = radical_inverse(i, kBases[a]) + shift[a];
            u -= std::floor(u);
            const auto [lo, hi] = chart.domain()[a];
            p[a] = lo + (hi - lo) * u;
        }
        if (!chart.admissible(p) || (accept && !accept(p))) {
            ++out.rejected;
            continue;
        }
        out.points.push_back(p);
    }
    return out;
}

}  // namespace gaugeforge
