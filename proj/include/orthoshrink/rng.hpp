#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <string_view>

namespace orthoshrink {

// Counter-style seeding: every (point, estimator, replication) gets its own
// substream key derived from the master seed, so results do not depend on
// which thread runs which replication.

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Seed for one grid point of a sweep: master ^ hash(point index, label).
inline std::uint64_t point_seed(std::uint64_t master, std::uint64_t point_index,
                                std::string_view estimator_label) {
    return master ^ mix64(fnv1a64(estimator_label) + mix64(point_index + 1));
}

/// Seed for one replication's private substream.
inline std::uint64_t replication_key(std::uint64_t point, std::uint64_t rep_index) {
    return mix64(point ^ mix64(rep_index + 1));
}

/// splitmix64: tiny, jumpable, and adequate for Monte Carlo substreams.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double uniform_open() {  // (0, 1]
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }

    double uniform_halfopen() {  // [0, 1)
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

  private:
    std::uint64_t state_;
};

/// Standard normal stream via Box-Muller on a splitmix64 substream.
/// Values come out in a fixed order, independent of everything else.
class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t key) : rng_(key) {}

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = rng_.uniform_open();
        const double u2 = rng_.uniform_halfopen();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    double uniform() {  // [0, 1); consumes one word from the same substream
        return rng_.uniform_halfopen();
    }

    /// Fills in column-major storage order.
    void fill(Eigen::MatrixXd& out) {
        double* data = out.data();
        const Eigen::Index size = out.size();
        for (Eigen::Index i = 0; i < size; ++i) {
            data[i] = normal();
        }
    }

  private:
    SplitMix64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace orthoshrink
