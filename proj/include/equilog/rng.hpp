#pragma once
// Deterministic, splittable random streams. A stream is identified by the
// pair (seed, stream_id): the same pair always reproduces the same draw
// sequence, and distinct stream ids behave as statistically independent
// generators. Simulation replicate r owns stream r, so results do not
// depend on thread scheduling.
//
// Streams are single-owner: never share one RngStream across concurrent
// tasks; give each task its own stream id instead.

#include <array>
#include <cmath>
#include <cstdint>

#include "equilog/errors.hpp"
#include "equilog/linalg.hpp"

namespace equilog {

namespace detail {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace detail

/// xoshiro256++ generator keyed by (seed, stream_id) through SplitMix64.
class RngStream {
 public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id) {
        std::uint64_t s0 = seed;
        const std::uint64_t k_seed = detail::splitmix64_next(s0);
        std::uint64_t s1 = stream_id ^ 0x6A09E667F3BCC909ULL;
        const std::uint64_t k_stream = detail::splitmix64_next(s1);
        std::uint64_t key =
            k_seed ^ (k_stream + 0x9E3779B97F4A7C15ULL + (k_seed << 6) + (k_seed >> 2));
        bool nonzero = false;
        for (auto& w : state_) {
            w = detail::splitmix64_next(key);
            nonzero = nonzero || (w != 0);
        }
        if (!nonzero) state_[0] = 1;  // xoshiro state must not be all zero
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// A stream with the same seed and a shifted stream id. Offsets are the
    /// caller's responsibility to keep disjoint from ids it already uses.
    RngStream substream(std::uint64_t offset) const {
        return RngStream(seed_, stream_id_ + offset);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result =
            detail::rotl64(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl64(state_[3], 45);
        return result;
    }

    /// Uniform draw strictly inside (0, 1).
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (second value cached).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(phi);
        has_spare_ = true;
        return r * std::cos(phi);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, n), n >= 1.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

 private:
    std::uint64_t seed_, stream_id_;
    std::array<std::uint64_t, 4> state_{};
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// n i.i.d. rows from N(mu, Sigma), via the Cholesky factor of Sigma.
inline Matrix sample_mvnormal(const Vector& mu, const SpdMatrix& sigma, std::size_t n,
                              RngStream& rng) {
    if (mu.size() != sigma.dim()) throw DimensionError("sample_mvnormal: dimension mismatch");
    if (n < 1) throw ValidationError("sample_mvnormal: n must be >= 1");
    const std::size_t d = mu.size();
    const Matrix& l = sigma.chol_lower();
    Matrix out(n, d);
    Vector z(d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) z[j] = rng.normal();
        for (std::size_t j = 0; j < d; ++j) {
            double s = mu[j];
            for (std::size_t k = 0; k <= j; ++k) s += l(j, k) * z[k];
            out(i, j) = s;
        }
    }
    return out;
}

}  // namespace equilog
