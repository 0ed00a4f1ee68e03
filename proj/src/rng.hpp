#pragma once

#include <cstdint>
#include <cmath>

namespace subdiff::harness {

// Counter-based stream: Philox4x32-10 keyed by the master seed, with the
// stream id folded into the counter block. Draw i of stream s is a pure
// function of (seed, s, i), so worker scheduling cannot change results.
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64();

    // uniform on [0,1)
    double u01();
    // uniform on (0,1)
    double u01_open();
    // standard normal (polar Box-Muller, one value cached)
    double normal();
    // unit-rate exponential
    double exponential();
    // Gamma(shape, 1) by Marsaglia-Tsang, boosted for shape < 1
    double gamma(double shape);
    double beta(double a, double b);
    // One-sided stable, Laplace transform E[exp(-lambda V)] = exp(-lambda^beta),
    // via the Kanter representation. Requires 0 < beta < 1.
    double stable_positive(double beta);

private:
    void refill();

    std::uint64_t master_seed_ = 0;
    std::uint64_t stream_id_ = 0;
    std::uint32_t key_[2];
    std::uint32_t ctr_[4];
    std::uint64_t block_ = 0;
    std::uint64_t buf_[2];
    int buf_pos_ = 2;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

// Stable increment over an interval of length dt for exponent c*lambda^beta.
inline double stable_increment(RngStream& rng, double c, double beta, double dt) {
    return std::pow(c * dt, 1.0 / beta) * rng.stable_positive(beta);
}

}  // namespace subdiff::harness
