#include "rng.hpp"

#include <stdexcept>

namespace subdiff::harness {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::uint32_t c[4], const std::uint32_t k[2]) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t n0 = hi1 ^ c[1] ^ k[0];
    const std::uint32_t n1 = lo1;
    const std::uint32_t n2 = hi0 ^ c[3] ^ k[1];
    const std::uint32_t n3 = lo0;
    c[0] = n0;
    c[1] = n1;
    c[2] = n2;
    c[3] = n3;
}

inline void philox10(const std::uint32_t key[2], const std::uint32_t ctr[4], std::uint32_t out[4]) {
    std::uint32_t k[2] = {key[0], key[1]};
    out[0] = ctr[0];
    out[1] = ctr[1];
    out[2] = ctr[2];
    out[3] = ctr[3];
    for (int r = 0; r < 10; ++r) {
        philox_round(out, k);
        k[0] += kPhiloxW0;
        k[1] += kPhiloxW1;
    }
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed), stream_id_(stream_id) {
    key_[0] = static_cast<std::uint32_t>(master_seed);
    key_[1] = static_cast<std::uint32_t>(master_seed >> 32);
    ctr_[2] = static_cast<std::uint32_t>(stream_id);
    ctr_[3] = static_cast<std::uint32_t>(stream_id >> 32);
}

void RngStream::refill() {
    ctr_[0] = static_cast<std::uint32_t>(block_);
    ctr_[1] = static_cast<std::uint32_t>(block_ >> 32);
    std::uint32_t out[4];
    philox10(key_, ctr_, out);
    buf_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    buf_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    ++block_;
    buf_pos_ = 0;
}

std::uint64_t RngStream::next_u64() {
    if (buf_pos_ >= 2) refill();
    return buf_[buf_pos_++];
}

double RngStream::u01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::u01_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    double v1, v2, s;
    do {
        v1 = 2.0 * u01() - 1.0;
        v2 = 2.0 * u01() - 1.0;
        s = v1 * v1 + v2 * v2;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    cached_normal_ = v2 * f;
    has_cached_normal_ = true;
    return v1 * f;
}

double RngStream::exponential() {
    return -std::log(1.0 - u01());
}

double RngStream::gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma shape must be positive");
    if (shape < 1.0) {
        const double u = u01_open();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double cc = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + cc * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = u01_open();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double RngStream::beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    return x / (x + y);
}

double RngStream::stable_positive(double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("stable index must lie in (0,1)");
    const double theta = 3.14159265358979323846 * u01_open();
    const double w = exponential();
    // Kanter: V = (A(theta)/W)^((1-beta)/beta) with
    // A = sin(beta t)^(beta/(1-beta)) sin((1-beta)t) / sin(t)^(1/(1-beta)).
    const double log_a_num = beta * std::log(std::sin(beta * theta)) +
                             (1.0 - beta) * std::log(std::sin((1.0 - beta) * theta)) -
                             std::log(std::sin(theta));
    const double log_v = log_a_num / beta - (1.0 - beta) / beta * std::log(w);
    return std::exp(log_v);
}

}  // namespace subdiff::harness
