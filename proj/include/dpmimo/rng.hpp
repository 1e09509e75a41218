#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>

namespace dpmimo {

// Philox4x32-10 (Salmon et al., SC'11). The key is the run seed; the
// counter's upper words hold the stream id, the lower words walk
// through the stream. Any stream can therefore be opened at any time
// without touching the others.
class Philox4x32 {
public:
    using result_type = std::uint32_t;

    Philox4x32(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          ctr_{0, 0, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)}
    {
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()()
    {
        if (idx_ == 4) {
            buf_ = round10(ctr_, key_);
            if (++ctr_[0] == 0)
                ++ctr_[1];
            idx_ = 0;
        }
        return buf_[idx_++];
    }

    static std::array<std::uint32_t, 4> round10(std::array<std::uint32_t, 4> c,
                                                std::array<std::uint32_t, 2> k)
    {
        constexpr std::uint32_t M0 = 0xD2511F53, M1 = 0xCD9E8D57;
        constexpr std::uint32_t W0 = 0x9E3779B9, W1 = 0xBB67AE85;
        for (int r = 0; r < 10; ++r) {
            std::uint64_t p0 = std::uint64_t(M0) * c[0];
            std::uint64_t p1 = std::uint64_t(M1) * c[2];
            c = {std::uint32_t(p1 >> 32) ^ c[1] ^ k[0], std::uint32_t(p1),
                 std::uint32_t(p0 >> 32) ^ c[3] ^ k[1], std::uint32_t(p0)};
            k[0] += W0;
            k[1] += W1;
        }
        return c;
    }

private:
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> ctr_;
    std::array<std::uint32_t, 4> buf_{};
    int idx_ = 4;
};

// Per-caller random stream: engine plus the distributions drawn from it.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t stream) : eng_(seed, stream) {}

    double uniform() { return std::generate_canonical<double, 53>(eng_); }
    double normal() { return normal_(eng_); }
    double exponential(double mean) { return -mean * std::log1p(-uniform()); }
    double gamma(double shape, double scale)
    {
        return std::gamma_distribution<double>(shape, scale)(eng_);
    }
    // CN(0,1): real and imaginary parts N(0,1/2).
    std::complex<double> cnormal()
    {
        constexpr double s = 0.70710678118654752440;
        double re = normal();
        double im = normal();
        return {s * re, s * im};
    }

    Philox4x32& engine() { return eng_; }

private:
    Philox4x32 eng_;
    std::normal_distribution<double> normal_;
};

} // namespace dpmimo
