#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace awf {

// Philox4x32-10 counter-based generator.  Every 128-bit counter block maps
// independently to four 32-bit words under a 64-bit key, so any point of any
// stream can be generated without sequencing — this is what keeps chunked
// multi-threaded simulation bit-reproducible.
struct Philox4x32 {
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        constexpr std::uint32_t kMul0 = 0xD2511F53u, kMul1 = 0xCD9E8D57u;
        constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t(kMul0) * ctr[0];
            const std::uint64_t p1 = std::uint64_t(kMul1) * ctr[2];
            ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1),
                   std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], std::uint32_t(p0)};
            key[0] += kW0;
            key[1] += kW1;
        }
        return ctr;
    }
};

namespace detail {

// Layer tables for a 256-layer ziggurat over exp(-x^2/2), x >= 0.  Derived at
// startup by bisecting the outermost-layer abscissa until the layer recursion
// closes at density 1, instead of transcribing 768 literals.
struct ZigguratTables {
    std::array<double, 256> x;          // x[i]: right edge of layer i (i >= 1)
    std::array<double, 256> y;          // y[i] = exp(-x[i]^2/2); y[0] = 1
    std::array<double, 256> w;          // candidate scale: j * w[i] in [0, x[i])
    std::array<std::uint64_t, 256> k;   // accept j < k[i] without a density test
    double r = 0.0;                     // tail threshold: layer-255 right edge
    double inv_r = 0.0;

    ZigguratTables() {
        const auto density = [](double t) { return std::exp(-0.5 * t * t); };
        const auto tail_area = [](double t) {
            return std::sqrt(M_PI / 2.0) * std::erfc(t * M_SQRT1_2);
        };
        // closure(r) > 0 when the recursion overshoots density 1 before the
        // innermost layer (r too small), < 0 when it falls short (r too big).
        const auto closure = [&](double rr, double* out_v) {
            const double v = rr * density(rr) + tail_area(rr);
            if (out_v) *out_v = v;
            double xi = rr;
            for (int i = 254; i >= 1; --i) {
                const double top = v / xi + density(xi);
                if (top >= 1.0) return 1.0;  // overshoot mid-recursion
                xi = std::sqrt(-2.0 * std::log(top));
            }
            return v / xi + density(xi) - 1.0;
        };

        double lo = 3.0, hi = 4.5;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (closure(mid, nullptr) > 0.0)
                lo = mid;
            else
                hi = mid;
        }
        r = 0.5 * (lo + hi);
        inv_r = 1.0 / r;

        double v = 0.0;
        if (std::abs(closure(r, &v)) > 1e-9)
            throw std::logic_error("ziggurat table recursion failed to close");

        constexpr double kScale = 0x1p-53;
        x[255] = r;
        for (int i = 254; i >= 1; --i)
            x[i] = std::sqrt(-2.0 * std::log(v / x[i + 1] + density(x[i + 1])));
        x[0] = 0.0;  // unused: layer 0 is the base strip + tail
        y[0] = 1.0;
        for (int i = 1; i < 256; ++i) y[i] = density(x[i]);
        const double base_width = v / density(r);
        w[0] = base_width * kScale;
        for (int i = 1; i < 256; ++i) w[i] = x[i] * kScale;
        k[0] = std::uint64_t(std::floor(0x1p53 * r / base_width));
        k[1] = 0;
        for (int i = 2; i < 256; ++i)
            k[i] = std::uint64_t(std::floor(0x1p53 * x[i - 1] / x[i]));
    }

    static const ZigguratTables& instance() {
        static const ZigguratTables t;
        return t;
    }
};

}  // namespace detail

// Buffered stream of uniforms and normals drawn from one Philox substream.
// Stream identity is (seed, stream): counter words are {block_lo, block_hi,
// stream_lo, stream_hi}, the key is the seed split into two 32-bit words.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream)
        : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
          stream_{std::uint32_t(stream), std::uint32_t(stream >> 32)},
          zig_(detail::ZigguratTables::instance()) {}

    std::uint64_t next_u64() {
        if (pos_ == buf_.size()) refill();
        return buf_[pos_++];
    }

    // Uniform on (0, 1]: strictly positive, safe under log().
    double next_unit() { return (double(next_u64() >> 11) + 1.0) * 0x1p-53; }

    double next_normal() {
        for (;;) {
            const std::uint64_t u = next_u64();
            const unsigned layer = unsigned(u & 255u);
            const bool negative = (u >> 8) & 1u;
            const std::uint64_t j = u >> 11;
            if (j < zig_.k[layer]) {
                const double cand = double(j) * zig_.w[layer];
                return negative ? -cand : cand;
            }
            if (layer == 0) {
                // Tail sample beyond r by exponential rejection.
                for (;;) {
                    const double ex = -std::log(next_unit()) * zig_.inv_r;
                    const double ey = -std::log(next_unit());
                    if (ey + ey >= ex * ex) {
                        const double cand = zig_.r + ex;
                        return negative ? -cand : cand;
                    }
                }
            }
            const double cand = double(j) * zig_.w[layer];
            const double band =
                zig_.y[layer] + next_unit() * (zig_.y[layer - 1] - zig_.y[layer]);
            if (band < std::exp(-0.5 * cand * cand)) return negative ? -cand : cand;
        }
    }

private:
    void refill() {
        for (std::size_t b = 0; b < kBlocksPerFill; ++b) {
            const auto out = Philox4x32::block(
                {std::uint32_t(block_), std::uint32_t(block_ >> 32), stream_[0],
                 stream_[1]},
                key_);
            buf_[2 * b] = out[0] | (std::uint64_t(out[1]) << 32);
            buf_[2 * b + 1] = out[2] | (std::uint64_t(out[3]) << 32);
            ++block_;
        }
        pos_ = 0;
    }

    static constexpr std::size_t kBlocksPerFill = 32;
    std::array<std::uint64_t, 2 * kBlocksPerFill> buf_{};
    std::size_t pos_ = buf_.size();
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 2> stream_;
    const detail::ZigguratTables& zig_;
};

}  // namespace awf
