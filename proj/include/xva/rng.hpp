#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace xva {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Each
/// (key, counter) pair maps to four independent 32-bit words, so streams can
/// be addressed by (seed, path, step) without any sequential state.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Block generate(Block ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            ctr = single_round(ctr, key);
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        return ctr;
    }

private:
    static Block single_round(const Block& c, const Key& k) {
        const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * c[0];
        const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

/// Standard normal draws for one (seed, path, step) cell. Successive calls
/// advance an internal call counter; Box-Muller on each 4-word block.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t path, std::uint32_t step)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          path_(path), step_(step) {}

    double next() {
        if (pos_ == 4) refill();
        return buf_[pos_++];
    }

    static double to_unit(std::uint32_t u) { return (static_cast<double>(u) + 0.5) * 0x1p-32; }

private:
    void refill() {
        const Philox4x32::Block ctr{static_cast<std::uint32_t>(path_),
                                    static_cast<std::uint32_t>(path_ >> 32), step_, call_++};
        const auto w = Philox4x32::generate(ctr, key_);
        for (int i = 0; i < 2; ++i) {
            const double r = std::sqrt(-2.0 * std::log(to_unit(w[2 * i])));
            const double th = 2.0 * std::numbers::pi * to_unit(w[2 * i + 1]);
            buf_[2 * i] = r * std::cos(th);
            buf_[2 * i + 1] = r * std::sin(th);
        }
        pos_ = 0;
    }

    Philox4x32::Key key_;
    std::uint64_t path_;
    std::uint32_t step_;
    std::uint32_t call_ = 0;
    std::array<double, 4> buf_{};
    int pos_ = 4;
};

}  // namespace xva
