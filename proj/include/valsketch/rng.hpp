#pragma once

#include <cstdint>

namespace valsketch {

/// Counter-based random stream: draw i of a stream is a pure function of
/// (key, i), so draws can be partitioned across workers or skipped ahead
/// without changing the sequence. Output mixing is the SplitMix64 finalizer.
class CounterStream {
public:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

    CounterStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : key_(mix(seed ^ mix(stream_id + kGolden))) {}

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Independent child stream, e.g. one per item or per task coordinate.
    [[nodiscard]] CounterStream substream(std::uint64_t id) const noexcept {
        return CounterStream(key_, id);
    }

    [[nodiscard]] std::uint64_t at(std::uint64_t index) const noexcept {
        return mix(key_ + (index + 1) * kGolden);
    }

    std::uint64_t next() noexcept { return at(counter_++); }

    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform() noexcept { return to_unit(next()); }
    [[nodiscard]] double uniform_at(std::uint64_t index) const noexcept {
        return to_unit(at(index));
    }

    void seek(std::uint64_t counter) noexcept { counter_ = counter; }
    [[nodiscard]] std::uint64_t position() const noexcept { return counter_; }

private:
    static double to_unit(std::uint64_t bits) noexcept {
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace valsketch
