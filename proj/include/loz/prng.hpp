#pragma once

// Counter-based pseudo-random generator: Philox-4x64 with 10 rounds.
//
// Every random decision in this project is a pure function of
// (master_seed, stream_index, domain_tag, counter), which gives
// bit-for-bit reproducible runs and embarrassingly parallel streams:
// worker k simply owns stream indices congruent to k.  Coupling-from-
// the-past re-reads the randomness of an absolute time step without
// storing it, by putting the time step into the counter.

#include <array>
#include <cstdint>

namespace loz {

// One 4-word block of Philox-4x64-10 output for the given key/counter.
std::array<std::uint64_t, 4> philox4x64(const std::array<std::uint64_t, 2>& key,
                                        const std::array<std::uint64_t, 4>& counter);

// Identifies one reproducible random stream.
struct SeededStream {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;
};

// Domain tags keep independent uses of the same stream from colliding.
enum : std::uint64_t {
    kTagSequentialSampler = 1,
    kTagCftp = 2,
    kTagGlauber = 3,
    kTagWord = 4,
};

// Buffered generator walking the counter space of one (stream, tag) lane.
class PhiloxRng {
  public:
    PhiloxRng(SeededStream s, std::uint64_t tag)
        : key_{s.master_seed, s.stream_index}, tag_(tag) {}

    std::uint64_t next_u64() {
        if (pos_ == 4) refill();
        return block_[pos_++];
    }

    // Uniform in [0, n) by rejection; unbiased for every n >= 1.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = n * ((~std::uint64_t(0)) / n);
        for (;;) {
            std::uint64_t v = next_u64();
            if (v < limit) return v % n;
        }
    }

    double next_unit() {  // uniform double in [0,1) with 53 random bits
        return double(next_u64() >> 11) * (1.0 / 9007199254740992.0);
    }

    // Randomness of absolute time step t, independent of generator state.
    // Used by coupling-from-the-past, which revisits past time steps.
    // `salt` selects extra blocks for the same time step (rejection retries).
    std::array<std::uint64_t, 4> at_time(std::uint64_t t,
                                         std::uint64_t salt = 0) const {
        return philox4x64(key_, {t, tag_, 0x74696d65u /* "time" */, salt});
    }

  private:
    void refill() {
        block_ = philox4x64(key_, {ctr_++, tag_, 0, 0});
        pos_ = 0;
    }

    std::array<std::uint64_t, 2> key_;
    std::uint64_t tag_;
    std::uint64_t ctr_ = 0;
    std::array<std::uint64_t, 4> block_{};
    int pos_ = 4;
};

}  // namespace loz
