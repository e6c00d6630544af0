// Copyright 2026 The Collapse Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef COLLAPSE_LAB_GLOBAL_STREAM_H
#define COLLAPSE_LAB_GLOBAL_STREAM_H

#include <array>
#include <cstdint>

namespace collapse_lab {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<uint32_t, 4> philox4x32_10(std::array<uint32_t, 4> counter, std::array<uint32_t, 2> key);

/// The single stochastic source of a run.
///
/// Counter-based: the block at position k of substream s under master seed m
/// is philox(ctr = {k_lo, k_hi, s_lo, s_hi}, key = {m_lo, m_hi}), so any
/// (seed, substream) pair yields the same sequence regardless of which worker
/// consumes it. Draws must be taken in foliation order; `draws()` counts them.
class GlobalStream {
   public:
    explicit GlobalStream(uint64_t master_seed, uint64_t substream = 0);

    /// Substream for ensemble run `run_index`.
    static GlobalStream for_run(uint64_t master_seed, uint64_t run_index) {
        return GlobalStream(master_seed, run_index);
    }

    uint64_t master_seed() const noexcept {
        return master_seed_;
    }
    uint64_t substream() const noexcept {
        return substream_;
    }
    /// Number of draws consumed so far (bits and words alike).
    uint64_t draws() const noexcept {
        return draws_;
    }

    /// Fair binary draw.
    bool next_bit();
    /// Fresh 64-bit word. Unused bits of a partially consumed word are discarded.
    uint64_t next_u64();
    /// Uniform in [0, 1) with 53 bits of resolution.
    double next_uniform();

   private:
    uint64_t fetch_word();

    uint64_t master_seed_;
    uint64_t substream_;
    uint64_t block_index_ = 0;
    std::array<uint64_t, 2> words_{};
    int words_left_ = 0;
    uint64_t bit_word_ = 0;
    int bits_left_ = 0;
    uint64_t draws_ = 0;
};

}  // namespace collapse_lab

#endif
