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

#include "collapse_lab/global_stream.h"

namespace collapse_lab {

namespace {

constexpr uint32_t kMul0 = 0xD2511F53;
constexpr uint32_t kMul1 = 0xCD9E8D57;
constexpr uint32_t kWeyl0 = 0x9E3779B9;
constexpr uint32_t kWeyl1 = 0xBB67AE85;

inline void mulhilo(uint32_t a, uint32_t b, uint32_t &hi, uint32_t &lo) {
    uint64_t p = uint64_t{a} * uint64_t{b};
    hi = static_cast<uint32_t>(p >> 32);
    lo = static_cast<uint32_t>(p);
}

}  // namespace

std::array<uint32_t, 4> philox4x32_10(std::array<uint32_t, 4> ctr, std::array<uint32_t, 2> key) {
    for (int round = 0; round < 10; round++) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

GlobalStream::GlobalStream(uint64_t master_seed, uint64_t substream) : master_seed_(master_seed), substream_(substream) {
}

uint64_t GlobalStream::fetch_word() {
    if (words_left_ == 0) {
        auto out = philox4x32_10(
            {static_cast<uint32_t>(block_index_), static_cast<uint32_t>(block_index_ >> 32),
             static_cast<uint32_t>(substream_), static_cast<uint32_t>(substream_ >> 32)},
            {static_cast<uint32_t>(master_seed_), static_cast<uint32_t>(master_seed_ >> 32)});
        block_index_++;
        words_[0] = uint64_t{out[0]} | (uint64_t{out[1]} << 32);
        words_[1] = uint64_t{out[2]} | (uint64_t{out[3]} << 32);
        words_left_ = 2;
    }
    return words_[2 - words_left_--];
}

bool GlobalStream::next_bit() {
    if (bits_left_ == 0) {
        bit_word_ = fetch_word();
        bits_left_ = 64;
    }
    bool bit = bit_word_ & 1;
    bit_word_ >>= 1;
    bits_left_--;
    draws_++;
    return bit;
}

uint64_t GlobalStream::next_u64() {
    bits_left_ = 0;
    draws_++;
    return fetch_word();
}

double GlobalStream::next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

}  // namespace collapse_lab
