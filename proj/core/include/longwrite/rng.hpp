#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace longwrite {

// Stable seed derivation so that independent work items (one per instruction,
// say) draw from disjoint streams regardless of scheduling order.
uint64_t derive_seed(uint64_t base, std::string_view tag);

// Unbiased draw from [0, n). std::uniform_int_distribution is implementation
// defined, so outputs would differ across standard libraries; this rejection
// sampler on top of the (fully specified) mt19937_64 stream is portable.
uint64_t uniform_index(std::mt19937_64& rng, uint64_t n);

}  // namespace longwrite
