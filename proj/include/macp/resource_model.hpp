#pragma once

#include <cstddef>
#include <cstdint>

#include "macp/toy_trainer.hpp"

namespace macp {

/// Inputs of the activation-memory model. r is recorded for reporting; the
/// low-rank formula does not use it.
struct MemoryQuery {
  std::uint64_t batch = 1;       // B
  std::uint64_t seq_len = 1;     // S
  std::uint64_t hidden = 1;      // H
  std::uint64_t n = 0;           // selected coefficients
  std::uint64_t rank = 0;        // r
};

/// Throws InvalidArgument when B, S or H is zero.
void validate(const MemoryQuery& q);

/// B*S*H + B*n scalar activations. Throws OverflowError past 64 bits.
std::uint64_t activation_memory_macp(const MemoryQuery& q);

/// B*S*H + B*S*H scalar activations.
std::uint64_t activation_memory_lowrank(const MemoryQuery& q);

/// 1 - macp / lowrank.
double savings_ratio(const MemoryQuery& q);

/// Scalar count times element size (default 4 bytes).
std::uint64_t activation_bytes(std::uint64_t scalars, std::uint64_t element_size = 4);

/// n for the spectral methods, r * (d_1 + d_2) for lowrank.
std::uint64_t trainable_params(Method method, std::uint64_t d_1, std::uint64_t d_2,
                               std::uint64_t n_or_r);

}  // namespace macp
