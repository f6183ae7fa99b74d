#include "macp/resource_model.hpp"

#include "macp/errors.hpp"

namespace macp {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw OverflowError("activation count exceeds 64 bits");
  return out;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) throw OverflowError("activation count exceeds 64 bits");
  return out;
}

std::uint64_t forward_activations(const MemoryQuery& q) {
  validate(q);
  return checked_mul(checked_mul(q.batch, q.seq_len), q.hidden);
}

}  // namespace

void validate(const MemoryQuery& q) {
  if (q.batch == 0 || q.seq_len == 0 || q.hidden == 0) {
    throw InvalidArgument("memory query: B, S and H must be positive");
  }
}

std::uint64_t activation_memory_macp(const MemoryQuery& q) {
  return checked_add(forward_activations(q), checked_mul(q.batch, q.n));
}

std::uint64_t activation_memory_lowrank(const MemoryQuery& q) {
  const std::uint64_t bsh = forward_activations(q);
  return checked_add(bsh, bsh);
}

double savings_ratio(const MemoryQuery& q) {
  const auto macp = activation_memory_macp(q);
  const auto lowrank = activation_memory_lowrank(q);
  // 1 - macp/lowrank = (B*S*H - B*n) / (2 B*S*H), kept in integers until the
  // final division so n = 0 gives exactly 0.5.
  const auto bsh = lowrank / 2;
  const auto bn = macp - bsh;
  const double numer = bn <= bsh ? static_cast<double>(bsh - bn) : -static_cast<double>(bn - bsh);
  return numer / static_cast<double>(lowrank);
}

std::uint64_t activation_bytes(std::uint64_t scalars, std::uint64_t element_size) {
  return checked_mul(scalars, element_size);
}

std::uint64_t trainable_params(Method method, std::uint64_t d_1, std::uint64_t d_2,
                               std::uint64_t n_or_r) {
  if (method == Method::kLowRank) return checked_mul(n_or_r, checked_add(d_1, d_2));
  return n_or_r;
}

}  // namespace macp
