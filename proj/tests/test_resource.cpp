#include <doctest.h>

#include <limits>

#include "macp/errors.hpp"
#include "macp/resource_model.hpp"

using namespace macp;

TEST_CASE("activation memory: unit and worked examples") {
  CHECK(activation_memory_macp({1, 1, 1, 0, 0}) == 1);
  const MemoryQuery q{1, 2048, 4096, 1000, 32};
  CHECK(activation_memory_macp(q) == 8'389'608ULL);
  CHECK(activation_memory_lowrank(q) == 16'777'216ULL);
  CHECK(std::abs(savings_ratio(q) - 0.49994) < 1e-5);
}

TEST_CASE("linearity in B and independence from r") {
  const MemoryQuery one{1, 2048, 4096, 1000, 32};
  const MemoryQuery two{2, 2048, 4096, 1000, 32};
  CHECK(activation_memory_macp(two) == 2 * activation_memory_macp(one));
  CHECK(activation_memory_lowrank(two) == 2 * activation_memory_lowrank(one));
  const MemoryQuery other_r{1, 2048, 4096, 1000, 1};
  CHECK(activation_memory_lowrank(other_r) == activation_memory_lowrank(one));
}

TEST_CASE("savings ratio limits") {
  CHECK(savings_ratio({1, 64, 64, 0, 0}) == 0.5);
  CHECK(savings_ratio({3, 64, 64, 64 * 64, 0}) == 0.0);
  for (std::uint64_t n = 0; n <= 4096; n += 97) {
    const double s = savings_ratio({2, 64, 64, n, 4});
    CHECK(s >= 0.0);
    CHECK(s <= 0.5);
  }
}

TEST_CASE("trainable parameter counts") {
  CHECK(trainable_params(Method::kMacp, 64, 64, 90) == 90);
  CHECK(trainable_params(Method::kRandomSpectral, 64, 64, 128) == 128);
  CHECK(trainable_params(Method::kLowRank, 64, 64, 1) == 128);
  CHECK(trainable_params(Method::kLowRank, 64, 64, 0) == 0);
}

TEST_CASE("overflow and invalid queries") {
  const auto big = std::numeric_limits<std::uint64_t>::max() / 2;
  CHECK_THROWS_AS(activation_memory_macp({big, 4, 1, 0, 0}), OverflowError);
  CHECK_THROWS_AS(activation_memory_lowrank({big + 1, 1, 1, 0, 0}), OverflowError);
  CHECK_THROWS_AS(activation_memory_macp({0, 1, 1, 0, 0}), InvalidArgument);
  CHECK(activation_bytes(10) == 40);
  CHECK(activation_bytes(10, 2) == 20);
}
