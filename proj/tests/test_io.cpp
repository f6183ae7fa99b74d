#include <doctest.h>

#include <cstring>
#include <filesystem>

#include <json.hpp>

#include "macp/adapter_io.hpp"
#include "macp/baselines.hpp"
#include "macp/errors.hpp"
#include "oracles.hpp"

using namespace macp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "macp_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

FormatErrc decode_error(const std::vector<std::uint8_t>& bytes) {
  try {
    decode_matrix(bytes);
  } catch (const FormatError& e) {
    return e.code();
  }
  FAIL("expected a FormatError");
  return FormatErrc::kIo;
}

FormatErrc checkpoint_error(const std::string& text) {
  try {
    deserialize_checkpoint(text);
  } catch (const FormatError& e) {
    return e.code();
  }
  FAIL("expected a FormatError");
  return FormatErrc::kIo;
}

}  // namespace

TEST_CASE("1x1 matrix file is 14 header bytes plus 8 payload bytes") {
  const DenseMatrix x(1, 1, {3.5});
  const auto bytes = encode_matrix(x);
  REQUIRE(bytes.size() == 22);
  CHECK(std::memcmp(bytes.data(), "MACP", 4) == 0);
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 1);
  CHECK(bytes[6] == 1);
  CHECK(bytes[10] == 1);
  // 3.5 = 0x400C000000000000, little-endian
  CHECK(bytes[21] == 0x40);
  CHECK(bytes[20] == 0x0C);
  CHECK(encode_matrix(x, Dtype::kFloat32).size() == 18);

  const auto path = scratch("one.bin");
  write_matrix(path, x);
  CHECK(fs::file_size(path) == 22);
  CHECK(read_matrix(path).matrix == x);
}

TEST_CASE("matrix files round-trip") {
  Rng rng(1);
  const auto x = oracle::random_matrix(64, 64, rng, -100, 100);
  const auto path = scratch("w64.bin");
  write_matrix(path, x);
  const auto back = read_matrix(path);
  CHECK(back.matrix == x);
  CHECK(back.dtype == Dtype::kFloat64);

  write_matrix(path, x, Dtype::kFloat32);
  const auto f32 = read_matrix(path);
  CHECK(f32.dtype == Dtype::kFloat32);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(f32.matrix.values()[i] == static_cast<double>(static_cast<float>(x.values()[i])));
  }
  CHECK(encode_matrix(f32.matrix, Dtype::kFloat32) == encode_matrix(x, Dtype::kFloat32));
}

TEST_CASE("corrupted weight files raise distinct errors") {
  const auto good = encode_matrix(DenseMatrix(2, 3, {1, 2, 3, 4, 5, 6}));
  auto bad = good;
  bad[0] = 'X';
  CHECK(decode_error(bad) == FormatErrc::kBadMagic);
  CHECK(decode_error({}) == FormatErrc::kBadMagic);
  bad = good;
  bad[4] = 2;
  CHECK(decode_error(bad) == FormatErrc::kVersionMismatch);
  bad = good;
  bad[5] = 7;
  CHECK(decode_error(bad) == FormatErrc::kBadDtype);
  bad = good;
  bad.pop_back();
  CHECK(decode_error(bad) == FormatErrc::kTruncatedPayload);
  CHECK(decode_error({good.begin(), good.begin() + 9}) == FormatErrc::kTruncatedPayload);
  bad = good;
  bad.push_back(0);
  CHECK(decode_error(bad) == FormatErrc::kTrailingBytes);
  bad = good;
  for (int i = 6; i < 14; ++i) bad[i] = 0xFF;
  CHECK(decode_error(bad) == FormatErrc::kDimensionOverflow);
  bad = good;
  std::memset(bad.data() + 6, 0, 4);
  CHECK(decode_error(bad) == FormatErrc::kBadValue);
  bad = good;
  const double nan = std::nan("");
  std::memcpy(bad.data() + 14, &nan, 8);
  CHECK(decode_error(bad) == FormatErrc::kNonFinite);
  CHECK_THROWS_AS(read_matrix(scratch("missing.bin")), FormatError);
}

TEST_CASE("checkpoints round-trip canonically") {
  Rng rng(2);
  const auto base = oracle::random_matrix(10, 12, rng);
  auto state = init_adapter(base, PartitionScheme::kFourBand, 25, 0.6, 2.5, 123456789012345ULL);
  const auto text = serialize_checkpoint(state);
  const auto back = deserialize_checkpoint(text);
  CHECK(back == state);
  CHECK(serialize_checkpoint(back) == text);
  CHECK(text.back() == '\n');
  CHECK(text.find("\"coeffs\"") < text.find("\"coords\""));

  const auto empty = init_adapter(base, PartitionScheme::kLowOnly, 0, 0.7, 1.0, 0);
  CHECK(deserialize_checkpoint(serialize_checkpoint(empty)) == empty);

  const auto rs = random_spectral_init(12, 10, 30, 1.0, 5);
  CHECK(deserialize_checkpoint(serialize_checkpoint(rs)) == rs);

  const auto path = scratch("ckpt.json");
  write_checkpoint(path, state);
  CHECK(read_checkpoint(path) == state);
  CHECK(read_file(path) == text);
}

TEST_CASE("checkpoint errors are typed") {
  AdapterState s;
  s.rows = 2;
  s.cols = 2;
  s.plan.rows = 2;
  s.plan.cols = 2;
  s.plan.coords = {{0, 0}, {1, 1}};
  s.plan.band = {0, 2};
  s.plan.provenance = {Provenance::kEnergy, Provenance::kRandom};
  s.coeffs = {0.25, -1e-300};
  const auto text = serialize_checkpoint(s);
  auto doc = nlohmann::json::parse(text);

  auto mutate = [&](auto&& fn) {
    auto copy = doc;
    fn(copy);
    return copy.dump(2);
  };
  CHECK(checkpoint_error(mutate([](auto& j) { j.erase("alpha"); })) == FormatErrc::kMissingKey);
  CHECK(checkpoint_error(mutate([](auto& j) { j.erase("coords"); })) == FormatErrc::kMissingKey);
  CHECK(checkpoint_error(mutate([](auto& j) { j["coords"].erase(0); })) == FormatErrc::kLengthMismatch);
  CHECK(checkpoint_error(mutate([](auto& j) { j["coeffs"][1] = nullptr; })) == FormatErrc::kNonFinite);
  CHECK(checkpoint_error(mutate([](auto& j) { j["coeffs"][0] = "inf"; })) == FormatErrc::kNonFinite);
  CHECK(checkpoint_error(mutate([](auto& j) { j["coords"][0] = {5, 0}; })) == FormatErrc::kBadValue);
  CHECK(checkpoint_error(mutate([](auto& j) { j["scheme"] = "zigzag"; })) == FormatErrc::kBadValue);
  CHECK(checkpoint_error(mutate([](auto& j) { j["provenance"][0] = "magic"; })) == FormatErrc::kBadValue);
  CHECK(checkpoint_error("{not json") == FormatErrc::kParse);
  CHECK(checkpoint_error(R"({"coeffs": [1e999]})") == FormatErrc::kParse);

  s.coeffs[0] = std::nan("");
  CHECK_THROWS_AS(serialize_checkpoint(s), FormatError);
}
