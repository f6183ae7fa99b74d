#include "macp/adapter_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "macp/errors.hpp"
#include "macp/partition.hpp"

namespace macp {

namespace {

constexpr char kMagic[4] = {'M', 'A', 'C', 'P'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(std::span<const std::uint8_t> bytes, std::size_t offset, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v |= std::uint64_t(bytes[offset + i]) << (8 * i);
  return v;
}

std::size_t element_size(Dtype dtype) { return dtype == Dtype::kFloat32 ? 4 : 8; }

using Json = nlohmann::json;

const Json& require_key(const Json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw FormatError(FormatErrc::kMissingKey, std::string("checkpoint lacks '") + key + "'");
  return *it;
}

std::string_view provenance_name(Provenance p) { return p == Provenance::kEnergy ? "energy" : "random"; }

}  // namespace

std::vector<std::uint8_t> encode_matrix(const DenseMatrix& matrix, Dtype dtype) {
  if (matrix.empty()) throw ShapeError("encode_matrix: empty matrix");
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (matrix.rows() > kMax || matrix.cols() > kMax) {
    throw FormatError(FormatErrc::kDimensionOverflow, "matrix dimensions exceed 32 bits");
  }
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  out.push_back(kWeightFormatVersion);
  out.push_back(static_cast<std::uint8_t>(dtype));
  put_u32(out, static_cast<std::uint32_t>(matrix.rows()));
  put_u32(out, static_cast<std::uint32_t>(matrix.cols()));
  out.reserve(out.size() + matrix.size() * element_size(dtype));
  for (double v : matrix.values()) {
    if (dtype == Dtype::kFloat64) {
      put_u64(out, std::bit_cast<std::uint64_t>(v));
    } else {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
  }
  return out;
}

LoadedMatrix decode_matrix(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError(FormatErrc::kBadMagic, "not a MACP weight file");
  }
  if (bytes.size() < kWeightHeaderSize) {
    throw FormatError(FormatErrc::kTruncatedPayload, "header shorter than 14 bytes");
  }
  if (bytes[4] != kWeightFormatVersion) {
    throw FormatError(FormatErrc::kVersionMismatch,
                      "unsupported version " + std::to_string(bytes[4]));
  }
  if (bytes[5] > 1) throw FormatError(FormatErrc::kBadDtype, "dtype byte " + std::to_string(bytes[5]));
  const auto dtype = static_cast<Dtype>(bytes[5]);
  const auto rows = get_le(bytes, 6, 4);
  const auto cols = get_le(bytes, 10, 4);
  if (rows == 0 || cols == 0) throw FormatError(FormatErrc::kBadValue, "zero matrix dimension");
  const auto width = element_size(dtype);
  unsigned __int128 payload = static_cast<unsigned __int128>(rows) * cols * width;
  if (payload > std::numeric_limits<std::size_t>::max() / 2) {
    throw FormatError(FormatErrc::kDimensionOverflow, "payload size overflows");
  }
  const std::size_t expected = kWeightHeaderSize + static_cast<std::size_t>(payload);
  if (bytes.size() < expected) {
    throw FormatError(FormatErrc::kTruncatedPayload, "expected " + std::to_string(expected) +
                                                         " bytes, got " + std::to_string(bytes.size()));
  }
  if (bytes.size() > expected) throw FormatError(FormatErrc::kTrailingBytes, "data after payload");

  std::vector<double> values(static_cast<std::size_t>(rows * cols));
  std::size_t offset = kWeightHeaderSize;
  for (double& v : values) {
    if (dtype == Dtype::kFloat64) {
      v = std::bit_cast<double>(get_le(bytes, offset, 8));
    } else {
      v = std::bit_cast<float>(static_cast<std::uint32_t>(get_le(bytes, offset, 4)));
    }
    if (!std::isfinite(v)) throw FormatError(FormatErrc::kNonFinite, "weight payload holds NaN/Inf");
    offset += width;
  }
  return {DenseMatrix(rows, cols, std::move(values)), dtype};
}

void write_matrix(const std::filesystem::path& path, const DenseMatrix& matrix, Dtype dtype) {
  const auto bytes = encode_matrix(matrix, dtype);
  write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

LoadedMatrix read_matrix(const std::filesystem::path& path) {
  const std::string raw = read_file(path);
  return decode_matrix(std::span(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()));
}

std::string serialize_checkpoint(const AdapterState& state) {
  validate(state);
  Json doc;
  doc["shape"] = {state.rows, state.cols};
  doc["alpha"] = state.alpha;
  doc["delta"] = state.plan.delta;
  doc["seed"] = state.plan.seed;
  doc["scheme"] = std::string(scheme_name(state.plan.scheme));
  Json coords = Json::array();
  Json provenance = Json::array();
  Json coeffs = Json::array();
  for (std::size_t k = 0; k < state.coeffs.size(); ++k) {
    coords.push_back({state.plan.coords[k].u, state.plan.coords[k].v});
    provenance.push_back(std::string(provenance_name(state.plan.provenance[k])));
    if (!std::isfinite(state.coeffs[k])) {
      throw FormatError(FormatErrc::kNonFinite, "coefficient " + std::to_string(k) + " is not finite");
    }
    coeffs.push_back(state.coeffs[k]);
  }
  doc["coords"] = std::move(coords);
  doc["provenance"] = std::move(provenance);
  doc["coeffs"] = std::move(coeffs);
  // nlohmann::json keeps object keys sorted and prints doubles in shortest
  // round-trip form, which together make the text canonical.
  return doc.dump(2) + "\n";
}

AdapterState deserialize_checkpoint(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::exception& e) {
    throw FormatError(FormatErrc::kParse, e.what());
  }
  if (!doc.is_object()) throw FormatError(FormatErrc::kParse, "checkpoint must be a JSON object");

  AdapterState state;
  try {
    const auto& shape = require_key(doc, "shape");
    const auto& alpha = require_key(doc, "alpha");
    const auto& delta = require_key(doc, "delta");
    const auto& seed = require_key(doc, "seed");
    const auto& scheme = require_key(doc, "scheme");
    const auto& coords = require_key(doc, "coords");
    const auto& provenance = require_key(doc, "provenance");
    const auto& coeffs = require_key(doc, "coeffs");

    if (!shape.is_array() || shape.size() != 2) {
      throw FormatError(FormatErrc::kBadValue, "shape must be [rows, cols]");
    }
    state.rows = shape[0].get<std::size_t>();
    state.cols = shape[1].get<std::size_t>();
    if (state.rows == 0 || state.cols == 0) throw FormatError(FormatErrc::kBadValue, "zero shape");
    if (!alpha.is_number()) throw FormatError(FormatErrc::kNonFinite, "alpha is not a finite number");
    state.alpha = alpha.get<double>();
    state.plan.delta = delta.get<double>();
    if (!(state.plan.delta >= 0.0 && state.plan.delta <= 1.0)) {
      throw FormatError(FormatErrc::kBadValue, "delta outside [0, 1]");
    }
    state.plan.seed = seed.get<std::uint64_t>();
    state.plan.scheme = parse_scheme(scheme.get<std::string>());
    state.plan.rows = state.rows;
    state.plan.cols = state.cols;

    if (!coords.is_array() || !provenance.is_array() || !coeffs.is_array()) {
      throw FormatError(FormatErrc::kBadValue, "coords, provenance and coeffs must be arrays");
    }
    if (coords.size() != coeffs.size() || provenance.size() != coeffs.size()) {
      throw FormatError(FormatErrc::kLengthMismatch,
                        "coords=" + std::to_string(coords.size()) + " provenance=" +
                            std::to_string(provenance.size()) + " coeffs=" + std::to_string(coeffs.size()));
    }
    const auto mask = build_partition(state.rows, state.cols, state.plan.scheme);
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      const auto& c = coords[k];
      if (!c.is_array() || c.size() != 2) throw FormatError(FormatErrc::kBadValue, "coord must be [u, v]");
      const Coord coord{c[0].get<std::uint32_t>(), c[1].get<std::uint32_t>()};
      if (coord.u >= state.rows || coord.v >= state.cols) {
        throw FormatError(FormatErrc::kBadValue, "coord outside the grid");
      }
      const auto p = provenance[k].get<std::string>();
      if (p != "energy" && p != "random") throw FormatError(FormatErrc::kBadValue, "provenance '" + p + "'");
      if (!coeffs[k].is_number()) {
        throw FormatError(FormatErrc::kNonFinite, "coefficient " + std::to_string(k) + " is not a finite number");
      }
      const double value = coeffs[k].get<double>();
      if (!std::isfinite(value)) {
        throw FormatError(FormatErrc::kNonFinite, "coefficient " + std::to_string(k) + " is not finite");
      }
      state.plan.coords.push_back(coord);
      state.plan.provenance.push_back(p == "energy" ? Provenance::kEnergy : Provenance::kRandom);
      state.plan.band.push_back(mask.band(coord.u, coord.v));
      state.coeffs.push_back(value);
    }
  } catch (const Json::exception& e) {
    throw FormatError(FormatErrc::kBadValue, e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(FormatErrc::kBadValue, e.what());
  }
  if (!std::isfinite(state.alpha) || state.alpha == 0.0) {
    throw FormatError(FormatErrc::kBadValue, "alpha must be finite and nonzero");
  }
  return state;
}

void write_checkpoint(const std::filesystem::path& path, const AdapterState& state) {
  write_file_atomic(path, serialize_checkpoint(state));
}

AdapterState read_checkpoint(const std::filesystem::path& path) {
  return deserialize_checkpoint(read_file(path));
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(FormatErrc::kIo, "cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw FormatError(FormatErrc::kIo, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw FormatError(FormatErrc::kIo, "cannot rename onto " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatErrc::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace macp
