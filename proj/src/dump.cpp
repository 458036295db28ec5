#include "pcace/dump.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <string>

#include "pcace/error.hpp"

namespace pcace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(ScoreKind kind) {
  return kind == ScoreKind::PreSoftmaxClassLogit ? "pre_softmax_class_logit"
                                                 : "regression_output";
}

ScoreKind score_kind_from_string(const std::string& s) {
  if (s == "pre_softmax_class_logit") return ScoreKind::PreSoftmaxClassLogit;
  if (s == "regression_output") return ScoreKind::RegressionOutput;
  throw Error(ErrorCode::InvalidManifest, "unknown score_kind '" + s + "'");
}

void DumpManifest::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidManifest, msg); };
  if (n_images < 10) fail("n_images must be >= 10, got " + std::to_string(n_images));
  if (n_channels < 1) fail("n_channels must be >= 1");
  if (map_height < 1 || map_width < 1) fail("map_height and map_width must be >= 1");
  if (dtype != "f32le") fail("dtype must be \"f32le\", got \"" + dtype + "\"");
  if (channel_files.size() != n_channels) {
    fail("channel_files has " + std::to_string(channel_files.size()) + " entries, n_channels is " +
         std::to_string(n_channels));
  }
  if (score_file.empty()) fail("score_file is empty");
}

namespace {

std::size_t get_count(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw Error(ErrorCode::InvalidManifest, std::string("'") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::vector<char> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

float decode_f32le(const char* p) {
  std::uint32_t bits = 0;
  for (int b = 3; b >= 0; --b) bits = (bits << 8) | static_cast<unsigned char>(p[b]);
  return std::bit_cast<float>(bits);
}

void encode_f32le(float f, char* p) {
  auto bits = std::bit_cast<std::uint32_t>(f);
  for (int b = 0; b < 4; ++b) {
    p[b] = static_cast<char>(bits & 0xffu);
    bits >>= 8;
  }
}

std::vector<char> read_sized(const fs::path& path, std::size_t expected) {
  if (!fs::exists(path)) throw Error(ErrorCode::IoError, "missing data file " + path.string());
  auto bytes = read_bytes(path);
  if (bytes.size() != expected) {
    throw Error(ErrorCode::SizeMismatch, path.filename().string() + " has " +
                                             std::to_string(bytes.size()) + " bytes, expected " +
                                             std::to_string(expected));
  }
  return bytes;
}

void write_file(const fs::path& path, const std::vector<char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

}  // namespace

DumpManifest read_manifest(const fs::path& dir) {
  const fs::path path = dir / "manifest.json";
  if (!fs::is_regular_file(path)) {
    throw Error(ErrorCode::ManifestMissing, "no manifest.json in " + dir.string());
  }
  json j;
  try {
    std::ifstream in(path);
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidManifest, path.string() + ": " + e.what());
  }

  DumpManifest m;
  try {
    m.layer_name = j.at("layer_name").get<std::string>();
    m.n_images = get_count(j, "n_images");
    m.n_channels = get_count(j, "n_channels");
    m.map_height = get_count(j, "map_height");
    m.map_width = get_count(j, "map_width");
    m.score_kind = score_kind_from_string(j.at("score_kind").get<std::string>());
    const auto& label = j.at("class_label");
    if (!label.is_null()) m.class_label = label.get<std::string>();
    m.dtype = j.at("dtype").get<std::string>();
    m.channel_files = j.at("channel_files").get<std::vector<std::string>>();
    m.score_file = j.at("score_file").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidManifest, path.string() + ": " + e.what());
  }
  m.validate();
  return m;
}

ActivationDump load_dump(const fs::path& dir) {
  DumpManifest m = read_manifest(dir);
  const std::size_t n = m.n_images;
  const std::size_t k1 = m.map_height;
  const std::size_t k2 = m.map_width;
  const std::size_t cells = k1 * k2;

  std::vector<ChannelActivationMatrix> channels;
  channels.reserve(m.n_channels);
  for (std::size_t c = 0; c < m.n_channels; ++c) {
    const auto bytes = read_sized(dir / m.channel_files[c], 4 * n * cells);
    std::vector<double> values(cells * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t r = 0; r < k1; ++r) {
        for (std::size_t col = 0; col < k2; ++col) {
          const std::size_t src = ((i * k1) + r) * k2 + col;
          const float f = decode_f32le(bytes.data() + 4 * src);
          if (!std::isfinite(f)) {
            throw Error(ErrorCode::NonFiniteValue,
                        "channel " + std::to_string(c) + " image " + std::to_string(i) +
                            " (row " + std::to_string(r) + ", col " + std::to_string(col) + ")");
          }
          values[(r * k2 + col) * n + i] = static_cast<double>(f);
        }
      }
    }
    channels.push_back({c, DenseMatrix(cells, n, std::move(values))});
  }

  const auto bytes = read_sized(dir / m.score_file, 4 * n);
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    const float f = decode_f32le(bytes.data() + 4 * i);
    if (!std::isfinite(f)) {
      throw Error(ErrorCode::NonFiniteValue, "score file image " + std::to_string(i));
    }
    scores[i] = static_cast<double>(f);
  }
  return {std::move(m), std::move(channels), ResponseVector(std::move(scores))};
}

void write_dump(const fs::path& dir, const DumpManifest& manifest,
                const std::vector<DenseMatrix>& channels, const std::vector<double>& scores) {
  manifest.validate();
  const std::size_t n = manifest.n_images;
  const std::size_t k1 = manifest.map_height;
  const std::size_t k2 = manifest.map_width;
  if (channels.size() != manifest.n_channels) {
    throw Error(ErrorCode::ShapeMismatch, "channel count disagrees with manifest");
  }
  if (scores.size() != n) throw Error(ErrorCode::ShapeMismatch, "score count disagrees with manifest");

  fs::create_directories(dir);
  for (std::size_t c = 0; c < channels.size(); ++c) {
    const DenseMatrix& mat = channels[c];
    if (mat.rows() != k1 * k2 || mat.cols() != n) {
      throw Error(ErrorCode::ShapeMismatch, "channel " + std::to_string(c) + " is " +
                                                std::to_string(mat.rows()) + "x" +
                                                std::to_string(mat.cols()));
    }
    std::vector<char> bytes(4 * n * k1 * k2);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t cell = 0; cell < k1 * k2; ++cell) {
        encode_f32le(static_cast<float>(mat(cell, i)), bytes.data() + 4 * (i * k1 * k2 + cell));
      }
    }
    write_file(dir / manifest.channel_files[c], bytes);
  }
  std::vector<char> bytes(4 * n);
  for (std::size_t i = 0; i < n; ++i) encode_f32le(static_cast<float>(scores[i]), bytes.data() + 4 * i);
  write_file(dir / manifest.score_file, bytes);

  json j;
  j["layer_name"] = manifest.layer_name;
  j["n_images"] = manifest.n_images;
  j["n_channels"] = manifest.n_channels;
  j["map_height"] = manifest.map_height;
  j["map_width"] = manifest.map_width;
  j["score_kind"] = to_string(manifest.score_kind);
  j["class_label"] = manifest.class_label ? json(*manifest.class_label) : json(nullptr);
  j["dtype"] = manifest.dtype;
  j["channel_files"] = manifest.channel_files;
  j["score_file"] = manifest.score_file;
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write manifest in " + dir.string());
  out << j.dump(2) << '\n';
}

}  // namespace pcace
