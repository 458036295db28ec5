#pragma once

// Activation dump directory:
//
//   manifest.json   layer_name, n_images, n_channels, map_height, map_width,
//                   score_kind, class_label, dtype ("f32le"), channel_files,
//                   score_file
//   <channel file>  n * k1 * k2 little-endian float32, image-major then
//                   row-major within the map:
//                   index(i, r, c) = ((i * k1) + r) * k2 + c
//   <score file>    n little-endian float32 in image order
//
// Values are widened to double on load. Each channel becomes a
// (k1 * k2) x n matrix with one column per image.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pcace/matrix.hpp"

namespace pcace {

enum class ScoreKind { PreSoftmaxClassLogit, RegressionOutput };

std::string to_string(ScoreKind kind);
ScoreKind score_kind_from_string(const std::string& s);

struct DumpManifest {
  std::string layer_name;
  std::size_t n_images = 0;
  std::size_t n_channels = 0;
  std::size_t map_height = 0;
  std::size_t map_width = 0;
  ScoreKind score_kind = ScoreKind::PreSoftmaxClassLogit;
  std::optional<std::string> class_label;
  std::string dtype = "f32le";
  std::vector<std::string> channel_files;
  std::string score_file;

  std::size_t map_size() const noexcept { return map_height * map_width; }
  /// Checks the shape invariants (n >= 10, c >= 1, k1, k2 >= 1, file list length).
  void validate() const;

  bool operator==(const DumpManifest&) const = default;
};

struct ChannelActivationMatrix {
  std::size_t channel_index = 0;
  DenseMatrix matrix;  // k1*k2 rows, n columns
};

struct ActivationDump {
  DumpManifest manifest;
  std::vector<ChannelActivationMatrix> channels;
  ResponseVector scores;
};

DumpManifest read_manifest(const std::filesystem::path& dir);

/// Throws ManifestMissing, InvalidManifest, SizeMismatch, NonFiniteValue or
/// IoError.
ActivationDump load_dump(const std::filesystem::path& dir);

/// Reference writer. Values are narrowed to float32. Channel matrices must be
/// (k1*k2) x n and match the manifest; the directory is created if needed.
void write_dump(const std::filesystem::path& dir, const DumpManifest& manifest,
                const std::vector<DenseMatrix>& channels, const std::vector<double>& scores);

}  // namespace pcace
