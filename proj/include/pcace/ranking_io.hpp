#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "pcace/pipeline.hpp"

namespace pcace {

std::string ranking_to_json(const PcaceRanking& r);
/// Throws ParseError on malformed JSON or missing fields.
PcaceRanking ranking_from_json(const std::string& text);
PcaceRanking read_ranking(const std::filesystem::path& path);

/// Header "bin_lower,bin_upper,count".
void write_histogram_csv(std::ostream& os, const PcaceRanking& r, std::size_t bins);
/// Header "rank,pcace_value,channel_index"; rank is 1-based.
void write_sorted_csv(std::ostream& os, const PcaceRanking& r);

/// Writes to a sibling temporary file and renames it over `path`, so a
/// failure never leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace pcace
