#include "pcace/ranking_io.hpp"

#include <charconv>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "pcace/error.hpp"

namespace pcace {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json config_to_json(const PipelineConfig& c) {
  json pca;
  if (c.pca.is_fraction()) {
    pca["fraction"] = c.pca.fraction_value();
  } else {
    pca["dimension"] = c.pca.dimension_value();
  }
  return {{"pca", pca},
          {"smoother", {{"span", c.smoother.span}}},
          {"tol", c.tol},
          {"max_iter", c.max_iter}};
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  const auto& pca = j.at("pca");
  if (pca.contains("dimension")) {
    c.pca = PcaConfig::dimension(pca.at("dimension").get<std::size_t>());
  } else {
    c.pca = PcaConfig::fraction(pca.at("fraction").get<double>());
  }
  c.smoother.span = j.at("smoother").at("span").get<double>();
  c.tol = j.at("tol").get<double>();
  c.max_iter = j.at("max_iter").get<std::size_t>();
  return c;
}

// Shortest round-trip representation, locale independent.
std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

std::string ranking_to_json(const PcaceRanking& r) {
  json j;
  j["layer_name"] = r.layer_name;
  j["class_label"] = r.class_label ? json(*r.class_label) : json(nullptr);
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"channel_index", e.channel_index},
                       {"pcace_value", e.pcace_value},
                       {"converged", e.converged},
                       {"dropped_rows", e.dropped_rows},
                       {"retained_dim", e.retained_dim},
                       {"iterations", e.iterations},
                       {"dead", e.dead}});
  }
  j["entries"] = std::move(entries);
  j["config_echo"] = config_to_json(r.config);
  return j.dump(2) + "\n";
}

PcaceRanking ranking_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    PcaceRanking r;
    r.layer_name = j.at("layer_name").get<std::string>();
    if (j.contains("class_label") && !j.at("class_label").is_null()) {
      r.class_label = j.at("class_label").get<std::string>();
    }
    for (const auto& e : j.at("entries")) {
      RankingEntry entry;
      entry.channel_index = e.at("channel_index").get<std::size_t>();
      entry.pcace_value = e.at("pcace_value").get<double>();
      entry.converged = e.value("converged", false);
      entry.dropped_rows = e.value("dropped_rows", std::size_t{0});
      entry.retained_dim = e.value("retained_dim", std::size_t{0});
      entry.iterations = e.value("iterations", std::size_t{0});
      entry.dead = e.value("dead", false);
      r.entries.push_back(entry);
    }
    if (j.contains("config_echo")) r.config = config_from_json(j.at("config_echo"));
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

PcaceRanking read_ranking(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return ranking_from_json(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.context());
  }
}

void write_histogram_csv(std::ostream& os, const PcaceRanking& r, std::size_t bins) {
  os << "bin_lower,bin_upper,count\n";
  for (const auto& b : histogram(r, bins)) {
    os << format_double(b.lower) << ',' << format_double(b.upper) << ',' << b.count << '\n';
  }
}

void write_sorted_csv(std::ostream& os, const PcaceRanking& r) {
  std::vector<RankingEntry> e = r.entries;
  sort_entries(e);
  os << "rank,pcace_value,channel_index\n";
  for (std::size_t i = 0; i < e.size(); ++i) {
    os << (i + 1) << ',' << format_double(e[i].pcace_value) << ',' << e[i].channel_index << '\n';
  }
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw Error(ErrorCode::IoError, "short write to " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorCode::IoError, "cannot rename onto " + path.string() + ": " + ec.message());
  }
}

}  // namespace pcace
