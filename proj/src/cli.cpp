#include "pcace/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>

#include "pcace/error.hpp"
#include "pcace/pipeline.hpp"
#include "pcace/ranking_io.hpp"

namespace pcace {

namespace {

struct RankArgs {
  std::string dump_dir;
  std::optional<double> pca_frac;
  std::optional<std::size_t> pca_dim;
  double span = 0.3;
  double tol = 1e-4;
  std::size_t max_iter = 100;
  std::string out_path;
  std::size_t jobs = 1;
};

std::string positive_real(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && v > 0.0) return {};
  } catch (...) {
  }
  return "must be a positive number";
}

std::string unit_fraction(const std::string& s) {
  if (auto msg = positive_real(s); !msg.empty()) return "must lie in (0, 1]";
  return std::stod(s) <= 1.0 ? std::string{} : "must lie in (0, 1]";
}

std::string positive_count(const std::string& s) {
  if (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos &&
      s.find_first_not_of('0') != std::string::npos) {
    return {};
  }
  return "must be an integer >= 1";
}

const auto kPositiveCount = CLI::Validator(positive_count, "COUNT>=1");
const auto kPositiveReal = CLI::Validator(positive_real, "POSITIVE");
const auto kUnitFraction = CLI::Validator(unit_fraction, "(0,1]");

std::string summary_line(const PcaceRanking& r) {
  std::ostringstream ss;
  ss << "layer " << r.layer_name;
  if (r.class_label) ss << " (class " << *r.class_label << ")";
  ss << ": " << r.entries.size() << " channels; top:";
  for (std::size_t i = 0; i < std::min<std::size_t>(3, r.entries.size()); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " %zu (%.4f)", r.entries[i].channel_index,
                  r.entries[i].pcace_value);
    ss << buf;
  }
  return ss.str();
}

int cmd_rank(const RankArgs& a, std::ostream& out, std::ostream& err) {
  PipelineConfig cfg;
  if (a.pca_dim) cfg.pca = PcaConfig::dimension(*a.pca_dim);
  if (a.pca_frac) cfg.pca = PcaConfig::fraction(*a.pca_frac);
  cfg.smoother.span = a.span;
  cfg.tol = a.tol;
  cfg.max_iter = a.max_iter;

  const ActivationDump dump = load_dump(a.dump_dir);
  const PcaceRanking ranking = rank_layer(dump, cfg, a.jobs);
  const std::string json = ranking_to_json(ranking);
  if (a.out_path.empty() || a.out_path == "-") {
    out << json;
  } else {
    write_file_atomic(a.out_path, json);
  }
  err << summary_line(ranking) << '\n';
  return kExitOk;
}

int cmd_compare(const std::string& a, const std::string& b, std::ostream& out) {
  const double rho = compare_rankings(read_ranking(a), read_ranking(b));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", rho);
  out << buf << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rank convolutional channels by PCA + ACE maximal correlation", "pcace"};
  app.require_subcommand(1);

  RankArgs rank;
  auto* rank_cmd = app.add_subcommand("rank", "Score every channel of an activation dump");
  rank_cmd->add_option("dump_dir", rank.dump_dir, "Dump directory with manifest.json")->required();
  auto* frac = rank_cmd->add_option("--pca-frac", rank.pca_frac, "Fraction of predictors kept by PCA (default 0.5)")
                   ->check(kUnitFraction);
  auto* dim = rank_cmd->add_option("--pca-dim", rank.pca_dim, "Absolute number of principal components")
                  ->check(kPositiveCount);
  frac->excludes(dim);
  rank_cmd->add_option("--span", rank.span, "Smoother span fraction")->check(kUnitFraction);
  rank_cmd->add_option("--tol", rank.tol, "ACE convergence tolerance")->check(kPositiveReal);
  rank_cmd->add_option("--max-iter", rank.max_iter, "ACE outer iteration cap")->check(kPositiveCount);
  rank_cmd->add_option("--out", rank.out_path, "Ranking JSON path (default stdout)");
  rank_cmd->add_option("--jobs", rank.jobs, "Channels evaluated in parallel")->check(kPositiveCount);

  std::string cmp_a, cmp_b;
  auto* compare_cmd = app.add_subcommand("compare", "Spearman correlation between two rankings");
  compare_cmd->add_option("ranking_a", cmp_a)->required();
  compare_cmd->add_option("ranking_b", cmp_b)->required();

  std::string hist_path;
  std::size_t bins = 20;
  auto* hist_cmd = app.add_subcommand("hist", "Histogram of PCACE values as CSV");
  hist_cmd->add_option("ranking", hist_path)->required();
  hist_cmd->add_option("--bins", bins, "Number of equal-width bins over [0, 1]")->check(kPositiveCount);

  std::string sorted_path;
  auto* sorted_cmd = app.add_subcommand("sorted", "PCACE values in ranking order as CSV");
  sorted_cmd->add_option("ranking", sorted_path)->required();

  std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsageError;
  }

  try {
    if (*rank_cmd) return cmd_rank(rank, out, err);
    if (*compare_cmd) return cmd_compare(cmp_a, cmp_b, out);
    if (*hist_cmd) {
      write_histogram_csv(out, read_ranking(hist_path), bins);
      return kExitOk;
    }
    if (*sorted_cmd) {
      write_sorted_csv(out, read_ranking(sorted_path));
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitPipelineError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitPipelineError;
  }
  return kExitUsageError;
}

}  // namespace pcace
