#include <doctest.h>

#include <cmath>
#include <numeric>

#include "pcace/error.hpp"
#include "pcace/pipeline.hpp"
#include "support.hpp"

using namespace pcace;

namespace {

PcaceRanking ranking_of(const std::vector<double>& values) {
  PcaceRanking r;
  r.layer_name = "test";
  for (std::size_t i = 0; i < values.size(); ++i) r.entries.push_back({i, values[i]});
  sort_entries(r.entries);
  return r;
}

// Spearman by counting: rank = 1 + #greater + (#tied - 1) / 2.
double spearman_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double greater = 0, tied = 0;
      for (double w : v) {
        greater += w > v[i];
        tied += w == v[i];
      }
      r[i] = 1.0 + greater + (tied - 1.0) / 2.0;
    }
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  const double ma = test::oracle_mean(ra), mb = test::oracle_mean(rb);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

ActivationDump permuted(const ActivationDump& d, const std::vector<std::size_t>& perm) {
  const std::size_t n = perm.size();
  std::vector<double> y(n);
  for (std::size_t j = 0; j < n; ++j) y[j] = d.scores[perm[j]];
  ActivationDump out{d.manifest, {}, ResponseVector(y)};
  for (const auto& ch : d.channels) {
    DenseMatrix m(ch.matrix.rows(), n);
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t j = 0; j < n; ++j) m(r, j) = ch.matrix(r, perm[j]);
    out.channels.push_back({ch.channel_index, std::move(m)});
  }
  return out;
}

ActivationDump with_scores(const ActivationDump& d, std::vector<double> y) {
  return {d.manifest, d.channels, ResponseVector(std::move(y))};
}

}  // namespace

TEST_CASE("dead channel scores exactly zero") {
  std::mt19937_64 rng(1);
  const ChannelActivationMatrix cam{0, DenseMatrix(16, 50)};
  const auto s = pcace_channel(cam, ResponseVector(test::gaussian(rng, 50)), {});
  CHECK(s.pcace_value == 0.0);
  CHECK(s.diagnostics.dead);
  CHECK(s.diagnostics.dropped_rows == 16);
}

TEST_CASE("pcace_channel shape and response errors") {
  std::mt19937_64 rng(2);
  const ChannelActivationMatrix cam{0, DenseMatrix(4, 30, test::gaussian(rng, 120))};
  try {
    pcace_channel(cam, ResponseVector(test::gaussian(rng, 29)), {});
    FAIL("expected ShapeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ShapeMismatch);
  }
  try {
    pcace_channel(cam, ResponseVector(std::vector<double>(30, 1.0)), {});
    FAIL("expected DegenerateResponse");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateResponse);
  }
}

TEST_CASE("pcace_channel clamps an absolute dimension to the surviving rows") {
  std::mt19937_64 rng(3);
  auto values = test::gaussian(rng, 6 * 40);
  for (std::size_t j = 0; j < 40; ++j) {
    for (std::size_t r = 0; r < 4; ++r) values[r * 40 + j] = 2.0;  // 4 constant rows
  }
  PipelineConfig cfg;
  cfg.pca = PcaConfig::dimension(5);
  const auto s = pcace_channel({0, DenseMatrix(6, 40, values)},
                               ResponseVector(test::gaussian(rng, 40)), cfg);
  CHECK(s.diagnostics.dropped_rows == 4);
  CHECK(s.diagnostics.retained_dim == 2);
  CHECK(s.pcace_value >= 0.0);
  CHECK(s.pcace_value <= 1.0);
}

TEST_CASE("pcace_channel skips components without variance") {
  std::mt19937_64 rng(4);
  const auto base = test::gaussian(rng, 60);
  std::vector<double> values;
  for (double a : {1.0, 2.0, -1.0, 0.5}) {
    for (double b : base) values.push_back(a * b);
  }
  PipelineConfig cfg;
  cfg.pca = PcaConfig::fraction(1.0);
  const auto s = pcace_channel({0, DenseMatrix(4, 60, values)}, ResponseVector(base), cfg);
  CHECK(s.diagnostics.retained_dim == 1);
  CHECK(s.pcace_value >= 0.99);
}

TEST_CASE("planted channel: single-variable ACE oracle without PCA") {
  const auto dump = test::planted_dump(17, 1, 4, 300, 0);
  const auto& m = dump.channels[0].matrix;
  const DenseMatrix planted_row(1, 300, {m.row(0).begin(), m.row(0).end()});
  CHECK(std::abs(ace(planted_row, dump.scores).correlation) >= 0.95);
}

TEST_CASE("rank_layer orders the planted channel first") {
  const auto dump = test::planted_dump(99, 3, 4, 300, 1);
  const auto r = rank_layer(dump, {});
  REQUIRE(r.entries.size() == 3);
  CHECK(r.entries[0].channel_index == 1);
  for (std::size_t i = 1; i < 3; ++i) CHECK(r.entries[i - 1].pcace_value >= r.entries[i].pcace_value);
  CHECK(r.layer_name == "synthetic");
}

TEST_CASE("rank_layer on a single channel") {
  const auto r = rank_layer(test::planted_dump(5, 1, 2, 40, 7), {});
  CHECK(r.entries.size() == 1);
}

TEST_CASE("identical channels tie-break on index") {
  auto dump = test::planted_dump(6, 3, 2, 60, 99);
  dump.channels[2].matrix = dump.channels[0].matrix;
  const auto r = rank_layer(dump, {});
  std::vector<std::size_t> pos(3);
  for (std::size_t i = 0; i < 3; ++i) pos[r.entries[i].channel_index] = i;
  CHECK(pos[0] + 1 == pos[2]);
}

TEST_CASE("rank_layer attaches the failing channel index") {
  auto dump = test::planted_dump(6, 3, 2, 60, 99);
  dump.channels[2].matrix = DenseMatrix(4, 59);
  for (std::size_t jobs : {1, 3}) {
    try {
      rank_layer(dump, {}, jobs);
      FAIL("expected ShapeMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ShapeMismatch);
      CHECK(std::string(e.what()).find("channel 2") != std::string::npos);
    }
  }
}

TEST_CASE("pipeline invariances") {
  const auto dump = test::planted_dump(123, 6, 3, 120, 2, 0.5);
  const PipelineConfig cfg;
  const auto base = rank_layer(dump, cfg);

  SUBCASE("re-run is bit identical") { CHECK(rank_layer(dump, cfg) == base); }

  SUBCASE("parallel equals serial") {
    for (std::size_t jobs : {2, 4, 16}) CHECK(rank_layer(dump, cfg, jobs) == base);
  }

  auto value_of = [](const PcaceRanking& r, std::size_t ch) {
    for (const auto& e : r.entries)
      if (e.channel_index == ch) return e.pcace_value;
    return -1.0;
  };

  SUBCASE("affine response changes") {
    for (auto [scale, shift] : {std::pair{3.5, 0.0}, {1.0, -20.0}, {0.01, 7.0}}) {
      std::vector<double> y(dump.scores.values().begin(), dump.scores.values().end());
      for (double& v : y) v = scale * v + shift;
      const auto r = rank_layer(with_scores(dump, y), cfg);
      for (std::size_t c = 0; c < 6; ++c) CHECK(std::abs(value_of(r, c) - value_of(base, c)) <= 1e-9);
    }
  }

  SUBCASE("image permutation") {
    std::vector<std::size_t> perm(120);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(8);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto r = rank_layer(permuted(dump, perm), cfg);
    for (std::size_t c = 0; c < 6; ++c) CHECK(std::abs(value_of(r, c) - value_of(base, c)) <= 1e-6);
  }

  for (const auto& e : base.entries) {
    CHECK(e.pcace_value >= 0.0);
    CHECK(e.pcace_value <= 1.0);
  }
}

TEST_CASE("compare_rankings") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(20);
  for (double& x : v) x = u(rng);
  const auto a = ranking_of(v);
  CHECK(compare_rankings(a, a) == 1.0);

  // Reverse the order of the values across channels.
  std::vector<double> rev(20);
  std::vector<std::size_t> idx(20);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto i, auto j) { return v[i] < v[j]; });
  std::vector<double> sorted_v(v);
  std::sort(sorted_v.begin(), sorted_v.end(), std::greater<>());
  for (std::size_t k = 0; k < 20; ++k) rev[idx[k]] = sorted_v[k];
  CHECK(compare_rankings(a, ranking_of(rev)) == -1.0);

  SUBCASE("ties use average ranks") {
    const std::vector<double> x{0.5, 0.5, 0.1, 0.9, 0.1, 0.3};
    const std::vector<double> y{0.2, 0.8, 0.8, 0.4, 0.1, 0.1};
    CHECK(compare_rankings(ranking_of(x), ranking_of(y)) ==
          doctest::Approx(spearman_oracle(x, y)).epsilon(1e-12));
  }

  SUBCASE("mismatched channel sets") {
    auto b = ranking_of(v);
    b.entries[3].channel_index = 99;
    try {
      compare_rankings(a, b);
      FAIL("expected ChannelSetMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ChannelSetMismatch);
    }
    CHECK_THROWS_AS(compare_rankings(a, ranking_of({0.1, 0.2})), Error);
  }

  SUBCASE("independent orderings null") {
    // The null 95th percentile of |rho| for 64 channels sits near 0.246; a
    // 100-trial estimate scatters by about 0.02 around it, so estimate it
    // from 4000 trials.
    std::vector<double> rhos;
    for (std::uint64_t seed = 0; seed < 4000; ++seed) {
      std::mt19937_64 g(seed);
      std::vector<double> p(64), q(64);
      for (double& x : p) x = u(g);
      for (double& x : q) x = u(g);
      rhos.push_back(std::abs(compare_rankings(ranking_of(p), ranking_of(q))));
    }
    CHECK(test::percentile95(rhos) <= 0.25);
  }

  CHECK(compare_rankings(ranking_of({0.3, 0.3}), ranking_of({0.1, 0.2})) == 0.0);
}

TEST_CASE("histogram and sorted values") {
  const auto three = ranking_of({0.0, 0.5, 1.0});
  const auto h = histogram(three, 2);
  REQUIRE(h.size() == 2);
  CHECK(h[0].count == 1);
  CHECK(h[1].count == 2);
  CHECK(h[0].lower == 0.0);
  CHECK(h[1].upper == 1.0);

  const auto point = histogram(ranking_of(std::vector<double>(7, 0.3)), 10);
  for (std::size_t b = 0; b < 10; ++b) CHECK(point[b].count == (b == 3 ? 7u : 0u));

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(64);
  for (double& x : v) x = u(rng);
  const auto r = ranking_of(v);
  std::size_t total = 0;
  for (const auto& b : histogram(r, 8)) total += b.count;
  CHECK(total == 64);

  const auto s = sorted_values(r);
  CHECK(s.size() == 64);
  CHECK(std::is_sorted(s.begin(), s.end(), std::greater<>()));
  CHECK_THROWS_AS(histogram(r, 0), Error);
}
