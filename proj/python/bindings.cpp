#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "pcace/ace.hpp"
#include "pcace/dump.hpp"
#include "pcace/error.hpp"
#include "pcace/pipeline.hpp"
#include "pcace/ranking_io.hpp"
#include "pcace/smoother.hpp"
#include "pcace/stats.hpp"

namespace py = pybind11;
using namespace pcace;

namespace {

using F64Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

DenseMatrix to_matrix(const F64Array& a) {
  if (a.ndim() != 2) throw Error(ErrorCode::ShapeMismatch, "expected a 2-D array");
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  return DenseMatrix(rows, cols, std::vector<double>(a.data(), a.data() + a.size()));
}

std::vector<double> to_vector(const F64Array& a) {
  if (a.ndim() != 1) throw Error(ErrorCode::ShapeMismatch, "expected a 1-D array");
  return {a.data(), a.data() + a.size()};
}

F64Array to_array(const DenseMatrix& m) {
  F64Array out({m.rows(), m.cols()});
  std::copy(m.values().begin(), m.values().end(), out.mutable_data());
  return out;
}

F64Array to_array(const std::vector<double>& v) {
  F64Array out(v.size());
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

PcaConfig make_pca(std::optional<double> fraction, std::optional<std::size_t> dim) {
  if (fraction && dim) throw Error(ErrorCode::InvalidArgument, "give either fraction or dim, not both");
  if (dim) return PcaConfig::dimension(*dim);
  return PcaConfig::fraction(fraction.value_or(0.5));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Channel ranking by PCA-reduced alternating conditional expectations.";

  py::register_exception<Error>(m, "PcaceError", PyExc_RuntimeError);

  py::class_<SmootherConfig>(m, "SmootherConfig")
      .def(py::init([](double span) { return SmootherConfig{span}; }), py::arg("span") = 0.3)
      .def_readwrite("span", &SmootherConfig::span);

  py::class_<PipelineConfig>(m, "PipelineConfig")
      .def(py::init([](std::optional<double> pca_fraction, std::optional<std::size_t> pca_dim,
                       double span, double tol, std::size_t max_iter) {
             PipelineConfig c;
             c.pca = make_pca(pca_fraction, pca_dim);
             c.smoother.span = span;
             c.tol = tol;
             c.max_iter = max_iter;
             c.validate();
             return c;
           }),
           py::arg("pca_fraction") = py::none(), py::arg("pca_dim") = py::none(),
           py::arg("span") = 0.3, py::arg("tol") = 1e-4, py::arg("max_iter") = 100)
      .def_property_readonly("pca_fraction",
                             [](const PipelineConfig& c) -> std::optional<double> {
                               if (c.pca.is_fraction()) return c.pca.fraction_value();
                               return std::nullopt;
                             })
      .def_property_readonly("pca_dim",
                             [](const PipelineConfig& c) -> std::optional<std::size_t> {
                               if (!c.pca.is_fraction()) return c.pca.dimension_value();
                               return std::nullopt;
                             })
      .def_property_readonly("span", [](const PipelineConfig& c) { return c.smoother.span; })
      .def_readonly("tol", &PipelineConfig::tol)
      .def_readonly("max_iter", &PipelineConfig::max_iter);

  m.def(
      "standardize_rows",
      [](const F64Array& a) {
        auto s = standardize_rows(to_matrix(a));
        return py::make_tuple(to_array(s.matrix), s.dropped);
      },
      py::arg("matrix"), "Returns (standardized matrix, dropped row indices).");

  m.def(
      "pca_reduce",
      [](const F64Array& a, std::optional<double> fraction, std::optional<std::size_t> dim) {
        auto r = pca_reduce(to_matrix(a), make_pca(fraction, dim));
        return py::make_tuple(to_array(r.scores), r.explained_variance_ratios);
      },
      py::arg("matrix"), py::arg("fraction") = py::none(), py::arg("dim") = py::none(),
      "Returns (p' x n projections, explained variance ratios).");

  m.def(
      "smooth",
      [](const F64Array& x, const F64Array& z, double span) {
        return to_array(smooth(to_vector(x), to_vector(z), SmootherConfig{span}));
      },
      py::arg("x"), py::arg("z"), py::arg("span") = 0.3);

  py::class_<AceResult>(m, "AceResult")
      .def_readonly("correlation", &AceResult::correlation)
      .def_property_readonly("theta", [](const AceResult& r) { return to_array(r.theta); })
      .def_property_readonly("phis",
                             [](const AceResult& r) {
                               DenseMatrix out(r.phis.size(), r.theta.size());
                               for (std::size_t k = 0; k < r.phis.size(); ++k)
                                 std::copy(r.phis[k].begin(), r.phis[k].end(), out.row(k).begin());
                               return to_array(out);
                             })
      .def_readonly("iterations", &AceResult::iterations)
      .def_readonly("final_error", &AceResult::final_error)
      .def_readonly("converged", &AceResult::converged)
      .def_readonly("error_history", &AceResult::error_history);

  m.def(
      "ace",
      [](const F64Array& x, const F64Array& y, double span, double tol, std::size_t max_iter) {
        DenseMatrix xm = x.ndim() == 1 ? DenseMatrix(1, static_cast<std::size_t>(x.size()),
                                                     to_vector(x))
                                       : to_matrix(x);
        py::gil_scoped_release release;
        return ace(xm, ResponseVector(to_vector(y)), AceOptions{{span}, tol, max_iter});
      },
      py::arg("x"), py::arg("y"), py::arg("span") = 0.3, py::arg("tol") = 1e-4,
      py::arg("max_iter") = 100,
      "x is a (p, n) predictor matrix or a length-n vector; y has length n.");

  m.def(
      "pcace_channel",
      [](const F64Array& activations, const F64Array& y, const PipelineConfig& cfg) {
        const ChannelActivationMatrix cam{0, to_matrix(activations)};
        const auto s = pcace_channel(cam, ResponseVector(to_vector(y)), cfg);
        py::dict diag;
        diag["dropped_rows"] = s.diagnostics.dropped_rows;
        diag["retained_dim"] = s.diagnostics.retained_dim;
        diag["iterations"] = s.diagnostics.iterations;
        diag["converged"] = s.diagnostics.converged;
        diag["dead"] = s.diagnostics.dead;
        diag["signed_correlation"] = s.diagnostics.signed_correlation;
        return py::make_tuple(s.pcace_value, diag);
      },
      py::arg("activations"), py::arg("y"), py::arg("config") = PipelineConfig{},
      "activations is (k1*k2, n); returns (pcace value, diagnostics dict).");

  py::class_<ActivationDump>(m, "ActivationDump")
      .def_property_readonly("layer_name", [](const ActivationDump& d) { return d.manifest.layer_name; })
      .def_property_readonly("class_label", [](const ActivationDump& d) { return d.manifest.class_label; })
      .def_property_readonly("score_kind", [](const ActivationDump& d) { return to_string(d.manifest.score_kind); })
      .def_property_readonly("n_images", [](const ActivationDump& d) { return d.manifest.n_images; })
      .def_property_readonly("n_channels", [](const ActivationDump& d) { return d.manifest.n_channels; })
      .def_property_readonly("map_shape", [](const ActivationDump& d) {
        return py::make_tuple(d.manifest.map_height, d.manifest.map_width);
      })
      .def("channel", [](const ActivationDump& d, std::size_t c) { return to_array(d.channels.at(c).matrix); },
           py::arg("index"), "Channel matrix of shape (k1*k2, n).")
      .def_property_readonly("scores", [](const ActivationDump& d) {
        return to_array(std::vector<double>(d.scores.values().begin(), d.scores.values().end()));
      });

  m.def("load_dump", &load_dump, py::arg("path"));

  m.def(
      "write_dump",
      [](const std::filesystem::path& dir, const std::string& layer_name, const F64Array& activations,
         const F64Array& scores, const std::string& score_kind, std::optional<std::string> class_label) {
        if (activations.ndim() != 4) {
          throw Error(ErrorCode::ShapeMismatch, "activations must have shape (c, n, k1, k2)");
        }
        const auto c = static_cast<std::size_t>(activations.shape(0));
        const auto n = static_cast<std::size_t>(activations.shape(1));
        const auto k1 = static_cast<std::size_t>(activations.shape(2));
        const auto k2 = static_cast<std::size_t>(activations.shape(3));
        DumpManifest man;
        man.layer_name = layer_name;
        man.n_images = n;
        man.n_channels = c;
        man.map_height = k1;
        man.map_width = k2;
        man.score_kind = score_kind_from_string(score_kind);
        man.class_label = std::move(class_label);
        man.score_file = "scores.f32";
        std::vector<DenseMatrix> mats;
        const double* src = activations.data();
        for (std::size_t ch = 0; ch < c; ++ch) {
          man.channel_files.push_back("channel_" + std::to_string(ch) + ".f32");
          DenseMatrix mat(k1 * k2, n);
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t cell = 0; cell < k1 * k2; ++cell)
              mat(cell, i) = src[((ch * n + i) * k1 * k2) + cell];
          mats.push_back(std::move(mat));
        }
        write_dump(dir, man, mats, to_vector(scores));
      },
      py::arg("path"), py::arg("layer_name"), py::arg("activations"), py::arg("scores"),
      py::arg("score_kind") = "pre_softmax_class_logit", py::arg("class_label") = py::none(),
      "Writes a dump directory; activations has shape (channels, images, k1, k2).");

  py::class_<RankingEntry>(m, "RankingEntry")
      .def_readonly("channel_index", &RankingEntry::channel_index)
      .def_readonly("pcace_value", &RankingEntry::pcace_value)
      .def_readonly("converged", &RankingEntry::converged)
      .def_readonly("dropped_rows", &RankingEntry::dropped_rows)
      .def_readonly("retained_dim", &RankingEntry::retained_dim)
      .def_readonly("iterations", &RankingEntry::iterations)
      .def_readonly("dead", &RankingEntry::dead)
      .def("__repr__", [](const RankingEntry& e) {
        return "<RankingEntry channel=" + std::to_string(e.channel_index) +
               " pcace=" + std::to_string(e.pcace_value) + ">";
      });

  py::class_<PcaceRanking>(m, "PcaceRanking")
      .def_readonly("layer_name", &PcaceRanking::layer_name)
      .def_readonly("class_label", &PcaceRanking::class_label)
      .def_readonly("entries", &PcaceRanking::entries)
      .def_readonly("config", &PcaceRanking::config)
      .def("to_json", &ranking_to_json)
      .def_static("from_json", &ranking_from_json, py::arg("text"))
      .def("__eq__", [](const PcaceRanking& a, const PcaceRanking& b) { return a == b; })
      .def("__len__", [](const PcaceRanking& r) { return r.entries.size(); });

  m.def(
      "rank_layer",
      [](const ActivationDump& dump, const PipelineConfig& cfg, std::size_t jobs) {
        py::gil_scoped_release release;
        return rank_layer(dump, cfg, jobs);
      },
      py::arg("dump"), py::arg("config") = PipelineConfig{}, py::arg("jobs") = 1);

  m.def("compare_rankings", &compare_rankings, py::arg("a"), py::arg("b"));

  m.def(
      "histogram",
      [](const PcaceRanking& r, std::size_t bins) {
        py::list out;
        for (const auto& b : histogram(r, bins)) out.append(py::make_tuple(b.lower, b.upper, b.count));
        return out;
      },
      py::arg("ranking"), py::arg("bins") = 20, "List of (lower, upper, count) rows.");

  m.def("sorted_values", [](const PcaceRanking& r) { return to_array(sorted_values(r)); },
        py::arg("ranking"));
}
