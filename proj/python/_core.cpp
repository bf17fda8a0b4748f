#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "jgmatch/affinity.hpp"
#include "jgmatch/config.hpp"
#include "jgmatch/error.hpp"
#include "jgmatch/estimation.hpp"
#include "jgmatch/feature_grid.hpp"
#include "jgmatch/homography.hpp"
#include "jgmatch/image_io.hpp"
#include "jgmatch/metrics.hpp"
#include "jgmatch/pipeline.hpp"
#include "jgmatch/spectral.hpp"

namespace py = pybind11;
using namespace jgmatch;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<Point2> to_points(const Array& a) {
  if (a.ndim() != 2 || a.shape(1) != 2) throw py::value_error("points must have shape (n, 2)");
  std::vector<Point2> out(static_cast<std::size_t>(a.shape(0)));
  auto r = a.unchecked<2>();
  for (py::ssize_t i = 0; i < a.shape(0); ++i) out[i] = {r(i, 0), r(i, 1)};
  return out;
}

Array from_points(const std::vector<Point2>& pts) {
  Array out({static_cast<py::ssize_t>(pts.size()), py::ssize_t{2}});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    w(i, 0) = pts[i].x;
    w(i, 1) = pts[i].y;
  }
  return out;
}

FeatureGrid grid_from_array(const Array& a, int source_w, int source_h, std::string id) {
  if (a.ndim() != 3) throw py::value_error("feature grid must have shape (height, width, channels)");
  std::vector<double> values(a.data(), a.data() + a.size());
  return FeatureGrid(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)),
                     static_cast<int>(a.shape(2)), std::move(values), source_w, source_h,
                     std::move(id));
}

Array grid_to_array(const FeatureGrid& g) {
  Array out({g.grid_height(), g.grid_width(), g.channels()});
  std::copy(g.values().begin(), g.values().end(), out.mutable_data());
  return out;
}

GrayImage image_from_array(const Array& a) {
  if (a.ndim() != 2) throw py::value_error("image must have shape (height, width)");
  std::vector<double> px(a.data(), a.data() + a.size());
  return GrayImage(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), std::move(px));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Joint graph embedding matcher";

  static py::exception<Error> error_type(m, "JgmatchError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object cls = py::reinterpret_borrow<py::object>(error_type.ptr());
      py::object err = cls(std::string(to_string(e.kind())) + ": " + e.what());
      err.attr("kind") = to_string(e.kind());
      PyErr_SetObject(error_type.ptr(), err.ptr());
    }
  });

  py::enum_<DistanceVariant>(m, "DistanceVariant")
      .value("SQUARED_COSINE", DistanceVariant::SquaredCosine)
      .value("SQUARED_EUCLIDEAN_NORMALIZED", DistanceVariant::SquaredEuclideanNormalized);
  py::enum_<DeltaNorm>(m, "DeltaNorm")
      .value("EUCLIDEAN", DeltaNorm::Euclidean)
      .value("CHEBYSHEV", DeltaNorm::Chebyshev);
  py::enum_<RefineStatus>(m, "RefineStatus")
      .value("CONVERGED", RefineStatus::Converged)
      .value("MAX_ITERATIONS", RefineStatus::MaxIterations)
      .value("NUMERICAL_FAILURE", RefineStatus::NumericalFailure);

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("grid_width", &RunConfig::grid_width)
      .def_readwrite("grid_height", &RunConfig::grid_height)
      .def_readwrite("m", &RunConfig::m)
      .def_readwrite("triviality_threshold", &RunConfig::triviality_threshold)
      .def_readwrite("distance", &RunConfig::distance)
      .def_readwrite("ratio_threshold", &RunConfig::ratio_threshold)
      .def_readwrite("mutual", &RunConfig::mutual)
      .def_readwrite("huber_delta", &RunConfig::huber_delta)
      .def_readwrite("refine_max_iters", &RunConfig::refine_max_iters)
      .def_readwrite("refine_tol", &RunConfig::refine_tol)
      .def_readwrite("deltas", &RunConfig::deltas)
      .def_readwrite("delta_norm", &RunConfig::delta_norm)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("patch_radius", &RunConfig::patch_radius)
      .def_readwrite("orientation_bins", &RunConfig::orientation_bins)
      .def_readwrite("epsilon", &RunConfig::epsilon)
      .def("validate", &RunConfig::validate)
      .def("to_json", [](const RunConfig& c) { return config_to_json(c); })
      .def_static("from_json", &config_from_json)
      .def("__eq__", [](const RunConfig& a, const RunConfig& b) { return a == b; });

  py::class_<FeatureGrid>(m, "FeatureGrid")
      .def(py::init(&grid_from_array), py::arg("values"), py::arg("source_width") = 0,
           py::arg("source_height") = 0, py::arg("image_id") = "")
      .def_property_readonly("grid_width", &FeatureGrid::grid_width)
      .def_property_readonly("grid_height", &FeatureGrid::grid_height)
      .def_property_readonly("channels", &FeatureGrid::channels)
      .def_property_readonly("source_width", &FeatureGrid::source_image_width)
      .def_property_readonly("source_height", &FeatureGrid::source_image_height)
      .def_property_readonly("image_id", &FeatureGrid::image_id)
      .def_property_readonly("values", &grid_to_array, "Copy of the (height, width, channels) values")
      .def("__eq__", [](const FeatureGrid& a, const FeatureGrid& b) { return a == b; });

  m.def("load_feature_grid", &load_feature_grid, py::arg("path"));
  m.def("save_feature_grid", &save_feature_grid, py::arg("grid"), py::arg("path"));
  m.def(
      "decode_feature_grid",
      [](py::bytes data) {
        const std::string s = data;
        return decode_feature_grid(
            std::span(reinterpret_cast<const unsigned char*>(s.data()), s.size()));
      },
      py::arg("data"));
  m.def(
      "encode_feature_grid",
      [](const FeatureGrid& g) {
        const auto bytes = encode_feature_grid(g);
        return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
      },
      py::arg("grid"));

  m.def(
      "load_image", [](const std::filesystem::path& p) {
        const GrayImage img = load_image(p);
        Array out({img.height(), img.width()});
        std::copy(img.pixels().begin(), img.pixels().end(), out.mutable_data());
        return out;
      },
      py::arg("path"), "Grayscale image in [0, 1] with shape (height, width)");
  m.def(
      "describe_image",
      [](const Array& image, const RunConfig& config, std::string id) {
        return describe_image(image_from_array(image), config, std::move(id));
      },
      py::arg("image"), py::arg("config") = RunConfig{}, py::arg("image_id") = "");

  m.def(
      "joint_affinity",
      [](const FeatureGrid& a, const FeatureGrid& b, DistanceVariant variant) {
        AffinityOptions opts;
        opts.variant = variant;
        return joint_affinity(a, b, opts).matrix;
      },
      py::arg("grid1"), py::arg("grid2"), py::arg("variant") = DistanceVariant::SquaredCosine);
  m.def(
      "eig_topm",
      [](const Eigen::MatrixXd& w, int n1, int mdim, double threshold) {
        JointAffinity j;
        j.n1 = n1;
        j.n2 = static_cast<int>(w.rows()) - n1;
        j.matrix = w;
        const SpectralEmbedding e = eig_topm(j, EigOptions{mdim, threshold});
        return py::make_tuple(e.eigenvalues, e.rows1, e.rows2);
      },
      py::arg("matrix"), py::arg("n1"), py::arg("m") = 30, py::arg("triviality_threshold") = 1e-3,
      "Returns (eigenvalues, rows1, rows2)");

  m.def(
      "project_points",
      [](const Eigen::Matrix3d& h, const Array& pts) {
        return from_points(project_points(Homography(h), to_points(pts)));
      },
      py::arg("h"), py::arg("points"));
  m.def(
      "pointwise_loss",
      [](const Eigen::Matrix3d& h, const Array& p1, const Array& p2) {
        return pointwise_loss(Homography(h), to_points(p1), to_points(p2));
      },
      py::arg("h"), py::arg("p1"), py::arg("p2"));
  m.def(
      "estimate_homography_dlt",
      [](const Array& p1, const Array& p2) {
        return estimate_homography_dlt(to_points(p1), to_points(p2)).matrix();
      },
      py::arg("p1"), py::arg("p2"));
  m.def(
      "refine_homography",
      [](const Eigen::Matrix3d& h0, const Array& p1, const Array& p2, double delta, int iters,
         double tol) {
        const RefineResult r =
            refine_homography(Homography(h0), to_points(p1), to_points(p2), {delta, iters, tol});
        py::dict out;
        out["h"] = r.h.matrix();
        out["status"] = r.status;
        out["iterations"] = r.iterations;
        out["objective_history"] = r.objective_history;
        out["diagnostic"] = r.diagnostic;
        return out;
      },
      py::arg("h0"), py::arg("p1"), py::arg("p2"), py::arg("huber_delta") = 2.0,
      py::arg("max_iters") = 50, py::arg("tol") = 1e-10);

  m.def(
      "mae", [](const Array& est, const Array& gt) { return mae(to_points(est), to_points(gt)); },
      py::arg("estimated"), py::arg("ground_truth"));
  m.def(
      "delta_match_rate",
      [](const Array& est, const Array& gt, double delta, DeltaNorm norm) {
        return delta_match_rate(to_points(est), to_points(gt), delta, norm);
      },
      py::arg("estimated"), py::arg("ground_truth"), py::arg("delta"),
      py::arg("norm") = DeltaNorm::Euclidean);

  m.def(
      "match_grids",
      [](const FeatureGrid& g1, const FeatureGrid& g2, const RunConfig& config) {
        const PairOutcome out = match_grids(g1, g2, config);
        Array matches({static_cast<py::ssize_t>(out.matches.pairs.size()), py::ssize_t{5}});
        auto w = matches.mutable_unchecked<2>();
        for (std::size_t i = 0; i < out.matches.pairs.size(); ++i) {
          const Match& mt = out.matches.pairs[i];
          w(i, 0) = mt.p1.x;
          w(i, 1) = mt.p1.y;
          w(i, 2) = mt.p2.x;
          w(i, 3) = mt.p2.y;
          w(i, 4) = mt.score;
        }
        py::dict d;
        d["h"] = out.homography().matrix();
        d["initial"] = out.initial.matrix();
        d["matches"] = matches;
        d["status"] = out.refined.status;
        return d;
      },
      py::arg("grid1"), py::arg("grid2"), py::arg("config") = RunConfig{},
      "Returns a dict with the refined homography 'h', the DLT estimate 'initial' and an (n, 5) "
      "'matches' array of x1 y1 x2 y2 score rows");
}
