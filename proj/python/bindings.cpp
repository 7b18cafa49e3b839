#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "starpoly/detector.hpp"
#include "starpoly/encoder.hpp"
#include "starpoly/geometry.hpp"
#include "starpoly/io.hpp"
#include "starpoly/metrics.hpp"
#include "starpoly/parallel.hpp"
#include "starpoly/pipeline.hpp"
#include "starpoly/renderer.hpp"
#include "starpoly/toygen.hpp"

namespace fs = std::filesystem;
namespace py = pybind11;
using namespace starpoly;

namespace {

using LabelArray = py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>;
using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using PointArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Any integer raster; positive IDs are renumbered 1..K in first-occurrence order.
LabelImage to_labels(const LabelArray& a) {
  if (a.ndim() != 2) throw std::invalid_argument("labels must be 2-D");
  const auto h = static_cast<int>(a.shape(0)), w = static_cast<int>(a.shape(1));
  return relabel_dense(h, w, std::span<const std::int64_t>(a.data(), a.size()));
}

py::array_t<std::int32_t> from_labels(const LabelImage& l) {
  py::array_t<std::int32_t> out({l.height(), l.width()});
  std::memcpy(out.mutable_data(), l.data().data(), l.size() * sizeof(std::int32_t));
  return out;
}

template <typename T>
py::array_t<T> plane(std::span<const T> v, std::vector<py::ssize_t> shape) {
  py::array_t<T> out(shape);
  std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(T));
  return out;
}

py::tuple from_maps(const DenseMaps& m) {
  return py::make_tuple(plane<float>(m.prob(), {m.height(), m.width()}),
                        plane<float>(m.dist_all(), {m.n_rays(), m.height(), m.width()}));
}

DenseMaps to_maps(const FloatArray& prob, const FloatArray& dist) {
  if (prob.ndim() != 2 || dist.ndim() != 3 || dist.shape(1) != prob.shape(0) ||
      dist.shape(2) != prob.shape(1)) {
    throw std::invalid_argument("expected prob (H, W) and dist (n, H, W)");
  }
  DenseMaps m(static_cast<int>(prob.shape(0)), static_cast<int>(prob.shape(1)),
              RadialGeometry(static_cast<int>(dist.shape(0))));
  std::memcpy(m.prob().data(), prob.data(), m.prob().size() * sizeof(float));
  std::memcpy(m.dist_all().data(), dist.data(), m.dist_all().size() * sizeof(float));
  m.validate();
  return m;
}

VertexRing to_ring(const PointArray& a) {
  if (a.ndim() != 2 || a.shape(1) != 2) throw std::invalid_argument("ring must be (k, 2)");
  VertexRing r(static_cast<std::size_t>(a.shape(0)));
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = {a.data()[2 * i], a.data()[2 * i + 1]};
  return r;
}

py::array_t<double> from_ring(const VertexRing& r) {
  py::array_t<double> out({static_cast<py::ssize_t>(r.size()), py::ssize_t{2}});
  for (std::size_t i = 0; i < r.size(); ++i) {
    out.mutable_data()[2 * i] = r[i].row;
    out.mutable_data()[2 * i + 1] = r[i].col;
  }
  return out;
}

NmsParams nms_params(double prob_thresh, double nms_thresh, const std::string& measure) {
  NmsParams p;
  p.prob_thresh = prob_thresh;
  p.overlap_thresh = nms_thresh;
  p.measure = parse_overlap_measure(measure);
  p.validate();
  return p;
}

py::list score_rows(const ScoreTable& t) {
  py::list rows;
  for (const auto& r : t.rows) {
    py::dict d;
    d["tau"] = r.tau;
    d["tp"] = r.tp;
    d["fp"] = r.fp;
    d["fn"] = r.fn;
    d["ap"] = r.ap;
    rows.append(d);
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Star-convex polygon encoding, detection and scoring.";

  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);

  py::class_<StarPolygon>(m, "StarPolygon")
      .def(py::init([](std::pair<int, int> center, double prob, std::vector<double> radii) {
             return StarPolygon{{center.first, center.second}, prob, std::move(radii)};
           }),
           py::arg("center"), py::arg("prob"), py::arg("radii"))
      .def_property_readonly("center",
                             [](const StarPolygon& s) { return std::pair{s.center.row, s.center.col}; })
      .def_readonly("prob", &StarPolygon::prob)
      .def_readonly("radii", &StarPolygon::radii)
      .def("vertices", [](const StarPolygon& s) { return from_ring(vertices(s)); })
      .def("__repr__", [](const StarPolygon& s) {
        return "StarPolygon(center=(" + std::to_string(s.center.row) + ", " +
               std::to_string(s.center.col) + "), prob=" + std::to_string(s.prob) +
               ", n_rays=" + std::to_string(s.n_rays()) + ")";
      });

  py::class_<DetectionSet>(m, "Detections")
      .def_readonly("height", &DetectionSet::height)
      .def_readonly("width", &DetectionSet::width)
      .def_readonly("n_rays", &DetectionSet::n_rays)
      .def_readonly("polygons", &DetectionSet::detections)
      .def("__len__", [](const DetectionSet& d) { return d.detections.size(); })
      .def("to_json", &io::detections_to_json)
      .def_static("from_json", &io::detections_from_json);

  m.def(
      "distance_transform",
      [](const LabelArray& labels) {
        const auto l = to_labels(labels);
        std::vector<double> d;
        {
          py::gil_scoped_release nogil;
          d = distance_to_background(l);
        }
        return plane<double>(d, {l.height(), l.width()});
      },
      py::arg("labels"), "Euclidean distance of every object pixel to the nearest other pixel.");

  m.def(
      "encode",
      [](const LabelArray& labels, int n_rays) {
        const auto l = to_labels(labels);
        const RadialGeometry g(n_rays);
        py::gil_scoped_release nogil;
        auto maps = encode(l, g);
        py::gil_scoped_acquire gil;
        return from_maps(maps);
      },
      py::arg("labels"), py::arg("n_rays") = RadialGeometry::kDefaultRays,
      "Returns (prob, dist) with shapes (H, W) and (n_rays, H, W).");

  m.def(
      "detect",
      [](const FloatArray& prob, const FloatArray& dist, double prob_thresh, double nms_thresh,
         const std::string& measure) {
        const auto maps = to_maps(prob, dist);
        const auto p = nms_params(prob_thresh, nms_thresh, measure);
        py::gil_scoped_release nogil;
        return detect(maps, p);
      },
      py::arg("prob"), py::arg("dist"), py::arg("prob_thresh") = 0.5, py::arg("nms_thresh") = 0.4,
      py::arg("measure") = "iou");

  m.def(
      "render",
      [](const DetectionSet& dets) { return from_labels(render_labels(dets)); },
      py::arg("detections"), "Paints detections into a label image, highest probability on top.");

  m.def(
      "roundtrip",
      [](const LabelArray& labels, int n_rays, double prob_thresh, double nms_thresh,
         const std::string& measure) {
        const auto l = to_labels(labels);
        const auto p = nms_params(prob_thresh, nms_thresh, measure);
        const RadialGeometry g(n_rays);
        LabelImage out;
        {
          py::gil_scoped_release nogil;
          out = roundtrip_labels(l, g, p);
        }
        return from_labels(out);
      },
      py::arg("labels"), py::arg("n_rays") = RadialGeometry::kDefaultRays,
      py::arg("prob_thresh") = 0.5, py::arg("nms_thresh") = 0.4, py::arg("measure") = "iou");

  m.def(
      "intersection_area",
      [](const PointArray& a, const PointArray& b) {
        return intersection_area(to_ring(a), to_ring(b));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "polygon_iou",
      [](const PointArray& a, const PointArray& b) { return polygon_iou(to_ring(a), to_ring(b)); },
      py::arg("a"), py::arg("b"));
  m.def(
      "polygon_area", [](const PointArray& a) { return area(to_ring(a)); }, py::arg("ring"));

  m.def(
      "match",
      [](const LabelArray& pred, const LabelArray& gt, double tau) {
        const auto r = match_at(overlap_matrix(to_labels(pred), to_labels(gt)), tau);
        py::dict d;
        d["tp"] = r.tp;
        d["fp"] = r.fp;
        d["fn"] = r.fn;
        d["ap"] = average_precision(r.tp, r.fp, r.fn);
        return d;
      },
      py::arg("pred"), py::arg("gt"), py::arg("tau") = 0.5);

  m.def(
      "ap_sweep",
      [](const std::vector<std::pair<LabelArray, LabelArray>>& pairs,
         std::optional<std::vector<double>> taus, const std::string& aggregation) {
        std::vector<std::pair<LabelImage, LabelImage>> imgs;
        for (const auto& [p, g] : pairs) imgs.emplace_back(to_labels(p), to_labels(g));
        const auto agg = parse_aggregation(aggregation);
        ScoreTable t;
        {
          py::gil_scoped_release nogil;
          t = ap_sweep(imgs, taus.value_or(default_taus()), agg);
        }
        return score_rows(t);
      },
      py::arg("pairs"), py::arg("taus") = py::none(), py::arg("aggregation") = "dataset",
      "pairs is a list of (pred, gt) label arrays.");
  m.def("average_precision", &average_precision, py::arg("tp"), py::arg("fp"), py::arg("fn"));

  m.def(
      "toy_image",
      [](int index, std::uint64_t seed, int size, int pairs_min, int pairs_max) {
        toy::ToyConfig c;
        c.seed = seed;
        c.size = size;
        c.pairs_min = pairs_min;
        c.pairs_max = pairs_max;
        c.count = index + 1;
        c.validate();
        toy::ToyImage img;
        {
          py::gil_scoped_release nogil;
          img = toy::generate_image(c, index);
        }
        return py::make_tuple(plane<float>(img.intensity, {size, size}), from_labels(img.labels));
      },
      py::arg("index"), py::arg("seed") = 0, py::arg("size") = 256, py::arg("pairs_min") = 4,
      py::arg("pairs_max") = 8, "Returns (intensity, labels) for one image of the toy dataset.");

  m.def(
      "read_labels", [](const fs::path& p) { return from_labels(io::read_label_png(p)); },
      py::arg("path"));
  m.def(
      "write_labels",
      [](const fs::path& p, const LabelArray& labels) { io::write_label_png(p, to_labels(labels)); },
      py::arg("path"), py::arg("labels"));
  m.def(
      "read_maps", [](const fs::path& p) { return from_maps(io::read_maps(p)); }, py::arg("path"));
  m.def(
      "write_maps",
      [](const fs::path& p, const FloatArray& prob, const FloatArray& dist) {
        io::write_maps(p, to_maps(prob, dist));
      },
      py::arg("path"), py::arg("prob"), py::arg("dist"));

  m.def("worker_count", &worker_count);
}
