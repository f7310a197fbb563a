#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ridgeguard/dataset.hpp"
#include "ridgeguard/encode.hpp"
#include "ridgeguard/error.hpp"
#include "ridgeguard/eval.hpp"
#include "ridgeguard/io.hpp"
#include "ridgeguard/matcher.hpp"
#include "ridgeguard/neighborhood.hpp"
#include "ridgeguard/pipeline.hpp"
#include "ridgeguard/projection.hpp"
#include "ridgeguard/ridge_features.hpp"
#include "ridgeguard/synth.hpp"

namespace py = pybind11;
using namespace ridgeguard;

namespace {

SkeletonImage skeleton_from_array(py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> a) {
  if (a.ndim() != 2) throw py::value_error("skeleton array must be 2-D (height, width)");
  SkeletonImage img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  auto r = a.unchecked<2>();
  for (py::ssize_t y = 0; y < a.shape(0); ++y)
    for (py::ssize_t x = 0; x < a.shape(1); ++x)
      img.set(static_cast<int>(x), static_cast<int>(y), r(y, x) != 0);
  return img;
}

py::array_t<std::uint8_t> skeleton_to_array(const SkeletonImage& img) {
  py::array_t<std::uint8_t> a({img.height, img.width});
  std::copy(img.pixels.begin(), img.pixels.end(), a.mutable_data());
  return a;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cancelable fingerprint templates from ridge features";
  m.attr("__version__") = "0.1.0";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());

  py::class_<Minutia>(m, "Minutia")
      .def(py::init([](int x, int y, double theta) { return Minutia{x, y, normalize_degrees(theta)}; }),
           py::arg("x"), py::arg("y"), py::arg("theta"))
      .def_readwrite("x", &Minutia::x)
      .def_readwrite("y", &Minutia::y)
      .def_readwrite("theta", &Minutia::theta)
      .def("__eq__", [](const Minutia& a, const Minutia& b) { return a == b; })
      .def("__repr__", [](const Minutia& v) {
        return "Minutia(" + std::to_string(v.x) + ", " + std::to_string(v.y) + ", " +
               format_number(v.theta) + ")";
      });

  py::class_<MinutiaeSet>(m, "MinutiaeSet")
      .def(py::init<>())
      .def(py::init([](std::vector<Minutia> v, std::string subject, std::string impression) {
             MinutiaeSet ms{std::move(v), std::move(subject), std::move(impression)};
             ms.validate();
             return ms;
           }),
           py::arg("minutiae"), py::arg("subject_id") = "", py::arg("impression_id") = "")
      .def_readwrite("minutiae", &MinutiaeSet::minutiae)
      .def_readwrite("subject_id", &MinutiaeSet::subject_id)
      .def_readwrite("impression_id", &MinutiaeSet::impression_id)
      .def("__len__", &MinutiaeSet::size)
      .def("__getitem__", [](const MinutiaeSet& ms, std::size_t i) {
        if (i >= ms.size()) throw py::index_error();
        return ms[i];
      })
      .def("validate", &MinutiaeSet::validate);

  py::class_<SkeletonImage>(m, "SkeletonImage")
      .def(py::init<int, int>(), py::arg("width"), py::arg("height"))
      .def(py::init(&skeleton_from_array), py::arg("pixels"))
      .def_readonly("width", &SkeletonImage::width)
      .def_readonly("height", &SkeletonImage::height)
      .def("ridge", &SkeletonImage::ridge)
      .def("set", &SkeletonImage::set)
      .def("ridge_pixel_count", &SkeletonImage::ridge_pixel_count)
      .def("to_array", &skeleton_to_array);

  py::class_<Params>(m, "Params")
      .def(py::init([](int s, double b, int t) {
             Params p{s, b, t};
             p.validate();
             return p;
           }),
           py::arg("s") = 8, py::arg("b") = 1.2, py::arg("t") = 4)
      .def_readwrite("s", &Params::s)
      .def_readwrite("b", &Params::b)
      .def_readwrite("t", &Params::t)
      .def_static("with_sectors", &Params::with_sectors, py::arg("s"), py::arg("b") = 1.2);

  py::class_<ProtectedTemplate>(m, "ProtectedTemplate")
      .def(py::init<>())
      .def_readwrite("ct", &ProtectedTemplate::ct)
      .def_readwrite("key_id", &ProtectedTemplate::key_id)
      .def_readwrite("params", &ProtectedTemplate::params)
      .def("rows", &ProtectedTemplate::rows);

  py::class_<ProjectionKey>(m, "ProjectionKey")
      .def_static("make", &ProjectionKey::make, py::arg("seed"), py::arg("s") = 8, py::arg("t") = 4,
                  py::arg("b") = 1.2)
      .def_readonly("seed", &ProjectionKey::seed)
      .def_readonly("s", &ProjectionKey::s)
      .def_readonly("t", &ProjectionKey::t)
      .def_readonly("b", &ProjectionKey::b)
      .def_readonly("key_id", &ProjectionKey::key_id)
      .def("params", &ProjectionKey::params);

  // io
  m.def("parse_minutiae", py::overload_cast<std::string_view>(&parse_minutiae), py::arg("text"));
  m.def("parse_skeleton", [](py::bytes data) { return parse_skeleton(std::string_view(data)); },
        py::arg("data"));
  m.def("serialize_template", &serialize_template);
  m.def("deserialize_template", &deserialize_template);
  m.def("serialize_key", &serialize_key);
  m.def("deserialize_key", &deserialize_key);
  m.def("load_minutiae", &load_minutiae);
  m.def("load_skeleton", &load_skeleton);
  m.def("load_template", &load_template);
  m.def("save_template", &save_template);

  // neighborhood / ridge features
  m.def("sector_of", &sector_of, py::arg("ref"), py::arg("other"), py::arg("s"));
  m.def("neighbor_table", [](const MinutiaeSet& ms, int s) {
    const auto nt = build_neighbor_table(ms, s);
    std::vector<std::vector<std::optional<std::size_t>>> rows(nt.n);
    for (std::size_t i = 0; i < nt.n; ++i)
      for (int c = 0; c < nt.s; ++c) rows[i].push_back(nt.neighbor(i, c));
    return rows;
  }, py::arg("minutiae"), py::arg("s") = 8);
  m.def("ridge_count", [](const SkeletonImage& skel, std::pair<int, int> a, std::pair<int, int> b) {
    return ridge_crossings(skel, {a.first, a.second}, {b.first, b.second}).size();
  });
  m.def("ridge_features", [](const MinutiaeSet& ms, const SkeletonImage& skel, int s) {
    const auto f = extract_features(ms, skel, build_neighbor_table(ms, s));
    return py::make_tuple(IntGrid(f.rc), IntGrid(f.ro), Mask(f.valid));
  }, py::arg("minutiae"), py::arg("skeleton"), py::arg("s") = 8);

  // encode
  m.def("cantor_pair", &cantor_pair);
  m.def("cantor_unpair", &cantor_unpair);
  m.def("log_template", [](const MinutiaeSet& ms, const SkeletonImage& skel, int s, double b) {
    return compute_log_template(ms, skel, s, b).lt;
  }, py::arg("minutiae"), py::arg("skeleton"), py::arg("s") = 8, py::arg("b") = 1.2);

  // projection
  m.def("generate_rp", [](const ProjectionKey& key) { return generate_rp(key).rp; });
  m.def("project", py::overload_cast<const Matrix&, const Matrix&>(&project), py::arg("lt"), py::arg("rp"));
  m.def("rank_of", &rank_of);
  m.def("pseudo_inverse_attack", &pseudo_inverse_attack);
  m.def("left_null_space", &left_null_space);
  m.def("enroll", [](const MinutiaeSet& ms, const SkeletonImage& skel, const ProjectionKey& key) {
    return enroll(ms, skel, key);
  });

  // matcher
  m.def("local_similarity", py::overload_cast<const Matrix&, const Matrix&>(&local_similarity));
  m.def("coincident_maxima_mask", [](const Matrix& sim) { return Mask(coincident_maxima_mask(sim)); });
  m.def("match_score", py::overload_cast<const ProtectedTemplate&, const ProtectedTemplate&>(&match_score));
  m.def("match_score_matrix", py::overload_cast<const Matrix&, const Matrix&>(&match_score));

  // synth
  py::class_<Impression>(m, "Impression")
      .def_readonly("minutiae", &Impression::minutiae)
      .def_readonly("skeleton", &Impression::skeleton);
  py::class_<Subject>(m, "Subject")
      .def_readonly("id", &Subject::id)
      .def_readonly("impressions", &Subject::impressions);
  py::class_<Dataset>(m, "Dataset")
      .def_readonly("subjects", &Dataset::subjects)
      .def("shape", &Dataset::shape);
  m.def("synthetic_population", [](std::uint64_t seed, int n, int m_imp, const std::string& preset) {
    return generate_population(seed, n, m_imp, synth_preset(preset));
  }, py::arg("seed"), py::arg("subjects"), py::arg("impressions"), py::arg("preset") = "default");
  m.def("save_dataset", &save_dataset);
  m.def("load_dataset", &load_dataset);

  // evaluation
  m.def("pair_counts", [](std::size_t n, std::size_t m_imp, const std::string& protocol) {
    const auto pairs = pair_protocol(n, m_imp, parse_protocol(protocol));
    std::size_t g = 0;
    for (const auto& p : pairs) g += p.genuine ? 1 : 0;
    return py::make_tuple(g, pairs.size() - g);
  }, py::arg("subjects"), py::arg("impressions"), py::arg("protocol") = "fvc");
  m.def("compute_eer", [](const std::vector<double>& gen, const std::vector<double>& imp) {
    const auto r = compute_eer(gen, imp);
    return py::make_tuple(r.eer, r.eer_threshold);
  }, py::arg("genuine"), py::arg("imposter"));
  m.def("evaluate", [](const Dataset& ds, const std::string& protocol, const std::string& policy,
                       std::uint64_t seed, int s, double b) {
    ScenarioConfig c;
    c.params = Params::with_sectors(s, b);
    c.protocol = parse_protocol(protocol);
    c.key_policy = parse_key_policy(policy);
    c.master_seed = seed;
    const auto set = run_scenario(ds, c);
    return py::make_tuple(set.genuine, set.imposter);
  }, py::arg("dataset"), py::arg("protocol") = "fvc", py::arg("key_policy") = "same",
        py::arg("seed") = 1, py::arg("s") = 8, py::arg("b") = 1.2);
}
