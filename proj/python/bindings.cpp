#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hashecon/attacksim.hpp"
#include "hashecon/common/error.hpp"
#include "hashecon/corpus.hpp"
#include "hashecon/econcost.hpp"
#include "hashecon/ghscan.hpp"
#include "hashecon/paramclass.hpp"
#include "hashecon/stats.hpp"
#include "hashecon/strength.hpp"

namespace py = pybind11;
using namespace hashecon;

namespace {

py::object to_py_int(const attacksim::GuessCount& g) {
  return py::reinterpret_steal<py::object>(PyLong_FromString(g.str().c_str(), nullptr, 10));
}

attacksim::GuessCount from_py_int(const py::int_& v) {
  if (PyObject_RichCompareBool(v.ptr(), py::int_(0).ptr(), Py_LT) == 1) throw DomainError("guess count must be >= 0");
  return attacksim::GuessCount(py::str(v).cast<std::string>());
}

py::dict result_dict(const stats::TestResult& r) {
  py::dict d;
  d["method"] = r.method;
  d["statistic"] = r.statistic;
  d["df"] = r.df ? py::cast(*r.df) : py::none();
  d["p"] = r.p_value;
  d["warnings"] = r.warnings;
  return d;
}

stats::ContingencyTable table_from(const std::vector<std::vector<std::uint64_t>>& counts) {
  stats::ContingencyTable t;
  t.counts = counts;
  for (std::size_t r = 0; r < counts.size(); ++r) t.row_labels.push_back("r" + std::to_string(r));
  if (!counts.empty()) {
    for (std::size_t c = 0; c < counts.front().size(); ++c) t.col_labels.push_back("c" + std::to_string(c));
  }
  return t;
}

econcost::CostBook default_book(double overhead) {
  return econcost::CostBook::from_markets(
      econcost::MarketSnapshot::load(std::string(HASHECON_DATA_DIR) + "/market_2025-02-20.csv"), overhead);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "hashecon core bindings";
  m.attr("__version__") = HASHECON_VERSION;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  // Both an Error and a ValueError.
  py::tuple domain_bases = py::make_tuple(base, py::handle(PyExc_ValueError));
  py::register_exception<DomainError>(m, "DomainError", domain_bases.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<EmptyCorpusError>(m, "EmptyCorpusError", base.ptr());

  py::class_<corpus::StrengthDistribution>(m, "StrengthDistribution")
      .def_static("exact", &corpus::StrengthDistribution::exact, py::arg("strengths"))
      .def_static("histogram", [](const std::vector<double>& s, double w) { return corpus::StrengthDistribution::histogram(s, w); },
                  py::arg("strengths"), py::arg("bin_width") = corpus::kDefaultBinWidth)
      .def("total_count", &corpus::StrengthDistribution::total_count)
      .def("quantile", &corpus::StrengthDistribution::quantile)
      .def("count_at_most", &corpus::StrengthDistribution::count_at_most)
      .def("mean", &corpus::StrengthDistribution::mean)
      .def("stddev", &corpus::StrengthDistribution::stddev)
      .def("doubled", [](const corpus::StrengthDistribution& d) { return corpus::synthesize_doubled(d); });

  m.def("estimate_strength", [](const std::string& password, const std::string& estimator) {
    return corpus::estimate_strength(password, *corpus::make_estimator(estimator));
  }, py::arg("password"), py::arg("estimator") = "pattern");

  m.def("cost_per_hash", [](const std::string& spec, double overhead) {
    return default_book(overhead).cost_for(econcost::parse_hash_config(spec)).usd_per_hash;
  }, py::arg("config"), py::arg("overhead") = 100.0,
        "USD per hash under the bundled market snapshot, e.g. 'sha256' or 'argon2id:47104'.");

  m.def("affordable_guesses", [](double budget, double cost) { return to_py_int(attacksim::affordable_guesses(budget, cost)); },
        py::arg("budget_usd"), py::arg("usd_per_hash"));
  m.def("threshold_bits", [](const py::int_& g) { return attacksim::threshold_bits(from_py_int(g)); });
  m.def("compromise_rate", [](const corpus::StrengthDistribution& d, const py::int_& g) {
    return attacksim::compromise_rate(d, from_py_int(g));
  }, py::arg("distribution"), py::arg("guesses"));

  m.def("fit_loglog", [](const std::vector<std::pair<std::uint32_t, std::uint64_t>>& anchors) {
    std::vector<paramclass::Anchor> a;
    for (auto [t, mem] : anchors) a.push_back({t, mem});
    auto f = paramclass::fit_loglog(paramclass::AnchorSet(a));
    return py::make_tuple(f.slope, f.intercept);
  });
  m.def("classify", [](std::uint32_t t, std::uint64_t memory_kib) {
    static const paramclass::Classifier c(paramclass::AnchorSet::load(std::string(HASHECON_DATA_DIR) + "/owasp_anchors.csv"));
    paramclass::Argon2Config cfg;
    cfg.t = t;
    cfg.memory_kib = memory_kib;
    return std::string(paramclass::to_string(c.classify(cfg)));
  }, py::arg("t"), py::arg("memory_kib"));

  m.def("estimate_unique_repos", [](std::uint64_t total, const std::vector<std::int64_t>& ids, std::uint64_t sample) {
    auto e = ghscan::estimate_unique_repos(total, ids, sample);
    py::dict d;
    d["total_hits"] = e.total_hits;
    d["sampled_unique_ids"] = e.sampled_unique_ids;
    d["duplication_quota"] = e.duplication_quota;
    d["estimated_repos"] = e.estimated_repos;
    d["exact"] = e.exact;
    return d;
  }, py::arg("total_hits"), py::arg("repo_ids"), py::arg("sample_size") = ghscan::kResultCap);
  m.def("apply_retention_ratio", &ghscan::apply_retention_ratio);

  m.def("chi2_sf", &stats::chi2_sf, py::arg("x"), py::arg("df"));
  m.def("normal_sf", &stats::normal_sf);
  m.def("chi2_gof", [](const std::vector<std::uint64_t>& obs) { return result_dict(stats::chi2_gof(obs)); });
  m.def("chi2_independence", [](const std::vector<std::vector<std::uint64_t>>& c) {
    return result_dict(stats::chi2_independence(table_from(c)));
  });
  m.def("kruskal_wallis", [](const std::vector<std::vector<double>>& g) { return result_dict(stats::kruskal_wallis(g)); });
  m.def("dunn", [](const std::vector<std::vector<double>>& g, std::size_t i, std::size_t j, const std::string& adj) {
    return result_dict(stats::dunn_pairwise(g, i, j, stats::parse_adjustment(adj)));
  }, py::arg("groups"), py::arg("i"), py::arg("j"), py::arg("adjust") = "none");
}
