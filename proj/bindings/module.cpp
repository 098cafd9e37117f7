// Python bindings for the rinmf core. Matrices cross the boundary as 2-D
// numpy arrays (copied row-major); everything else maps to plain records.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rinmf/errors.hpp"
#include "rinmf/grouping.hpp"
#include "rinmf/matrix.hpp"
#include "rinmf/metrics.hpp"
#include "rinmf/rules.hpp"
#include "rinmf/solvers.hpp"
#include "rinmf/synth.hpp"

namespace py = pybind11;
using namespace rinmf;

namespace {

Matrix to_matrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) {
        throw shape_error("expected a 2-D array, got " + std::to_string(a.ndim()) +
                          " dimension(s)");
    }
    const auto rows = static_cast<std::size_t>(a.shape(0));
    const auto cols = static_cast<std::size_t>(a.shape(1));
    std::vector<double> values(rows * cols);
    std::memcpy(values.data(), a.data(), values.size() * sizeof(double));
    return Matrix(rows, cols, std::move(values));
}

py::array_t<double> to_array(const Matrix& m) {
    py::array_t<double> a({m.rows(), m.cols()});
    std::memcpy(a.mutable_data(), m.data().data(), m.size() * sizeof(double));
    return a;
}

using NpMatrix = py::array_t<double, py::array::c_style | py::array::forcecast>;

SolverConfig make_config(const std::string& variant, std::size_t k, double lambda_c,
                         std::optional<double> lambda_override, std::size_t max_iters,
                         double tolerance, double epsilon, bool normalize_f,
                         bool hals_literal, bool gd_literal, std::uint64_t seed,
                         std::optional<double> step_size, double bold_grow,
                         double bold_shrink, double target_sparseness) {
    SolverConfig cfg;
    cfg.variant = parse_variant(variant);
    cfg.k = k;
    cfg.lambda_c = lambda_c;
    cfg.lambda_override = lambda_override;
    cfg.max_iters = max_iters;
    cfg.tolerance = tolerance;
    cfg.epsilon = epsilon;
    cfg.normalize_f = normalize_f;
    cfg.hals_literal = hals_literal;
    cfg.gd_literal = gd_literal;
    cfg.seed = seed;
    cfg.step_size = step_size;
    cfg.bold_grow = bold_grow;
    cfg.bold_shrink = bold_shrink;
    cfg.target_sparseness = target_sparseness;
    return cfg;
}

} // namespace

PYBIND11_MODULE(_rinmf, m) {
    m.doc() = "Rule-interpretable non-negative matrix factorization";

    py::register_exception<shape_error>(m, "ShapeError", PyExc_ValueError);
    py::register_exception<domain_error>(m, "DomainError", PyExc_ValueError);
    py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<data_error>(m, "DataError", PyExc_ValueError);
    py::register_exception<divergence_error>(m, "DivergenceError", PyExc_RuntimeError);

    py::class_<Rule>(m, "Rule")
        .def(py::init([](std::string id, std::vector<std::size_t> support,
                         std::string label, std::optional<double> quality) {
                 Rule r;
                 r.id = std::move(id);
                 r.support = std::move(support);
                 r.label = std::move(label);
                 r.quality = quality;
                 return r;
             }),
             py::arg("id"), py::arg("support"), py::arg("label") = "",
             py::arg("quality") = py::none())
        .def_readwrite("id", &Rule::id)
        .def_readwrite("support", &Rule::support)
        .def_readwrite("label", &Rule::label)
        .def_readwrite("quality", &Rule::quality)
        .def("__repr__", [](const Rule& r) {
            return "Rule(id='" + r.id + "', |support|=" +
                   std::to_string(r.support.size()) + ")";
        });

    py::class_<RuleSet>(m, "RuleSet")
        .def(py::init<std::size_t, std::vector<Rule>>(), py::arg("entity_count"),
             py::arg("rules"))
        .def_property_readonly("entity_count", &RuleSet::entity_count)
        .def("__len__", &RuleSet::size)
        .def("__getitem__",
             [](const RuleSet& rs, std::size_t i) {
                 if (i >= rs.size()) throw py::index_error();
                 return rs[i];
             })
        .def_property_readonly("rules",
                               [](const RuleSet& rs) { return rs.rules(); })
        .def("labels", &RuleSet::labels);

    m.def("coverage", &coverage, py::arg("rules"));
    m.def("jaccard", &jaccard, py::arg("a"), py::arg("b"));
    m.def(
        "build_p", [](const RuleSet& rs) { return to_array(build_p(rs)); },
        py::arg("rules"));
    m.def("single_rule_exposure", &single_rule_exposure, py::arg("rules"),
          py::arg("clusters"));

    py::class_<RuleGrouping>(m, "RuleGrouping")
        .def_readonly("k", &RuleGrouping::k)
        .def_readonly("assignment", &RuleGrouping::assignment)
        .def_readonly("clusters", &RuleGrouping::clusters)
        .def_readonly("objective_trace", &RuleGrouping::objective_trace);

    m.def(
        "kmeans_rules",
        [](const RuleSet& rs, std::size_t k, std::size_t max_iters, std::uint64_t seed,
           const std::string& metric) {
            const KMeansMetric km =
                metric == "jaccard" ? KMeansMetric::jaccard : KMeansMetric::euclidean;
            return kmeans_rules(rs, k, max_iters, seed, km);
        },
        py::arg("rules"), py::arg("k"), py::arg("max_iters") = 100, py::arg("seed") = 0,
        py::arg("metric") = "euclidean");
    m.def(
        "kmeans_rules_supervised",
        [](const RuleSet& rs,
           const std::vector<std::pair<std::string, std::size_t>>& per_class_k,
           std::size_t max_iters, std::uint64_t seed, const std::string& metric) {
            const KMeansMetric km =
                metric == "jaccard" ? KMeansMetric::jaccard : KMeansMetric::euclidean;
            return kmeans_rules_supervised(rs, per_class_k, max_iters, seed, km);
        },
        py::arg("rules"), py::arg("per_class_k"), py::arg("max_iters") = 100,
        py::arg("seed") = 0, py::arg("metric") = "euclidean");
    m.def(
        "rfa_assign",
        [](const RuleSet& rs, const NpMatrix& f_init, std::size_t k,
           std::size_t class_count) {
            return rfa_assign(rs, to_matrix(f_init), k, class_count);
        },
        py::arg("rules"), py::arg("f_init"), py::arg("k"), py::arg("class_count") = 0);
    m.def(
        "grouping_from_assignment",
        [](const RuleSet& rs, std::size_t k, std::vector<std::size_t> assignment) {
            return grouping_from_assignment(rs, k, std::move(assignment));
        },
        py::arg("rules"), py::arg("k"), py::arg("assignment"));

    m.def(
        "build_ideal",
        [](const std::vector<std::vector<std::size_t>>& clusters, std::size_t m_) {
            return to_array(build_ideal(clusters, m_));
        },
        py::arg("clusters"), py::arg("entity_count"));
    m.def(
        "build_ideal",
        [](const RuleGrouping& g, std::size_t m_) { return to_array(build_ideal(g, m_)); },
        py::arg("grouping"), py::arg("entity_count"));
    m.def(
        "build_a",
        [](const std::vector<std::vector<std::size_t>>& clusters, const RuleSet& rs) {
            return to_array(build_a(clusters, rs));
        },
        py::arg("clusters"), py::arg("rules"));
    m.def(
        "build_a",
        [](const RuleGrouping& g, const RuleSet& rs) { return to_array(build_a(g, rs)); },
        py::arg("grouping"), py::arg("rules"));

    py::class_<ClusterAssignment>(m, "ClusterAssignment")
        .def_readonly("entity_factors", &ClusterAssignment::entity_factors)
        .def_readonly("factor_entities", &ClusterAssignment::factor_entities)
        .def_property_readonly(
            "binary", [](const ClusterAssignment& ca) { return to_array(ca.binary); });
    m.def(
        "cluster_assignment",
        [](const NpMatrix& f) { return cluster_assignment(to_matrix(f)); }, py::arg("f"));

    py::class_<Constraints>(m, "Constraints")
        .def_static("none", &Constraints::none)
        .def_static(
            "with_ideal",
            [](const NpMatrix& f_tilde) { return Constraints::with_ideal(to_matrix(f_tilde)); },
            py::arg("ideal"))
        .def_static(
            "with_cost",
            [](const NpMatrix& p, const NpMatrix& a) {
                return Constraints::with_cost(to_matrix(p), to_matrix(a));
            },
            py::arg("p"), py::arg("a"));

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init(&make_config), py::kw_only(), py::arg("variant") = "MU",
             py::arg("k") = 2, py::arg("c") = 1.0, py::arg("lambda_") = py::none(),
             py::arg("max_iters") = 50000, py::arg("tolerance") = 1e-8,
             py::arg("epsilon") = 1e-9, py::arg("normalize_f") = false,
             py::arg("hals_literal") = false, py::arg("gd_literal") = false,
             py::arg("seed") = 0, py::arg("step_size") = py::none(),
             py::arg("bold_grow") = 1.05, py::arg("bold_shrink") = 0.5,
             py::arg("target_sparseness") = 0.5)
        .def_property(
            "variant",
            [](const SolverConfig& c) { return std::string(variant_name(c.variant)); },
            [](SolverConfig& c, const std::string& s) { c.variant = parse_variant(s); })
        .def_readwrite("k", &SolverConfig::k)
        .def_readwrite("c", &SolverConfig::lambda_c)
        .def_readwrite("lambda_", &SolverConfig::lambda_override)
        .def_readwrite("max_iters", &SolverConfig::max_iters)
        .def_readwrite("tolerance", &SolverConfig::tolerance)
        .def_readwrite("epsilon", &SolverConfig::epsilon)
        .def_readwrite("normalize_f", &SolverConfig::normalize_f)
        .def_readwrite("hals_literal", &SolverConfig::hals_literal)
        .def_readwrite("gd_literal", &SolverConfig::gd_literal)
        .def_readwrite("seed", &SolverConfig::seed)
        .def_readwrite("step_size", &SolverConfig::step_size)
        .def_readwrite("bold_grow", &SolverConfig::bold_grow)
        .def_readwrite("bold_shrink", &SolverConfig::bold_shrink)
        .def_readwrite("target_sparseness", &SolverConfig::target_sparseness);

    py::class_<FactorModel>(m, "FactorModel")
        .def_property_readonly("f", [](const FactorModel& fm) { return to_array(fm.f); })
        .def_property_readonly("g", [](const FactorModel& fm) { return to_array(fm.g); })
        .def_readonly("iterations_run", &FactorModel::iterations_run)
        .def_readonly("objective_trace", &FactorModel::objective_trace)
        .def_readonly("converged", &FactorModel::converged)
        .def_readonly("lambda_", &FactorModel::lambda)
        .def("__repr__", [](const FactorModel& fm) {
            return "FactorModel(" + std::to_string(fm.f.rows()) + "x" +
                   std::to_string(fm.f.cols()) + ", iterations=" +
                   std::to_string(fm.iterations_run) +
                   (fm.converged ? ", converged" : "") + ")";
        });

    m.def(
        "solve",
        [](const NpMatrix& x, const SolverConfig& cfg, const Constraints& c,
           std::optional<NpMatrix> f0, std::optional<NpMatrix> g0) {
            const Matrix xm = to_matrix(x);
            if (f0.has_value() != g0.has_value()) {
                throw config_error("solve: f0 and g0 must be given together");
            }
            py::gil_scoped_release release;
            if (f0) return solve(xm, cfg, c, to_matrix(*f0), to_matrix(*g0));
            return solve(xm, cfg, c);
        },
        py::arg("x"), py::arg("config"), py::arg("constraints") = Constraints::none(),
        py::arg("f0") = py::none(), py::arg("g0") = py::none());
    m.def(
        "init_factors",
        [](std::size_t m_, std::size_t n, std::size_t k, std::uint64_t seed) {
            auto [f, g] = init_factors(m_, n, k, seed);
            return py::make_tuple(to_array(f), to_array(g));
        },
        py::arg("m"), py::arg("n"), py::arg("k"), py::arg("seed") = 0);
    m.def(
        "objective",
        [](const NpMatrix& x, const NpMatrix& f, const NpMatrix& g, const Constraints& c,
           double lambda) {
            return objective(to_matrix(x), to_matrix(f), to_matrix(g), c, lambda);
        },
        py::arg("x"), py::arg("f"), py::arg("g"),
        py::arg("constraints") = Constraints::none(), py::arg("lambda_") = 0.0);
    m.def(
        "lambda_value",
        [](const SolverConfig& cfg, const NpMatrix& x, const Constraints& c) {
            return lambda_value(cfg, to_matrix(x), c);
        },
        py::arg("config"), py::arg("x"), py::arg("constraints"));
    m.def(
        "grad_f",
        [](const NpMatrix& x, const NpMatrix& f, const NpMatrix& g, const Constraints& c,
           double lambda) {
            return to_array(grad_f(to_matrix(x), to_matrix(f), to_matrix(g), c, lambda));
        },
        py::arg("x"), py::arg("f"), py::arg("g"),
        py::arg("constraints") = Constraints::none(), py::arg("lambda_") = 0.0);

    py::class_<Compensation>(m, "Compensation")
        .def_readonly("entity", &Compensation::entity)
        .def_readonly("factor", &Compensation::factor)
        .def_readonly("rule", &Compensation::rule)
        .def_readonly("deficit", &Compensation::deficit)
        .def_readonly("donors", &Compensation::donors);
    m.def(
        "detect_compensations",
        [](const NpMatrix& f, const NpMatrix& ideal, const RuleSet& rs) {
            return detect_compensations(to_matrix(f), to_matrix(ideal), rs);
        },
        py::arg("f"), py::arg("ideal"), py::arg("rules"));

    m.def(
        "hoyer_project_to_sparseness",
        [](const std::vector<double>& v, double target) {
            return hoyer_project_to_sparseness(v, target);
        },
        py::arg("v"), py::arg("target"));
    m.def(
        "hoyer_sparseness",
        [](const std::vector<double>& v) { return hoyer_sparseness(v); }, py::arg("v"));
    m.def(
        "mean_row_sparseness",
        [](const NpMatrix& f) { return mean_row_sparseness(to_matrix(f)); }, py::arg("f"));

    m.def(
        "representation_error",
        [](const NpMatrix& x, const NpMatrix& f, const NpMatrix& g) {
            return representation_error(to_matrix(x), to_matrix(f), to_matrix(g));
        },
        py::arg("x"), py::arg("f"), py::arg("g"));
    m.def(
        "description_error",
        [](const NpMatrix& f_c, const NpMatrix& ideal) {
            return description_error(to_matrix(f_c), to_matrix(ideal));
        },
        py::arg("f_c"), py::arg("ideal"));
    m.def("correspondence", &correspondence, py::arg("learned"), py::arg("ideal"));
    m.def("avg_corr_difference", &avg_corr_difference, py::arg("corr"),
          py::arg("reference"));

    py::class_<EvalReport>(m, "EvalReport")
        .def_readonly("re", &EvalReport::re)
        .def_readonly("de", &EvalReport::de)
        .def_readonly("corr", &EvalReport::corr)
        .def_readonly("mean_corr", &EvalReport::mean_corr)
        .def_readonly("iterations", &EvalReport::iterations)
        .def_readonly("sparseness_rows", &EvalReport::sparseness_rows);
    m.def(
        "evaluate_model",
        [](const NpMatrix& x, const NpMatrix& f, const NpMatrix& g, std::size_t iterations,
           const NpMatrix& ideal, const std::vector<std::vector<std::size_t>>& clusters,
           bool hungarian_pairing) {
            return evaluate_model(to_matrix(x), to_matrix(f), to_matrix(g), iterations,
                                  to_matrix(ideal), clusters, hungarian_pairing);
        },
        py::arg("x"), py::arg("f"), py::arg("g"), py::arg("iterations"), py::arg("ideal"),
        py::arg("ideal_clusters"), py::arg("hungarian_pairing") = false);

    py::class_<SyntheticData>(m, "SyntheticData")
        .def_property_readonly("x", [](const SyntheticData& d) { return to_array(d.x); })
        .def_readonly("rules", &SyntheticData::rules)
        .def_readonly("truth", &SyntheticData::truth);
    m.def("generate_synthetic", &generate_synthetic, py::arg("m"), py::arg("n"),
          py::arg("k"), py::arg("noise") = 0.0, py::arg("overlap") = 0.0,
          py::arg("rules_per_factor") = 3, py::arg("seed") = 0);

    m.def("variants", [] {
        std::vector<std::string> names;
        for (Variant v : all_variants()) names.emplace_back(variant_name(v));
        return names;
    });
}
