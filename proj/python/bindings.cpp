#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "ipp/baselines.hpp"
#include "ipp/cli/commands.hpp"
#include "ipp/errors.hpp"
#include "ipp/qlearn.hpp"
#include "ipp/synthetic.hpp"

namespace py = pybind11;
using namespace ipp;

namespace {

using XY = std::pair<double, double>;

std::vector<Point2> to_points(const std::vector<XY>& xy) {
  std::vector<Point2> out;
  out.reserve(xy.size());
  for (const auto& [x, y] : xy) out.push_back({x, y});
  return out;
}

PilotData to_pilot(const std::vector<XY>& locations, const std::vector<double>& values) {
  if (locations.size() != values.size())
    throw InvalidArgument("pilot locations and values differ in length");
  return {to_points(locations), values};
}

py::dict result_dict(const PlanResult& r) {
  py::dict d;
  d["solver"] = r.solver;
  d["path"] = r.path;
  d["cost"] = r.cost;
  d["mi_total"] = r.mi_total;
  d["mi_gain_over_pilot"] = r.mi_gain_over_pilot;
  d["wall_time_s"] = r.wall_time_s;
  d["valid"] = r.valid;
  d["complete"] = r.complete;
  d["seed"] = r.seed;
  d["budget"] = r.budget;
  d["start"] = r.start;
  d["terminal"] = r.terminal;
  d["evaluations"] = r.evaluations;
  d["epoch_rewards"] = r.epoch_rewards;
  d["best_trace"] = r.best_trace;
  d["episodes_to_best"] = r.episodes_to_best;
  return d;
}

}  // namespace

PYBIND11_MODULE(_ipplan, m) {
  m.doc() = "Informative path planning on spatial graphs";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<LoadError>(m, "LoadError", PyExc_ValueError);
  py::register_exception<InvalidPath>(m, "InvalidPath", PyExc_ValueError);
  py::register_exception<CheckpointError>(m, "CheckpointError", PyExc_ValueError);

  py::class_<SpatialGraph, std::shared_ptr<SpatialGraph>>(m, "Graph")
      .def(py::init([](const std::vector<XY>& positions,
                       const std::vector<std::tuple<int, int, double>>& edges) {
             std::vector<Edge> es;
             for (const auto& [u, v, c] : edges) es.push_back({u, v, c});
             return std::make_shared<SpatialGraph>(to_points(positions), es);
           }),
           py::arg("positions"), py::arg("edges"))
      .def("__len__", &SpatialGraph::size)
      .def_property_readonly("positions",
                             [](const SpatialGraph& g) {
                               std::vector<XY> out;
                               for (const auto& p : g.positions()) out.emplace_back(p.x, p.y);
                               return out;
                             })
      .def_property_readonly("edges",
                             [](const SpatialGraph& g) {
                               std::vector<std::tuple<int, int, double>> out;
                               for (const auto& e : g.edges()) out.emplace_back(e.u, e.v, e.cost);
                               return out;
                             })
      .def("neighbors",
           [](const SpatialGraph& g, VertexId v) {
             std::vector<VertexId> out;
             for (const auto& n : g.neighbors(v)) out.push_back(n.vertex);
             return out;
           })
      .def("shortest_path_cost", &SpatialGraph::shortest_path_cost)
      .def("shortest_route", &SpatialGraph::shortest_route)
      .def("path_cost", [](const SpatialGraph& g, const std::vector<VertexId>& p) { return path_cost(g, p); })
      .def("to_text", [](const SpatialGraph& g) { return format_graph(g); });

  m.def("grid_graph", [](double w, double h, double s) {
    return std::make_shared<SpatialGraph>(build_grid_graph(w, h, s));
  }, py::arg("width"), py::arg("height"), py::arg("spacing"));
  m.def("load_graph", [](const std::string& text) {
    return std::make_shared<SpatialGraph>(load_graph(text));
  }, py::arg("text"));

  py::class_<KernelParams>(m, "KernelParams")
      .def(py::init([](double sv, double ls, double nv) { return KernelParams{sv, ls, nv}; }),
           py::arg("signal_variance") = 1.0, py::arg("lengthscale") = 1.0,
           py::arg("noise_variance") = 0.01)
      .def_readwrite("signal_variance", &KernelParams::signal_variance)
      .def_readwrite("lengthscale", &KernelParams::lengthscale)
      .def_readwrite("noise_variance", &KernelParams::noise_variance)
      .def("__repr__", [](const KernelParams& k) {
        std::ostringstream o;
        o << "KernelParams(signal_variance=" << k.signal_variance << ", lengthscale=" << k.lengthscale
          << ", noise_variance=" << k.noise_variance << ")";
        return o.str();
      });

  m.def("log_marginal_likelihood",
        [](const KernelParams& k, const std::vector<XY>& loc, const std::vector<double>& val) {
          return log_marginal_likelihood(k, to_pilot(loc, val));
        },
        py::arg("params"), py::arg("locations"), py::arg("values"));
  m.def("fit_hyperparameters",
        [](const std::vector<XY>& loc, const std::vector<double>& val, const KernelParams& init,
           int starts, std::uint64_t seed) {
          FitOptions o;
          o.starts = starts;
          o.seed = seed;
          const auto f = fit_hyperparameters(to_pilot(loc, val), init, o);
          return py::make_tuple(f.params, f.log_likelihood, f.degenerate);
        },
        py::arg("locations"), py::arg("values"), py::arg("init") = KernelParams{},
        py::arg("starts") = 5, py::arg("seed") = 0);

  py::class_<ProblemInstance>(m, "Instance")
      .def(py::init([](std::shared_ptr<SpatialGraph> g, const KernelParams& k,
                       const std::vector<XY>& loc, const std::vector<double>& val, VertexId s,
                       VertexId t, double budget, double spacing) {
             return make_instance(std::move(g), k, to_pilot(loc, val), s, t, budget, spacing);
           }),
           py::arg("graph"), py::arg("params"), py::arg("pilot_locations"), py::arg("pilot_values"),
           py::arg("start"), py::arg("terminal"), py::arg("budget"), py::arg("sample_spacing") = 1.0)
      .def_property_readonly("graph", [](const ProblemInstance& i) {
        return std::const_pointer_cast<SpatialGraph>(i.graph_ptr());
      })
      .def_property_readonly("start", &ProblemInstance::start)
      .def_property_readonly("terminal", &ProblemInstance::terminal)
      .def_property_readonly("budget", &ProblemInstance::budget)
      .def_property_readonly("start_reward", &ProblemInstance::start_reward)
      .def("with_endpoints", &ProblemInstance::with, py::arg("start"), py::arg("terminal"),
           py::arg("budget"))
      .def("reward", [](const ProblemInstance& i, const std::vector<VertexId>& p) { return i.reward(p); })
      .def("is_valid", [](const ProblemInstance& i, const std::vector<VertexId>& p) { return i.is_valid(p); });

  m.def("grid_instance",
        [](int cols, int rows, VertexId s, VertexId t, double budget, int pilot_count,
           std::uint64_t seed, const KernelParams& k, double spacing) {
          SyntheticField f;
          f.params = k;
          f.count = pilot_count;
          f.seed = seed;
          return make_grid_instance(cols, rows, spacing, f, s, t, budget);
        },
        py::arg("cols"), py::arg("rows"), py::arg("start"), py::arg("terminal"), py::arg("budget"),
        py::arg("pilot_count") = 30, py::arg("seed") = 0,
        py::arg("params") = KernelParams{1.0, 2.0, 0.01}, py::arg("spacing") = 1.0);

  m.def("brute_force",
        [](const ProblemInstance& i, double limit) { return result_dict(brute_force(i, {limit})); },
        py::arg("instance"), py::arg("time_limit_s") = 0.0);
  m.def("count_paths", &count_paths, py::arg("instance"));
  m.def("greedy", [](const ProblemInstance& i) { return result_dict(greedy_tsp(i)); },
        py::arg("instance"));
  m.def("recursive_greedy",
        [](const ProblemInstance& i, int depth) { return result_dict(recursive_greedy(i, {depth, 0.0})); },
        py::arg("instance"), py::arg("depth") = 2);
  m.def("genetic",
        [](const ProblemInstance& i, int pop, int gens, std::uint64_t seed) {
          GaConfig c;
          c.population = pop;
          c.generations = gens;
          c.seed = seed;
          return result_dict(genetic(i, c));
        },
        py::arg("instance"), py::arg("population") = 100, py::arg("generations") = 50,
        py::arg("seed") = 0);
  m.def("train",
        [](const ProblemInstance& i, int episodes, int hidden, std::uint64_t seed, bool naive) {
          TrainingConfig c;
          c.episodes = episodes;
          c.hidden = hidden;
          c.seed = seed;
          c.exploration = naive ? Exploration::Naive : Exploration::Constrained;
          PlanResult r;
          {
            py::gil_scoped_release release;
            r = train(i, c);
          }
          return result_dict(r);
        },
        py::arg("instance"), py::arg("episodes") = 5000, py::arg("hidden") = 64, py::arg("seed") = 0,
        py::arg("naive") = false);

  m.def("plan",
        [](const std::filesystem::path& config, const std::string& algo, std::uint64_t seed) {
          const auto cfg = cli::load_config_file(config);
          const auto exp = cli::build_experiment(cfg);
          const auto inst = cli::make_problem(
              exp, {cfg.instance.start, cfg.instance.terminal, cfg.instance.budget},
              cfg.instance.sample_spacing);
          return result_dict(cli::run_solver(algo, inst, cfg, seed));
        },
        py::arg("config"), py::arg("algo"), py::arg("seed") = 0);
}
