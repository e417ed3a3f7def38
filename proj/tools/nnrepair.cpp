// nnrepair command line: data generation, training, verification, repair,
// baseline, evaluation, plotting and report tables.

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nnrepair/baseline.hpp"
#include "nnrepair/datagen.hpp"
#include "nnrepair/encoder.hpp"
#include "nnrepair/error.hpp"
#include "nnrepair/evaluator.hpp"
#include "nnrepair/file_util.hpp"
#include "nnrepair/heuristics.hpp"
#include "nnrepair/repair.hpp"
#include "nnrepair/report.hpp"
#include "nnrepair/svg.hpp"
#include "nnrepair/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nnrepair;

namespace {

// Value from the command line if given, else from the config section, else
// the fallback.
template <typename T>
T pick(const std::optional<T>& flag, const json& section, const char* key, T fallback) {
  if (flag) {
    return *flag;
  }
  if (section.is_object() && section.contains(key) && !section.at(key).is_null()) {
    return section.at(key).get<T>();
  }
  return fallback;
}

json load_config(const std::string& path) {
  if (path.empty()) {
    return json::object();
  }
  try {
    return json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

json section(const json& cfg, const char* name) {
  return cfg.contains(name) ? cfg.at(name) : json::object();
}

struct SolverFlags {
  std::optional<std::string> cmd;
  std::optional<double> timeout_s;
  std::optional<std::string> archive_dir;
  bool temp_file = false;

  void attach(CLI::App* app) {
    app->add_option("--solver-cmd", cmd, "Solver command line (default \"z3 -in\")");
    app->add_option("--solver-timeout", timeout_s, "Seconds per solver call");
    app->add_option("--archive-dir", archive_dir, "Keep every emitted script here");
    app->add_flag("--solver-file", temp_file, "Pass scripts as a file instead of stdin");
  }

  smt::SolverOptions resolve(const json& cfg) const {
    const json s = section(cfg, "solver");
    smt::SolverOptions o;
    o.command = smt::split_command(pick<std::string>(cmd, s, "cmd", "z3 -in"));
    o.timeout_s = pick<double>(timeout_s, s, "timeout_s", 600.0);
    o.archive_dir = pick<std::string>(archive_dir, s, "archive_dir", "");
    o.use_temp_file = temp_file || s.value("use_temp_file", false);
    if (o.command.empty()) {
      throw ConfigError("empty solver command");
    }
    return o;
  }
};

std::vector<std::size_t> parse_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) {
      out.push_back(std::stoul(item));
    }
  }
  return out;
}

Rect parse_bounds(const std::string& text) {
  std::vector<double> v;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    v.push_back(std::stod(item));
  }
  if (v.size() != 4) {
    throw InvalidInputError("bounds must be x_lo,x_hi,y_lo,y_hi");
  }
  return Rect{{v[0], v[2]}, {v[1], v[3]}};
}

std::vector<LabeledPoint> all_points(const Dataset& d) {
  std::vector<LabeledPoint> pts = d.train;
  pts.insert(pts.end(), d.test.begin(), d.test.end());
  pts.insert(pts.end(), d.sampled.begin(), d.sampled.end());
  return pts;
}

json assignment_json(const Assignment& a) {
  json out = json::object();
  for (const auto& [id, v] : a) {
    out[id.name()] = format_rational(v);
  }
  return out;
}

void print_report(const AccuracyReport& r) {
  for (const auto& s : r.splits) {
    std::cout << s.name << ": " << s.correct << "/" << s.size << " = "
              << format_percent(s.rate()) << "%\n";
  }
  std::cout << "weighted: " << format_percent(r.weighted) << "%\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural network repair with SMT solving"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Generate a Gaussian mixture dataset");
  std::string gen_name = "xor-a";
  std::size_t gen_train = 1000;
  std::size_t gen_test = 1000;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--spec,--dataset", gen_name, "xor-a, xor-b or blobs");
  gen->add_option("--n-train", gen_train);
  gen->add_option("--n-test", gen_test);
  gen->add_option("--seed", gen_seed);
  gen->add_option("--out", gen_out, "Output directory")->required();

  // sample
  auto* samp = app.add_subcommand("sample", "Add network-labelled uniform points to a dataset");
  std::string samp_model;
  std::string samp_data;
  std::size_t samp_n = 500;
  std::uint64_t samp_seed = 0;
  double samp_margin = 0.1;
  samp->add_option("--model", samp_model)->required();
  samp->add_option("--data", samp_data)->required();
  samp->add_option("--n", samp_n);
  samp->add_option("--seed", samp_seed);
  samp->add_option("--margin", samp_margin, "Bounding box padding fraction");

  // train
  auto* tr = app.add_subcommand("train", "Train a ReLU network");
  std::string tr_data;
  std::string tr_topology = "2,4,2";
  std::string tr_opt = "adam";
  TrainConfig tr_cfg;
  std::string tr_init;
  std::string tr_out;
  tr->add_option("--data", tr_data)->required();
  tr->add_option("--topology", tr_topology);
  tr->add_option("--optimizer", tr_opt, "sgd or adam");
  tr->add_option("--lr", tr_cfg.learning_rate);
  tr->add_option("--epochs", tr_cfg.epochs);
  tr->add_option("--batch", tr_cfg.batch_size);
  tr->add_option("--seed", tr_cfg.seed);
  tr->add_option("--init", tr_init, "Continue from this model");
  tr->add_option("--out", tr_out)->required();

  // verify
  auto* ver = app.add_subcommand("verify", "Check robustness properties");
  std::string ver_model;
  std::string ver_props;
  SolverFlags ver_solver;
  std::string ver_config;
  ver->add_option("--model", ver_model)->required();
  ver->add_option("--props", ver_props)->required();
  ver->add_option("--config", ver_config);
  ver_solver.attach(ver);

  // repair
  auto* rep = app.add_subcommand("repair", "Search for a minimal weight repair");
  std::string rep_model;
  std::string rep_props;
  std::string rep_data;
  std::string rep_out;
  std::string rep_config;
  std::optional<std::string> rep_heuristic;
  std::optional<std::string> rep_thresholds;
  std::optional<std::string> rep_source;
  std::optional<std::size_t> rep_size;
  std::optional<std::size_t> rep_cells;
  std::optional<std::size_t> rep_per_cell;
  std::optional<std::size_t> rep_generators;
  std::optional<std::uint64_t> rep_seed;
  std::optional<std::size_t> rep_max_size;
  std::optional<double> rep_trial_timeout;
  std::optional<double> rep_global_timeout;
  std::optional<std::size_t> rep_top_k;
  std::optional<std::size_t> rep_jobs;
  std::optional<std::size_t> rep_layer;
  std::optional<std::string> rep_kind;
  bool rep_last_layer = false;
  bool rep_force = false;
  SolverFlags rep_solver;
  rep->add_option("--model", rep_model)->required();
  rep->add_option("--props", rep_props)->required();
  rep->add_option("--data", rep_data, "Dataset used for soft constraints and accuracy")
      ->required();
  rep->add_option("--out", rep_out, "Run directory")->required();
  rep->add_option("--config", rep_config, "JSON run configuration");
  rep->add_option("--heuristic", rep_heuristic, "none, samples, grid or voronoi");
  rep->add_option("--thresholds", rep_thresholds, "Comma separated, e.g. 1,325,650");
  rep->add_option("--soft-source", rep_source, "train, test or sampled (samples heuristic)");
  rep->add_option("--soft-size", rep_size, "Points for the samples heuristic");
  rep->add_option("--cells", rep_cells, "Grid cells per axis");
  rep->add_option("--samples-per-cell", rep_per_cell);
  rep->add_option("--generators", rep_generators, "Voronoi generators");
  rep->add_option("--heuristic-seed", rep_seed);
  rep->add_option("--max-size", rep_max_size, "Largest selection size");
  rep->add_option("--trial-timeout", rep_trial_timeout);
  rep->add_option("--global-timeout", rep_global_timeout);
  rep->add_option("--top-k", rep_top_k, "Pairs only from the k best singletons");
  rep->add_option("--jobs", rep_jobs);
  rep->add_option("--layer", rep_layer, "Only parameters of this layer (1-based)");
  rep->add_flag("--last-layer", rep_last_layer, "Only output layer parameters");
  rep->add_option("--kind", rep_kind, "weight or bias");
  rep->add_flag("--force", rep_force, "Search even if every property holds");
  rep_solver.attach(rep);

  // baseline
  auto* base = app.add_subcommand("baseline", "Retraining baseline");
  std::string base_model;
  std::string base_props;
  std::string base_data;
  std::string base_out;
  std::string base_config;
  BaselineOptions base_opts;
  std::string base_opt = "adam";
  TrainConfig base_train;
  base_train.epochs = 50;
  SolverFlags base_solver;
  base->add_option("--model", base_model)->required();
  base->add_option("--props", base_props)->required();
  base->add_option("--data", base_data)->required();
  base->add_option("--out", base_out)->required();
  base->add_option("--config", base_config);
  base->add_option("--max-iters", base_opts.max_iters);
  base->add_option("--n-spec", base_opts.n_spec);
  base->add_option("--n-train", base_opts.n_train);
  base->add_option("--seed", base_opts.seed);
  base->add_option("--optimizer", base_opt);
  base->add_option("--lr", base_train.learning_rate);
  base->add_option("--epochs", base_train.epochs);
  base->add_option("--batch", base_train.batch_size);
  base_solver.attach(base);

  // eval
  auto* ev = app.add_subcommand("eval", "Accuracy on every split of a dataset");
  std::string ev_model;
  std::string ev_data;
  bool ev_json = false;
  ev->add_option("--model", ev_model)->required();
  ev->add_option("--data", ev_data)->required();
  ev->add_flag("--json", ev_json);

  // plot
  auto* pl = app.add_subcommand("plot", "Decision boundary SVG");
  std::string pl_model;
  std::string pl_data;
  std::string pl_props;
  std::string pl_out;
  std::string pl_bounds;
  std::size_t pl_res = 200;
  bool pl_square = false;
  pl->add_option("--model", pl_model)->required();
  pl->add_option("--data", pl_data);
  pl->add_option("--props", pl_props);
  pl->add_option("--bounds", pl_bounds, "x_lo,x_hi,y_lo,y_hi");
  pl->add_option("--resolution", pl_res);
  pl->add_flag("--l1-square", pl_square, "Draw L1 balls as squares");
  pl->add_option("--out", pl_out)->required();

  // report
  auto* rp = app.add_subcommand("report", "Summary table of a repair run");
  std::string rp_run;
  std::string rp_group = "threshold";
  std::string rp_out;
  rp->add_option("--run", rp_run, "Run directory written by repair")->required();
  rp->add_option("--group-by", rp_group, "threshold, heuristic or size");
  rp->add_option("--out", rp_out, "CSV path (stdout when omitted)");

  // compare
  auto* cmp = app.add_subcommand("compare", "Repair search versus retraining baseline");
  std::vector<std::string> cmp_rows;
  std::string cmp_out;
  cmp->add_option("--row", cmp_rows, "LABEL=REPAIR_RUN_DIR,BASELINE_DIR")->required();
  cmp->add_option("--out", cmp_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const Dataset d = generate_mixture(mixture_spec_by_name(gen_name), gen_train, gen_test,
                                         gen_seed);
      save_dataset(d, gen_out);
      std::cout << "wrote " << d.train.size() << " train and " << d.test.size()
                << " test points to " << gen_out << "\n";
    } else if (*samp) {
      const Network net = load_network(samp_model);
      Dataset d = load_dataset(samp_data, net.output_dim());
      const Rect box = bounding_box(all_points(Dataset{d.train, d.test, {}, 0, {}}), samp_margin);
      d.sampled = sample_uniform_labeled(net, box, samp_n, samp_seed);
      save_dataset(d, samp_data);
      std::cout << "sampled " << d.sampled.size() << " points\n";
    } else if (*tr) {
      const Dataset d = load_dataset(tr_data);
      tr_cfg.optimizer = parse_optimizer(tr_opt);
      const auto topology = parse_topology(tr_topology);
      const Network init = tr_init.empty() ? init_network(topology, tr_cfg.seed)
                                           : load_network(tr_init);
      const Network net = train(init, d.train, tr_cfg);
      save_network(net, tr_out);
      print_report(evaluate(net, d));
    } else if (*ver) {
      const Network net = load_network(ver_model);
      const auto props = load_properties(ver_props);
      const auto opts = ver_solver.resolve(load_config(ver_config));
      int exit_code = 0;
      for (const auto& p : props) {
        const auto v = verify_property(net, p, opts);
        std::cout << p.name << ": " << to_string(v.status);
        if (v.counterexample) {
          std::cout << " at (";
          for (std::size_t i = 0; i < v.counterexample->size(); ++i) {
            std::cout << (i ? ", " : "") << format_rational((*v.counterexample)[i]);
          }
          std::cout << ")";
        }
        if (!v.verdict.message.empty()) {
          std::cout << " [" << v.verdict.message << "]";
        }
        std::cout << "\n";
        if (v.status != PropertyStatus::kHolds) {
          exit_code = 3;
        }
      }
      return exit_code;
    } else if (*rep) {
      const json cfg = load_config(rep_config);
      const json h = section(cfg, "heuristic");
      const json r = section(cfg, "repair");
      RepairProblem problem{load_network(rep_model), load_properties(rep_props), std::nullopt,
                            {}};
      problem.evaluation = load_dataset(rep_data, problem.network.output_dim());
      const Network& net = problem.network;

      const std::string kind = pick<std::string>(rep_heuristic, h, "kind", "samples");
      const std::uint64_t seed = pick<std::uint64_t>(rep_seed, h, "seed", 0);
      if (kind == "samples") {
        const std::string source = pick<std::string>(rep_source, h, "source", "train");
        const auto& pool = source == "train"  ? problem.evaluation.train
                           : source == "test" ? problem.evaluation.test
                                              : problem.evaluation.sampled;
        if (source != "train" && source != "test" && source != "sampled") {
          throw ConfigError("unknown soft source '" + source + "'");
        }
        SamplesConfig sc{pick<std::size_t>(rep_size, h, "size", pool.size()), seed};
        problem.soft = heuristic_samples(net, pool, sc);
      } else if (kind == "grid") {
        GridConfig gc;
        gc.rect = bounding_box(all_points(problem.evaluation), 0.1);
        gc.cells_per_axis = pick<std::size_t>(rep_cells, h, "cells_per_axis", 10);
        gc.samples_per_cell = pick<std::size_t>(rep_per_cell, h, "samples_per_cell", 3);
        gc.seed = seed;
        problem.soft = heuristic_grid(net, gc);
      } else if (kind == "voronoi") {
        const auto& pool = problem.evaluation.sampled;
        if (pool.empty()) {
          throw ConfigError("voronoi heuristic needs a sampled split; run `sample` first");
        }
        const std::size_t n =
            std::min(pick<std::size_t>(rep_generators, h, "generators", 153), pool.size());
        VoronoiConfig vc;
        vc.clip = bounding_box(all_points(problem.evaluation), 0.1);
        for (const auto& p : choose_points(pool, n, seed)) {
          vc.generators.push_back({p.x[0], p.x[1]});
        }
        problem.soft = heuristic_voronoi(net, vc);
      } else if (kind != "none") {
        throw ConfigError("unknown heuristic '" + kind + "'");
      }
      if (problem.soft) {
        for (const auto& w : problem.soft->warnings) {
          std::cerr << "warning: " << w << "\n";
        }
      }

      RepairConfig rc;
      rc.solver = rep_solver.resolve(cfg);
      if (rep_thresholds) {
        rc.thresholds = parse_list(*rep_thresholds);
      } else if (r.contains("thresholds")) {
        rc.thresholds = r.at("thresholds").get<std::vector<std::size_t>>();
      }
      rc.max_combination_size = pick<std::size_t>(rep_max_size, r, "max_size", 1);
      rc.trial_timeout_s = pick<double>(rep_trial_timeout, r, "trial_timeout", 600.0);
      rc.global_timeout_s = pick<double>(rep_global_timeout, r, "global_timeout", 36000.0);
      rc.jobs = pick<std::size_t>(rep_jobs, r, "jobs", 1);
      if (rep_top_k || (r.contains("top_k") && !r.at("top_k").is_null())) {
        rc.top_k_for_greedy = pick<std::size_t>(rep_top_k, r, "top_k", 0);
      }
      if (rep_layer || (r.contains("layer") && !r.at("layer").is_null())) {
        rc.weight_filter.layer = pick<std::size_t>(rep_layer, r, "layer", 1);
      }
      rc.weight_filter.last_layer_only = rep_last_layer || r.value("last_layer", false);
      const std::string pkind = pick<std::string>(rep_kind, r, "kind", "");
      if (pkind == "weight") {
        rc.weight_filter.kind = ParamKind::kWeight;
      } else if (pkind == "bias") {
        rc.weight_filter.kind = ParamKind::kBias;
      } else if (!pkind.empty()) {
        throw ConfigError("parameter kind must be weight or bias");
      }
      rc.repair_satisfied = rep_force || r.value("force", false);

      const double before = evaluate(net, problem.evaluation).weighted;
      const SearchState state = greedy_repair(problem, rc);

      fs::create_directories(rep_out);
      const fs::path out(rep_out);
      write_text_file((out / "trials.csv").string(), trials_to_csv(state.trials));
      json summary = {{"accuracy_before", before},
                      {"already_safe", state.already_safe},
                      {"timed_out", state.timed_out},
                      {"elapsed_s", state.elapsed_s},
                      {"trials", state.trials.size()},
                      {"heuristic", kind},
                      {"soft_constraints", problem.soft ? problem.soft->size() : 0},
                      {"soft_provenance", problem.soft ? problem.soft->provenance : ""},
                      {"notes", state.notes}};
      if (state.best) {
        const auto& b = *state.best;
        summary["best"] = {{"selection", b.selection.to_string()},
                           {"threshold", b.threshold},
                           {"accuracy", *b.accuracy},
                           {"weight_values", assignment_json(*b.weight_values)}};
        save_network(net.substitute(*b.weight_values), (out / "best_model.json").string());
      } else {
        summary["best"] = nullptr;
      }
      write_text_file((out / "summary.json").string(), summary.dump(2) + "\n");

      std::cout << "accuracy before: " << format_percent(before) << "%\n";
      if (state.already_safe) {
        std::cout << "all properties already hold; nothing to repair\n";
      } else if (state.best) {
        std::cout << "best repair: " << state.best->selection.to_string() << " (threshold "
                  << state.best->threshold << ") accuracy "
                  << format_percent(state.best->accuracy) << "%\n";
      } else {
        std::cout << "no repair found in " << state.trials.size() << " trials\n";
        return 4;
      }
    } else if (*base) {
      const json cfg = load_config(base_config);
      const Network net = load_network(base_model);
      const auto props = load_properties(base_props);
      const Dataset d = load_dataset(base_data, net.output_dim());
      base_train.optimizer = parse_optimizer(base_opt);
      const auto res = naive_baseline(net, props, d.train, base_train, base_opts,
                                      base_solver.resolve(cfg));
      fs::create_directories(base_out);
      const fs::path out(base_out);
      save_network(res.network, (out / "model.json").string());
      const double acc = evaluate(res.network, d).weighted;
      json rounds = json::array();
      for (const auto& round : res.rounds) {
        json st = json::array();
        for (auto s : round.statuses) {
          st.push_back(to_string(s));
        }
        rounds.push_back({{"statuses", st}, {"training_points", round.training_points}});
      }
      json summary = {{"repaired", res.repaired},
                      {"iterations", res.iterations},
                      {"accuracy_before", evaluate(net, d).weighted},
                      {"accuracy", acc},
                      {"rounds", rounds},
                      {"error", res.error ? json(*res.error) : json(nullptr)}};
      write_text_file((out / "summary.json").string(), summary.dump(2) + "\n");
      std::cout << (res.repaired ? "repaired" : "not repaired") << " after " << res.iterations
                << " retraining rounds; accuracy " << format_percent(acc) << "%\n";
      if (res.error) {
        std::cerr << "training stopped: " << *res.error << "\n";
      }
    } else if (*ev) {
      const Network net = load_network(ev_model);
      const AccuracyReport r = evaluate(net, load_dataset(ev_data, net.output_dim()));
      if (ev_json) {
        json splits = json::array();
        for (const auto& s : r.splits) {
          splits.push_back({{"name", s.name}, {"size", s.size}, {"correct", s.correct}});
        }
        std::cout << json{{"splits", splits}, {"weighted", r.weighted}}.dump(2) << "\n";
      } else {
        print_report(r);
      }
    } else if (*pl) {
      const Network net = load_network(pl_model);
      Dataset d;
      if (!pl_data.empty()) {
        d = load_dataset(pl_data, net.output_dim());
      }
      std::vector<RobustnessProperty> props;
      if (!pl_props.empty()) {
        props = load_properties(pl_props);
      }
      Rect bounds;
      if (!pl_bounds.empty()) {
        bounds = parse_bounds(pl_bounds);
      } else if (!pl_data.empty()) {
        bounds = bounding_box(all_points(d), 0.1);
      } else {
        throw ConfigError("plot needs --bounds or --data");
      }
      PlotOptions po;
      po.resolution = pl_res;
      po.l1_as_square = pl_square;
      po.train = d.train;
      po.test = d.test;
      po.sampled = d.sampled;
      po.properties = props;
      write_text_file(pl_out, boundary_svg(net, bounds, po));
    } else if (*rp) {
      const fs::path run(rp_run);
      const auto trials = trials_from_csv(read_text_file((run / "trials.csv").string()));
      std::optional<double> before;
      if (fs::exists(run / "summary.json")) {
        const json s = json::parse(read_text_file((run / "summary.json").string()));
        if (s.contains("accuracy_before")) {
          before = s.at("accuracy_before").get<double>();
        }
      }
      const auto rows = aggregate_trials(trials, parse_group_by(rp_group), before);
      const std::string text = aggregate_to_csv(rows, rp_group);
      if (rp_out.empty()) {
        std::cout << text;
      } else {
        write_text_file(rp_out, text);
      }
    } else if (*cmp) {
      std::vector<CompareRow> rows;
      for (const auto& spec : cmp_rows) {
        const auto eq = spec.find('=');
        const auto comma = spec.find(',', eq == std::string::npos ? 0 : eq);
        if (eq == std::string::npos || comma == std::string::npos) {
          throw ConfigError("--row expects LABEL=REPAIR_RUN_DIR,BASELINE_DIR");
        }
        CompareRow row;
        row.label = spec.substr(0, eq);
        const json ours = json::parse(
            read_text_file((fs::path(spec.substr(eq + 1, comma - eq - 1)) / "summary.json")
                               .string()));
        const json naive =
            json::parse(read_text_file((fs::path(spec.substr(comma + 1)) / "summary.json").string()));
        row.accuracy_before = ours.at("accuracy_before").get<double>();
        if (!ours.at("best").is_null()) {
          row.repair_accuracy = ours.at("best").at("accuracy").get<double>();
        }
        if (naive.at("repaired").get<bool>()) {
          row.baseline_accuracy = naive.at("accuracy").get<double>();
        }
        row.baseline_iterations = naive.at("iterations").get<std::size_t>();
        rows.push_back(std::move(row));
      }
      const std::string text = compare_to_csv(rows);
      if (cmp_out.empty()) {
        std::cout << text;
      } else {
        write_text_file(cmp_out, text);
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: bad number: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
