#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "setree/bench.hpp"
#include "setree/canonical_json.hpp"
#include "setree/coding_tree.hpp"
#include "setree/contrastive.hpp"
#include "setree/error.hpp"
#include "setree/io.hpp"
#include "setree/minimizer.hpp"
#include "setree/oracle.hpp"
#include "setree/version.hpp"

namespace {

using nlohmann::json;
using namespace setree;

struct Outcome {
  std::string fingerprint;
  json result;
};

bool g_verbose = false;

void say(const std::string& text) {
  if (g_verbose) {
    std::cerr << text << '\n';
  }
}

std::string fmt(double x) { return format_real(x); }

// ---------------------------------------------------------------------------

struct EntropyArgs {
  std::string input;
  std::string tree;
};

Outcome run_entropy(const EntropyArgs& a) {
  const auto in = read_edge_list(a.input);
  const Graph& g = in.graph;
  Outcome out{fingerprint_hex(g.fingerprint()), json::object()};
  if (a.tree.empty()) {
    const double h1 = one_dim_entropy(g);
    out.result = {{"h1_bits", h1}, {"num_vertices", g.num_vertices()}, {"num_edges", g.num_edges()}};
    say("one-dimensional entropy: " + fmt(h1) + " bits");
    return out;
  }
  const auto doc = parse_tree_document(read_text_file(a.tree));
  const CodingTree t = tree_from_document(doc, g);
  const auto violations = validate(t, g);
  if (!violations.empty()) {
    throw ConsistencyError("tree document is invalid: " + violations.front().rule + ": " + violations.front().message);
  }
  const auto report = tree_entropy(g, t);
  json per_node = json::object();
  for (const auto& [id, h] : report.per_node) {
    per_node[std::to_string(id)] = h;
  }
  out.result = {{"tree_entropy_bits", report.total},
                {"per_node", per_node},
                {"height", t.height()},
                {"warnings", report.warnings}};
  say("tree entropy: " + fmt(report.total) + " bits over " + std::to_string(report.per_node.size()) + " nodes");
  return out;
}

// ---------------------------------------------------------------------------

struct MinimizeArgs {
  std::string input;
  std::string output;
  int height = 2;
  std::string drop_mode = "literal";
  bool no_pad = false;
  bool trace = false;
};

json trace_json(const MinimizeTrace& trace) {
  json steps = json::array();
  for (const auto& s : trace.steps) {
    steps.push_back({{"kind", std::string(to_string(s.kind))},
                     {"nodes", s.nodes},
                     {"delta", s.delta},
                     {"entropy_after", s.entropy_after}});
  }
  return steps;
}

Outcome run_minimize(const MinimizeArgs& a) {
  MinimizeConfig cfg;
  cfg.height_k = a.height;
  cfg.drop_mode = parse_drop_mode(a.drop_mode);
  cfg.pad_to_exact_height = !a.no_pad;
  const auto in = read_edge_list(a.input);
  const Graph& g = in.graph;
  const auto res = minimize(g, cfg);
  const auto report = tree_entropy(g, res.tree);
  write_text_file(a.output, serialize_tree(res.tree, report, a.trace ? &res.trace : nullptr));

  Outcome out{fingerprint_hex(g.fingerprint()), json::object()};
  out.result = {{"initial_entropy", res.trace.initial_entropy},
                {"final_entropy", res.trace.final_entropy},
                {"combines", res.trace.count(StepKind::combine)},
                {"drops", res.trace.count(StepKind::drop)},
                {"pads", res.trace.count(StepKind::pad)},
                {"height", res.tree.height()},
                {"stage1_height", res.trace.stage1_height},
                {"drop_mode", std::string(to_string(cfg.drop_mode))},
                {"output", a.output}};
  if (a.trace) {
    out.result["trace"] = trace_json(res.trace);
  }
  say("entropy " + fmt(res.trace.initial_entropy) + " -> " + fmt(res.trace.final_entropy) + " bits, height " +
      std::to_string(res.tree.height()) + ", written to " + a.output);
  return out;
}

// ---------------------------------------------------------------------------

struct OracleArgs {
  std::string input;
  int height = 2;
};

Outcome run_oracle(const OracleArgs& a) {
  if (a.height < 2) {
    throw ConfigError("height must exceed 1 (got " + std::to_string(a.height) + ")");
  }
  const auto in = read_edge_list(a.input);
  const Graph& g = in.graph;
  const auto r = a.height == 2 ? optimal_height2(g) : optimal_heightk(g, a.height);
  json partition = json::array();
  for (const auto& block : r.optimal_partition()) {
    partition.push_back(block);
  }
  Outcome out{fingerprint_hex(g.fingerprint()), json::object()};
  out.result = {{"optimal_entropy", r.optimal_entropy},
                {"greedy_entropy", r.greedy_entropy},
                {"gap", r.gap},
                {"num_candidates", r.num_candidates},
                {"optimal_partition", partition}};
  say("optimum " + fmt(r.optimal_entropy) + ", greedy " + fmt(r.greedy_entropy) + " over " +
      std::to_string(r.num_candidates) + " candidates");
  return out;
}

// ---------------------------------------------------------------------------

struct RbbtArgs {
  std::string input;
  int height = 2;
  std::uint64_t seed = 0;
  int trials = 1;
};

Outcome run_rbbt(const RbbtArgs& a) {
  if (a.trials < 1) {
    throw ConfigError("trials must be positive");
  }
  const auto in = read_edge_list(a.input);
  const Graph& g = in.graph;
  std::vector<double> values;
  for (int i = 0; i < a.trials; ++i) {
    const auto t = rbbt(g, a.height, a.seed + static_cast<std::uint64_t>(i));
    values.push_back(tree_entropy(g, t).total);
  }
  double mean = 0.0;
  for (const double v : values) {
    mean += v;
  }
  mean /= static_cast<double>(values.size());
  Outcome out{fingerprint_hex(g.fingerprint()), json::object()};
  out.result = {{"trials", a.trials},
                {"seed", a.seed},
                {"mean", mean},
                {"min", *std::min_element(values.begin(), values.end())},
                {"max", *std::max_element(values.begin(), values.end())}};
  if (a.trials == 1) {
    out.result["entropy_bits"] = values.front();
  }
  say("RBBT mean entropy " + fmt(mean) + " bits over " + std::to_string(a.trials) + " trial(s)");
  return out;
}

// ---------------------------------------------------------------------------

struct DatasetArgs {
  std::string dir;
  std::string name;
  int minimize_height = 0;
  int jobs = 1;
};

Outcome run_dataset(const DatasetArgs& a) {
  if (a.jobs < 1) {
    throw ConfigError("jobs must be positive");
  }
  const auto bundle = parse_tudataset(a.dir, a.name);
  const auto stats = dataset_stats(bundle);
  std::string fp_bytes;
  for (const auto& g : bundle.graphs) {
    fp_bytes += fingerprint_hex(g.fingerprint());
  }
  Outcome out{fingerprint_hex(fnv1a(fp_bytes)), json::object()};
  out.result = {{"name", bundle.name},
                {"num_graphs", stats.num_graphs},
                {"num_classes", stats.num_classes},
                {"avg_nodes", stats.avg_nodes},
                {"avg_edges", stats.avg_edges},
                {"warnings", bundle.warnings}};
  say(bundle.name + ": " + std::to_string(stats.num_graphs) + " graphs, " + fmt(stats.avg_nodes) + " nodes and " +
      fmt(stats.avg_edges) + " edges on average");

  if (a.minimize_height != 0) {
    MinimizeConfig cfg;
    cfg.height_k = a.minimize_height;
    if (cfg.height_k < 2) {
      throw ConfigError("height must exceed 1 (got " + std::to_string(cfg.height_k) + ")");
    }
    const std::size_t n = bundle.graphs.size();
    std::vector<double> initial(n, 0.0);
    std::vector<double> final_h(n, 0.0);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          const auto r = minimize(bundle.graphs[i], cfg);
          initial[i] = r.trace.initial_entropy;
          final_h[i] = r.trace.final_entropy;
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) {
            failure = std::current_exception();
          }
        }
      }
    };
    const int threads = std::min<int>(a.jobs, static_cast<int>(std::max<std::size_t>(n, 1)));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) {
      pool.emplace_back(worker);
    }
    worker();
    for (auto& th : pool) {
      th.join();
    }
    if (failure) {
      std::rethrow_exception(failure);
    }
    double mi = 0.0;
    double mf = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mi += initial[i];
      mf += final_h[i];
    }
    if (n > 0) {
      mi /= static_cast<double>(n);
      mf /= static_cast<double>(n);
    }
    out.result["entropy"] = {{"height", cfg.height_k}, {"mean_initial", mi}, {"mean_final", mf}, {"graphs", n}};
    say("mean entropy " + fmt(mi) + " -> " + fmt(mf) + " bits at height " + std::to_string(cfg.height_k));
  }
  return out;
}

// ---------------------------------------------------------------------------

struct LossArgs {
  std::string view1;
  std::string view2;
  double tau = 1.0;
  std::string mode = "standard";
};

Outcome run_loss(const LossArgs& a) {
  const auto text1 = read_text_file(a.view1);
  const auto text2 = read_text_file(a.view2);
  EmbeddingBatch batch;
  batch.view1 = parse_matrix_csv(text1);
  batch.view2 = parse_matrix_csv(text2);
  batch.temperature = a.tau;
  batch.denominator_mode = parse_denominator_mode(a.mode);
  const auto loss = ntxent_loss(batch);
  Outcome out{fingerprint_hex(fnv1a(text1 + '\n' + text2)), json::object()};
  out.result = {{"per_sample", loss.per_sample},
                {"mean", loss.mean},
                {"tau", a.tau},
                {"mode", std::string(to_string(batch.denominator_mode))}};
  say("mean NT-Xent loss " + fmt(loss.mean));
  return out;
}

// ---------------------------------------------------------------------------

struct ScalingArgs {
  std::string family = "uniform-random";
  std::vector<Count> sizes;
  int height = 2;
  int repeats = 3;
  double mean_degree = 10.0;
  std::uint64_t seed = 1;
};

Outcome run_scaling(const ScalingArgs& a) {
  ScalingConfig cfg;
  cfg.family = parse_graph_family(a.family);
  cfg.sizes = a.sizes;
  cfg.height_k = a.height;
  cfg.repeats = a.repeats;
  cfg.mean_degree = a.mean_degree;
  cfg.seed = a.seed;
  const auto report = scaling_run(cfg);
  Outcome out{"", json::parse(scaling_report_json(report))};
  out.result["family"] = a.family;
  out.fingerprint = fingerprint_hex(fnv1a(canonical_json(json{{"family", a.family}, {"sizes", a.sizes}, {"seed", a.seed}})));
  for (const auto& r : report.rows) {
    say("m=" + std::to_string(r.m) + " n=" + std::to_string(r.n) + " total " + fmt(r.total_ms) + " ms");
  }
  return out;
}

struct RecoveryArgs {
  int blocks = 2;
  double p_in = 0.9;
  double p_out = 0.05;
  VertexId n = 40;
  std::uint64_t seed = 1;
  int seeds = 20;
};

Outcome run_recovery(const RecoveryArgs& a) {
  if (a.seeds < 1) {
    throw ConfigError("seeds must be positive");
  }
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < a.seeds; ++i) {
    seeds.push_back(a.seed + static_cast<std::uint64_t>(i));
  }
  const auto report = recovery_run({a.blocks, a.p_in, a.p_out}, a.n, seeds);
  Outcome out;
  out.result = {{"blocks", a.blocks},
                {"p_in", a.p_in},
                {"p_out", a.p_out},
                {"n", a.n},
                {"seeds", seeds},
                {"per_seed", report.per_seed},
                {"mean_agreement", report.mean_agreement}};
  out.fingerprint = fingerprint_hex(fnv1a(canonical_json(out.result)));
  say("mean agreement " + fmt(report.mean_agreement));
  return out;
}

// ---------------------------------------------------------------------------

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return "parse";
  if (dynamic_cast<const InputError*>(&e)) return "input";
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const PreconditionError*>(&e)) return "precondition";
  if (dynamic_cast<const ConsistencyError*>(&e)) return "consistency";
  if (dynamic_cast<const SizeError*>(&e)) return "size";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  if (dynamic_cast<const IoError*>(&e)) return "io";
  if (dynamic_cast<const FormatError*>(&e)) return "format";
  if (dynamic_cast<const Error*>(&e)) return "user";
  return "internal";
}

int report_error(const std::string& command, const std::string& kind, const std::string& message, int code) {
  const json doc{{"command", command}, {"error", {{"kind", kind}, {"message", message}}}, {"exit_code", code},
                 {"version", std::string(kVersion)}};
  std::cerr << canonical_json(doc) << '\n';
  return code;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structural entropy and coding trees"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kVersion));
  app.add_flag("-v,--verbose", g_verbose, "Human-readable summary on stderr");
  if (const char* level = std::getenv("SETREE_LOG"); level && std::string(level) != "quiet") {
    g_verbose = true;
  }

  std::string command;
  std::function<Outcome()> action;

  EntropyArgs entropy;
  auto* c_entropy = app.add_subcommand("entropy", "One-dimensional or coding-tree entropy");
  c_entropy->add_option("--input", entropy.input, "Edge list")->required();
  c_entropy->add_option("--tree", entropy.tree, "Tree document");
  c_entropy->callback([&] { command = "entropy"; action = [&] { return run_entropy(entropy); }; });

  MinimizeArgs mini;
  auto* c_min = app.add_subcommand("minimize", "Greedy minimum-entropy coding tree of fixed height");
  c_min->add_option("--input", mini.input, "Edge list")->required();
  c_min->add_option("--height", mini.height, "Tree height k")->required();
  c_min->add_option("--output", mini.output, "Tree document to write")->required();
  c_min->add_option("--drop-mode", mini.drop_mode, "literal or height-aware");
  c_min->add_flag("--no-pad", mini.no_pad, "Keep the tree shorter than k when Stage 1 stops early");
  c_min->add_flag("--trace", mini.trace, "Record the operation trace");
  c_min->callback([&] { command = "minimize"; action = [&] { return run_minimize(mini); }; });

  OracleArgs oracle;
  auto* c_oracle = app.add_subcommand("oracle", "Exhaustive optimum versus greedy on a small graph");
  c_oracle->add_option("--input", oracle.input, "Edge list")->required();
  c_oracle->add_option("--height", oracle.height, "Tree height k")->required();
  c_oracle->callback([&] { command = "oracle"; action = [&] { return run_oracle(oracle); }; });

  RbbtArgs rb;
  auto* c_rbbt = app.add_subcommand("rbbt", "Random balanced binary tree baseline");
  c_rbbt->add_option("--input", rb.input, "Edge list")->required();
  c_rbbt->add_option("--height", rb.height, "Tree height k")->required();
  c_rbbt->add_option("--seed", rb.seed, "First seed")->required();
  c_rbbt->add_option("--trials", rb.trials, "Seeds seed..seed+trials-1");
  c_rbbt->callback([&] { command = "rbbt"; action = [&] { return run_rbbt(rb); }; });

  DatasetArgs ds;
  auto* c_ds = app.add_subcommand("dataset", "TUDataset statistics");
  c_ds->add_option("--tudataset", ds.dir, "Dataset directory")->required();
  c_ds->add_option("--name", ds.name, "Dataset name")->required();
  c_ds->add_option("--minimize-height", ds.minimize_height, "Also minimize every graph at this height");
  c_ds->add_option("--jobs", ds.jobs, "Worker threads for minimization");
  c_ds->callback([&] { command = "dataset"; action = [&] { return run_dataset(ds); }; });

  LossArgs loss;
  auto* c_loss = app.add_subcommand("loss", "NT-Xent loss of two embedding views");
  c_loss->add_option("--view1", loss.view1, "CSV, one embedding per row")->required();
  c_loss->add_option("--view2", loss.view2, "CSV, one embedding per row")->required();
  c_loss->add_option("--tau", loss.tau, "Temperature")->required();
  c_loss->add_option("--mode", loss.mode, "standard or literal-eq3");
  c_loss->callback([&] { command = "loss"; action = [&] { return run_loss(loss); }; });

  auto* c_bench = app.add_subcommand("bench", "Synthetic benchmarks");
  c_bench->require_subcommand(1);
  c_bench->fallthrough();
  ScalingArgs sc;
  auto* c_scaling = c_bench->add_subcommand("scaling", "Runtime against edge count");
  c_scaling->add_option("--family", sc.family, "uniform-random or preferential-attachment");
  c_scaling->add_option("--sizes", sc.sizes, "Target edge counts, ascending")->required()->delimiter(',');
  c_scaling->add_option("--height", sc.height, "Tree height k");
  c_scaling->add_option("--repeats", sc.repeats, "Timed runs per size");
  c_scaling->add_option("--mean-degree", sc.mean_degree, "Mean degree of generated graphs");
  c_scaling->add_option("--seed", sc.seed, "Generator seed");
  c_scaling->callback([&] { command = "bench scaling"; action = [&] { return run_scaling(sc); }; });
  RecoveryArgs rc;
  auto* c_recovery = c_bench->add_subcommand("recovery", "Planted partition recovery at height 2");
  c_recovery->add_option("--blocks", rc.blocks, "Planted blocks");
  c_recovery->add_option("--p-in", rc.p_in, "Edge probability inside a block");
  c_recovery->add_option("--p-out", rc.p_out, "Edge probability across blocks");
  c_recovery->add_option("--n", rc.n, "Vertices");
  c_recovery->add_option("--seed", rc.seed, "First seed");
  c_recovery->add_option("--seeds", rc.seeds, "Number of seeds");
  c_recovery->callback([&] { command = "bench recovery"; action = [&] { return run_recovery(rc); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error(command.empty() ? "" : command, "usage", e.what(), 1);
  }

  try {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out = action();
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    const json report{{"command", command},
                      {"input_fingerprint", out.fingerprint},
                      {"result", out.result},
                      {"timing_ms", ms},
                      {"version", std::string(kVersion)}};
    std::cout << canonical_json(report) << '\n';
    return 0;
  } catch (const InternalError& e) {
    return report_error(command, "internal", e.what(), 2);
  } catch (const Error& e) {
    return report_error(command, error_kind(e), e.what(), 1);
  } catch (const std::exception& e) {
    return report_error(command, "internal", e.what(), 2);
  }
}
