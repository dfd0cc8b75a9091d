#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdm/attacks.hpp"
#include "sdm/cli.hpp"
#include "sdm/error.hpp"
#include "sdm/interference.hpp"
#include "sdm/kernels.hpp"
#include "sdm/landscape.hpp"
#include "sdm/parallel.hpp"
#include "sdm/report_io.hpp"
#include "sdm/serialize.hpp"
#include "sdm/timing.hpp"
#include "sdm/train.hpp"

namespace sdm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct OptionSpec {
  std::string key;
  std::string fallback;  // empty: no default
  bool required = false;
  std::string help;
};

struct Context {
  Resolved opts;
  std::ostream& out;
  fs::path out_dir;
};

struct Command {
  std::string name;
  std::string help;
  std::vector<OptionSpec> options;
  std::function<void(Context&)> run;
};

std::vector<OptionSpec> common_options() {
  return {
      {"config", "", false, "plain-text key = value file; flags override it"},
      {"out-dir", ".", false, "directory for all outputs"},
      {"threads", "", false, "worker threads (fallback: SDM_THREADS, else 1)"},
      {"simd", "", false, "kernel set: scalar, avx2, neon (default: auto)"},
  };
}

std::vector<OptionSpec> attack_options() {
  return {
      {"method", "sdm", false, "fgsm, pgd, margin_pgd, sdm"},
      {"norm", "linf", false, "linf or l2"},
      {"eps", "", false, "budget (default 8/255 linf, 1.0 l2)"},
      {"alpha", "", false, "step size (default 2/255 linf, 0.2 l2)"},
      {"steps", "100", false, "total gradient steps Z"},
      {"schedule", "", false, "explicit SDM schedule C,N,T"},
      {"random-start", "auto", false, "auto, true or false"},
      {"clamp01", "true", false, "clamp adversarial inputs to [0,1]"},
      {"l2-mode", "normalized", false, "normalized or paper_literal"},
      {"zeta", "1e-10", false, "stability constant"},
      {"early-stop", "false", false, "stop updating examples once misclassified"},
      {"seed", "0", false, "attack seed"},
  };
}

const std::string kLinfEps = "0.03137254901960784";   // 8/255
const std::string kLinfAlpha = "0.00784313725490196"; // 2/255

void resolve_attack_defaults(Resolved& r) {
  const Norm norm = parse_norm(r.str("norm"));
  if (!r.has("eps")) r.set("eps", norm == Norm::linf ? kLinfEps : "1.0");
  if (!r.has("alpha")) r.set("alpha", norm == Norm::linf ? kLinfAlpha : "0.2");
}

AttackConfig attack_config(const Resolved& r, AttackMethod method) {
  AttackConfig cfg;
  cfg.method = method;
  cfg.norm = parse_norm(r.str("norm"));
  cfg.epsilon = r.num("eps");
  cfg.alpha = r.num("alpha");
  cfg.total_steps = r.count("steps");
  if (r.has("schedule")) {
    const auto parts = r.size_list("schedule");
    if (parts.size() != 3) throw ConfigError("--schedule expects C,N,T");
    cfg.schedule = Schedule{parts[0], parts[1], parts[2]};
  }
  const auto& rs = r.str("random-start");
  if (rs != "auto") cfg.random_start = r.flag("random-start");
  cfg.clamp01 = r.flag("clamp01");
  cfg.l2_step_mode = parse_l2_mode(r.str("l2-mode"));
  cfg.zeta = r.num("zeta");
  cfg.early_stop = r.flag("early-stop");
  cfg.seed = r.u64("seed");
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

std::string with_budget_check(const Tensor& adv, const Tensor& nat, const AttackConfig& cfg) {
  for (std::size_t i = 0; i < adv.rows(); ++i) {
    const Vec delta = subtract(adv.row(i), nat.row(i));
    const bool ok = cfg.norm == Norm::linf ? norm_linf(delta) <= cfg.epsilon + 1e-9
                                           : norm_l2(delta) <= cfg.epsilon * (1.0 + 1e-6);
    if (!ok) throw NumericError("example " + std::to_string(i) + " violates the perturbation budget");
    if (cfg.clamp01) {
      for (double v : adv.row(i)) {
        if (v < 0.0 || v > 1.0) throw NumericError("example " + std::to_string(i) + " leaves [0,1]");
      }
    }
  }
  return "budget check passed";
}

DatasetSplit limited(const DatasetSplit& data, const Resolved& r) {
  if (!r.has("limit")) return data;
  const std::size_t limit = r.count("limit");
  if (limit == 0 || limit >= data.size()) return data;
  return slice(data, 0, limit);
}

// --- commands ----------------------------------------------------------------

void cmd_gen_data(Context& ctx) {
  const auto& r = ctx.opts;
  SynthSpec spec;
  const auto& kind = r.str("kind");
  if (kind == "blobs") {
    spec.kind = SynthKind::blobs;
  } else if (kind == "rings") {
    spec.kind = SynthKind::rings;
  } else {
    throw ConfigError("--kind must be blobs or rings");
  }
  spec.n = r.count("n");
  spec.d = r.count("d");
  spec.k = r.count("k");
  spec.spread = r.num("spread");
  spec.seed = r.u64("seed");
  DatasetSplit data;
  try {
    data = synth_dataset(spec);
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
  const fs::path path = ctx.out_dir / r.str("out");
  save_dataset(data, path);
  ctx.out << "wrote " << path.string() << " (n=" << spec.n << ", d=" << spec.d << ", K=" << spec.k
          << ")\n";
}

void cmd_train(Context& ctx) {
  const auto& r = ctx.opts;
  const DatasetSplit data = load_dataset(r.str("data"));
  const std::size_t classes = r.has("classes") ? r.count("classes") : data.num_classes;
  for (auto y : data.labels) {
    if (y >= classes) {
      throw ConfigError("dataset label " + std::to_string(y) + " is outside the model's K=" +
                        std::to_string(classes));
    }
  }
  DatasetSplit train_data = data;
  train_data.num_classes = classes;

  std::vector<std::size_t> dims{data.dim()};
  for (auto h : r.size_list("hidden")) dims.push_back(h);
  dims.push_back(classes);

  TrainConfig cfg;
  cfg.epochs = r.count("epochs");
  cfg.batch_size = r.count("batch-size");
  cfg.learning_rate = r.num("lr");
  cfg.seed = r.u64("seed");
  if (r.num("adv-eps") > 0.0) {
    cfg.adversarial = AdvTrainConfig{r.num("adv-eps"), r.num("adv-alpha"), r.count("adv-steps")};
  }
  MlpModel init = r.has("init-model") ? load_model(r.str("init-model"))
                                      : MlpModel::random(dims, cfg.seed);
  const auto result = train(std::move(init), train_data, cfg);

  const fs::path model_path = ctx.out_dir / r.str("out");
  save_model(result.model, model_path);
  json epochs = json::array();
  for (std::size_t e = 0; e < result.trace.size(); ++e) {
    epochs.push_back(json{{"epoch", e + 1},
                          {"loss", result.trace[e].loss},
                          {"accuracy", result.trace[e].accuracy}});
  }
  json metrics{{"dims", result.model.dims()},
               {"epochs", epochs},
               {"final_accuracy", accuracy(result.model, train_data)},
               {"adversarial_training", cfg.adversarial.has_value()}};
  if (cfg.adversarial) {
    metrics["adversarial"] = json{{"eps", cfg.adversarial->epsilon},
                                  {"alpha", cfg.adversarial->alpha},
                                  {"steps", cfg.adversarial->steps}};
  }
  write_text(ctx.out_dir / "train_metrics.json", metrics.dump(2) + "\n");
  ctx.out << "wrote " << model_path.string() << " (train accuracy "
          << metrics["final_accuracy"].get<double>() << ")\n";
}

void cmd_attack(Context& ctx) {
  auto& r = ctx.opts;
  resolve_attack_defaults(r);
  const MlpModel model = load_model(r.str("model"));
  const DatasetSplit data = limited(load_dataset(r.str("data")), r);
  const AttackConfig cfg = attack_config(r, parse_method(r.str("method")));
  cfg.validate(model.num_classes());
  if (cfg.method == AttackMethod::sdm) {
    const auto s = cfg.resolved_schedule(model.num_classes());
    r.set("schedule", std::to_string(s.cycles) + "," + std::to_string(s.stages) + "," +
                          std::to_string(s.steps));
  }
  const auto outcome = run_attack(model, data, cfg);

  const std::string tag = to_string(cfg.method);
  DatasetSplit adv{outcome.adversarial, data.labels, data.num_classes};
  const fs::path adv_path = ctx.out_dir / ("adv_" + tag + ".sdmd");
  save_dataset(adv, adv_path);
  std::ofstream report(ctx.out_dir / ("report_" + tag + ".jsonl"), std::ios::trunc);
  write_report_jsonl(report, outcome.report,
                     json{{"method", tag},
                          {"gradient_steps", outcome.gradient_steps},
                          {"tie_advisories", outcome.tie_advisories}});
  report.close();

  // Post-hoc verification on the bytes actually written.
  const DatasetSplit reloaded = load_dataset(adv_path);
  const auto status = with_budget_check(reloaded.inputs, data.inputs, cfg);
  ctx.out << tag << ": ASR " << outcome.report.attack_success_rate << " over " << data.size()
          << " examples; " << status << "\n";
}

void cmd_eval(Context& ctx) {
  const auto& r = ctx.opts;
  const MlpModel model = load_model(r.str("model"));
  const DatasetSplit data = load_dataset(r.str("data"));
  std::optional<DatasetSplit> natural;
  if (r.has("natural")) {
    natural = load_dataset(r.str("natural"));
    if (natural->inputs.shape() != data.inputs.shape()) {
      throw ConfigError("--natural shape differs from --data");
    }
  }
  const auto report =
      evaluate(model, data.inputs, data.labels, natural ? &natural->inputs : nullptr);
  std::ofstream out(ctx.out_dir / r.str("out"), std::ios::trunc);
  write_report_jsonl(out, report);
  ctx.out << "ASR " << report.attack_success_rate << ", mean CE " << report.mean_ce_loss << "\n";
}

void cmd_compare(Context& ctx) {
  auto& r = ctx.opts;
  resolve_attack_defaults(r);
  const MlpModel model = load_model(r.str("model"));
  const DatasetSplit data = limited(load_dataset(r.str("data")), r);
  const auto method_names = r.list("methods");
  if (method_names.size() < 2) throw ConfigError("--methods needs at least two methods");

  std::vector<std::string> names;
  std::vector<AttackOutcome> outcomes;
  for (const auto& m : method_names) {
    const AttackConfig cfg = attack_config(r, parse_method(m));
    outcomes.push_back(run_attack(model, data, cfg));
    names.push_back(to_string(cfg.method));
  }
  std::vector<std::vector<bool>> masks;
  for (const auto& o : outcomes) masks.push_back(o.success());
  const auto cmp = success_set_analysis(names, masks);

  json per_method = json::object();
  for (std::size_t i = 0; i < names.size(); ++i) {
    per_method[names[i]] = aggregate_json(outcomes[i].report);
  }
  json differences = json::array();
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  for (std::size_t a = 0; a < names.size(); ++a) {
    for (std::size_t b = 0; b < names.size(); ++b) {
      if (a == b) continue;
      const auto ce_a = outcomes[a].report.ce_losses();
      const auto ce_b = outcomes[b].report.ce_losses();
      differences.push_back(json{{"set", names[a] + "\\" + names[b]},
                                 {"mean_ce_" + names[a], opt(mean_over_difference(masks[a], masks[b], ce_a))},
                                 {"mean_ce_" + names[b], opt(mean_over_difference(masks[a], masks[b], ce_b))}});
    }
  }
  json extra{{"per_method", per_method}, {"difference_ce", differences}};

  auto index_of = [&](const std::string& n) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == n) return i;
    }
    return std::nullopt;
  };
  const auto ipgd = index_of("pgd");
  const auto isdm = index_of("sdm");
  const auto ibase = index_of(to_string(parse_method(r.str("baseline"))));
  if (ipgd && isdm && ibase) {
    const auto hl = high_loss_analysis(model, outcomes[*ipgd].adversarial,
                                       outcomes[*isdm].adversarial, outcomes[*ibase].adversarial,
                                       data.labels);
    extra["high_loss"] = to_json(hl);
    extra["high_loss"]["baseline"] = names[*ibase];
  }
  if (r.has("grid")) {
    const auto g = r.size_list("grid");
    if (g.size() != 3) throw ConfigError("--grid expects C,H,W");
    const GridShape grid{g[0], g[1], g[2]};
    json rows = json::array();
    for (std::size_t i = 0; i < names.size(); ++i) {
      rows.push_back(to_json(interference_suite(model, names[i], outcomes[i].adversarial,
                                                data.labels, grid, r.u64("seed"))));
    }
    extra["interference"] = rows;
  }
  std::ofstream out(ctx.out_dir / "comparison.jsonl", std::ios::trunc);
  write_comparison_jsonl(out, cmp, extra);
  for (std::size_t i = 0; i < names.size(); ++i) {
    ctx.out << names[i] << ": ASR " << outcomes[i].report.attack_success_rate << "\n";
  }
}

void cmd_landscape(Context& ctx) {
  const auto& r = ctx.opts;
  const MlpModel model = load_model(r.str("model"));
  const DatasetSplit data = load_dataset(r.str("data"));
  const std::size_t index = r.count("index");
  if (index >= data.size()) throw ConfigError("--index beyond dataset size");
  LandscapeOptions opts;
  opts.samples = r.count("samples");
  opts.resolution = r.count("grid");
  opts.seed = r.u64("seed");
  if (opts.samples < 50) throw ConfigError("--samples must be >= 50");
  if (opts.resolution < 8) throw ConfigError("--grid must be >= 8");
  const auto grid = landscape(model, data.inputs.row(index), data.labels[index], r.num("eps"), opts);
  std::ofstream out(ctx.out_dir / r.str("out"), std::ios::trunc);
  write_landscape_csv(out, grid);
  ctx.out << "wrote " << grid.resolution << "x" << grid.resolution << " landscape grid\n";
}

void cmd_bench(Context& ctx) {
  auto& r = ctx.opts;
  resolve_attack_defaults(r);
  const MlpModel model = load_model(r.str("model"));
  DatasetSplit data = load_dataset(r.str("data"));
  const std::size_t batch = std::min(r.count("batch"), data.size());
  if (batch == 0) throw ConfigError("--batch must be >= 1");
  data = slice(data, 0, batch);
  std::vector<AttackConfig> cfgs;
  for (const auto& m : r.list("methods")) cfgs.push_back(attack_config(r, parse_method(m)));
  const auto rows = timing_bench(model, data, cfgs, r.count("repeats"));
  json j = json::array();
  for (const auto& row : rows) {
    j.push_back(to_json(row));
    ctx.out << std::left << std::setw(12) << row.method << std::fixed << std::setprecision(4)
            << row.mean_ms << " +/- " << row.std_ms << " ms/step\n";
  }
  write_text(ctx.out_dir / r.str("out"), j.dump(2) + "\n");
}

std::vector<Command> commands() {
  std::vector<Command> cmds;
  cmds.push_back({"gen-data",
                  "generate a synthetic dataset (SDMD)",
                  {{"kind", "blobs", false, "blobs or rings"},
                   {"n", "", true, "number of examples"},
                   {"d", "", true, "input dimension"},
                   {"k", "", true, "number of classes"},
                   {"spread", "0.05", false, "class spread"},
                   {"seed", "0", false, "generator seed"},
                   {"out", "dataset.sdmd", false, "output file name inside --out-dir"}},
                  cmd_gen_data});
  cmds.push_back({"train",
                  "train an MLP classifier (SDMW)",
                  {{"data", "", true, "training dataset"},
                   {"hidden", "32,32", false, "hidden layer widths"},
                   {"classes", "", false, "model K (default: dataset K)"},
                   {"epochs", "50", false, "epochs"},
                   {"batch-size", "32", false, "minibatch size"},
                   {"lr", "0.1", false, "learning rate"},
                   {"seed", "0", false, "init + shuffle seed"},
                   {"init-model", "", false, "start from an existing model"},
                   {"adv-eps", "0", false, "PGD adversarial training budget (0 = clean)"},
                   {"adv-alpha", "0.025", false, "PGD adversarial training step"},
                   {"adv-steps", "10", false, "PGD adversarial training steps"},
                   {"out", "model.sdmw", false, "output file name inside --out-dir"}},
                  cmd_train});
  auto attack_opts = attack_options();
  attack_opts.push_back({"model", "", true, "target model"});
  attack_opts.push_back({"data", "", true, "natural examples"});
  attack_opts.push_back({"limit", "", false, "attack only the first N examples"});
  cmds.push_back({"attack", "run one attack; writes adv_<method>.sdmd and report_<method>.jsonl",
                  attack_opts, cmd_attack});
  cmds.push_back({"eval",
                  "evaluate a model on a dataset; writes a JSON-lines report",
                  {{"model", "", true, "model"},
                   {"data", "", true, "inputs to classify"},
                   {"natural", "", false, "natural examples for perturbation norms"},
                   {"out", "eval_report.jsonl", false, "output file name inside --out-dir"}},
                  cmd_eval});
  auto compare_opts = attack_options();
  for (auto& o : compare_opts) {
    if (o.key == "method") o = {"methods", "pgd,margin_pgd,sdm", false, "comma-separated methods"};
  }
  compare_opts.push_back({"model", "", true, "target model"});
  compare_opts.push_back({"data", "", true, "natural examples"});
  compare_opts.push_back({"limit", "", false, "attack only the first N examples"});
  compare_opts.push_back({"baseline", "margin_pgd", false, "baseline for the high-loss analysis"});
  compare_opts.push_back({"grid", "", false, "C,H,W layout to run the interference suite"});
  cmds.push_back({"compare", "success-set, high-loss and interference analysis", compare_opts,
                  cmd_compare});
  cmds.push_back({"landscape",
                  "probability landscape around one example; writes CSV",
                  {{"model", "", true, "model"},
                   {"data", "", true, "dataset"},
                   {"index", "0", false, "example index"},
                   {"eps", kLinfEps, false, "l-inf sampling radius"},
                   {"samples", "500", false, "random perturbations"},
                   {"grid", "64", false, "grid resolution"},
                   {"seed", "0", false, "sampling seed"},
                   {"out", "landscape.csv", false, "output file name inside --out-dir"}},
                  cmd_landscape});
  auto bench_opts = attack_options();
  for (auto& o : bench_opts) {
    if (o.key == "method") o = {"methods", "pgd,sdm", false, "comma-separated methods"};
  }
  bench_opts.push_back({"model", "", true, "target model"});
  bench_opts.push_back({"data", "", true, "dataset"});
  bench_opts.push_back({"batch", "32", false, "batch size"});
  bench_opts.push_back({"repeats", "5", false, "timed repeats (>= 3)"});
  bench_opts.push_back({"out", "bench.json", false, "output file name inside --out-dir"});
  cmds.push_back({"bench", "per-step wall time per method", bench_opts, cmd_bench});
  return cmds;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto cmds = commands();
  CLI::App app{"Sequential difference maximization attack toolkit", "sdm"};
  app.require_subcommand(1);

  struct Bound {
    const Command* cmd = nullptr;
    CLI::App* sub = nullptr;
    std::vector<OptionSpec> specs;
    std::map<std::string, std::string> given;
    std::map<std::string, CLI::Option*> handles;
  };
  std::vector<Bound> bound(cmds.size());
  for (std::size_t c = 0; c < cmds.size(); ++c) {
    auto& b = bound[c];
    b.cmd = &cmds[c];
    b.sub = app.add_subcommand(cmds[c].name, cmds[c].help);
    b.specs = common_options();
    b.specs.insert(b.specs.end(), cmds[c].options.begin(), cmds[c].options.end());
    for (const auto& spec : b.specs) {
      b.handles[spec.key] = b.sub->add_option("--" + spec.key, b.given[spec.key], spec.help);
    }
  }

  // CLI11 wants argv-style input in reverse order for the vector overload.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ExitCode::ok;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return ExitCode::usage;
  }

  for (auto& b : bound) {
    if (!b.sub->parsed()) continue;
    try {
      std::map<std::string, std::string> file_values;
      if (b.handles["config"]->count() > 0) file_values = read_config_file(b.given["config"]);
      std::set<std::string> known;
      for (const auto& s : b.specs) known.insert(s.key);
      for (const auto& [k, v] : file_values) {
        if (!known.count(k) || k == "config") {
          throw ConfigError("unknown config key '" + k + "' for " + b.cmd->name);
        }
      }
      std::map<std::string, std::string> merged;
      for (const auto& s : b.specs) {
        if (s.key == "config") continue;
        if (b.handles[s.key]->count() > 0) {
          merged[s.key] = b.given[s.key];
        } else if (file_values.count(s.key)) {
          merged[s.key] = file_values[s.key];
        } else {
          merged[s.key] = s.fallback;
        }
        if (s.required && merged[s.key].empty()) {
          err << "usage error: " << b.cmd->name << " requires --" << s.key << "\n"
              << b.sub->help();
          return ExitCode::usage;
        }
      }
      Context ctx{Resolved(std::move(merged)), out, {}};
      if (ctx.opts.has("threads") && ctx.opts.count("threads") == 0) {
        throw ConfigError("--threads must be >= 1");
      }
      set_thread_count(ctx.opts.has("threads") ? ctx.opts.count("threads") : default_thread_count());
      ctx.opts.set("threads", std::to_string(thread_count()));
      if (ctx.opts.has("simd")) simd::select(ctx.opts.str("simd"));
      ctx.opts.set("simd", simd::active().name);
      ctx.out_dir = ctx.opts.str("out-dir");
      fs::create_directories(ctx.out_dir);
      b.cmd->run(ctx);
      write_text(ctx.out_dir / (b.cmd->name + ".config.txt"), format_config(ctx.opts.values()));
      return ExitCode::ok;
    } catch (const ConfigError& e) {
      err << "configuration error: " << e.what() << "\n";
      return ExitCode::usage;
    } catch (const ContractError& e) {
      err << "invalid arguments: " << e.what() << "\n";
      return ExitCode::usage;
    } catch (const FormatError& e) {
      err << "data format error: " << e.what() << "\n";
      return ExitCode::data_format;
    } catch (const NumericError& e) {
      err << "numerical failure: " << e.what() << "\n";
      return ExitCode::numerical;
    } catch (const fs::filesystem_error& e) {
      err << "configuration error: " << e.what() << "\n";
      return ExitCode::usage;
    }
  }
  return ExitCode::usage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return dispatch(args, out, err);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace sdm::cli
