// Copyright 2026 The typedhwr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli/commands.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "typedhwr/alignkit/alignkit.hpp"
#include "typedhwr/common/error.hpp"
#include "typedhwr/formset/dataset.hpp"
#include "typedhwr/formset/template.hpp"
#include "typedhwr/metrics/metrics.hpp"
#include "typedhwr/recognizer/params.hpp"
#include "typedhwr/recognizer/trainer.hpp"
#include "typedhwr/typedgen/alphabet.hpp"
#include "typedhwr/typedgen/lexicon.hpp"
#include "typedhwr/typedgen/weights.hpp"

namespace typedhwr::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

enum class Verbosity { kQuiet, kInfo, kDebug };

// One JSON config: top-level keys apply to every command, a section named
// after the command overrides them. Flags given on the command line win.
class Settings {
 public:
  void load(const fs::path& path, const std::string& command) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    ordered_json j;
    try {
      j = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("malformed config file " + path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!it.value().is_object()) merged_[it.key()] = it.value();
    }
    if (j.contains(command) && j[command].is_object()) {
      for (auto it = j[command].begin(); it != j[command].end(); ++it) merged_[it.key()] = it.value();
    }
  }

  // Fills `value` from the config unless the flag was given.
  template <typename T>
  void fill(const CLI::Option* flag, T& value) const {
    if (flag->count() > 0) return;
    std::string key = flag->get_name(false, true);
    key.erase(0, key.find_first_not_of('-'));
    std::replace(key.begin(), key.end(), '-', '_');
    if (!merged_.contains(key)) return;
    try {
      if constexpr (std::is_same_v<T, fs::path>) {
        value = fs::path(merged_[key].get<std::string>());
      } else {
        value = merged_[key].get<T>();
      }
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("config key '" + key + "' has the wrong type");
    }
  }

 private:
  ordered_json merged_ = ordered_json::object();
};

struct Global {
  fs::path config;
  fs::path fonts_dir;
  fs::path lexicons_dir = fs::path(TYPEDHWR_DATA_DIR) / "lexicons";
  fs::path alphabet;
  std::string verbosity = "info";
  int workers = 1;
  std::uint64_t seed = 0;

  Verbosity level() const {
    if (verbosity == "quiet") return Verbosity::kQuiet;
    if (verbosity == "debug") return Verbosity::kDebug;
    return Verbosity::kInfo;
  }
};

class Log {
 public:
  Log(std::ostream& err, Verbosity v) : err_(err), v_(v) {}
  void info(const std::string& msg) const {
    if (v_ != Verbosity::kQuiet) err_ << msg << "\n";
  }
  void debug(const std::string& msg) const {
    if (v_ == Verbosity::kDebug) err_ << msg << "\n";
  }

 private:
  std::ostream& err_;
  Verbosity v_;
};

void require_file(const fs::path& p, const std::string& what) {
  if (p.empty()) throw ConfigError(what + " is required");
  if (!fs::is_regular_file(p)) throw ConfigError(what + " not found: " + p.string());
}

void require_dir(const fs::path& p, const std::string& what) {
  if (!p.empty() && !fs::is_directory(p)) throw ConfigError(what + " is not a directory: " + p.string());
}

typedgen::Alphabet resolve_alphabet(const Global& g) {
  if (g.alphabet.empty()) return typedgen::Alphabet::default_alphabet();
  require_file(g.alphabet, "alphabet file");
  return typedgen::Alphabet::load(g.alphabet);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

// ---- generate ----

struct GenerateArgs {
  fs::path template_path;
  fs::path weights;
  int count = 1000;
  fs::path out = "dataset";
  int text_height = 32;
};

void cmd_generate(const GenerateArgs& a, const Global& g, std::ostream& out, const Log& log) {
  require_file(a.template_path, "template");
  if (a.count < 0) throw ConfigError("--count must be >= 0");
  require_dir(g.fonts_dir, "fonts dir");
  require_dir(g.lexicons_dir, "lexicons dir");
  const auto form = formset::FormTemplate::load(a.template_path);
  const auto weights = a.weights.empty() ? typedgen::TypeWeights::defaults() : typedgen::TypeWeights::load(a.weights);
  const auto lexicons = typedgen::LexiconSet::load_dir(g.lexicons_dir);
  const auto alphabet = resolve_alphabet(g);
  const auto fonts = g.fonts_dir.empty() ? imaging::FontCollection() : imaging::FontCollection::load_dir(g.fonts_dir);
  log.info("generate: " + std::to_string(a.count) + " samples, " + std::to_string(fonts.fonts().size()) +
           " loaded fonts, seed " + std::to_string(g.seed));

  formset::EmitConfig cfg;
  cfg.out_dir = a.out;
  cfg.workers = g.workers;
  cfg.style.text_height = a.text_height;
  const auto records = formset::emit_dataset(a.count, form, weights, cfg, g.seed, {lexicons, alphabet, fonts});

  std::array<long, typedgen::kNumContentTypes> counts{};
  for (const auto& r : records) ++counts[static_cast<std::size_t>(typedgen::index_of(r.ctype))];
  out << std::left << std::setw(16) << "type" << std::right << std::setw(8) << "count" << std::setw(9) << "share"
      << "\n";
  for (int t = 0; t < typedgen::kNumContentTypes; ++t) {
    const long c = counts[static_cast<std::size_t>(t)];
    const double share = records.empty() ? 0.0 : static_cast<double>(c) / static_cast<double>(records.size());
    out << std::left << std::setw(16) << typedgen::to_string(static_cast<typedgen::ContentType>(t)) << std::right
        << std::setw(8) << c << std::setw(9) << fixed(share, 4) << "\n";
  }
  out << std::left << std::setw(16) << "total" << std::right << std::setw(8) << records.size() << "\n";
  out << "manifest: " << (a.out / cfg.manifest_name).string() << "\n";
}

// ---- train ----

struct TrainArgs {
  fs::path manifest;
  std::string arch = "desk";
  bool untyped = false;
  fs::path trainer_config;
  fs::path out = "model.json";
  fs::path log_path;
  int iterations = -1;
  int batch_size = -1;
  double learning_rate = -1;
  int validate_every = -1;
};

recognizer::ArchConfig resolve_arch(const std::string& spec, int num_classes, bool typed) {
  if (spec == "desk") return recognizer::ArchConfig::desk(num_classes, typed);
  if (spec == "full") return recognizer::ArchConfig::full(num_classes, typed);
  require_file(spec, "arch config");
  std::ifstream in(spec);
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed arch config: " + std::string(e.what()));
  }
  auto arch = recognizer::ArchConfig::from_json(j);
  if (arch.num_classes != num_classes) {
    throw ConfigError("arch num_classes " + std::to_string(arch.num_classes) + " does not match the alphabet (" +
                      std::to_string(num_classes) + ")");
  }
  return arch;
}

void cmd_train(const TrainArgs& a, const Global& g, std::ostream& out, const Log& log) {
  require_file(a.manifest, "manifest");
  const auto alphabet = resolve_alphabet(g);
  const auto arch = resolve_arch(a.arch, alphabet.num_classes(), !a.untyped);
  recognizer::TrainerConfig cfg;
  if (!a.trainer_config.empty()) {
    require_file(a.trainer_config, "trainer config");
    std::ifstream in(a.trainer_config);
    try {
      cfg = recognizer::TrainerConfig::from_json(ordered_json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("malformed trainer config: " + std::string(e.what()));
    }
  }
  cfg.seed = g.seed;
  cfg.workers = g.workers;
  if (a.iterations >= 0) cfg.max_iterations = a.iterations;
  if (a.batch_size >= 0) cfg.batch_size = a.batch_size;
  if (a.learning_rate >= 0) cfg.learning_rate = a.learning_rate;
  if (a.validate_every >= 0) cfg.validate_every = a.validate_every;
  cfg.validate();
  const fs::path log_path = a.log_path.empty() ? fs::path(a.out.string() + ".log.jsonl") : a.log_path;
  log.info("train: " + std::to_string(cfg.max_iterations) + " iterations, batch " + std::to_string(cfg.batch_size) +
           ", lr " + fixed(cfg.learning_rate, 6) + (arch.type_input_enabled ? ", typed" : ", untyped"));
  const auto result = recognizer::train_from_manifest(arch, cfg, a.manifest, alphabet, a.out, log_path);
  for (const auto& e : result.log) {
    if (e.val_cer) log.debug("  iteration " + std::to_string(e.iteration) + " val cer " + fixed(*e.val_cer, 2));
  }
  out << "checkpoint: " << a.out.string() << "\n";
  out << "log: " << log_path.string() << "\n";
  if (result.best_val_cer) {
    out << "best validation CER: " << fixed(*result.best_val_cer, 2) << " at iteration " << result.best_iteration
        << "\n";
  }
}

// ---- eval ----

struct EvalArgs {
  fs::path checkpoint;
  fs::path manifest;
  fs::path out = "eval";
};

recognizer::Checkpoint load_model(const fs::path& path) {
  require_file(path, "checkpoint");
  return recognizer::load_checkpoint(path);
}

void check_alphabet(const recognizer::Checkpoint& ck, const Global& g, const recognizer::LabeledSet& set) {
  if (!g.alphabet.empty() && !(resolve_alphabet(g) == ck.alphabet)) {
    throw ConfigError("alphabet mismatch: --alphabet differs from the checkpoint's alphabet");
  }
  for (std::size_t i = 0; i < set.size(); ++i) {
    try {
      (void)ck.alphabet.encode(set.texts[i], set.names[i]);
    } catch (const EncodingError& e) {
      throw ConfigError(std::string("alphabet mismatch between manifest and checkpoint: ") + e.what());
    }
  }
}

void cmd_eval(const EvalArgs& a, const Global& g, std::ostream& out, const Log& log) {
  const auto ck = load_model(a.checkpoint);
  require_file(a.manifest, "manifest");
  const auto set = recognizer::load_labeled_set(a.manifest);
  check_alphabet(ck, g, set);
  log.info("eval: " + std::to_string(set.size()) + " samples");
  const auto preds = recognizer::recognize(ck.params, ck.arch, ck.alphabet, set, std::nullopt, g.workers);
  std::vector<metrics::EvalPair> pairs;
  std::string lines;
  for (std::size_t i = 0; i < set.size(); ++i) {
    pairs.push_back({preds[i], set.texts[i], set.types[i]});
    ordered_json j;
    j["name"] = set.names[i];
    j["type"] = typedgen::to_string(set.types[i]);
    j["groundtruth"] = set.texts[i];
    j["prediction"] = preds[i];
    lines += j.dump() + "\n";
  }
  const auto report = metrics::report(pairs);
  fs::create_directories(a.out);
  write_text(a.out / "report.json", report.to_json());
  write_text(a.out / "report.txt", report.to_table());
  write_text(a.out / "predictions.jsonl", lines);
  out << report.to_table();
}

// ---- align ----

struct AlignArgs {
  fs::path template_path;
  fs::path scan;
  fs::path boxes;
  fs::path out = "aligned";
  bool crops = false;
  double reject = 5.0;
  double trim = 0.0;
};

void cmd_align(const AlignArgs& a, const Global&, std::ostream& out, const Log& log) {
  require_file(a.template_path, "template");
  require_file(a.scan, "scan image");
  require_file(a.boxes, "boxes file");
  const auto form = formset::FormTemplate::load(a.template_path);
  const auto scan = imaging::read_image(a.scan);
  const auto boxes = alignkit::load_boxes(a.boxes);
  alignkit::IcpConfig cfg;
  cfg.reject_residual = a.reject;
  cfg.trim_fraction = a.trim;
  auto r = alignkit::align_document(form, scan, boxes, cfg);
  log.info("align: " + std::to_string(r.squares.size()) + " squares, " + std::to_string(r.icp.iterations) +
           " iterations");
  fs::create_directories(a.out);
  if (a.crops) alignkit::write_crops(scan, r.boxes, a.out);
  write_text(a.out / "typed_boxes.json", alignkit::typed_boxes_to_json(r.boxes));
  const auto& t = r.icp.transform;
  out << "theta_deg " << fixed(t.theta * 180.0 / 3.14159265358979323846, 4) << " scale " << fixed(t.scale, 5)
      << " tx " << fixed(t.tx, 3) << " ty " << fixed(t.ty, 3) << " residual " << fixed(r.icp.residual, 4) << "\n";
  for (const auto& b : r.boxes) {
    out << b.box.x << "," << b.box.y << "," << b.box.w << "," << b.box.h << " -> "
        << (b.ctype ? std::string(typedgen::to_string(*b.ctype)) : std::string("Unknown")) << " ("
        << fixed(b.overlap, 3) << ")\n";
  }
}

// ---- diagnose ----

struct DiagnoseArgs {
  fs::path checkpoint;
  fs::path manifest;
  std::string forced_type;
  fs::path out = "histogram.json";
  fs::path plot;
};

std::string xml_escape(const std::string& s) {
  std::string r;
  for (char c : s) {
    switch (c) {
      case '<': r += "&lt;"; break;
      case '>': r += "&gt;"; break;
      case '&': r += "&amp;"; break;
      case '"': r += "&quot;"; break;
      case '\'': r += "&apos;"; break;
      default: r += c;
    }
  }
  return r;
}

// Bars per symbol; digits dark, everything else light.
std::string histogram_svg(const std::map<std::string, long>& hist, const std::string& title) {
  const int bar = 14, gap = 4, chart_h = 200, left = 40, top = 30;
  long peak = 1;
  for (const auto& [sym, c] : hist) peak = std::max(peak, c);
  const int width = left + static_cast<int>(hist.size()) * (bar + gap) + 20;
  const int height = top + chart_h + 40;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << std::max(width, 240) << "\" height=\"" << height
    << "\" font-family=\"monospace\" font-size=\"11\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << left << "\" y=\"18\">" << xml_escape(title) << "</text>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top + chart_h << "\" x2=\"" << width - 10 << "\" y2=\"" << top + chart_h
    << "\" stroke=\"black\"/>\n";
  int x = left;
  for (const auto& [sym, c] : hist) {
    const int h = static_cast<int>(static_cast<double>(c) / static_cast<double>(peak) * chart_h + 0.5);
    const bool digit = sym.size() == 1 && sym[0] >= '0' && sym[0] <= '9';
    s << "<rect x=\"" << x << "\" y=\"" << top + chart_h - h << "\" width=\"" << bar << "\" height=\"" << h
      << "\" fill=\"" << (digit ? "#1f4e79" : "#9dc3e6") << "\"><title>" << xml_escape(sym) << ": " << c
      << "</title></rect>\n";
    s << "<text x=\"" << x + bar / 2 << "\" y=\"" << top + chart_h + 14 << "\" text-anchor=\"middle\">"
      << xml_escape(sym == " " ? "_" : sym) << "</text>\n";
    x += bar + gap;
  }
  s << "</svg>\n";
  return s.str();
}

void cmd_diagnose(const DiagnoseArgs& a, const Global& g, std::ostream& out, const Log& log) {
  const auto ck = load_model(a.checkpoint);
  if (!ck.arch.type_input_enabled) throw ConfigError("diagnose needs a model trained with type input");
  require_file(a.manifest, "manifest");
  const auto forced = typedgen::parse_content_type(a.forced_type);
  if (!forced) throw ConfigError("unknown content type '" + a.forced_type + "'");
  const auto set = recognizer::load_labeled_set(a.manifest);
  log.info("diagnose: forcing " + a.forced_type + " on " + std::to_string(set.size()) + " samples");
  const auto hist = recognizer::forced_type_histogram(ck.params, ck.arch, ck.alphabet, set, *forced, g.workers);
  ordered_json j;
  j["forced_type"] = typedgen::to_string(*forced);
  j["samples"] = set.size();
  long total = 0;
  for (const auto& [sym, c] : hist) total += c;
  j["symbols"] = total;
  j["digit_fraction"] = recognizer::digit_fraction(hist);
  j["histogram"] = ordered_json::object();
  for (const auto& [sym, c] : hist) j["histogram"][sym] = c;
  write_text(a.out, j.dump(2) + "\n");
  if (!a.plot.empty()) {
    write_text(a.plot, histogram_svg(hist, "forced type " + std::string(typedgen::to_string(*forced)) +
                                               ", digit fraction " + fixed(recognizer::digit_fraction(hist), 3)));
  }
  out << "forced " << typedgen::to_string(*forced) << ": " << total << " symbols, digit fraction "
      << fixed(recognizer::digit_fraction(hist), 4) << "\n";
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NonConformingError*>(&e)) return kExitNonConforming;
  if (dynamic_cast<const NumericError*>(&e)) return kExitNumeric;
  if (dynamic_cast<const Error*>(&e)) return kExitConfig;
  if (dynamic_cast<const nlohmann::json::exception*>(&e)) return kExitConfig;
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return kExitConfig;
  return 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Type-aware handwriting recognition toolkit", "typedhwr"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every command");

  Global g;
  app.add_option("--config", g.config, "JSON config file (default: $" + std::string(kConfigEnv) + ")");
  // Shared options live on every subcommand; only one is ever parsed.
  std::map<CLI::App*, std::array<CLI::Option*, 6>> global_opts;
  auto register_globals = [&](CLI::App* sub) {
    sub->add_option("--config", g.config, "JSON config file (default: $" + std::string(kConfigEnv) + ")");
    global_opts[sub] = {
        sub->add_option("--fonts-dir", g.fonts_dir, "Directory of .ttf/.otf fonts"),
        sub->add_option("--lexicons-dir", g.lexicons_dir, "Directory of lexicon files"),
        sub->add_option("--alphabet", g.alphabet, "Alphabet file, one symbol per line"),
        sub->add_option("--verbosity", g.verbosity, "quiet, info or debug")
            ->check(CLI::IsMember({"quiet", "info", "debug"})),
        sub->add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber),
        sub->add_option("--seed", g.seed, "Root seed"),
    };
  };

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Synthesize a typed dataset of rendered, augmented crops");
  auto* ga_template = gen->add_option("--template", ga.template_path, "Form template JSON");
  auto* ga_weights = gen->add_option("--weights", ga.weights, "Content-type weights JSON");
  auto* ga_count = gen->add_option("--count", ga.count, "Number of samples");
  auto* ga_out = gen->add_option("--out", ga.out, "Output directory");
  auto* ga_height = gen->add_option("--text-height", ga.text_height, "Rendered text height in pixels");
  register_globals(gen);

  TrainArgs ta;
  auto* tr = app.add_subcommand("train", "Train a recognizer from a manifest");
  auto* ta_manifest = tr->add_option("--manifest", ta.manifest, "Training manifest (JSONL)");
  auto* ta_arch = tr->add_option("--arch", ta.arch, "desk, full or an arch JSON file");
  auto* ta_untyped = tr->add_flag("--untyped", ta.untyped, "Disable the content-type input");
  auto* ta_tcfg = tr->add_option("--trainer-config", ta.trainer_config, "Trainer config JSON");
  auto* ta_out = tr->add_option("--out", ta.out, "Checkpoint path");
  auto* ta_log = tr->add_option("--log", ta.log_path, "Training log (JSONL)");
  auto* ta_iters = tr->add_option("--iterations", ta.iterations, "Maximum iterations");
  auto* ta_bs = tr->add_option("--batch-size", ta.batch_size, "Mini-batch size");
  auto* ta_lr = tr->add_option("--learning-rate", ta.learning_rate, "Initial learning rate");
  auto* ta_ve = tr->add_option("--validate-every", ta.validate_every, "Validation interval");
  register_globals(tr);

  EvalArgs ea;
  auto* ev = app.add_subcommand("eval", "Transcribe a manifest and write CER/FER reports");
  auto* ea_ck = ev->add_option("--checkpoint", ea.checkpoint, "Model checkpoint");
  auto* ea_manifest = ev->add_option("--manifest", ea.manifest, "Manifest (JSONL)");
  auto* ea_out = ev->add_option("--out", ea.out, "Report directory");
  register_globals(ev);

  AlignArgs aa;
  auto* al = app.add_subcommand("align", "Register a scan to its template and type the text boxes");
  auto* aa_template = al->add_option("--template", aa.template_path, "Form template JSON");
  auto* aa_scan = al->add_option("--scan", aa.scan, "Scanned form image (.png or .pgm)");
  auto* aa_boxes = al->add_option("--boxes", aa.boxes, "Text boxes JSON");
  auto* aa_out = al->add_option("--out", aa.out, "Output directory");
  auto* aa_crops = al->add_flag("--crops", aa.crops, "Also write one crop per box");
  auto* aa_reject = al->add_option("--reject-residual", aa.reject, "Residual above which the scan is rejected (px)");
  auto* aa_trim = al->add_option("--trim", aa.trim, "Share of worst matches dropped per fit");
  register_globals(al);

  DiagnoseArgs da;
  auto* di = app.add_subcommand("diagnose", "Symbol histogram with every sample forced to one type");
  auto* da_ck = di->add_option("--checkpoint", da.checkpoint, "Model checkpoint");
  auto* da_manifest = di->add_option("--manifest", da.manifest, "Manifest (JSONL)");
  auto* da_type = di->add_option("--type", da.forced_type, "Content type to force");
  auto* da_out = di->add_option("--out", da.out, "Histogram JSON");
  auto* da_plot = di->add_option("--plot", da.plot, "Optional SVG bar chart");
  register_globals(di);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    Settings settings;
    fs::path config = g.config;
    if (config.empty()) {
      if (const char* env = std::getenv(kConfigEnv); env != nullptr && *env != '\0') config = env;
    }
    if (!config.empty()) settings.load(config, sub->get_name());
    const auto& go = global_opts.at(sub);
    settings.fill(go[0], g.fonts_dir);
    settings.fill(go[1], g.lexicons_dir);
    settings.fill(go[2], g.alphabet);
    settings.fill(go[3], g.verbosity);
    settings.fill(go[4], g.workers);
    settings.fill(go[5], g.seed);
    if (g.workers < 1) throw ConfigError("workers must be >= 1");
    const Log log(err, g.level());

    if (sub == gen) {
      settings.fill(ga_template, ga.template_path);
      settings.fill(ga_weights, ga.weights);
      settings.fill(ga_count, ga.count);
      settings.fill(ga_out, ga.out);
      settings.fill(ga_height, ga.text_height);
      cmd_generate(ga, g, out, log);
    } else if (sub == tr) {
      settings.fill(ta_manifest, ta.manifest);
      settings.fill(ta_arch, ta.arch);
      settings.fill(ta_untyped, ta.untyped);
      settings.fill(ta_tcfg, ta.trainer_config);
      settings.fill(ta_out, ta.out);
      settings.fill(ta_log, ta.log_path);
      settings.fill(ta_iters, ta.iterations);
      settings.fill(ta_bs, ta.batch_size);
      settings.fill(ta_lr, ta.learning_rate);
      settings.fill(ta_ve, ta.validate_every);
      cmd_train(ta, g, out, log);
    } else if (sub == ev) {
      settings.fill(ea_ck, ea.checkpoint);
      settings.fill(ea_manifest, ea.manifest);
      settings.fill(ea_out, ea.out);
      cmd_eval(ea, g, out, log);
    } else if (sub == al) {
      settings.fill(aa_template, aa.template_path);
      settings.fill(aa_scan, aa.scan);
      settings.fill(aa_boxes, aa.boxes);
      settings.fill(aa_out, aa.out);
      settings.fill(aa_crops, aa.crops);
      settings.fill(aa_reject, aa.reject);
      settings.fill(aa_trim, aa.trim);
      cmd_align(aa, g, out, log);
    } else if (sub == di) {
      settings.fill(da_ck, da.checkpoint);
      settings.fill(da_manifest, da.manifest);
      settings.fill(da_type, da.forced_type);
      settings.fill(da_out, da.out);
      settings.fill(da_plot, da.plot);
      cmd_diagnose(da, g, out, log);
    }
  } catch (const std::exception& e) {
    err << "typedhwr " << sub->get_name() << ": " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitOk;
}

}  // namespace typedhwr::cli
