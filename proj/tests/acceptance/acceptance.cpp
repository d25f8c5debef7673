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

// Acceptance suite: one PASS/FAIL line per criterion. Arguments select a
// subset by number ("acceptance 1 7"); no arguments runs everything.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli/commands.hpp"
#include "support/oracles.hpp"
#include "support/toy.hpp"
#include "typedhwr/alignkit/alignkit.hpp"
#include "typedhwr/common/error.hpp"
#include "typedhwr/common/rng.hpp"
#include "typedhwr/ctc/ctc.hpp"
#include "typedhwr/formset/template.hpp"
#include "typedhwr/imaging/augment.hpp"
#include "typedhwr/metrics/metrics.hpp"
#include "typedhwr/recognizer/ambiguity.hpp"
#include "typedhwr/recognizer/trainer.hpp"
#include "typedhwr/typedgen/weights.hpp"

using namespace typedhwr;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and limits.
constexpr double kCtcProbTol = 1e-9;
constexpr double kCtcGradTol = 1e-5;
constexpr double kFdStep = 1e-5;
constexpr double kNetGradTol = 1e-4;
constexpr double kTypedAmbiguousMax = 10.0;
constexpr double kUntypedAmbiguousMin = 40.0;
constexpr double kCerGapMin = 20.0;
constexpr double kDigitGapMin = 0.30;
constexpr double kWeightTol = 0.005;
constexpr double kIcpResidualMax = 0.5;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6}); }

ctc::LogitSequence random_logits(int T, int S, Xoshiro256& rng) {
  ctc::LogitSequence l(T, S);
  for (auto& v : l.values()) v = rng.uniform(-2.0, 2.0);
  return l;
}

ctc::LabelSeq random_feasible_label(int T, int S, int max_len, Xoshiro256& rng) {
  ctc::LabelSeq s;
  const int len = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_len)));
  for (int i = 0; i < len; ++i) s.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(S - 1))));
  while (ctc::min_steps(s) > T) s.pop_back();
  return s;
}

// 1
Outcome ctc_oracle() {
  const auto t0 = Clock::now();
  Xoshiro256 rng(101);
  double worst = 0, worst_independent = 0;
  int n = 0;
  while (n < 200) {
    const int T = 1 + static_cast<int>(rng.below(8));
    const int S = 2 + static_cast<int>(rng.below(4));
    const auto label = random_feasible_label(T, S, 3, rng);
    if (label.empty()) continue;
    const auto l = random_logits(T, S, rng);
    const double p = std::exp(-ctc::ctc_loss(l, label).loss);
    worst = std::max(worst, std::abs(p - ctc::oracle_label_prob(l, label)));
    worst_independent = std::max(worst_independent, std::abs(p - testkit::enumerate_label_prob(l.values(), T, S, label)));
    ++n;
  }
  const double secs = seconds_since(t0);
  return {worst < kCtcProbTol && worst_independent < kCtcProbTol && secs < 10.0,
          "200 instances, max |exp(-loss) - oracle| = " + fmt("%.2e", std::max(worst, worst_independent)) + ", " +
              fmt("%.1f s", secs)};
}

// 2
Outcome ctc_gradient() {
  const auto t0 = Clock::now();
  Xoshiro256 rng(202);
  double worst = 0;
  int n = 0;
  while (n < 100) {
    const int T = 1 + static_cast<int>(rng.below(8));
    const int S = 2 + static_cast<int>(rng.below(4));
    const auto label = random_feasible_label(T, S, 3, rng);
    if (label.empty()) continue;
    auto l = random_logits(T, S, rng);
    const auto grad = ctc::ctc_loss(l, label).grad;
    for (std::size_t k = 0; k < l.values().size(); ++k) {
      const double keep = l.values()[k];
      l.values()[k] = keep + kFdStep;
      const double lp = ctc::ctc_loss(l, label).loss;
      l.values()[k] = keep - kFdStep;
      const double lm = ctc::ctc_loss(l, label).loss;
      l.values()[k] = keep;
      worst = std::max(worst, rel_err((lp - lm) / (2 * kFdStep), grad[k]));
    }
    ++n;
  }
  const double secs = seconds_since(t0);
  return {worst < kCtcGradTol && secs < 30.0,
          "100 instances, max relative error " + fmt("%.2e", worst) + ", " + fmt("%.1f s", secs)};
}

// 3
Outcome network_gradient() {
  const auto t0 = Clock::now();
  std::string detail;
  bool pass = true;
  for (bool bn : {false, true}) {
    const auto arch = testkit::toy_arch(bn);
    auto params = recognizer::init_params(arch, 31);
    Xoshiro256 rng(32);
    if (bn) {
      for (auto& [name, t] : params.tensors())
        if (name.rfind("bn", 0) == 0 && name.find("running") == std::string::npos)
          for (auto& v : t.values) v += rng.uniform(-0.3, 0.3);
    }
    const auto img = testkit::noise_image(32, 32, rng);
    const auto r = testkit::check_gradients(params, arch, {{&img, 29, typedgen::ContentType::Numbers}}, {{1, 0}},
                                            kFdStep, kNetGradTol);
    pass = pass && r.worst < kNetGradTol;
    detail += std::string(bn ? "batchnorm" : "plain") + " max relative error " + fmt("%.2e", r.worst) + " (" +
              r.worst_tensor + ", " + std::to_string(r.retried) + " entries re-measured at step/10); ";
  }
  const double secs = seconds_since(t0);
  return {pass && secs < 120.0, detail + fmt("%.1f s", secs)};
}

// 4 and 5 share the trained models.
struct AmbiguityRun {
  bool done = false;
  recognizer::AmbiguityScores typed, untyped;
  double digits_phone = 0, digits_name = 0;
  double seconds = 0;
  int iterations = 0;
};

AmbiguityRun& ambiguity_run() {
  static AmbiguityRun run;
  if (run.done) return run;
  const auto t0 = Clock::now();
  recognizer::AmbiguityTestbedConfig tb_cfg;  // 4000 train, 400 validation, 1000 test
  const auto tb = recognizer::make_ambiguity_testbed(tb_cfg);
  const auto alphabet = typedgen::Alphabet::default_alphabet();
  recognizer::TrainerConfig cfg;
  cfg.max_iterations = 2000;
  cfg.batch_size = 16;
  cfg.learning_rate = 0.003;
  cfg.validate_every = 500;
  cfg.seed = 7;
  run.iterations = cfg.max_iterations;
  for (bool typed : {true, false}) {
    const auto arch = recognizer::ArchConfig::desk(alphabet.num_classes(), typed);
    const auto result = recognizer::train(arch, cfg, tb.train, alphabet, tb.validation);
    const auto preds = recognizer::recognize(result.best, arch, alphabet, tb.test);
    (typed ? run.typed : run.untyped) = recognizer::score_ambiguity(preds, tb.test);
    if (typed) {
      run.digits_phone = recognizer::digit_fraction(
          recognizer::forced_type_histogram(result.best, arch, alphabet, tb.test, typedgen::ContentType::PhoneNumber));
      run.digits_name = recognizer::digit_fraction(
          recognizer::forced_type_histogram(result.best, arch, alphabet, tb.test, typedgen::ContentType::Name));
    }
  }
  run.seconds = seconds_since(t0);
  run.done = true;
  return run;
}

Outcome typed_ambiguity() {
  const auto& r = ambiguity_run();
  const double gap = r.untyped.cer - r.typed.cer;
  const bool pass = r.typed.ambiguous_cer < kTypedAmbiguousMax && r.untyped.ambiguous_cer >= kUntypedAmbiguousMin &&
                    gap >= kCerGapMin && r.seconds <= 1800.0;
  return {pass, "typed CER " + fmt("%.2f", r.typed.cer) + " (ambiguous " + fmt("%.2f", r.typed.ambiguous_cer) +
                    "), untyped CER " + fmt("%.2f", r.untyped.cer) + " (ambiguous " +
                    fmt("%.2f", r.untyped.ambiguous_cer) + "), gap " + fmt("%.2f", gap) + ", 4000 samples, " +
                    std::to_string(r.iterations) + " iterations per model, " + fmt("%.0f s", r.seconds)};
}

Outcome forced_type() {
  const auto& r = ambiguity_run();
  const double gap = r.digits_phone - r.digits_name;
  return {gap >= kDigitGapMin, "digit fraction forcing PhoneNumber " + fmt("%.3f", r.digits_phone) +
                                   ", forcing Name " + fmt("%.3f", r.digits_name) + ", gap " + fmt("%.3f", gap)};
}

// 6
Outcome sampling() {
  const auto w = typedgen::TypeWeights::defaults();
  std::array<long, typedgen::kNumContentTypes> counts{};
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    ++counts[static_cast<std::size_t>(typedgen::index_of(typedgen::sample_type(w, {606, static_cast<std::uint64_t>(i)})))];
  }
  double worst = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) worst = std::max(worst, std::abs(counts[k] / double(n) - w.values()[k]));
  return {worst <= kWeightTol, "100000 draws, max |fraction - weight| = " + fmt("%.4f", worst)};
}

// 7
Outcome icp() {
  const auto form = formset::FormTemplate::load(fs::path(TYPEDHWR_DATA_DIR) / "templates" / "eas.json");
  std::vector<alignkit::Point> tpl;
  for (const auto& s : form.squares) tpl.push_back({s.cx, s.cy});
  Xoshiro256 rng(707);
  double residual_sum = 0;
  int accepted = 0;
  for (int i = 0; i < 100; ++i) {
    const alignkit::RigidTransform2D t{rng.uniform(-5, 5) * std::numbers::pi / 180.0, rng.uniform(0.9, 1.1),
                                       0, 0};
    const double tr = rng.uniform(0, 20), ta = rng.uniform(0, 2 * std::numbers::pi);
    auto truth = t;
    truth.tx = tr * std::cos(ta);
    truth.ty = tr * std::sin(ta);
    std::vector<alignkit::Point> scan;
    for (const auto& p : tpl) {
      auto q = truth.apply(p);
      const double nr = rng.uniform(0, 0.5), na = rng.uniform(0, 2 * std::numbers::pi);
      scan.push_back({q.x + nr * std::cos(na), q.y + nr * std::sin(na)});
    }
    try {
      residual_sum += alignkit::icp_align(tpl, scan).residual;
      ++accepted;
    } catch (const NonConformingError&) {
    }
  }
  int rejected = 0;
  const int mismatched = 100;
  for (int i = 0; i < mismatched; ++i) {
    std::vector<alignkit::Point> other;
    for (std::size_t k = 0; k < tpl.size(); ++k)
      other.push_back({rng.uniform(0, form.page_width), rng.uniform(0, form.page_height)});
    try {
      alignkit::icp_align(tpl, other);
    } catch (const NonConformingError&) {
      ++rejected;
    }
  }
  const double mean = accepted ? residual_sum / accepted : INFINITY;
  return {accepted == 100 && mean < kIcpResidualMax && rejected == mismatched,
          std::to_string(accepted) + "/100 accepted, mean residual " + fmt("%.3f px", mean) + ", " +
              std::to_string(rejected) + "/" + std::to_string(mismatched) + " mismatched forms rejected"};
}

// 8
Outcome metrics_oracle() {
  std::vector<std::string> all{""};
  for (std::size_t begin = 0, len = 1; len <= 6; ++len) {
    const std::size_t end = all.size();
    for (std::size_t i = begin; i < end; ++i)
      for (char c : {'a', 'b', 'c'}) all.push_back(all[i] + c);
    begin = end;
  }
  long mismatches = 0;
  for (const auto& a : all)
    for (const auto& b : all) mismatches += metrics::edit_distance(a, b) != testkit::recursive_edit_distance(a, b);
  Xoshiro256 rng(808);
  auto word = [&] {
    std::string s;
    const int n = static_cast<int>(rng.below(9));
    for (int i = 0; i < n; ++i) s.push_back(static_cast<char>('a' + rng.below(4)));
    return s;
  };
  long violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto a = word(), b = word(), c = word();
    const auto ab = metrics::edit_distance(a, b);
    violations += ab != metrics::edit_distance(b, a);
    violations += (ab == 0) != (a == b);
    violations += metrics::edit_distance(a, c) > ab + metrics::edit_distance(b, c);
  }
  return {mismatches == 0 && violations == 0,
          std::to_string(all.size() * all.size()) + " exhaustive pairs, " + std::to_string(mismatches) +
              " mismatches; 10000 random triples, " + std::to_string(violations) + " metric violations"};
}

// 9
Outcome imaging_identities() {
  Xoshiro256 rng(909);
  long broken = 0;
  for (int i = 0; i < 100; ++i) {
    const auto img = testkit::noise_image(8 + static_cast<int>(rng.below(60)), 8 + static_cast<int>(rng.below(40)), rng);
    broken += !(imaging::apply_elastic(img, imaging::ElasticParams(rng.uniform(3, 15), 0.0), {1, std::uint64_t(i)}) == img);
    broken += !(imaging::apply_affine(img, imaging::AffineTransform2D::identity()) == img);
  }
  long order = 0;
  for (int i = 0; i < 1000; ++i) {
    imaging::GrayImage img(6 + static_cast<int>(rng.below(25)), 6 + static_cast<int>(rng.below(25)));
    for (auto& v : img.data()) v = rng.bernoulli(0.4) ? 0 : 255;
    const imaging::StructuringElement el{static_cast<imaging::ElementShape>(rng.below(3)),
                                         1 + static_cast<int>(rng.below(3))};
    const auto erode = imaging::apply_morph(img, {imaging::MorphKind::Erode, el});
    const auto dilate = imaging::apply_morph(img, {imaging::MorphKind::Dilate, el});
    const auto opening = imaging::apply_morph(erode, {imaging::MorphKind::Dilate, el});
    const auto close = imaging::apply_morph(img, {imaging::MorphKind::Close, el});
    for (std::size_t k = 0; k < img.data().size(); ++k) {
      const auto v = img.data()[k];
      order += erode.data()[k] > v || dilate.data()[k] < v || opening.data()[k] > v || close.data()[k] > v;
    }
  }
  return {broken == 0 && order == 0, std::to_string(broken) + " identity failures over 200 checks, " +
                                         std::to_string(order) + " order violations over 1000 binary images"};
}

// 10
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "typedhwr_acceptance_determinism";
  fs::remove_all(root);
  const std::string tpl = (fs::path(TYPEDHWR_DATA_DIR) / "templates" / "eas.json").string();
  auto gen = [&](const std::string& name, const std::string& workers) {
    std::ostringstream out, err;
    return cli::run({"generate", "--template", tpl, "--count", "40", "--seed", "2019", "--workers", workers, "--out",
                     (root / name).string(), "--verbosity", "quiet"},
                    out, err);
  };
  if (gen("a", "1") != 0 || gen("b", "1") != 0 || gen("c", "4") != 0) return {false, "generate failed"};
  int differing = 0, files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), root / "a");
    const auto ref = slurp(entry.path());
    differing += ref != slurp(root / "b" / rel);
    differing += ref != slurp(root / "c" / rel);
    ++files;
  }
  fs::remove_all(root);
  return {differing == 0 && files == 41,
          std::to_string(files) + " files compared across two 1-worker runs and a 4-worker run, " +
              std::to_string(differing) + " differ"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"CTC oracle equivalence", ctc_oracle},
      {"CTC gradient check", ctc_gradient},
      {"end-to-end gradient check", network_gradient},
      {"typed-ambiguity experiment", typed_ambiguity},
      {"forced-type diagnostic", forced_type},
      {"sampling fidelity", sampling},
      {"ICP recovery", icp},
      {"metrics oracle", metrics_oracle},
      {"imaging identities", imaging_identities},
      {"determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.contains(number)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", number, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
