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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "cli/commands.hpp"
#include "typedhwr/alignkit/alignkit.hpp"
#include "typedhwr/imaging/augment.hpp"

using namespace typedhwr;
namespace fs = std::filesystem;

namespace {

const fs::path kData = TYPEDHWR_DATA_DIR;
const fs::path kFixtures = TYPEDHWR_TEST_DATA_DIR;

struct Run {
  int code;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = typedhwr::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

bool has_total(const std::string& table, int n) {
  return std::regex_search(table, std::regex("(^|\\n)total +" + std::to_string(n) + "\\n"));
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("typedhwr_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, HelpEverywhere) {
  EXPECT_EQ(invoke({"--help"}).code, 0);
  for (const char* cmd : {"generate", "train", "eval", "align", "diagnose"}) {
    const auto r = invoke({cmd, "--help"});
    EXPECT_EQ(r.code, 0) << cmd;
    EXPECT_NE(r.out.find("--workers"), std::string::npos) << cmd;
  }
  EXPECT_EQ(invoke({}).code, cli::kExitConfig);
  EXPECT_EQ(invoke({"frobnicate"}).code, cli::kExitConfig);
  EXPECT_EQ(invoke({"generate", "--count", "many"}).code, cli::kExitConfig);
}

TEST_F(Cli, GenerateMissingTemplate) {
  const auto r = invoke({"generate", "--template", (dir_ / "none.json").string(), "--out", (dir_ / "d").string()});
  EXPECT_EQ(r.code, cli::kExitConfig);
  EXPECT_NE(r.err.find("template"), std::string::npos);
}

TEST_F(Cli, GenerateIsReproducible) {
  const std::string tpl = (kData / "templates" / "eas.json").string();
  const auto a = invoke({"generate", "--template", tpl, "--count", "8", "--seed", "7", "--out", (dir_ / "a").string()});
  const auto b = invoke({"generate", "--template", tpl, "--count", "8", "--seed", "7", "--out", (dir_ / "b").string(),
                      "--workers", "4"});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_TRUE(has_total(a.out, 8)) << a.out;
  EXPECT_EQ(slurp(dir_ / "a" / "manifest.jsonl"), slurp(dir_ / "b" / "manifest.jsonl"));
  for (int i = 0; i < 8; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "images/%06d.png", i);
    EXPECT_EQ(slurp(dir_ / "a" / name), slurp(dir_ / "b" / name));
  }
}

TEST_F(Cli, ConfigFileAndFlagPrecedence) {
  const std::string tpl = (kData / "templates" / "eas.json").string();
  write(dir_ / "cfg.json", R"({"seed": 7, "generate": {"count": 3, "template": ")" + tpl + R"("}})");
  const auto a = invoke({"generate", "--config", (dir_ / "cfg.json").string(), "--out", (dir_ / "a").string()});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_TRUE(has_total(a.out, 3));
  const auto b = invoke({"generate", "--config", (dir_ / "cfg.json").string(), "--count", "2", "--out",
                      (dir_ / "b").string()});
  EXPECT_TRUE(has_total(b.out, 2));
  // same seed from the config: the first two samples agree
  const auto la = slurp(dir_ / "a" / "manifest.jsonl"), lb = slurp(dir_ / "b" / "manifest.jsonl");
  EXPECT_EQ(la.substr(0, lb.size()), lb);
  write(dir_ / "bad.json", R"({"generate": {"count": "three"}})");
  EXPECT_EQ(invoke({"generate", "--config", (dir_ / "bad.json").string()}).code, cli::kExitConfig);
  EXPECT_EQ(invoke({"generate", "--config", (dir_ / "missing.json").string()}).code, cli::kExitConfig);
}

TEST_F(Cli, EvalMatchesGoldenReport) {
  const auto r = invoke({"eval", "--checkpoint", (kFixtures / "tiny_model.json").string(), "--manifest",
                      (kFixtures / "fixture10" / "manifest.jsonl").string(), "--out", (dir_ / "ev").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir_ / "ev" / "report.json"), slurp(kFixtures / "golden" / "report.json"));
  EXPECT_TRUE(fs::exists(dir_ / "ev" / "report.txt"));
  // worker count does not change the report
  const auto r4 = invoke({"eval", "--checkpoint", (kFixtures / "tiny_model.json").string(), "--manifest",
                       (kFixtures / "fixture10" / "manifest.jsonl").string(), "--out", (dir_ / "ev4").string(),
                       "--workers", "4"});
  EXPECT_EQ(slurp(dir_ / "ev4" / "report.json"), slurp(kFixtures / "golden" / "report.json"));
}

TEST_F(Cli, EvalEdgeCases) {
  write(dir_ / "empty.jsonl", "");
  const auto ck = (kFixtures / "tiny_model.json").string();
  const auto empty = invoke({"eval", "--checkpoint", ck, "--manifest", (dir_ / "empty.jsonl").string(), "--out",
                          (dir_ / "ev").string()});
  EXPECT_EQ(empty.code, 0) << empty.err;
  const auto j = nlohmann::json::parse(slurp(dir_ / "ev" / "report.json"));
  EXPECT_EQ(j["overall"]["count"], 0);

  write(dir_ / "corrupt.json", "{\"format\": \"typedhwr-checkpoint\", \"version\": 1, \"tensors\": 5");
  EXPECT_EQ(invoke({"eval", "--checkpoint", (dir_ / "corrupt.json").string(), "--manifest",
                 (dir_ / "empty.jsonl").string()})
                .code,
            cli::kExitConfig);

  write(dir_ / "abc.txt", "a\nb\nc\n");
  EXPECT_EQ(invoke({"eval", "--checkpoint", ck, "--manifest", (kFixtures / "fixture10" / "manifest.jsonl").string(),
                 "--alphabet", (dir_ / "abc.txt").string(), "--out", (dir_ / "ev2").string()})
                .code,
            cli::kExitConfig);
}

TEST_F(Cli, TrainDivergenceExitsNumeric) {
  write(dir_ / "trainer.json", R"({"learning_rate": 1e200, "max_iterations": 30, "batch_size": 4})");
  const auto r = invoke({"train", "--manifest", (kFixtures / "fixture10" / "manifest.jsonl").string(), "--arch",
                      (kFixtures / "tiny_arch.json").string(), "--trainer-config", (dir_ / "trainer.json").string(),
                      "--out", (dir_ / "m.json").string()});
  EXPECT_EQ(r.code, cli::kExitNumeric) << r.err;
}

TEST_F(Cli, TrainWritesCheckpoint) {
  const auto r = invoke({"train", "--manifest", (kFixtures / "fixture10" / "manifest.jsonl").string(), "--arch",
                      (kFixtures / "tiny_arch.json").string(), "--iterations", "4", "--batch-size", "4", "--out",
                      (dir_ / "m.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "m.json"));
  EXPECT_TRUE(fs::exists(dir_ / "m.json.log.jsonl"));
  EXPECT_EQ(invoke({"train", "--manifest", (dir_ / "nope.jsonl").string()}).code, cli::kExitConfig);
}

TEST_F(Cli, Diagnose) {
  const auto ck = (kFixtures / "tiny_model.json").string();
  const auto manifest = (kFixtures / "fixture10" / "manifest.jsonl").string();
  const auto r = invoke({"diagnose", "--checkpoint", ck, "--manifest", manifest, "--type", "PhoneNumber", "--out",
                      (dir_ / "h.json").string(), "--plot", (dir_ / "h.svg").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(dir_ / "h.json"));
  EXPECT_EQ(j["forced_type"], "PhoneNumber");
  EXPECT_EQ(slurp(dir_ / "h.svg").rfind("<svg", 0), 0u);
  EXPECT_EQ(invoke({"diagnose", "--checkpoint", ck, "--manifest", manifest, "--type", "Colour"}).code,
            cli::kExitConfig);

  write(dir_ / "empty.jsonl", "");
  const auto e = invoke({"diagnose", "--checkpoint", ck, "--manifest", (dir_ / "empty.jsonl").string(), "--type",
                      "Name", "--out", (dir_ / "e.json").string()});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_TRUE(nlohmann::json::parse(slurp(dir_ / "e.json"))["histogram"].empty());

  auto arch = nlohmann::json::parse(slurp(kFixtures / "tiny_arch.json"));
  arch["type_input_enabled"] = false;
  write(dir_ / "untyped_arch.json", arch.dump());
  ASSERT_EQ(invoke({"train", "--manifest", manifest, "--arch", (dir_ / "untyped_arch.json").string(), "--iterations",
                 "1", "--batch-size", "2", "--out", (dir_ / "u.json").string()})
                .code,
            0);
  EXPECT_EQ(invoke({"diagnose", "--checkpoint", (dir_ / "u.json").string(), "--manifest", manifest, "--type", "Name"})
                .code,
            cli::kExitConfig);
}

TEST_F(Cli, AlignKnownTransform) {
  const auto tpl = kData / "templates" / "eas.json";
  const auto form = formset::FormTemplate::load(tpl);
  const double theta = 2.0 * std::numbers::pi / 180.0;
  const auto t = imaging::AffineTransform2D::translation(12, -7).then_after(
      imaging::AffineTransform2D::rotation(theta, 620, 877));
  const auto placed = imaging::apply_affine_placed(form.render_blank(), t);
  imaging::write_png(dir_ / "scan.png", placed.image);

  // one box per field: its mapped centre, a bit smaller than the field
  nlohmann::json boxes = nlohmann::json::array();
  for (const auto& f : form.fields) {
    auto [cx, cy] = t.apply(f.box.x + f.box.w / 2.0, f.box.y + f.box.h / 2.0);
    cx -= placed.origin_x;
    cy -= placed.origin_y;
    const int w = f.box.w * 8 / 10, h = f.box.h * 6 / 10;
    boxes.push_back({{"x", static_cast<int>(cx) - w / 2}, {"y", static_cast<int>(cy) - h / 2}, {"w", w}, {"h", h}});
  }
  write(dir_ / "boxes.json", boxes.dump());
  const auto r = invoke({"align", "--template", tpl.string(), "--scan", (dir_ / "scan.png").string(), "--boxes",
                      (dir_ / "boxes.json").string(), "--out", (dir_ / "out").string(), "--crops"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto typed = nlohmann::json::parse(slurp(dir_ / "out" / "typed_boxes.json"));
  ASSERT_EQ(typed.size(), form.fields.size());
  for (std::size_t i = 0; i < form.fields.size(); ++i) {
    EXPECT_EQ(typed[i]["field_id"], form.fields[i].id);
    EXPECT_EQ(typed[i]["type"], std::string(typedgen::to_string(form.fields[i].ctype)));
    EXPECT_GT(typed[i]["overlap"].get<double>(), 0.9);
    EXPECT_TRUE(fs::exists(dir_ / "out" / typed[i]["crop"].get<std::string>()));
  }
}

TEST_F(Cli, AlignIdentityAndMismatch) {
  const auto tpl = kData / "templates" / "eas.json";
  const auto form = formset::FormTemplate::load(tpl);
  imaging::write_png(dir_ / "blank.png", form.render_blank());
  nlohmann::json boxes = nlohmann::json::array();
  for (const auto& f : form.fields) boxes.push_back({{"x", f.box.x}, {"y", f.box.y}, {"w", f.box.w}, {"h", f.box.h}});
  write(dir_ / "boxes.json", boxes.dump());
  const auto r = invoke({"align", "--template", tpl.string(), "--scan", (dir_ / "blank.png").string(), "--boxes",
                      (dir_ / "boxes.json").string(), "--out", (dir_ / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto& b : nlohmann::json::parse(slurp(dir_ / "out" / "typed_boxes.json")))
    EXPECT_DOUBLE_EQ(b["overlap"].get<double>(), 1.0);

  // a different form: markers elsewhere
  imaging::GrayImage other(1240, 1754);
  for (auto [x, y] : {std::pair{200, 150}, {1000, 300}, {400, 1500}, {900, 1100}, {150, 900}, {700, 600}})
    imaging::draw_rect_outline(other, {x - 20, y - 20, 40, 40}, 0, 5);
  imaging::write_png(dir_ / "other.png", other);
  const auto m = invoke({"align", "--template", tpl.string(), "--scan", (dir_ / "other.png").string(), "--boxes",
                      (dir_ / "boxes.json").string(), "--out", (dir_ / "out2").string()});
  EXPECT_EQ(m.code, cli::kExitNonConforming) << m.err;
  // too few markers
  imaging::write_png(dir_ / "empty.png", imaging::GrayImage(1240, 1754));
  EXPECT_EQ(invoke({"align", "--template", tpl.string(), "--scan", (dir_ / "empty.png").string(), "--boxes",
                 (dir_ / "boxes.json").string(), "--out", (dir_ / "out3").string()})
                .code,
            cli::kExitNonConforming);
}
