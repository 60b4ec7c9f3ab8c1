#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <string>

#include "doctest.h"
#include "dentsynth/dataset.hpp"
#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const testsupport::TempDir& dir, const std::string& args) {
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string(DENTSYNTH_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = testsupport::read_text(out);
  r.err = testsupport::read_text(err);
  return r;
}

std::string small_config(const testsupport::TempDir& dir) {
  const fs::path p = dir / "small.json";
  std::ofstream(p) << R"({"camera": {"image_size": 64}, "can": {"radial_segments": 24, "height_segments": 12},
                          "train": {"epochs": 30}})";
  return p.string();
}

}  // namespace

TEST_CASE("cli: help lists subcommands and every config key") {
  testsupport::TempDir dir("clihelp");
  const Run r = run(dir, "--help");
  CHECK(r.code == 0);
  for (const char* word : {"generate", "ingest", "split", "train", "eval", "pca", "report", "verify", "train.epochs",
                           "camera.phi", "composite.close_radius"})
    CHECK(r.out.find(word) != std::string::npos);
}

TEST_CASE("cli: usage errors exit 1, data errors exit 2") {
  testsupport::TempDir dir("clierr");
  Run r = run(dir, "generate -n 7 -o " + (dir / "x").string());
  CHECK(r.code == 1);
  CHECK(r.err.find("n must be even and positive") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "x" / "manifest.jsonl"));
  CHECK(run(dir, "").code == 1);
  CHECK(run(dir, "generate").code == 1);
  CHECK(run(dir, "frobnicate").code == 1);
  CHECK(run(dir, "generate -n 4 --background purple").code == 1);
  r = run(dir, "generate -n 2 --background pool -o " + (dir / "p").string());
  CHECK(r.code == 2);
  r = run(dir, "split " + (dir / "missing.jsonl").string());
  CHECK(r.code == 2);
  CHECK(r.err.find("error") != std::string::npos);
  std::ofstream(dir / "bad.json") << R"({"camera": {"fov": 3}})";
  r = run(dir, "--config " + (dir / "bad.json").string() + " generate -n 2 -o " + (dir / "y").string());
  CHECK(r.code == 2);
  CHECK(r.err.find("camera.fov") != std::string::npos);
}

TEST_CASE("cli: end to end pipeline") {
  testsupport::TempDir dir("clipipe");
  const std::string cfg = "--config " + small_config(dir);
  const std::string data = (dir / "data").string();

  Run r = run(dir, cfg + " --jobs 2 generate -n 20 -o " + data);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("generated 20 samples (deformed 10, non_deformed 10)") != std::string::npos);
  r = run(dir, cfg + " generate -n 20 -o " + data);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("0 files changed") != std::string::npos);

  r = run(dir, "verify " + data);
  CHECK(r.code == 0);
  CHECK(r.out.find("verified 40 files: 0 mismatched, 0 missing") != std::string::npos);

  r = run(dir, cfg + " split " + data);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("split 16 train / 4 test") != std::string::npos);

  r = run(dir, cfg + " train " + data + "/train.jsonl -m " + (dir / "model.json").string() + " --test " + data +
                   "/test.jsonl --eval-out " + (dir / "eval_a").string());
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "model.json"));
  CHECK(fs::exists(dir / "eval_a" / "metrics.csv"));

  r = run(dir, "eval -m " + (dir / "model.json").string() + " " + data + "/test.jsonl -o " + (dir / "eval_b").string());
  REQUIRE(r.code == 0);
  CHECK(r.out.find("accuracy") != std::string::npos);
  CHECK(testsupport::read_text(dir / "eval_a" / "confusion.csv") == testsupport::read_text(dir / "eval_b" / "confusion.csv"));

  r = run(dir, "report synthetic=" + (dir / "eval_a").string() + " again=" + (dir / "eval_b").string() + " -o " +
                   (dir / "report").string());
  REQUIRE(r.code == 0);
  CHECK(r.out.find("Precision") != std::string::npos);
  const std::string csv = testsupport::read_text(dir / "report" / "report.csv");
  CHECK(csv.rfind("metric,synthetic,again\nAccuracy,", 0) == 0);

  // four-way PCA, one of them a single image
  dentsynth::DatasetManifest single = dentsynth::read_manifest(dir / "data" / "test.jsonl");
  single.samples.resize(1);
  dentsynth::write_manifest(single, dir / "data" / "one.jsonl");
  const fs::path pca = dir / "pca.csv";
  r = run(dir, "pca full=" + data + " " + data + "/train.jsonl " + data + "/test.jsonl " + data + "/one.jsonl -o " +
                   pca.string());
  REQUIRE(r.code == 0);
  const std::string scatter = testsupport::read_text(pca);
  CHECK(scatter.rfind("dataset,index,label,pc1,pc2\n", 0) == 0);
  CHECK(std::count(scatter.begin(), scatter.end(), '\n') == 1 + 20 + 16 + 4 + 1);
  for (const char* tag : {"\nfull,", "\ntrain,", "\ntest,", "\none,"}) CHECK(scatter.find(tag) != std::string::npos);
  CHECK(fs::exists(dir / "pca.csv.json"));

  r = run(dir, "pca " + data + "/one.jsonl -o " + (dir / "single.csv").string());
  REQUIRE(r.code == 0);
  const std::string one = testsupport::read_text(dir / "single.csv");
  CHECK(std::count(one.begin(), one.end(), '\n') == 2);
  CHECK(one.find(",0,0\n") != std::string::npos);

  // tamper and verify
  std::ofstream(dir / "data" / "deformed" / "000000.png", std::ios::app) << "junk";
  r = run(dir, "verify " + data);
  CHECK(r.code == 2);
  CHECK(r.out.find("1 mismatched") != std::string::npos);
}

TEST_CASE("cli: seed override changes the output") {
  testsupport::TempDir dir("cliseed");
  const std::string cfg = "--config " + small_config(dir);
  REQUIRE(run(dir, cfg + " generate -n 2 -o " + (dir / "a").string()).code == 0);
  REQUIRE(run(dir, cfg + " --seed 8 generate -n 2 -o " + (dir / "b").string()).code == 0);
  CHECK(testsupport::read_text(dir / "a" / "manifest.jsonl") != testsupport::read_text(dir / "b" / "manifest.jsonl"));
}
