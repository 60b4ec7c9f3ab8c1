#include <fstream>
#include <set>

#include "doctest.h"
#include "dentsynth/composite.hpp"
#include "dentsynth/dataset.hpp"
#include "dentsynth/error.hpp"
#include "support.hpp"

using namespace dentsynth;

namespace {

Config small_config() {
  Config c;
  c.image_size = 96;
  c.can.radial_segments = 24;
  c.can.height_segments = 12;
  return c;
}

}  // namespace

TEST_CASE("dataset: label, quadrant and scene assignment") {
  std::map<int, int> quadrants;
  std::map<std::pair<int, int>, int> per_class;
  for (std::size_t i = 0; i < 8; ++i) {
    const int q = quadrant_for(i, 1);
    ++quadrants[q];
    ++per_class[{static_cast<int>(label_for(i, 1)), q}];
    CHECK(scene_for(i, 1) == i);
  }
  for (int q = 1; q <= 4; ++q) {
    CHECK(quadrants[q] == 2);
    CHECK(per_class[{0, q}] == 1);
    CHECK(per_class[{1, q}] == 1);
  }
  CHECK(label_for(0, 1) == Label::deformed);
  CHECK(label_for(1, 1) == Label::non_deformed);
  // grouped views: four consecutive samples share a scene and label
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(scene_for(i, 4) == i / 4);
    CHECK(quadrant_for(i, 4) == static_cast<int>(1 + i % 4));
    CHECK(label_for(i, 4) == ((i / 4) % 2 == 0 ? Label::deformed : Label::non_deformed));
  }
}

TEST_CASE("dataset: n=8 black generation, manifest contents and determinism") {
  testsupport::TempDir dir("gen8");
  const Config cfg = small_config();
  const GenerationReport r = generate_dataset(cfg, 8, BackgroundMode::black, dir / "a", 1);
  CHECK_FALSE(r.previous_manifest);
  const DatasetManifest& m = r.manifest;
  REQUIRE(m.samples.size() == 8);
  CHECK(m.count(Label::deformed) == 4);
  CHECK(m.count(Label::non_deformed) == 4);
  std::map<int, int> quads;
  for (const auto& s : m.samples) {
    REQUIRE(s.deformation);
    REQUIRE(s.pose);
    CHECK(s.deformation->tab_open <= s.deformation->seal_open);
    CHECK(s.background_id == kBlackBackgroundId);
    CHECK(std::filesystem::exists(m.image_path(s)));
    CHECK(std::filesystem::exists(m.root / s.mask));
    CHECK(sha256_file(m.image_path(s)) == s.image_sha256);
    CHECK(s.image.rfind(std::string(to_string(s.label)) + "/", 0) == 0);
    ++quads[s.pose->quadrant];
  }
  for (int q = 1; q <= 4; ++q) CHECK(quads[q] == 2);

  const DatasetManifest back = read_manifest(dir / "a" / "manifest.jsonl");
  CHECK(back.config_hash == config_hash(cfg));
  CHECK(back.global_seed == cfg.seed);
  REQUIRE(back.samples.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(back.samples[i].image_sha256 == m.samples[i].image_sha256);
    CHECK(back.samples[i].deformation->lattice_weights == m.samples[i].deformation->lattice_weights);
    CHECK(back.samples[i].pose->theta == m.samples[i].pose->theta);
    CHECK(back.samples[i].light->direction == m.samples[i].light->direction);
  }
  CHECK(verify_manifest(back).ok());

  // second directory, two threads: identical bytes
  const GenerationReport r2 = generate_dataset(cfg, 8, BackgroundMode::black, dir / "b", 2);
  CHECK(testsupport::read_text(dir / "a" / "manifest.jsonl") == testsupport::read_text(dir / "b" / "manifest.jsonl"));

  // rerun in place: nothing changes
  const GenerationReport again = generate_dataset(cfg, 8, BackgroundMode::black, dir / "a", 1);
  CHECK(again.previous_manifest);
  CHECK(again.files_changed == 0);
  // different seed changes files
  Config other = cfg;
  other.seed = 8;
  const GenerationReport changed = generate_dataset(other, 8, BackgroundMode::black, dir / "a", 1);
  CHECK(changed.files_changed > 0);
}

TEST_CASE("dataset: black-mode mask equals render coverage and matches the image") {
  const Config cfg = small_config();
  const GenerationContext ctx(cfg, BackgroundMode::black);
  for (std::size_t i = 0; i < 4; ++i) {
    const SampleRender r = render_sample(ctx, i);
    CHECK(r.mask == r.coverage);
    CHECK(chroma_mask(r.image, kBlack) == r.coverage);
  }
}

TEST_CASE("dataset: odd or zero n is rejected") {
  testsupport::TempDir dir("odd");
  for (std::size_t n : {7u, 0u}) {
    try {
      generate_dataset(small_config(), n, BackgroundMode::black, dir.path(), 1);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::parameter);
      CHECK(std::string(e.what()).find("even") != std::string::npos);
    }
  }
  Config grouped = small_config();
  grouped.views_per_scene = 4;
  CHECK_THROWS_AS(generate_dataset(grouped, 12, BackgroundMode::black, dir.path(), 1), Error);
}

TEST_CASE("dataset: pool mode needs a non-empty pool") {
  testsupport::TempDir dir("nopool");
  Config cfg = small_config();
  CHECK_THROWS_AS(generate_dataset(cfg, 2, BackgroundMode::pool, dir / "out", 1), Error);
  std::filesystem::create_directories(dir / "emptybg");
  cfg.background_dir = (dir / "emptybg").string();
  try {
    generate_dataset(cfg, 2, BackgroundMode::pool, dir / "out", 1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::data);
  }
}

TEST_CASE("dataset: pool mode composites without key pixels and records the background") {
  testsupport::TempDir dir("pool");
  Config cfg = small_config();
  cfg.background_dir = testsupport::write_background_pool(dir / "bg", 5, 80, 3).string();
  const GenerationReport r = generate_dataset(cfg, 4, BackgroundMode::pool, dir / "out", 1);
  for (const auto& s : r.manifest.samples) {
    CHECK(s.background_id.rfind("bg_", 0) == 0);
    const RgbImage img = read_image(r.manifest.image_path(s));
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x) REQUIRE(img.at(x, y) != kKeyGreen);
  }
  const GenerationContext ctx(cfg, BackgroundMode::pool);
  const SampleRender s = render_sample(ctx, 1);
  CHECK(s.mask == refine_mask(chroma_mask(s.keyed), cfg.morphology));
  CHECK(chroma_mask(s.keyed) == s.coverage);
}

TEST_CASE("dataset: grouped views share the deformation of their scene") {
  testsupport::TempDir dir("views");
  Config cfg = small_config();
  cfg.views_per_scene = 4;
  const GenerationReport r = generate_dataset(cfg, 8, BackgroundMode::black, dir.path(), 1);
  for (std::size_t i = 0; i < 8; ++i) {
    const auto& s = r.manifest.samples[i];
    const auto& first = r.manifest.samples[(i / 4) * 4];
    CHECK(s.scene == i / 4);
    CHECK(s.deformation->lattice_weights == first.deformation->lattice_weights);
    CHECK(s.deformation->tab_open == first.deformation->tab_open);
    CHECK(s.pose->quadrant == static_cast<int>(1 + i % 4));
  }
}

TEST_CASE("dataset: verify detects tampering and missing files") {
  testsupport::TempDir dir("verify");
  const GenerationReport r = generate_dataset(small_config(), 2, BackgroundMode::black, dir.path(), 1);
  const auto& s0 = r.manifest.samples[0];
  const auto& s1 = r.manifest.samples[1];
  std::ofstream(r.manifest.image_path(s0), std::ios::binary | std::ios::app) << "x";
  std::filesystem::remove(r.manifest.image_path(s1));
  const VerifyReport v = verify_manifest(read_manifest(dir / "manifest.jsonl"));
  CHECK_FALSE(v.ok());
  CHECK(v.mismatched.size() == 1);
  CHECK(v.missing.size() == 1);
}

TEST_CASE("split: stratified, deterministic, disjoint and covering") {
  DatasetManifest m;
  for (std::size_t i = 0; i < 100; ++i) {
    SampleSpec s;
    s.index = i;
    s.label = i % 2 ? Label::non_deformed : Label::deformed;
    m.samples.push_back(s);
  }
  const Split a = split(m, 0.8, 5);
  const Split b = split(m, 0.8, 5);
  CHECK(a.train == b.train);
  CHECK(a.test == b.test);
  CHECK(a.train.size() == 80);
  CHECK(a.test.size() == 20);
  std::size_t train_def = 0;
  for (auto i : a.train) train_def += m.samples[i].label == Label::deformed;
  CHECK(train_def == 40);
  std::set<std::size_t> all(a.train.begin(), a.train.end());
  for (auto i : a.test) CHECK(all.insert(i).second);
  CHECK(all.size() == 100);
  CHECK(split(m, 0.8, 6).train != a.train);

  DatasetManifest four;
  for (std::size_t i = 0; i < 4; ++i) {
    SampleSpec s;
    s.index = i;
    s.label = i % 2 ? Label::non_deformed : Label::deformed;
    four.samples.push_back(s);
  }
  const Split h = split(four, 0.5, 1);
  CHECK(h.train.size() == 2);
  CHECK(h.test.size() == 2);
  CHECK(four.samples[h.train[0]].label != four.samples[h.train[1]].label);
}

TEST_CASE("split: errors") {
  DatasetManifest m;
  SampleSpec s;
  s.label = Label::deformed;
  m.samples = {s, s, s};
  s.label = Label::non_deformed;
  m.samples.push_back(s);
  CHECK_THROWS_AS(split(m, 0.8, 1), Error);  // one non-deformed sample
  m.samples.push_back(s);
  CHECK_NOTHROW(split(m, 0.8, 1));
  CHECK_THROWS_AS(split(m, 0.0, 1), Error);
  CHECK_THROWS_AS(split(m, 1.0, 1), Error);
}

TEST_CASE("split: subset manifests round trip through a different directory") {
  testsupport::TempDir dir("subset");
  const GenerationReport r = generate_dataset(small_config(), 4, BackgroundMode::black, dir / "data", 1);
  const Split s = split(r.manifest, 0.5, 7);
  const DatasetManifest train = subset(r.manifest, s.train);
  std::filesystem::create_directories(dir / "splits");
  write_manifest(train, dir / "splits" / "train.jsonl");
  const DatasetManifest back = read_manifest(dir / "splits" / "train.jsonl");
  REQUIRE(back.samples.size() == 2);
  for (const auto& smp : back.samples) CHECK(std::filesystem::exists(back.image_path(smp)));
  CHECK(verify_manifest(back).ok());
}

TEST_CASE("manifest: malformed lines report the line number") {
  testsupport::TempDir dir("badmanifest");
  const GenerationReport r = generate_dataset(small_config(), 2, BackgroundMode::black, dir.path(), 1);
  std::ofstream(dir / "manifest.jsonl", std::ios::app) << "{broken\n";
  try {
    read_manifest(dir / "manifest.jsonl");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("manifest.jsonl:4:") != std::string::npos);
  }
  CHECK_THROWS_AS(read_manifest(dir / "missing.jsonl"), Error);
}

TEST_CASE("ingest: crops, resizes, labels from directories") {
  testsupport::TempDir dir("ingest");
  std::filesystem::create_directories(dir / "photos" / "deformed");
  std::filesystem::create_directories(dir / "photos" / "non_deformed");
  RgbImage wide(80, 60, Rgb{10, 10, 10});
  for (int y = 0; y < 60; ++y)
    for (int x = 10; x < 70; ++x) wide.set(x, y, {200, 50, 50});  // the central 60x60 square
  for (int i = 0; i < 3; ++i) write_png(wide, dir / "photos" / "deformed" / ("d" + std::to_string(i) + ".png"));
  testsupport::write_jpeg(RgbImage(30, 40, Rgb{50, 200, 50}), dir / "photos" / "non_deformed" / "n0.jpg");
  std::ofstream(dir / "photos" / "non_deformed" / "notes.txt") << "ignored";
  const DatasetManifest m = ingest_real(dir / "photos", dir / "real", 32);
  REQUIRE(m.samples.size() == 4);
  CHECK(m.kind == "real");
  CHECK(m.count(Label::deformed) == 3);
  CHECK(m.count(Label::non_deformed) == 1);
  const RgbImage first = read_image(m.image_path(m.samples[0]));
  CHECK(first.width == 32);
  CHECK(first.height == 32);
  // centre crop removed the dark side bands
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) REQUIRE(first.at(x, y) == Rgb{200, 50, 50});
  CHECK(m.samples[0].source.find("d0.png") != std::string::npos);
  const DatasetManifest back = read_manifest(dir / "real" / "manifest.jsonl");
  CHECK(back.samples.size() == 4);
  CHECK(verify_manifest(back).ok());
}

TEST_CASE("ingest: empty class directory and unreadable files are errors") {
  testsupport::TempDir dir("ingestbad");
  std::filesystem::create_directories(dir / "p" / "deformed");
  std::filesystem::create_directories(dir / "p" / "non_deformed");
  write_png(RgbImage(8, 8), dir / "p" / "deformed" / "a.png");
  CHECK_THROWS_AS(ingest_real(dir / "p", dir / "o", 16), Error);
  std::ofstream(dir / "p" / "non_deformed" / "broken.jpg") << "nope";
  try {
    ingest_real(dir / "p", dir / "o", 16);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("broken.jpg") != std::string::npos);
  }
}
