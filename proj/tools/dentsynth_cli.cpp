#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dentsynth/dentsynth.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct Failure {
  int code;
};

int exit_code_for(ds_status s) {
  return s == DS_ERR_PARAMETER || s == DS_ERR_NULL_ARGUMENT ? kExitUsage : kExitData;
}

void check(ds_status s, const char* what) {
  if (s == DS_OK) return;
  std::cerr << "error: " << what << ": " << ds_last_error() << "\n";
  throw Failure{exit_code_for(s)};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ConfigPtr = std::unique_ptr<ds_config, Deleter<ds_config, ds_config_free>>;
using ManifestPtr = std::unique_ptr<ds_manifest, Deleter<ds_manifest, ds_manifest_free>>;
using ModelPtr = std::unique_ptr<ds_model, Deleter<ds_model, ds_model_free>>;
using StringPtr = std::unique_ptr<char, Deleter<char, ds_string_free>>;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

ConfigPtr load_config(const Common& c) {
  ds_config* raw = nullptr;
  if (c.config_path.empty()) check(ds_config_default(&raw), "config");
  else check(ds_config_load(c.config_path.c_str(), &raw), "config");
  ConfigPtr cfg(raw);
  if (c.seed) check(ds_config_set_seed(cfg.get(), *c.seed), "config");
  return cfg;
}

void overlay(ds_config* cfg, const std::string& json) { check(ds_config_overlay(cfg, json.c_str()), "config"); }

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

ManifestPtr read_manifest(const std::string& path) {
  std::filesystem::path p(path);
  if (std::filesystem::is_directory(p)) p /= "manifest.jsonl";
  ds_manifest* raw = nullptr;
  check(ds_manifest_read(p.string().c_str(), &raw), "manifest");
  return ManifestPtr(raw);
}

// "tag=path" or a bare path tagged by its directory name.
std::pair<std::string, std::string> tagged(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq != std::string::npos) return {arg.substr(0, eq), arg.substr(eq + 1)};
  std::filesystem::path p(arg);
  if (p.filename() == "manifest.jsonl" || p.extension() == ".jsonl") {
    if (p.extension() == ".jsonl" && p.filename() != "manifest.jsonl") return {p.stem().string(), arg};
    p = p.parent_path();
  }
  std::string tag = p.lexically_normal().filename().string();
  if (tag.empty()) tag = p.lexically_normal().parent_path().filename().string();
  return {tag, arg};
}

std::string config_key_footer() {
  std::string out = "Config keys (JSON file passed with --config, dotted path = default):\n";
  const size_t n = ds_config_key_count();
  for (size_t i = 0; i < n; ++i) {
    const char* key = nullptr;
    const char* def = nullptr;
    if (ds_config_key(i, &key, &def) != DS_OK) continue;
    out += "  ";
    out += key;
    out += " = ";
    out += def;
    out += "\n";
  }
  return out;
}

void print_metrics(const ds_metrics& m, const ds_confusion& c) {
  std::printf("accuracy %.4f  f1 %.4f  recall %.4f  precision %.4f\n", m.accuracy, m.f1, m.recall, m.precision);
  std::printf("confusion tp=%zu fp=%zu fn=%zu tn=%zu\n", c.tp, c.fp, c.fn, c.tn);
  if (!m.precision_defined) std::printf("note: precision undefined (no positive predictions), reported as 0\n");
  if (!m.recall_defined) std::printf("note: recall undefined (no positive samples), reported as 0\n");
  if (!m.f1_defined) std::printf("note: f1 undefined, reported as 0\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic dented-can dataset generator and baseline analytics"};
  app.require_subcommand(1);
  app.fallthrough();
  app.footer(config_key_footer());

  Common common;
  app.add_option("--config", common.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", common.seed, "Global seed (overrides the config)");
  app.add_option("--jobs", common.jobs, "Worker threads")->check(CLI::PositiveNumber);

  // generate
  auto* gen = app.add_subcommand("generate", "Render a labelled synthetic dataset");
  long long gen_n = 0;
  std::string gen_mode = "black";
  std::string gen_out = "dataset";
  std::string gen_backgrounds;
  gen->add_option("-n,--count", gen_n, "Number of samples (even)")->required();
  gen->add_option("--background", gen_mode, "Background mode")->check(CLI::IsMember({"black", "pool"}));
  gen->add_option("--backgrounds", gen_backgrounds, "Background image directory for pool mode");
  gen->add_option("-o,--out", gen_out, "Output directory");

  // ingest
  auto* ing = app.add_subcommand("ingest", "Import photos from <dir>/deformed and <dir>/non_deformed");
  std::string ing_src;
  std::string ing_out;
  int ing_size = 512;
  ing->add_option("source", ing_src, "Photo directory")->required();
  ing->add_option("-o,--out", ing_out, "Output directory")->required();
  ing->add_option("--size", ing_size, "Output image side in pixels")->check(CLI::PositiveNumber);

  // split
  auto* spl = app.add_subcommand("split", "Stratified train/test split of a manifest");
  std::string spl_manifest;
  std::string spl_out;
  std::optional<double> spl_fraction;
  spl->add_option("manifest", spl_manifest, "Manifest file or dataset directory")->required();
  spl->add_option("-o,--out", spl_out, "Directory for train.jsonl and test.jsonl (default: next to the manifest)");
  spl->add_option("--fraction", spl_fraction, "Training fraction (default train.split_fraction)");

  // train
  auto* trn = app.add_subcommand("train", "Train the linear baseline");
  std::string trn_manifest;
  std::string trn_model = "model.json";
  std::string trn_test;
  std::string trn_eval_out;
  std::optional<int> trn_epochs;
  std::optional<double> trn_lr;
  std::optional<double> trn_l2;
  trn->add_option("manifest", trn_manifest, "Training manifest")->required();
  trn->add_option("-m,--model", trn_model, "Where to write the model");
  trn->add_option("--test", trn_test, "Evaluate on this manifest after training");
  trn->add_option("--eval-out", trn_eval_out, "Directory for metrics of --test (default: next to the model)");
  trn->add_option("--epochs", trn_epochs, "Override train.epochs");
  trn->add_option("--lr", trn_lr, "Override train.learning_rate");
  trn->add_option("--l2", trn_l2, "Override train.l2");

  // eval
  auto* evl = app.add_subcommand("eval", "Evaluate a model and write metrics.csv / confusion.csv");
  std::string evl_model;
  std::string evl_manifest;
  std::string evl_out;
  evl->add_option("-m,--model", evl_model, "Model file")->required();
  evl->add_option("manifest", evl_manifest, "Test manifest")->required();
  evl->add_option("-o,--out", evl_out, "Output directory")->required();

  // pca
  auto* pca = app.add_subcommand("pca", "PCA scatter of one or more datasets");
  std::vector<std::string> pca_inputs;
  std::string pca_out = "pca.csv";
  int pca_k = 2;
  pca->add_option("manifests", pca_inputs, "Manifests, optionally as tag=path")->required();
  pca->add_option("-o,--out", pca_out, "CSV output path");
  pca->add_option("-k,--components", pca_k, "Number of components")->check(CLI::PositiveNumber);

  // report
  auto* rep = app.add_subcommand("report", "Metrics table from evaluation directories");
  std::vector<std::string> rep_inputs;
  std::string rep_out = "report";
  rep->add_option("evals", rep_inputs, "Evaluation directories, optionally as name=dir")->required();
  rep->add_option("-o,--out", rep_out, "Output directory");

  // verify
  auto* ver = app.add_subcommand("verify", "Check every file of a manifest against its digest");
  std::string ver_manifest;
  ver->add_option("manifest", ver_manifest, "Manifest file or dataset directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen) {
      if (gen_n <= 0 || gen_n % 2 != 0) {
        std::cerr << "error: n must be even and positive (got " << gen_n << ")\n";
        return kExitUsage;
      }
      ConfigPtr cfg = load_config(common);
      if (!gen_backgrounds.empty())
        overlay(cfg.get(), "{\"composite\":{\"background_dir\":" + json_string(gen_backgrounds) + "}}");
      ds_generate_result r{};
      check(ds_generate(cfg.get(), static_cast<size_t>(gen_n),
                        gen_mode == "pool" ? DS_BACKGROUND_POOL : DS_BACKGROUND_BLACK, gen_out.c_str(), common.jobs, &r),
            "generate");
      std::printf("generated %lld samples (deformed %zu, non_deformed %zu) in %s\n", gen_n, r.deformed,
                  r.non_deformed, gen_out.c_str());
      if (r.had_previous_manifest) std::printf("%zu files changed\n", r.files_changed);
      return 0;
    }

    if (*ing) {
      ds_manifest* raw = nullptr;
      check(ds_ingest(ing_src.c_str(), ing_out.c_str(), ing_size, &raw), "ingest");
      ManifestPtr m(raw);
      size_t d = 0;
      size_t nd = 0;
      ds_manifest_class_count(m.get(), DS_LABEL_DEFORMED, &d);
      ds_manifest_class_count(m.get(), DS_LABEL_NON_DEFORMED, &nd);
      std::printf("ingested %zu photos (deformed %zu, non_deformed %zu) into %s\n", d + nd, d, nd, ing_out.c_str());
      return 0;
    }

    if (*spl) {
      ConfigPtr cfg = load_config(common);
      ManifestPtr m = read_manifest(spl_manifest);
      uint64_t seed = 0;
      ds_config_get_seed(cfg.get(), &seed);
      double fraction = 0.8;
      if (spl_fraction) {
        fraction = *spl_fraction;
      } else {
        check(ds_config_get_number(cfg.get(), "train.split_fraction", &fraction), "config");
      }
      ds_manifest* tr = nullptr;
      ds_manifest* te = nullptr;
      check(ds_split(m.get(), fraction, seed, &tr, &te), "split");
      ManifestPtr train(tr);
      ManifestPtr test(te);
      std::filesystem::path dir = spl_out.empty() ? std::filesystem::path(spl_manifest) : std::filesystem::path(spl_out);
      if (spl_out.empty() && !std::filesystem::is_directory(dir)) dir = dir.parent_path();
      if (dir.empty()) dir = ".";
      std::filesystem::create_directories(dir);
      check(ds_manifest_write(train.get(), (dir / "train.jsonl").string().c_str()), "split");
      check(ds_manifest_write(test.get(), (dir / "test.jsonl").string().c_str()), "split");
      size_t ntr = 0;
      size_t nte = 0;
      ds_manifest_size(train.get(), &ntr);
      ds_manifest_size(test.get(), &nte);
      std::printf("split %zu train / %zu test -> %s\n", ntr, nte, dir.string().c_str());
      return 0;
    }

    if (*trn) {
      ConfigPtr cfg = load_config(common);
      std::string patch;
      auto add = [&](const std::string& kv) { patch += (patch.empty() ? "" : ",") + kv; };
      if (trn_epochs) add("\"epochs\":" + std::to_string(*trn_epochs));
      if (trn_lr) add("\"learning_rate\":" + CLI::detail::to_string(*trn_lr));
      if (trn_l2) add("\"l2\":" + CLI::detail::to_string(*trn_l2));
      if (!patch.empty()) overlay(cfg.get(), "{\"train\":{" + patch + "}}");
      ManifestPtr train = read_manifest(trn_manifest);
      ds_model* raw = nullptr;
      check(ds_train(cfg.get(), train.get(), common.jobs, &raw), "train");
      ModelPtr model(raw);
      check(ds_model_save(model.get(), trn_model.c_str()), "train");
      std::printf("model written to %s\n", trn_model.c_str());
      if (!trn_test.empty()) {
        ManifestPtr test = read_manifest(trn_test);
        std::string out = trn_eval_out;
        if (out.empty()) {
          auto parent = std::filesystem::path(trn_model).parent_path();
          out = (parent.empty() ? std::filesystem::path("eval") : parent / "eval").string();
        }
        ds_confusion c{};
        ds_metrics mt{};
        check(ds_evaluate_to_dir(model.get(), test.get(), common.jobs, out.c_str(), &c, &mt), "eval");
        print_metrics(mt, c);
        std::printf("metrics written to %s\n", out.c_str());
      }
      return 0;
    }

    if (*evl) {
      ds_model* raw = nullptr;
      check(ds_model_load(evl_model.c_str(), &raw), "eval");
      ModelPtr model(raw);
      ManifestPtr test = read_manifest(evl_manifest);
      ds_confusion c{};
      ds_metrics mt{};
      check(ds_evaluate_to_dir(model.get(), test.get(), common.jobs, evl_out.c_str(), &c, &mt), "eval");
      print_metrics(mt, c);
      std::printf("metrics written to %s\n", evl_out.c_str());
      return 0;
    }

    if (*pca) {
      std::vector<std::string> tags;
      std::vector<ManifestPtr> owned;
      for (const auto& arg : pca_inputs) {
        auto [tag, path] = tagged(arg);
        tags.push_back(tag);
        owned.push_back(read_manifest(path));
      }
      std::vector<const char*> tag_ptrs;
      std::vector<const ds_manifest*> ptrs;
      for (size_t i = 0; i < owned.size(); ++i) {
        tag_ptrs.push_back(tags[i].c_str());
        ptrs.push_back(owned[i].get());
      }
      std::vector<double> variances(owned.size());
      check(ds_pca(tag_ptrs.data(), ptrs.data(), owned.size(), pca_k, common.jobs, pca_out.c_str(), variances.data()),
            "pca");
      for (size_t i = 0; i < tags.size(); ++i)
        std::printf("%s: projected variance %.6g\n", tags[i].c_str(), variances[i]);
      std::printf("scatter written to %s\n", pca_out.c_str());
      return 0;
    }

    if (*rep) {
      std::vector<std::string> names;
      std::vector<std::string> dirs;
      for (const auto& arg : rep_inputs) {
        auto [name, dir] = tagged(arg);
        names.push_back(name);
        dirs.push_back(dir);
      }
      std::vector<const char*> np;
      std::vector<const char*> dp;
      for (size_t i = 0; i < names.size(); ++i) {
        np.push_back(names[i].c_str());
        dp.push_back(dirs[i].c_str());
      }
      char* text = nullptr;
      check(ds_report(np.data(), dp.data(), names.size(), rep_out.c_str(), &text), "report");
      StringPtr holder(text);
      std::fputs(text, stdout);
      return 0;
    }

    if (*ver) {
      ManifestPtr m = read_manifest(ver_manifest);
      ds_verify_result r{};
      char* problems = nullptr;
      check(ds_verify(m.get(), &r, &problems), "verify");
      StringPtr holder(problems);
      if (problems) std::fputs(problems, stdout);
      std::printf("verified %zu files: %zu mismatched, %zu missing\n", r.checked, r.mismatched, r.missing);
      return r.mismatched == 0 && r.missing == 0 ? 0 : kExitData;
    }
  } catch (const Failure& f) {
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
