#include "dentsynth/dentsynth.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "json.hpp"

#include "dentsynth/analytics.hpp"
#include "dentsynth/config.hpp"
#include "dentsynth/dataset.hpp"
#include "dentsynth/error.hpp"

struct ds_config {
  dentsynth::Config value;
};

struct ds_manifest {
  dentsynth::DatasetManifest value;
};

struct ds_model {
  dentsynth::LinearModel value;
};

namespace {

using namespace dentsynth;

thread_local std::string last_error;

ds_status status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parameter: return DS_ERR_PARAMETER;
    case ErrorKind::parse: return DS_ERR_PARSE;
    case ErrorKind::shape: return DS_ERR_SHAPE;
    case ErrorKind::geometry: return DS_ERR_GEOMETRY;
    case ErrorKind::lookup: return DS_ERR_LOOKUP;
    case ErrorKind::configuration: return DS_ERR_CONFIGURATION;
    case ErrorKind::image: return DS_ERR_IMAGE;
    case ErrorKind::io: return DS_ERR_IO;
    case ErrorKind::data: return DS_ERR_DATA;
  }
  return DS_ERR_INTERNAL;
}

template <typename Fn>
ds_status guarded(Fn&& fn) {
  try {
    fn();
    return DS_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return status_for(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::filesystem::filesystem_error& e) {
    last_error = e.what();
    return DS_ERR_IO;
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return DS_ERR_INTERNAL;
}

ds_status null_argument(const char* name) {
  last_error = std::string("argument '") + name + "' is null";
  return DS_ERR_NULL_ARGUMENT;
}

#define DS_REQUIRE(arg) \
  if ((arg) == nullptr) return null_argument(#arg)

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ds_metrics to_c(const MetricsReport& m) {
  return ds_metrics{m.accuracy, m.f1, m.recall, m.precision, m.precision_defined ? 1 : 0, m.recall_defined ? 1 : 0,
                    m.f1_defined ? 1 : 0};
}

ds_confusion to_c(const ConfusionMatrix& c) { return ds_confusion{c.tp, c.fp, c.fn, c.tn}; }

const std::vector<std::pair<std::string, std::string>>& key_listing() {
  static const auto listing = config_key_listing();
  return listing;
}

}  // namespace

extern "C" {

const char* ds_version(void) { return "0.1.0"; }

const char* ds_last_error(void) { return last_error.c_str(); }

const char* ds_status_name(ds_status status) {
  switch (status) {
    case DS_OK: return "ok";
    case DS_ERR_PARAMETER: return "parameter";
    case DS_ERR_PARSE: return "parse";
    case DS_ERR_SHAPE: return "shape";
    case DS_ERR_GEOMETRY: return "geometry";
    case DS_ERR_LOOKUP: return "lookup";
    case DS_ERR_CONFIGURATION: return "configuration";
    case DS_ERR_IMAGE: return "image";
    case DS_ERR_IO: return "io";
    case DS_ERR_DATA: return "data";
    case DS_ERR_NULL_ARGUMENT: return "null argument";
    case DS_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void ds_string_free(char* text) { std::free(text); }

ds_status ds_config_default(ds_config** out) {
  DS_REQUIRE(out);
  return guarded([&] { *out = new ds_config{}; });
}

ds_status ds_config_load(const char* path, ds_config** out) {
  DS_REQUIRE(path);
  DS_REQUIRE(out);
  return guarded([&] { *out = new ds_config{load_config(path)}; });
}

ds_status ds_config_from_json(const char* json, ds_config** out) {
  DS_REQUIRE(json);
  DS_REQUIRE(out);
  return guarded([&] { *out = new ds_config{config_from_json(json)}; });
}

ds_status ds_config_overlay(ds_config* config, const char* json) {
  DS_REQUIRE(config);
  DS_REQUIRE(json);
  return guarded([&] { config->value = config_overlay(config->value, json); });
}

ds_status ds_config_set_seed(ds_config* config, uint64_t seed) {
  DS_REQUIRE(config);
  config->value.seed = seed;
  return DS_OK;
}

ds_status ds_config_get_seed(const ds_config* config, uint64_t* seed) {
  DS_REQUIRE(config);
  DS_REQUIRE(seed);
  *seed = config->value.seed;
  return DS_OK;
}

ds_status ds_config_get_number(const ds_config* config, const char* key, double* value) {
  DS_REQUIRE(config);
  DS_REQUIRE(key);
  DS_REQUIRE(value);
  return guarded([&] {
    std::string pointer = "/" + std::string(key);
    for (char& ch : pointer)
      if (ch == '.') ch = '/';
    const nlohmann::json j = nlohmann::json::parse(config_to_json(config->value));
    const nlohmann::json::json_pointer ptr(pointer);
    if (!j.contains(ptr) || !j.at(ptr).is_number()) fail(ErrorKind::lookup, std::string("no numeric config key '") + key + "'");
    *value = j.at(ptr).get<double>();
  });
}

ds_status ds_config_to_json(const ds_config* config, char** json) {
  DS_REQUIRE(config);
  DS_REQUIRE(json);
  return guarded([&] { *json = dup_string(config_to_json(config->value)); });
}

ds_status ds_config_hash(const ds_config* config, char** hex) {
  DS_REQUIRE(config);
  DS_REQUIRE(hex);
  return guarded([&] { *hex = dup_string(config_hash(config->value)); });
}

void ds_config_free(ds_config* config) { delete config; }

size_t ds_config_key_count(void) {
  try {
    return key_listing().size();
  } catch (...) {
    return 0;
  }
}

ds_status ds_config_key(size_t index, const char** key, const char** default_value) {
  DS_REQUIRE(key);
  DS_REQUIRE(default_value);
  return guarded([&] {
    const auto& listing = key_listing();
    if (index >= listing.size()) fail(ErrorKind::parameter, "config key index out of range");
    *key = listing[index].first.c_str();
    *default_value = listing[index].second.c_str();
  });
}

ds_status ds_manifest_read(const char* path, ds_manifest** out) {
  DS_REQUIRE(path);
  DS_REQUIRE(out);
  return guarded([&] { *out = new ds_manifest{read_manifest(path)}; });
}

ds_status ds_manifest_write(const ds_manifest* manifest, const char* path) {
  DS_REQUIRE(manifest);
  DS_REQUIRE(path);
  return guarded([&] { write_manifest(manifest->value, path); });
}

ds_status ds_manifest_size(const ds_manifest* manifest, size_t* count) {
  DS_REQUIRE(manifest);
  DS_REQUIRE(count);
  *count = manifest->value.samples.size();
  return DS_OK;
}

ds_status ds_manifest_class_count(const ds_manifest* manifest, ds_label label, size_t* count) {
  DS_REQUIRE(manifest);
  DS_REQUIRE(count);
  *count = manifest->value.count(label == DS_LABEL_DEFORMED ? Label::deformed : Label::non_deformed);
  return DS_OK;
}

ds_status ds_manifest_sample_label(const ds_manifest* manifest, size_t i, ds_label* label) {
  DS_REQUIRE(manifest);
  DS_REQUIRE(label);
  return guarded([&] {
    if (i >= manifest->value.samples.size()) fail(ErrorKind::parameter, "sample index out of range");
    *label = manifest->value.samples[i].label == Label::deformed ? DS_LABEL_DEFORMED : DS_LABEL_NON_DEFORMED;
  });
}

ds_status ds_manifest_sample_image(const ds_manifest* manifest, size_t i, char** path) {
  DS_REQUIRE(manifest);
  DS_REQUIRE(path);
  return guarded([&] {
    if (i >= manifest->value.samples.size()) fail(ErrorKind::parameter, "sample index out of range");
    *path = dup_string(manifest->value.image_path(manifest->value.samples[i]).string());
  });
}

void ds_manifest_free(ds_manifest* manifest) { delete manifest; }

ds_status ds_generate(const ds_config* config, size_t n, ds_background_mode mode, const char* out_dir, int jobs,
                      ds_generate_result* result) {
  DS_REQUIRE(config);
  DS_REQUIRE(out_dir);
  return guarded([&] {
    const BackgroundMode m = mode == DS_BACKGROUND_POOL ? BackgroundMode::pool : BackgroundMode::black;
    const GenerationReport r = generate_dataset(config->value, n, m, out_dir, jobs);
    if (result) {
      result->deformed = r.manifest.count(Label::deformed);
      result->non_deformed = r.manifest.count(Label::non_deformed);
      result->had_previous_manifest = r.previous_manifest ? 1 : 0;
      result->files_changed = r.files_changed;
    }
  });
}

ds_status ds_ingest(const char* source_dir, const char* out_dir, int image_size, ds_manifest** out) {
  DS_REQUIRE(source_dir);
  DS_REQUIRE(out_dir);
  return guarded([&] {
    DatasetManifest m = ingest_real(source_dir, out_dir, image_size);
    if (out) *out = new ds_manifest{std::move(m)};
  });
}

ds_status ds_split(const ds_manifest* manifest, double fraction, uint64_t seed, ds_manifest** train,
                   ds_manifest** test) {
  DS_REQUIRE(manifest);
  DS_REQUIRE(train);
  DS_REQUIRE(test);
  return guarded([&] {
    const Split s = split(manifest->value, fraction, seed);
    auto tr = std::make_unique<ds_manifest>(ds_manifest{subset(manifest->value, s.train)});
    auto te = std::make_unique<ds_manifest>(ds_manifest{subset(manifest->value, s.test)});
    *train = tr.release();
    *test = te.release();
  });
}

ds_status ds_verify(const ds_manifest* manifest, ds_verify_result* result, char** problems) {
  DS_REQUIRE(manifest);
  DS_REQUIRE(result);
  return guarded([&] {
    const VerifyReport r = verify_manifest(manifest->value);
    result->checked = r.checked;
    result->mismatched = r.mismatched.size();
    result->missing = r.missing.size();
    if (problems) {
      std::string text;
      for (const auto& p : r.mismatched) text += "mismatch " + p + "\n";
      for (const auto& p : r.missing) text += "missing " + p + "\n";
      *problems = dup_string(text);
    }
  });
}

ds_status ds_train(const ds_config* config, const ds_manifest* train, int jobs, ds_model** out) {
  DS_REQUIRE(config);
  DS_REQUIRE(train);
  DS_REQUIRE(out);
  return guarded([&] { *out = new ds_model{train_baseline(train->value, config->value.train, jobs)}; });
}

ds_status ds_model_save(const ds_model* model, const char* path) {
  DS_REQUIRE(model);
  DS_REQUIRE(path);
  return guarded([&] { save_model(model->value, path); });
}

ds_status ds_model_load(const char* path, ds_model** out) {
  DS_REQUIRE(path);
  DS_REQUIRE(out);
  return guarded([&] { *out = new ds_model{load_model(path)}; });
}

void ds_model_free(ds_model* model) { delete model; }

ds_status ds_evaluate(const ds_model* model, const ds_manifest* test, int jobs, ds_confusion* confusion,
                      ds_metrics* metrics) {
  DS_REQUIRE(model);
  DS_REQUIRE(test);
  return guarded([&] {
    const Evaluation e = evaluate(model->value, test->value, jobs);
    if (confusion) *confusion = to_c(e.confusion);
    if (metrics) *metrics = to_c(e.metrics);
  });
}

ds_status ds_evaluate_to_dir(const ds_model* model, const ds_manifest* test, int jobs, const char* out_dir,
                             ds_confusion* confusion, ds_metrics* metrics) {
  DS_REQUIRE(model);
  DS_REQUIRE(test);
  DS_REQUIRE(out_dir);
  return guarded([&] {
    const Evaluation e = evaluate(model->value, test->value, jobs);
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    write_metrics_csv(e.metrics, dir / "metrics.csv");
    write_confusion_csv(e.confusion, dir / "confusion.csv");
    write_predictions_csv(test->value, e, dir / "predictions.csv");
    if (confusion) *confusion = to_c(e.confusion);
    if (metrics) *metrics = to_c(e.metrics);
  });
}

ds_status ds_metrics_from_confusion(const ds_confusion* confusion, ds_metrics* metrics) {
  DS_REQUIRE(confusion);
  DS_REQUIRE(metrics);
  return guarded([&] {
    *metrics = to_c(dentsynth::metrics(ConfusionMatrix{confusion->tp, confusion->fp, confusion->fn, confusion->tn}));
  });
}

ds_status ds_pca(const char* const* tags, const ds_manifest* const* manifests, size_t count, int k, int jobs,
                 const char* csv_path, double* variances) {
  DS_REQUIRE(tags);
  DS_REQUIRE(manifests);
  DS_REQUIRE(csv_path);
  return guarded([&] {
    std::vector<std::pair<std::string, DatasetManifest>> datasets;
    for (size_t i = 0; i < count; ++i) {
      if (!tags[i] || !manifests[i]) fail(ErrorKind::parameter, "pca: null tag or manifest at position " + std::to_string(i));
      for (const auto& [tag, m] : datasets)
        if (tag == tags[i]) fail(ErrorKind::parameter, std::string("pca: duplicate dataset tag '") + tags[i] + "'");
      datasets.emplace_back(tags[i], manifests[i]->value);
    }
    const PcaScatter scatter = pca_scatter(datasets, k, jobs);
    write_pca_csv(scatter, csv_path);

    nlohmann::json meta;
    meta["feature_space"] = kFeatureSpec;
    meta["fit"] = "covariance eigendecomposition over the union of all datasets";
    meta["components"] = scatter.model.components.rows();
    meta["explained_variance"] = std::vector<double>(scatter.model.variances.data(),
                                                     scatter.model.variances.data() + scatter.model.variances.size());
    nlohmann::json per = nlohmann::json::object();
    for (size_t i = 0; i < datasets.size(); ++i) {
      const double v = projected_variance(scatter, datasets[i].first);
      per[datasets[i].first] = {{"samples", datasets[i].second.samples.size()}, {"projected_variance", v}};
      if (variances) variances[i] = v;
    }
    meta["datasets"] = per;
    const std::string meta_path = std::string(csv_path) + ".json";
    std::ofstream out(meta_path, std::ios::binary);
    if (!out) fail(ErrorKind::io, "cannot write " + meta_path);
    out << meta.dump(2) << '\n';
  });
}

ds_status ds_report(const char* const* names, const char* const* eval_dirs, size_t count, const char* out_dir,
                    char** text) {
  DS_REQUIRE(names);
  DS_REQUIRE(eval_dirs);
  DS_REQUIRE(out_dir);
  return guarded([&] {
    if (count == 0) fail(ErrorKind::parameter, "report: no evaluation directories given");
    std::vector<ReportColumn> columns;
    std::ostringstream panels;
    panels << "panel,actual,predicted_deformed,predicted_non_deformed\n";
    for (size_t i = 0; i < count; ++i) {
      if (!names[i] || !eval_dirs[i]) fail(ErrorKind::parameter, "report: null entry at position " + std::to_string(i));
      const std::filesystem::path dir(eval_dirs[i]);
      columns.push_back({names[i], read_metrics_csv(dir / "metrics.csv")});
      if (std::filesystem::exists(dir / "confusion.csv")) {
        const ConfusionMatrix cm = read_confusion_csv(dir / "confusion.csv");
        panels << names[i] << ",deformed," << cm.tp << ',' << cm.fn << '\n';
        panels << names[i] << ",non_deformed," << cm.fp << ',' << cm.tn << '\n';
      }
    }
    const std::filesystem::path out(out_dir);
    std::filesystem::create_directories(out);
    const std::string table = report_text(columns);
    auto write = [](const std::filesystem::path& p, const std::string& s) {
      std::ofstream f(p, std::ios::binary);
      if (!f) fail(ErrorKind::io, "cannot write " + p.string());
      f << s;
    };
    write(out / "report.csv", report_csv(columns));
    write(out / "report.txt", table);
    write(out / "confusion_panels.csv", panels.str());
    if (text) *text = dup_string(table);
  });
}

}  // extern "C"
