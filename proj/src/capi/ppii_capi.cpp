#define PPII_BUILDING_LIBRARY
#include "ppii/ppii.h"

#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "ppii/config.hpp"
#include "ppii/dataset.hpp"
#include "ppii/error.hpp"
#include "ppii/gradient_field.hpp"
#include "ppii/image_io.hpp"
#include "ppii/metrics.hpp"
#include "ppii/poisson.hpp"
#include "ppii/raster.hpp"
#include "ppii/sampler.hpp"

struct ppii_raster {
  ppii::Raster raster;
};

struct ppii_config {
  ppii::RunConfig config;
};

struct ppii_bundle {
  ppii_raster mean;
  ppii_raster variance;
  ppii_raster label;
  ppii_raster mask;
  std::size_t anomaly_count;
};

namespace {

thread_local std::string last_error;

ppii_status status_of(ppii::ErrorCode code) {
  switch (code) {
    case ppii::ErrorCode::InvalidInput: return PPII_ERR_INVALID_INPUT;
    case ppii::ErrorCode::CapExceeded: return PPII_ERR_CAP_EXCEEDED;
    case ppii::ErrorCode::DegenerateDistribution: return PPII_ERR_DEGENERATE_DISTRIBUTION;
    case ppii::ErrorCode::UndefinedMetric: return PPII_ERR_UNDEFINED_METRIC;
    case ppii::ErrorCode::NoInputs: return PPII_ERR_NO_INPUTS;
    case ppii::ErrorCode::Io: return PPII_ERR_IO;
    case ppii::ErrorCode::Internal: return PPII_ERR_INTERNAL;
  }
  return PPII_ERR_INTERNAL;
}

ppii_status set_error(ppii_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <typename Fn>
ppii_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const ppii::Error& e) {
    return set_error(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(PPII_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(PPII_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(PPII_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) ppii::fail(ppii::ErrorCode::InvalidInput, what);
}

ppii::PatchRegion region_of(ppii_rect r) { return {r.x, r.y, r.width, r.height}; }

ppii::SolverBackend backend_of(ppii_backend b) {
  switch (b) {
    case PPII_BACKEND_DIRECT: return ppii::SolverBackend::Direct;
    case PPII_BACKEND_DST: return ppii::SolverBackend::Dst;
    case PPII_BACKEND_CG: return ppii::SolverBackend::Cg;
  }
  ppii::fail(ppii::ErrorCode::InvalidInput, "unknown solver backend");
}

ppii_backend backend_of(ppii::SolverBackend b) {
  switch (b) {
    case ppii::SolverBackend::Direct: return PPII_BACKEND_DIRECT;
    case ppii::SolverBackend::Dst: return PPII_BACKEND_DST;
    case ppii::SolverBackend::Cg: return PPII_BACKEND_CG;
  }
  return PPII_BACKEND_DST;
}

void fill_report(ppii_solver_report* out, const ppii::SolverReport& r) {
  if (!out) return;
  out->backend = backend_of(r.backend);
  out->residual_norm = r.residual_norm;
  out->wall_time = r.wall_time;
}

ppii_status emit(ppii::Raster r, ppii_raster** out) {
  *out = new ppii_raster{std::move(r)};
  return PPII_OK;
}

}  // namespace

extern "C" {

const char* ppii_version(void) { return "0.1.0"; }

const char* ppii_last_error(void) { return last_error.c_str(); }

const char* ppii_status_name(ppii_status status) {
  switch (status) {
    case PPII_OK: return "ok";
    case PPII_ERR_INVALID_INPUT: return "invalid input";
    case PPII_ERR_CAP_EXCEEDED: return "cap exceeded";
    case PPII_ERR_DEGENERATE_DISTRIBUTION: return "degenerate distribution";
    case PPII_ERR_UNDEFINED_METRIC: return "undefined metric";
    case PPII_ERR_NO_INPUTS: return "no inputs";
    case PPII_ERR_IO: return "i/o error";
    case PPII_ERR_INTERNAL: return "internal error";
    case PPII_ERR_PARTIAL_FAILURE: return "partial failure";
  }
  return "unknown status";
}

ppii_status ppii_raster_create(size_t width, size_t height, const double* data, ppii_raster** out) {
  return guarded([&] {
    require(out != nullptr, "out is NULL");
    if (!data) return emit(ppii::Raster(width, height, 0.0), out);
    return emit(ppii::Raster(width, height, std::vector<double>(data, data + width * height)), out);
  });
}

ppii_status ppii_raster_create_f32(size_t width, size_t height, const float* data, ppii_raster** out) {
  return guarded([&] {
    require(out != nullptr && data != nullptr, "NULL argument");
    return emit(ppii::Raster(width, height, std::vector<double>(data, data + width * height)), out);
  });
}

void ppii_raster_free(ppii_raster* raster) { delete raster; }

size_t ppii_raster_width(const ppii_raster* raster) { return raster ? raster->raster.width() : 0; }

size_t ppii_raster_height(const ppii_raster* raster) { return raster ? raster->raster.height() : 0; }

const double* ppii_raster_data(const ppii_raster* raster) { return raster ? raster->raster.data().data() : nullptr; }

ppii_status ppii_raster_copy_f32(const ppii_raster* raster, float* out, size_t count) {
  return guarded([&] {
    require(raster != nullptr && out != nullptr, "NULL argument");
    require(count == raster->raster.size(), "count does not match the raster size");
    const auto values = raster->raster.data();
    for (std::size_t i = 0; i < count; ++i) out[i] = static_cast<float>(values[i]);
    return PPII_OK;
  });
}

ppii_status ppii_raster_load(const char* path, ppii_raster** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "NULL argument");
    return emit(ppii::load_image(path).raster, out);
  });
}

ppii_status ppii_raster_save(const ppii_raster* raster, const char* path, int bit_depth) {
  return guarded([&] {
    require(raster != nullptr && path != nullptr, "NULL argument");
    ppii::save_image(raster->raster, path, bit_depth);
    return PPII_OK;
  });
}

ppii_status ppii_normalize(const ppii_raster* in, ppii_raster** out) {
  return guarded([&] {
    require(in != nullptr && out != nullptr, "NULL argument");
    return emit(ppii::normalize(in->raster), out);
  });
}

ppii_status ppii_equalize(const ppii_raster* in, size_t bins, ppii_raster** out) {
  return guarded([&] {
    require(in != nullptr && out != nullptr, "NULL argument");
    return emit(ppii::equalize_histogram(in->raster, bins), out);
  });
}

ppii_status ppii_resize(const ppii_raster* in, size_t width, size_t height, ppii_raster** out) {
  return guarded([&] {
    require(in != nullptr && out != nullptr, "NULL argument");
    return emit(ppii::resize_bilinear(in->raster, width, height), out);
  });
}

ppii_status ppii_blend(const ppii_raster* target, const ppii_raster* source, ppii_rect target_rect,
                       ppii_rect source_rect, double alpha, double gain, ppii_backend backend, ppii_raster** out,
                       ppii_solver_report* report) {
  return guarded([&] {
    require(target != nullptr && source != nullptr && out != nullptr, "NULL argument");
    ppii::SolverReport r;
    ppii::BlendOptions opts;
    opts.backend = backend_of(backend);
    opts.report = &r;
    ppii::Raster blended = ppii::blend_patch(target->raster, source->raster, region_of(target_rect),
                                             region_of(source_rect), {alpha, gain}, opts);
    fill_report(report, r);
    return emit(std::move(blended), out);
  });
}

ppii_status ppii_config_create(ppii_config** out) {
  return guarded([&] {
    require(out != nullptr, "out is NULL");
    *out = new ppii_config{};
    return PPII_OK;
  });
}

void ppii_config_free(ppii_config* config) { delete config; }

ppii_status ppii_config_set(ppii_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config != nullptr && key != nullptr && value != nullptr, "NULL argument");
    ppii::RunConfig next = config->config;
    ppii::set_config_value(next, key, value);
    config->config = std::move(next);
    return PPII_OK;
  });
}

ppii_status ppii_config_load(ppii_config* config, const char* path) {
  return guarded([&] {
    require(config != nullptr && path != nullptr, "NULL argument");
    std::ifstream in(path, std::ios::binary);
    if (!in) ppii::fail(ppii::ErrorCode::Io, std::string("cannot read config ") + path);
    std::ostringstream text;
    text << in.rdbuf();
    config->config = ppii::parse_config(text.str(), path, config->config);
    return PPII_OK;
  });
}

size_t ppii_config_key_count(void) { return ppii::config_schema().size(); }

const char* ppii_config_key_name(size_t index) {
  const auto& keys = ppii::config_schema();
  return index < keys.size() ? keys[index].name.c_str() : nullptr;
}

const char* ppii_config_key_default(size_t index) {
  const auto& keys = ppii::config_schema();
  return index < keys.size() ? keys[index].default_value.c_str() : nullptr;
}

const char* ppii_config_key_description(size_t index) {
  const auto& keys = ppii::config_schema();
  return index < keys.size() ? keys[index].description.c_str() : nullptr;
}

ppii_status ppii_generate(const ppii_raster* target, const ppii_raster* const* sources, size_t source_count,
                          const ppii_config* config, uint64_t seed, uint64_t image_index, ppii_bundle** out) {
  return guarded([&] {
    require(target != nullptr && out != nullptr, "NULL argument");
    require(source_count > 0 && sources != nullptr, "at least one source is required");
    std::vector<ppii::Raster> pool;
    pool.reserve(source_count);
    for (std::size_t i = 0; i < source_count; ++i) {
      require(sources[i] != nullptr, "NULL source");
      pool.push_back(sources[i]->raster);
    }
    ppii::GeneratorConfig gen = config ? config->config.generator : ppii::GeneratorConfig{};
    gen.seed = seed;
    ppii::AnomalyBundle b = ppii::generate_anomalies(target->raster, pool, gen, {seed, image_index});
    *out = new ppii_bundle{{std::move(b.mean_image)},
                           {std::move(b.variance_map)},
                           {std::move(b.label_map)},
                           {std::move(b.binary_mask)},
                           b.anomaly_count};
    return PPII_OK;
  });
}

void ppii_bundle_free(ppii_bundle* bundle) { delete bundle; }

const ppii_raster* ppii_bundle_mean(const ppii_bundle* bundle) { return bundle ? &bundle->mean : nullptr; }

const ppii_raster* ppii_bundle_variance(const ppii_bundle* bundle) { return bundle ? &bundle->variance : nullptr; }

const ppii_raster* ppii_bundle_label(const ppii_bundle* bundle) { return bundle ? &bundle->label : nullptr; }

const ppii_raster* ppii_bundle_mask(const ppii_bundle* bundle) { return bundle ? &bundle->mask : nullptr; }

size_t ppii_bundle_anomaly_count(const ppii_bundle* bundle) { return bundle ? bundle->anomaly_count : 0; }

ppii_status ppii_run_generate(const ppii_config* config, const char* input_dir, const char* output_dir,
                              uint64_t seed, size_t workers, ppii_generate_summary* summary) {
  return guarded([&] {
    require(input_dir != nullptr && output_dir != nullptr, "NULL argument");
    ppii::RunConfig cfg = config ? config->config : ppii::RunConfig{};
    cfg.generator.seed = seed;
    cfg.output_dir = output_dir;
    if (workers > 0) cfg.workers = workers;
    ppii::validate(cfg);
    const ppii::IngestResult ingested = ppii::ingest(input_dir, cfg.pattern);
    const ppii::GenerateSummary s = ppii::cmd_generate(cfg, ingested.manifest, ingested.rejected);
    if (summary) {
      summary->images = s.images + ingested.rejected.size();
      summary->succeeded = s.succeeded;
      summary->failed = s.failures.size();
    }
    if (s.failures.empty()) return PPII_OK;
    std::string msg = std::to_string(s.failures.size()) + " file(s) failed";
    for (const auto& f : s.failures) msg += "\n  " + f.path + ": " + f.message;
    return set_error(PPII_ERR_PARTIAL_FAILURE, std::move(msg));
  });
}

ppii_status ppii_run_evaluate(const ppii_config* config, const char* pred_dir, const char* gt_dir,
                              const char* report_path) {
  return guarded([&] {
    require(pred_dir != nullptr && gt_dir != nullptr && report_path != nullptr, "NULL argument");
    const ppii::EvalConfig cfg = config ? config->config.evaluate : ppii::EvalConfig{};
    (void)ppii::cmd_evaluate(pred_dir, gt_dir, report_path, cfg);
    return PPII_OK;
  });
}

ppii_status ppii_run_blend(const char* source_path, const char* target_path, ppii_rect rect, double alpha,
                           double gain, ppii_backend backend, int normalize, const char* out_path,
                           ppii_solver_report* report) {
  return guarded([&] {
    require(source_path != nullptr && target_path != nullptr && out_path != nullptr, "NULL argument");
    ppii::BlendRequest req;
    req.source = source_path;
    req.target = target_path;
    req.rect = region_of(rect);
    req.alpha = alpha;
    req.gain = gain;
    req.out = out_path;
    req.backend = backend_of(backend);
    req.normalize = normalize != 0;
    fill_report(report, ppii::cmd_blend(req));
    return PPII_OK;
  });
}

ppii_status ppii_run_equalize(const char* input_path, const char* output_path, size_t bins) {
  return guarded([&] {
    require(input_path != nullptr && output_path != nullptr, "NULL argument");
    ppii::cmd_equalize(input_path, output_path, bins);
    return PPII_OK;
  });
}

ppii_status ppii_auroc(const double* scores, const uint8_t* labels, size_t n, double* out) {
  return guarded([&] {
    require(scores != nullptr && labels != nullptr && out != nullptr, "NULL argument");
    *out = ppii::auroc({scores, n}, {labels, n});
    return PPII_OK;
  });
}

ppii_status ppii_average_precision(const double* scores, const uint8_t* labels, size_t n, double* out) {
  return guarded([&] {
    require(scores != nullptr && labels != nullptr && out != nullptr, "NULL argument");
    *out = ppii::average_precision({scores, n}, {labels, n});
    return PPII_OK;
  });
}

ppii_status ppii_metrics_f32(const float* scores, const float* labels, size_t n, double* auroc,
                             double* average_precision) {
  return guarded([&] {
    require(scores != nullptr && labels != nullptr, "NULL argument");
    std::vector<double> s(scores, scores + n);
    std::vector<std::uint8_t> l(n);
    for (std::size_t i = 0; i < n; ++i) l[i] = labels[i] > 0.5f ? 1 : 0;
    if (auroc) *auroc = ppii::auroc(s, l);
    if (average_precision) *average_precision = ppii::average_precision(s, l);
    return PPII_OK;
  });
}

}  // extern "C"
