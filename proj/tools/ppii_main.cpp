// ppii command-line front end. Talks to the library only through ppii.h.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ppii/ppii.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitInvalid = 2;

int report(ppii_status status) {
  if (status == PPII_OK) return kExitOk;
  std::fprintf(stderr, "ppii: %s: %s\n", ppii_status_name(status), ppii_last_error());
  return status == PPII_ERR_PARTIAL_FAILURE ? kExitPartial : kExitInvalid;
}

using ConfigPtr = std::unique_ptr<ppii_config, decltype(&ppii_config_free)>;

ConfigPtr make_config(ppii_status& status) {
  ppii_config* cfg = nullptr;
  status = ppii_config_create(&cfg);
  return ConfigPtr(cfg, &ppii_config_free);
}

ppii_backend parse_backend(const std::string& name) {
  if (name == "direct") return PPII_BACKEND_DIRECT;
  if (name == "cg") return PPII_BACKEND_CG;
  return PPII_BACKEND_DST;
}

struct GenerateArgs {
  std::string config, input, output, pattern;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
};

int run_generate(const GenerateArgs& a) {
  ppii_status st;
  ConfigPtr cfg = make_config(st);
  if (st != PPII_OK) return report(st);
  if (!a.config.empty() && (st = ppii_config_load(cfg.get(), a.config.c_str())) != PPII_OK) return report(st);
  if (!a.pattern.empty() && (st = ppii_config_set(cfg.get(), "run.pattern", a.pattern.c_str())) != PPII_OK)
    return report(st);
  ppii_generate_summary summary{};
  st = ppii_run_generate(cfg.get(), a.input.c_str(), a.output.c_str(), a.seed, a.workers, &summary);
  if (st == PPII_OK || st == PPII_ERR_PARTIAL_FAILURE)
    std::printf("generated %zu of %zu images (%zu failed)\n", summary.succeeded, summary.images, summary.failed);
  return report(st);
}

struct EvaluateArgs {
  std::string pred, gt, report_path, config, pattern;
};

int run_evaluate(const EvaluateArgs& a) {
  ppii_status st;
  ConfigPtr cfg = make_config(st);
  if (st != PPII_OK) return report(st);
  if (!a.config.empty() && (st = ppii_config_load(cfg.get(), a.config.c_str())) != PPII_OK) return report(st);
  if (!a.pattern.empty() && (st = ppii_config_set(cfg.get(), "evaluate.pattern", a.pattern.c_str())) != PPII_OK)
    return report(st);
  st = ppii_run_evaluate(cfg.get(), a.pred.c_str(), a.gt.c_str(), a.report_path.c_str());
  if (st == PPII_OK) std::printf("wrote %s\n", a.report_path.c_str());
  return report(st);
}

struct BlendArgs {
  std::string source, target, out, backend = "dst";
  std::vector<std::size_t> rect;
  double alpha = 0.5;
  double gain = 1.0;
  bool no_normalize = false;
};

int run_blend(const BlendArgs& a) {
  const ppii_rect rect{a.rect[0], a.rect[1], a.rect[2], a.rect[3]};
  ppii_solver_report rep{};
  const ppii_status st = ppii_run_blend(a.source.c_str(), a.target.c_str(), rect, a.alpha, a.gain,
                                        parse_backend(a.backend), a.no_normalize ? 0 : 1, a.out.c_str(), &rep);
  if (st == PPII_OK) std::printf("residual %.3e  wall time %.3f ms\n", rep.residual_norm, rep.wall_time * 1e3);
  return report(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic Poisson image interpolation: anomaly synthesis and localisation metrics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ppii_version()));

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate anomaly bundles for every image in a folder");
  g->add_option("--config", gen.config, "Configuration file")->check(CLI::ExistingFile);
  g->add_option("--input", gen.input, "Input image directory")->required();
  g->add_option("--output", gen.output, "Output directory")->required();
  g->add_option("--seed", gen.seed, "Master seed")->required();
  g->add_option("--workers", gen.workers, "Worker threads (default: config value)");
  g->add_option("--pattern", gen.pattern, "File name glob (default: *.png)");

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "Score predictions against ground-truth masks");
  e->add_option("--pred", ev.pred, "Prediction directory")->required();
  e->add_option("--gt", ev.gt, "Ground-truth directory")->required();
  e->add_option("--report", ev.report_path, "JSON report path")->required();
  e->add_option("--config", ev.config, "Configuration file")->check(CLI::ExistingFile);
  e->add_option("--pattern", ev.pattern, "File name glob");

  BlendArgs bl;
  auto* b = app.add_subcommand("blend", "Blend one patch of a source image into a target image");
  b->add_option("--source", bl.source, "Source image")->required();
  b->add_option("--target", bl.target, "Target image")->required();
  b->add_option("--rect", bl.rect, "Patch rectangle x,y,w,h")->required()->delimiter(',')->expected(4);
  b->add_option("--alpha", bl.alpha, "Interpolation factor in [0,1]")->required();
  b->add_option("--gain", bl.gain, "Source gradient gain (>= 1)")->required();
  b->add_option("--out", bl.out, "Output image")->required();
  b->add_option("--backend", bl.backend, "Solver backend")->check(CLI::IsMember({"dst", "direct", "cg"}));
  b->add_flag("--no-normalize", bl.no_normalize, "Use the decoded values as they are");

  std::string eq_in, eq_out;
  std::size_t eq_bins = 256;
  auto* q = app.add_subcommand("equalize", "Histogram-equalise one image");
  q->add_option("--input", eq_in, "Input image")->required();
  q->add_option("--output", eq_out, "Output image")->required();
  q->add_option("--bins", eq_bins, "Histogram bins");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  if (g->parsed()) return run_generate(gen);
  if (e->parsed()) return run_evaluate(ev);
  if (b->parsed()) return run_blend(bl);
  return report(ppii_run_equalize(eq_in.c_str(), eq_out.c_str(), eq_bins));
}
