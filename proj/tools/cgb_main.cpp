// Command-line front end for the causal-graph classification pipeline.
//
// Exit codes: 0 success, 1 configuration/validation error, 2 runtime stage
// failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cgb/cgb.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  bool skip_rewire = false;
  bool skip_train = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_stage_flags = true) {
  cmd->add_option("--config", args.config_path, "JSON config file; flags override file values");
  cmd->add_option("--out", args.out_dir, "output directory for artifacts");
  cmd->add_option("--seed", args.seed, "master seed; overrides the config seed");
  if (with_stage_flags) {
    cmd->add_flag("--skip-rewire", args.skip_rewire, "skip the curvature rewiring stage");
    cmd->add_flag("--skip-train", args.skip_train, "stop after graph construction");
  }
}

cgb::PipelineConfig resolve_config(const CommonArgs& args) {
  std::optional<std::filesystem::path> file;
  if (!args.config_path.empty()) file = args.config_path;
  cgb::PipelineConfig cfg = cgb::load_config(file);
  if (args.seed) cfg.seed = *args.seed;
  cgb::validate_config(cfg);
  return cfg;
}

void print_metrics(const cgb::RunResult& r) {
  if (!r.trained) {
    std::cout << "graphs written to " << r.out_dir.string() << " (training skipped)\n";
    return;
  }
  std::cout << "test f1=" << r.test_metrics.f1 << " sensitivity=" << r.test_metrics.sensitivity
            << " specificity=" << r.test_metrics.specificity;
  if (r.test_metrics.auc)
    std::cout << " auc=" << *r.test_metrics.auc;
  else
    std::cout << " auc=undefined(single-class split)";
  std::cout << "\nartifacts: " << r.out_dir.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transfer-entropy causal graphs, curvature rewiring, GCN classification"};
  app.require_subcommand(1);

  CommonArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "run the full pipeline end to end");
  add_common(run_cmd, run_args);

  CommonArgs ablate_args;
  std::string ablate_variant = "all";
  auto* ablate_cmd = app.add_subcommand("ablate", "run an ablation variant of the pipeline");
  add_common(ablate_cmd, ablate_args);
  ablate_cmd->add_option("--variant", ablate_variant,
                         "no_caugraph, no_csdrf, no_gconv, or all");

  CommonArgs sweep_args;
  std::vector<double> sweep_values{0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
  auto* sweep_cmd = app.add_subcommand("sweep-c", "run the pipeline over a grid of thresholds");
  add_common(sweep_cmd, sweep_args);
  sweep_cmd->add_option("--values", sweep_values, "ascending positive thresholds");

  CommonArgs gen_args;
  auto* gen_cmd = app.add_subcommand("gen-data", "write a synthetic dataset with a manifest");
  add_common(gen_cmd, gen_args, /*with_stage_flags=*/false);

  std::string export_what, export_in, export_out;
  double export_fraction = 0.01;
  auto* export_cmd = app.add_subcommand("export", "export plot-ready data from an artifact");
  export_cmd->add_option("--what", export_what,
                         "edges_topk, te_heatmap, curvature_report, rewiring_log")
      ->required();
  export_cmd->add_option("--in", export_in, "graph file (or rewiring log) to export from")
      ->required();
  export_cmd->add_option("--out", export_out, "output file")->required();
  export_cmd->add_option("--fraction", export_fraction, "edge fraction for edges_topk");

  CLI11_PARSE(app, argc, argv);

  bool validated = false;
  try {
    if (run_cmd->parsed()) {
      cgb::PipelineConfig cfg = resolve_config(run_args);
      validated = true;
      cgb::StageOptions stages{run_args.skip_rewire, run_args.skip_train};
      print_metrics(cgb::run_pipeline(cfg, cgb::Variant::full, run_args.out_dir, stages));
    } else if (ablate_cmd->parsed()) {
      cgb::PipelineConfig cfg = resolve_config(ablate_args);
      std::vector<cgb::Variant> variants;
      if (ablate_variant == "all")
        variants = {cgb::Variant::no_caugraph, cgb::Variant::no_csdrf, cgb::Variant::no_gconv};
      else
        variants = {cgb::parse_variant(ablate_variant)};
      validated = true;
      cgb::StageOptions stages{ablate_args.skip_rewire, ablate_args.skip_train};
      for (cgb::Variant v : variants) {
        std::filesystem::path dir =
            std::filesystem::path(ablate_args.out_dir) / cgb::variant_name(v);
        std::cout << cgb::variant_name(v) << ": ";
        print_metrics(cgb::run_pipeline(cfg, v, dir, stages));
      }
    } else if (sweep_cmd->parsed()) {
      cgb::PipelineConfig cfg = resolve_config(sweep_args);
      validated = true;
      auto rows = cgb::cmd_sweep_c(cfg, sweep_values, sweep_args.out_dir);
      std::cout << "c,edge_count,f1,best\n";
      for (const auto& row : rows)
        std::cout << row.c << ',' << row.edge_count << ',' << row.f1 << ','
                  << (row.best ? 1 : 0) << "\n";
    } else if (gen_cmd->parsed()) {
      cgb::PipelineConfig cfg = resolve_config(gen_args);
      validated = true;
      cgb::cmd_gen_data(cfg, gen_args.out_dir);
      std::cout << "dataset written to " << gen_args.out_dir << "\n";
    } else if (export_cmd->parsed()) {
      cgb::ExportKind kind = cgb::parse_export_kind(export_what);
      validated = true;
      cgb::cmd_export(kind, export_in, export_out, export_fraction);
      std::cout << "wrote " << export_out << "\n";
    }
  } catch (const cgb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return validated ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
