// pedfair: command-line front end for the fairness-evaluation harness.
//
//   pedfair evaluate  --gt gt.json --det det.json [--det more.json ...]
//                     --out DIR [--format csv|md|json ...] [sweep options]
//   pedfair summarize --gt gt.json [filter/angle options]
//   pedfair synth     --spec spec.json [--seed N] --out DIR
//
// Exit codes: 0 success, 1 parse/validation error, 2 I/O error.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pedfair/pedfair.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw pedfair::IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw pedfair::IoError("failed reading '" + path + "'");
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw pedfair::IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw pedfair::IoError("failed writing '" + path.string() + "'");
}

fs::path ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw pedfair::IoError("cannot create directory '" + dir + "': " + ec.message());
  return fs::path(dir);
}

struct EvaluateArgs {
  std::string gt_path;
  std::vector<std::string> det_paths;
  std::string out_dir;
  std::vector<std::string> formats;
  pedfair::SweepConfig cfg;
};

int run_evaluate(const EvaluateArgs& args) {
  const pedfair::Dataset gt = pedfair::parse_ground_truth(read_file(args.gt_path));
  std::vector<std::pair<std::string, pedfair::DetectionMap>> detectors;
  for (const auto& path : args.det_paths) {
    detectors.emplace_back(fs::path(path).stem().string(),
                           pedfair::parse_detections(read_file(path)));
  }
  const pedfair::FairnessReport report = pedfair::run_sweep(gt, detectors, args.cfg);

  for (const auto& dr : report.detectors) {
    if (dr.unknown_images > 0) {
      std::cerr << "warning: detector '" << dr.name << "' reports detections on "
                << dr.unknown_images
                << " image id(s) absent from the ground truth; counted as false positives\n";
    }
  }

  const fs::path out = ensure_dir(args.out_dir);
  std::vector<std::string> formats = args.formats;
  std::sort(formats.begin(), formats.end());
  formats.erase(std::unique(formats.begin(), formats.end()), formats.end());
  for (const auto& format : formats) {
    if (format == "csv") {
      write_file(out / "report.csv", pedfair::emit_report(report, pedfair::ReportFormat::Csv));
      write_file(out / "report_significance.csv", pedfair::emit_significance_csv(report));
      write_file(out / "report_deltas.csv", pedfair::emit_deltas_csv(report));
      std::cout << "wrote " << (out / "report.csv").string() << ", "
                << (out / "report_significance.csv").string() << ", "
                << (out / "report_deltas.csv").string() << "\n";
    } else if (format == "md") {
      write_file(out / "report.md", pedfair::emit_report(report, pedfair::ReportFormat::Markdown));
      std::cout << "wrote " << (out / "report.md").string() << "\n";
    } else {  // json (membership enforced by the option parser)
      write_file(out / "report.json", pedfair::emit_report(report, pedfair::ReportFormat::Json));
      std::cout << "wrote " << (out / "report.json").string() << "\n";
    }
  }
  return 0;
}

struct SummarizeArgs {
  std::string gt_path;
  pedfair::AngleThresholds angles;
  pedfair::FilterConfig filter;
};

int run_summarize(const SummarizeArgs& args) {
  args.angles.validate();
  const pedfair::Dataset gt = pedfair::parse_ground_truth(read_file(args.gt_path));
  const pedfair::DatasetSummary summary =
      pedfair::dataset_summary(gt, args.angles, args.filter);
  std::cout << pedfair::emit_summary_markdown(summary);
  return 0;
}

struct SynthArgs {
  std::string spec_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

int run_synth(const SynthArgs& args) {
  pedfair::synth::SynthSpec spec = pedfair::synth::parse_synth_spec(read_file(args.spec_path));
  if (args.seed_given) spec.seed = args.seed;
  const pedfair::synth::SceneOutput scene = pedfair::synth::generate_scene(spec);
  const pedfair::DetectionMap dets = pedfair::synth::plant_detections(scene, spec);

  const fs::path out = ensure_dir(args.out_dir);
  write_file(out / "gt.json", pedfair::serialize_ground_truth(scene.dataset));
  write_file(out / "det.json", pedfair::serialize_detections(dets));
  write_file(out / "manifest.json", pedfair::synth::manifest_json(spec, scene));
  std::cout << "wrote " << (out / "gt.json").string() << ", " << (out / "det.json").string()
            << ", " << (out / "manifest.json").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detector-agnostic fairness evaluation for pedestrian detection"};
  app.require_subcommand(1);

  EvaluateArgs eval_args;
  eval_args.formats = {"csv"};
  CLI::App* eval = app.add_subcommand("evaluate", "Run the threshold sweep and write reports");
  eval->add_option("--gt", eval_args.gt_path, "Ground-truth GT-JSON file")->required();
  eval->add_option("--det", eval_args.det_paths,
                   "Detection DET-JSON file; repeat to compare detectors")
      ->required();
  eval->add_option("--out", eval_args.out_dir, "Output directory")->required();
  eval->add_option("--format", eval_args.formats, "Report format: csv, md, json (repeatable)")
      ->check(CLI::IsMember({"csv", "md", "json"}));
  eval->add_option("--thresholds", eval_args.cfg.thresholds,
                   "Comma-separated confidence thresholds")
      ->delimiter(',');
  eval->add_option("--iou", eval_args.cfg.match.iou_threshold, "IoU matching threshold");
  eval->add_option("--min-height", eval_args.cfg.filter.min_height_px,
                   "Drop instances whose box height is at or below this (px)");
  eval->add_option("--size-split", eval_args.cfg.filter.size_split_px,
                   "Instances at or above this height are 'large' (px)");
  eval->add_option("--gamma", eval_args.cfg.angles.knee_flexion_deg,
                   "Knee-flexion threshold (deg)");
  eval->add_option("--alpha", eval_args.cfg.angles.hip_ankle_sep_deg,
                   "Hip-ankle separation threshold (deg)");
  eval->add_option("--elbow", eval_args.cfg.angles.elbow_bend_deg,
                   "Elbow-bend threshold (deg)");
  eval->add_option("--threads", eval_args.cfg.threads, "Worker threads (output-identical)");

  SummarizeArgs summ_args;
  CLI::App* summ = app.add_subcommand("summarize", "Print the dataset attribute distributions");
  summ->add_option("--gt", summ_args.gt_path, "Ground-truth GT-JSON file")->required();
  summ->add_option("--min-height", summ_args.filter.min_height_px,
                   "Drop instances whose box height is at or below this (px)");
  summ->add_option("--size-split", summ_args.filter.size_split_px,
                   "Instances at or above this height are 'large' (px)");
  summ->add_option("--gamma", summ_args.angles.knee_flexion_deg, "Knee-flexion threshold (deg)");
  summ->add_option("--alpha", summ_args.angles.hip_ankle_sep_deg,
                   "Hip-ankle separation threshold (deg)");
  summ->add_option("--elbow", summ_args.angles.elbow_bend_deg, "Elbow-bend threshold (deg)");

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic scene + detections");
  synth->add_option("--spec", synth_args.spec_path, "Scene spec JSON file")->required();
  CLI::Option* seed_opt = synth->add_option("--seed", synth_args.seed, "Override the spec seed");
  synth->add_option("--out", synth_args.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the usage error
    return 1;
  }
  synth_args.seed_given = seed_opt->count() > 0;

  try {
    if (eval->parsed()) return run_evaluate(eval_args);
    if (summ->parsed()) return run_summarize(summ_args);
    return run_synth(synth_args);
  } catch (const pedfair::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const pedfair::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
