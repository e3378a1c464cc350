// Copyright 2026 The ovdbench Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ovd/datamodel.hpp"
#include "ovd/errors.hpp"
#include "ovd/json_io.hpp"
#include "ovd/log.hpp"
#include "ovd/manifest.hpp"
#include "ovd/metrics.hpp"
#include "ovd/postprocess.hpp"
#include "ovd/protocols.hpp"
#include "ovd/splitting.hpp"
#include "ovd/synth.hpp"
#include "ovd/version.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitValidation = 2;

struct CommonArgs {
  std::string dataset;
  std::string predictions;
  std::string out_dir = ".";
  uint64_t seed = 0;
  int jobs = 1;
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

ovd::RunManifest make_manifest(const std::string& command,
                               const std::map<std::string, std::string>& flags,
                               const std::map<std::string, std::string>& inputs,
                               uint64_t seed) {
  ovd::RunManifest m;
  m.command = command;
  m.flags = flags;
  for (const auto& [name, path] : inputs) {
    m.input_digests[name] = ovd::file_digest(path);
  }
  m.seed = seed;
  m.version = std::string(ovd::kToolName) + " " + ovd::kVersion;
  return m;
}

void write_json_output(const fs::path& path, nlohmann::json j,
                       const ovd::RunManifest& manifest) {
  j["manifest"] = manifest.to_json();
  ovd::write_text_file(path, ovd::canonical_dump(j) + "\n");
}

void write_text_output(const fs::path& path, const std::string& body,
                       const ovd::RunManifest& manifest) {
  ovd::write_text_file(
      path, "# manifest " + ovd::canonical_dump(manifest.to_json()) + "\n" + body);
}

std::pair<double, double> parse_size(const std::string& text,
                                     const std::string& flag) {
  const auto x = text.find('x');
  if (x == std::string::npos) {
    throw ovd::InvalidArgumentError(flag + ": expected WxH, got \"" + text +
                                    "\"");
  }
  try {
    return {std::stod(text.substr(0, x)), std::stod(text.substr(x + 1))};
  } catch (const std::exception&) {
    throw ovd::InvalidArgumentError(flag + ": expected WxH, got \"" + text +
                                    "\"");
  }
}

std::array<double, 3> parse_ratios(const std::string& text) {
  std::array<double, 3> parts{};
  size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const size_t next = text.find(':', pos);
    if ((i < 2) == (next == std::string::npos)) {
      throw ovd::InvalidArgumentError("--ratios: expected a:b:c, got \"" +
                                      text + "\"");
    }
    try {
      parts[static_cast<size_t>(i)] =
          std::stod(text.substr(pos, next == std::string::npos ? std::string::npos
                                                               : next - pos));
    } catch (const std::exception&) {
      throw ovd::InvalidArgumentError("--ratios: expected a:b:c, got \"" + text +
                                      "\"");
    }
    pos = next + 1;
  }
  double sum = parts[0] + parts[1] + parts[2];
  if (sum <= 0.0) {
    throw ovd::InvalidArgumentError("--ratios: values must be positive");
  }
  for (double& p : parts) p /= sum;
  return parts;
}

struct SuppressionFlags {
  std::string preset;
  double overlap_threshold = 0.8;
  std::string min_size;
  std::string max_size;
  bool nms_style = false;

  bool any_explicit() const {
    return !min_size.empty() || !max_size.empty();
  }

  ovd::SuppressionConfig resolve() const {
    ovd::SuppressionConfig cfg;
    if (!preset.empty()) {
      cfg = ovd::suppression_preset(preset);
    }
    cfg.overlap_threshold = overlap_threshold;
    if (!min_size.empty()) {
      auto [w, h] = parse_size(min_size, "--min-size");
      cfg.min_width = w;
      cfg.min_height = h;
    }
    if (!max_size.empty()) {
      auto [w, h] = parse_size(max_size, "--max-size");
      cfg.max_width = w;
      cfg.max_height = h;
    }
    cfg.nms_style = nms_style;
    return cfg;
  }

  void record(std::map<std::string, std::string>& flags) const {
    const ovd::SuppressionConfig cfg = resolve();
    if (!preset.empty()) flags["preset"] = preset;
    flags["overlap_threshold"] = format_double(cfg.overlap_threshold);
    flags["min_size"] = format_double(cfg.min_width) + "x" +
                        format_double(cfg.min_height);
    flags["max_size"] = format_double(cfg.max_width) + "x" +
                        format_double(cfg.max_height);
    if (cfg.nms_style) flags["nms_style_overlap"] = "true";
  }
};

int cmd_evaluate(const CommonArgs& common, const std::string& protocol_name,
                 const SuppressionFlags& sup, bool use_suppression,
                 bool strict_tokens, double nms_iou, double grounding_iou) {
  const ovd::Protocol protocol = ovd::protocol_from_string(protocol_name);
  const ovd::Dataset ds = ovd::load_dataset(common.dataset);

  ovd::ProtocolConfig cfg;
  cfg.variant = protocol;
  cfg.nms_iou_threshold = nms_iou;
  cfg.strict_tokens = strict_tokens;
  cfg.grounding_iou_threshold = grounding_iou;
  cfg.jobs = common.jobs;
  if (use_suppression) cfg.suppression = sup.resolve();

  std::map<std::string, std::string> flags;
  flags["dataset"] = common.dataset;
  flags["predictions"] = common.predictions;
  flags["protocol"] = protocol_name;
  flags["jobs"] = std::to_string(common.jobs);
  if (strict_tokens) flags["strict_tokens"] = "true";
  if (use_suppression) sup.record(flags);
  if (protocol == ovd::Protocol::kSupervised) {
    flags["nms_iou"] = format_double(nms_iou);
  }
  if (protocol == ovd::Protocol::kOvVg) {
    flags["grounding_iou"] = format_double(grounding_iou);
  }
  const auto manifest = make_manifest(
      "evaluate", flags,
      {{"dataset", common.dataset}, {"predictions", common.predictions}},
      common.seed);

  fs::create_directories(common.out_dir);
  const fs::path report_json = fs::path(common.out_dir) / "report.json";
  const fs::path report_txt = fs::path(common.out_dir) / "report.txt";

  if (protocol == ovd::Protocol::kOvVg) {
    const ovd::OvvgInput input = ovd::load_grounding(common.predictions, ds);
    const ovd::GroundingReport report =
        ovd::eval_ovvg(input.queries, input.answers, grounding_iou);
    write_json_output(report_json, ovd::grounding_report_to_json(report),
                      manifest);
    write_text_output(report_txt, ovd::grounding_report_to_table(report),
                      manifest);
    std::cout << "accuracy: " << format_double(report.accuracy) << "\n";
    return kExitOk;
  }

  ovd::EvalReport report;
  if (protocol == ovd::Protocol::kFgOvd) {
    const ovd::FgovdInput input = ovd::load_caption_groups(common.predictions, ds);
    int max_vocab = 0;
    for (const auto& g : input.groups) {
      max_vocab = std::max(max_vocab, g.vocabulary_id);
    }
    cfg.vocabularies = max_vocab + 1;
    report = ovd::eval_fgovd(ds, input.groups, input.scores, cfg);
  } else {
    const auto preds = ovd::load_predictions(common.predictions, ds);
    report = protocol == ovd::Protocol::kSupervised
                 ? ovd::eval_supervised(ds, preds, cfg)
                 : ovd::eval_3fovd(ds, preds, cfg);
  }
  write_json_output(report_json, ovd::report_to_json(report), manifest);
  write_text_output(report_txt, ovd::report_to_table(report), manifest);
  std::cout << "mAP: " << format_double(report.map) << "\n";
  return kExitOk;
}

int cmd_postprocess(const CommonArgs& common, const SuppressionFlags& sup) {
  const ovd::Dataset ds = ovd::load_dataset(common.dataset);
  const auto preds = ovd::load_predictions(common.predictions, ds);
  const ovd::SuppressionConfig cfg = sup.resolve();

  std::map<std::string, std::string> flags;
  flags["dataset"] = common.dataset;
  flags["predictions"] = common.predictions;
  sup.record(flags);
  const auto manifest = make_manifest(
      "postprocess", flags,
      {{"dataset", common.dataset}, {"predictions", common.predictions}},
      common.seed);

  // Suppress per (image, caption); regroup per image for aggregation.
  std::map<int64_t, std::map<int64_t, std::vector<ovd::Prediction>>> per_image;
  std::vector<ovd::Prediction> filtered;
  for (auto& [key, cell] : ovd::group_predictions(preds)) {
    auto survivors = ovd::suppress_caption(cell, cfg);
    per_image[key.first][key.second] = survivors;
    filtered.insert(filtered.end(), survivors.begin(), survivors.end());
  }

  nlohmann::json aggregated = nlohmann::json::object();
  nlohmann::json images = nlohmann::json::array();
  for (const auto& [image_id, per_caption] : per_image) {
    nlohmann::json entry;
    entry["image_id"] = image_id;
    entry["boxes"] = ovd::aggregated_to_json(ovd::aggregate_image(per_caption));
    images.push_back(std::move(entry));
  }
  aggregated["images"] = std::move(images);

  fs::create_directories(common.out_dir);
  nlohmann::json filtered_json;
  filtered_json["predictions"] = ovd::predictions_to_json(filtered);
  write_json_output(fs::path(common.out_dir) / "filtered_predictions.json",
                    std::move(filtered_json), manifest);
  write_json_output(fs::path(common.out_dir) / "aggregated.json",
                    std::move(aggregated), manifest);

  std::cout << "removed " << (preds.size() - filtered.size()) << " of "
            << preds.size() << " predictions\n";
  return kExitOk;
}

int cmd_split(const CommonArgs& common, const std::string& ratios_text,
              double gap) {
  const ovd::Dataset ds = ovd::load_dataset(common.dataset);
  const std::array<double, 3> ratios = parse_ratios(ratios_text);

  std::map<std::string, std::string> flags;
  flags["dataset"] = common.dataset;
  flags["ratios"] = ratios_text;
  flags["gap"] = format_double(gap);
  flags["seed"] = std::to_string(common.seed);
  const auto manifest = make_manifest("split", flags,
                                      {{"dataset", common.dataset}},
                                      common.seed);

  const auto clusters = ovd::temporal_clusters(ds.images, gap);
  const ovd::SplitAssignment assignment =
      ovd::split(clusters, ratios, common.seed);

  fs::create_directories(common.out_dir);
  write_json_output(fs::path(common.out_dir) / "splits.json",
                    ovd::splits_to_json(assignment, gap, common.seed),
                    manifest);

  const bool safe = ovd::leakage_free(ds.images, assignment, gap);
  std::cout << "clusters: " << assignment.cluster_count << "\n";
  for (int s = 0; s < 3; ++s) {
    static const char* names[] = {"train", "val", "test"};
    std::cout << names[s] << ": achieved "
              << format_double(assignment.achieved_ratios[static_cast<size_t>(s)])
              << " target " << format_double(ratios[static_cast<size_t>(s)])
              << "\n";
  }
  std::cout << "leakage check: " << (safe ? "pass" : "FAIL") << "\n";
  if (!safe) {
    throw ovd::Error("leakage invariant violated; this is a bug");
  }
  return kExitOk;
}

int cmd_stats(const CommonArgs& common) {
  const ovd::Dataset ds = ovd::load_dataset(common.dataset);
  std::map<std::string, std::string> flags;
  flags["dataset"] = common.dataset;
  const auto manifest =
      make_manifest("stats", flags, {{"dataset", common.dataset}}, common.seed);

  std::string csv = "class_id,image_count\n";
  for (const auto& [class_id, count] : ovd::class_distribution(ds)) {
    csv += std::to_string(class_id) + "," + std::to_string(count) + "\n";
  }
  fs::create_directories(common.out_dir);
  write_text_output(fs::path(common.out_dir) / "class_distribution.csv", csv,
                    manifest);
  std::cout << "classes with ground truth: "
            << ovd::class_distribution(ds).size() << "\n";
  return kExitOk;
}

struct SynthArgs {
  int images = 20;
  int classes = 5;
  int objects_min = 1;
  int objects_max = 4;
  int width = 640;
  int height = 480;
  int sequences = 0;
  double jitter = 0.0;
  double miss_rate = 0.0;
  double component_fp_rate = 0.0;
  double unk_rate = 0.0;
  bool relative_fp_scores = false;
};

int cmd_synth(const CommonArgs& common, const SynthArgs& args) {
  ovd::SceneSpec spec;
  spec.image_count = args.images;
  spec.class_count = args.classes;
  spec.min_objects = args.objects_min;
  spec.max_objects = args.objects_max;
  spec.image_width = args.width;
  spec.image_height = args.height;
  spec.sequence_count = args.sequences;

  ovd::MockDetectorConfig det;
  det.localization_jitter = args.jitter;
  det.miss_rate = args.miss_rate;
  det.component_fp_rate = args.component_fp_rate;
  det.unk_rate = args.unk_rate;
  det.component_score_relative = args.relative_fp_scores;
  det.seed = common.seed;

  const ovd::Dataset ds = ovd::generate_dataset(spec, common.seed);
  const auto preds = ovd::mock_detect_all(ds, det);

  std::map<std::string, std::string> flags;
  flags["images"] = std::to_string(args.images);
  flags["classes"] = std::to_string(args.classes);
  flags["objects_min"] = std::to_string(args.objects_min);
  flags["objects_max"] = std::to_string(args.objects_max);
  flags["width"] = std::to_string(args.width);
  flags["height"] = std::to_string(args.height);
  flags["sequences"] = std::to_string(args.sequences);
  flags["jitter"] = format_double(args.jitter);
  flags["miss_rate"] = format_double(args.miss_rate);
  flags["component_fp_rate"] = format_double(args.component_fp_rate);
  flags["unk_rate"] = format_double(args.unk_rate);
  if (args.relative_fp_scores) flags["relative_fp_scores"] = "true";
  flags["seed"] = std::to_string(common.seed);
  const auto manifest = make_manifest("synth", flags, {}, common.seed);

  fs::create_directories(common.out_dir);
  write_json_output(fs::path(common.out_dir) / "dataset.json",
                    ovd::dataset_to_json(ds), manifest);
  nlohmann::json preds_json;
  preds_json["predictions"] = ovd::predictions_to_json(preds);
  write_json_output(fs::path(common.out_dir) / "predictions.json",
                    std::move(preds_json), manifest);

  std::cout << "images: " << ds.images.size() << "\n"
            << "annotations: " << ds.ground_truth.size() << "\n"
            << "predictions: " << preds.size() << "\n";
  return kExitOk;
}

int cmd_validate(const CommonArgs& common) {
  const ovd::Dataset ds = ovd::load_dataset(common.dataset);
  std::cout << "dataset ok: " << ds.images.size() << " images, "
            << ds.classes.size() << " classes, " << ds.ground_truth.size()
            << " annotations\n";
  if (!common.predictions.empty()) {
    const auto preds = ovd::load_predictions(common.predictions, ds);
    std::cout << "predictions ok: " << preds.size() << " records\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Offline evaluation toolkit for open-vocabulary object detection"};
  app.set_version_flag("--version",
                       std::string(ovd::kToolName) + " " + ovd::kVersion);
  app.require_subcommand(1);

  CommonArgs common;
  SuppressionFlags sup;
  std::string protocol_name;
  std::string ratios_text;
  double gap = ovd::kDefaultTemporalGapSeconds;
  double nms_iou = 0.5;
  double grounding_iou = 0.5;
  bool strict_tokens = false;
  bool use_suppression = false;
  SynthArgs synth_args;

  auto add_common_output = [&](CLI::App* cmd) {
    cmd->add_option("--out", common.out_dir, "Output directory");
    cmd->add_option("--seed", common.seed, "Random seed");
    cmd->add_option("--jobs", common.jobs, "Worker count")
        ->check(CLI::PositiveNumber);
  };
  auto add_suppression_flags = [&](CLI::App* cmd) {
    cmd->add_option("--preset", sup.preset,
                    "Suppression preset: rp (retail products) or c (cars)");
    cmd->add_option("--overlap-threshold", sup.overlap_threshold,
                    "Overlap proportion above which a box is suppressed");
    cmd->add_option("--min-size", sup.min_size, "Minimum box size WxH");
    cmd->add_option("--max-size", sup.max_size, "Maximum box size WxH");
    cmd->add_flag("--nms-style-overlap", sup.nms_style,
                  "Suppressed boxes cannot suppress others");
  };

  CLI::App* evaluate = app.add_subcommand("evaluate", "Run an evaluation protocol");
  evaluate->add_option("--dataset", common.dataset, "dataset.json")->required();
  evaluate->add_option("--predictions", common.predictions,
                       "predictions / groups / answers file")
      ->required();
  evaluate->add_option("--protocol", protocol_name,
                       "supervised | 3fovd | fgovd | ovvg")
      ->required();
  evaluate->add_flag("--strict-tokens", strict_tokens,
                     "Reject tokens missing from their caption (3fovd)");
  evaluate->add_flag("--suppress", use_suppression,
                     "Apply per-caption suppression before scoring (3fovd)");
  evaluate->add_option("--nms-iou", nms_iou, "NMS IoU threshold (supervised)");
  evaluate->add_option("--grounding-iou", grounding_iou,
                       "Accuracy IoU threshold (ovvg)");
  add_suppression_flags(evaluate);
  add_common_output(evaluate);

  CLI::App* postprocess = app.add_subcommand(
      "postprocess", "Per-caption suppression and per-image aggregation");
  postprocess->add_option("--dataset", common.dataset, "dataset.json")->required();
  postprocess->add_option("--predictions", common.predictions, "predictions.json")
      ->required();
  add_suppression_flags(postprocess);
  add_common_output(postprocess);

  CLI::App* split = app.add_subcommand("split", "Leakage-safe split generation");
  split->add_option("--dataset", common.dataset, "dataset.json")->required();
  split->add_option("--ratios", ratios_text, "train:val:test, counts or ratios")
      ->required();
  split->add_option("--gap", gap, "Temporal gap in seconds");
  add_common_output(split);

  CLI::App* stats = app.add_subcommand("stats", "Class distribution CSV");
  stats->add_option("--dataset", common.dataset, "dataset.json")->required();
  add_common_output(stats);

  CLI::App* synth = app.add_subcommand(
      "synth", "Generate a synthetic dataset and mock predictions");
  synth->add_option("--images", synth_args.images, "Image count");
  synth->add_option("--classes", synth_args.classes, "Class count");
  synth->add_option("--objects-min", synth_args.objects_min, "Min objects per image");
  synth->add_option("--objects-max", synth_args.objects_max, "Max objects per image");
  synth->add_option("--width", synth_args.width, "Image width");
  synth->add_option("--height", synth_args.height, "Image height");
  synth->add_option("--sequences", synth_args.sequences,
                    "Video sequence count (0 = stills)");
  synth->add_option("--jitter", synth_args.jitter, "Corner noise in pixels");
  synth->add_option("--miss-rate", synth_args.miss_rate, "Miss probability");
  synth->add_option("--component-fp-rate", synth_args.component_fp_rate,
                    "Mean component boxes per detection");
  synth->add_option("--unk-rate", synth_args.unk_rate,
                    "Probability of the [UNK] token");
  synth->add_flag("--relative-fp-scores", synth_args.relative_fp_scores,
                  "Component scores as fractions of their parent score");
  add_common_output(synth);

  CLI::App* validate = app.add_subcommand("validate", "Check input files");
  validate->add_option("--dataset", common.dataset, "dataset.json")->required();
  validate->add_option("--predictions", common.predictions, "predictions.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (evaluate->parsed()) {
      return cmd_evaluate(common, protocol_name, sup, use_suppression,
                          strict_tokens, nms_iou, grounding_iou);
    }
    if (postprocess->parsed()) return cmd_postprocess(common, sup);
    if (split->parsed()) return cmd_split(common, ratios_text, gap);
    if (stats->parsed()) return cmd_stats(common);
    if (synth->parsed()) return cmd_synth(common, synth_args);
    if (validate->parsed()) return cmd_validate(common);
    std::cerr << "no subcommand given\n";
    return kExitValidation;
  } catch (const ovd::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
