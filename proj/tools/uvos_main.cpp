#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uvos/config.hpp"
#include "uvos/harness.hpp"
#include "uvos/io.hpp"
#include "uvos/pipeline.hpp"

namespace {

uvos::PipelineConfig read_config(const std::string& path, int threads) {
  uvos::PipelineConfig cfg;
  if (!path.empty()) cfg = uvos::load_config(path);
  cfg.threads = threads;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unseen-object video segmentation on precomputed backbone outputs"};
  app.require_subcommand(1);

  int threads = 1;
  app.add_option("--threads", threads, "worker thread cap for per-frame stages");

  // saliency
  auto* saliency_cmd = app.add_subcommand("saliency", "motion saliency map from a .flo file");
  std::string flow_path, saliency_out;
  saliency_cmd->add_option("--flow", flow_path, ".flo input")->required();
  saliency_cmd->add_option("--out", saliency_out, "output .sgt map")->required();

  // mine
  auto* mine_cmd = app.add_subcommand("mine", "select object-like segments from a bundle");
  std::string mine_bundle, mine_config, mine_weights, mine_out;
  mine_cmd->add_option("--bundle", mine_bundle, "bundle directory")->required();
  mine_cmd->add_option("--config", mine_config, "config file");
  mine_cmd->add_option("--weights", mine_weights, "transfer weights .sgt")->required();
  mine_cmd->add_option("--out", mine_out, "selection output file")->required();

  // init-weights
  auto* init_cmd = app.add_subcommand("init-weights", "similarity-based weight initialization");
  std::string init_bundle, init_gallery, init_out;
  init_cmd->add_option("--bundle", init_bundle, "bundle directory")->required();
  init_cmd->add_option("--gallery", init_gallery, "gallery directory")->required();
  init_cmd->add_option("--out", init_out, "output weights .sgt")->required();

  // run
  auto* run_cmd = app.add_subcommand("run", "full mining/training loop");
  std::string run_bundle, run_gallery, run_config, run_out;
  int run_category = -1;
  run_cmd->add_option("--bundle", run_bundle, "bundle directory")->required();
  auto* gal_opt = run_cmd->add_option("--gallery", run_gallery, "gallery directory");
  auto* cat_opt = run_cmd->add_option("--category", run_category, "known category index");
  gal_opt->excludes(cat_opt);
  cat_opt->excludes(gal_opt);
  run_cmd->add_option("--config", run_config, "config file");
  run_cmd->add_option("--out", run_out, "output directory")->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "per-frame IoU report");
  std::string eval_pred, eval_gt;
  eval_cmd->add_option("--pred", eval_pred, "prediction directory")->required();
  eval_cmd->add_option("--gt", eval_gt, "ground-truth directory")->required();

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic scenario");
  uvos::SynthParams params;
  std::string synth_out, synth_size;
  std::uint64_t synth_seed = 7;
  synth_cmd->add_option("--seed", synth_seed, "scenario seed")->required();
  synth_cmd->add_option("--out", synth_out, "output directory")->required();
  synth_cmd->add_option("--frames", params.frames, "frame count");
  synth_cmd->add_option("--size", synth_size, "frame size HxW, e.g. 64x64");
  synth_cmd->add_option("--channels", params.channels, "seen category count");
  synth_cmd->add_option("--distractors", params.distractors, "static distractor blob count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*saliency_cmd) {
      const uvos::FlowField flow = uvos::load_flo(flow_path);
      uvos::save_tensor(uvos::Tensor::from_plane(uvos::motion_saliency(flow)), saliency_out);
    } else if (*mine_cmd) {
      const uvos::PipelineConfig cfg = read_config(mine_config, threads);
      const uvos::VideoBundle bundle = uvos::load_bundle(mine_bundle);
      const uvos::TransferWeights theta = uvos::load_weights(mine_weights);
      const auto saliency = uvos::bundle_saliency(bundle, cfg);
      std::vector<uvos::PlaneXd> prob;
      prob.reserve(bundle.resp.size());
      for (const uvos::Tensor& stack : bundle.resp)
        prob.push_back(uvos::forward(stack, theta).prob);
      const uvos::ProposalSet proposals =
          uvos::extract_proposals(prob, bundle.feat_mine, bundle.feat_sim, saliency, cfg.extract);
      uvos::Selection sel;
      if (proposals.size() > 0)
        sel = uvos::greedy_select(proposals, uvos::similarity_matrix(proposals), cfg.mining);
      std::ofstream out(mine_out);
      if (!out) throw uvos::FormatError("cannot open " + mine_out + " for writing");
      uvos::write_selection(sel, out);
    } else if (*init_cmd) {
      const uvos::VideoBundle bundle = uvos::load_bundle(init_bundle);
      const uvos::SourceGallery gallery = uvos::load_gallery(init_gallery);
      std::vector<uvos::VecXd> frames;
      frames.reserve(bundle.feat_sim.size());
      for (const uvos::Tensor& stack : bundle.feat_sim)
        frames.push_back(uvos::pooled_frame_vector(stack, nullptr));
      uvos::save_weights(uvos::init_weights(frames, gallery), init_out);
    } else if (*run_cmd) {
      if (gal_opt->count() == 0 && cat_opt->count() == 0)
        throw CLI::RequiredError("one of --gallery / --category");
      const uvos::PipelineConfig cfg = read_config(run_config, threads);
      const uvos::VideoBundle bundle = uvos::load_bundle(run_bundle);
      uvos::SourceGallery gallery;
      const bool use_gallery = gal_opt->count() > 0;
      if (use_gallery) gallery = uvos::load_gallery(run_gallery);
      const uvos::PipelineResult result = uvos::run_pipeline(
          bundle, use_gallery ? &gallery : nullptr, use_gallery ? -1 : run_category, cfg);
      uvos::save_outputs(result, run_out);
      if (!result.warning.empty()) std::cerr << "warning: " << result.warning << "\n";
    } else if (*eval_cmd) {
      std::cout << uvos::format_report(uvos::video_report(eval_pred, eval_gt));
    } else if (*synth_cmd) {
      params.seed = synth_seed;
      if (!synth_size.empty()) {
        long h = 0, w = 0;
        if (std::sscanf(synth_size.c_str(), "%ldx%ld", &h, &w) != 2 || h <= 0 || w <= 0)
          throw uvos::FormatError("--size must look like 64x64");
        params.rows = h;
        params.cols = w;
      }
      uvos::write_scenario(uvos::gen_scenario(params), synth_out);
    }
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
