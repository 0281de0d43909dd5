#pragma once

#include <filesystem>
#include <vector>

#include "uvos/tensor.hpp"
#include "uvos/types.hpp"

namespace uvos {

// On-disk ingestion unit: per-frame response stacks [C_s,H,W], mining and
// similarity feature stacks, and M-1 flow fields, described by meta.txt
// ("frames M" / "height H" / "width W" / "channels C" / "dsim D").
struct VideoBundle {
  int frames = 0;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  int channels = 0;
  int dsim = 0;

  std::vector<Tensor> resp;       // [C_s, H, W] per frame
  std::vector<Tensor> feat_mine;  // [D_mine, H, W] per frame
  std::vector<Tensor> feat_sim;   // [D_sim, H, W] per frame
  std::vector<FlowField> flows;   // frames - 1 fields
};

VideoBundle load_bundle(const std::filesystem::path& dir);
void save_bundle(const VideoBundle& b, const std::filesystem::path& dir);

std::string frame_name(const char* prefix, int index, const char* ext);

}  // namespace uvos
