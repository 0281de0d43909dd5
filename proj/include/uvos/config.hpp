#pragma once

#include <filesystem>
#include <string>

#include "uvos/pipeline.hpp"

namespace uvos {

// "key = value" lines with '#' comments; unknown keys are rejected and every
// value is validated against its field's invariant. Defaults match the
// fixed parameter set (alpha=1, lambda_o=20, lambda_m=35, na_frac=0.8,
// beta=0.8, iou_converge=0.9).
PipelineConfig parse_config_text(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& file);

void validate_config(const PipelineConfig& cfg);

}  // namespace uvos
