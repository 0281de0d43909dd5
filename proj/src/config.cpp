#include "uvos/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace uvos {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw FormatError("config: bad numeric value for '" + key + "': " + value);
  }
}

int parse_int(const std::string& key, const std::string& value) {
  const double v = parse_number(key, value);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw FormatError("config: '" + key + "' must be an integer");
  return i;
}

}  // namespace

PipelineConfig parse_config_text(const std::string& text) {
  PipelineConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError("config: line " + std::to_string(lineno) + " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw FormatError("config: line " + std::to_string(lineno) + " is not 'key = value'");

    if (key == "alpha") cfg.mining.alpha = parse_number(key, value);
    else if (key == "lambda_o") cfg.mining.lambda_o = parse_number(key, value);
    else if (key == "lambda_m") cfg.mining.lambda_m = parse_number(key, value);
    else if (key == "na_frac") cfg.mining.na_frac = parse_number(key, value);
    else if (key == "beta") cfg.mining.beta = parse_number(key, value);
    else if (key == "facility_variant") {
      if (value == "max") cfg.mining.variant = FacilityVariant::Max;
      else if (value == "sum") cfg.mining.variant = FacilityVariant::Sum;
      else throw FormatError("config: facility_variant must be 'max' or 'sum'");
    }
    else if (key == "learning_rate") cfg.train.learning_rate = parse_number(key, value);
    else if (key == "momentum") cfg.train.momentum = parse_number(key, value);
    else if (key == "epochs") cfg.train.epochs = parse_int(key, value);
    else if (key == "prob_clip_eps") cfg.train.prob_clip_eps = parse_number(key, value);
    else if (key == "tau") cfg.extract.tau = parse_number(key, value);
    else if (key == "connectivity") cfg.extract.connectivity = parse_int(key, value);
    else if (key == "min_area_frac") cfg.extract.min_area_frac = parse_number(key, value);
    else if (key == "iou_converge") cfg.iou_converge = parse_number(key, value);
    else if (key == "max_outer_iters") cfg.max_outer_iters = parse_int(key, value);
    else if (key == "refine_blend") cfg.refine_blend = parse_number(key, value);
    else if (key == "mbd_max_passes") cfg.mbd_max_passes = parse_int(key, value);
    else if (key == "mbd_tol") cfg.mbd_tol = parse_number(key, value);
    else throw FormatError("config: unknown key '" + key + "'");
  }
  validate_config(cfg);
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw FormatError("config: cannot open " + file.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

void validate_config(const PipelineConfig& cfg) {
  auto fail = [](const std::string& what) { throw FormatError("config: " + what); };
  if (cfg.mining.alpha < 0.0) fail("alpha must be >= 0");
  if (cfg.mining.lambda_o < 0.0 || cfg.mining.lambda_m < 0.0) fail("lambda weights must be >= 0");
  if (!(cfg.mining.na_frac > 0.0 && cfg.mining.na_frac <= 1.0)) fail("na_frac must be in (0, 1]");
  if (!(cfg.mining.beta > 0.0 && cfg.mining.beta < 1.0)) fail("beta must be in (0, 1)");
  if (cfg.train.learning_rate < 0.0) fail("learning_rate must be >= 0");
  if (!(cfg.train.momentum >= 0.0 && cfg.train.momentum < 1.0)) fail("momentum must be in [0, 1)");
  if (cfg.train.epochs < 1) fail("epochs must be >= 1");
  if (!(cfg.train.prob_clip_eps > 0.0 && cfg.train.prob_clip_eps < 0.5))
    fail("prob_clip_eps must be in (0, 0.5)");
  if (!(cfg.extract.tau >= 0.0 && cfg.extract.tau <= 1.0)) fail("tau must be in [0, 1]");
  if (cfg.extract.connectivity != 4 && cfg.extract.connectivity != 8)
    fail("connectivity must be 4 or 8");
  if (!(cfg.extract.min_area_frac >= 0.0 && cfg.extract.min_area_frac <= 1.0))
    fail("min_area_frac must be in [0, 1]");
  if (!(cfg.iou_converge > 0.0 && cfg.iou_converge <= 1.0)) fail("iou_converge must be in (0, 1]");
  if (cfg.max_outer_iters < 1) fail("max_outer_iters must be >= 1");
  if (!(cfg.refine_blend >= 0.0 && cfg.refine_blend <= 1.0)) fail("refine_blend must be in [0, 1]");
  if (cfg.mbd_max_passes < 1) fail("mbd_max_passes must be >= 1");
  if (!(cfg.mbd_tol >= 0.0)) fail("mbd_tol must be >= 0");
}

}  // namespace uvos
