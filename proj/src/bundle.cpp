#include "uvos/bundle.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "uvos/io.hpp"

namespace uvos {

std::string frame_name(const char* prefix, int index, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%04d%s", prefix, index, ext);
  return buf;
}

namespace {

std::map<std::string, long> read_meta(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw FormatError("bundle: cannot open " + file.string());
  std::map<std::string, long> kv;
  std::string key;
  long value = 0;
  while (in >> key >> value) kv[key] = value;
  return kv;
}

long meta_get(const std::map<std::string, long>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw FormatError("bundle: meta.txt missing '" + key + "'");
  if (it->second <= 0) throw FormatError("bundle: meta '" + key + "' must be positive");
  return it->second;
}

}  // namespace

VideoBundle load_bundle(const std::filesystem::path& dir) {
  const auto kv = read_meta(dir / "meta.txt");
  VideoBundle b;
  b.frames = static_cast<int>(meta_get(kv, "frames"));
  b.rows = meta_get(kv, "height");
  b.cols = meta_get(kv, "width");
  b.channels = static_cast<int>(meta_get(kv, "channels"));
  b.dsim = static_cast<int>(meta_get(kv, "dsim"));
  if (b.frames < 2) throw FormatError("bundle: need at least 2 frames");

  auto check_stack = [&](const Tensor& t, const char* what, Eigen::Index want_channels) {
    if (t.rank() != 3 || (want_channels > 0 && t.channels() != want_channels) ||
        t.rows() != b.rows || t.cols() != b.cols)
      throw FormatError(std::string("bundle: bad shape in ") + what);
  };

  for (int f = 0; f < b.frames; ++f) {
    Tensor resp = load_tensor(dir / frame_name("resp_", f, ".sgt"));
    check_stack(resp, "response stack", b.channels);
    b.resp.push_back(std::move(resp));

    Tensor fm = load_tensor(dir / frame_name("featmine_", f, ".sgt"));
    check_stack(fm, "mining feature stack", 0);
    b.feat_mine.push_back(std::move(fm));

    Tensor fs = load_tensor(dir / frame_name("featsim_", f, ".sgt"));
    check_stack(fs, "similarity feature stack", b.dsim);
    b.feat_sim.push_back(std::move(fs));
  }
  for (int f = 0; f + 1 < b.frames; ++f) {
    FlowField flow = load_flo(dir / frame_name("flow_", f, ".flo"));
    if (flow.height() != b.rows || flow.width() != b.cols)
      throw FormatError("bundle: flow dimension mismatch");
    b.flows.push_back(std::move(flow));
  }
  return b;
}

void save_bundle(const VideoBundle& b, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream meta(dir / "meta.txt");
  if (!meta) throw FormatError("bundle: cannot write meta.txt");
  meta << "frames " << b.frames << "\n"
       << "height " << b.rows << "\n"
       << "width " << b.cols << "\n"
       << "channels " << b.channels << "\n"
       << "dsim " << b.dsim << "\n";
  meta.close();
  for (int f = 0; f < b.frames; ++f) {
    save_tensor(b.resp[f], dir / frame_name("resp_", f, ".sgt"));
    save_tensor(b.feat_mine[f], dir / frame_name("featmine_", f, ".sgt"));
    save_tensor(b.feat_sim[f], dir / frame_name("featsim_", f, ".sgt"));
  }
  for (int f = 0; f + 1 < b.frames; ++f)
    save_flo(b.flows[f], dir / frame_name("flow_", f, ".flo"));
}

}  // namespace uvos
