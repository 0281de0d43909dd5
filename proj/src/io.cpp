#include "uvos/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace uvos {

namespace {

constexpr char kTensorMagic[4] = {'S', 'G', 'T', '1'};
constexpr float kFloMagic = 202021.25f;  // spells "PIEH" in LE bytes
constexpr Eigen::Index kMaxElements = Eigen::Index{1} << 30;

void put_u32le(std::ostream& s, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  s.write(b, 4);
}

std::uint32_t get_u32le(std::istream& s, const char* field) {
  unsigned char b[4];
  if (!s.read(reinterpret_cast<char*>(b), 4))
    throw FormatError(std::string("truncated ") + field);
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
         (std::uint32_t(b[3]) << 24);
}

void put_f32le(std::ostream& s, float v) { put_u32le(s, std::bit_cast<std::uint32_t>(v)); }

float get_f32le(std::istream& s, const char* field) {
  return std::bit_cast<float>(get_u32le(s, field));
}

std::int32_t get_i32le(std::istream& s, const char* field) {
  return static_cast<std::int32_t>(get_u32le(s, field));
}

}  // namespace

void write_tensor(const Tensor& t, std::ostream& sink) {
  sink.write(kTensorMagic, 4);
  put_u32le(sink, static_cast<std::uint32_t>(t.rank()));
  for (Eigen::Index d : t.dims()) put_u32le(sink, static_cast<std::uint32_t>(d));
  const double* p = t.data();
  for (Eigen::Index i = 0; i < t.size(); ++i) put_f32le(sink, static_cast<float>(p[i]));
  if (!sink) throw FormatError("tensor: write failed");
}

Tensor read_tensor(std::istream& source) {
  char magic[4];
  if (!source.read(magic, 4) || std::memcmp(magic, kTensorMagic, 4) != 0)
    throw FormatError("tensor: bad magic");
  const std::uint32_t rank = get_u32le(source, "tensor rank");
  if (rank < 1 || rank > 3)
    throw FormatError("tensor: rank " + std::to_string(rank) + " out of range");
  std::vector<Eigen::Index> dims(rank);
  Eigen::Index total = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    const std::uint32_t e = get_u32le(source, "tensor extent");
    if (e == 0) throw FormatError("tensor: zero extent[" + std::to_string(i) + "]");
    dims[i] = static_cast<Eigen::Index>(e);
    total *= dims[i];
    if (total > kMaxElements) throw FormatError("tensor: extent product too large");
  }
  Tensor t(dims);
  double* p = t.data();
  for (Eigen::Index i = 0; i < total; ++i)
    p[i] = static_cast<double>(get_f32le(source, "tensor payload"));
  return t;
}

void write_flo(const FlowField& f, std::ostream& sink) {
  if (f.u.rows() != f.v.rows() || f.u.cols() != f.v.cols())
    throw std::invalid_argument("flo: u/v shape mismatch");
  put_f32le(sink, kFloMagic);
  put_u32le(sink, static_cast<std::uint32_t>(f.width()));
  put_u32le(sink, static_cast<std::uint32_t>(f.height()));
  for (Eigen::Index r = 0; r < f.height(); ++r)
    for (Eigen::Index c = 0; c < f.width(); ++c) {
      put_f32le(sink, static_cast<float>(f.u(r, c)));
      put_f32le(sink, static_cast<float>(f.v(r, c)));
    }
  if (!sink) throw FormatError("flo: write failed");
}

FlowField read_flo(std::istream& source) {
  const float magic = get_f32le(source, "flo magic");
  if (magic != kFloMagic) throw FormatError("flo: bad magic");
  const std::int32_t w = get_i32le(source, "flo width");
  const std::int32_t h = get_i32le(source, "flo height");
  if (w <= 0 || h <= 0) throw FormatError("flo: nonpositive dimensions");
  if (Eigen::Index(w) * Eigen::Index(h) > kMaxElements)
    throw FormatError("flo: dimensions too large");
  FlowField f{PlaneXd(h, w), PlaneXd(h, w)};
  for (Eigen::Index r = 0; r < h; ++r)
    for (Eigen::Index c = 0; c < w; ++c) {
      f.u(r, c) = static_cast<double>(get_f32le(source, "flo payload"));
      f.v(r, c) = static_cast<double>(get_f32le(source, "flo payload"));
    }
  if (!f.u.isFinite().all() || !f.v.isFinite().all())
    throw FormatError("flo: non-finite displacement value");
  return f;
}

void write_pgm_mask(const Mask& m, std::ostream& sink) {
  sink << "P5\n" << m.cols() << " " << m.rows() << "\n255\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      sink.put(m(r, c) ? '\xff' : '\0');
  if (!sink) throw FormatError("pgm: write failed");
}

Mask read_pgm_mask(std::istream& source) {
  std::string magic;
  if (!(source >> magic) || magic != "P5") throw FormatError("pgm: bad magic");
  long w = 0, h = 0, maxval = 0;
  if (!(source >> w >> h >> maxval)) throw FormatError("pgm: truncated header");
  if (w <= 0 || h <= 0) throw FormatError("pgm: nonpositive dimensions");
  if (maxval != 255) throw FormatError("pgm: maxval must be 255");
  source.get();  // single whitespace byte between header and payload
  if (w * h > kMaxElements) throw FormatError("pgm: dimensions too large");
  std::vector<char> bytes(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  if (!source.read(bytes.data(), static_cast<std::streamsize>(bytes.size())))
    throw FormatError("pgm: truncated payload");
  Mask m(h, w);
  for (Eigen::Index r = 0; r < h; ++r)
    for (Eigen::Index c = 0; c < w; ++c)
      m(r, c) = static_cast<unsigned char>(bytes[static_cast<std::size_t>(r * w + c)]) >= 128;
  return m;
}

namespace {

std::ifstream open_in(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw FormatError("cannot open " + file.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw FormatError("cannot open " + file.string() + " for writing");
  return out;
}

}  // namespace

void save_tensor(const Tensor& t, const std::filesystem::path& file) {
  auto out = open_out(file);
  write_tensor(t, out);
}

Tensor load_tensor(const std::filesystem::path& file) {
  auto in = open_in(file);
  return read_tensor(in);
}

void save_flo(const FlowField& f, const std::filesystem::path& file) {
  auto out = open_out(file);
  write_flo(f, out);
}

FlowField load_flo(const std::filesystem::path& file) {
  auto in = open_in(file);
  return read_flo(in);
}

void save_pgm_mask(const Mask& m, const std::filesystem::path& file) {
  auto out = open_out(file);
  write_pgm_mask(m, out);
}

Mask load_pgm_mask(const std::filesystem::path& file) {
  auto in = open_in(file);
  return read_pgm_mask(in);
}

}  // namespace uvos
