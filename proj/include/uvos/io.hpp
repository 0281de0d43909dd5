#pragma once

#include <filesystem>
#include <iosfwd>

#include "uvos/tensor.hpp"
#include "uvos/types.hpp"

namespace uvos {

// "SGT1" container: magic, u32-LE rank, rank x u32-LE extents, then
// product(dims) IEEE-754 32-bit LE values in row-major order. In-memory
// doubles are narrowed to 32 bits on write.
void write_tensor(const Tensor& t, std::ostream& sink);
Tensor read_tensor(std::istream& source);

// Middlebury .flo: f32-LE 202021.25 magic, i32-LE width and height, then
// height x width interleaved (u, v) f32-LE pairs.
void write_flo(const FlowField& f, std::ostream& sink);
FlowField read_flo(std::istream& source);

// Binary PGM, header "P5\n<w> <h>\n255\n", one byte per pixel. Foreground
// writes 255 and background 0; on read any byte >= 128 is foreground.
void write_pgm_mask(const Mask& m, std::ostream& sink);
Mask read_pgm_mask(std::istream& source);

void save_tensor(const Tensor& t, const std::filesystem::path& file);
Tensor load_tensor(const std::filesystem::path& file);
void save_flo(const FlowField& f, const std::filesystem::path& file);
FlowField load_flo(const std::filesystem::path& file);
void save_pgm_mask(const Mask& m, const std::filesystem::path& file);
Mask load_pgm_mask(const std::filesystem::path& file);

}  // namespace uvos
