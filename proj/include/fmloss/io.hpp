#pragma once

#include <iosfwd>
#include <string>

#include "fmloss/grid.hpp"

namespace fmloss {

// Grid text format: first line "H W", then H lines of W space-separated
// decimal scalars. Written with 17 significant digits so values round-trip.
Grid read_grid_text(const std::string& path);
Grid parse_grid_text(std::istream& in, const std::string& name);
void write_grid_text(const std::string& path, const Grid& g);
void print_grid_text(std::ostream& out, const Grid& g);

// Binary 8-bit PGM (P5). 0 = background, 255 = foreground; any other pixel
// value or maxval is rejected.
Mask read_mask_pgm(const std::string& path);
void write_mask_pgm(const std::string& path, const Mask& m);

}  // namespace fmloss
