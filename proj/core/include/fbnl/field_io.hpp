#pragma once

#include "fbnl/grid.hpp"

#include <iosfwd>
#include <string>

namespace fbnl {

/*! \brief Line-oriented text snapshot of a Field.
 *
 *  Header lines "key value" for nx, ny, Lx, Ly, q, s, gamma and xcenter, then
 *  the line "values" followed by the (nx+1)(ny+1) node values row-major
 *  (row j = 0 first), all at 17 significant digits. A missing xcenter reads
 *  as 0.
 */
void write_field(std::ostream& os, const Field& field);
void write_field(const std::string& path, const Field& field);

// Throws ParameterError on malformed input.
Field read_field(std::istream& is);
Field read_field(const std::string& path);

} // namespace fbnl
