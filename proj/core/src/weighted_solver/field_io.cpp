#include "fbnl/field_io.hpp"

#include "fbnl/error.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace fbnl {

namespace {

constexpr const char* kMagic = "fbnl-field 1";

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void write_field(std::ostream& os, const Field& field)
{
    if (!field.grid)
        throw ParameterError("write_field: field has no grid");
    const Grid2D& g = *field.grid;
    os << kMagic << '\n';
    os << "nx " << g.nx << '\n' << "ny " << g.ny << '\n';
    os << "Lx " << num(g.Lx()) << '\n' << "Ly " << num(g.Ly) << '\n' << "q " << num(g.q) << '\n';
    os << "s " << num(g.params.s) << '\n' << "gamma " << num(g.params.gamma) << '\n';
    os << "xcenter " << num(g.x_center()) << '\n';
    os << "values\n";
    for (double v : field.values)
        os << num(v) << '\n';
}

void write_field(const std::string& path, const Field& field)
{
    std::ofstream os(path);
    if (!os)
        throw ParameterError("write_field: cannot open " + path);
    write_field(os, field);
    if (!os)
        throw ParameterError("write_field: write failed for " + path);
}

Field read_field(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != kMagic)
        throw ParameterError("read_field: missing header line '" + std::string(kMagic) + "'");
    std::map<std::string, double> h;
    while (std::getline(is, line) && line != "values") {
        std::istringstream ls(line);
        std::string key;
        double v;
        if (!(ls >> key >> v))
            throw ParameterError("read_field: malformed header line '" + line + "'");
        h[key] = v;
    }
    if (line != "values")
        throw ParameterError("read_field: missing 'values' line");
    for (const char* k : {"nx", "ny", "Lx", "Ly", "q", "s", "gamma"})
        if (!h.count(k))
            throw ParameterError(std::string("read_field: header lacks ") + k);
    const int nx = static_cast<int>(h["nx"]), ny = static_cast<int>(h["ny"]);
    if (nx != h["nx"] || ny != h["ny"])
        throw ParameterError("read_field: nx and ny must be integers");
    const double xc = h.count("xcenter") ? h["xcenter"] : 0.0;
    auto grid = std::make_shared<const Grid2D>(build_grid_range(
        nx, ny, xc - h["Lx"], xc + h["Lx"], h["Ly"], h["q"], derive_exponents(h["s"], h["gamma"])));
    Field f(grid);
    for (double& v : f.values) {
        if (!std::getline(is, line))
            throw ParameterError("read_field: too few node values");
        char* end = nullptr;
        v = std::strtod(line.c_str(), &end);
        if (end == line.c_str() || !std::isfinite(v))
            throw ParameterError("read_field: bad node value '" + line + "'");
    }
    return f;
}

Field read_field(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw ParameterError("read_field: cannot open " + path);
    return read_field(is);
}

} // namespace fbnl
