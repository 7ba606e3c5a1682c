#include "elastimesh/errors.hpp"
#include "elastimesh/meshcore.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace elastimesh {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

namespace {

std::string format_float(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, static_cast<float>(v));
    return {buf, res.ptr};
}

template <class Writer>
void write_file(const std::string& path, Writer&& w) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, "cannot open for writing");
    w(out);
    out.flush();
    if (!out) throw IoError(path, "write failed");
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

template <class T>
bool parse_pair(std::string_view line, T& a, T& b) {
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) return false;
    return parse_number(line.substr(0, comma), a) && parse_number(line.substr(comma + 1), b);
}

}  // namespace

void write_vtk(const StructuredMesh& m, std::ostream& out) {
    out << "# vtk DataFile Version 3.0\n";
    out << "elastimesh structured mesh (" << provenance_name(m.provenance()) << ")\n";
    out << "ASCII\n";
    out << "DATASET STRUCTURED_GRID\n";
    out << "DIMENSIONS " << m.ni() << ' ' << m.nj() << " 1\n";
    out << "POINTS " << m.size() << " float\n";
    for (const auto& p : m.coords()) out << format_float(p.x) << ' ' << format_float(p.y) << " 0\n";
}

void export_vtk(const StructuredMesh& m, const std::string& path) {
    write_file(path, [&](std::ostream& o) { write_vtk(m, o); });
}

void write_mesh_csv(const StructuredMesh& m, std::ostream& out) {
    out << m.ni() << ',' << m.nj() << '\n';
    for (const auto& p : m.coords()) out << format_double(p.x) << ',' << format_double(p.y) << '\n';
}

void export_csv(const StructuredMesh& m, const std::string& path) {
    write_file(path, [&](std::ostream& o) { write_mesh_csv(m, o); });
}

StructuredMesh read_mesh_csv(std::istream& in, const std::string& source) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(source, 1, "empty file, expected `ni,nj`");
    std::size_t ni = 0, nj = 0;
    if (!parse_pair(line, ni, nj) || ni < 2 || nj < 2)
        throw ParseError(source, 1, "bad header, expected `ni,nj` with ni,nj >= 2");

    std::vector<Point2> coords;
    coords.reserve(ni * nj);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        if (coords.size() == ni * nj)
            throw ParseError(source, lineno,
                             "more nodes than the header's " + std::to_string(ni) + "x" +
                                 std::to_string(nj));
        Point2 p;
        if (!parse_pair(line, p.x, p.y)) throw ParseError(source, lineno, "expected `x,y`");
        coords.push_back(p);
    }
    if (coords.size() != ni * nj)
        throw ParseError(source, lineno + 1,
                         "truncated: " + std::to_string(coords.size()) + " of " +
                             std::to_string(ni * nj) + " nodes");
    return StructuredMesh(ni, nj, std::move(coords), Provenance::tfi);
}

StructuredMesh import_mesh_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open mesh file");
    return read_mesh_csv(in, path);
}

}  // namespace elastimesh
