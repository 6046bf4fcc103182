#include "hmcf/csv_io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hmcf/errors.hpp"

namespace hmcf {

std::string format_double(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& header, int precision)
    : path_(path), precision_(precision) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  buffer_ = header;
  buffer_ += '\n';
}

CsvWriter::~CsvWriter() {
  std::ofstream out(path_, std::ios::binary);
  out << buffer_;
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k > 0) buffer_ += ',';
    buffer_ += cells[k];
  }
  buffer_ += '\n';
}

void CsvWriter::numeric_row(const std::vector<double>& cells) {
  std::vector<std::string> s;
  s.reserve(cells.size());
  for (double v : cells) s.push_back(format_double(v, precision_));
  row(s);
}

void write_mesh_snapshot(const std::filesystem::path& path, const Immersion& im) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write mesh file: " + path.string());
  const Grid& g = im.grid;
  out << "# hmcf-mesh dim=" << g.dim << " shape=" << g.count[0];
  if (g.dim > 1) out << "," << g.count[1];
  out << "\n";
  out << "# meta ambient=" << im.ambient;
  for (int a = 0; a < g.dim; ++a) {
    out << " axis" << a << "=" << format_double(g.spacing[a]) << ","
        << format_double(g.origin[a]) << "," << (g.periodic[a] ? 1 : 0) << "," << g.pad[a] << ","
        << format_double(g.wrap_shift[a].x) << "," << format_double(g.wrap_shift[a].y) << ","
        << format_double(g.wrap_shift[a].z);
  }
  out << "\n";
  for (const Vec3& p : im.points) {
    out << "v " << format_double(p.x) << " " << format_double(p.y);
    if (im.ambient == 3) out << " " << format_double(p.z);
    out << "\n";
  }
}

Immersion read_mesh_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot read mesh file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DomainError("empty mesh file");
  Immersion im;
  Grid& g = im.grid;
  {
    int dim = 0, n1 = 0, n2 = 0;
    if (std::sscanf(line.c_str(), "# hmcf-mesh dim=%d shape=%d,%d", &dim, &n1, &n2) < 2) {
      throw DomainError("bad mesh header: " + line);
    }
    g.dim = dim;
    g.count[0] = n1;
    g.count[1] = dim > 1 ? n2 : 1;
  }
  if (!std::getline(in, line) || line.rfind("# meta", 0) != 0) {
    throw DomainError("missing mesh meta line");
  }
  {
    std::stringstream ss(line.substr(6));
    std::string tok;
    while (ss >> tok) {
      if (tok.rfind("ambient=", 0) == 0) {
        im.ambient = std::atoi(tok.c_str() + 8);
      } else if (tok.rfind("axis", 0) == 0) {
        const int a = tok[4] - '0';
        const char* body = std::strchr(tok.c_str(), '=');
        if (body == nullptr || a < 0 || a > 1) throw DomainError("bad axis meta: " + tok);
        double sp, org, sx, sy, sz;
        int per, pad;
        if (std::sscanf(body + 1, "%lf,%lf,%d,%d,%lf,%lf,%lf", &sp, &org, &per, &pad, &sx, &sy,
                        &sz) != 7) {
          throw DomainError("bad axis meta: " + tok);
        }
        g.spacing[a] = sp;
        g.origin[a] = org;
        g.periodic[a] = per != 0;
        g.pad[a] = pad;
        g.wrap_shift[a] = Vec3{sx, sy, sz};
      }
    }
  }
  im.points.reserve(g.size());
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    double x = 0, y = 0, z = 0;
    const int got = std::sscanf(line.c_str(), "v %lf %lf %lf", &x, &y, &z);
    if (got < 2) throw DomainError("bad vertex line: " + line);
    im.points.push_back(Vec3{x, y, z});
  }
  if (static_cast<int>(im.points.size()) != g.size()) {
    throw DomainError("mesh point count does not match shape");
  }
  return im;
}

}  // namespace hmcf
