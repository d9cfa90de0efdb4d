#ifndef PLANESDF_IO_HPP
#define PLANESDF_IO_HPP

// ASCII PLY and xyz-CSV readers/writers for point clouds, plus PGM/CSV
// grid exports used for stage artifacts. Formats are text-exact so golden
// files stay byte-stable.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "planesdf/errors.hpp"
#include "planesdf/grid.hpp"
#include "planesdf/point_cloud.hpp"

namespace planesdf {

enum class CloudFormat { PlyAscii, XyzCsv };

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

inline bool parse_double(const std::string& s, double& v) {
  try {
    std::size_t pos = 0;
    v = std::stod(s, &pos);
    return pos == s.size() && std::isfinite(v);
  } catch (const std::exception&) {
    return false;
  }
}

inline bool parse_long(const std::string& s, long& v) {
  try {
    std::size_t pos = 0;
    v = std::stol(s, &pos);
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

// %.9g keeps round trips below 1e-6 m for scene-scale coordinates.
inline std::string fmt_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace detail

inline PointCloud load_ply_ascii(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open for reading");

  std::string line;
  long lineno = 0;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line))
      throw ParseError(path, lineno, std::string("unexpected end of file, expected ") + what);
    ++lineno;
    line = detail::trim(line);
    return line;
  };

  if (next_line("'ply'") != "ply") throw ParseError(path, lineno, "missing 'ply' magic");
  if (next_line("format line") != "format ascii 1.0")
    throw ParseError(path, lineno, "unsupported format, expected 'format ascii 1.0'");

  long vertex_count = -1;
  std::vector<std::string> props;
  bool in_vertex_element = false;
  while (true) {
    next_line("'end_header'");
    if (line == "end_header") break;
    const auto tok = detail::split_ws(line);
    if (tok.empty() || tok[0] == "comment") continue;
    if (tok[0] == "element") {
      if (tok.size() != 3) throw ParseError(path, lineno, "malformed element line");
      if (tok[1] == "vertex") {
        if (!detail::parse_long(tok[2], vertex_count) || vertex_count < 0)
          throw ParseError(path, lineno, "bad vertex count '" + tok[2] + "'");
        in_vertex_element = true;
      } else {
        long n = 0;
        detail::parse_long(tok[2], n);
        if (n != 0)
          throw ParseError(path, lineno, "unsupported element '" + tok[1] + "'");
        in_vertex_element = false;
      }
    } else if (tok[0] == "property") {
      if (!in_vertex_element) continue;
      if (tok.size() < 3) throw ParseError(path, lineno, "malformed property line");
      if (tok[1] == "list") throw ParseError(path, lineno, "list properties are not supported");
      props.push_back(tok.back());
    } else {
      throw ParseError(path, lineno, "unrecognized header line '" + tok[0] + "'");
    }
  }
  if (vertex_count < 0) throw ParseError(path, lineno, "header lacks 'element vertex'");

  int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1, il = -1;
  for (int i = 0; i < static_cast<int>(props.size()); ++i) {
    const std::string& p = props[i];
    if (p == "x") ix = i;
    else if (p == "y") iy = i;
    else if (p == "z") iz = i;
    else if (p == "red") ir = i;
    else if (p == "green") ig = i;
    else if (p == "blue") ib = i;
    else if (p == "object_id") il = i;
  }
  if (ix < 0 || iy < 0 || iz < 0)
    throw ParseError(path, lineno, "vertex element lacks x/y/z properties");
  const bool has_rgb = ir >= 0 && ig >= 0 && ib >= 0;

  PointCloud cloud;
  cloud.points.reserve(vertex_count);
  for (long v = 0; v < vertex_count; ++v) {
    if (!std::getline(in, line))
      throw ParseError(path, lineno, "file ends after " + std::to_string(v) + " of " +
                                         std::to_string(vertex_count) + " vertices");
    ++lineno;
    const auto tok = detail::split_ws(line);
    if (tok.size() < props.size())
      throw ParseError(path, lineno, "vertex line has " + std::to_string(tok.size()) +
                                         " fields, expected " + std::to_string(props.size()));
    double x, y, z;
    if (!detail::parse_double(tok[ix], x) || !detail::parse_double(tok[iy], y) ||
        !detail::parse_double(tok[iz], z))
      throw ParseError(path, lineno, "non-numeric coordinate");
    cloud.points.emplace_back(x, y, z);
    if (has_rgb) {
      long r, g, b;
      if (!detail::parse_long(tok[ir], r) || !detail::parse_long(tok[ig], g) ||
          !detail::parse_long(tok[ib], b))
        throw ParseError(path, lineno, "non-numeric color");
      cloud.colors.push_back({static_cast<uint8_t>(r), static_cast<uint8_t>(g),
                              static_cast<uint8_t>(b)});
    }
    if (il >= 0) {
      long id;
      if (!detail::parse_long(tok[il], id))
        throw ParseError(path, lineno, "non-numeric object_id");
      cloud.labels.push_back(static_cast<int32_t>(id));
    }
  }
  return cloud;
}

inline PointCloud load_xyz_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open for reading");
  PointCloud cloud;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<std::string> fields;
    std::string cur;
    for (char c : t) {
      if (c == ',') {
        fields.push_back(detail::trim(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    fields.push_back(detail::trim(cur));
    if (fields.size() != 3 && fields.size() != 6)
      throw ParseError(path, lineno, "expected 3 or 6 comma-separated fields, got " +
                                         std::to_string(fields.size()));
    double x, y, z;
    if (!detail::parse_double(fields[0], x) || !detail::parse_double(fields[1], y) ||
        !detail::parse_double(fields[2], z))
      throw ParseError(path, lineno, "non-numeric coordinate");
    cloud.points.emplace_back(x, y, z);
    if (fields.size() == 6) {
      long r, g, b;
      if (!detail::parse_long(fields[3], r) || !detail::parse_long(fields[4], g) ||
          !detail::parse_long(fields[5], b))
        throw ParseError(path, lineno, "non-numeric color");
      cloud.colors.push_back({static_cast<uint8_t>(r), static_cast<uint8_t>(g),
                              static_cast<uint8_t>(b)});
    }
  }
  return cloud;
}

inline PointCloud load_point_cloud(const std::string& path, CloudFormat format) {
  return format == CloudFormat::PlyAscii ? load_ply_ascii(path) : load_xyz_csv(path);
}

// Picks the format from the file extension (.ply vs anything else = csv).
inline PointCloud load_point_cloud(const std::string& path) {
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  return load_point_cloud(path, ext == ".ply" ? CloudFormat::PlyAscii : CloudFormat::XyzCsv);
}

inline void save_ply_ascii(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError(path, "cannot open for writing");
  const bool rgb = cloud.has_colors();
  const bool lab = cloud.has_labels();
  out << "ply\nformat ascii 1.0\n";
  out << "element vertex " << cloud.size() << "\n";
  out << "property float x\nproperty float y\nproperty float z\n";
  if (rgb) out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  if (lab) out << "property int object_id\n";
  out << "end_header\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    out << detail::fmt_coord(p.x()) << ' ' << detail::fmt_coord(p.y()) << ' '
        << detail::fmt_coord(p.z());
    if (rgb)
      out << ' ' << int(cloud.colors[i][0]) << ' ' << int(cloud.colors[i][1]) << ' '
          << int(cloud.colors[i][2]);
    if (lab) out << ' ' << cloud.labels[i];
    out << '\n';
  }
  if (!out) throw IoError(path, "write failed");
}

inline void save_xyz_csv(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError(path, "cannot open for writing");
  const bool rgb = cloud.has_colors();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    out << detail::fmt_coord(p.x()) << ',' << detail::fmt_coord(p.y()) << ','
        << detail::fmt_coord(p.z());
    if (rgb)
      out << ',' << int(cloud.colors[i][0]) << ',' << int(cloud.colors[i][1]) << ','
          << int(cloud.colors[i][2]);
    out << '\n';
  }
  if (!out) throw IoError(path, "write failed");
}

inline void save_point_cloud(const PointCloud& cloud, const std::string& path) {
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  if (ext == ".ply")
    save_ply_ascii(cloud, path);
  else
    save_xyz_csv(cloud, path);
}

// Binary 8-bit PGM (P5).
inline void save_pgm(const Grid2<uint8_t>& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path, "cannot open for writing");
  out << "P5\n" << img.nx() << ' ' << img.ny() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data().data()),
            static_cast<std::streamsize>(img.size()));
  if (!out) throw IoError(path, "write failed");
}

template <typename T, typename Fmt>
inline void save_grid_csv(const Grid2<T>& grid, const std::string& path, Fmt fmt) {
  std::ofstream out(path);
  if (!out) throw IoError(path, "cannot open for writing");
  for (int y = 0; y < grid.ny(); ++y) {
    for (int x = 0; x < grid.nx(); ++x) {
      if (x) out << ',';
      out << fmt(grid.at(x, y));
    }
    out << '\n';
  }
  if (!out) throw IoError(path, "write failed");
}

}  // namespace planesdf

#endif  // PLANESDF_IO_HPP
