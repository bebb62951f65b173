#include "lpcc/io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace lpcc {

namespace {

struct PlyProperty {
  std::string name;
  int byte_size = 0;  // 0 for list properties
  bool is_float = false;
  bool is_signed = false;
};

int scalar_size(const std::string& type) {
  if (type == "char" || type == "int8" || type == "uchar" || type == "uint8") return 1;
  if (type == "short" || type == "int16" || type == "ushort" || type == "uint16") return 2;
  if (type == "int" || type == "int32" || type == "uint" || type == "uint32") return 4;
  if (type == "float" || type == "float32") return 4;
  if (type == "double" || type == "float64") return 8;
  return -1;
}

bool scalar_is_float(const std::string& type) {
  return type == "float" || type == "float32" || type == "double" || type == "float64";
}

bool scalar_is_signed(const std::string& type) {
  return type == "char" || type == "int8" || type == "short" || type == "int16" ||
         type == "int" || type == "int32" || scalar_is_float(type);
}

double read_binary_scalar(const char* p, const PlyProperty& prop) {
  auto load = [&]<typename T>() {
    T v;
    std::memcpy(&v, p, sizeof(T));
    return double(v);
  };
  if (prop.is_float) {
    return prop.byte_size == 4 ? load.operator()<float>() : load.operator()<double>();
  }
  switch (prop.byte_size) {
    case 1: return prop.is_signed ? load.operator()<int8_t>() : load.operator()<uint8_t>();
    case 2: return prop.is_signed ? load.operator()<int16_t>() : load.operator()<uint16_t>();
    default: return prop.is_signed ? load.operator()<int32_t>() : load.operator()<uint32_t>();
  }
}

}  // namespace

PointCloud read_ply(const std::string& path, const ReadOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");

  // --- header ---
  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> std::string& {
    if (!std::getline(in, line))
      throw ParseError(path + ": truncated header at line " + std::to_string(line_no));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no;
    return line;
  };

  next_line();
  if (line != "ply") throw ParseError(path + ":1: not a PLY file (missing 'ply')");

  bool binary = false;
  bool have_format = false;
  size_t vertex_count = 0;
  bool in_vertex_element = false, seen_vertex_element = false;
  std::vector<PlyProperty> vertex_props;

  for (;;) {
    next_line();
    std::istringstream ss(line);
    std::string tok;
    ss >> tok;
    if (tok == "comment" || tok == "obj_info" || tok.empty()) continue;
    if (tok == "format") {
      std::string fmt, ver;
      ss >> fmt >> ver;
      if (fmt == "ascii")
        binary = false;
      else if (fmt == "binary_little_endian")
        binary = true;
      else if (fmt == "binary_big_endian")
        throw ParseError(path + ":" + std::to_string(line_no) +
                         ": unsupported endianness 'binary_big_endian'");
      else
        throw ParseError(path + ":" + std::to_string(line_no) + ": unknown format '" + fmt + "'");
      have_format = true;
    } else if (tok == "element") {
      std::string name;
      size_t count;
      if (!(ss >> name >> count))
        throw ParseError(path + ":" + std::to_string(line_no) + ": malformed element line");
      if (name == "vertex") {
        vertex_count = count;
        in_vertex_element = true;
        seen_vertex_element = true;
      } else {
        if (seen_vertex_element && in_vertex_element) in_vertex_element = false;
        if (!seen_vertex_element)
          throw ParseError(path + ":" + std::to_string(line_no) +
                           ": element '" + name + "' precedes vertex element");
        in_vertex_element = false;
      }
    } else if (tok == "property") {
      if (!in_vertex_element) continue;  // properties of trailing elements, never read
      std::string type;
      ss >> type;
      PlyProperty prop;
      if (type == "list") {
        throw ParseError(path + ":" + std::to_string(line_no) +
                         ": list property in vertex element is unsupported");
      }
      std::string name;
      ss >> name;
      int sz = scalar_size(type);
      if (sz < 0)
        throw ParseError(path + ":" + std::to_string(line_no) + ": unknown type '" + type + "'");
      prop.name = name;
      prop.byte_size = sz;
      prop.is_float = scalar_is_float(type);
      prop.is_signed = scalar_is_signed(type);
      vertex_props.push_back(prop);
    } else if (tok == "end_header") {
      break;
    } else {
      throw ParseError(path + ":" + std::to_string(line_no) + ": unexpected token '" + tok + "'");
    }
  }
  if (!have_format) throw ParseError(path + ": header missing 'format' line");
  if (!seen_vertex_element) throw ParseError(path + ": header has no vertex element");
  if (vertex_count == 0) throw EmptyCloud(path + ": vertex element is empty");

  int ix = -1, iy = -1, iz = -1;
  size_t stride = 0;
  std::vector<size_t> offsets;
  for (size_t i = 0; i < vertex_props.size(); ++i) {
    offsets.push_back(stride);
    stride += vertex_props[i].byte_size;
    if (vertex_props[i].name == "x") ix = int(i);
    if (vertex_props[i].name == "y") iy = int(i);
    if (vertex_props[i].name == "z") iz = int(i);
  }
  if (ix < 0 || iy < 0 || iz < 0)
    throw ParseError(path + ": vertex element lacks x/y/z properties");

  std::vector<std::array<double, 3>> raw;
  raw.reserve(vertex_count);

  if (binary) {
    std::vector<char> row(stride);
    for (size_t v = 0; v < vertex_count; ++v) {
      if (!in.read(row.data(), std::streamsize(stride))) {
        auto pos = in.tellg();
        throw ParseError(path + ": truncated body at byte offset " +
                         std::to_string(pos == std::istream::pos_type(-1)
                                            ? int64_t(0)
                                            : int64_t(pos)) +
                         " (vertex " + std::to_string(v) + ")");
      }
      raw.push_back({read_binary_scalar(row.data() + offsets[ix], vertex_props[ix]),
                     read_binary_scalar(row.data() + offsets[iy], vertex_props[iy]),
                     read_binary_scalar(row.data() + offsets[iz], vertex_props[iz])});
    }
  } else {
    for (size_t v = 0; v < vertex_count; ++v) {
      next_line();
      std::istringstream ss(line);
      std::vector<double> vals(vertex_props.size());
      for (size_t i = 0; i < vertex_props.size(); ++i) {
        if (!(ss >> vals[i]))
          throw ParseError(path + ":" + std::to_string(line_no) + ": malformed vertex row");
      }
      raw.push_back({vals[ix], vals[iy], vals[iz]});
    }
  }
  return voxelize(raw, opts.scale, opts.keep_duplicates);
}

void write_ply(const PointCloud& cloud, const std::string& path, PlyFormat format) {
  if (cloud.points.empty()) throw EmptyCloud("write_ply: empty cloud");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << "ply\n"
      << "format "
      << (format == PlyFormat::Ascii ? "ascii" : "binary_little_endian") << " 1.0\n"
      << "element vertex " << cloud.points.size() << "\n"
      << "property int x\nproperty int y\nproperty int z\n"
      << "end_header\n";
  if (format == PlyFormat::Ascii) {
    for (const auto& p : cloud.points)
      out << p.x << " " << p.y << " " << p.z << "\n";
  } else {
    for (const auto& p : cloud.points) {
      int32_t v[3] = {p.x, p.y, p.z};
      out.write(reinterpret_cast<const char*>(v), sizeof(v));
    }
  }
  if (!out) throw Error("I/O failure writing '" + path + "'");
}

PointCloud read_xyz(const std::string& path, const ReadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::vector<std::array<double, 3>> raw;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    double x, y, z;
    if (!(ss >> x >> y >> z))
      throw ParseError(path + ":" + std::to_string(line_no) + ": malformed xyz row");
    raw.push_back({x, y, z});
  }
  if (raw.empty()) throw EmptyCloud(path + ": no points");
  return voxelize(raw, opts.scale, opts.keep_duplicates);
}

void write_xyz(const PointCloud& cloud, const std::string& path) {
  if (cloud.points.empty()) throw EmptyCloud("write_xyz: empty cloud");
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  for (const auto& p : cloud.points) out << p.x << " " << p.y << " " << p.z << "\n";
}

}  // namespace lpcc
