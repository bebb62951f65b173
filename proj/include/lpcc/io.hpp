#pragma once

#include <string>

#include "lpcc/geometry.hpp"

namespace lpcc {

struct ReadOptions {
  bool keep_duplicates = false;
  double scale = 1.0;  // original units per voxel, applied on ingest
};

enum class PlyFormat { Ascii, BinaryLittleEndian };

/// Read a PLY file (ascii or binary_little_endian). Non-position vertex
/// properties are ignored. Throws ParseError naming the offending line or
/// byte offset, EmptyCloud when the vertex element is empty.
PointCloud read_ply(const std::string& path, const ReadOptions& opts = {});

/// Write vertex positions as integer x/y/z.
void write_ply(const PointCloud& cloud, const std::string& path,
               PlyFormat format = PlyFormat::Ascii);

/// Plain-text fixture format: one "x y z" triple per line.
PointCloud read_xyz(const std::string& path, const ReadOptions& opts = {});
void write_xyz(const PointCloud& cloud, const std::string& path);

}  // namespace lpcc
