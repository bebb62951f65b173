#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "lpcc/io.hpp"

using namespace lpcc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path dir;
  TempDir() {
    dir = fs::temp_directory_path() /
          ("lpcc_io_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
}

std::vector<Point3> sorted(std::vector<Point3> v) {
  std::sort(v.begin(), v.end());
  return v;
}

PointCloud random_cloud(uint64_t seed, size_t n) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int32_t> u(-4000, 4000);
  std::vector<Point3> pts;
  for (size_t i = 0; i < n; ++i) pts.push_back({u(rng), u(rng), u(rng)});
  return make_cloud(std::move(pts));
}

}  // namespace

TEST_CASE("ascii ply readback with bbox") {
  TempDir td;
  write_text(td.path("a.ply"),
             "ply\nformat ascii 1.0\nelement vertex 3\n"
             "property float x\nproperty float y\nproperty float z\n"
             "end_header\n0 0 0\n1 0 0\n2 0 0\n");
  PointCloud c = read_ply(td.path("a.ply"));
  REQUIRE(c.size() == 3);
  CHECK(c.bbox.min == Point3{0, 0, 0});
  CHECK(c.bbox.max == Point3{2, 0, 0});
}

TEST_CASE("empty vertex element raises EmptyCloud") {
  TempDir td;
  write_text(td.path("e.ply"),
             "ply\nformat ascii 1.0\nelement vertex 0\n"
             "property float x\nproperty float y\nproperty float z\n"
             "end_header\n");
  CHECK_THROWS_AS(read_ply(td.path("e.ply")), EmptyCloud);
}

TEST_CASE("malformed inputs raise ParseError") {
  TempDir td;
  write_text(td.path("bad1.ply"), "not a ply\n");
  CHECK_THROWS_AS(read_ply(td.path("bad1.ply")), ParseError);

  write_text(td.path("bad2.ply"),
             "ply\nformat ascii 1.0\nelement vertex 2\n"
             "property float x\nproperty float y\nproperty float z\n"
             "end_header\n0 0 0\n");
  CHECK_THROWS_AS(read_ply(td.path("bad2.ply")), ParseError);

  write_text(td.path("bad3.ply"),
             "ply\nformat binary_big_endian 1.0\nelement vertex 1\n"
             "property float x\nproperty float y\nproperty float z\n"
             "end_header\n\0\0\0\0");
  CHECK_THROWS_AS(read_ply(td.path("bad3.ply")), ParseError);

  CHECK_THROWS_AS(read_ply(td.path("missing.ply")), Error);
}

TEST_CASE("write_ply declares the vertex count") {
  TempDir td;
  write_ply(make_cloud({{7, 8, 9}}), td.path("one.ply"));
  std::ifstream f(td.path("one.ply"));
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("element vertex 1") != std::string::npos);
}

TEST_CASE("ply round trip, both formats") {
  TempDir td;
  for (uint64_t seed : {1u, 2u, 3u}) {
    PointCloud c = random_cloud(seed, 1000);
    write_ply(c, td.path("a.ply"), PlyFormat::Ascii);
    write_ply(c, td.path("b.ply"), PlyFormat::BinaryLittleEndian);
    PointCloud ra = read_ply(td.path("a.ply"));
    PointCloud rb = read_ply(td.path("b.ply"));
    CHECK(sorted(ra.points) == sorted(c.points));
    CHECK(sorted(rb.points) == sorted(c.points));
    CHECK(sorted(ra.points) == sorted(rb.points));
  }
}

TEST_CASE("binary ply with extra properties and double positions") {
  TempDir td;
  std::string header =
      "ply\nformat binary_little_endian 1.0\nelement vertex 2\n"
      "property double x\nproperty double y\nproperty double z\n"
      "property uchar intensity\nend_header\n";
  std::ofstream f(td.path("d.ply"), std::ios::binary);
  f << header;
  auto put = [&](double x, double y, double z, uint8_t i) {
    f.write(reinterpret_cast<const char*>(&x), 8);
    f.write(reinterpret_cast<const char*>(&y), 8);
    f.write(reinterpret_cast<const char*>(&z), 8);
    f.write(reinterpret_cast<const char*>(&i), 1);
  };
  put(1.0, 2.0, 3.0, 200);
  put(-4.0, 5.0, -6.0, 17);
  f.close();
  PointCloud c = read_ply(td.path("d.ply"));
  REQUIRE(c.size() == 2);
  CHECK(sorted(c.points) == sorted({{1, 2, 3}, {-4, 5, -6}}));
}

TEST_CASE("xyz fixture round trip") {
  TempDir td;
  PointCloud c = random_cloud(9, 200);
  write_xyz(c, td.path("c.xyz"));
  PointCloud r = read_xyz(td.path("c.xyz"));
  CHECK(sorted(r.points) == sorted(c.points));
}
