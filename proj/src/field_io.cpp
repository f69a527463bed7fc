#include "eitprop/field_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <vector>

#include "eitprop/error.hpp"

namespace eitprop {
namespace {

static_assert(std::endian::native == std::endian::little, "field dumps assume a little-endian host");

template <typename T>
void put(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::filesystem::path& path) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) throw IoError("truncated field dump: " + path.string());
  return value;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

}  // namespace

void write_field(const std::filesystem::path& path, const ComplexField& field) {
  auto out = open_out(path);
  const Grid2D& g = field.grid();
  out.write(kFieldMagic.data(), kFieldMagic.size());
  put<std::uint64_t>(out, g.nx());
  put<std::uint64_t>(out, g.ny());
  put<double>(out, g.dx());
  put<double>(out, g.dy());
  out.write(reinterpret_cast<const char*>(field.values().data()),
            static_cast<std::streamsize>(field.values().size() * sizeof(Complex)));
  if (!out) throw IoError("failed writing " + path.string());
}

ComplexField read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kFieldMagic) {
    throw IoError("not a field dump: " + path.string());
  }
  const auto nx = get<std::uint64_t>(in, path);
  const auto ny = get<std::uint64_t>(in, path);
  const auto dx = get<double>(in, path);
  const auto dy = get<double>(in, path);
  const auto header_end = static_cast<std::uintmax_t>(in.tellg());
  const std::uintmax_t file_size = std::filesystem::file_size(path);
  if (nx == 0 || ny == 0 || ny > (file_size - header_end) / sizeof(Complex) / nx) {
    throw IoError("truncated field dump: " + path.string());
  }
  if (header_end + nx * ny * sizeof(Complex) != file_size) {
    throw IoError("trailing bytes after field dump: " + path.string());
  }
  std::optional<Grid2D> grid;
  try {
    grid.emplace(nx, ny, dx, dy);
  } catch (const PhysicsError& e) {
    throw IoError("bad grid in field dump " + path.string() + ": " + e.what());
  }
  std::vector<Complex> values(grid->size());
  if (!in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(Complex)))) {
    throw IoError("truncated field dump: " + path.string());
  }
  try {
    return ComplexField(*grid, std::move(values));
  } catch (const PhysicsError& e) {
    throw IoError("bad samples in field dump " + path.string() + ": " + e.what());
  }
}

void write_intensity_pgm(const std::filesystem::path& path, const ComplexField& field) {
  const Grid2D& g = field.grid();
  double peak = 0.0;
  for (const auto& v : field.values()) peak = std::max(peak, std::norm(v));

  std::vector<unsigned char> pixels(2 * g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double scaled = peak > 0.0 ? std::norm(field.values()[i]) / peak : 0.0;
    const auto level = static_cast<std::uint16_t>(std::lround(std::clamp(scaled, 0.0, 1.0) * 65535.0));
    pixels[2 * i] = static_cast<unsigned char>(level >> 8);
    pixels[2 * i + 1] = static_cast<unsigned char>(level & 0xff);
  }
  auto out = open_out(path);
  out << "P5\n" << g.nx() << ' ' << g.ny() << "\n65535\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace eitprop
