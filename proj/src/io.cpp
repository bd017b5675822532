#include "randhall/io.hpp"

#include "randhall/errors.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace randhall::io {

namespace {

template <typename T>
T to_little(T value) {
  if constexpr (std::endian::native == std::endian::little) {
    return value;
  } else {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    std::memcpy(&value, bytes, sizeof(T));
    return value;
  }
}

template <typename T>
void put(std::ostream& out, T value) {
  value = to_little(value);
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw StructuralError("binary dump truncated");
  return to_little(value);
}

void put_magic(std::ostream& out, const char (&magic)[5]) { out.write(magic, 4); }

void expect_magic(std::istream& in, const char (&magic)[5]) {
  char buf[4];
  in.read(buf, 4);
  if (!in || std::memcmp(buf, magic, 4) != 0) {
    throw StructuralError(std::string("expected '") + magic + "' block");
  }
}

void expect_version(std::istream& in) {
  const auto version = get<std::uint32_t>(in);
  if (version != kFormatVersion) throw StructuralError("unsupported format version " + std::to_string(version));
}

}  // namespace

void write_field(std::ostream& out, const SpectralField& field) {
  const Grid& g = field.grid();
  const int n = g.n();
  put_magic(out, "SFLD");
  put<std::uint32_t>(out, kFormatVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(n));
  put<std::uint32_t>(out, 3);
  for (int k0 = -n / 2; k0 < n / 2; ++k0) {
    for (int k1 = -n / 2; k1 < n / 2; ++k1) {
      for (int k2 = -n / 2; k2 < n / 2; ++k2) {
        const Eigen::Index idx = g.index(k0, k1, k2);
        for (int c = 0; c < 3; ++c) {
          put<double>(out, field.coeffs()(idx, c).real());
          put<double>(out, field.coeffs()(idx, c).imag());
        }
      }
    }
  }
}

SpectralField read_field(std::istream& in) {
  expect_magic(in, "SFLD");
  expect_version(in);
  const auto n = static_cast<int>(get<std::uint32_t>(in));
  const auto components = get<std::uint32_t>(in);
  if (components != 3) throw StructuralError("SFLD: expected 3 components");
  SpectralField field(Grid::make(n));
  const Grid& g = field.grid();
  for (int k0 = -n / 2; k0 < n / 2; ++k0) {
    for (int k1 = -n / 2; k1 < n / 2; ++k1) {
      for (int k2 = -n / 2; k2 < n / 2; ++k2) {
        const Eigen::Index idx = g.index(k0, k1, k2);
        for (int c = 0; c < 3; ++c) {
          const double re = get<double>(in);
          const double im = get<double>(in);
          field.coeffs()(idx, c) = Complex(re, im);
        }
      }
    }
  }
  return field;
}

void write_trajectory(std::ostream& out, const Trajectory& traj) {
  put_magic(out, "STRJ");
  put<std::uint32_t>(out, kFormatVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(traj.size()));
  put<double>(out, traj.horizon());
  for (std::size_t j = 0; j < traj.size(); ++j) {
    put<double>(out, traj.time(j));
    write_field(out, traj.field(j));
  }
}

Trajectory read_trajectory(std::istream& in) {
  expect_magic(in, "STRJ");
  expect_version(in);
  const auto count = get<std::uint32_t>(in);
  const double horizon = get<double>(in);
  std::vector<double> times;
  std::vector<SpectralField> fields;
  times.reserve(count);
  fields.reserve(count);
  for (std::uint32_t j = 0; j < count; ++j) {
    times.push_back(get<double>(in));
    fields.push_back(read_field(in));
  }
  return Trajectory(std::move(times), std::move(fields), horizon);
}

void write_draw(std::ostream& out, const RandomDraw& d) {
  put_magic(out, "SRND");
  put<std::uint32_t>(out, kFormatVersion);
  put<std::uint64_t>(out, d.seed);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(d.distribution));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(d.grid->n()));
  put<std::uint32_t>(out, d.per_component ? 1u : 0u);
}

RandomDraw read_draw(std::istream& in) {
  expect_magic(in, "SRND");
  expect_version(in);
  const auto seed = get<std::uint64_t>(in);
  const auto tag = get<std::uint32_t>(in);
  if (tag > 1) throw StructuralError("SRND: unknown distribution tag");
  const auto n = static_cast<int>(get<std::uint32_t>(in));
  const bool per_component = get<std::uint32_t>(in) != 0;
  return draw(seed, static_cast<Distribution>(tag), Grid::make(n), per_component);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StructuralError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StructuralError("cannot open " + path.string());
  return in;
}

}  // namespace

void save_field(const std::filesystem::path& path, const SpectralField& field) {
  auto out = open_out(path);
  write_field(out, field);
}

SpectralField load_field(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_field(in);
}

void save_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
  auto out = open_out(path);
  write_trajectory(out, traj);
}

Trajectory load_trajectory(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_trajectory(in);
}

void save_draw(const std::filesystem::path& path, const RandomDraw& d) {
  auto out = open_out(path);
  write_draw(out, d);
}

RandomDraw load_draw(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_draw(in);
}

}  // namespace randhall::io
