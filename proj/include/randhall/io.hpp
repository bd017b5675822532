#pragma once

#include "randhall/randomization.hpp"
#include "randhall/trajectory.hpp"

#include <filesystem>
#include <iosfwd>

namespace randhall::io {

inline constexpr std::uint32_t kFormatVersion = 1;

// All binary layouts are little-endian.
//
// SFLD: "SFLD" u32 version, u32 N, u32 components, then for k in lexicographic order
//       (k0 outermost, each k_i running from -N/2 to N/2 - 1) and each component: f64 re, f64 im.
// STRJ: "STRJ" u32 version, u32 samples, f64 horizon, then per sample: f64 time, SFLD block.
// SRND: "SRND" u32 version, u64 seed, u32 distribution (0 Rademacher, 1 Gaussian), u32 N,
//       u32 per-component flag. Multipliers are regenerated from the seed on read.

void write_field(std::ostream& out, const SpectralField& field);
SpectralField read_field(std::istream& in);

void write_trajectory(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory(std::istream& in);

void write_draw(std::ostream& out, const RandomDraw& d);
RandomDraw read_draw(std::istream& in);

void save_field(const std::filesystem::path& path, const SpectralField& field);
SpectralField load_field(const std::filesystem::path& path);
void save_trajectory(const std::filesystem::path& path, const Trajectory& traj);
Trajectory load_trajectory(const std::filesystem::path& path);
void save_draw(const std::filesystem::path& path, const RandomDraw& d);
RandomDraw load_draw(const std::filesystem::path& path);

}  // namespace randhall::io
