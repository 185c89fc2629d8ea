#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "ssde/field.hpp"

namespace ssde {

// CSV layout:
//   # ssde-field dim=<d> half_width=<L> points_per_axis=<M> time_horizon=<T> time_steps=<K> codim=<m>
//   time_index,node_index,c0,...,c{m-1}
//   one row per (time_index, node_index), time-major.
// Reals are written in shortest round-trip form, so read(write(f)) == f bit for bit.
void write_field_csv(const SpaceTimeField& field, std::ostream& out);
SpaceTimeField read_field_csv(std::istream& in);

// Binary layout (all little-endian):
//   bytes 0..7   magic "SSDEFLD1"
//   u32 dim, u32 points_per_axis, u32 time_steps, u32 codim
//   f64 half_width, f64 time_horizon
//   f64 values[time_steps][node_count][codim]
void write_field_binary(const SpaceTimeField& field, std::ostream& out);
SpaceTimeField read_field_binary(std::istream& in);

/// Dispatches on extension: ".csv" for CSV, anything else binary.
void save_field(const SpaceTimeField& field, const std::filesystem::path& path);
SpaceTimeField load_field(const std::filesystem::path& path);

namespace io {
// Little-endian primitives shared with the ensemble dump.
void put_u32(std::ostream& out, std::uint32_t v);
void put_u64(std::ostream& out, std::uint64_t v);
void put_f64(std::ostream& out, double v);
std::uint32_t get_u32(std::istream& in);
std::uint64_t get_u64(std::istream& in);
double get_f64(std::istream& in);
std::string format_real(double v);
double parse_real(std::string_view text);
}  // namespace io

}  // namespace ssde
