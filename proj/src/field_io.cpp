#include "ssde/field_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "ssde/error.hpp"

namespace ssde {

namespace io {

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  out.write(b, 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  require(in.gcount() == 4, ErrorKind::Io, "unexpected end of binary stream");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  require(in.gcount() == 8, ErrorKind::Io, "unexpected end of binary stream");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_real(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  require(res.ec == std::errc() && res.ptr == text.data() + text.size(), ErrorKind::Io,
          "cannot parse real number '" + std::string(text) + "'");
  return v;
}

}  // namespace io

namespace {

constexpr char kMagic[8] = {'S', 'S', 'D', 'E', 'F', 'L', 'D', '1'};

long parse_int(std::string_view text) {
  long v = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  require(res.ec == std::errc() && res.ptr == text.data() + text.size(), ErrorKind::Io,
          "cannot parse integer '" + std::string(text) + "'");
  return v;
}

}  // namespace

void write_field_csv(const SpaceTimeField& field, std::ostream& out) {
  const Grid& g = field.grid();
  out << "# ssde-field dim=" << g.dim() << " half_width=" << io::format_real(g.half_width())
      << " points_per_axis=" << g.points_per_axis()
      << " time_horizon=" << io::format_real(g.time_horizon()) << " time_steps=" << g.time_steps()
      << " codim=" << field.codim() << "\n";
  out << "time_index,node_index";
  for (int c = 0; c < field.codim(); ++c) out << ",c" << c;
  out << "\n";
  const RowMatrix& v = field.values();
  for (int k = 0; k < g.time_steps(); ++k) {
    for (Index n = 0; n < g.node_count(); ++n) {
      out << k << "," << n;
      const Index row = k * g.node_count() + n;
      for (int c = 0; c < field.codim(); ++c) out << "," << io::format_real(v(row, c));
      out << "\n";
    }
  }
}

SpaceTimeField read_field_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::Io, "empty field CSV");
  require(line.rfind("# ssde-field", 0) == 0, ErrorKind::Io, "missing ssde-field header");
  std::map<std::string, std::string> meta;
  {
    std::istringstream hs(line.substr(12));
    std::string tok;
    while (hs >> tok) {
      const auto eq = tok.find('=');
      require(eq != std::string::npos, ErrorKind::Io, "malformed header token '" + tok + "'");
      meta[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
  }
  for (const char* key :
       {"dim", "half_width", "points_per_axis", "time_horizon", "time_steps", "codim"}) {
    require(meta.count(key) == 1, ErrorKind::Io, std::string("field header lacks ") + key);
  }
  const Grid grid(static_cast<int>(parse_int(meta["dim"])), io::parse_real(meta["half_width"]),
                  static_cast<int>(parse_int(meta["points_per_axis"])),
                  io::parse_real(meta["time_horizon"]),
                  static_cast<int>(parse_int(meta["time_steps"])));
  const int codim = static_cast<int>(parse_int(meta["codim"]));
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::Io, "missing column header");

  const Index rows = grid.time_steps() * grid.node_count();
  RowMatrix values(rows, codim);
  std::vector<bool> seen(static_cast<std::size_t>(rows), false);
  Index filled = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::string_view rest(line);
    auto next = [&rest]() {
      const auto comma = rest.find(',');
      std::string_view tok = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      return tok;
    };
    const long k = parse_int(next());
    const long n = parse_int(next());
    require(k >= 0 && k < grid.time_steps() && n >= 0 && n < grid.node_count(), ErrorKind::Io,
            "field CSV index out of range");
    const Index row = k * grid.node_count() + n;
    for (int c = 0; c < codim; ++c) values(row, c) = io::parse_real(next());
    require(rest.empty(), ErrorKind::Io, "field CSV row has extra columns");
    if (!seen[static_cast<std::size_t>(row)]) ++filled;
    seen[static_cast<std::size_t>(row)] = true;
  }
  require(filled == rows, ErrorKind::Io, "field CSV is missing rows");
  return SpaceTimeField(grid, codim, std::move(values));
}

void write_field_binary(const SpaceTimeField& field, std::ostream& out) {
  const Grid& g = field.grid();
  out.write(kMagic, 8);
  io::put_u32(out, static_cast<std::uint32_t>(g.dim()));
  io::put_u32(out, static_cast<std::uint32_t>(g.points_per_axis()));
  io::put_u32(out, static_cast<std::uint32_t>(g.time_steps()));
  io::put_u32(out, static_cast<std::uint32_t>(field.codim()));
  io::put_f64(out, g.half_width());
  io::put_f64(out, g.time_horizon());
  const RowMatrix& v = field.values();
  for (Index r = 0; r < v.rows(); ++r)
    for (Index c = 0; c < v.cols(); ++c) io::put_f64(out, v(r, c));
}

SpaceTimeField read_field_binary(std::istream& in) {
  char magic[8];
  in.read(magic, 8);
  require(in.gcount() == 8 && std::equal(magic, magic + 8, kMagic), ErrorKind::Io,
          "not an ssde field dump");
  const auto dim = static_cast<int>(io::get_u32(in));
  const auto points = static_cast<int>(io::get_u32(in));
  const auto steps = static_cast<int>(io::get_u32(in));
  const auto codim = static_cast<int>(io::get_u32(in));
  const double half_width = io::get_f64(in);
  const double horizon = io::get_f64(in);
  const Grid grid(dim, half_width, points, horizon, steps);
  require(codim >= 1 && codim <= kMaxCodim, ErrorKind::Io, "field dump has invalid codim");
  RowMatrix values(grid.time_steps() * grid.node_count(), codim);
  for (Index r = 0; r < values.rows(); ++r)
    for (Index c = 0; c < codim; ++c) values(r, c) = io::get_f64(in);
  return SpaceTimeField(grid, codim, std::move(values));
}

void save_field(const SpaceTimeField& field, const std::filesystem::path& path) {
  const bool csv = path.extension() == ".csv";
  std::ofstream out(path, csv ? std::ios::out : std::ios::out | std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot open " + path.string() + " for writing");
  if (csv) {
    write_field_csv(field, out);
  } else {
    write_field_binary(field, out);
  }
  require(static_cast<bool>(out), ErrorKind::Io, "failed writing " + path.string());
}

SpaceTimeField load_field(const std::filesystem::path& path) {
  const bool csv = path.extension() == ".csv";
  std::ifstream in(path, csv ? std::ios::in : std::ios::in | std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path.string());
  return csv ? read_field_csv(in) : read_field_binary(in);
}

}  // namespace ssde
