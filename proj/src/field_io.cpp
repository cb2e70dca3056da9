#include "neharisp/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace neharisp {

namespace {

using nlohmann::json;

void require_finite(const std::vector<double>& v, const std::string& path) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw IoError("write_field: non-finite value, refusing to write " + path);
    }
  }
}

void write_payload(std::ofstream& out, const std::vector<double>& v) {
  static_assert(sizeof(double) == 8);
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(v.data()),
              std::streamsize(v.size() * 8));
  } else {
    for (double x : v) {
      std::uint64_t bits;
      std::memcpy(&bits, &x, 8);
      char b[8];
      for (int i = 0; i < 8; ++i) b[i] = char((bits >> (8 * i)) & 0xff);
      out.write(b, 8);
    }
  }
}

std::vector<double> read_payload(std::ifstream& in, std::size_t count,
                                 const std::string& path) {
  std::vector<double> v(count);
  if constexpr (std::endian::native == std::endian::little) {
    in.read(reinterpret_cast<char*>(v.data()), std::streamsize(count * 8));
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      char b[8];
      in.read(b, 8);
      std::uint64_t bits = 0;
      for (int k = 0; k < 8; ++k) {
        bits |= std::uint64_t(static_cast<unsigned char>(b[k])) << (8 * k);
      }
      std::memcpy(&v[i], &bits, 8);
    }
  }
  if (!in) {
    throw IoError("read_field: truncated payload in " + path);
  }
  // payload length must be exactly the declared count
  char extra;
  if (in.read(&extra, 1)) {
    throw IoError("read_field: payload longer than header declares in " + path);
  }
  return v;
}

void write_file(const json& header, const std::vector<double>& v,
                const std::string& path) {
  require_finite(v, path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("write_field: cannot open " + path);
  out << header.dump() << "\n";
  write_payload(out, v);
  if (!out) throw IoError("write_field: short write to " + path);
}

json base_header(const FieldFileMeta& meta) {
  json h;
  h["schema"] = "nehari-sp/1";
  h["name"] = meta.name;
  if (!meta.config_hash.empty()) h["config_hash"] = meta.config_hash;
  return h;
}

}  // namespace

void write_field(const Field3& f, const std::string& path,
                 const FieldFileMeta& meta) {
  json h = base_header(meta);
  h["kind"] = "field3";
  h["n"] = f.grid.n;
  h["L"] = f.grid.L;
  write_file(h, f.v, path);
}

void write_field(const RadialField& f, const std::string& path,
                 const FieldFileMeta& meta) {
  json h = base_header(meta);
  h["kind"] = "radial";
  h["n_r"] = f.grid.n_r;
  h["r_max"] = f.grid.r_max;
  write_file(h, f.v, path);
}

AnyField read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_field: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.empty()) {
    throw IoError("read_field: malformed header (missing JSON line) in " + path);
  }
  json h;
  try {
    h = json::parse(line);
  } catch (const json::exception& e) {
    throw IoError("read_field: malformed header in " + path + ": " + e.what());
  }
  if (!h.is_object() || h.value("schema", "") != "nehari-sp/1") {
    throw IoError("read_field: schema mismatch in " + path +
                  " (want nehari-sp/1)");
  }
  const std::string kind = h.value("kind", "");
  try {
    if (kind == "field3") {
      Grid3 g(h.at("n").get<int>(), h.at("L").get<double>());
      Field3 f(g);
      f.v = read_payload(in, g.npts(), path);
      return f;
    }
    if (kind == "radial") {
      RadialGrid g(h.at("n_r").get<int>(), h.at("r_max").get<double>());
      RadialField f(g);
      f.v = read_payload(in, std::size_t(g.n_r), path);
      return f;
    }
  } catch (const json::exception& e) {
    throw IoError("read_field: malformed header in " + path + ": " + e.what());
  }
  throw IoError("read_field: unknown kind '" + kind + "' in " + path);
}

Field3 read_field3(const std::string& path) {
  AnyField f = read_field(path);
  if (auto* p = std::get_if<Field3>(&f)) return std::move(*p);
  throw IoError("read_field3: " + path + " holds a radial field");
}

RadialField read_radial_field(const std::string& path) {
  AnyField f = read_field(path);
  if (auto* p = std::get_if<RadialField>(&f)) return std::move(*p);
  throw IoError("read_radial_field: " + path + " holds a field3");
}

}  // namespace neharisp
