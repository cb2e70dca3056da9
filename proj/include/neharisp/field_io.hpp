#pragma once

#include <string>
#include <variant>

#include "neharisp/grid.hpp"

namespace neharisp {

/// Field files: one UTF-8 JSON header line, then raw little-endian float64
/// payload in storage order.  Header schema "nehari-sp/1" with
/// kind "field3" (n, L) or "radial" (n_r, r_max), plus a free-form name and
/// optional provenance keys (config_hash).
struct FieldFileMeta {
  std::string name = "field";
  std::string config_hash;  // empty = omitted
};

void write_field(const Field3& f, const std::string& path,
                 const FieldFileMeta& meta = {});
void write_field(const RadialField& f, const std::string& path,
                 const FieldFileMeta& meta = {});

using AnyField = std::variant<Field3, RadialField>;

AnyField read_field(const std::string& path);

Field3 read_field3(const std::string& path);
RadialField read_radial_field(const std::string& path);

}  // namespace neharisp
