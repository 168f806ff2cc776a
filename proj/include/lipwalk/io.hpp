#pragma once

#include <string>

#include "lipwalk/field.hpp"

namespace lipwalk {

/// Shortest-safe decimal rendering: 17 significant digits, which round-trips
/// every finite double through strtod.
std::string format_double(double v);

/// Field as CSV. The first line is a comment carrying the tool version and
/// the config digest; then the header x1,...,xd,value and one row per point
/// in lexicographic order.
std::string field_csv(const Field& field, const std::string& config_digest);
void write_field_csv(const Field& field, const std::string& path, const std::string& config_digest);

/// Inverse of field_csv; lines starting with '#' are skipped.
Field parse_field_csv(const std::string& text);
Field read_field_csv(const std::string& path);

/// Writes `content` to `path`, or to stdout when path is "-". I/O error on
/// failure.
void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

}  // namespace lipwalk
