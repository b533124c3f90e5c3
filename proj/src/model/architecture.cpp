#include "alexbench/model/architecture.hpp"

#include <charconv>
#include <sstream>

#include "alexbench/error.hpp"

namespace alexbench::model {

Architecture Architecture::dense(std::size_t rows, std::size_t cols) {
  Architecture a;
  a.kind = ArchKind::Dense;
  a.image_rows = rows;
  a.image_cols = cols;
  return a;
}

Architecture Architecture::conv(std::size_t rows, std::size_t cols) {
  Architecture a = dense(rows, cols);
  a.kind = ArchKind::Conv;
  return a;
}

std::size_t Architecture::feature_dim() const {
  return kind == ArchKind::Dense ? input_dim() : filters * conv_positions();
}

std::size_t Architecture::parameter_count() const {
  std::size_t n = 0;
  if (kind == ArchKind::Conv) n += filters * kernel * kernel + filters;
  n += hidden * feature_dim() + hidden;
  n += classes * hidden + classes;
  return n;
}

void Architecture::validate() const {
  if (image_rows == 0 || image_cols == 0 || hidden == 0 || classes < 2) {
    throw Error(ErrorCode::UnsupportedArchitecture, descriptor());
  }
  if (kind == ArchKind::Conv &&
      (kernel == 0 || filters == 0 || kernel > image_rows || kernel > image_cols)) {
    throw Error(ErrorCode::UnsupportedArchitecture, descriptor());
  }
}

std::string Architecture::descriptor() const {
  std::ostringstream os;
  os << to_string(kind) << " rows=" << image_rows << " cols=" << image_cols;
  if (kind == ArchKind::Conv) os << " kernel=" << kernel << " filters=" << filters;
  os << " hidden=" << hidden << " classes=" << classes;
  return os.str();
}

Architecture Architecture::parse(std::string_view descriptor) {
  std::istringstream is{std::string(descriptor)};
  std::string kind;
  is >> kind;
  Architecture a;
  a.kind = parse_arch_kind(kind);
  std::string token;
  while (is >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::UnsupportedArchitecture, "malformed token '" + token + "'");
    }
    const std::string key = token.substr(0, eq);
    std::size_t value = 0;
    const char* first = token.data() + eq + 1;
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      throw Error(ErrorCode::UnsupportedArchitecture, "bad value in '" + token + "'");
    }
    if (key == "rows") a.image_rows = value;
    else if (key == "cols") a.image_cols = value;
    else if (key == "kernel") a.kernel = value;
    else if (key == "filters") a.filters = value;
    else if (key == "hidden") a.hidden = value;
    else if (key == "classes") a.classes = value;
    else throw Error(ErrorCode::UnsupportedArchitecture, "unknown key '" + key + "'");
  }
  a.validate();
  return a;
}

std::string_view to_string(ArchKind kind) {
  return kind == ArchKind::Dense ? "dense" : "conv";
}

ArchKind parse_arch_kind(std::string_view name) {
  if (name == "dense") return ArchKind::Dense;
  if (name == "conv") return ArchKind::Conv;
  throw Error(ErrorCode::UnsupportedArchitecture, "unknown architecture '" + std::string(name) + "'");
}

}  // namespace alexbench::model
