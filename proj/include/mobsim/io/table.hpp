/*
 * Copyright 2026 The mobsim Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mobsim/error.hpp"

namespace mobsim::io {

enum class ColumnType : std::uint8_t { kInt64 = 1, kFloat64 = 2, kString = 3, kBool = 4 };

using Column = std::variant<std::vector<std::int64_t>, std::vector<double>,
                            std::vector<std::string>, std::vector<std::uint8_t>>;

inline ColumnType type_of(const Column& c) {
  return static_cast<ColumnType>(c.index() + 1);
}

inline const char* to_string(ColumnType t) {
  switch (t) {
    case ColumnType::kInt64: return "int64";
    case ColumnType::kFloat64: return "float64";
    case ColumnType::kString: return "string";
    case ColumnType::kBool: return "bool";
  }
  return "unknown";
}

inline Column make_column(ColumnType t) {
  switch (t) {
    case ColumnType::kInt64: return std::vector<std::int64_t>{};
    case ColumnType::kFloat64: return std::vector<double>{};
    case ColumnType::kString: return std::vector<std::string>{};
    case ColumnType::kBool: return std::vector<std::uint8_t>{};
  }
  throw SchemaError("unknown column type");
}

struct ColumnSpec {
  std::string name;
  ColumnType type;
};

using Schema = std::vector<ColumnSpec>;

// Named, typed columns of equal length.
struct Table {
  std::vector<std::string> names;
  std::vector<Column> columns;

  explicit Table(const Schema& schema = {}) {
    for (const auto& c : schema) {
      names.push_back(c.name);
      columns.push_back(make_column(c.type));
    }
  }

  std::size_t num_rows() const {
    return columns.empty() ? 0
                           : std::visit([](const auto& v) { return v.size(); }, columns[0]);
  }

  std::size_t index(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return i;
    }
    throw SchemaError("no column named '" + std::string(name) + "'");
  }

  template <class T>
  std::vector<T>& col(std::string_view name) {
    return std::get<std::vector<T>>(columns[index(name)]);
  }
  template <class T>
  const std::vector<T>& col(std::string_view name) const {
    auto& c = columns[index(name)];
    if (!std::holds_alternative<std::vector<T>>(c)) {
      throw SchemaError("column '" + std::string(name) + "' has type " +
                        to_string(type_of(c)));
    }
    return std::get<std::vector<T>>(c);
  }

  friend bool operator==(const Table&, const Table&) = default;
};

// Throws SchemaError unless the table has exactly the expected columns with
// the expected types; the message names missing and extra columns.
inline void require_schema(const Table& t, const Schema& expected, std::string_view what) {
  std::string missing, extra, mistyped;
  for (const auto& c : expected) {
    bool found = false;
    for (std::size_t i = 0; i < t.names.size(); ++i) {
      if (t.names[i] != c.name) continue;
      found = true;
      if (type_of(t.columns[i]) != c.type) mistyped += " " + c.name;
    }
    if (!found) missing += " " + c.name;
  }
  for (const auto& n : t.names) {
    bool known = false;
    for (const auto& c : expected) known = known || c.name == n;
    if (!known) extra += " " + n;
  }
  if (missing.empty() && extra.empty() && mistyped.empty()) return;
  std::string msg = std::string(what) + " schema mismatch;";
  if (!missing.empty()) msg += " missing columns:" + missing + ";";
  if (!extra.empty()) msg += " extra columns:" + extra + ";";
  if (!mistyped.empty()) msg += " wrong type:" + mistyped + ";";
  throw SchemaError(msg);
}

// ---------------------------------------------------------------------------
// Columnar binary format. Little-endian layout:
//   "MCOL" u32 version u64 rows u32 cols
//   per column: u32 name_len, name bytes, u8 type
//   per column: data (int64 / float64 bit pattern / u8 bool; strings as
//   u32 length + bytes)

inline constexpr char kColumnarMagic[4] = {'M', 'C', 'O', 'L'};
inline constexpr std::uint32_t kColumnarVersion = 1;

namespace detail {

static_assert(std::endian::native == std::endian::little,
              "columnar I/O assumes a little-endian host");

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw SchemaError("truncated columnar file");
  return v;
}

inline std::string get_bytes(std::istream& in, std::size_t n) {
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) throw SchemaError("truncated columnar file");
  return s;
}

}  // namespace detail

inline void write_columnar(const Table& t, std::ostream& out) {
  out.write(kColumnarMagic, 4);
  detail::put<std::uint32_t>(out, kColumnarVersion);
  detail::put<std::uint64_t>(out, t.num_rows());
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(t.columns.size()));
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(t.names[i].size()));
    out.write(t.names[i].data(), static_cast<std::streamsize>(t.names[i].size()));
    detail::put<std::uint8_t>(out, static_cast<std::uint8_t>(type_of(t.columns[i])));
  }
  for (const auto& c : t.columns) {
    std::visit(
        [&](const auto& v) {
          using V = typename std::decay_t<decltype(v)>::value_type;
          if constexpr (std::is_same_v<V, std::string>) {
            for (const auto& s : v) {
              detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
              out.write(s.data(), static_cast<std::streamsize>(s.size()));
            }
          } else {
            out.write(reinterpret_cast<const char*>(v.data()),
                      static_cast<std::streamsize>(v.size() * sizeof(V)));
          }
        },
        c);
  }
}

inline Table read_columnar(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kColumnarMagic, 4) != 0) {
    throw SchemaError("not a columnar table (bad magic)");
  }
  if (detail::get<std::uint32_t>(in) != kColumnarVersion) {
    throw SchemaError("unsupported columnar version");
  }
  const auto rows = detail::get<std::uint64_t>(in);
  const auto ncols = detail::get<std::uint32_t>(in);
  Table t;
  for (std::uint32_t i = 0; i < ncols; ++i) {
    const auto len = detail::get<std::uint32_t>(in);
    t.names.push_back(detail::get_bytes(in, len));
    const auto type = detail::get<std::uint8_t>(in);
    if (type < 1 || type > 4) throw SchemaError("unknown column type code");
    t.columns.push_back(make_column(static_cast<ColumnType>(type)));
  }
  for (auto& c : t.columns) {
    std::visit(
        [&](auto& v) {
          using V = typename std::decay_t<decltype(v)>::value_type;
          if constexpr (std::is_same_v<V, std::string>) {
            v.reserve(rows);
            for (std::uint64_t r = 0; r < rows; ++r) {
              v.push_back(detail::get_bytes(in, detail::get<std::uint32_t>(in)));
            }
          } else {
            v.resize(rows);
            in.read(reinterpret_cast<char*>(v.data()),
                    static_cast<std::streamsize>(rows * sizeof(V)));
            if (!in) throw SchemaError("truncated columnar file");
          }
        },
        c);
  }
  return t;
}

// ---------------------------------------------------------------------------
// CSV with a header row. Strings are quoted when they contain a comma,
// quote or line break; floats use 17 significant digits; bools are
// "true"/"false".

namespace detail {

inline void put_csv_string(std::ostream& out, const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) {
    out << s;
    return;
  }
  out << '"';
  for (char ch : s) {
    if (ch == '"') out << '"';
    out << ch;
  }
  out << '"';
}

// Splits one CSV record; reads further lines while inside quotes.
inline bool read_record(std::istream& in, std::vector<std::string>& fields,
                        std::size_t& line_no) {
  fields.clear();
  std::string line;
  if (!std::getline(in, line)) return false;
  ++line_no;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0;; ++i) {
    if (i == line.size()) {
      if (!quoted) break;
      std::string more;
      if (!std::getline(in, more)) throw ParseError("unterminated quoted field", line_no);
      ++line_no;
      cur += '\n';
      line = more;
      i = static_cast<std::size_t>(-1);
      continue;
    }
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(std::move(cur));
  return true;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
T parse_number(const std::string& s, std::size_t line, const std::string& col) {
  T v{};
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end || s.empty()) {
    throw ParseError("column '" + col + "': '" + s + "' is not a number", line);
  }
  return v;
}

}  // namespace detail

inline void write_csv(const Table& t, std::ostream& out) {
  for (std::size_t i = 0; i < t.names.size(); ++i) {
    if (i > 0) out << ',';
    detail::put_csv_string(out, t.names[i]);
  }
  out << '\n';
  const std::size_t rows = t.num_rows();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      if (i > 0) out << ',';
      std::visit(
          [&](const auto& v) {
            using V = typename std::decay_t<decltype(v)>::value_type;
            if constexpr (std::is_same_v<V, std::string>) {
              detail::put_csv_string(out, v[r]);
            } else if constexpr (std::is_same_v<V, double>) {
              out << detail::format_double(v[r]);
            } else if constexpr (std::is_same_v<V, std::uint8_t>) {
              out << (v[r] ? "true" : "false");
            } else {
              out << v[r];
            }
          },
          t.columns[i]);
    }
    out << '\n';
  }
}

// CSV carries no types, so the caller supplies the schema; header names
// must match it exactly.
inline Table read_csv(std::istream& in, const Schema& schema, std::string_view what) {
  std::vector<std::string> fields;
  std::size_t line = 0;
  if (!detail::read_record(in, fields, line)) throw SchemaError(std::string(what) + ": empty file");
  Table header;
  for (const auto& f : fields) {
    header.names.push_back(f);
    ColumnType type = ColumnType::kString;
    for (const auto& c : schema) {
      if (c.name == f) type = c.type;
    }
    header.columns.push_back(make_column(type));
  }
  require_schema(header, schema, what);
  Table t = std::move(header);
  while (detail::read_record(in, fields, line)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != t.names.size()) {
      throw ParseError("expected " + std::to_string(t.names.size()) + " fields, got " +
                           std::to_string(fields.size()),
                       line);
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
      std::visit(
          [&](auto& v) {
            using V = typename std::decay_t<decltype(v)>::value_type;
            if constexpr (std::is_same_v<V, std::string>) {
              v.push_back(std::move(fields[i]));
            } else if constexpr (std::is_same_v<V, std::uint8_t>) {
              if (fields[i] == "true") {
                v.push_back(1);
              } else if (fields[i] == "false") {
                v.push_back(0);
              } else {
                throw ParseError("column '" + t.names[i] + "': '" + fields[i] +
                                     "' is not a bool",
                                 line);
              }
            } else {
              v.push_back(detail::parse_number<V>(fields[i], line, t.names[i]));
            }
          },
          t.columns[i]);
    }
  }
  return t;
}

enum class FileFormat { kColumnar, kCsv };

inline FileFormat parse_format(const std::string& s) {
  if (s == "columnar") return FileFormat::kColumnar;
  if (s == "csv") return FileFormat::kCsv;
  throw ConfigError("unknown file format '" + s + "' (expected columnar or csv)");
}

inline const char* extension(FileFormat f) {
  return f == FileFormat::kColumnar ? ".mcol" : ".csv";
}

inline FileFormat format_of_path(const std::string& path) {
  return path.size() >= 5 && path.compare(path.size() - 5, 5, ".mcol") == 0
             ? FileFormat::kColumnar
             : FileFormat::kCsv;
}

inline void write_table(const Table& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  if (format_of_path(path) == FileFormat::kColumnar) {
    write_columnar(t, out);
  } else {
    write_csv(t, out);
  }
  if (!out) throw ConfigError("failed writing " + path);
}

// Reads a table and checks it against `schema`, whichever format the file
// extension names.
inline Table read_table(const std::string& path, const Schema& schema, std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("cannot open " + path);
  if (format_of_path(path) == FileFormat::kColumnar) {
    Table t = read_columnar(in);
    require_schema(t, schema, what);
    return t;
  }
  return read_csv(in, schema, what);
}

}  // namespace mobsim::io
