#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "json.hpp"

#include "halmos/crt/module.hpp"
#include "halmos/diagnostics.hpp"
#include "halmos/errors.hpp"
#include "halmos/index.hpp"
#include "halmos/matrix.hpp"

namespace halmos::io {

using json = nlohmann::json;

inline std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  if (x == 0.0 && std::signbit(x)) return "-0.0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline void escape_string(std::ostringstream& os, const std::string& s) {
  // nlohmann's dump already escapes correctly for a lone string
  os << json(s).dump();
}

inline void write_canonical(std::ostringstream& os, const json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{" << nl;
      bool first = true;
      // object_t is an ordered std::map, so keys come out sorted
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << "," << nl;
        first = false;
        os << pad;
        escape_string(os, it.key());
        os << (indent > 0 ? ": " : ":");
        write_canonical(os, it.value(), indent, depth + 1);
      }
      os << nl << close << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // Numeric arrays stay on one line.
      bool flat = true;
      for (const auto& e : j)
        if (e.is_structured()) flat = false;
      os << "[";
      bool first = true;
      for (const auto& e : j) {
        if (!first) os << ",";
        if (!flat) os << nl << pad;
        first = false;
        write_canonical(os, e, indent, depth + 1);
      }
      if (!flat) os << nl << close;
      os << "]";
      return;
    }
    case json::value_t::number_float: os << format_double(j.get<double>()); return;
    case json::value_t::string: escape_string(os, j.get<std::string>()); return;
    default: os << j.dump(); return;
  }
}

}  // namespace detail

// Sorted keys, %.17g floats, non-finite floats as null.
inline std::string canonical_dump(const json& j, int indent = 2) {
  std::ostringstream os;
  detail::write_canonical(os, j, indent, 0);
  os << "\n";
  return os.str();
}

inline void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path + "'");
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read from '" + path + "' failed");
  return ss.str();
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError("malformed JSON in " + what + ": " + e.what());
  }
}

inline json read_json(const std::string& path) { return parse_json(read_file(path), "'" + path + "'"); }

// ---- matrices and tuples ----

inline json to_json(const Mat& X) {
  json re = json::array(), im = json::array();
  for (Index i = 0; i < X.rows(); ++i)
    for (Index j = 0; j < X.cols(); ++j) {
      re.push_back(X(i, j).real());
      im.push_back(X(i, j).imag());
    }
  return json{{"rows", X.rows()}, {"cols", X.cols()}, {"re", re}, {"im", im}};
}

inline double number_at(const json& a, std::size_t k, const char* what) {
  const json& v = a.at(k);
  if (v.is_null()) return std::nan("");
  if (!v.is_number()) throw IoError(std::string("non-numeric entry in ") + what);
  return v.get<double>();
}

inline Mat matrix_from_json(const json& j) {
  try {
    if (!j.is_object()) throw IoError("matrix must be a JSON object");
    Index rows = j.at("rows").get<Index>(), cols = j.at("cols").get<Index>();
    const json& re = j.at("re");
    const json& im = j.at("im");
    if (rows < 0 || cols < 0) throw IoError("matrix dimensions must be nonnegative");
    const auto count = static_cast<std::size_t>(rows * cols);
    if (!re.is_array() || !im.is_array() || re.size() != count || im.size() != count)
      throw IoError("matrix entry arrays must have rows*cols entries");
    Mat X(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index c = 0; c < cols; ++c) {
        std::size_t k = static_cast<std::size_t>(i * cols + c);
        X(i, c) = cplx(number_at(re, k, "re"), number_at(im, k, "im"));
      }
    return X;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed matrix JSON: ") + e.what());
  }
}

inline json to_json(const MatrixTuple& T) {
  json mats = json::array();
  for (const Mat& X : T.mats) mats.push_back(to_json(X));
  return json{{"class", short_name(T.cls)}, {"d", T.d()}, {"n", T.n}, {"matrices", mats}};
}

inline MatrixTuple tuple_from_json(const json& j) {
  SymmetryClass cls;
  std::vector<Mat> mats;
  long d = 0, n = 0;
  try {
    if (!j.is_object()) throw IoError("tuple must be a JSON object");
    cls = parse_class(j.at("class").get<std::string>());
    d = j.at("d").get<long>();
    n = j.at("n").get<long>();
    for (const auto& m : j.at("matrices")) mats.push_back(matrix_from_json(m));
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed tuple JSON: ") + e.what());
  }
  if (static_cast<long>(mats.size()) != d)
    throw DimensionError("tuple declares d = " + std::to_string(d) + " but holds " + std::to_string(mats.size()) +
                         " matrices");
  MatrixTuple T = make_tuple(cls, std::move(mats));
  if (d > 0 && T.n != n) throw DimensionError("tuple declares n = " + std::to_string(n) + " but matrices disagree");
  T.n = n;
  return T;
}

inline MatrixTuple read_tuple(const std::string& path) { return tuple_from_json(read_json(path)); }

inline json to_json(const RMat& X) {
  json rows = json::array();
  for (Index i = 0; i < X.rows(); ++i) {
    json r = json::array();
    for (Index j = 0; j < X.cols(); ++j) r.push_back(X(i, j));
    rows.push_back(r);
  }
  return rows;
}

inline json to_json(const DiagnosticsReport& r) {
  return json{{"commutator_defect", r.commutator_defect},
              {"sphere_defect", r.sphere_defect},
              {"contraction_defect", r.contraction_defect},
              {"commutator_defect_frobenius", r.commutator_defect_frobenius},
              {"sphere_defect_frobenius", r.sphere_defect_frobenius},
              {"pair_table", to_json(r.pair_table)}};
}

inline json to_json(const IndexResult& r) {
  return json{{"group", to_string(r.group)}, {"value", r.value}, {"gap", r.gap}, {"valid", r.valid},
              {"detail", r.detail}};
}

// ---- tables ----

struct Table {
  std::vector<std::string> columns;
  std::vector<json> rows;  // objects keyed by column name
};

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::string csv_cell(const json& v) {
  switch (v.type()) {
    case json::value_t::null: return "";
    case json::value_t::string: return csv_field(v.get<std::string>());
    case json::value_t::number_float: {
      double x = v.get<double>();
      return std::isfinite(x) ? format_double(x) : (std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf"));
    }
    case json::value_t::boolean: return v.get<bool>() ? "true" : "false";
    default: return csv_field(v.dump());
  }
}

inline std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + csv_field(t.columns[i]);
  out += "\r\n";
  for (const json& r : t.rows) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      if (i) out += ",";
      auto it = r.find(t.columns[i]);
      if (it != r.end()) out += csv_cell(*it);
    }
    out += "\r\n";
  }
  return out;
}

inline std::string to_json_table(const Table& t) {
  json rows = json::array();
  for (const json& r : t.rows) {
    json o = json::object();
    for (const auto& c : t.columns) o[c] = r.contains(c) ? r.at(c) : json();
    rows.push_back(o);
  }
  return canonical_dump(json{{"columns", t.columns}, {"rows", rows}});
}

enum class TableFormat { Csv, Json };

inline TableFormat parse_format(const std::string& s) {
  if (s == "csv") return TableFormat::Csv;
  if (s == "json") return TableFormat::Json;
  throw DomainError("unknown table format '" + s + "' (expected csv or json)");
}

inline void emit_table(const Table& t, TableFormat fmt, const std::string& path) {
  for (const json& r : t.rows)
    for (auto it = r.begin(); it != r.end(); ++it)
      if (std::find(t.columns.begin(), t.columns.end(), it.key()) == t.columns.end())
        throw DomainError("emit_table: row has field '" + it.key() + "' outside the header");
  atomic_write(path, fmt == TableFormat::Csv ? to_csv(t) : to_json_table(t));
}

// ---- CRT modules ----

inline json to_json(const crt::IMat& A) {
  json data = json::array();
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) data.push_back(A(i, j));
  return json{{"rows", A.rows()}, {"cols", A.cols()}, {"data", data}};
}

inline crt::IMat imat_from_json(const json& j) {
  Eigen::Index r = j.at("rows").get<Eigen::Index>(), c = j.at("cols").get<Eigen::Index>();
  const json& data = j.at("data");
  if (r < 0 || c < 0 || data.size() != static_cast<std::size_t>(r * c))
    throw PresentationError("integer matrix JSON has inconsistent size");
  crt::IMat A(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index k = 0; k < c; ++k) A(i, k) = data.at(static_cast<std::size_t>(i * c + k)).get<crt::Int>();
  return A;
}

inline json to_json(const crt::CrtModule& M) {
  json parts = json::object();
  for (crt::Part p : crt::all_parts) {
    const crt::GradedGroup& g = M.part(p);
    json groups = json::array();
    for (int n = 0; n < g.period; ++n) groups.push_back(g.at(n));
    parts[crt::to_string(p)] = json{{"period", g.period}, {"invariant_factors", groups}};
  }
  json ops = json::object();
  for (const auto& [name, op] : M.ops) {
    json mats = json::array();
    for (int n = 0; n < 8; ++n) mats.push_back(to_json(op.mats[n]));
    ops[name] = json{{"src", crt::to_string(op.src)}, {"dst", crt::to_string(op.dst)}, {"shift", op.shift},
                     {"matrices", mats}};
  }
  return json{{"parts", parts}, {"operations", ops}};
}

inline crt::CrtModule module_from_json(const json& j) {
  try {
    std::array<crt::GradedGroup, 3> parts;
    for (crt::Part p : crt::all_parts) {
      const json& pj = j.at("parts").at(crt::to_string(p));
      crt::GradedGroup& g = parts[static_cast<int>(p)];
      g.period = pj.at("period").get<int>();
      const json& groups = pj.at("invariant_factors");
      if (g.period <= 0 || 8 % g.period != 0 || groups.size() != static_cast<std::size_t>(g.period))
        throw PresentationError("part " + crt::to_string(p) + ": one group per degree of the period expected");
      for (int n = 0; n < 8; ++n) g.groups[n] = groups.at(static_cast<std::size_t>(n % g.period)).get<crt::Factors>();
    }
    crt::CrtModule M = crt::zero_operations(parts);
    for (auto& [name, op] : M.ops) {
      const json& oj = j.at("operations").at(name);
      if (crt::parse_part(oj.at("src").get<std::string>()) != op.src ||
          crt::parse_part(oj.at("dst").get<std::string>()) != op.dst || oj.at("shift").get<int>() != op.shift)
        throw PresentationError("operation " + name + " has the wrong signature");
      const json& mats = oj.at("matrices");
      if (mats.size() != 8) throw PresentationError("operation " + name + ": eight matrices expected");
      for (int n = 0; n < 8; ++n) op.mats[n] = imat_from_json(mats.at(static_cast<std::size_t>(n)));
    }
    crt::validate(M);
    return M;
  } catch (const json::exception& e) {
    throw PresentationError(std::string("malformed module JSON: ") + e.what());
  }
}

}  // namespace halmos::io
