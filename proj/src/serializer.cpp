#include "mixlayer/serializer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace mixlayer::io {

namespace {

constexpr const char* kKindNames[] = {"Table", "Profile", "Field",
                                      "Streamlines", "Report"};

std::string sanitize_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

// RFC-4180 quoting for header fields (data cells are numeric and never need
// it).
std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

double parse_value(const std::string& text, const std::string& path,
                   std::size_t lineno) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin) {
    fail(ErrorCode::InvalidDoc, "unparseable number '" + text + "' in " +
                                    path + " line " + std::to_string(lineno));
  }
  return v;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  }
  return out;
}

void finish_write(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) {
    fail(ErrorCode::IoError, "write to '" + path + "' failed");
  }
}

}  // namespace

const char* doc_kind_name(DocKind kind) {
  return kKindNames[static_cast<int>(kind)];
}

DocKind doc_kind_from_name(std::string_view name) {
  for (int i = 0; i < 5; ++i) {
    if (name == kKindNames[i]) return static_cast<DocKind>(i);
  }
  fail(ErrorCode::InvalidDoc,
       "unknown document kind '" + std::string(name) + "'");
}

std::size_t OutputDoc::rows() const {
  return columns.empty() ? 0 : columns.front().values.size();
}

const Column* OutputDoc::find(std::string_view name) const {
  for (const auto& c : columns) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

void OutputDoc::add_column(std::string name, std::vector<double> values) {
  columns.push_back(Column{std::move(name), std::move(values)});
}

void OutputDoc::validate() const {
  if (columns.empty()) {
    fail(ErrorCode::InvalidDoc, "document has no columns");
  }
  const std::size_t n = columns.front().values.size();
  for (const auto& c : columns) {
    if (c.name.empty()) {
      fail(ErrorCode::InvalidDoc, "column with empty name");
    }
    if (c.values.size() != n) {
      fail(ErrorCode::InvalidDoc,
           "column '" + c.name + "' has " + std::to_string(c.values.size()) +
               " rows, expected " + std::to_string(n));
    }
  }
  for (std::size_t i = 0; i < columns.size(); ++i) {
    for (std::size_t j = i + 1; j < columns.size(); ++j) {
      if (columns[i].name == columns[j].name) {
        fail(ErrorCode::InvalidDoc,
             "duplicate column name '" + columns[i].name + "'");
      }
    }
  }
}

std::string format_value(double v) {
  char buf[48];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

void write_csv(const OutputDoc& doc, const std::string& path) {
  doc.validate();
  std::ofstream out = open_for_write(path);
  out << "# kind=" << doc_kind_name(doc.kind) << "\n";
  for (const auto& [key, value] : doc.metadata) {
    out << "# " << sanitize_line(key) << "=" << sanitize_line(value) << "\n";
  }
  for (std::size_t i = 0; i < doc.columns.size(); ++i) {
    if (i > 0) out << ",";
    out << csv_quote(doc.columns[i].name);
  }
  out << "\n";
  const std::size_t n = doc.rows();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < doc.columns.size(); ++i) {
      if (i > 0) out << ",";
      out << format_value(doc.columns[i].values[r]);
    }
    out << "\n";
  }
  if (!doc.termination_comment.empty()) {
    out << "# termination=" << sanitize_line(doc.termination_comment) << "\n";
  }
  finish_write(out, path);
}

OutputDoc read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorCode::IoError, "cannot open '" + path + "' for reading");
  }
  OutputDoc doc;
  std::string line;
  bool have_header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string body = line.substr(1);
      if (!body.empty() && body.front() == ' ') body.erase(0, 1);
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;  // free-form comment
      const std::string key = body.substr(0, eq);
      const std::string value = body.substr(eq + 1);
      if (key == "kind") {
        doc.kind = doc_kind_from_name(value);
      } else if (key == "termination") {
        doc.termination_comment = value;
      } else {
        doc.metadata[key] = value;
      }
      continue;
    }
    const auto fields = csv_split(line);
    if (!have_header) {
      for (const auto& name : fields) {
        doc.columns.push_back(Column{name, {}});
      }
      have_header = true;
      continue;
    }
    if (fields.size() != doc.columns.size()) {
      fail(ErrorCode::InvalidDoc,
           "row with " + std::to_string(fields.size()) + " fields, expected " +
               std::to_string(doc.columns.size()) + " in " + path + " line " +
               std::to_string(lineno));
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
      doc.columns[i].values.push_back(parse_value(fields[i], path, lineno));
    }
  }
  if (!have_header) {
    fail(ErrorCode::InvalidDoc, "no header row in " + path);
  }
  doc.validate();
  return doc;
}

void write_json(const OutputDoc& doc, const std::string& path) {
  doc.validate();
  nlohmann::json root;  // map-backed: keys serialize in sorted order
  root["kind"] = doc_kind_name(doc.kind);
  bool nonfinite = false;
  nlohmann::json cols = nlohmann::json::object();
  for (const auto& c : doc.columns) {
    nlohmann::json arr = nlohmann::json::array();
    for (double v : c.values) {
      if (std::isfinite(v)) {
        arr.push_back(v);
      } else {
        arr.push_back(nullptr);
        nonfinite = true;
      }
    }
    cols[c.name] = std::move(arr);
  }
  root["columns"] = std::move(cols);
  nlohmann::json meta = nlohmann::json::object();
  for (const auto& [key, value] : doc.metadata) meta[key] = value;
  if (nonfinite) meta["nonfinite_values"] = "null";
  root["metadata"] = std::move(meta);
  if (!doc.termination_comment.empty()) {
    root["termination"] = doc.termination_comment;
  }
  std::ofstream out = open_for_write(path);
  out << root.dump(2) << "\n";
  finish_write(out, path);
}

OutputDoc read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorCode::IoError, "cannot open '" + path + "' for reading");
  }
  nlohmann::json root;
  try {
    in >> root;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidDoc,
         "malformed JSON in '" + path + "': " + e.what());
  }
  OutputDoc doc;
  try {
    doc.kind = doc_kind_from_name(root.at("kind").get<std::string>());
    for (const auto& [key, value] : root.at("metadata").items()) {
      doc.metadata[key] = value.get<std::string>();
    }
    for (const auto& [name, arr] : root.at("columns").items()) {
      Column col;
      col.name = name;
      for (const auto& v : arr) {
        col.values.push_back(v.is_null()
                                 ? std::numeric_limits<double>::quiet_NaN()
                                 : v.get<double>());
      }
      doc.columns.push_back(std::move(col));
    }
    if (root.contains("termination")) {
      doc.termination_comment = root["termination"].get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidDoc,
         "unexpected JSON layout in '" + path + "': " + e.what());
  }
  doc.validate();
  return doc;
}

GoldenReport compare_golden(
    const OutputDoc& produced, const std::string& golden_path,
    const std::map<std::string, ColumnTolerance>& tolerances,
    ColumnTolerance fallback) {
  produced.validate();
  {
    std::ifstream probe(golden_path);
    if (!probe) {
      fail(ErrorCode::IoError,
           "golden file not found: '" + golden_path +
               "' -- run the producing command and copy its output to this "
               "path to (re)create the golden");
    }
  }
  const bool json = golden_path.size() >= 5 &&
                    golden_path.compare(golden_path.size() - 5, 5, ".json") == 0;
  const OutputDoc golden = json ? read_json(golden_path) : read_csv(golden_path);

  for (const auto& c : produced.columns) {
    if (golden.find(c.name) == nullptr) {
      fail(ErrorCode::SchemaMismatch, "golden file '" + golden_path +
                                          "' lacks column '" + c.name + "'");
    }
  }
  for (const auto& c : golden.columns) {
    if (produced.find(c.name) == nullptr) {
      fail(ErrorCode::SchemaMismatch,
           "produced document lacks golden column '" + c.name + "'");
    }
  }
  if (golden.rows() != produced.rows()) {
    fail(ErrorCode::SchemaMismatch,
         "row count mismatch: produced " + std::to_string(produced.rows()) +
             ", golden " + std::to_string(golden.rows()));
  }

  GoldenReport report;
  for (const auto& col : produced.columns) {
    const Column& ref = *golden.find(col.name);
    const auto it = tolerances.find(col.name);
    const ColumnTolerance tol = it == tolerances.end() ? fallback : it->second;
    ColumnDeviation dev;
    dev.name = col.name;
    for (std::size_t r = 0; r < col.values.size(); ++r) {
      const double p = col.values[r];
      const double g = ref.values[r];
      double abs_dev;
      if (std::isnan(p) && std::isnan(g)) {
        abs_dev = 0.0;
      } else if (!std::isfinite(p) || !std::isfinite(g)) {
        abs_dev = (p == g) ? 0.0 : std::numeric_limits<double>::infinity();
      } else {
        abs_dev = std::abs(p - g);
      }
      const double scale = std::max(std::abs(p), std::abs(g));
      const double rel_dev = abs_dev == 0.0 ? 0.0
                             : scale > 0.0
                                 ? abs_dev / scale
                                 : std::numeric_limits<double>::infinity();
      if (abs_dev > dev.max_abs) {
        dev.max_abs = abs_dev;
        dev.worst_row = r;
      }
      dev.max_rel = std::max(dev.max_rel, rel_dev);
      if (!(abs_dev <= tol.abs || rel_dev <= tol.rel)) {
        dev.pass = false;
        if (report.message.empty()) {
          std::ostringstream msg;
          msg << "column '" << col.name << "' row " << r << ": |" << p << " - "
              << g << "| = " << abs_dev << " exceeds abs " << tol.abs
              << " (rel " << rel_dev << " > " << tol.rel << ")";
          report.message = msg.str();
        }
      }
    }
    report.pass = report.pass && dev.pass;
    report.columns.push_back(std::move(dev));
  }
  if (report.pass) {
    report.message = "all " + std::to_string(report.columns.size()) +
                     " columns within tolerance";
  }
  return report;
}

}  // namespace mixlayer::io
